#pragma once

#include "tmx/functional.hpp"
#include "tmx/potential.hpp"

namespace tmx {

/// Constants of the two-branch test function construction. The O(R^-2) tail
/// of C^2 is dropped; A keeps its exact continuity correction so both
/// branches meet at t_eps (see f_eps).
struct MoserConstants {
    double epsilon = 0.0;
    double R = 0.0;      // -ln eps
    double t_eps = 0.0;  // (1/2pi) ln(1/(R eps))
    double C_sq = 0.0;
    double A = 0.0;
};

/// Requires 0 < eps < 1/e (so R > 1).
MoserConstants moser_constants(double epsilon);

/// The radial profile applied to Green values:
///   f(t) = t / C                                   for t <  t_eps
///   f(t) = C + ( -(1/4pi) ln(1 + pi eps^-2 e^{-4 pi t}) + A ) / C  otherwise.
double f_eps(const MoserConstants& mc, double t);

/// phi_eps = f_eps(G_{Omega,center}) rescaled to unit H^1_0 seminorm. center
/// snaps to the nearest interior vertex; pre_norm (when given) receives the
/// seminorm before rescaling, whose deviation from 1 measures the dropped
/// O(R^-2) terms plus discretization.
Field build_test_function(const FemContext& ctx, double epsilon, Vec2 center,
                          double* pre_norm = nullptr);

/// Lower-bound prediction |Omega| + pi e sup r^2 + 4 pi intG2 / C^2
/// - lambda intGp / C^p with C^p = C_sq^{p/2}; the O(R^-2) term is dropped.
/// For p = 2 the combined coefficient (4 pi - lambda) intG2 / C^2 is written
/// to p2_coeff when requested.
double lower_bound_prediction(const FemContext& ctx, const PotentialReport& report, double epsilon,
                              const PerturbParams& params, double* p2_coeff = nullptr);

}  // namespace tmx

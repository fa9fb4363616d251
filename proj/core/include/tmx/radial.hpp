#pragma once

#include <vector>

#include "tmx/functional.hpp"

namespace tmx {

struct RadialConstants {
    static constexpr double A0 = 4.0 * M_PI;
    static constexpr double B0 = M_PI * M_PI / 6.0 + 2.0;
};

/// Standard bubble phi_inf(r) = -log(1 + r^2).
double phi_inf(double r);

/// Second-order radial correction profile
///   S0(r) = phi + 2r^2/(1+r^2) - phi^2/2 + (1-r^2)/(1+r^2) * int_1^{1+r^2} log t/(1-t) dt
/// with the integral evaluated by adaptive quadrature to 1e-12 absolute.
double s0_profile(double r);

struct BubbleIdentityReport {
    double R_max = 0.0;
    double liouville_sup_residual = 0.0;  // sup | -lap phi - 4 e^{2 phi} |
    double mass_integral = 0.0;           // int_{B_R} e^{2 phi}
    double mass_error = 0.0;              // | mass_integral - pi R^2/(1+R^2) |
    double s0_ode_sup_residual = 0.0;     // sup residual of the S0 equation
};

BubbleIdentityReport bubble_identities(double R_max, double quad_tol = 1e-12);

struct RadialProfile {
    double gamma = 0.0, E = 0.0, lambda = 0.0, p = 2.0, delta = 0.0;
    double r_k = 0.0;        // (E/pi)^{1/2} gamma^{-1} e^{-gamma^2/2}
    double r_k_delta = 0.0;  // t(r_k_delta) = delta gamma^2
    std::vector<double> r;   // physical radii, r[0] = 0
    std::vector<double> t;   // log(1 + r^2/r_k^2), uniform grid up to delta gamma^2
    std::vector<double> V;   // radial solution, V[0] = gamma
    bool sign_change = false;

    double value_at_t(double tq) const;  // linear interpolation in t
};

struct ShootOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    int grid_points = 400;
};

/// Integrates V'' + V'/r = -(4 pi / E)(V e^{V^2} - (p/(2 (4pi)^{p/2})) lambda |V|^{p-1})
/// from V(0) = gamma, V'(0) = 0 out to t = delta gamma^2, with a second-order
/// series start over the removable r = 0 singularity. A profile where V
/// crosses zero is truncated and flagged.
RadialProfile shoot_radial(double gamma, double E, const PerturbParams& params, double delta,
                           const ShootOptions& opts = {});

struct ExpansionStats {
    double raw_sup = 0.0;     // sup |V - (gamma - t/gamma + S0/gamma^3)|
    double scaled_sup = 0.0;  // sup of the same error * gamma^5 / (1 + t)
    std::vector<double> err;
};

ExpansionStats expansion_error(const RadialProfile& profile);

/// integral of (4 pi / E) V^2 e^{V^2} over the ball r <= r_{k,delta}, carried
/// as an extra state of the same adaptive integration (so it holds solver
/// accuracy; the profile's output grid is too coarse for the gamma^-4 tail
/// this quantity is used to expose).
double exponential_ball_integral(double gamma, double E, const PerturbParams& params, double delta,
                                 const ShootOptions& opts = {});

}  // namespace tmx

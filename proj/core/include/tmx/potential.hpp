#pragma once

#include "tmx/fem.hpp"
#include "tmx/field.hpp"

namespace tmx {

/// Potential-theoretic summary of a domain. The Robin field carries +inf at
/// boundary vertices (harmonic_radius 0 there); the boundary limit itself is
/// never asserted.
struct PotentialReport {
    const Mesh* mesh = nullptr;
    Field robin;            // tau at interior vertices
    Field harmonic_radius;  // exp(-2 pi tau)
    Vec2 harmonic_center{};
    int center_vertex = -1;             // interior argmax of the radius field
    double max_radius = 0.0;            // sup of the quadratically refined radius
    double concentration_level = 0.0;   // |Omega| + pi e max_radius^2
    Field green_at_center;              // Green function sourced at center_vertex
};

/// Discrete Green function with source at an interior vertex: the analytic
/// kernel -(1/2pi) log|x-y| plus a discrete-harmonic correction chosen so the
/// sum vanishes on the boundary. The value stored at the source vertex is the
/// kernel evaluated at half the mean incident edge length (finite stand-in
/// for the log singularity; only affects quadrature over the source patch).
Field green_function(const FemContext& ctx, int source_vertex);

/// Robin function tau(x) = H_x(x) at every interior vertex. stride == 0 uses
/// the boundary harmonic-basis route (one solve per boundary vertex, exact
/// for the discrete system); stride >= 1 solves per sampled interior vertex
/// and fills the rest by discrete-harmonic interpolation.
Field robin_function(const FemContext& ctx, int stride = 0);

PotentialReport concentration_level(const FemContext& ctx, int stride = 0);

/// integral of G^p over the mesh (order-2 quadrature on the nodal field).
double green_power_integral(const FemContext& ctx, const Field& green, double p);

}  // namespace tmx

#pragma once

#include <array>
#include <cmath>
#include <memory>
#include <span>
#include <vector>

#include "tmx/field.hpp"
#include "tmx/mesh.hpp"
#include "tmx/sparse.hpp"

namespace tmx {

/// Stiffness matrix K with field' * K * field = integral of |grad u_h|^2,
/// assembled without boundary conditions (constants in the kernel).
SparseOperator assemble_stiffness(const Mesh& mesh);

/// Consistent P1 mass matrix.
SparseOperator assemble_mass(const Mesh& mesh);

double h1_seminorm(const Mesh& mesh, const Field& u);

// ---------------------------------------------------------------------------
// Quadrature

enum class Quad : int { vertex = 1, midedge = 2, seven = 3 };

struct QuadPoint {
    double l0, l1, l2, w;
};

std::span<const QuadPoint> quad_points(Quad order);

/// Exponential capped at exp(700); blow-up regimes intentionally push the
/// exponent large and a silent infinity would corrupt the line search.
inline constexpr double kExpCap = 700.0;

inline double capped_exp(double x, bool* touched = nullptr) {
    if (x > kExpCap) {
        if (touched) *touched = true;
        x = kExpCap;
    }
    return std::exp(x);
}

/// Integrate f(values of fields...) over the mesh with the given rule.
template <class F, class... Fields>
double integrate(const Mesh& mesh, Quad order, F&& f, const Fields&... fields) {
    auto pts = quad_points(order);
    double s = 0.0, c = 0.0;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto& tr = mesh.triangle(t);
        double area = mesh.tri_area(t);
        for (const auto& q : pts) {
            double term = area * q.w *
                          f((q.l0 * fields[tr[0]] + q.l1 * fields[tr[1]] + q.l2 * fields[tr[2]])...);
            double y = term - c;
            double tt = s + y;
            c = (tt - s) - y;
            s = tt;
        }
    }
    return s;
}

/// Same, with the physical point passed first: f(Vec2, values...).
template <class F, class... Fields>
double integrate_xy(const Mesh& mesh, Quad order, F&& f, const Fields&... fields) {
    auto pts = quad_points(order);
    double s = 0.0, c = 0.0;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto& tr = mesh.triangle(t);
        Vec2 a = mesh.vertex(tr[0]), b = mesh.vertex(tr[1]), d = mesh.vertex(tr[2]);
        double area = mesh.tri_area(t);
        for (const auto& q : pts) {
            Vec2 p = q.l0 * a + q.l1 * b + q.l2 * d;
            double term = area * q.w *
                          f(p, (q.l0 * fields[tr[0]] + q.l1 * fields[tr[1]] + q.l2 * fields[tr[2]])...);
            double y = term - c;
            double tt = s + y;
            c = (tt - s) - y;
            s = tt;
        }
    }
    return s;
}

// ---------------------------------------------------------------------------
// Dirichlet solves

/// Shared per-mesh state: assembled operators plus the boundary-eliminated
/// stiffness block. Solves are single-threaded per call; independent solves
/// may run concurrently on the same context.
class FemContext {
public:
    explicit FemContext(const Mesh& mesh, CgOptions cg = {});

    const Mesh& mesh() const { return *mesh_; }
    const SparseOperator& stiffness() const { return K_; }
    const SparseOperator& mass() const { return M_; }
    const CgOptions& cg_options() const { return cg_; }

    double h1_seminorm(const Field& u) const { return std::sqrt(std::max(0.0, K_.quadratic_form(u.values()))); }

    /// Solve -Laplace(w) = f with w = g on the boundary; f is a nodal density
    /// (the load is M*f), g supplies boundary values. Optional warm start.
    Field solve_dirichlet(const Field& f, const Field& g,
                          std::vector<double>* warm = nullptr) const;

    /// Same with an explicit load vector L_i = integral f phi_i, zero boundary data.
    Field solve_load(std::span<const double> load, std::vector<double>* warm = nullptr) const;

    /// Discrete harmonic extension of boundary data g (f = 0).
    Field harmonic_extension(const Field& g, std::vector<double>* warm = nullptr) const;

    /// H^-1 norm sqrt(r' K^{-1} r) of a load vector restricted to interior DOFs.
    double dual_norm(std::span<const double> load) const;

    int n_interior() const { return (int)interior_.size(); }

private:
    const Mesh* mesh_;
    SparseOperator K_, M_, K_int_;
    std::vector<int> interior_;       // interior vertex ids
    std::vector<int> interior_index_; // vertex id -> interior dof or -1
    CgOptions cg_;

    Field solve_interior(std::vector<double> rhs_int, const Field* g,
                         std::vector<double>* warm) const;
};

/// Convenience wrapper that assembles a context per call (fine for one-off
/// solves; use FemContext in loops).
Field solve_dirichlet(const Mesh& mesh, const Field& rhs_density, const Field& boundary_values,
                      CgOptions cg = {});

}  // namespace tmx

#include "tmx/fem.hpp"

#include <cmath>

namespace tmx {

SparseOperator assemble_stiffness(const Mesh& mesh) {
    std::vector<std::tuple<int, int, double>> t;
    t.reserve((size_t)9 * mesh.n_triangles());
    for (int k = 0; k < mesh.n_triangles(); ++k) {
        const auto& tr = mesh.triangle(k);
        Vec2 p0 = mesh.vertex(tr[0]), p1 = mesh.vertex(tr[1]), p2 = mesh.vertex(tr[2]);
        double a2 = 2.0 * mesh.tri_area(k);
        // gradients of barycentric coordinates
        Vec2 g[3] = {{(p1.y - p2.y) / a2, (p2.x - p1.x) / a2},
                     {(p2.y - p0.y) / a2, (p0.x - p2.x) / a2},
                     {(p0.y - p1.y) / a2, (p1.x - p0.x) / a2}};
        double area = 0.5 * a2;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                t.emplace_back(tr[i], tr[j], area * dot(g[i], g[j]));
    }
    return SparseOperator::from_triplets(mesh.n_vertices(), std::move(t));
}

SparseOperator assemble_mass(const Mesh& mesh) {
    std::vector<std::tuple<int, int, double>> t;
    t.reserve((size_t)9 * mesh.n_triangles());
    for (int k = 0; k < mesh.n_triangles(); ++k) {
        const auto& tr = mesh.triangle(k);
        double area = mesh.tri_area(k);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                t.emplace_back(tr[i], tr[j], area * (i == j ? 1.0 / 6.0 : 1.0 / 12.0));
    }
    return SparseOperator::from_triplets(mesh.n_vertices(), std::move(t));
}

double h1_seminorm(const Mesh& mesh, const Field& u) {
    return std::sqrt(std::max(0.0, assemble_stiffness(mesh).quadratic_form(u.values())));
}

std::span<const QuadPoint> quad_points(Quad order) {
    static const std::array<QuadPoint, 3> vertex_rule = {{{1, 0, 0, 1.0 / 3.0},
                                                          {0, 1, 0, 1.0 / 3.0},
                                                          {0, 0, 1, 1.0 / 3.0}}};
    static const std::array<QuadPoint, 3> midedge_rule = {{{0.5, 0.5, 0.0, 1.0 / 3.0},
                                                           {0.0, 0.5, 0.5, 1.0 / 3.0},
                                                           {0.5, 0.0, 0.5, 1.0 / 3.0}}};
    // 7-point degree-5 rule
    static const std::array<QuadPoint, 7> seven_rule = [] {
        std::array<QuadPoint, 7> r{};
        const double a1 = (6.0 + std::sqrt(15.0)) / 21.0;
        const double w1 = (155.0 + std::sqrt(15.0)) / 1200.0;
        const double a2 = (6.0 - std::sqrt(15.0)) / 21.0;
        const double w2 = (155.0 - std::sqrt(15.0)) / 1200.0;
        r[0] = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 9.0 / 40.0};
        r[1] = {a1, a1, 1 - 2 * a1, w1};
        r[2] = {a1, 1 - 2 * a1, a1, w1};
        r[3] = {1 - 2 * a1, a1, a1, w1};
        r[4] = {a2, a2, 1 - 2 * a2, w2};
        r[5] = {a2, 1 - 2 * a2, a2, w2};
        r[6] = {1 - 2 * a2, a2, a2, w2};
        return r;
    }();
    switch (order) {
        case Quad::vertex: return vertex_rule;
        case Quad::midedge: return midedge_rule;
        case Quad::seven: return seven_rule;
    }
    throw DomainError("unknown quadrature order");
}

FemContext::FemContext(const Mesh& mesh, CgOptions cg)
    : mesh_(&mesh), K_(assemble_stiffness(mesh)), M_(assemble_mass(mesh)), cg_(cg) {
    interior_ = mesh.interior_vertices();
    interior_index_.assign(mesh.n_vertices(), -1);
    for (size_t i = 0; i < interior_.size(); ++i) interior_index_[interior_[i]] = (int)i;
    K_int_ = K_.restrict_to(interior_);
}

Field FemContext::solve_interior(std::vector<double> rhs_int, const Field* g,
                                 std::vector<double>* warm) const {
    std::vector<double> x;
    if (warm && warm->size() == rhs_int.size()) x = *warm;
    pcg(K_int_, rhs_int, x, cg_);
    if (warm) *warm = x;
    Field w(*mesh_);
    if (g)
        for (int b : mesh_->boundary_vertices()) w[b] = (*g)[b];
    for (size_t i = 0; i < interior_.size(); ++i) w[interior_[i]] = x[i];
    return w;
}

Field FemContext::solve_dirichlet(const Field& f, const Field& g,
                                  std::vector<double>* warm) const {
    const int n = mesh_->n_vertices();
    std::vector<double> load(n, 0.0);
    M_.apply(f.values(), load);
    // move boundary data to the right-hand side: L_int -= K_ib g_b
    std::vector<double> gb(n, 0.0);
    bool has_g = false;
    for (int b : mesh_->boundary_vertices()) {
        gb[b] = g[b];
        has_g = has_g || g[b] != 0.0;
    }
    std::vector<double> rhs((size_t)n_interior());
    if (has_g) {
        std::vector<double> kg(n);
        K_.apply(gb, kg);
        for (int i = 0; i < n_interior(); ++i) rhs[i] = load[interior_[i]] - kg[interior_[i]];
    } else {
        for (int i = 0; i < n_interior(); ++i) rhs[i] = load[interior_[i]];
    }
    return solve_interior(std::move(rhs), &g, warm);
}

Field FemContext::solve_load(std::span<const double> load, std::vector<double>* warm) const {
    std::vector<double> rhs((size_t)n_interior());
    for (int i = 0; i < n_interior(); ++i) rhs[i] = load[interior_[i]];
    return solve_interior(std::move(rhs), nullptr, warm);
}

Field FemContext::harmonic_extension(const Field& g, std::vector<double>* warm) const {
    Field zero(*mesh_);
    return solve_dirichlet(zero, g, warm);
}

double FemContext::dual_norm(std::span<const double> load) const {
    std::vector<double> rhs((size_t)n_interior());
    for (int i = 0; i < n_interior(); ++i) rhs[i] = load[interior_[i]];
    std::vector<double> x;
    pcg(K_int_, rhs, x, cg_);
    double s = 0.0;
    for (int i = 0; i < n_interior(); ++i) s += rhs[i] * x[i];
    return std::sqrt(std::max(0.0, s));
}

Field solve_dirichlet(const Mesh& mesh, const Field& rhs_density, const Field& boundary_values,
                      CgOptions cg) {
    FemContext ctx(mesh, cg);
    return ctx.solve_dirichlet(rhs_density, boundary_values);
}

}  // namespace tmx

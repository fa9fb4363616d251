#include "tmx/potential.hpp"

#include <cmath>
#include <limits>

namespace tmx {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

double log_kernel(Vec2 x, Vec2 y) { return -std::log(dist(x, y)) / kTwoPi; }

/// Discrete harmonic extensions of the boundary nodal hat functions. Column j
/// is the solve with data 1 at boundary vertex j, 0 elsewhere. Warm-started in
/// boundary order since neighbouring columns are close.
std::vector<Field> boundary_basis(const FemContext& ctx) {
    const Mesh& m = ctx.mesh();
    std::vector<Field> cols;
    cols.reserve(m.boundary_vertices().size());
    std::vector<double> warm;
    for (int b : m.boundary_vertices()) {
        Field g(m);
        g[b] = 1.0;
        cols.push_back(ctx.harmonic_extension(g, &warm));
    }
    return cols;
}

}  // namespace

Field green_function(const FemContext& ctx, int source_vertex) {
    const Mesh& m = ctx.mesh();
    if (source_vertex < 0 || source_vertex >= m.n_vertices() || m.is_boundary(source_vertex))
        throw DomainError("green_function: source must be an interior vertex");
    Vec2 src = m.vertex(source_vertex);
    Field g(m);
    for (int b : m.boundary_vertices()) g[b] = log_kernel(src, m.vertex(b));
    Field H = ctx.harmonic_extension(g);  // harmonic part of -G
    Field G(m);
    for (int i = 0; i < m.n_vertices(); ++i) {
        if (i == source_vertex) continue;
        G[i] = log_kernel(src, m.vertex(i)) - H[i];
    }
    double rho = 0.5 * m.mean_incident_edge(source_vertex);
    G[source_vertex] = -std::log(rho) / kTwoPi - H[source_vertex];
    G.zero_boundary();
    return G;
}

Field robin_function(const FemContext& ctx, int stride) {
    const Mesh& m = ctx.mesh();
    Field tau(m, std::numeric_limits<double>::infinity());

    if (stride <= 0) {
        // tau(x) = sum_j -(1/2pi) log|x - b_j| e_j(x); linearity makes this the
        // same discrete object as one Dirichlet solve per vertex.
        auto basis = boundary_basis(ctx);
        const auto& bverts = m.boundary_vertices();
        for (int i : m.interior_vertices()) {
            double s = 0.0;
            for (size_t j = 0; j < bverts.size(); ++j)
                s += log_kernel(m.vertex(i), m.vertex(bverts[j])) * basis[j][i];
            tau[i] = s;
        }
        return tau;
    }

    // Literal route: one harmonic solve per sampled vertex, harmonic fill-in
    // for the unsampled ones.
    const auto& interior = m.interior_vertices();
    std::vector<char> sampled(m.n_vertices(), 0);
    std::vector<double> warm;
    for (size_t k = 0; k < interior.size(); k += (size_t)stride) {
        int i = interior[k];
        Field g(m);
        for (int b : m.boundary_vertices()) g[b] = log_kernel(m.vertex(i), m.vertex(b));
        Field H = ctx.harmonic_extension(g, &warm);
        tau[i] = H[i];
        sampled[i] = 1;
    }
    if ((size_t)stride > 1) {
        // Fill the gaps in the harmonic-radius variable exp(-2 pi tau): it is
        // smooth and vanishes on the boundary, unlike tau itself. Discrete
        // harmonic fill with Dirichlet data at sampled and boundary vertices.
        std::vector<int> unknown;
        for (int i : interior)
            if (!sampled[i]) unknown.push_back(i);
        if (!unknown.empty()) {
            std::vector<int> pos(m.n_vertices(), -1);
            for (size_t k = 0; k < unknown.size(); ++k) pos[unknown[k]] = (int)k;
            const auto& K = ctx.stiffness();
            std::vector<std::tuple<int, int, double>> trip;
            std::vector<double> rhs(unknown.size(), 0.0);
            for (size_t k = 0; k < unknown.size(); ++k) {
                int i = unknown[k];
                for (int q = K.row_ptr()[i]; q < K.row_ptr()[i + 1]; ++q) {
                    int j = K.cols()[q];
                    double v = K.vals()[q];
                    if (pos[j] >= 0)
                        trip.emplace_back((int)k, pos[j], v);
                    else if (sampled[j])
                        rhs[k] -= v * std::exp(-kTwoPi * tau[j]);
                    // boundary neighbours carry data 0
                }
            }
            auto A = SparseOperator::from_triplets((int)unknown.size(), std::move(trip));
            std::vector<double> x;
            pcg(A, rhs, x, ctx.cg_options());
            for (size_t k = 0; k < unknown.size(); ++k) {
                double r = std::max(x[k], 1e-300);
                tau[unknown[k]] = -std::log(r) / kTwoPi;
            }
        }
    }
    return tau;
}

PotentialReport concentration_level(const FemContext& ctx, int stride) {
    const Mesh& m = ctx.mesh();
    PotentialReport rep;
    rep.mesh = &m;
    rep.robin = robin_function(ctx, stride);
    rep.harmonic_radius = Field(m);
    for (int i = 0; i < m.n_vertices(); ++i)
        rep.harmonic_radius[i] = std::exp(-kTwoPi * rep.robin[i]);

    int best = -1;
    double rbest = -1.0;
    for (int i : m.interior_vertices()) {
        if (rep.harmonic_radius[i] > rbest) {
            rbest = rep.harmonic_radius[i];
            best = i;
        }
    }
    rep.center_vertex = best;
    rep.harmonic_center = m.vertex(best);
    rep.max_radius = rbest;

    // Quadratic refinement of the argmax over the 1-ring: fit
    // r(x) ~ c0 + c1 dx + c2 dy + c3 dx^2 + c4 dx dy + c5 dy^2.
    std::vector<int> ring;
    for (const auto& tr : m.triangles()) {
        for (int k = 0; k < 3; ++k) {
            if (tr[k] != best) continue;
            for (int o = 1; o <= 2; ++o) {
                int v = tr[(k + o) % 3];
                if (!m.is_boundary(v) && std::find(ring.begin(), ring.end(), v) == ring.end())
                    ring.push_back(v);
            }
        }
    }
    if (ring.size() >= 5) {
        std::vector<std::array<double, 6>> rows;
        std::vector<double> ys;
        auto add = [&](int v) {
            Vec2 d = m.vertex(v) - m.vertex(best);
            rows.push_back({1.0, d.x, d.y, d.x * d.x, d.x * d.y, d.y * d.y});
            ys.push_back(rep.harmonic_radius[v]);
        };
        add(best);
        for (int v : ring) add(v);
        // normal equations, 6x6
        double A[6][6] = {};
        double b6[6] = {};
        for (size_t r = 0; r < rows.size(); ++r) {
            for (int i = 0; i < 6; ++i) {
                b6[i] += rows[r][i] * ys[r];
                for (int j = 0; j < 6; ++j) A[i][j] += rows[r][i] * rows[r][j];
            }
        }
        // Gaussian elimination with partial pivoting
        bool ok = true;
        for (int c = 0; c < 6 && ok; ++c) {
            int p = c;
            for (int r = c + 1; r < 6; ++r)
                if (std::abs(A[r][c]) > std::abs(A[p][c])) p = r;
            if (std::abs(A[p][c]) < 1e-14) { ok = false; break; }
            std::swap(A[c], A[p]);
            std::swap(b6[c], b6[p]);
            for (int r = c + 1; r < 6; ++r) {
                double f = A[r][c] / A[c][c];
                for (int j = c; j < 6; ++j) A[r][j] -= f * A[c][j];
                b6[r] -= f * b6[c];
            }
        }
        if (ok) {
            double coef[6];
            for (int r = 5; r >= 0; --r) {
                double s = b6[r];
                for (int j = r + 1; j < 6; ++j) s -= A[r][j] * coef[j];
                coef[r] = s / A[r][r];
            }
            // stationary point of the quadratic
            double hxx = 2 * coef[3], hxy = coef[4], hyy = 2 * coef[5];
            double det = hxx * hyy - hxy * hxy;
            if (det > 0 && hxx < 0) {  // proper interior maximum
                double dx = (-coef[1] * hyy + coef[2] * hxy) / det;
                double dy = (-coef[2] * hxx + coef[1] * hxy) / det;
                double reach = m.mean_incident_edge(best);
                if (std::hypot(dx, dy) <= reach) {
                    double val = coef[0] + coef[1] * dx + coef[2] * dy + coef[3] * dx * dx +
                                 coef[4] * dx * dy + coef[5] * dy * dy;
                    if (val >= rbest) {
                        rep.harmonic_center = m.vertex(best) + Vec2{dx, dy};
                        rep.max_radius = val;
                    }
                }
            }
        }
    }

    rep.concentration_level = m.area() + M_PI * M_E * rep.max_radius * rep.max_radius;
    rep.green_at_center = green_function(ctx, best);
    return rep;
}

double green_power_integral(const FemContext& ctx, const Field& green, double p) {
    return integrate(ctx.mesh(), Quad::midedge,
                     [p](double g) { return std::pow(std::max(g, 0.0), p); }, green);
}

}  // namespace tmx

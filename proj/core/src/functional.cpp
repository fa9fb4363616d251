#include "tmx/functional.hpp"

#include <cmath>

namespace tmx {

namespace {

constexpr double kFourPi = 4.0 * M_PI;

// |u|^{p-2} u with the p < 2 singularity at u = 0 regularized to 0.
double signed_power(double u, double p) {
    if (u == 0.0) return 0.0;
    return std::copysign(std::pow(std::abs(u), p - 1.0), u);
}

}  // namespace

std::string variant_name(Variant v) {
    return v == Variant::with_minus_one ? "with" : "without";
}

Variant variant_from_name(const std::string& s) {
    if (s == "with") return Variant::with_minus_one;
    if (s == "without") return Variant::without_minus_one;
    throw UsageError("variant must be 'with' or 'without'");
}

Evaluated evaluate(const Mesh& mesh, const Field& u, const PerturbParams& params, Quad order) {
    params.validate();
    Evaluated out;
    const double shift = params.variant == Variant::with_minus_one ? 1.0 : 0.0;
    out.value = integrate(mesh, order,
                          [&](double v) {
                              return capped_exp(kFourPi * v * v, &out.overflow) - shift -
                                     params.lambda * std::pow(std::abs(v), params.p);
                          },
                          u);
    return out;
}

Field gradient_density(const Mesh& mesh, const Field& u, const PerturbParams& params) {
    params.validate();
    Field g(mesh);
    for (int i = 0; i < mesh.n_vertices(); ++i) {
        double v = u[i];
        g[i] = 8.0 * M_PI * v * capped_exp(kFourPi * v * v) -
               params.p * params.lambda * signed_power(v, params.p);
    }
    return g;
}

std::vector<double> gradient_load(const Mesh& mesh, const Field& u, const PerturbParams& params,
                                  Quad order, bool* overflow) {
    params.validate();
    std::vector<double> load((size_t)mesh.n_vertices(), 0.0);
    auto pts = quad_points(order);
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto& tr = mesh.triangle(t);
        double area = mesh.tri_area(t);
        for (const auto& q : pts) {
            double v = q.l0 * u[tr[0]] + q.l1 * u[tr[1]] + q.l2 * u[tr[2]];
            double g = 8.0 * M_PI * v * capped_exp(kFourPi * v * v, overflow) -
                       params.p * params.lambda * signed_power(v, params.p);
            double w = area * q.w * g;
            load[tr[0]] += w * q.l0;
            load[tr[1]] += w * q.l1;
            load[tr[2]] += w * q.l2;
        }
    }
    return load;
}

Field riesz_gradient(const FemContext& ctx, const Field& u, const PerturbParams& params,
                     std::vector<double>* warm) {
    auto load = gradient_load(ctx.mesh(), u, params);
    return ctx.solve_load(load, warm);
}

double normalizer(const Mesh& mesh, const Field& u, const PerturbParams& params, Quad order,
                  bool* overflow) {
    params.validate();
    return kFourPi * integrate(mesh, order,
                               [&](double v) {
                                   return v * v * capped_exp(kFourPi * v * v, overflow) -
                                          params.p / (8.0 * M_PI) * params.lambda *
                                              std::pow(std::abs(v), params.p);
                               },
                               u);
}

ElResidual el_residual(const FemContext& ctx, const Field& u, const PerturbParams& params) {
    const Mesh& mesh = ctx.mesh();
    double E = normalizer(mesh, u, params);
    if (E <= 0.0)
        throw DomainError("el_residual: degenerate normalizer E <= 0");

    // load of u e^{4 pi u^2} - (p / 8 pi) lambda |u|^{p-2} u  (= gradient / 8 pi)
    auto load = gradient_load(mesh, u, params);
    const double scale = kFourPi / E / (8.0 * M_PI);
    std::vector<double> rhs(load.size());
    for (size_t i = 0; i < load.size(); ++i) rhs[i] = scale * load[i];

    std::vector<double> ku(load.size());
    ctx.stiffness().apply(u.values(), ku);
    std::vector<double> res(load.size());
    for (size_t i = 0; i < load.size(); ++i) res[i] = ku[i] - rhs[i];

    double load_norm = ctx.dual_norm(rhs);
    double res_norm = ctx.dual_norm(res);
    if (load_norm == 0.0) throw DomainError("el_residual: zero load (u identically 0?)");
    return {res_norm / load_norm, E};
}

EnergySplit energy_decompose(const FemContext& ctx, const Field& u, const PerturbParams& params) {
    const Mesh& mesh = ctx.mesh();
    EnergySplit s;
    s.E = normalizer(mesh, u, params);
    if (s.E <= 0.0) throw DomainError("energy_decompose: degenerate normalizer E <= 0");
    // v = 2 sqrt(pi) u; I_E = (4 pi / E) int v^2 e^{v^2},
    // I_P = (4 pi / E) (p / (2 (4 pi)^{p/2})) lambda int v^p.
    double int_v2e = integrate(mesh, Quad::midedge,
                               [](double uu) {
                                   double v2 = kFourPi * uu * uu;
                                   return v2 * capped_exp(v2);
                               },
                               u);
    double int_vp = integrate(mesh, Quad::midedge,
                              [&](double uu) {
                                  return std::pow(2.0 * std::sqrt(M_PI) * std::abs(uu), params.p);
                              },
                              u);
    s.I_E = kFourPi / s.E * int_v2e;
    s.I_P = kFourPi / s.E * params.p / (2.0 * std::pow(kFourPi, params.p / 2.0)) * params.lambda *
            int_vp;
    s.gradient_norm_sq = kFourPi * ctx.stiffness().quadratic_form(u.values());
    return s;
}

}  // namespace tmx

#include "tmx/moser.hpp"

#include <cmath>
#include <limits>

namespace tmx {

MoserConstants moser_constants(double epsilon) {
    if (!(epsilon > 0.0) || epsilon >= std::exp(-1.0))
        throw DomainError("moser_constants: need 0 < eps < 1/e");
    MoserConstants mc;
    mc.epsilon = epsilon;
    mc.R = -std::log(epsilon);
    mc.t_eps = std::log(1.0 / (mc.R * epsilon)) / (2.0 * M_PI);
    mc.C_sq = -std::log(epsilon) / (2.0 * M_PI) + std::log(M_PI) / (4.0 * M_PI) - 1.0 / (4.0 * M_PI);
    // The ln(1 + 1/(pi R^2)) term is the explicit O(R^-2) piece that makes the
    // two branches of f_eps meet exactly at t_eps.
    mc.A = -mc.C_sq - std::log(epsilon) / (2.0 * M_PI) + std::log(M_PI) / (4.0 * M_PI) +
           std::log1p(1.0 / (M_PI * mc.R * mc.R)) / (4.0 * M_PI);
    return mc;
}

double f_eps(const MoserConstants& mc, double t) {
    const double C = std::sqrt(mc.C_sq);
    if (t < mc.t_eps) return t / C;
    // ln(1 + pi eps^-2 e^{-4 pi t}) evaluated in log space to avoid overflow
    double log_arg = std::log(M_PI) - 2.0 * std::log(mc.epsilon) - 4.0 * M_PI * t;
    double ln1p;
    if (log_arg > 40.0)
        ln1p = log_arg;  // 1 is negligible
    else
        ln1p = std::log1p(std::exp(log_arg));
    return C + (-ln1p / (4.0 * M_PI) + mc.A) / C;
}

Field build_test_function(const FemContext& ctx, double epsilon, Vec2 center, double* pre_norm) {
    const Mesh& mesh = ctx.mesh();
    MoserConstants mc = moser_constants(epsilon);
    if (mesh.locate(center) < 0 ||
        mesh.distance_to_boundary(center) <= 1e-12 * std::sqrt(mesh.area()))
        throw DomainError("build_test_function: center must be an interior point");

    int src = -1;
    double dbest = std::numeric_limits<double>::max();
    for (int i : mesh.interior_vertices()) {
        double d = dist(mesh.vertex(i), center);
        if (d < dbest) {
            dbest = d;
            src = i;
        }
    }
    if (src < 0) throw DomainError("build_test_function: center is not inside the mesh");

    Field G = green_function(ctx, src);
    Field phi(mesh);
    for (int i = 0; i < mesh.n_vertices(); ++i) phi[i] = f_eps(mc, std::max(G[i], 0.0));
    phi.zero_boundary();

    double n = ctx.h1_seminorm(phi);
    if (pre_norm) *pre_norm = n;
    if (n == 0.0) throw DomainError("build_test_function: degenerate test function");
    for (double& v : phi.values()) v /= n;
    return phi;
}

double lower_bound_prediction(const FemContext& ctx, const PotentialReport& report, double epsilon,
                              const PerturbParams& params, double* p2_coeff) {
    params.validate();
    MoserConstants mc = moser_constants(epsilon);
    double intG2 = green_power_integral(ctx, report.green_at_center, 2.0);
    double intGp = params.p == 2.0 ? intG2
                                   : green_power_integral(ctx, report.green_at_center, params.p);
    double Cp = std::pow(mc.C_sq, params.p / 2.0);
    double value = report.concentration_level + 4.0 * M_PI * intG2 / mc.C_sq -
                   params.lambda * intGp / Cp;
    if (p2_coeff)
        *p2_coeff = params.p == 2.0
                        ? (4.0 * M_PI - params.lambda) * intG2 / mc.C_sq
                        : std::numeric_limits<double>::quiet_NaN();
    return value;
}

}  // namespace tmx

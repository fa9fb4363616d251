#pragma once

#include <string>

#include "tmx/fem.hpp"
#include "tmx/field.hpp"

namespace tmx {

enum class Variant { with_minus_one, without_minus_one };

std::string variant_name(Variant v);
Variant variant_from_name(const std::string& s);

struct PerturbParams {
    double lambda = 0.0;
    double p = 2.0;
    Variant variant = Variant::without_minus_one;

    void validate() const {
        if (p < 1.0) throw DomainError("perturbation exponent p must be >= 1");
    }
};

struct Evaluated {
    double value = 0.0;
    bool overflow = false;
};

/// J(u) = integral of e^{4 pi u^2} [- 1] - lambda |u|^p, by quadrature.
Evaluated evaluate(const Mesh& mesh, const Field& u, const PerturbParams& params,
                   Quad order = Quad::midedge);

/// Pointwise gradient density g = 8 pi u e^{4 pi u^2} - p lambda |u|^{p-2} u
/// sampled at the vertices (reporting form). For p < 2 the singular factor at
/// u = 0 is evaluated as 0.
Field gradient_density(const Mesh& mesh, const Field& u, const PerturbParams& params);

/// Exact discrete gradient: L_i = dJ/du_i, i.e. the quadrature of
/// g(u_h) phi_i with the same rule used by evaluate.
std::vector<double> gradient_load(const Mesh& mesh, const Field& u, const PerturbParams& params,
                                  Quad order = Quad::midedge, bool* overflow = nullptr);

/// H^1_0 Riesz representative of the gradient: K w = L on interior DOFs.
Field riesz_gradient(const FemContext& ctx, const Field& u, const PerturbParams& params,
                     std::vector<double>* warm = nullptr);

/// E = 4 pi integral (u^2 e^{4 pi u^2} - (p / 8 pi) lambda |u|^p).
double normalizer(const Mesh& mesh, const Field& u, const PerturbParams& params,
                  Quad order = Quad::midedge, bool* overflow = nullptr);

struct ElResidual {
    double residual = 0.0;
    double E = 0.0;
};

/// Relative H^-1 residual of K u = (4 pi / E) L~ where L~ is the load of
/// u e^{4 pi u^2} - (p / 8 pi) lambda |u|^{p-2} u. Throws DomainError when
/// E <= 0 (degenerate normalizer).
ElResidual el_residual(const FemContext& ctx, const Field& u, const PerturbParams& params);

struct EnergySplit {
    double I_E = 0.0;
    double I_P = 0.0;
    double E = 0.0;
    double gradient_norm_sq = 0.0;  // |grad v|^2 with v = 2 sqrt(pi) u
};

EnergySplit energy_decompose(const FemContext& ctx, const Field& u, const PerturbParams& params);

}  // namespace tmx

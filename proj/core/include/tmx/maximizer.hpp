#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tmx/functional.hpp"
#include "tmx/potential.hpp"

namespace tmx {

struct MaximizeOptions {
    double el_tol = 1e-6;
    int max_iters = 5000;
    double s0 = 1.0;
    double backtrack = 0.5;
    double armijo = 1e-4;
    double s_min = 1e-12;
    int residual_check_every = 10;
    Quad order = Quad::midedge;
};

struct MaximizeResult {
    Field u;  // canonical representative, |grad u| = 1
    double J = 0.0;
    double el_residual = 0.0;
    EnergySplit energy;
    double c = 0.0;      // peak value max u
    Vec2 x_peak{};
    int peak_vertex = -1;
    double gamma = 0.0;  // 2 sqrt(pi) c
    int iterations = 0;
    bool converged = false;
    bool stagnated = false;
    bool overflow = false;
    std::string seed_id;
    std::vector<double> j_history;  // J after every accepted step
};

/// Projected gradient ascent on the unit sphere of H^1_0. Init must be
/// Dirichlet-zero and nonzero; an init with E <= 0 is rejected (DomainError).
MaximizeResult maximize(const FemContext& ctx, const PerturbParams& params, const Field& init,
                        const MaximizeOptions& opts = {}, const std::string& seed_id = "init");

/// Seed grammar: semicolon-separated entries among
///   bubbles[:e1,e2,...]   Moser test functions at the harmonic center
///   poisson               normalized solution of -Laplace w = 1
///   random:N              N random smooth bumps
/// e.g. "bubbles:e-6,e-8,e-10,e-12;poisson". "default" expands to that string.
struct SeedSpec {
    std::vector<double> bubble_eps;  // empty unless bubbles requested
    bool poisson = false;
    int random_bumps = 0;
    unsigned long long rng_seed = 12345;
    std::optional<Vec2> bubble_center;  // defaults to harmonic center

    static SeedSpec parse(const std::string& text, unsigned long long rng_seed = 12345);
    std::string describe() const;
};

struct SeedSummary {
    std::string seed_id;
    double J = 0.0;
    double el_residual = 0.0;
    double c = 0.0;
    int iterations = 0;
    bool converged = false;
    bool stagnated = false;
    bool rejected = false;  // E <= 0 at init
};

struct MultiStartResult {
    MaximizeResult best;
    std::vector<SeedSummary> runs;
};

/// Runs every seed (parallelized up to TMX_THREADS) and returns the best J.
/// Throws Error when every seed is rejected.
MultiStartResult multi_start(const FemContext& ctx, const PerturbParams& params,
                             const SeedSpec& seeds, const MaximizeOptions& opts = {},
                             const PotentialReport* report = nullptr);

/// Build the seed fields without optimizing (exposed for tests and the CLI).
std::vector<std::pair<std::string, Field>> build_seeds(const FemContext& ctx,
                                                       const SeedSpec& seeds,
                                                       const PotentialReport* report = nullptr);

struct BlowupReport {
    double r_k = 0.0;        // blow-up scale from E and gamma
    double R_sample = 0.0;   // sampled radius in rescaled units
    bool non_concentrated = false;
    std::vector<double> radii;    // |y| grid
    std::vector<double> profile;  // angle-averaged gamma (v(x_peak + r_k y) - gamma)
    std::vector<double> psi;      // angle-averaged v / gamma
    double phi_inf_sup_dev = 0.0;
    double phi_inf_l2_dev = 0.0;
    double green_sup_dev = 0.0;   // sup |gamma v - G| on Omega minus B_rho(x_peak)
    double energy_ratio = 0.0;    // (E / gamma^2) / (S_delta - |Omega|)
};

BlowupReport blowup_diagnostics(const FemContext& ctx, const MaximizeResult& result,
                                const PotentialReport& report);

/// Optional diagnostic: sup over sampled radii of |v_bar - V|, where v_bar is
/// the spherical average of v = 2 sqrt(pi) u around the peak and V is the
/// radial shooting profile at the result's (gamma, E). Reported, never
/// asserted: the comparison sharpens only as gamma grows, and desk-scale
/// gamma values are modest.
struct RadialComparison {
    double delta = 0.0;
    double r_max = 0.0;          // sampled radius (min of r_k_delta, boundary clearance)
    double sup_diff = 0.0;       // sup |v_bar - V|
    double gamma_sup_diff = 0.0; // gamma * sup |v_bar - V|
    bool valid = false;          // false when the profile left the bubble regime
};

RadialComparison radial_comparison(const FemContext& ctx, const MaximizeResult& result,
                                   const PerturbParams& params, double delta = 0.5);

/// Thread cap for seed-level parallelism (TMX_THREADS, default min(hw, 8)).
int thread_cap();

}  // namespace tmx

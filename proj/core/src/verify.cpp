#include "tmx/verify.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "tmx/config.hpp"
#include "tmx/fem.hpp"
#include "tmx/maximizer.hpp"
#include "tmx/moser.hpp"
#include "tmx/output.hpp"
#include "tmx/potential.hpp"
#include "tmx/radial.hpp"
#include "tmx/threshold.hpp"

namespace tmx {

namespace {

constexpr double kCcLimit = M_PI * (1.0 + M_E);  // pi (1 + e)

struct Checker {
    bool pass = true;
    std::ostringstream detail;

    void expect(bool ok, const std::string& what) {
        pass = pass && ok;
        if (!detail.str().empty()) detail << "; ";
        detail << (ok ? "" : "FAILED: ") << what;
    }
    void note(const std::string& what) {
        if (!detail.str().empty()) detail << "; ";
        detail << what;
    }
};

Field random_bump_field(const FemContext& ctx, std::mt19937_64& rng, double amplitude) {
    const Mesh& mesh = ctx.mesh();
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Field density(mesh);
    const auto& interior = mesh.interior_vertices();
    for (int c = 0; c < 3; ++c) {
        Vec2 x0 = mesh.vertex(interior[(size_t)(unif(rng) * interior.size()) % interior.size()]);
        double width = (0.15 + 0.35 * unif(rng)) * std::sqrt(mesh.area());
        double amp = 2.0 * unif(rng) - 1.0;
        for (int i = 0; i < mesh.n_vertices(); ++i) {
            double d = dist(mesh.vertex(i), x0);
            density[i] += amp * std::exp(-(d * d) / (width * width));
        }
    }
    Field w = ctx.solve_dirichlet(density, Field(mesh));
    double m = std::max(std::abs(w.max_value()), std::abs(w.min_value()));
    if (m == 0.0) m = 1.0;
    for (double& v : w.values()) v *= amplitude / m;
    return w;
}

// ---------------------------------------------------------------- criterion 1
CheckResult crit_bubble_identities() {
    Checker c;
    auto rep = bubble_identities(100.0, 1e-12);
    c.expect(rep.liouville_sup_residual <= 1e-10,
             "liouville residual " + fmt17(rep.liouville_sup_residual) + " <= 1e-10");
    double target = M_PI * 1e4 / 10001.0;
    c.expect(rep.mass_error <= 1e-6,
             "|int e^{2phi} - pi 10^4/10001| = " + fmt17(std::abs(rep.mass_integral - target)) +
                 " <= 1e-6");
    return {1, "bubble-identities", c.pass, c.detail.str(), 0.0};
}

// ---------------------------------------------------------------- criterion 2
CheckResult crit_s0() {
    Checker c;
    auto rep = bubble_identities(100.0, 1e-12);
    c.expect(rep.s0_ode_sup_residual <= 1e-6,
             "S0 ODE residual " + fmt17(rep.s0_ode_sup_residual) + " <= 1e-6");

    const int N = 200;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < N; ++i) {
        double lr = 3.0 + 2.0 * i / (N - 1);
        double r = std::exp(lr);
        double x = -2.0 * lr;  // log(1/r^2)
        double y = s0_profile(r);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    double a = (N * sxy - sx * sy) / (N * sxx - sx * sx);
    double b = (sy - a * sx) / N;
    c.expect(std::abs(a - 1.0) <= 0.01,
             "fit slope " + fmt17(a) + " within 1% of 1 over r in [e^3,e^5]");
    c.expect(std::abs(b - RadialConstants::B0) <= 0.02 * RadialConstants::B0,
             "fit intercept " + fmt17(b) + " within 2% of B0 = " + fmt17(RadialConstants::B0));
    if (!c.pass) {
        // the remainder of the closed form is O(log^2(r^2)/r^2), about -0.12
        // at r = e^3; report where the fit does enter its asymptotic window
        double rem = s0_profile(std::exp(3.0)) -
                     (std::log(1.0 / std::exp(6.0)) + RadialConstants::B0);
        c.note("remainder at r=e^3 is " + fmt17(rem) +
               "; the same fit over r in [e^5,e^7] recovers both constants "
               "(see unit suite)");
    }
    return {2, "s0-closed-form", c.pass, c.detail.str(), 0.0};
}

// ---------------------------------------------------------------- criterion 3
CheckResult crit_disk_potential() {
    Checker c;
    Mesh mesh = build_disk_mesh(4);
    FemContext ctx(mesh);
    PotentialReport rep = concentration_level(ctx);
    double tau0 = rep.robin.interpolate({0.0, 0.0});
    c.expect(std::abs(tau0) <= 5e-3, "tau(0) = " + fmt17(tau0) + " within 5e-3 of 0");
    double tau6 = rep.robin.interpolate({0.6, 0.0});
    double oracle = -std::log(1.0 - 0.36) / (2.0 * M_PI);
    c.expect(std::abs(tau6 - oracle) <= 5e-3,
             "tau(0.6) = " + fmt17(tau6) + " within 5e-3 of " + fmt17(oracle));
    double rel = std::abs(rep.concentration_level - kCcLimit) / kCcLimit;
    c.expect(rel <= 1e-2, "S_delta = " + fmt17(rep.concentration_level) +
                              " within 1e-2 relative of pi(1+e) = " + fmt17(kCcLimit));
    return {3, "disk-potential-theory", c.pass, c.detail.str(), 0.0};
}

// ---------------------------------------------------------------- criterion 4
CheckResult crit_green_symmetry() {
    Checker c;
    Mesh mesh = build_disk_mesh(4);
    FemContext ctx(mesh);
    std::mt19937_64 rng(2024);
    const auto& interior = mesh.interior_vertices();
    std::uniform_int_distribution<size_t> pick(0, interior.size() - 1);
    double worst = 0.0;
    double min_g = 1e300;
    for (int k = 0; k < 10; ++k) {
        int a = interior[pick(rng)];
        int b = interior[pick(rng)];
        while (b == a) b = interior[pick(rng)];
        Field Ga = green_function(ctx, a);
        Field Gb = green_function(ctx, b);
        worst = std::max(worst, std::abs(Ga[b] - Gb[a]));
        for (int i : interior) {
            if (i != a) min_g = std::min(min_g, Ga[i]);
            if (i != b) min_g = std::min(min_g, Gb[i]);
        }
    }
    c.expect(worst <= 1e-3, "sup |G_x(y) - G_y(x)| = " + fmt17(worst) + " <= 1e-3 on 10 pairs");
    c.expect(min_g > 0.0, "G > 0 at interior vertices (min " + fmt17(min_g) + ")");
    return {4, "green-symmetry-positivity", c.pass, c.detail.str(), 0.0};
}

// ---------------------------------------------------------------- criterion 5
CheckResult crit_functional() {
    Checker c;
    Mesh mesh = build_disk_mesh(3);
    FemContext ctx(mesh);
    std::mt19937_64 rng(7);

    PerturbParams params;
    params.lambda = 3.7;
    params.p = 2.0;

    double worst = 0.0;
    const double h = 1e-5;
    for (int k = 0; k < 20; ++k) {
        Field u = random_bump_field(ctx, rng, 0.4);
        Field phi = random_bump_field(ctx, rng, 0.4);
        auto load = gradient_load(mesh, u, params);
        double lphi = 0.0;
        for (int i = 0; i < mesh.n_vertices(); ++i) lphi += load[i] * phi[i];
        Field up = u, um = u;
        for (int i = 0; i < mesh.n_vertices(); ++i) {
            up[i] += h * phi[i];
            um[i] -= h * phi[i];
        }
        double fd = (evaluate(mesh, up, params).value - evaluate(mesh, um, params).value) / (2 * h);
        double rel = std::abs(fd - lphi) / std::max({std::abs(fd), std::abs(lphi), 1e-300});
        worst = std::max(worst, rel);
    }
    c.expect(worst <= 1e-6, "gradient FD relative error " + fmt17(worst) + " <= 1e-6 (20 dirs)");

    Field u = random_bump_field(ctx, rng, 0.5);
    PerturbParams with = params, without = params;
    with.variant = Variant::with_minus_one;
    without.variant = Variant::without_minus_one;
    double diff = evaluate(mesh, u, without).value - evaluate(mesh, u, with).value;
    c.expect(std::abs(diff - mesh.area()) <= 1e-9 * mesh.area(),
             "variant identity |J_without - J_with - |Omega|| = " +
                 fmt17(std::abs(diff - mesh.area())));
    Field nu = u;
    for (double& v : nu.values()) v = -v;
    c.expect(evaluate(mesh, u, params).value == evaluate(mesh, nu, params).value,
             "evenness J(u) == J(-u)");
    return {5, "functional-correctness", c.pass, c.detail.str(), 0.0};
}

// ---------------------------------------------------------------- criterion 6
CheckResult crit_maximizer_contracts() {
    Checker c;
    Mesh mesh = build_disk_mesh(4);
    FemContext ctx(mesh);
    PerturbParams params;  // lambda = 0
    auto seeds = build_seeds(ctx, SeedSpec::parse("bubbles:e-8"));
    MaximizeResult r = maximize(ctx, params, seeds[0].second, {}, seeds[0].first);

    bool monotone = true;
    for (size_t i = 1; i < r.j_history.size(); ++i)
        monotone = monotone && r.j_history[i] >= r.j_history[i - 1];
    c.expect(monotone, "accepted-step J sequence nondecreasing (" +
                           std::to_string(r.j_history.size()) + " steps)");
    double n = ctx.h1_seminorm(r.u);
    c.expect(std::abs(n - 1.0) <= 1e-10, "returned |grad u| = " + fmt17(n) + " within 1e-10 of 1");
    double lhs = std::abs(r.energy.gradient_norm_sq - (r.energy.I_E - r.energy.I_P));
    c.expect(lhs <= 1e-4 * r.energy.I_E,
             "| |grad v|^2 - (I_E - I_P) | = " + fmt17(lhs) + " <= 1e-4 I_E");
    // quadrature sensitivity of the nonlinear integrand at the extremal
    double j3 = evaluate(mesh, r.u, params, Quad::seven).value;
    c.note("J = " + fmt17(r.J) + " (order-3 quadrature " + fmt17(j3) + ", rel gap " +
           fmt17(std::abs(j3 - r.J) / r.J) + "), residual = " + fmt17(r.el_residual) +
           ", iters " + std::to_string(r.iterations));
    return {6, "maximizer-contracts", c.pass, c.detail.str(), 0.0};
}

// ---------------------------------------------------------------- criterion 7
CheckResult crit_lambda0_extremality() {
    Checker c;
    PerturbParams params;  // lambda = 0, p = 2
    std::vector<double> J_best;
    for (int level = 3; level <= 5; ++level) {
        Mesh mesh = build_disk_mesh(level);
        FemContext ctx(mesh);
        PotentialReport rep = concentration_level(ctx, level >= 5 ? 4 : 0);
        MultiStartResult ms = multi_start(ctx, params, SeedSpec::parse("default"), {}, &rep);
        J_best.push_back(ms.best.J);
        if (level == 5) {
            // discrete bubble values on the finest mesh
            for (double k : {6.0, 8.0, 10.0, 12.0}) {
                Field phi = build_test_function(ctx, std::exp(-k), rep.harmonic_center);
                double j_phi = evaluate(mesh, phi, params).value;
                c.expect(ms.best.J >= j_phi, "J_best >= J(phi_eps), eps=e^-" + fmt17(k) +
                                                 " (" + fmt17(j_phi) + ")");
            }
        }
    }
    c.expect(J_best[0] <= J_best[1] + 1e-6 && J_best[1] <= J_best[2] + 1e-6,
             "J_best nondecreasing over levels 3,4,5: " + fmt17(J_best[0]) + ", " +
                 fmt17(J_best[1]) + ", " + fmt17(J_best[2]));
    double frac = J_best[2] / kCcLimit;
    if (frac >= 0.9) {
        c.note("finest J_best = " + fmt17(J_best[2]) + " >= 0.9 pi(1+e)");
    } else if (frac >= 0.85) {
        c.note("mesh-resolution finding: finest J_best = " + fmt17(J_best[2]) + " = " +
               fmt17(frac) + " of pi(1+e), below the 0.9 soft threshold");
    } else {
        c.expect(false, "finest J_best = " + fmt17(J_best[2]) + " below 0.85 pi(1+e)");
    }
    return {7, "lambda0-extremality", c.pass, c.detail.str(), 0.0};
}

// ---------------------------------------------------------------- criterion 8
CheckResult crit_p2_attainment() {
    Checker c;
    Mesh mesh = build_disk_mesh(4);
    PerturbParams params;
    params.lambda = 10.0;
    params.p = 2.0;
    AttainmentProtocol protocol;
    protocol.margin_min = 0.0;  // the criterion itself pins "margin > 0"
    protocol.levels = 2;        // levels 4 and 5
    protocol.id = "accept-8(margin_min=0,levels=4+5)";
    AttainmentVerdict v = attained_indicator(mesh, params, protocol);
    c.expect(v.attained, "verdict attained at lambda=10, p=2");
    c.expect(v.margin > 0.0, "margin = " + fmt17(v.margin) + " > 0 (J_best " + fmt17(v.J_best) +
                                 " vs S_delta " + fmt17(v.S_delta) + ")");
    return {8, "p2-attainment-below-4pi", c.pass, c.detail.str(), 0.0};
}

// ---------------------------------------------------------------- criterion 9
CheckResult crit_p3_insensitivity() {
    Checker c;
    Mesh mesh = build_disk_mesh(4);
    FemContext ctx(mesh);
    PotentialReport rep = concentration_level(ctx);
    PerturbParams params;
    params.lambda = 100.0;
    params.p = 3.0;
    double pred = lower_bound_prediction(ctx, rep, std::exp(-12.0), params);
    c.expect(pred > rep.concentration_level,
             "prediction " + fmt17(pred) + " > S_delta " + fmt17(rep.concentration_level) +
                 " at eps=e^-12, lambda=100, p=3");
    if (!c.pass) {
        // report the crossover: the Green term beats the perturbation term
        // once C > lambda intG3 / (4 pi intG2)
        double g2 = green_power_integral(ctx, rep.green_at_center, 2.0);
        double g3 = green_power_integral(ctx, rep.green_at_center, 3.0);
        double c_star = params.lambda * g3 / (4.0 * M_PI * g2);
        double need_sq = c_star * c_star;
        double ln_eps =
            -(2.0 * M_PI) * (need_sq - std::log(M_PI) / (4.0 * M_PI) + 1.0 / (4.0 * M_PI));
        c.note("computed crossover at eps = e^" + fmt17(ln_eps) +
               " (C must exceed " + fmt17(c_star) + ")");
    }
    return {9, "p3-perturbation-insensitivity", c.pass, c.detail.str(), 0.0};
}

// --------------------------------------------------------------- criterion 10
CheckResult crit_radial_expansion() {
    Checker c;
    PerturbParams params;  // lambda = 0
    std::vector<double> scaled, raw;
    for (double g : {4.0, 6.0, 8.0}) {
        RadialProfile prof = shoot_radial(g, g * g * M_PI * M_E, params, 0.5);
        auto st = expansion_error(prof);
        scaled.push_back(st.scaled_sup);
        raw.push_back(st.raw_sup);
    }
    double ratio = *std::max_element(scaled.begin(), scaled.end()) /
                   *std::min_element(scaled.begin(), scaled.end());
    c.expect(ratio <= 5.0, "scaled statistic ratio " + fmt17(ratio) + " <= 5 over gamma {4,6,8}");
    c.expect(raw[0] > raw[1] && raw[1] > raw[2],
             "raw sup e decreasing: " + fmt17(raw[0]) + " > " + fmt17(raw[1]) + " > " +
                 fmt17(raw[2]));
    return {10, "radial-expansion", c.pass, c.detail.str(), 0.0};
}

// --------------------------------------------------------------- criterion 11
CheckResult crit_monotone_scan() {
    Checker c;
    Mesh mesh = build_disk_mesh(4);
    AttainmentProtocol protocol;
    ScanResult scan = monotonicity_scan(mesh, 2.0, {0.0, 0.01, 1.0, 2.0, 5.0}, protocol);
    c.expect(scan.monotone_ok && !scan.unreliable,
             "J_best non-increasing within 1e-3 S_delta over {0, 0.01, 1, 2, 5}");
    double J0 = scan.rows[0].J_best, J001 = scan.rows[1].J_best;
    c.expect(std::abs(J001 - J0) <= 0.01 * std::abs(J0),
             "J(0.01) = " + fmt17(J001) + " within 1% of J(0) = " + fmt17(J0));
    return {11, "monotonicity-scan", c.pass, c.detail.str(), 0.0};
}

// --------------------------------------------------------------- criterion 12
CheckResult crit_determinism_io() {
    Checker c;
    Mesh mesh = build_disk_mesh(2);
    AttainmentProtocol protocol;
    protocol.seeds = SeedSpec::parse("bubbles:e-6;poisson;random:2", 99);
    protocol.opts.max_iters = 60;
    ScanResult s1 = monotonicity_scan(mesh, 2.0, {0.0, 1.0}, protocol);
    ScanResult s2 = monotonicity_scan(mesh, 2.0, {0.0, 1.0}, protocol);
    c.expect(scan_to_csv(s1) == scan_to_csv(s2), "fixed-seed scans byte-identical");

    std::string t1 = mesh_to_string(mesh);
    Mesh m2 = mesh_from_string(t1);
    c.expect(mesh_to_string(m2) == t1 && m2.vertices() == mesh.vertices(),
             "mesh save/load round-trip identity");

    RunConfig cfg;
    cfg.command = "scan";
    cfg.lambda = 1.5;
    cfg.p = 1.25;
    cfg.mesh_kind = "rect";
    cfg.mesh_nx = 17;
    cfg.seeds = "bubbles:e-6;random:2";
    cfg.out_path = "scan.csv";
    std::string text = cfg.to_text();
    c.expect(RunConfig::from_text(text).to_text() == text, "config round-trip identity");
    return {12, "determinism-io", c.pass, c.detail.str(), 0.0};
}

}  // namespace

std::string format_check_line(const CheckResult& c) {
    std::ostringstream o;
    o << "[" << (c.pass ? "PASS" : "FAIL") << "] criterion " << c.id << " (" << c.name << ", "
      << fmt17(c.seconds) << " s): " << c.detail;
    return o.str();
}

std::vector<CheckResult> run_verification(const std::vector<int>& only, bool quick,
                                          std::ostream* log) {
    using Fn = std::function<CheckResult()>;
    const std::vector<std::pair<int, Fn>> all = {
        {1, crit_bubble_identities}, {2, crit_s0},
        {3, crit_disk_potential},    {4, crit_green_symmetry},
        {5, crit_functional},        {6, crit_maximizer_contracts},
        {7, crit_lambda0_extremality}, {8, crit_p2_attainment},
        {9, crit_p3_insensitivity},  {10, crit_radial_expansion},
        {11, crit_monotone_scan},    {12, crit_determinism_io},
    };
    const std::vector<int> quick_set = {1, 2, 5, 10, 12};

    std::vector<CheckResult> out;
    for (const auto& [id, fn] : all) {
        if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
        if (only.empty() && quick &&
            std::find(quick_set.begin(), quick_set.end(), id) == quick_set.end())
            continue;
        auto t0 = std::chrono::steady_clock::now();
        CheckResult r;
        try {
            r = fn();
        } catch (const std::exception& e) {
            r.id = id;
            r.name = "criterion-" + std::to_string(id);
            r.pass = false;
            r.detail = std::string("exception: ") + e.what();
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (log) *log << format_check_line(r) << std::endl;
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace tmx

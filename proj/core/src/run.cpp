#include <cmath>
#include <sstream>

#include "tmx/config.hpp"
#include "tmx/maximizer.hpp"
#include "tmx/moser.hpp"
#include "tmx/output.hpp"
#include "tmx/radial.hpp"
#include "tmx/threshold.hpp"
#include "tmx/verify.hpp"

namespace tmx {

namespace {

Mesh mesh_from_config(const RunConfig& c) {
    Mesh m = [&] {
        if (c.mesh_kind == "disk") return build_disk_mesh(c.mesh_level);
        if (c.mesh_kind == "rect")
            return build_rect_mesh(c.mesh_width, c.mesh_height, c.mesh_nx, c.mesh_ny);
        if (c.mesh_kind == "file") {
            if (c.mesh_path.empty()) throw UsageError("mesh.kind = file needs mesh.path");
            return load_mesh(c.mesh_path);
        }
        throw UsageError("unknown mesh kind: " + c.mesh_kind);
    }();
    for (int i = 0; i < c.mesh_refine; ++i) m = refine(m);
    return m;
}

void write_with_sidecar(const RunConfig& c, const std::string& content) {
    if (c.out_path.empty()) throw UsageError("--out is required for this command");
    atomic_write(c.out_path, content);
    atomic_write(c.out_path + ".config", c.to_text());
}

std::string field_to_string(const Field& f) {
    std::string out = "tmxfield 1\n" + std::to_string(f.size()) + "\n";
    for (int i = 0; i < f.size(); ++i) out += fmt17(f[i]) + "\n";
    return out;
}

PerturbParams params_from_config(const RunConfig& c) {
    PerturbParams p;
    p.lambda = c.lambda;
    p.p = c.p;
    p.variant = variant_from_name(c.variant);
    p.validate();
    return p;
}

MaximizeOptions opts_from_config(const RunConfig& c) {
    MaximizeOptions o;
    o.el_tol = c.el_tol;
    o.max_iters = c.max_iters;
    return o;
}

std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            out.push_back(std::stod(tok));
        } catch (const std::exception&) {
            throw UsageError("expected a comma-separated list of numbers, got '" + tok + "'");
        }
    }
    return out;
}

std::string maximize_result_json(const MultiStartResult& ms, const FemContext& ctx,
                                 const RunConfig& cfg) {
    const MaximizeResult& r = ms.best;
    JsonWriter j;
    j.begin_object();
    j.field("command", std::string("maximize"));
    j.field("lambda", cfg.lambda);
    j.field("p", cfg.p);
    j.field("variant", cfg.variant);
    j.field("J", r.J);
    // the two variants differ by exactly |Omega|; report both
    double area = ctx.mesh().area();
    j.field("J_without_minus_one", cfg.variant == "without" ? r.J : r.J + area);
    j.field("J_with_minus_one", cfg.variant == "with" ? r.J : r.J - area);
    j.field("el_residual", r.el_residual);
    j.field("E", r.energy.E);
    j.field("I_E", r.energy.I_E);
    j.field("I_P", r.energy.I_P);
    j.field("gradient_norm_sq", r.energy.gradient_norm_sq);
    j.field("peak_c", r.c);
    j.field("peak_x", r.x_peak.x);
    j.field("peak_y", r.x_peak.y);
    j.field("gamma", r.gamma);
    j.field("h1_seminorm", ctx.h1_seminorm(r.u));
    j.field("iterations", r.iterations);
    j.field("converged", r.converged);
    j.field("stagnated", r.stagnated);
    j.field("overflow", r.overflow);
    j.field("seed_id", r.seed_id);
    RadialComparison cmp = radial_comparison(ctx, r, params_from_config(cfg));
    j.field("radial_comparison_valid", cmp.valid);
    j.field("radial_comparison_sup", cmp.sup_diff);
    j.field("radial_comparison_gamma_sup", cmp.gamma_sup_diff);
    j.begin_array("runs");
    for (const auto& s : ms.runs) {
        j.begin_object();
        j.field("seed_id", s.seed_id);
        j.field("J", s.J);
        j.field("el_residual", s.el_residual);
        j.field("peak_c", s.c);
        j.field("iterations", s.iterations);
        j.field("converged", s.converged);
        j.field("stagnated", s.stagnated);
        j.field("rejected", s.rejected);
        j.end_object();
    }
    j.end_array();
    j.end_object();
    return j.str() + "\n";
}

int run_impl(const RunConfig& cfg, std::ostream& log) {
    if (cfg.command == "verify") {
        std::vector<int> only;
        if (!cfg.verify_only.empty())
            for (double v : parse_double_list(cfg.verify_only)) only.push_back((int)v);
        auto results = run_verification(only, cfg.verify_quick, &log);
        int fails = 0;
        for (const auto& r : results) fails += r.pass ? 0 : 1;
        log << (fails == 0 ? "all checks passed" : std::to_string(fails) + " check(s) failed")
            << std::endl;
        return fails == 0 ? 0 : 1;
    }

    if (cfg.command == "radial") {
        double E = cfg.E_auto ? cfg.gamma * cfg.gamma * M_PI * M_E : cfg.E;
        RadialProfile prof = shoot_radial(cfg.gamma, E, params_from_config(cfg), cfg.delta);
        std::string csv = "r,t,V,V_expansion,error\n";
        for (size_t i = 0; i < prof.t.size(); ++i) {
            double s = std::sqrt(std::expm1(prof.t[i]));
            double expansion = cfg.gamma - prof.t[i] / cfg.gamma +
                               s0_profile(s) / std::pow(cfg.gamma, 3);
            csv += fmt17(prof.r[i]) + "," + fmt17(prof.t[i]) + "," + fmt17(prof.V[i]) + "," +
                   fmt17(expansion) + "," + fmt17(std::abs(prof.V[i] - expansion)) + "\n";
        }
        write_with_sidecar(cfg, csv);
        log << "radial profile: gamma " << cfg.gamma << ", E " << E << ", r_k " << prof.r_k
            << (prof.sign_change ? " (sign change, truncated)" : "") << std::endl;
        return prof.sign_change ? 1 : 0;
    }

    Mesh mesh = mesh_from_config(cfg);

    if (cfg.command == "mesh") {
        write_with_sidecar(cfg, mesh_to_string(mesh));
        log << "mesh: " << mesh.n_vertices() << " vertices, " << mesh.n_triangles()
            << " triangles, area " << fmt17(mesh.area()) << ", min angle "
            << fmt17(mesh.min_angle_deg()) << " deg" << std::endl;
        return 0;
    }

    FemContext ctx(mesh, CgOptions{cfg.cg_tol, -1});

    if (cfg.command == "potential") {
        PotentialReport rep = concentration_level(ctx, cfg.stride);
        JsonWriter j;
        j.begin_object();
        j.field("command", std::string("potential"));
        j.field("area", mesh.area());
        j.field("harmonic_center_x", rep.harmonic_center.x);
        j.field("harmonic_center_y", rep.harmonic_center.y);
        j.field("max_radius", rep.max_radius);
        j.field("concentration_level", rep.concentration_level);
        j.begin_array("robin");
        for (int i = 0; i < mesh.n_vertices(); ++i) j.element(rep.robin[i]);
        j.end_array();
        j.begin_array("harmonic_radius");
        for (int i = 0; i < mesh.n_vertices(); ++i) j.element(rep.harmonic_radius[i]);
        j.end_array();
        j.end_object();
        write_with_sidecar(cfg, j.str() + "\n");
        log << "S_delta = " << fmt17(rep.concentration_level) << ", center ("
            << fmt17(rep.harmonic_center.x) << ", " << fmt17(rep.harmonic_center.y) << ")"
            << std::endl;
        return 0;
    }

    if (cfg.command == "maximize") {
        SeedSpec seeds = SeedSpec::parse(cfg.seeds, cfg.rng_seed);
        // the harmonic center is only needed to place bubble seeds
        std::optional<PotentialReport> rep;
        if (!seeds.bubble_eps.empty() && !seeds.bubble_center)
            rep = concentration_level(ctx, cfg.stride);
        MultiStartResult ms = multi_start(ctx, params_from_config(cfg), seeds,
                                          opts_from_config(cfg), rep ? &*rep : nullptr);
        write_with_sidecar(cfg, maximize_result_json(ms, ctx, cfg));
        if (!cfg.save_field.empty()) atomic_write(cfg.save_field, field_to_string(ms.best.u));
        log << "J_best = " << fmt17(ms.best.J) << " (seed " << ms.best.seed_id << ", residual "
            << fmt17(ms.best.el_residual) << ")" << std::endl;
        bool failed = ms.best.stagnated && !ms.best.converged;
        return failed ? 1 : 0;
    }

    if (cfg.command == "bubble") {
        Vec2 center;
        if (cfg.has_center) {
            center = {cfg.center_x, cfg.center_y};
        } else {
            PotentialReport rep = concentration_level(ctx, cfg.stride);
            center = rep.harmonic_center;
        }
        double pre_norm = 0.0;
        Field phi = build_test_function(ctx, cfg.eps, center, &pre_norm);
        write_with_sidecar(cfg, field_to_string(phi));
        log << "bubble eps = " << fmt17(cfg.eps) << ", pre-normalization |grad| = "
            << fmt17(pre_norm) << std::endl;
        return 0;
    }

    if (cfg.command == "scan") {
        AttainmentProtocol protocol;
        protocol.seeds = SeedSpec::parse(cfg.seeds, cfg.rng_seed);
        protocol.opts = opts_from_config(cfg);
        protocol.robin_stride = cfg.stride;
        ScanResult scan = monotonicity_scan(mesh, cfg.p, parse_double_list(cfg.lambdas), protocol);
        write_with_sidecar(cfg, scan_to_csv(scan));
        log << "scan over " << scan.rows.size() << " lambdas, S_delta = " << fmt17(scan.S_delta)
            << (scan.unreliable ? " (UNRELIABLE: monotonicity violated)" : "") << std::endl;
        return scan.unreliable ? 1 : 0;
    }

    if (cfg.command == "threshold") {
        AttainmentProtocol protocol;
        protocol.seeds = SeedSpec::parse(cfg.seeds, cfg.rng_seed);
        protocol.opts = opts_from_config(cfg);
        protocol.robin_stride = cfg.stride;
        ThresholdEstimate est = estimate_threshold(mesh, cfg.p, {cfg.bracket_lo, cfg.bracket_hi},
                                                   cfg.threshold_tol, protocol);
        JsonWriter j;
        j.begin_object();
        j.field("command", std::string("threshold"));
        j.field("p", est.p);
        j.field("bracket_low", est.bracket_low);
        j.field("bracket_high", est.bracket_high);
        j.field("tolerance", est.tolerance);
        j.field("flagged_inconclusive", est.flagged_inconclusive);
        j.begin_array("verdicts");
        for (const auto& v : est.verdicts) {
            j.begin_object();
            j.field("lambda", v.lambda);
            j.field("J_best", v.J_best);
            j.field("S_delta", v.S_delta);
            j.field("margin", v.margin);
            j.field("attained", v.attained);
            j.field("inconclusive", v.inconclusive);
            j.end_object();
        }
        j.end_array();
        j.end_object();
        write_with_sidecar(cfg, j.str() + "\n");
        log << "lambda*(" << cfg.p << ") in [" << fmt17(est.bracket_low) << ", "
            << fmt17(est.bracket_high) << "]" << std::endl;
        return 0;
    }

    throw UsageError("unknown command: " + cfg.command);
}

}  // namespace

int run(const RunConfig& cfg, std::ostream& log) {
    try {
        return run_impl(cfg, log);
    } catch (const UsageError&) {
        throw;
    } catch (const Error& e) {
        // numerical failure: emit a diagnostic envelope when possible
        if (!cfg.out_path.empty()) {
            JsonWriter j;
            j.begin_object();
            j.field("command", cfg.command);
            j.field("error", std::string(e.what()));
            j.end_object();
            atomic_write(cfg.out_path, j.str() + "\n");
            atomic_write(cfg.out_path + ".config", cfg.to_text());
        }
        log << "numerical failure: " << e.what() << std::endl;
        return 1;
    }
}

}  // namespace tmx

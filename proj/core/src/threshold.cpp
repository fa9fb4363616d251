#include "tmx/threshold.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tmx/output.hpp"
#include "tmx/radial.hpp"

namespace tmx {

namespace {

struct LevelRun {
    double J = 0.0;
    double c = 0.0;
    double S_delta = 0.0;
    bool all_rejected = false;
    bool all_stagnated = false;
};

LevelRun run_level(const Mesh& mesh, const PerturbParams& params,
                   const AttainmentProtocol& protocol) {
    FemContext ctx(mesh);
    PotentialReport rep = concentration_level(ctx, protocol.robin_stride);
    LevelRun out;
    out.S_delta = rep.concentration_level;
    try {
        MultiStartResult ms = multi_start(ctx, params, protocol.seeds, protocol.opts, &rep);
        out.J = ms.best.J;
        out.c = ms.best.c;
        bool any_progress = false;
        for (const auto& r : ms.runs) any_progress = any_progress || (!r.rejected && !r.stagnated);
        out.all_stagnated = !any_progress;
    } catch (const Error&) {
        out.all_rejected = true;
    }
    return out;
}

}  // namespace

AttainmentVerdict attained_indicator(const Mesh& mesh, const PerturbParams& params,
                                     const AttainmentProtocol& protocol) {
    AttainmentVerdict v;
    v.lambda = params.lambda;
    v.p = params.p;
    v.protocol_id = protocol.id;

    Mesh current = mesh;
    LevelRun finest;
    bool any_usable = false;
    for (int level = 0; level < std::max(1, protocol.levels); ++level) {
        if (level > 0) current = refine(current);
        LevelRun run = run_level(current, params, protocol);
        if (run.all_rejected) {
            v.refinement_trace.emplace_back(std::nan(""), std::nan(""));
            continue;
        }
        any_usable = true;
        v.refinement_trace.emplace_back(run.J, run.c);
        finest = run;
    }
    if (!any_usable || finest.all_stagnated) {
        v.inconclusive = true;
        v.attained = false;
        if (any_usable) {
            v.J_best = finest.J;
            v.S_delta = finest.S_delta;
            v.margin = finest.J - finest.S_delta;
        }
        return v;
    }

    v.J_best = finest.J;
    v.S_delta = finest.S_delta;
    v.margin = finest.J - finest.S_delta;
    double margin_min = protocol.margin_min >= 0.0
                            ? protocol.margin_min
                            : 0.05 * (finest.S_delta - mesh.area());
    bool peak_stable = true;
    if (v.refinement_trace.size() >= 2) {
        double c_prev = v.refinement_trace[v.refinement_trace.size() - 2].second;
        double c_last = v.refinement_trace.back().second;
        if (std::isfinite(c_prev) && c_prev > 0.0)
            peak_stable = std::abs(c_last - c_prev) / c_prev <= protocol.peak_stability;
    }
    v.attained = v.margin > margin_min && peak_stable;
    return v;
}

ThresholdEstimate estimate_threshold(const Mesh& mesh, double p,
                                     std::pair<double, double> bracket, double tol,
                                     const AttainmentProtocol& protocol) {
    if (!(p >= 1.0 && p <= 2.0)) throw DomainError("estimate_threshold: p must lie in [1,2]");
    if (!(bracket.first < bracket.second)) throw DomainError("estimate_threshold: bad bracket");
    if (!(tol > 0.0)) throw DomainError("estimate_threshold: tolerance must be positive");

    ThresholdEstimate est;
    est.p = p;
    est.tolerance = tol;

    auto verdict_at = [&](double lam) {
        PerturbParams params;
        params.lambda = lam;
        params.p = p;
        AttainmentVerdict v = attained_indicator(mesh, params, protocol);
        est.verdicts.push_back(v);
        if (v.inconclusive) est.flagged_inconclusive = true;
        return v;
    };

    AttainmentVerdict lo = verdict_at(bracket.first);
    if (!lo.attained)
        throw Error("estimate_threshold: lower endpoint lambda=" + fmt17(bracket.first) +
                    " is not attained (J_best=" + fmt17(lo.J_best) + ", S_delta=" +
                    fmt17(lo.S_delta) + ")");
    AttainmentVerdict hi = verdict_at(bracket.second);
    if (hi.attained)
        throw Error("estimate_threshold: upper endpoint lambda=" + fmt17(bracket.second) +
                    " is attained (margin=" + fmt17(hi.margin) + ")");

    double a = bracket.first, b = bracket.second;
    while (b - a > tol) {
        double mid = 0.5 * (a + b);
        AttainmentVerdict v = verdict_at(mid);
        if (v.attained)
            a = mid;
        else
            b = mid;
    }
    est.bracket_low = a;
    est.bracket_high = b;
    return est;
}

DeficitPrediction predicted_deficit(const FemContext& ctx, const PotentialReport& report, double p,
                                    double lambda, double gamma, double C2_fit) {
    if (!(gamma > 0.0)) throw DomainError("predicted_deficit: gamma must be positive");
    DeficitPrediction d;
    d.gamma = gamma;
    d.p = p;
    d.lambda = lambda;
    double intGp = green_power_integral(ctx, report.green_at_center, p);
    double S_corr = report.concentration_level - ctx.mesh().area();
    d.C1_term = lambda * p * std::pow(4.0 * M_PI, 1.0 - p / 2.0) * intGp /
                (2.0 * S_corr * std::pow(gamma, p + 2.0));
    d.C2_over_gamma4 = C2_fit / std::pow(gamma, 4.0);
    d.predicted_norm_sq = 1.0 - d.C1_term + d.C2_over_gamma4;
    return d;
}

double estimate_C2_from_radial(const std::vector<double>& gammas, double delta) {
    if (gammas.empty()) throw DomainError("estimate_C2_from_radial: empty gamma sweep");
    PerturbParams lam0;  // the gamma^-4 term is the lambda-independent piece
    std::vector<double> estimates;
    for (double gamma : gammas) {
        double E = gamma * gamma * M_PI * M_E;
        double ball = exponential_ball_integral(gamma, E, lam0, delta);
        estimates.push_back((ball - 4.0 * M_PI) * std::pow(gamma, 4.0));
    }
    std::sort(estimates.begin(), estimates.end());
    return estimates[estimates.size() / 2];
}

ScanResult monotonicity_scan(const Mesh& mesh, double p, std::vector<double> lambdas,
                             const AttainmentProtocol& protocol) {
    for (size_t i = 1; i < lambdas.size(); ++i)
        if (lambdas[i] < lambdas[i - 1])
            throw DomainError("monotonicity_scan: lambda grid must be non-decreasing");

    FemContext ctx(mesh);
    PotentialReport rep = concentration_level(ctx, protocol.robin_stride);
    ScanResult scan;
    scan.S_delta = rep.concentration_level;
    double margin_min = protocol.margin_min >= 0.0
                            ? protocol.margin_min
                            : 0.05 * (rep.concentration_level - mesh.area());

    auto run_lambda = [&](double lam, const SeedSpec& seeds) {
        PerturbParams params;
        params.lambda = lam;
        params.p = p;
        ScanRow row;
        row.lambda = lam;
        try {
            MultiStartResult ms = multi_start(ctx, params, seeds, protocol.opts, &rep);
            row.J_best = ms.best.J;
            row.peak_c = ms.best.c;
            row.margin = ms.best.J - rep.concentration_level;
            row.attained = row.margin > margin_min;
            bool any = false;
            for (const auto& r : ms.runs) any = any || (!r.rejected && !r.stagnated);
            row.inconclusive = !any;
        } catch (const Error&) {
            row.inconclusive = true;
            row.J_best = std::nan("");
            row.margin = std::nan("");
            row.peak_c = std::nan("");
        }
        return row;
    };

    for (double lam : lambdas) scan.rows.push_back(run_lambda(lam, protocol.seeds));

    const double tol = 1e-3 * scan.S_delta;
    // flag violations and retry the offending lambda with extra random seeds
    for (size_t i = 1; i < scan.rows.size(); ++i) {
        if (std::isnan(scan.rows[i].J_best) || std::isnan(scan.rows[i - 1].J_best)) continue;
        if (scan.rows[i].J_best > scan.rows[i - 1].J_best + tol) {
            SeedSpec wider = protocol.seeds;
            wider.random_bumps += 4;
            ScanRow retry = run_lambda(scan.rows[i - 1].lambda, wider);
            if (retry.J_best > scan.rows[i - 1].J_best) scan.rows[i - 1] = retry;
            if (scan.rows[i].J_best > scan.rows[i - 1].J_best + tol) {
                scan.monotone_ok = false;
                scan.unreliable = true;
            }
        }
    }
    return scan;
}

std::string scan_to_csv(const ScanResult& scan) {
    std::string out = "lambda,J_best,margin,peak_c,attained,inconclusive\n";
    for (const auto& r : scan.rows) {
        out += fmt17(r.lambda) + "," + fmt17(r.J_best) + "," + fmt17(r.margin) + "," +
               fmt17(r.peak_c) + "," + (r.attained ? "1" : "0") + "," +
               (r.inconclusive ? "1" : "0") + "\n";
    }
    return out;
}

}  // namespace tmx

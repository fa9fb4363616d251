#include "tmx/maximizer.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <random>
#include <sstream>
#include <thread>

#include "tmx/moser.hpp"
#include "tmx/radial.hpp"

namespace tmx {

namespace {

Field normalized(const FemContext& ctx, Field u) {
    double n = ctx.h1_seminorm(u);
    if (n == 0.0) throw DomainError("cannot normalize the zero field");
    for (double& v : u.values()) v /= n;
    return u;
}

}  // namespace

MaximizeResult maximize(const FemContext& ctx, const PerturbParams& params, const Field& init,
                        const MaximizeOptions& opts, const std::string& seed_id) {
    params.validate();
    const Mesh& mesh = ctx.mesh();
    if (!init.is_dirichlet_zero())
        throw DomainError("maximize: init must vanish on the boundary");

    Field u = normalized(ctx, init);
    if (normalizer(mesh, u, params) <= 0.0)
        throw DomainError("maximize: init rejected, normalizer E <= 0");

    MaximizeResult res;
    res.seed_id = seed_id;
    Evaluated j = evaluate(mesh, u, params, opts.order);
    res.overflow = res.overflow || j.overflow;
    res.j_history.push_back(j.value);

    std::vector<double> warm_riesz, warm_dual;
    bool stagnated = false;
    int it = 0;
    for (; it < opts.max_iters; ++it) {
        auto load = gradient_load(mesh, u, params, opts.order, &res.overflow);
        Field w = ctx.solve_load(load, &warm_riesz);

        // tangent slope of s -> J(normalize(u + s w)) at s = 0
        double Lw = 0.0, Lu = 0.0;
        for (int i = 0; i < mesh.n_vertices(); ++i) {
            Lw += load[i] * w[i];
            Lu += load[i] * u[i];
        }
        std::vector<double> ku((size_t)mesh.n_vertices());
        ctx.stiffness().apply(u.values(), ku);
        double wKu = 0.0;
        for (int i = 0; i < mesh.n_vertices(); ++i) wKu += w[i] * ku[i];
        double slope = Lw - wKu * Lu;
        if (slope <= 0.0) break;  // stationary for the constrained problem

        double s = opts.s0;
        bool accepted = false;
        Field trial(mesh);
        while (s >= opts.s_min) {
            trial = u;
            for (int i = 0; i < mesh.n_vertices(); ++i) trial[i] += s * w[i];
            trial = normalized(ctx, trial);
            Evaluated jt = evaluate(mesh, trial, params, opts.order);
            if (jt.value >= j.value + opts.armijo * s * slope) {
                u = std::move(trial);
                j = jt;
                res.overflow = res.overflow || jt.overflow;
                res.j_history.push_back(j.value);
                accepted = true;
                break;
            }
            s *= opts.backtrack;
        }
        if (!accepted) {
            stagnated = true;
            break;
        }
        if ((it + 1) % opts.residual_check_every == 0) {
            auto r = el_residual(ctx, u, params);
            if (r.residual <= opts.el_tol) {
                res.converged = true;
                ++it;
                break;
            }
        }
    }
    res.iterations = it;

    // canonical nonnegative representative
    if (u.min_value() < -1e-8) {
        for (double& v : u.values()) v = std::abs(v);
        u = normalized(ctx, u);
        j = evaluate(mesh, u, params, opts.order);
    }

    res.u = u;
    res.J = j.value;
    res.stagnated = stagnated;
    auto r = el_residual(ctx, u, params);
    res.el_residual = r.residual;
    res.converged = res.converged || r.residual <= opts.el_tol;
    res.energy = energy_decompose(ctx, u, params);
    res.peak_vertex = u.argmax();
    res.c = u[res.peak_vertex];
    res.x_peak = mesh.vertex(res.peak_vertex);
    res.gamma = 2.0 * std::sqrt(M_PI) * res.c;
    return res;
}

SeedSpec SeedSpec::parse(const std::string& text, unsigned long long rng_seed) {
    SeedSpec s;
    s.rng_seed = rng_seed;
    std::string src = text.empty() || text == "default" ? "bubbles;poisson" : text;
    std::stringstream ss(src);
    std::string item;
    while (std::getline(ss, item, ';')) {
        if (item.empty()) continue;
        auto colon = item.find(':');
        std::string head = item.substr(0, colon);
        std::string args = colon == std::string::npos ? "" : item.substr(colon + 1);
        if (head == "bubbles") {
            if (args.empty() || args == "default") {
                for (double k : {6.0, 8.0, 10.0, 12.0}) s.bubble_eps.push_back(std::exp(-k));
            } else {
                std::stringstream as(args);
                std::string tok;
                while (std::getline(as, tok, ',')) {
                    if (tok.size() > 2 && tok[0] == 'e' && tok[1] == '-')
                        s.bubble_eps.push_back(std::exp(-std::stod(tok.substr(2))));
                    else

                        s.bubble_eps.push_back(std::stod(tok));
                }
            }
        } else if (head == "poisson") {
            s.poisson = true;
        } else if (head == "random") {
            s.random_bumps = args.empty() ? 3 : std::stoi(args);
        } else {
            throw UsageError("unknown seed kind: " + head);
        }
    }
    if (s.bubble_eps.empty() && !s.poisson && s.random_bumps == 0)
        throw UsageError("seed spec selects no seeds");
    return s;
}

std::string SeedSpec::describe() const {
    std::string out;
    if (!bubble_eps.empty()) {
        out += "bubbles:";
        for (size_t i = 0; i < bubble_eps.size(); ++i)
            out += (i ? "," : "") + std::to_string(bubble_eps[i]);
    }
    if (poisson) out += std::string(out.empty() ? "" : ";") + "poisson";
    if (random_bumps) out += std::string(out.empty() ? "" : ";") + "random:" + std::to_string(random_bumps);
    return out;
}

std::vector<std::pair<std::string, Field>> build_seeds(const FemContext& ctx, const SeedSpec& seeds,
                                                       const PotentialReport* report) {
    const Mesh& mesh = ctx.mesh();
    std::vector<std::pair<std::string, Field>> out;

    if (!seeds.bubble_eps.empty()) {
        Vec2 center;
        if (seeds.bubble_center) {
            center = *seeds.bubble_center;
        } else if (report) {
            center = report->harmonic_center;
        } else {
            // cheap surrogate for the harmonic center: peak of -Laplace w = 1
            Field one(mesh, 1.0);
            Field w = ctx.solve_dirichlet(one, Field(mesh));
            center = mesh.vertex(w.argmax());
        }
        for (double eps : seeds.bubble_eps) {
            std::ostringstream id;
            id << "bubble:eps=" << eps;
            out.emplace_back(id.str(), build_test_function(ctx, eps, center));
        }
    }
    if (seeds.poisson) {
        Field one(mesh, 1.0);
        Field w = ctx.solve_dirichlet(one, Field(mesh));
        out.emplace_back("poisson", w);
    }
    if (seeds.random_bumps > 0) {
        std::mt19937_64 rng(seeds.rng_seed);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        for (int k = 0; k < seeds.random_bumps; ++k) {
            // smooth random density localized inside the domain; the Dirichlet
            // solve keeps the seed in H^1_0
            Field density(mesh);
            int centers = 1 + (int)(unif(rng) * 3);
            for (int c = 0; c < centers; ++c) {
                const auto& interior = mesh.interior_vertices();
                int v = interior[(size_t)(unif(rng) * interior.size()) % interior.size()];
                Vec2 x0 = mesh.vertex(v);
                double width = (0.1 + 0.4 * unif(rng)) * std::sqrt(mesh.area());
                double amp = 0.5 + unif(rng);
                for (int i = 0; i < mesh.n_vertices(); ++i) {
                    double d = dist(mesh.vertex(i), x0);
                    density[i] += amp * std::exp(-(d * d) / (width * width));
                }
            }
            Field w = ctx.solve_dirichlet(density, Field(mesh));
            out.emplace_back("random:" + std::to_string(k), w);
        }
    }
    return out;
}

RadialComparison radial_comparison(const FemContext& ctx, const MaximizeResult& result,
                                   const PerturbParams& params, double delta) {
    const Mesh& mesh = ctx.mesh();
    RadialComparison cmp;
    cmp.delta = delta;
    if (result.c <= 0.0 || result.energy.E <= 0.0) return cmp;

    RadialProfile prof = shoot_radial(result.gamma, result.energy.E, params, delta);
    if (prof.sign_change) return cmp;
    cmp.r_max = std::min(prof.r_k_delta, 0.9 * mesh.distance_to_boundary(result.x_peak));
    if (cmp.r_max <= 0.0) return cmp;

    const double root4pi = 2.0 * std::sqrt(M_PI);
    const int nr = 48, na = 24;
    double sup = 0.0;
    for (int ir = 1; ir <= nr; ++ir) {
        double rho = cmp.r_max * ir / nr;
        double acc = 0.0;
        for (int ia = 0; ia < na; ++ia) {
            double ang = 2.0 * M_PI * ia / na;
            Vec2 y = result.x_peak + rho * Vec2{std::cos(ang), std::sin(ang)};
            acc += root4pi * result.u.interpolate(y);
        }
        double v_bar = acc / na;
        double s = rho / prof.r_k;
        double V = prof.value_at_t(std::log1p(s * s));
        sup = std::max(sup, std::abs(v_bar - V));
    }
    cmp.sup_diff = sup;
    cmp.gamma_sup_diff = result.gamma * sup;
    cmp.valid = true;
    return cmp;
}

int thread_cap() {
    if (const char* env = std::getenv("TMX_THREADS")) {
        int v = std::atoi(env);
        if (v >= 1) return v;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return (int)std::min(hw == 0 ? 1u : hw, 8u);
}

MultiStartResult multi_start(const FemContext& ctx, const PerturbParams& params,
                             const SeedSpec& seeds, const MaximizeOptions& opts,
                             const PotentialReport* report) {
    auto seed_fields = build_seeds(ctx, seeds, report);
    const int n = (int)seed_fields.size();
    std::vector<std::optional<MaximizeResult>> results((size_t)n);
    std::vector<SeedSummary> summaries((size_t)n);

    std::atomic<int> next{0};
    auto worker = [&] {
        for (;;) {
            int k = next.fetch_add(1);
            if (k >= n) return;
            SeedSummary& s = summaries[k];
            s.seed_id = seed_fields[k].first;
            try {
                MaximizeResult r =
                    maximize(ctx, params, seed_fields[k].second, opts, seed_fields[k].first);
                s.J = r.J;
                s.el_residual = r.el_residual;
                s.c = r.c;
                s.iterations = r.iterations;
                s.converged = r.converged;
                s.stagnated = r.stagnated;
                results[k] = std::move(r);
            } catch (const DomainError&) {
                s.rejected = true;
            }
        }
    };
    int nthreads = std::min(thread_cap(), n);
    if (nthreads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    int best = -1;
    for (int k = 0; k < n; ++k)
        if (results[k] && (best < 0 || results[k]->J > results[best]->J)) best = k;
    if (best < 0) throw Error("multi_start: every seed was rejected");

    MultiStartResult out;
    out.best = std::move(*results[best]);
    out.runs = std::move(summaries);
    return out;
}

BlowupReport blowup_diagnostics(const FemContext& ctx, const MaximizeResult& result,
                                const PotentialReport& report) {
    const Mesh& mesh = ctx.mesh();
    if (result.c <= 0.0) throw DomainError("blowup_diagnostics: needs a positive peak");
    BlowupReport rep;
    const double gamma = result.gamma;
    const double E = result.energy.E;
    if (E <= 0.0) throw DomainError("blowup_diagnostics: E <= 0");

    rep.r_k = std::sqrt(E / M_PI) / gamma * std::exp(-gamma * gamma / 2.0);
    double dist_b = mesh.distance_to_boundary(result.x_peak);
    rep.non_concentrated = rep.r_k > 0.5 * dist_b;
    rep.R_sample = std::min(10.0, dist_b / (2.0 * rep.r_k));

    double S_corr = report.concentration_level - mesh.area();
    rep.energy_ratio = (E / (gamma * gamma)) / S_corr;

    if (!rep.non_concentrated && rep.R_sample > 0.0) {
        const int nr = 64, na = 16;
        const double root4pi = 2.0 * std::sqrt(M_PI);
        double sup = 0.0, l2 = 0.0;
        for (int ir = 0; ir <= nr; ++ir) {
            double rho = rep.R_sample * ir / nr;
            double acc_prof = 0.0, acc_psi = 0.0;
            for (int ia = 0; ia < na; ++ia) {
                double ang = 2.0 * M_PI * ia / na;
                Vec2 y = result.x_peak + (rep.r_k * rho) * Vec2{std::cos(ang), std::sin(ang)};
                double v = root4pi * result.u.interpolate(y);
                double prof = gamma * (v - gamma);
                acc_prof += prof;
                acc_psi += v / gamma;
                double dev = std::abs(prof - (-std::log1p(rho * rho)));
                sup = std::max(sup, dev);
                l2 += dev * dev;
            }
            rep.radii.push_back(rho);
            rep.profile.push_back(acc_prof / na);
            rep.psi.push_back(acc_psi / na);
        }
        rep.phi_inf_sup_dev = sup;
        rep.phi_inf_l2_dev = std::sqrt(l2 / ((nr + 1.0) * na));
    }

    // Prop-3.7 style tail comparison: gamma v against G outside B_rho(x_peak).
    double rho_excl = 10.0 * mesh.max_edge_length();
    const Field& G = report.green_at_center;
    const double root4pi = 2.0 * std::sqrt(M_PI);
    double dev = 0.0;
    for (int i : mesh.interior_vertices()) {
        if (dist(mesh.vertex(i), result.x_peak) <= rho_excl) continue;
        dev = std::max(dev, std::abs(gamma * root4pi * result.u[i] - G[i]));
    }
    rep.green_sup_dev = dev;
    return rep;
}

}  // namespace tmx

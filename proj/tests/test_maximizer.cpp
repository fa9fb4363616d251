#include <doctest.h>

#include <cmath>

#include "tmx/maximizer.hpp"
#include "tmx/moser.hpp"
#include "tmx/radial.hpp"

using namespace tmx;

TEST_SUITE("maximizer") {

TEST_CASE("ascent improves on the seed and keeps the contracts") {
    Mesh m = build_disk_mesh(3);
    FemContext ctx(m);
    PerturbParams params;  // lambda = 0
    auto seeds = build_seeds(ctx, SeedSpec::parse("bubbles:e-8"));
    double j_init = evaluate(m, seeds[0].second, params).value;
    MaximizeResult r = maximize(ctx, params, seeds[0].second, {}, seeds[0].first);

    CHECK(r.J >= j_init);
    for (size_t i = 1; i < r.j_history.size(); ++i) CHECK(r.j_history[i] >= r.j_history[i - 1]);
    CHECK(std::abs(ctx.h1_seminorm(r.u) - 1.0) <= 1e-10);
    CHECK(r.u.min_value() >= -1e-8);
    CHECK(r.c == r.u[r.peak_vertex]);
    CHECK(r.x_peak == m.vertex(r.peak_vertex));
    CHECK(r.gamma == doctest::Approx(2.0 * std::sqrt(M_PI) * r.c).epsilon(1e-15));
}

TEST_CASE("normalization is idempotent") {
    Mesh m = build_disk_mesh(2);
    FemContext ctx(m);
    auto seeds = build_seeds(ctx, SeedSpec::parse("poisson"));
    Field u = seeds[0].second;
    double n1 = ctx.h1_seminorm(u);
    for (double& v : u.values()) v /= n1;
    double n2 = ctx.h1_seminorm(u);
    Field again = u;
    for (double& v : again.values()) v /= n2;
    for (int i = 0; i < m.n_vertices(); ++i)
        CHECK(std::abs(again[i] - u[i]) <= 1e-14 * std::max(1.0, std::abs(u[i])));
}

TEST_CASE("maximizer beats every standard bubble at lambda 0") {
    Mesh m = build_disk_mesh(3);
    FemContext ctx(m);
    PerturbParams params;
    PotentialReport rep = concentration_level(ctx);
    MultiStartResult ms = multi_start(ctx, params, SeedSpec::parse("default"), {}, &rep);
    for (double k : {6.0, 8.0, 10.0, 12.0}) {
        Field phi = build_test_function(ctx, std::exp(-k), rep.harmonic_center);
        CHECK(ms.best.J >= evaluate(m, phi, params).value);
    }
}

TEST_CASE("sign canonicalization: a flipped seed gives the same value") {
    Mesh m = build_disk_mesh(2);
    FemContext ctx(m);
    PerturbParams params;
    auto seeds = build_seeds(ctx, SeedSpec::parse("bubbles:e-6"));
    Field neg = seeds[0].second;
    for (double& v : neg.values()) v = -v;
    MaximizeResult a = maximize(ctx, params, seeds[0].second);
    MaximizeResult b = maximize(ctx, params, neg);
    // the trajectories mirror exactly; only the |u| projection rounds
    CHECK(a.J == doctest::Approx(b.J).epsilon(1e-12));
    CHECK(b.u.min_value() >= -1e-8);
}

TEST_CASE("rejects invalid seeds") {
    Mesh m = build_disk_mesh(2);
    FemContext ctx(m);
    PerturbParams params;
    CHECK_THROWS_AS(maximize(ctx, params, Field(m)), DomainError);  // zero init

    Field bad(m, 1.0);  // nonzero boundary values
    CHECK_THROWS_AS(maximize(ctx, params, bad), DomainError);

    // flat positive field with a crushing perturbation: E <= 0
    PerturbParams crush;
    crush.lambda = 1e7;
    crush.p = 1.0;
    Field flat(m);
    for (int i : m.interior_vertices()) flat[i] = 0.05;
    CHECK_THROWS_AS(maximize(ctx, crush, flat), DomainError);
}

TEST_CASE("multi_start: single seed equals maximize, larger seed sets never lose") {
    Mesh m = build_disk_mesh(2);
    FemContext ctx(m);
    PerturbParams params;
    params.lambda = 1.0;

    auto one = build_seeds(ctx, SeedSpec::parse("bubbles:e-8"));
    MaximizeResult direct = maximize(ctx, params, one[0].second, {}, one[0].first);
    MultiStartResult single = multi_start(ctx, params, SeedSpec::parse("bubbles:e-8"));
    CHECK(single.best.J == direct.J);
    CHECK(single.runs.size() == 1);

    MultiStartResult small = multi_start(ctx, params, SeedSpec::parse("bubbles:e-6,e-8"));
    MultiStartResult large = multi_start(ctx, params, SeedSpec::parse("bubbles:e-6,e-8,e-10;poisson"));
    CHECK(large.best.J >= small.best.J);
    CHECK(large.runs.size() == 4);
}

TEST_CASE("multi_start reports every seed rejected") {
    Mesh m = build_disk_mesh(2);
    FemContext ctx(m);
    PerturbParams crush;
    crush.lambda = 1e9;
    crush.p = 1.0;
    CHECK_THROWS_AS(multi_start(ctx, crush, SeedSpec::parse("poisson")), Error);
}

TEST_CASE("blow-up diagnostics identities") {
    Mesh m = build_disk_mesh(3);
    FemContext ctx(m);
    PerturbParams params;
    PotentialReport rep = concentration_level(ctx);
    MultiStartResult ms = multi_start(ctx, params, SeedSpec::parse("bubbles:e-8"), {}, &rep);
    BlowupReport b = blowup_diagnostics(ctx, ms.best, rep);

    // r_k^2 = (E/pi) gamma^-2 e^{-gamma^2} given reported E and gamma
    double expect = std::sqrt(ms.best.energy.E / M_PI) / ms.best.gamma *
                    std::exp(-0.5 * ms.best.gamma * ms.best.gamma);
    CHECK(b.r_k == doctest::Approx(expect).epsilon(1e-12));
    CHECK(b.energy_ratio ==
          doctest::Approx((ms.best.energy.E / (ms.best.gamma * ms.best.gamma)) /
                          (rep.concentration_level - m.area()))
              .epsilon(1e-12));
    if (!b.non_concentrated) {
        REQUIRE(!b.profile.empty());
        CHECK(std::abs(b.profile.front()) <= 1e-9);  // phi(0) = 0 by construction
        CHECK(b.radii.front() == 0.0);
        // the comparator at |y| = 1 is phi_inf(1) = -log 2
        CHECK(phi_inf(1.0) == doctest::Approx(-std::log(2.0)).epsilon(1e-15));
    }
}

TEST_CASE("rescaled profile approaches the bubble under refinement") {
    PerturbParams params;
    std::vector<double> dev;
    for (int level : {3, 4}) {
        Mesh m = build_disk_mesh(level);
        FemContext ctx(m);
        PotentialReport rep = concentration_level(ctx);
        MultiStartResult ms = multi_start(ctx, params, SeedSpec::parse("default"), {}, &rep);
        BlowupReport b = blowup_diagnostics(ctx, ms.best, rep);
        REQUIRE_FALSE(b.non_concentrated);
        // sup deviation from phi_inf restricted to |y| <= 2
        double sup = 0.0;
        for (size_t i = 0; i < b.radii.size(); ++i)
            if (b.radii[i] <= 2.0)
                sup = std::max(sup, std::abs(b.profile[i] - phi_inf(b.radii[i])));
        dev.push_back(sup);
    }
    CHECK(dev[1] < dev[0]);
}

TEST_CASE("non-concentrated results are flagged in the blow-up report") {
    Mesh m = build_disk_mesh(2);
    FemContext ctx(m);
    PerturbParams params;
    PotentialReport rep = concentration_level(ctx);
    // fabricate a flat result: small peak, large normalizer -> r_k beyond the
    // domain scale
    MaximizeResult flat;
    auto seeds = build_seeds(ctx, SeedSpec::parse("poisson"));
    flat.u = seeds[0].second;
    flat.c = 0.1;
    flat.gamma = 2.0 * std::sqrt(M_PI) * flat.c;
    flat.x_peak = {0.0, 0.0};
    flat.energy.E = 100.0;
    BlowupReport b = blowup_diagnostics(ctx, flat, rep);
    CHECK(b.non_concentrated);
    CHECK(b.profile.empty());  // no rescaled sampling outside the blow-up regime
    CHECK(b.r_k > 0.5 * m.distance_to_boundary(flat.x_peak));
}

TEST_CASE("radial comparison report on a disk maximizer") {
    Mesh m = build_disk_mesh(3);
    FemContext ctx(m);
    PerturbParams params;
    auto seeds = build_seeds(ctx, SeedSpec::parse("bubbles:e-8"));
    MaximizeResult r = maximize(ctx, params, seeds[0].second);
    RadialComparison cmp = radial_comparison(ctx, r, params);
    CHECK(cmp.valid);
    CHECK(cmp.r_max > 0.0);
    CHECK(std::isfinite(cmp.sup_diff));
    // recorded, not asserted small; it must at least stay below the peak scale
    CHECK(cmp.sup_diff < r.gamma);
    CHECK(cmp.gamma_sup_diff == doctest::Approx(r.gamma * cmp.sup_diff));
}

TEST_CASE("seed spec parsing") {
    SeedSpec def = SeedSpec::parse("default");
    CHECK(def.bubble_eps.size() == 4);
    CHECK(def.poisson);
    SeedSpec explicit_eps = SeedSpec::parse("bubbles:e-6,0.01;random:2");
    CHECK(explicit_eps.bubble_eps.size() == 2);
    CHECK(explicit_eps.bubble_eps[0] == doctest::Approx(std::exp(-6.0)));
    CHECK(explicit_eps.bubble_eps[1] == 0.01);
    CHECK(explicit_eps.random_bumps == 2);
    CHECK_THROWS_AS(SeedSpec::parse("warp:7"), UsageError);
}

}  // TEST_SUITE

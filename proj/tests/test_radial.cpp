#include <doctest.h>

#include <cmath>

#include "tmx/radial.hpp"

using namespace tmx;

namespace {

// Dilogarithm on [0,1) by series + reflection: the independent oracle for the
// quadrature route inside s0_profile, via
//   int_1^M log t/(1-t) dt = -Li2(1 - 1/M) - (1/2) log^2 M.
double dilog(double x) {
    REQUIRE(x >= 0.0);
    REQUIRE(x < 1.0);
    if (x > 0.5)
        return M_PI * M_PI / 6.0 - std::log(x) * std::log1p(-x) - dilog(1.0 - x);
    double sum = 0.0, term = 1.0;
    for (int k = 1; k < 200; ++k) {
        term *= x;
        double add = term / (k * (double)k);
        sum += add;
        if (std::abs(add) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
}

double s0_oracle(double r) {
    if (r == 0.0) return 0.0;
    double M = 1.0 + r * r;
    double phi = -std::log(M);
    double I = -dilog(r * r / M) - 0.5 * std::log(M) * std::log(M);
    return phi + 2.0 * r * r / M - 0.5 * phi * phi + (1.0 - r * r) / M * I;
}

}  // namespace

TEST_SUITE("radial") {

TEST_CASE("bubble and correction profiles at pinned points") {
    CHECK(phi_inf(0.0) == 0.0);
    CHECK(s0_profile(0.0) == 0.0);
    CHECK(phi_inf(1.0) == doctest::Approx(-std::log(2.0)).epsilon(1e-15));
    // S0(1) = 1 - log 2 - log^2(2)/2 (the (1-r^2) prefactor kills the integral)
    double expect = 1.0 - std::log(2.0) - 0.5 * std::log(2.0) * std::log(2.0);
    CHECK(s0_profile(1.0) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("quadrature route agrees with the dilogarithm closed form") {
    for (double r : {0.1, 0.5, 1.0, 2.3, 7.0, 31.0, 200.0, 5000.0}) {
        CHECK(s0_profile(r) ==
              doctest::Approx(s0_oracle(r)).epsilon(1e-11).scale(std::max(1.0, std::abs(s0_oracle(r)))));
    }
}

TEST_CASE("bubble identities") {
    auto rep = bubble_identities(100.0);
    CHECK(rep.liouville_sup_residual <= 1e-10);
    // int_{B_100} = pi 10^4/10001, i.e. pi to 3.2e-4 absolute
    CHECK(rep.mass_error <= 1e-9);
    CHECK(std::abs(rep.mass_integral - M_PI) ==
          doctest::Approx(M_PI / 10001.0).epsilon(1e-6));
    CHECK(rep.s0_ode_sup_residual <= 1e-6);
    CHECK_THROWS_AS(bubble_identities(0.5), DomainError);
}

TEST_CASE("asymptotic fit recovers A0/4pi and B0 once r is large enough") {
    // remainder is O(log^2(r^2)/r^2); over [e^5, e^7] the bias is inside the
    // 1% / 2% windows
    const int N = 120;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < N; ++i) {
        double lr = 5.0 + 2.0 * i / (N - 1);
        double x = -2.0 * lr;
        double y = s0_profile(std::exp(lr));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    double a = (N * sxy - sx * sy) / (N * sxx - sx * sx);
    double b = (sy - a * sx) / N;
    CHECK(std::abs(a - 1.0) <= 0.01);
    CHECK(std::abs(b - RadialConstants::B0) <= 0.02 * RadialConstants::B0);
}

TEST_CASE("the asymptotic remainder scales like log^2(r^2)/r^2") {
    for (double lr : {4.0, 5.0, 6.0}) {
        double r = std::exp(lr);
        double rem = s0_profile(r) - (std::log(1.0 / (r * r)) + RadialConstants::B0);
        double scale = std::pow(std::log(r * r), 2) / (r * r);
        CHECK(std::abs(rem) / scale > 0.5);
        CHECK(std::abs(rem) / scale < 2.0);
    }
}

TEST_CASE("shooting: initial conditions, grid contract, monotonicity") {
    PerturbParams params;
    double gamma = 6.0;
    RadialProfile prof = shoot_radial(gamma, gamma * gamma * M_PI * M_E, params, 0.5);
    CHECK(prof.V.front() == gamma);
    CHECK(prof.t.front() == 0.0);
    CHECK(prof.r.front() == 0.0);
    CHECK_FALSE(prof.sign_change);
    // termination exactly at t = delta gamma^2
    CHECK(prof.t.back() == doctest::Approx(0.5 * gamma * gamma).epsilon(1e-10));
    // r_k identity to 1e-12
    double rk = std::sqrt(prof.E / M_PI) / gamma * std::exp(-0.5 * gamma * gamma);
    CHECK(prof.r_k == doctest::Approx(rk).epsilon(1e-12));
    // t really is log(1 + r^2/r_k^2) on the grid
    for (size_t i = 0; i < prof.t.size(); i += 37) {
        double s = prof.r[i] / prof.r_k;
        CHECK(prof.t[i] == doctest::Approx(std::log1p(s * s)).epsilon(1e-9));
    }
    for (size_t i = 1; i < prof.V.size(); ++i) CHECK(prof.V[i] < prof.V[i - 1]);
    CHECK(prof.V.size() == prof.t.size());
    CHECK(prof.t.size() == 400);
}

TEST_CASE("shooting hits the second-order expansion at t = log 2") {
    PerturbParams params;
    for (double gamma : {4.0, 6.0}) {
        RadialProfile prof = shoot_radial(gamma, gamma * gamma * M_PI * M_E, params, 0.5);
        double v = prof.value_at_t(std::log(2.0));
        double second = gamma - std::log(2.0) / gamma;
        double third = second + s0_oracle(1.0) / (gamma * gamma * gamma);
        // the S0 term is a real correction: including it helps by ~gamma^2
        CHECK(std::abs(v - third) < 0.2 * std::abs(v - second));
        CHECK(std::abs(v - second) <= 2.0 / (gamma * gamma * gamma));
    }
}

TEST_CASE("solver tolerance halving changes the endpoint by <= 1e-8 relative") {
    PerturbParams params;
    ShootOptions a, b;
    a.rel_tol = 1e-10;
    b.rel_tol = 5e-11;
    RadialProfile pa = shoot_radial(5.0, 25.0 * M_PI * M_E, params, 0.5, a);
    RadialProfile pb = shoot_radial(5.0, 25.0 * M_PI * M_E, params, 0.5, b);
    CHECK(std::abs(pa.V.back() - pb.V.back()) <= 1e-8 * std::abs(pb.V.back()));
}

TEST_CASE("expansion statistics: exact zero at the origin, bounded scaled sup") {
    PerturbParams params;
    std::vector<double> scaled, raw;
    for (double g : {4.0, 6.0, 8.0}) {
        RadialProfile prof = shoot_radial(g, g * g * M_PI * M_E, params, 0.5);
        ExpansionStats st = expansion_error(prof);
        CHECK(st.err.front() == 0.0);
        scaled.push_back(st.scaled_sup);
        raw.push_back(st.raw_sup);
    }
    CHECK(*std::max_element(scaled.begin(), scaled.end()) /
              *std::min_element(scaled.begin(), scaled.end()) <=
          5.0);
    CHECK(raw[0] > raw[1]);
    CHECK(raw[1] > raw[2]);
}

TEST_CASE("lambda term participates in the radial equation") {
    // the perturbation subtracts from -lap V, so the profile decays slower
    PerturbParams lam0;
    PerturbParams lam;
    lam.lambda = 1e4;  // large enough to matter against e^{-gamma^2}, gamma = 3
    lam.p = 1.0;
    double gamma = 3.0, E = gamma * gamma * M_PI * M_E;
    RadialProfile a = shoot_radial(gamma, E, lam0, 0.5);
    RadialProfile b = shoot_radial(gamma, E, lam, 0.5);
    CHECK(b.V.back() > a.V.back());
}

TEST_CASE("a zero crossing truncates the profile and sets the flag") {
    // negative lambda (pass-through regime) accelerates the decay enough to
    // cross zero inside the sampled ball
    PerturbParams lam;
    lam.lambda = -50.0;
    lam.p = 1.0;
    RadialProfile prof = shoot_radial(1.5, 1.5 * 1.5 * M_PI * M_E, lam, 0.95);
    CHECK(prof.sign_change);
    CHECK(prof.V.size() < 400);  // truncated
    CHECK(prof.V.back() <= 0.0);
    CHECK_THROWS_AS(expansion_error(prof), DomainError);
}

TEST_CASE("input validation") {
    PerturbParams params;
    CHECK_THROWS_AS(shoot_radial(-1.0, 1.0, params, 0.5), DomainError);
    CHECK_THROWS_AS(shoot_radial(4.0, 0.0, params, 0.5), DomainError);
    CHECK_THROWS_AS(shoot_radial(4.0, 1.0, params, 1.5), DomainError);
    RadialProfile empty;
    CHECK_THROWS_AS(expansion_error(empty), DomainError);
}

}  // TEST_SUITE

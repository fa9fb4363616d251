#include "tmx/radial.hpp"

#include <boost/numeric/odeint.hpp>
#include <cmath>

namespace tmx {

namespace {

// adaptive Simpson with absolute tolerance
template <class F>
double adaptive_simpson(F&& f, double a, double b, double fa, double fb, double fm, double tol,
                        int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, a, m, fa, fm, flm, tol * 0.5, depth - 1) +
           adaptive_simpson(f, m, b, fm, fb, frm, tol * 0.5, depth - 1);
}

template <class F>
double integrate_1d(F&& f, double a, double b, double tol) {
    if (a == b) return 0.0;
    double m = 0.5 * (a + b);
    return adaptive_simpson(f, a, b, f(a), f(b), f(m), tol, 48);
}

double log_kernel_t(double t) {  // log t / (1 - t), removable at t = 1
    if (std::abs(t - 1.0) < 1e-9) return -1.0 - 0.5 * (t - 1.0);
    return std::log(t) / (1.0 - t);
}

double bubble_density(double r) {  // 2 pi r e^{2 phi_inf}
    double q = 1.0 + r * r;
    return 2.0 * M_PI * r / (q * q);
}

}  // namespace

double phi_inf(double r) { return -std::log1p(r * r); }

double s0_profile(double r) {
    if (r == 0.0) return 0.0;
    double M = 1.0 + r * r;
    double phi = -std::log(M);
    // near t = 1 the integrand is flat (removable singularity); the long tail
    // is integrated in u = log t where it is a slowly varying -u/(1 - e^{-u})
    double I = integrate_1d(log_kernel_t, 1.0, std::min(M, 4.0), 1e-13);
    if (M > 4.0)
        I += integrate_1d([](double u) { return -u / (1.0 - std::exp(-u)); }, std::log(4.0),
                          std::log(M), 1e-13);
    return phi + 2.0 * r * r / M - 0.5 * phi * phi + (1.0 - r * r) / M * I;
}

BubbleIdentityReport bubble_identities(double R_max, double quad_tol) {
    if (!(R_max > 1.0)) throw DomainError("bubble_identities: R_max must exceed 1");
    BubbleIdentityReport rep;
    rep.R_max = R_max;

    // (a) Liouville identity with analytic radial derivatives
    double sup = 0.0;
    for (int i = 0; i <= 400; ++i) {
        double r = R_max * i / 400.0;
        double q = 1.0 + r * r;
        double d1 = -2.0 * r / q;                  // phi'
        double d2 = -2.0 * (1.0 - r * r) / (q * q);  // phi''
        double lap = r == 0.0 ? 2.0 * d2 : d2 + d1 / r;
        double resid = std::abs(-lap - 4.0 * std::exp(2.0 * phi_inf(r)));
        sup = std::max(sup, resid);
    }
    rep.liouville_sup_residual = sup;

    // (b) bubble mass over B_R against the antiderivative pi R^2/(1+R^2)
    rep.mass_integral = integrate_1d(bubble_density, 0.0, R_max, quad_tol);
    rep.mass_error = std::abs(rep.mass_integral - M_PI * R_max * R_max / (1.0 + R_max * R_max));

    // (c) S0 equation residual via step-extrapolated central differences
    double sup_s0 = 0.0;
    for (double r : {0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0}) {
        if (r > R_max) break;
        auto resid_h = [&](double h) {
            double sp = (s0_profile(r + h) - s0_profile(r - h)) / (2.0 * h);
            double spp = (s0_profile(r + h) - 2.0 * s0_profile(r) + s0_profile(r - h)) / (h * h);
            double lap = spp + sp / r;
            double e2 = std::exp(2.0 * phi_inf(r));
            double phi = phi_inf(r);
            return -lap - 8.0 * e2 * s0_profile(r) - 4.0 * e2 * (phi * phi + phi);
        };
        double h = 1e-3 * (1.0 + r);
        double r1 = resid_h(h), r2 = resid_h(0.5 * h);
        double extrap = (4.0 * r2 - r1) / 3.0;  // h^2 -> h^4 Richardson
        sup_s0 = std::max(sup_s0, std::abs(extrap));
    }
    rep.s0_ode_sup_residual = sup_s0;
    return rep;
}

double RadialProfile::value_at_t(double tq) const {
    if (t.empty()) throw DomainError("empty radial profile");
    if (tq <= t.front()) return V.front();
    if (tq >= t.back()) return V.back();
    auto it = std::lower_bound(t.begin(), t.end(), tq);
    size_t i = (size_t)(it - t.begin());
    double w = (tq - t[i - 1]) / (t[i] - t[i - 1]);
    return (1.0 - w) * V[i - 1] + w * V[i];
}

RadialProfile shoot_radial(double gamma, double E, const PerturbParams& params, double delta,
                           const ShootOptions& opts) {
    params.validate();
    if (!(gamma > 0.0)) throw DomainError("shoot_radial: gamma must be positive");
    if (!(E > 0.0)) throw DomainError("shoot_radial: E must be positive");
    if (!(delta > 0.0 && delta < 1.0)) throw DomainError("shoot_radial: delta in (0,1)");

    RadialProfile prof;
    prof.gamma = gamma;
    prof.E = E;
    prof.lambda = params.lambda;
    prof.p = params.p;
    prof.delta = delta;
    prof.r_k = std::exp(0.5 * std::log(E / M_PI) - std::log(gamma) - 0.5 * gamma * gamma);
    double t_max = delta * gamma * gamma;
    prof.r_k_delta =
        std::exp(0.5 * std::log(E / M_PI) - std::log(gamma) - 0.5 * (1.0 - delta) * gamma * gamma);

    const double g2 = gamma * gamma;
    const double cp = params.p / (2.0 * std::pow(4.0 * M_PI, params.p / 2.0));
    const double lam_term = 4.0 / gamma * cp * params.lambda * std::exp(-g2);

    // w = gamma (gamma - V); w'' + w'/s = F(w), s = r / r_k
    auto F = [&](double w) {
        double V = gamma - w / gamma;
        return 4.0 * (1.0 - w / g2) * std::exp(-2.0 * w + w * w / g2) -
               lam_term * std::pow(std::abs(V), params.p - 1.0);
    };

    using state = std::array<double, 2>;
    auto rhs = [&](const state& y, state& dy, double s) {
        dy[0] = y[1];
        dy[1] = F(y[0]) - y[1] / s;
    };

    const int N = std::max(2, opts.grid_points);
    std::vector<double> ts(N), ss(N);
    for (int i = 0; i < N; ++i) {
        ts[i] = t_max * i / (N - 1);
        ss[i] = std::sqrt(std::expm1(ts[i]));
    }

    prof.t.push_back(0.0);
    prof.r.push_back(0.0);
    prof.V.push_back(gamma);

    const double s_start = 1e-3;
    const double F0 = F(0.0);
    state y = {F0 * s_start * s_start / 4.0, F0 * s_start / 2.0};

    namespace ode = boost::numeric::odeint;
    auto stepper = ode::make_controlled(opts.abs_tol, opts.rel_tol,
                                        ode::runge_kutta_dopri5<state>());
    double s_cur = s_start;
    for (int i = 1; i < N; ++i) {
        double s_next = ss[i];
        if (s_next <= s_cur) {
            // inside the series-start region
            prof.t.push_back(ts[i]);
            prof.r.push_back(prof.r_k * s_next);
            prof.V.push_back(gamma - F0 * s_next * s_next / 4.0 / gamma);
            continue;
        }
        try {
            ode::integrate_adaptive(stepper, rhs, y, s_cur, s_next,
                                    std::min(0.1 * (s_next - s_cur), 1e-2));
        } catch (const std::exception& e) {
            throw Error(std::string("shoot_radial: step-size control failed (") + e.what() + ")");
        }
        s_cur = s_next;
        double w = y[0];
        prof.t.push_back(ts[i]);
        prof.r.push_back(prof.r_k * s_next);
        prof.V.push_back(gamma - w / gamma);
        if (w >= g2) {  // V crossed zero: outside the monotone bubble regime
            prof.sign_change = true;
            break;
        }
    }
    return prof;
}

double exponential_ball_integral(double gamma, double E, const PerturbParams& params, double delta,
                                 const ShootOptions& opts) {
    params.validate();
    if (!(gamma > 0.0) || !(E > 0.0) || !(delta > 0.0 && delta < 1.0))
        throw DomainError("exponential_ball_integral: bad parameters");

    const double g2 = gamma * gamma;
    const double cp = params.p / (2.0 * std::pow(4.0 * M_PI, params.p / 2.0));
    const double lam_term = 4.0 / gamma * cp * params.lambda * std::exp(-g2);

    // state: (w, w', I) with dI/ds = 8 pi gamma^-2 s V^2 e^{V^2 - gamma^2}
    using state = std::array<double, 3>;
    auto rhs = [&](const state& y, state& dy, double s) {
        double w = y[0];
        double V = gamma - w / gamma;
        double bubble = 4.0 * (1.0 - w / g2) * std::exp(-2.0 * w + w * w / g2);
        dy[0] = y[1];
        dy[1] = bubble - lam_term * std::pow(std::abs(V), params.p - 1.0) - y[1] / s;
        dy[2] = 8.0 * M_PI / g2 * s * V * V * std::exp(-2.0 * w + w * w / g2);
    };

    const double s_start = 1e-3;
    const double F0 = 4.0 - 4.0 * cp * params.lambda * std::pow(gamma, params.p - 2.0) * std::exp(-g2);
    state y = {F0 * s_start * s_start / 4.0, F0 * s_start / 2.0,
               4.0 * M_PI * s_start * s_start};  // dI/ds ~ 8 pi s near 0
    double s_end = std::sqrt(std::expm1(delta * g2));

    namespace ode = boost::numeric::odeint;
    auto stepper = ode::make_controlled(opts.abs_tol, opts.rel_tol,
                                        ode::runge_kutta_dopri5<state>());
    try {
        ode::integrate_adaptive(stepper, rhs, y, s_start, s_end, 1e-3);
    } catch (const std::exception& e) {
        throw Error(std::string("exponential_ball_integral: integration failed (") + e.what() +
                    ")");
    }
    return y[2];
}

ExpansionStats expansion_error(const RadialProfile& prof) {
    if (prof.t.empty()) throw DomainError("expansion_error: empty profile");
    if (prof.sign_change) throw DomainError("expansion_error: profile has a sign change");
    ExpansionStats st;
    const double g = prof.gamma;
    for (size_t i = 0; i < prof.t.size(); ++i) {
        double s = std::sqrt(std::expm1(prof.t[i]));
        double expansion = g - prof.t[i] / g + s0_profile(s) / (g * g * g);
        double e = std::abs(prof.V[i] - expansion);
        st.err.push_back(e);
        st.raw_sup = std::max(st.raw_sup, e);
        st.scaled_sup = std::max(st.scaled_sup, e * std::pow(g, 5) / (1.0 + prof.t[i]));
    }
    return st;
}

}  // namespace tmx

#include <doctest.h>

#include "massflow/gn.hpp"
#include "massflow/random_fields.hpp"
#include "massflow/shooting.hpp"

#include <cmath>

using namespace massflow;

namespace {
constexpr double kPi = 3.14159265358979323846;

double sech_power_integral(double s) { // int_R sech^s(y) dy
    return std::sqrt(kPi) * std::tgamma(s / 2) / std::tgamma((s + 1) / 2);
}

// closed-form oracle for the 1D constant via Gamma functions
double gn_oracle_1d(double p) {
    const double amp = std::pow(p / 2.0, 1.0 / (p - 2.0));
    const double a = (p - 2.0) / 2.0, e = 2.0 / (p - 2.0);
    const double Q2 = amp * amp * sech_power_integral(2 * e) / a;
    const double Qp = std::pow(amp, p) * sech_power_integral(p * e) / a;
    const double Qd2 = (0.5 - 1.0 / p) * Qp; // 1D Pohozaev
    const double g = 0.5 - 1.0 / p;
    return std::pow(Qp, 1.0 / p) / (std::pow(Qd2, g / 2) * std::pow(Q2, (1 - g) / 2));
}
} // namespace

TEST_CASE("exponent data") {
    auto e1 = exponents(3.0, 1);
    CHECK(e1.gamma_p == doctest::Approx(1.0 / 6));
    CHECK(e1.p_c == doctest::Approx(6.0));
    CHECK(e1.regime == Regime::subcritical);

    auto e2 = exponents(4.0, 2);
    CHECK(e2.gamma_p == doctest::Approx(0.5));
    CHECK(e2.p * e2.gamma_p == doctest::Approx(2.0));
    CHECK(e2.regime == Regime::critical);

    auto e3 = exponents(7.0, 1);
    CHECK(e3.gamma_p == doctest::Approx(5.0 / 14));
    CHECK(e3.p * e3.gamma_p > 2.0);
    CHECK(e3.regime == Regime::supercritical);

    CHECK_THROWS(exponents(2.0, 1));
    CHECK_THROWS(exponents(6.0, 3)); // 2* = 6 for N = 3
    CHECK(exponents(5.0, 1).gamma_p < 1.0);
}

TEST_CASE("1D soliton satisfies its equation") {
    const SolitonData& Q = ground_soliton(3.0, 1);
    // -Q'' + Q = Q^2 with the symbolic second derivative of A sech^e(a x):
    // Q'' = A e a^2 sech^e(ax) (e tanh^2(ax) - sech^2(ax))
    const double A = 1.5, a = 0.5, e = 2.0;
    for (double x : {0.0, 0.5, 1.3, 3.7}) {
        const double sech = 1.0 / std::cosh(a * x), th = std::tanh(a * x);
        const double q = A * std::pow(sech, e);
        const double qpp = A * e * a * a * std::pow(sech, e) * (e * th * th - sech * sech);
        CHECK(std::abs(q - Q.profile(x)) < 1e-12);
        const double res = -qpp + q - q * q;
        CHECK(std::abs(res) < 1e-10);
    }
    CHECK(Q.pohozaev_residual < 1e-10);
}

TEST_CASE("sharp constants against the Gamma-function oracle") {
    CHECK(std::abs(gn_constant(3.0, 1) - gn_oracle_1d(3.0)) < 1e-9);
    CHECK(std::abs(gn_constant(6.0, 1) - gn_oracle_1d(6.0)) < 1e-9);
    CHECK(std::abs(gn_constant(7.0, 1) - gn_oracle_1d(7.0)) < 1e-9);
    // p = 6 profile is 3^{1/4} sech^{1/2}(2x)
    const SolitonData& Q6 = ground_soliton(6.0, 1);
    CHECK(Q6.center_value == doctest::Approx(std::pow(3.0, 0.25)).epsilon(1e-12));
}

TEST_CASE("2D constant against the large-ball shooter oracle") {
    // ball of radius 30 at lambda = 1 is B_1 at lambda = 900 after rescaling
    ShootOptions so;
    so.n_grid = 4096;
    ShootResult s = shoot(900.0, 1.0, 4.0, 2, so);
    Field prof = rescale_to_soliton_frame(s, 8192);
    const double g = 2 * (0.5 - 0.25);
    const double C_shoot = std::pow(prof.lp(4.0), 0.25) /
                           (std::pow(prof.dirichlet(), g / 2) * std::pow(prof.mass(), (1 - g) / 2));
    CHECK(std::abs(C_shoot - gn_constant(4.0, 2)) / gn_constant(4.0, 2) < 2e-3);
    // Townes mass: at criticality mu_bar equals the soliton mass
    CHECK(mu_bar(2) == doctest::Approx(ground_soliton(4.0, 2).mass).epsilon(1e-6));
    CHECK(mu_bar(2) == doctest::Approx(11.7009).epsilon(1e-3));
}

TEST_CASE("mu_bar in one dimension") {
    CHECK(mu_bar(1) == doctest::Approx(std::sqrt(3.0) * kPi / 2).epsilon(1e-10));
    // coefficient 1/2 - (1/p) C^p mu^{(p-2)/2} is positive below and zero at mu_bar
    const double C = gn_constant(6.0, 1);
    auto coef = [&](double mu) { return 0.5 - std::pow(C, 6.0) / 6.0 * mu * mu; };
    CHECK(coef(0.5 * mu_bar(1)) > 0);
    CHECK(std::abs(coef(mu_bar(1))) < 1e-12);
}

TEST_CASE("theta window and its maximizer") {
    const double p = 7.0;
    const int N = 1;
    const double lam2 = kPi * kPi;
    auto th = theta_set_and_rho(0.5, 2, p, N, lam2);
    const double g = N * (0.5 - 1.0 / p);
    const double C = gn_constant(p, N);
    auto f = [&](double mu, double rho) {
        return 0.5 * rho - std::pow(C, p) / p * std::pow(mu, p * (1 - g) / 2) * std::pow(rho, p * g / 2);
    };
    // stationarity at rho_mu and the closed-form value of the maximum
    const double h = 1e-6 * th.rho_mu;
    const double fp = (f(0.5, th.rho_mu + h) - f(0.5, th.rho_mu - h)) / (2 * h);
    CHECK(std::abs(fp) < 1e-9);
    CHECK(std::abs(f(0.5, th.rho_mu) - (0.5 - 1.0 / (p * g)) * th.rho_mu) < 1e-12 * th.f_max);
    // power law under mu -> mu/2
    auto th2 = theta_set_and_rho(0.25, 2, p, N, lam2);
    const double expect = std::pow(2.0, p * (1 - g) / (p * g - 2));
    CHECK(th2.f_max / th.f_max == doctest::Approx(expect).epsilon(1e-10));
    CHECK_THROWS(theta_set_and_rho(0.5, 2, 3.0, 1, lam2)); // not supercritical
}

TEST_CASE("mu2 threshold by bisection matches the scalar oracle") {
    const double p = 7.0, lam2 = kPi * kPi;
    const double mu2 = mu2_threshold(p, 1, lam2);
    // independent scalar oracle: bisection directly on the Theta condition
    const double g = 0.5 - 1.0 / p, C = gn_constant(p, 1);
    auto nonempty = [&](double mu) {
        // maximize rho - lam2 mu - (2/p) C^p mu^{...} rho^{pg/2} over a rho scan
        double best = -1e300;
        for (int i = 0; i <= 4000; ++i) {
            const double rho = 1e-2 * std::pow(1e8, i / 4000.0);
            best = std::max(best, rho - lam2 * mu -
                                      2.0 / p * std::pow(C, p) * std::pow(mu, p * (1 - g) / 2) *
                                          std::pow(rho, p * g / 2));
        }
        return best > 0;
    };
    double lo = 0.1, hi = 10.0;
    for (int it = 0; it < 60; ++it) {
        double mid = 0.5 * (lo + hi);
        (nonempty(mid) ? lo : hi) = mid;
    }
    CHECK(mu2 == doctest::Approx(0.5 * (lo + hi)).epsilon(1e-6));
    CHECK(theta_set_and_rho(0.95 * mu2, 2, p, 1, lam2).nonempty);
    CHECK(!theta_set_and_rho(1.05 * mu2, 2, p, 1, lam2).nonempty);
    // equality case at mu2: the best margin vanishes
    CHECK(std::abs(theta_set_and_rho(mu2, 2, p, 1, lam2).margin) < 1e-8 * lam2 * mu2);
    // monotone dependence on lambda_2
    CHECK(mu2_threshold(p, 1, 1.2 * lam2) < mu2);
}

TEST_CASE("discrete Gagliardo-Nirenberg inequality on random fields") {
    struct Case { double p; int N; };
    for (auto [p, N] : {Case{3.0, 1}, Case{4.0, 2}}) {
        DomainPtr dom = (N == 1) ? build_interval(0.0, 1.0, 1024) : build_ball(N, 1.0, 1024);
        FieldSampler sampler(dom, 12, 1234 + N);
        const double C = gn_constant(p, N);
        const double g = N * (0.5 - 1.0 / p);
        for (int s = 0; s < 500; ++s) {
            auto v = sampler.smooth(1.0);
            const double lhs = std::pow(lp_of(*dom, v, p), 1.0 / p);
            const double rhs = C * (1.0 + 1e-6) * std::pow(dirichlet_of(*dom, v), g / 2);
            CHECK(lhs <= rhs);
        }
    }
}

TEST_CASE("domain Sobolev constant dominates random quotients") {
    auto dom = build_interval(0.0, 1.0, 512);
    const double p = 3.0;
    const double S = sobolev_constant(dom, p);
    FieldSampler sampler(dom, 12, 5);
    for (int s = 0; s < 100; ++s) {
        auto v = sampler.smooth(1.0);
        const double q = std::pow(lp_of(*dom, v, p), 1.0 / p) / std::sqrt(dirichlet_of(*dom, v));
        CHECK(q <= S * (1.0 + 1e-8));
    }
}

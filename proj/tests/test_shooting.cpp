#include <doctest.h>

#include "massflow/gn.hpp"
#include "massflow/shooting.hpp"
#include "massflow/spectral.hpp"

#include <cmath>

using namespace massflow;

namespace {
constexpr double kPi = 3.14159265358979323846;

// independent mini-integrator for the uniqueness-surrogate scan: classical
// RK4 on the radial IVP, reporting whether the first zero lands before r = 1
bool zero_before_one_rk4(double a, double lambda, double tau, double p, int N) {
    double r = 0, u = a, v = 0;
    const double h = 2.5e-4 / std::sqrt(std::max(1.0, std::abs(lambda)));
    auto acc = [&](double rr, double uu, double vv) {
        const double g = lambda * uu - tau * std::pow(std::abs(uu), p - 2) * uu;
        return (rr < 1e-12) ? g / N : (-(N - 1) / rr * vv + g);
    };
    while (r < 1.0) {
        const double k1u = v, k1v = acc(r, u, v);
        const double k2u = v + h / 2 * k1v, k2v = acc(r + h / 2, u + h / 2 * k1u, v + h / 2 * k1v);
        const double k3u = v + h / 2 * k2v, k3v = acc(r + h / 2, u + h / 2 * k2u, v + h / 2 * k2v);
        const double k4u = v + h * k3v, k4v = acc(r + h, u + h * k3u, v + h * k3v);
        u += h / 6 * (k1u + 2 * k2u + 2 * k3u + k4u);
        v += h / 6 * (k1v + 2 * k2v + 2 * k3v + k4v);
        r += h;
        if (u <= 0) return true;
    }
    return false;
}
} // namespace

TEST_CASE("shoot basics: boundary, positivity, residual") {
    ShootResult s = shoot(3.0, 1.0, 7.0, 1);
    CHECK(s.positive);
    CHECK(s.ode_residual < 1e-9);
    CHECK(std::abs(s.u.values().back()) < 10.0 * s.u.linf() * s.u.domain().h); // O(h) next to the wall
    CHECK(s.center_value > 0);
    CHECK(s.mass > 0);
    CHECK_THROWS(shoot(-10.0, 1.0, 7.0, 1)); // below -lambda_1
}

TEST_CASE("tau-scaling symmetry is inherited by the discrete solutions") {
    const double p = 7.0;
    ShootResult a = shoot(5.0, 1.0, p, 1);
    ShootResult b = shoot(5.0, 0.5, p, 1);
    const double factor = std::pow(0.5, -1.0 / (p - 2.0));
    for (int i = 0; i < a.u.domain().n_grid; i += 37)
        CHECK(b.u.values()[i] == doctest::Approx(factor * a.u.values()[i]).epsilon(1e-9));
    CHECK(b.mass == doctest::Approx(factor * factor * a.mass).epsilon(1e-9));
}

TEST_CASE("large-lambda profiles converge to the sech soliton") {
    const double p = 3.0, lam = 100.0;
    ShootResult s = shoot(lam, 1.0, p, 1);
    const SolitonData& Q = ground_soliton(p, 1);
    // compare u(r) against lam^{1/(p-2)} Q(sqrt(lam) r)
    double worst = 0;
    const double amp = std::pow(lam, 1.0 / (p - 2.0));
    const Domain& d = s.u.domain();
    for (int i = 0; i < d.n_grid; i += 11) {
        const double expect = amp * Q.profile(std::sqrt(lam) * d.x[i]);
        worst = std::max(worst, std::abs(s.u.values()[i] - expect));
    }
    CHECK(worst < 1e-3 * amp);
}

TEST_CASE("bifurcation end: the normalized profile approaches phi_1") {
    auto dom = build_ball(1, 1.0, 2048);
    auto spec = dirichlet_eigenpairs(dom, 1);
    const double lam = -0.995 * spec.lambda[0];
    ShootResult s = shoot(lam, 1.0, 3.0, 1, {2048, 2500});
    // L2 distance of u/|u|_2 to phi_1
    std::vector<double> un = s.u.values();
    normalize_mass(*dom, un, 1.0);
    double d2 = 0;
    for (int i = 0; i < dom->n_grid; ++i) {
        const double diff = un[i] - spec.phi[0][i];
        d2 += dom->quad_w[i] * diff * diff;
    }
    CHECK(std::sqrt(d2) < 0.05);
}

TEST_CASE("mass curve shapes per regime") {
    // supercritical: vanishing ends, single interior maximum on the grid
    auto grid7 = default_lambda_grid(7.0, 1, 1500.0, 28);
    MassCurve c7 = mass_curve(1.0, 7.0, 1, grid7);
    REQUIRE(c7.M_values.size() >= 20);
    const double mx = *std::max_element(c7.M_values.begin(), c7.M_values.end());
    CHECK(c7.M_values.front() < 0.25 * mx);
    CHECK(c7.M_values.back() < 0.8 * mx);
    int local_max = 0;
    for (std::size_t i = 1; i + 1 < c7.M_values.size(); ++i)
        if (c7.M_values[i] > c7.M_values[i - 1] && c7.M_values[i] > c7.M_values[i + 1]) ++local_max;
    CHECK(local_max == 1);
    // finite-difference derivative signs at the ends (Lemma 4.1 surrogate)
    CHECK(c7.M_values[1] > c7.M_values[0]);
    CHECK(c7.M_values.back() < c7.M_values[c7.M_values.size() - 2]); // 1/(p-2) - N/4 < 0

    // subcritical: strictly increasing and large at the right end
    auto grid3 = default_lambda_grid(3.0, 1, 300.0, 18);
    MassCurve c3 = mass_curve(1.0, 3.0, 1, grid3);
    for (std::size_t i = 1; i < c3.M_values.size(); ++i) CHECK(c3.M_values[i] > c3.M_values[i - 1]);
    CHECK(c3.M_values.back() > 10.0);

    // soliton-mass asymptote
    const double tail = std::pow(c7.lambda_samples.back(), 0.1) * c7.M_values.back();
    CHECK(std::abs(tail - ground_soliton(7.0, 1).mass) / ground_soliton(7.0, 1).mass < 0.05);
}

TEST_CASE("two positive solutions: counts, masses, ordering") {
    const double p = 7.0;
    MassCurve probe = mass_curve(1.0, p, 1, default_lambda_grid(p, 1, 1500.0, 24));
    const double maxM = *std::max_element(probe.M_values.begin(), probe.M_values.end());

    TwoSolutions ts = find_two_positive(0.5 * maxM, 1.0, p, 1);
    CHECK(ts.ok);
    CHECK(ts.count_verified == 2);
    CHECK(ts.u_low.lambda < ts.u_high.lambda);
    CHECK(std::abs(ts.u_low.mass - 0.5 * maxM) < 1e-8 * maxM);
    if (!ts.u_high.extended) CHECK(std::abs(ts.u_high.mass - 0.5 * maxM) < 1e-8 * maxM);
    CHECK(ts.u_low.positive);

    TwoSolutions none = find_two_positive(1.5 * maxM, 1.0, p, 1);
    CHECK(!none.ok);
    CHECK(none.count_verified < 2);
}

TEST_CASE("uniqueness surrogate: one sign change of the boundary-hit predicate") {
    // independent RK4 scan over the center-value bracket
    for (double lam : {-1.0, 0.0, 2.0, 8.0, 20.0}) {
        int flips = 0;
        bool prev = zero_before_one_rk4(1e-3, lam, 1.0, 7.0, 1);
        CHECK(!prev); // tiny amplitude never hits zero inside
        for (int j = 1; j <= 40; ++j) {
            const double a = 1e-3 * std::pow(1e4, j / 40.0);
            const bool cur = zero_before_one_rk4(a, lam, 1.0, 7.0, 1);
            if (cur != prev) ++flips;
            prev = cur;
        }
        CHECK(flips == 1);
    }
}

TEST_CASE("pohozaev identity checks") {
    // closed-form sech profile on a large 1D ball
    const SolitonData& Q = ground_soliton(3.0, 1);
    auto big = build_ball(1, 40.0, 16384);
    std::vector<double> v(big->n_grid);
    for (int i = 0; i < big->n_grid; ++i) v[i] = Q.profile(big->x[i]);
    Field prof(big, std::move(v));
    CHECK(pohozaev_check(prof, 3.0) < 1e-8);
    // equivalent form int |grad V|^2 = (1/2 - 1/p) N int |V|^p
    CHECK(std::abs(prof.dirichlet() - (0.5 - 1.0 / 3.0) * prof.lp(3.0)) < 1e-4 * prof.lp(3.0));

    // negative control: a compactly supported non-solution
    std::vector<double> bad(big->n_grid, 0.0);
    for (int i = 0; i < big->n_grid; ++i) {
        const double z = (big->x[i] - 5.0) / 2.0;
        if (std::abs(z) < 1) bad[i] = 0.1 * std::exp(-1.0 / (1 - z * z));
    }
    CHECK(pohozaev_check(Field(big, std::move(bad)), 3.0) > 1.0);

    // a profile that has not decayed is rejected
    std::vector<double> flat(big->n_grid, 1.0);
    CHECK_THROWS(pohozaev_check(Field(big, std::move(flat)), 3.0));
}

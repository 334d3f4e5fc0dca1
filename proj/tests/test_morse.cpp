#include <doctest.h>

#include "massflow/flow.hpp"
#include "massflow/morse.hpp"
#include "massflow/random_fields.hpp"
#include "massflow/shooting.hpp"
#include "massflow/spectral.hpp"

#include <cmath>

using namespace massflow;

namespace {
// polished ground state on (0,1) at small mass
NewtonResult ground_state(const DomainPtr& dom, double mu, double p) {
    auto spec = dirichlet_eigenpairs(dom, 2);
    OperatorConfig cfg;
    cfg.mu = mu;
    cfg.p = p;
    cfg.lambda_bar = 0.0;
    ConstrainedOperator op(dom, cfg);
    std::vector<double> u0(dom->n_grid);
    for (int i = 0; i < dom->n_grid; ++i) u0[i] = std::sqrt(mu) * spec.phi[0][i];
    FlowConfig fc;
    fc.max_steps = 20000;
    auto [tr, term] = run_flow(Field(dom, u0), op, fc);
    const double lam_guess = (term.lp(p) - term.dirichlet()) / mu;
    return newton_polish(term, lam_guess, mu, 1.0, p);
}
} // namespace

TEST_CASE("ground state has Morse index 1 and constrained index 0") {
    auto dom = build_interval(0.0, 1.0, 512);
    NewtonResult nr = ground_state(dom, 1e-3, 3.0);
    REQUIRE(nr.converged);
    LinearizationSpectrum ls = morse_index(nr.u, nr.lambda, 1.0, 3.0);
    CHECK(ls.morse_index == 1);
    CHECK(ls.constrained_index == 0);
    CHECK(ls.eigvals.front() < 0);
    CHECK(ls.eigvals[1] > 0);
    // definitional interlacing
    CHECK(ls.constrained_index <= ls.morse_index);
    CHECK(ls.morse_index <= ls.constrained_index + 1);
}

TEST_CASE("non-solutions are rejected by the precondition") {
    auto dom = build_interval(0.0, 1.0, 512);
    NewtonResult nr = ground_state(dom, 1e-3, 3.0);
    REQUIRE(nr.converged);
    std::vector<double> scaled = nr.u.values();
    for (auto& x : scaled) x *= 1.5;
    CHECK_THROWS(morse_index(Field(dom, scaled), nr.lambda, 1.0, 3.0));
}

TEST_CASE("large theta suppresses every direction") {
    auto dom = build_interval(0.0, 1.0, 512);
    NewtonResult nr = ground_state(dom, 1e-3, 3.0);
    REQUIRE(nr.converged);
    LinearizationSpectrum ls = morse_index(nr.u, nr.lambda, 1.0, 3.0);
    const double big = 2.0 * std::abs(ls.eigvals.front()) + 1.0;
    CHECK(constrained_index(nr.u, nr.lambda, 1.0, 3.0, big) == 0);
}

TEST_CASE("high-branch positive solutions keep radial index 1, stable under refinement") {
    const double p = 7.0;
    for (double lam : {50.0, 200.0}) {
        ShootResult s = shoot(lam, 1.0, p, 1, {2048, 2500});
        LinearizationSpectrum ls = morse_index(s.u, s.lambda, 1.0, p);
        CHECK(ls.morse_index == 1);
        ShootResult s2 = shoot(lam, 1.0, p, 1, {4096, 2500});
        LinearizationSpectrum ls2 = morse_index(s2.u, s2.lambda, 1.0, p);
        CHECK(ls2.morse_index == ls.morse_index);
        CHECK(ls2.constrained_index == ls.constrained_index);
    }
}

TEST_CASE("bordered-inertia count against a dense projection oracle on a coarse grid") {
    // oracle: count negative eigenvalues of the quadratic form restricted to
    // u-perp by explicitly projecting onto an orthogonal complement basis
    auto dom = build_interval(0.0, 1.0, 64);
    // need a genuine small solution: flow + polish at small mass
    NewtonResult nr = ground_state(dom, 1e-2, 3.0);
    REQUIRE(nr.converged);
    const int n = dom->n_grid;
    const auto& u = nr.u.values();
    // dense form matrix Qij in the M^{-1/2} coordinates
    std::vector<std::vector<double>> Q(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i) {
        Q[i][i] = dom->stiffness.d[i] +
                  dom->quad_w[i] * (nr.lambda - 2.0 * std::abs(u[i]));
        if (i + 1 < n) Q[i][i + 1] = Q[i + 1][i] = dom->stiffness.e[i];
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) Q[i][j] /= std::sqrt(dom->quad_w[i] * dom->quad_w[j]);
    // unit constraint vector in the same coordinates
    std::vector<double> c(n);
    double cn = 0;
    for (int i = 0; i < n; ++i) {
        c[i] = std::sqrt(dom->quad_w[i]) * u[i];
        cn += c[i] * c[i];
    }
    for (auto& x : c) x /= std::sqrt(cn);
    // Householder basis of c-perp: H = I - 2 v v^T with v ~ c - e1
    std::vector<double> v = c;
    v[0] -= 1.0;
    double vn = 0;
    for (double x : v) vn += x * x;
    // columns 2..n of H span c-perp
    std::vector<std::vector<double>> P(n, std::vector<double>(n - 1, 0.0));
    for (int col = 1; col < n; ++col)
        for (int row = 0; row < n; ++row)
            P[row][col - 1] = (row == col ? 1.0 : 0.0) - 2.0 * v[row] * v[col] / vn;
    // restricted matrix R = P^T Q P, then count negatives by Jacobi sweeps
    std::vector<std::vector<double>> R(n - 1, std::vector<double>(n - 1, 0.0));
    for (int a = 0; a < n - 1; ++a)
        for (int b = 0; b < n - 1; ++b) {
            double s = 0;
            for (int i = 0; i < n; ++i) {
                double qi = 0;
                for (int j = 0; j < n; ++j) qi += Q[i][j] * P[j][b];
                s += P[i][a] * qi;
            }
            R[a][b] = s;
        }
    for (int sweep = 0; sweep < 60; ++sweep) {
        for (int i = 0; i < n - 1; ++i)
            for (int j = i + 1; j < n - 1; ++j) {
                if (std::abs(R[i][j]) < 1e-13) continue;
                const double th = 0.5 * std::atan2(2 * R[i][j], R[j][j] - R[i][i]);
                const double cth = std::cos(th), sth = std::sin(th);
                for (int l = 0; l < n - 1; ++l) {
                    const double a = R[i][l], b = R[j][l];
                    R[i][l] = cth * a - sth * b;
                    R[j][l] = sth * a + cth * b;
                }
                for (int l = 0; l < n - 1; ++l) {
                    const double a = R[l][i], b = R[l][j];
                    R[l][i] = cth * a - sth * b;
                    R[l][j] = sth * a + cth * b;
                }
            }
    }
    int oracle = 0;
    for (int i = 0; i < n - 1; ++i)
        if (R[i][i] < 0) ++oracle;
    CHECK(constrained_index(nr.u, nr.lambda, 1.0, 3.0, 0.0) == oracle);
}

TEST_CASE("synthetic potentials force many negative directions") {
    // -Lap + lambda with lambda < -lambda_K has at least K negative directions
    auto dom = build_interval(0.0, 1.0, 256);
    auto spec = dirichlet_eigenpairs(dom, 5);
    for (int K : {2, 4}) {
        SymTridiag T = dom->stiffness;
        const double lam = -1.01 * spec.lambda[K - 1];
        for (int i = 0; i < dom->n_grid; ++i) T.d[i] += lam * dom->quad_w[i];
        CHECK(sturm_count_below(T, dom->quad_w, 0.0) >= K);
    }
}

TEST_CASE("multiplier-energy bridge classifies both regimes") {
    // supercritical high branch: E ~ lambda^{p/(p-2) - N/2}
    const double p = 7.0;
    std::vector<BridgePoint> fam;
    for (double lam : {50.0, 100.0, 200.0, 400.0, 800.0, 1600.0}) {
        ShootResult s = shoot(lam, 1.0, p, 1);
        fam.push_back({s.lambda, s.energy, s.u.linf(), s.mass});
    }
    BridgeReport rep = multiplier_energy_bridge(fam, p, 1);
    CHECK(rep.cls == BridgeClass::supercritical_blowup);
    CHECK(std::abs(rep.fitted_exponent - rep.expected_exponent) / rep.expected_exponent < 0.05);
    // L-infinity bridge: |u|_inf ~ lambda^{1/(p-2)}
    CHECK(rep.linf_lambda_correlation == doctest::Approx(1.0 / (p - 2.0)).epsilon(0.2));

    // subcritical branch: lambda -> inf with E -> -inf
    std::vector<BridgePoint> fam3;
    for (double lam : {20.0, 40.0, 80.0, 160.0, 320.0}) {
        ShootResult s = shoot(lam, 1.0, 3.0, 1);
        fam3.push_back({s.lambda, s.energy, s.u.linf(), s.mass});
    }
    BridgeReport rep3 = multiplier_energy_bridge(fam3, 3.0, 1);
    CHECK(rep3.cls == BridgeClass::subcritical_blowup);
    CHECK(fam3.back().energy < 0);
}

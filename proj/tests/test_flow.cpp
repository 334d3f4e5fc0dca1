#include <doctest.h>

#include "massflow/flow.hpp"
#include "massflow/random_fields.hpp"
#include "massflow/shooting.hpp"

#include <cmath>

using namespace massflow;

namespace {
ConstrainedOperator make_op(const DomainPtr& dom, double mu, double p, double rho) {
    OperatorConfig cfg;
    cfg.mu = mu;
    cfg.p = p;
    cfg.rho = rho;
    cfg.lambda_bar = select_lambda_bar(rho, mu, p, dom);
    return ConstrainedOperator(dom, cfg);
}
} // namespace

TEST_CASE("flow step: descent, mass conservation, stop at critical points") {
    auto dom = build_interval(0.0, 1.0, 512);
    const double mu = 1.0, p = 3.0;
    auto op = make_op(dom, mu, p, 50.0);
    FieldSampler sampler(dom, 10, 41);
    FlowConfig cfg;
    cfg.tol_pg = 1e-10;
    int descents = 0;
    for (int t = 0; t < 1000; ++t) {
        auto u = sampler.in_ball(mu, 50.0);
        double E = energy_of(*dom, u, 1.0, p);
        double dt = 0.02;
        const double E0 = E;
        const double used = flow_step(*dom, op, cfg, u, E, dt);
        if (used > 0) {
            CHECK(E <= E0);
            CHECK(std::abs(mass_of(*dom, u) - mu) <= 1e-13 * mu);
            ++descents;
        }
    }
    CHECK(descents == 1000);
}

TEST_CASE("flow from the ground mode lands on the shooter low branch") {
    auto dom = build_ball(1, 1.0, 1024);
    auto spec = dirichlet_eigenpairs(dom, 2);
    const double mu = 0.05, p = 3.0;
    auto op = make_op(dom, mu, p, 4.0 * spec.lambda[0] * mu);
    std::vector<double> u0(dom->n_grid);
    for (int i = 0; i < dom->n_grid; ++i) u0[i] = std::sqrt(mu) * spec.phi[0][i];
    FlowConfig cfg;
    cfg.max_steps = 20000;
    auto [tr, term] = run_flow(Field(dom, u0), op, cfg);
    CHECK(tr.converged);
    const double lam_guess = (term.lp(p) - term.dirichlet()) / mu;
    NewtonResult nr = newton_polish(term, lam_guess, mu, 1.0, p);
    CHECK(nr.converged);
    // independent oracle: bisection on the shooter mass curve
    double lo = -0.99 * spec.lambda[0], hi = 50.0;
    for (int it = 0; it < 50; ++it) {
        const double mid = 0.5 * (lo + hi);
        (shoot(mid, 1.0, p, 1, {1024, 2500}).mass < mu ? lo : hi) = mid;
    }
    CHECK(nr.lambda == doctest::Approx(0.5 * (lo + hi)).epsilon(1e-4));
    CHECK(nr.lambda < 0); // near -lambda_1 for small mu
    double umin = 1e300;
    for (double x : nr.u.values()) umin = std::min(umin, x);
    CHECK(umin > -1e-10 * nr.u.linf());
}

TEST_CASE("flow equivariance is exact") {
    auto dom = build_interval(0.0, 1.0, 256);
    const double mu = 1.0, p = 3.0;
    auto op = make_op(dom, mu, p, 30.0);
    FieldSampler sampler(dom, 10, 43);
    auto u0 = sampler.smooth(mu);
    auto u0n = u0;
    for (auto& x : u0n) x = -x;
    FlowConfig cfg;
    cfg.max_steps = 300;
    cfg.tol_pg = 1e-12;
    auto [t1, a] = run_flow(Field(dom, u0), op, cfg);
    auto [t2, b] = run_flow(Field(dom, u0n), op, cfg);
    for (int i = 0; i < dom->n_grid; ++i) CHECK(a.values()[i] == -b.values()[i]);
}

TEST_CASE("cone invariance along trajectories started in P_delta") {
    auto dom = build_interval(0.0, 1.0, 256);
    const double mu = 1.0, p = 3.0, rho = 30.0;
    OperatorConfig ocfg;
    ocfg.mu = mu;
    ocfg.p = p;
    ocfg.rho = rho;
    ocfg.lambda_bar = select_lambda_bar(rho, mu, p, dom);
    FieldSampler sampler(dom, 12, 47);
    DeltaProbe pr = delta_hat_probe(rho, mu, ocfg, 6, sampler);
    REQUIRE(pr.ok);
    const double delta = 0.5 * std::min(std::sqrt(lambda1(dom) * mu / 2.0), pr.delta_hat);
    ConstrainedOperator op(dom, ocfg);
    FlowConfig cfg;
    cfg.delta = delta;
    cfg.max_steps = 5000;
    cfg.tol_pg = 1e-6;
    for (int t = 0; t < 10; ++t) {
        auto u0 = sampler.near_cone(mu, rho, delta);
        auto [tr, term] = run_flow(Field(dom, u0), op, cfg);
        CHECK(tr.max_cone_excess <= 1e-6 * delta);
        CHECK(tr.max_mass_err <= 1e-10 * mu);
        CHECK(tr.max_energy_increase <= 0.0);
    }
}

TEST_CASE("newton polish: exact solution, perturbation, multiplier identity") {
    auto dom = build_ball(1, 1.0, 1024);
    const double p = 3.0;
    ShootResult s = shoot(1.0, 1.0, p, 1, {1024, 2500});
    const double mu = s.mass;

    NewtonResult n0 = newton_polish(s.u, s.lambda, mu, 1.0, p);
    CHECK(n0.converged);
    CHECK(n0.iterations <= 1);
    CHECK(n0.residual < 1e-13 * (1.0 + std::sqrt(n0.u.dirichlet())));

    // 1e-3 perturbation converges in a handful of steps
    FieldSampler sampler(dom, 8, 53);
    auto pert = sampler.smooth(1.0);
    std::vector<double> up = s.u.values();
    for (int i = 0; i < dom->n_grid; ++i) up[i] += 1e-3 * pert[i];
    NewtonResult n1 = newton_polish(Field(dom, up), s.lambda * 1.001, mu, 1.0, p);
    CHECK(n1.converged);
    CHECK(n1.iterations <= 6);
    // lambda matches the multiplier formula at the solution
    const double lam_u = (n1.u.lp(p) - n1.u.dirichlet()) / mu;
    CHECK(std::abs(n1.lambda - lam_u) < 1e-10 * (1.0 + std::abs(n1.lambda)));
    CHECK(std::abs(n1.u.mass() - mu) < 1e-12 * mu);
}

TEST_CASE("trace tail is Cauchy when the flow converges") {
    auto dom = build_interval(0.0, 1.0, 256);
    const double mu = 1.0, p = 3.0;
    auto op = make_op(dom, mu, p, 30.0);
    FieldSampler sampler(dom, 10, 59);
    FlowConfig cfg;
    cfg.max_steps = 20000;
    cfg.trace_stride = 1;
    auto u0 = sampler.in_ball(mu, 30.0);

    // rerun the flow manually keeping the last iterates
    std::vector<std::vector<double>> tail;
    std::vector<double> u = u0;
    double E = energy_of(*dom, u, 1.0, p), dt = 0.02;
    std::vector<double> V;
    for (long k = 0; k < cfg.max_steps; ++k) {
        if (flow_step(*dom, op, cfg, u, E, dt) == 0.0) break;
        tail.push_back(u);
        if (tail.size() > 10) tail.erase(tail.begin());
        if (op.pseudogradient(u, V) <= 1e-9) break;
    }
    REQUIRE(tail.size() == 10);
    double worst = 0;
    for (std::size_t i = 0; i < tail.size(); ++i)
        for (std::size_t j = i + 1; j < tail.size(); ++j) {
            std::vector<double> diff(dom->n_grid);
            for (int l = 0; l < dom->n_grid; ++l) diff[l] = tail[i][l] - tail[j][l];
            worst = std::max(worst, std::sqrt(dirichlet_of(*dom, diff)));
        }
    CHECK(worst < 1e-3 * std::sqrt(mu));
}

TEST_CASE("ps_localize selection rule") {
    auto dom = build_interval(0.0, 1.0, 256);
    auto spec = dirichlet_eigenpairs(dom, 3);
    const double mu = 1.0, p = 3.0;
    auto op = make_op(dom, mu, p, 50.0);
    const double delta = 0.4 * std::sqrt(spec.lambda[0] * mu / 2.0);

    // a path entirely inside the positive cone neighborhood -> empty
    std::vector<Field> inside;
    for (int t = 0; t < 5; ++t) {
        std::vector<double> v(dom->n_grid);
        for (int i = 0; i < dom->n_grid; ++i)
            v[i] = std::sqrt(mu) * std::abs(spec.phi[0][i]) * (1.0 + 0.01 * t);
        normalize_mass(*dom, v, mu);
        inside.emplace_back(dom, v);
    }
    const double E0 = inside[0].energy(1.0, p);
    CHECK(ps_localize(inside, {E0 - 10, E0 + 10}, delta, op).empty());

    // one sign-changing point inside the band is returned first
    std::vector<Field> path = inside;
    std::vector<double> v2(dom->n_grid);
    for (int i = 0; i < dom->n_grid; ++i) v2[i] = std::sqrt(mu) * spec.phi[1][i];
    path.emplace_back(dom, v2);
    auto picks = ps_localize(path, {-1e9, 1e9}, delta, op);
    REQUIRE(!picks.empty());
    CHECK(picks.front() == path.size() - 1);
}

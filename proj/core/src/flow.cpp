#include "massflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace massflow {

double flow_step(const Domain& d, const ConstrainedOperator& op, const FlowConfig& cfg,
                 std::vector<double>& u, double& E, double& dt) {
    const double mu = op.config().mu;
    const double sc = std::sqrt(mu);
    std::vector<double> V, ut(d.n_grid);
    const double nV = op.pseudogradient(u, V);
    if (nV <= cfg.tol_pg) return 0.0;
    while (true) {
        // convex-combination cap: s = dt/|V| <= 1/2 keeps the step between u and G(u)
        const double s = std::min(dt / nV, 0.5);
        for (int i = 0; i < d.n_grid; ++i) ut[i] = u[i] - s * V[i];
        if (cfg.normalize_each_step) normalize_mass(d, ut, mu);
        const double Et = energy_of(d, ut, op.config().tau, op.config().p);
        if (Et <= E - 0.3 * s * nV * nV) {
            u.swap(ut);
            E = Et;
            const double used = s * nV;
            dt = std::min(dt * 1.7, cfg.dt_max > 0 ? cfg.dt_max : 0.2 * sc);
            return used;
        }
        dt *= 0.5;
        if (dt < 1e-14 * sc) return 0.0;
    }
}

std::pair<FlowTrace, Field> run_flow(const Field& u0, const ConstrainedOperator& op, const FlowConfig& cfg0) {
    const Domain& d = u0.domain();
    const double mu = op.config().mu;
    FlowConfig cfg = cfg0;
    if (cfg.dt0 <= 0) cfg.dt0 = 0.02 * std::sqrt(mu);
    if (cfg.dt_max <= 0) cfg.dt_max = 0.2 * std::sqrt(mu);
    if (cfg.tol_pg <= 0) cfg.tol_pg = 1e-8 * std::sqrt(lambda1(u0.domain_ptr()) * mu);

    std::vector<double> u = u0.values();
    double E = energy_of(d, u, op.config().tau, op.config().p);
    double dt = cfg.dt0;
    double t = 0;

    FlowTrace tr;
    auto cone0 = cone_distances(d, u, cfg.delta);
    tr.started_in_Dstar = cfg.delta > 0 && !cone0.in_Sstar;
    const bool started_plus = cfg.delta > 0 && cone0.d_plus <= cfg.delta;
    bool was_in_Dstar = tr.started_in_Dstar;

    std::vector<double> V;
    for (long k = 0; k < cfg.max_steps; ++k) {
        if (cfg.energy_band && (E < cfg.energy_band->first || E > cfg.energy_band->second)) break;
        const double Eprev = E;
        const double used = flow_step(d, op, cfg, u, E, dt);
        tr.steps = k + 1;
        const double merr = std::abs(mass_of(d, u) - mu);
        tr.max_mass_err = std::max(tr.max_mass_err, merr);
        const double inc = E - Eprev - 1e-9 * (1.0 + std::abs(Eprev));
        tr.max_energy_increase = std::max(tr.max_energy_increase, inc);
        auto cd = cone_distances(d, u, cfg.delta);
        if (cfg.delta > 0) {
            if (started_plus) tr.max_cone_excess = std::max(tr.max_cone_excess, cd.d_plus - cfg.delta);
            if (was_in_Dstar && cd.in_Sstar) tr.left_Dstar = true;
            if (!was_in_Dstar && !cd.in_Sstar) tr.entered_Dstar = true;
            was_in_Dstar = !cd.in_Sstar;
        }
        if (used == 0.0) {
            const double nV = op.pseudogradient(u, V);
            tr.converged = nV <= 10 * cfg.tol_pg;
            if ((k % cfg.trace_stride) != 0)
                tr.points.push_back({t, E, nV, cd.d_plus, cd.d_minus, merr});
            break;
        }
        t += used;
        if ((k % cfg.trace_stride) == 0) {
            const double nV = op.pseudogradient(u, V);
            tr.points.push_back({t, E, nV, cd.d_plus, cd.d_minus, merr});
            if (nV <= cfg.tol_pg) {
                tr.converged = true;
                break;
            }
        }
    }
    if (!tr.converged && tr.steps > 0) {
        const double nV = op.pseudogradient(u, V);
        tr.converged = nV <= cfg.tol_pg;
    }
    return {std::move(tr), Field(u0.domain_ptr(), std::move(u))};
}

double equation_residual(const Domain& d, const std::vector<double>& u, double lambda, double tau, double p) {
    // H^{-1} dual norm sqrt(F^T B^{-1} F): the natural residual measure for
    // the variational problem, and it stays meaningful at fine grids where
    // the nodewise L2 residual is dominated by the 1/h^2 round-off floor
    const int n = d.n_grid;
    std::vector<double> F(n), z(n);
    tridiag_apply(d.stiffness, u.data(), F.data());
    for (int i = 0; i < n; ++i)
        F[i] += d.quad_w[i] * (lambda * u[i] - tau * std::pow(std::abs(u[i]), p - 2) * u[i]);
    SpdTridiagFactor B(d.stiffness);
    B.solve(F.data(), z.data());
    double r2 = 0;
    for (int i = 0; i < n; ++i) r2 += F[i] * z[i];
    return std::sqrt(std::max(0.0, r2));
}

namespace {

// residual vector of the extended system into F (size n) and c
void assemble_F(const Domain& d, const std::vector<double>& u, double lambda, double mu, double tau,
                double p, std::vector<double>& F, double& c) {
    const int n = d.n_grid;
    F.resize(n);
    tridiag_apply(d.stiffness, u.data(), F.data());
    for (int i = 0; i < n; ++i)
        F[i] += d.quad_w[i] * (lambda * u[i] - tau * std::pow(std::abs(u[i]), p - 2) * u[i]);
    c = mass_of(d, u) - mu;
}

double fnorm(const Domain& d, const std::vector<double>& F, double c) {
    double r2 = c * c;
    for (int i = 0; i < d.n_grid; ++i) r2 += F[i] * F[i] / d.quad_w[i];
    return std::sqrt(r2);
}

SymTridiag jacobian_core(const Domain& d, const std::vector<double>& u, double lambda, double tau, double p) {
    SymTridiag J = d.stiffness;
    for (int i = 0; i < d.n_grid; ++i)
        J.d[i] += d.quad_w[i] * (lambda - tau * (p - 1) * std::pow(std::abs(u[i]), p - 2));
    return J;
}

} // namespace

NewtonResult newton_polish(const Field& u0, double lambda_guess, double mu, double tau, double p) {
    const Domain& d = u0.domain();
    const int n = d.n_grid;
    NewtonResult out;
    std::vector<double> u = u0.values();
    double lambda = lambda_guess;
    std::vector<double> F, a1(n), a2(n), Mu(n), utrial(n), Ftrial;
    double c = 0, ctrial = 0;
    assemble_F(d, u, lambda, mu, tau, p, F, c);
    double r = fnorm(d, F, c);
    const double uscale = std::sqrt(dirichlet_of(d, u)) + 1.0;
    // the nodewise norm bottoms out at the round-off floor ~ eps |B| |u|;
    // convergence is certified by the dual-norm residual on exit
    auto certify = [&](int iters) {
        out.u = Field(u0.domain_ptr(), u);
        out.lambda = lambda;
        out.residual = equation_residual(d, u, lambda, tau, p);
        out.iterations = iters;
        out.converged = out.residual < 1e-10 * (1.0 + std::sqrt(out.u.dirichlet())) &&
                        std::abs(out.u.mass() - mu) <= 1e-12 * mu;
        return out;
    };
    for (int it = 0; it < 80; ++it) {
        if (r < 1e-12 * uscale && std::abs(c) <= 1e-12 * mu) return certify(it);
        LuTridiagFactor J(jacobian_core(d, u, lambda, tau, p));
        if (J.singular()) break;
        for (int i = 0; i < n; ++i) Mu[i] = d.quad_w[i] * u[i];
        std::vector<double> negF(F);
        for (auto& x : negF) x = -x;
        J.solve(negF.data(), a1.data());
        J.solve(Mu.data(), a2.data());
        // constraint row: 2 (Mu)^T (a1 - dlam a2) = -c
        double s1 = 0, s2 = 0;
        for (int i = 0; i < n; ++i) {
            s1 += 2.0 * Mu[i] * a1[i];
            s2 += 2.0 * Mu[i] * a2[i];
        }
        if (std::abs(s2) < 1e-300) break;
        const double dlam = (s1 + c) / s2;
        double step = 1.0;
        bool accepted = false;
        for (int bt = 0; bt < 40; ++bt) {
            for (int i = 0; i < n; ++i) utrial[i] = u[i] + step * (a1[i] - dlam * a2[i]);
            const double lt = lambda + step * dlam;
            assemble_F(d, utrial, lt, mu, tau, p, Ftrial, ctrial);
            const double rt = fnorm(d, Ftrial, ctrial);
            if (std::isfinite(rt) && rt < (1.0 - 0.25 * step) * r) {
                u.swap(utrial);
                lambda = lt;
                F.swap(Ftrial);
                c = ctrial;
                r = rt;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) return certify(it + 1); // stalled at the round-off floor
        out.iterations = it + 1;
    }
    return certify(out.iterations);
}

bool newton_fixed_lambda(const Domain& d, std::vector<double>& u, double lambda, double tau, double p,
                         double* residual_out, int max_iter) {
    const int n = d.n_grid;
    std::vector<double> F(n), du(n), utrial(n), Ftrial(n);
    double c;
    auto resid = [&](std::vector<double>& uu, std::vector<double>& FF) {
        assemble_F(d, uu, lambda, 0.0, tau, p, FF, c); // mu unused at fixed lambda
        double r2 = 0;
        for (int i = 0; i < n; ++i) r2 += FF[i] * FF[i] / d.quad_w[i];
        return std::sqrt(r2);
    };
    double r = resid(u, F);
    const double uscale = std::sqrt(dirichlet_of(d, u)) + 1.0;
    bool stalled = false;
    for (int it = 0; it < max_iter && !stalled; ++it) {
        if (r < 1e-12 * uscale) break;
        LuTridiagFactor J(jacobian_core(d, u, lambda, tau, p));
        if (J.singular()) return false;
        std::vector<double> negF(F);
        for (auto& x : negF) x = -x;
        J.solve(negF.data(), du.data());
        double step = 1.0;
        bool ok = false;
        for (int bt = 0; bt < 40; ++bt) {
            for (int i = 0; i < n; ++i) utrial[i] = u[i] + step * du[i];
            const double rt = resid(utrial, Ftrial);
            if (std::isfinite(rt) && rt < (1.0 - 0.25 * step) * r) {
                u.swap(utrial);
                F.swap(Ftrial);
                r = rt;
                ok = true;
                break;
            }
            step *= 0.5;
        }
        stalled = !ok;
    }
    const double rdual = equation_residual(d, u, lambda, tau, p);
    if (residual_out) *residual_out = rdual;
    return rdual < 1e-9 * uscale;
}

std::vector<std::size_t> ps_localize(const std::vector<Field>& path, std::pair<double, double> band,
                                     double delta, const ConstrainedOperator& op) {
    std::vector<std::pair<double, std::size_t>> cand;
    std::vector<double> V;
    for (std::size_t i = 0; i < path.size(); ++i) {
        const double E = path[i].energy(op.config().tau, op.config().p);
        if (E < band.first || E > band.second) continue;
        if (!cone_distances(path[i], delta).in_Sstar) continue;
        const double nV = op.pseudogradient(path[i].values(), V);
        cand.push_back({nV, i});
    }
    std::sort(cand.begin(), cand.end());
    std::vector<std::size_t> out;
    out.reserve(cand.size());
    for (auto& [nv, i] : cand) out.push_back(i);
    return out;
}

} // namespace massflow

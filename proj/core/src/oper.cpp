#include "massflow/oper.hpp"

#include "massflow/gn.hpp"
#include "massflow/random_fields.hpp"

#include <cmath>
#include <stdexcept>

namespace massflow {

namespace {

SymTridiag shifted_operator(const Domain& d, double lambda_bar) {
    SymTridiag A = d.stiffness;
    for (int i = 0; i < d.n_grid; ++i) A.d[i] += lambda_bar * d.quad_w[i];
    return A;
}

} // namespace

ConstrainedOperator::ConstrainedOperator(DomainPtr dom, OperatorConfig cfg)
    : dom_(std::move(dom)), cfg_(cfg),
      factor_(std::make_shared<SpdTridiagFactor>(shifted_operator(*dom_, cfg.lambda_bar))) {}

void ConstrainedOperator::solve_G(const std::vector<double>& u, std::vector<double>& w,
                                  double& omega) const {
    const Domain& d = *dom_;
    const int n = d.n_grid;
    const double p = cfg_.p, tau = cfg_.tau, mu = cfg_.mu;
    std::vector<double> rhs(n), w1(n), w2(n);
    for (int i = 0; i < n; ++i)
        rhs[i] = d.quad_w[i] * tau * std::pow(std::abs(u[i]), p - 2) * u[i];
    factor_->solve(rhs.data(), w1.data());
    for (int i = 0; i < n; ++i) rhs[i] = d.quad_w[i] * u[i];
    factor_->solve(rhs.data(), w2.data());
    const double den = l2dot(d, w2, u);
    if (!(den > 0))
        throw std::runtime_error("solve_G: int (A^{-1}u) u <= 0, lambda_bar <= -lambda_1?");
    omega = (mu - l2dot(d, w1, u)) / den;
    w.resize(n);
    for (int i = 0; i < n; ++i) w[i] = w1[i] + omega * w2[i];
}

double ConstrainedOperator::pseudogradient(const std::vector<double>& u, std::vector<double>& V,
                                           double* omega_out) const {
    double omega;
    solve_G(u, V, omega); // V temporarily holds w
    const int n = dom_->n_grid;
    for (int i = 0; i < n; ++i) V[i] = u[i] - V[i];
    if (omega_out) *omega_out = omega;
    return std::sqrt(dirichlet_of(*dom_, V));
}

GResult ConstrainedOperator::solve_G(const Field& u) const {
    const Domain& d = *dom_;
    if (std::abs(u.mass() - cfg_.mu) > 1e-10 * cfg_.mu)
        throw std::invalid_argument("solve_G: u not on the mass sphere S_mu");
    GResult out;
    std::vector<double> w;
    solve_G(u.values(), w, out.omega);
    // residual of A w - M(tau |u|^{p-2}u) - omega M u, in the A-dual norm
    const int n = d.n_grid;
    std::vector<double> r(n), z(n);
    tridiag_apply(d.stiffness, w.data(), r.data());
    for (int i = 0; i < n; ++i)
        r[i] += cfg_.lambda_bar * d.quad_w[i] * w[i] -
                d.quad_w[i] * (cfg_.tau * std::pow(std::abs(u.values()[i]), cfg_.p - 2) * u.values()[i] +
                               out.omega * u.values()[i]);
    factor_->solve(r.data(), z.data());
    double res2 = 0;
    for (int i = 0; i < n; ++i) res2 += r[i] * z[i];
    out.residual = std::sqrt(std::max(0.0, res2));
    out.constraint_err = std::abs(l2dot(d, w, u.values()) - cfg_.mu);
    out.w = Field(dom_, std::move(w));
    return out;
}

std::pair<Field, double> ConstrainedOperator::pseudogradient(const Field& u) const {
    std::vector<double> V;
    double nv = pseudogradient(u.values(), V);
    return {Field(dom_, std::move(V)), nv};
}

GResult solve_G(const Field& u, const OperatorConfig& cfg) {
    return ConstrainedOperator(u.domain_ptr(), cfg).solve_G(u);
}

std::pair<Field, double> pseudogradient(const Field& u, const OperatorConfig& cfg) {
    return ConstrainedOperator(u.domain_ptr(), cfg).pseudogradient(u);
}

double select_lambda_bar(double rho, double mu, double p, const DomainPtr& dom) {
    if (!(rho > 0) || !(mu > 0)) throw std::invalid_argument("select_lambda_bar: rho, mu > 0");
    const int N = dom->dim;
    const double g = N * (0.5 - 1.0 / p);
    const double C = gn_constant(p, N);
    const double lam1 = lambda1(dom);
    const double lhs = std::pow(C, p) * std::pow(rho, (p - 1) * g / 2.0) *
                       std::pow(mu, (p - (p - 1) * g - 2.0) / 2.0);
    auto rhs = [&](double lb) {
        return std::pow((lam1 + std::min(0.0, lb)) / std::sqrt(lam1), g) *
               std::pow(lam1 + lb, 1.0 - g);
    };
    if (lhs <= rhs(0.0)) return 0.0;
    double lo = 0.0, hi = 1.0;
    while (rhs(hi) < lhs) {
        hi *= 2;
        if (hi > 1e300) throw std::runtime_error("select_lambda_bar: unbounded");
    }
    for (int it = 0; it < 200 && (hi - lo) > 1e-13 * (1 + hi); ++it) {
        double mid = 0.5 * (lo + hi);
        (rhs(mid) < lhs ? lo : hi) = mid;
    }
    return hi;
}

ConeDistances cone_distances(const Domain& d, const std::vector<double>& v, double delta) {
    const int n = d.n_grid;
    std::vector<double> part(n);
    ConeDistances out;
    out.delta = delta;
    for (int i = 0; i < n; ++i) part[i] = std::min(v[i], 0.0);
    out.d_plus = std::sqrt(dirichlet_of(d, part));
    for (int i = 0; i < n; ++i) part[i] = std::max(v[i], 0.0);
    out.d_minus = std::sqrt(dirichlet_of(d, part));
    out.in_Sstar = std::min(out.d_plus, out.d_minus) > delta;
    return out;
}

ConeDistances cone_distances(const Field& u, double delta) {
    return cone_distances(u.domain(), u.values(), delta);
}

Field constrained_gradient(const Field& u, double tau, double p) {
    const Domain& d = u.domain();
    const int n = d.n_grid;
    SpdTridiagFactor B(d.stiffness);
    std::vector<double> rhs(n), z1(n), z2(n);
    for (int i = 0; i < n; ++i)
        rhs[i] = d.quad_w[i] * tau * std::pow(std::abs(u.values()[i]), p - 2) * u.values()[i];
    B.solve(rhs.data(), z1.data());
    for (int i = 0; i < n; ++i) rhs[i] = d.quad_w[i] * u.values()[i];
    B.solve(rhs.data(), z2.data());
    const double lam_u = (u.mass() - l2dot(d, z1, u.values())) / l2dot(d, z2, u.values());
    std::vector<double> gvec(n);
    for (int i = 0; i < n; ++i) gvec[i] = u.values()[i] - z1[i] - lam_u * z2[i];
    return Field(u.domain_ptr(), std::move(gvec));
}

DeltaProbe delta_hat_probe(double rho, double mu, const OperatorConfig& cfg, int n_samples,
                           FieldSampler& sampler) {
    ConstrainedOperator op(sampler.domain_ptr(), cfg);
    const Domain& d = *sampler.domain_ptr();
    const double lam1 = sampler.spectral().lambda[0];
    const double delta_max = 0.98 * std::sqrt(lam1 * mu / 2.0);
    DeltaProbe out;
    for (int j = 0; j < 12; ++j) {
        const double delta = delta_max * std::pow(2.0, -j);
        bool pass = true;
        std::vector<double> w;
        for (int s = 0; s < n_samples && pass; ++s) {
            auto u = sampler.near_cone(mu, rho, delta);
            double omega;
            op.solve_G(u, w, omega);
            out.omega_star = std::max(out.omega_star, 2.0 * omega);
            if (cone_distances(d, w, delta).d_plus > 0.5 * delta) pass = false;
        }
        if (pass) {
            out.ok = true;
            out.delta_hat = delta;
            return out;
        }
    }
    return out;
}

} // namespace massflow

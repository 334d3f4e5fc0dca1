#include "massflow/random_fields.hpp"

#include "massflow/oper.hpp"

#include <cmath>
#include <stdexcept>

namespace massflow {

FieldSampler::FieldSampler(DomainPtr dom, int modes, std::uint64_t seed)
    : dom_(dom), spec_(dirichlet_eigenpairs(dom, modes)), rng_(seed) {}

std::vector<double> FieldSampler::smooth(double mu) {
    const int n = dom_->n_grid;
    const int J = static_cast<int>(spec_.lambda.size());
    std::vector<double> v(n, 0.0);
    for (int j = 0; j < J; ++j) {
        const double c = gauss_(rng_) / ((j + 1.0) * (j + 1.0));
        for (int i = 0; i < n; ++i) v[i] += c * spec_.phi[j][i];
    }
    normalize_mass(*dom_, v, mu);
    return v;
}

std::vector<double> FieldSampler::in_ball(double mu, double rho) {
    auto v = smooth(mu);
    // blend toward the ground mode until the dirichlet energy fits
    for (int k = 0; k < 64; ++k) {
        if (dirichlet_of(*dom_, v) < rho) return v;
        for (int i = 0; i < dom_->n_grid; ++i)
            v[i] = 0.5 * v[i] + 0.5 * std::sqrt(mu) * spec_.phi[0][i];
        normalize_mass(*dom_, v, mu);
    }
    if (dirichlet_of(*dom_, v) >= rho)
        throw std::runtime_error("FieldSampler::in_ball: rho below ground-state energy?");
    return v;
}

std::vector<double> FieldSampler::nonnegative(double mu, double rho) {
    auto v = in_ball(mu, 0.9 * rho);
    for (auto& x : v) x = std::abs(x);
    normalize_mass(*dom_, v, mu);
    // |u| has no larger dirichlet energy than u on the grid, still check
    if (dirichlet_of(*dom_, v) >= rho)
        throw std::runtime_error("FieldSampler::nonnegative: left the ball");
    return v;
}

std::vector<double> FieldSampler::near_cone(double mu, double rho, double delta) {
    const int n = dom_->n_grid;
    for (int attempt = 0; attempt < 50; ++attempt) {
        auto base = nonnegative(mu, 0.8 * rho);
        // negative dip: one random eigenmode piece localized by truncation
        std::uniform_int_distribution<int> pick(1, static_cast<int>(spec_.lambda.size()) - 1);
        const int j = pick(rng_);
        std::vector<double> dip(n);
        for (int i = 0; i < n; ++i) dip[i] = std::min(spec_.phi[j][i], 0.0);
        const double dipnorm = std::sqrt(dirichlet_of(*dom_, dip));
        if (dipnorm < 1e-14) continue;
        // scale so the surrogate cone distance of the sum lands in (delta/2, delta]
        double lo = 0.0, hi = 0.9 * delta / dipnorm;
        std::vector<double> v(n);
        auto dist_at = [&](double eps) {
            for (int i = 0; i < n; ++i) v[i] = base[i] + eps * dip[i];
            normalize_mass(*dom_, v, mu);
            return cone_distances(*dom_, v, delta).d_plus;
        };
        for (int it = 0; it < 40; ++it) {
            double mid = 0.5 * (lo + hi);
            (dist_at(mid) <= 0.85 * delta ? lo : hi) = mid;
        }
        double dp = dist_at(0.5 * (lo + hi));
        if (dp > 0.05 * delta && dp <= delta && dirichlet_of(*dom_, v) < rho) return v;
    }
    throw std::runtime_error("FieldSampler::near_cone: could not hit the target band");
}

} // namespace massflow

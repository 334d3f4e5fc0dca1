#include "massflow/field.hpp"

#include <cstdlib>
#include <stdexcept>

namespace massflow {

double mass_of(const Domain& d, const std::vector<double>& v) {
    double s = 0;
    for (int i = 0; i < d.n_grid; ++i) s += d.quad_w[i] * v[i] * v[i];
    return s;
}

double l2dot(const Domain& d, const std::vector<double>& u, const std::vector<double>& v) {
    double s = 0;
    for (int i = 0; i < d.n_grid; ++i) s += d.quad_w[i] * u[i] * v[i];
    return s;
}

double dirichlet_of(const Domain& d, const std::vector<double>& v) {
    const auto& T = d.stiffness;
    const int n = d.n_grid;
    double s = 0;
    for (int i = 0; i < n; ++i) {
        double tv = T.d[i] * v[i];
        if (i > 0) tv += T.e[i - 1] * v[i - 1];
        if (i + 1 < n) tv += T.e[i] * v[i + 1];
        s += v[i] * tv;
    }
    return s;
}

double h1dot(const Domain& d, const std::vector<double>& u, const std::vector<double>& v) {
    const auto& T = d.stiffness;
    const int n = d.n_grid;
    double s = 0;
    for (int i = 0; i < n; ++i) {
        double tv = T.d[i] * v[i];
        if (i > 0) tv += T.e[i - 1] * v[i - 1];
        if (i + 1 < n) tv += T.e[i] * v[i + 1];
        s += u[i] * tv;
    }
    return s;
}

double lp_of(const Domain& d, const std::vector<double>& v, double p) {
    double s = 0;
    for (int i = 0; i < d.n_grid; ++i) s += d.quad_w[i] * std::pow(std::abs(v[i]), p);
    return s;
}

double energy_of(const Domain& d, const std::vector<double>& v, double tau, double p) {
    return 0.5 * dirichlet_of(d, v) - tau / p * lp_of(d, v, p);
}

void normalize_mass(const Domain& d, std::vector<double>& v, double mu) {
    double m = mass_of(d, v);
    if (!(m > 0)) throw std::runtime_error("normalize_mass: zero field");
    double c = std::sqrt(mu / m);
    for (auto& x : v) x *= c;
}

Field::Field(DomainPtr dom, std::vector<double> values) : dom_(std::move(dom)), v_(std::move(values)) {
    if (static_cast<int>(v_.size()) != dom_->n_grid)
        throw std::invalid_argument("Field: size mismatch with domain");
    mass_ = mass_of(*dom_, v_);
    dirichlet_ = dirichlet_of(*dom_, v_);
}

double Field::lp(double p) const {
    if (lp_cache_p_ == p) return lp_cache_val_;
    lp_cache_p_ = p;
    lp_cache_val_ = lp_of(*dom_, v_, p);
    return lp_cache_val_;
}

double Field::linf() const {
    double m = 0;
    for (double x : v_) m = std::max(m, std::abs(x));
    return m;
}

int Field::sign_changes(double rel_tol) const {
    const double thr = rel_tol * linf();
    int count = 0;
    double last = 0;
    for (double x : v_) {
        if (std::abs(x) <= thr) continue;
        if (last != 0 && x * last < 0) ++count;
        last = x;
    }
    return count;
}

} // namespace massflow

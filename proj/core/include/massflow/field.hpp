#pragma once

// Grid functions over a Domain, with the quadrature functionals used
// everywhere: mass = int u^2, dirichlet = int |grad u|^2, lp = int |u|^p.

#include "massflow/domain.hpp"

#include <cmath>
#include <vector>

namespace massflow {

double mass_of(const Domain& d, const std::vector<double>& v);
double dirichlet_of(const Domain& d, const std::vector<double>& v);
double lp_of(const Domain& d, const std::vector<double>& v, double p);
double l2dot(const Domain& d, const std::vector<double>& u, const std::vector<double>& v);
// u^T B v, the H^1_0 inner product
double h1dot(const Domain& d, const std::vector<double>& u, const std::vector<double>& v);
double energy_of(const Domain& d, const std::vector<double>& v, double tau, double p);
// scalar rescale onto the mass sphere S_mu
void normalize_mass(const Domain& d, std::vector<double>& v, double mu);

struct Field {
    Field() = default;
    Field(DomainPtr dom, std::vector<double> values);

    const Domain& domain() const { return *dom_; }
    const DomainPtr& domain_ptr() const { return dom_; }
    const std::vector<double>& values() const { return v_; }
    double mass() const { return mass_; }
    double dirichlet() const { return dirichlet_; }
    double lp(double p) const;
    double energy(double tau, double p) const { return 0.5 * dirichlet_ - tau / p * lp(p); }
    double linf() const;
    int sign_changes(double rel_tol = 1e-9) const;
    bool empty() const { return v_.empty(); }

  private:
    DomainPtr dom_;
    std::vector<double> v_;
    double mass_ = 0, dirichlet_ = 0;
    mutable double lp_cache_p_ = 0, lp_cache_val_ = 0;
};

} // namespace massflow

#pragma once

// The mass-constrained linear solve G_tau(u), its Lagrange multiplier omega,
// the pseudogradient V_tau(u) = u - G_tau(u), the lambda_bar selection rule
// that forces omega >= 0 on B_rho^mu, and cone-neighborhood geometry.

#include "massflow/field.hpp"
#include "massflow/spectral.hpp"

#include <memory>
#include <optional>

namespace massflow {

struct OperatorConfig {
    double tau = 1.0;        // in [1/2, 1]
    double lambda_bar = 0.0; // > -lambda_1
    double rho = 0.0;        // gradient-ball radius the config was sized for
    double mu = 1.0;
    double p = 3.0;
};

struct GResult {
    Field w;
    double omega = 0;
    double residual = 0;       // operator-equation residual, L2 norm
    double constraint_err = 0; // |int w u - mu|
};

struct ConeDistances {
    double d_plus = 0;  // |grad u^-|, surrogate distance to P
    double d_minus = 0; // |grad u^+|, surrogate distance to -P
    double delta = 0;
    bool in_Sstar = false;
};

// Factors A = B + lambda_bar M once and serves every solve at that lambda_bar.
// Shareable read-only across threads after construction.
class ConstrainedOperator {
  public:
    ConstrainedOperator(DomainPtr dom, OperatorConfig cfg);

    const OperatorConfig& config() const { return cfg_; }
    const DomainPtr& domain_ptr() const { return dom_; }

    // raw-vector core used by the flow loops
    void solve_G(const std::vector<double>& u, std::vector<double>& w, double& omega) const;
    // V = u - G(u); returns |grad V|
    double pseudogradient(const std::vector<double>& u, std::vector<double>& V, double* omega = nullptr) const;

    GResult solve_G(const Field& u) const;
    std::pair<Field, double> pseudogradient(const Field& u) const;

  private:
    DomainPtr dom_;
    OperatorConfig cfg_;
    std::shared_ptr<const SpdTridiagFactor> factor_;
};

GResult solve_G(const Field& u, const OperatorConfig& cfg);
std::pair<Field, double> pseudogradient(const Field& u, const OperatorConfig& cfg);

// smallest lambda_bar >= 0 satisfying the omega >= 0 sufficient condition,
// by bisection on the monotone right-hand side
double select_lambda_bar(double rho, double mu, double p, const DomainPtr& dom);

ConeDistances cone_distances(const Field& u, double delta);
ConeDistances cone_distances(const Domain& d, const std::vector<double>& v, double delta);

// Independent assembly of the constrained gradient of E_tau on S_mu via the
// lambda_u projection formula (the oracle side of the pseudogradient sandwich).
Field constrained_gradient(const Field& u, double tau, double p);

struct DeltaProbe {
    bool ok = false;
    double delta_hat = 0;
    double omega_star = 0; // 2x the largest omega seen while probing
};

class FieldSampler; // random_fields.hpp

// Largest delta from a decreasing grid such that G maps sampled fields of
// P_delta cap B_rho^mu into P_{delta/2}, measured in the gradient surrogate.
DeltaProbe delta_hat_probe(double rho, double mu, const OperatorConfig& cfg, int n_samples,
                           FieldSampler& sampler);

} // namespace massflow

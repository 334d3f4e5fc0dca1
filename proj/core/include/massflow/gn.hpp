#pragma once

// Closed-form constants of the problem: the sharp R^N Gagliardo-Nirenberg
// constant from the soliton optimizer, the critical-mass threshold mu_bar,
// the Theta(mu) window with its maximizer rho_mu, and the mu_2 threshold
// for the k=2 saddle geometry. The domain Sobolev constant S_p is computed
// per domain by maximizing the embedding quotient.

#include "massflow/domain.hpp"
#include "massflow/exponents.hpp"

#include <functional>

namespace massflow {

// radial ground state of -DQ + Q = Q^{p-1} on R^N and its integrals
struct SolitonData {
    double p = 0;
    int N = 1;
    double center_value = 0;
    double mass = 0;        // int Q^2
    double dirichlet = 0;   // int |grad Q|^2
    double lp = 0;          // int Q^p
    double pohozaev_residual = 0;
    // pointwise profile Q(r), valid for r >= 0
    std::function<double(double)> profile;
};

// N=1 uses the sech closed form; N=2,3 a decay-shooting solve of the radial ODE.
const SolitonData& ground_soliton(double p, int N);

// sharp C_{p,N} = |Q|_p / (|grad Q|^gamma |Q|_2^{1-gamma})
double gn_constant(double p, int N);

// best constant of |u|_p <= S_p |grad u|_2 on the given domain
double sobolev_constant(const DomainPtr& dom, double p);

// mu_bar = (p_c / (2 C_{p_c,N}^{p_c}))^{2/(p_c-2)}
double mu_bar(int N);

struct ThetaResult {
    bool nonempty = false;
    double rho_mu = 0;   // maximizer of f(rho) = rho/2 - (1/p) C^p mu^{p(1-g)/2} rho^{pg/2}
    double f_max = 0;    // f(rho_mu) = (1/2 - 1/(p g)) rho_mu
    double margin = 0;   // max over rho of (rho - lambda_k mu - (2/p) C^p ... rho^{pg/2})
};
// pre: supercritical regime
ThetaResult theta_set_and_rho(double mu, int k, double p, int N, double lambda_k);

// supremal mu with Theta(mu) nonempty, by bisection
double mu2_threshold(double p, int N, double lambda_2);

// Remark 9.2 exterior radius g(mu); members of gamma_{1,k} must lie outside B_{g(mu)}
double gamma1_exterior_radius(double mu, double p, int N);

} // namespace massflow

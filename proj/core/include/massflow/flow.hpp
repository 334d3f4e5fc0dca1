#pragma once

// The descending flow on the mass sphere: normalized explicit Euler along
// -V/|V| with Armijo backtracking on the energy and a scalar mass rescale
// each step, plus the Newton polish that certifies terminals as solutions
// of the Euler-Lagrange equation.

#include "massflow/oper.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace massflow {

struct FlowConfig {
    double dt0 = 0;         // 0 -> 0.02 sqrt(mu)
    double dt_max = 0;      // 0 -> 0.2 sqrt(mu)
    double tol_pg = 0;      // 0 -> 1e-8 sqrt(lambda_1 mu)
    long max_steps = 200000;
    double delta = 0;       // cone width monitored along the trajectory
    bool normalize_each_step = true;
    std::optional<std::pair<double, double>> energy_band; // localization cutoff
    int trace_stride = 1;
};

struct FlowPoint {
    double t, energy, norm_V, d_plus, d_minus, mass_err;
};

struct FlowTrace {
    std::vector<FlowPoint> points;
    long steps = 0;
    bool converged = false;
    double max_mass_err = 0;
    double max_energy_increase = 0; // positive increments beyond tolerance, worst case
    double max_cone_excess = 0;     // max over steps of d_plus - delta (started in P_delta)
    bool started_in_Dstar = false;
    bool left_Dstar = false;
    bool entered_Dstar = false;
};

// One explicit Euler step; dt adapts in place. Returns dt actually used,
// 0 when the step underflowed (caller switches to Newton).
double flow_step(const Domain& d, const ConstrainedOperator& op, const FlowConfig& cfg,
                 std::vector<double>& u, double& E, double& dt);

std::pair<FlowTrace, Field> run_flow(const Field& u0, const ConstrainedOperator& op, const FlowConfig& cfg);

struct NewtonResult {
    Field u;
    double lambda = 0;
    double residual = 0;
    int iterations = 0;
    bool converged = false;
};

// Newton on F(u, lambda) = (-Lap u + lambda u - tau |u|^{p-2}u, int u^2 - mu)
// with the bordered tridiagonal Jacobian; damped steps.
NewtonResult newton_polish(const Field& u, double lambda_guess, double mu, double tau, double p);

// Newton at fixed lambda (used to land shooter profiles on the grid exactly)
bool newton_fixed_lambda(const Domain& d, std::vector<double>& u, double lambda, double tau, double p,
                         double* residual_out = nullptr, int max_iter = 60);

// L2 residual of the discrete Euler-Lagrange equation at (u, lambda)
double equation_residual(const Domain& d, const std::vector<double>& u, double lambda, double tau, double p);

// path points inside the energy band, outside D*_delta, sorted by |V|
std::vector<std::size_t> ps_localize(const std::vector<Field>& path, std::pair<double, double> band,
                                     double delta, const ConstrainedOperator& op);

} // namespace massflow

#pragma once

// Positive radial solutions of -u'' - ((N-1)/r) u' + lambda u = tau u^{p-1}
// on the unit ball by shooting on the center value, the mass curve
// M_tau(lambda), the two-solution finder, and Pohozaev diagnostics.
// Shot profiles are landed on the finite-difference grid by a fixed-lambda
// Newton so every returned field solves the discrete equation.

#include "massflow/field.hpp"

#include <optional>
#include <vector>

namespace massflow {

struct ShootResult {
    Field u;                 // radial field on B_1 (empty when extended)
    double lambda = 0, tau = 1, p = 0;
    int N = 1;
    double center_value = 0; // u(0)
    double mass = 0, energy = 0;
    double ode_residual = 0; // discrete-operator residual, relative
    bool positive = false;
    bool extended = false;   // produced by the soliton-tail power law, not a solve
};

struct MonotoneSegment {
    std::size_t begin = 0, end = 0; // index range [begin, end] in the samples
    bool increasing = false;
};

struct MassCurve {
    double tau = 1, p = 0;
    int N = 1;
    std::vector<double> lambda_samples; // strictly increasing
    std::vector<double> M_values;
    std::vector<double> E_values;
    std::vector<double> u0_values;
    std::vector<double> residuals;
    std::vector<MonotoneSegment> monotone_segments;
};

struct TwoSolutions {
    ShootResult u_low, u_high;
    double mu = 0;
    int count_verified = 0;
    bool ok = false;
};

struct ShootOptions {
    int n_grid = 4096;        // FD grid for the returned field
    double lambda_cap = 2500; // beyond this, single shooting is ill-conditioned
};

// pre: lambda > -lambda_1(B_1). Throws when no center value yields an interior zero.
ShootResult shoot(double lambda, double tau, double p, int N, const ShootOptions& opt = {});

MassCurve mass_curve(double tau, double p, int N, const std::vector<double>& lambda_grid,
                     const ShootOptions& opt = {});

// default curve grid for the two-solution search
std::vector<double> default_lambda_grid(double p, int N, double lambda_max, int count);

TwoSolutions find_two_positive(double mu, double tau, double p, int N, const ShootOptions& opt = {});

// |(N-2)/2 int |grad V|^2 + N/2 int V^2 - N/p int |V|^p| / int |V|^p
// pre: profile decayed at the boundary (last node < 1e-8 * max)
double pohozaev_check(const Field& profile, double p);

// V(x) = lambda^{-1/(p-2)} tau^{1/(p-2)} u(x/sqrt(lambda)) on the ball of radius sqrt(lambda)
Field rescale_to_soliton_frame(const ShootResult& s, int n_grid = 4096);

} // namespace massflow

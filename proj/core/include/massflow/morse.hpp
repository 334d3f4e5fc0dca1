#pragma once

// Morse index of linearized solutions: negative-eigenvalue counts of
// -Lap + lambda - (p-1) tau |U|^{p-2}, both unconstrained and restricted to
// the tangent space of the mass sphere (computed by bordered-matrix inertia),
// and the lambda <-> energy blow-up classification along solution families.

#include "massflow/field.hpp"
#include "massflow/records.hpp"

#include <vector>

namespace massflow {

struct LinearizationSpectrum {
    double lambda = 0, tau = 1;
    std::vector<double> eigvals; // lowest eigenvalues of the linearized operator
    int morse_index = 0;
    int constrained_index = 0;
    bool degenerate = false; // some |eigval| below the dead band
};

// pre: (u, lambda) solves the discrete equation to 1e-9 relative
LinearizationSpectrum morse_index(const Field& u, double lambda, double tau, double p, int n_eigs = 8);

// count of tangent-space directions with quadratic form below -theta (L2-normalized)
int constrained_index(const Field& u, double lambda, double tau, double p, double theta);

struct BridgePoint {
    double lambda, energy, linf, mass;
};

enum class BridgeClass { bounded, subcritical_blowup, supercritical_blowup, inconclusive };

struct BridgeReport {
    BridgeClass cls = BridgeClass::inconclusive;
    double fitted_exponent = 0;   // slope of log E vs log lambda on the tail
    double expected_exponent = 0; // p/(p-2) - N/2
    double linf_lambda_correlation = 0;
    std::string summary;
};

BridgeReport multiplier_energy_bridge(const std::vector<BridgePoint>& family, double p, int N);

} // namespace massflow

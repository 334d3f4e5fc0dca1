#pragma once

// Dirichlet eigenpairs of the discrete Laplacian pencil B phi = lambda M phi,
// solved as a standard symmetric tridiagonal problem after the M^{-1/2}
// similarity transform.

#include "massflow/field.hpp"

#include <vector>

namespace massflow {

struct SpectralData {
    DomainPtr domain;
    std::vector<double> lambda;             // ascending
    std::vector<std::vector<double>> phi;   // L2-normalized, first node positive
};

// pre: K <= n_grid/4. Throws on solver failure with the LAPACK info code.
SpectralData dirichlet_eigenpairs(const DomainPtr& dom, int K);

// lambda_1 only (cached nowhere; cheap)
double lambda1(const DomainPtr& dom);

} // namespace massflow

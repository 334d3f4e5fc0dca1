#include "massflow/spectral.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace massflow {

SpectralData dirichlet_eigenpairs(const DomainPtr& dom, int K) {
    if (K < 1 || K > dom->n_grid / 4)
        throw std::invalid_argument("dirichlet_eigenpairs: require 1 <= K <= n_grid/4");
    const int n = dom->n_grid;
    SymTridiag C;
    C.d.resize(n);
    C.e.resize(n - 1);
    for (int i = 0; i < n; ++i) C.d[i] = dom->stiffness.d[i] / dom->quad_w[i];
    for (int i = 0; i + 1 < n; ++i)
        C.e[i] = dom->stiffness.e[i] / std::sqrt(dom->quad_w[i] * dom->quad_w[i + 1]);
    TridiagEigen eig = lowest_eigenpairs(C, K, true);
    if (eig.info != 0)
        throw std::runtime_error("dirichlet_eigenpairs: eigensolver failed, info=" + std::to_string(eig.info));
    SpectralData out;
    out.domain = dom;
    out.lambda = eig.values;
    out.phi.resize(eig.vectors.size());
    for (std::size_t j = 0; j < eig.vectors.size(); ++j) {
        auto& v = eig.vectors[j];
        std::vector<double> phi(n);
        for (int i = 0; i < n; ++i) phi[i] = v[i] / std::sqrt(dom->quad_w[i]);
        // already L2-normalized since v is unit in the transformed coordinates;
        // renormalize to damp round-off and fix the sign convention
        double m = mass_of(*dom, phi);
        double c = 1.0 / std::sqrt(m);
        if (phi[0] < 0) c = -c;
        for (auto& x : phi) x *= c;
        out.phi[j] = std::move(phi);
    }
    return out;
}

double lambda1(const DomainPtr& dom) {
    return dirichlet_eigenpairs(dom, 1).lambda[0];
}

} // namespace massflow

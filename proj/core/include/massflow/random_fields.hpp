#pragma once

// Deterministic random field generation for property tests, probes and
// acceptance sampling. All draws go through a seeded mt19937_64 so runs
// are reproducible bit-for-bit.

#include "massflow/field.hpp"
#include "massflow/spectral.hpp"

#include <random>

namespace massflow {

class FieldSampler {
  public:
    FieldSampler(DomainPtr dom, int modes, std::uint64_t seed);

    const DomainPtr& domain_ptr() const { return dom_; }
    const SpectralData& spectral() const { return spec_; }
    std::mt19937_64& rng() { return rng_; }

    // smooth random eigenmode combination with mass mu
    std::vector<double> smooth(double mu);
    // additionally inside B_rho^mu (blended toward phi_1 if needed)
    std::vector<double> in_ball(double mu, double rho);
    // nonnegative smooth field with mass mu inside B_rho^mu
    std::vector<double> nonnegative(double mu, double rho);
    // field in P_deltabar cap B_rho^mu with gradient-surrogate cone distance
    // in (0.5 delta, delta]
    std::vector<double> near_cone(double mu, double rho, double delta);

  private:
    DomainPtr dom_;
    SpectralData spec_;
    std::mt19937_64 rng_;
    std::normal_distribution<double> gauss_{0.0, 1.0};
};

} // namespace massflow

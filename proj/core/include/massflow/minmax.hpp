#pragma once

// Min-max machinery: genus initializers M_k on the eigenfunction sphere and
// their flow deformation (levels nu_{mu,k,delta}), saddle families between
// M_k and a scaled disjoint-bump sphere (levels c_tau^k) optimized by a
// string method, and the tau-grid continuation to tau = 1.

#include "massflow/flow.hpp"
#include "massflow/gn.hpp"
#include "massflow/records.hpp"

#include <array>
#include <functional>
#include <vector>

namespace massflow {

// antipodally symmetric sample of S^{k-1}: pairs (s, -s); only one
// representative per pair is stored, the antipode is implicit
std::vector<std::vector<double>> sphere_samples(int k, int pairs);

struct GenusSet {
    int k = 0;
    double mu = 0;
    std::vector<std::vector<double>> sphere_points; // representatives on S^{k-1}
    std::vector<Field> members;                     // one per representative
    double sup_energy = 0;                          // over members, at tau = 1
    double sup_energy_on_Sstar = 0;
};

GenusSet build_M_k(int k, double mu, const SpectralData& spec, double delta, double p);

struct Gamma1 {
    std::vector<Field> bumps; // w_i, disjoint supports, each of mass mu
    double t_scale = 0;
    double min_dirichlet = 0; // over the sphere of combinations
    double max_energy = 0;    // over the sphere, at the most demanding tau
    bool strict_rule = true;  // energies below max E on M_k (vs exterior-only fallback)
};

struct Gamma1Options {
    double tau_min = 0.5;     // energy condition checked at this tau and at 1
    double width_floor = 0;   // bump half-width must stay above this (0 -> 24 h)
    bool allow_relaxed = true;
};

// pre: supercritical regime. Throws when even the relaxed rule cannot be met.
Gamma1 build_gamma1(int k, double mu, const DomainPtr& dom, const SpectralData& spec, double p,
                    const Gamma1Options& opt = {});

enum class LevelKind { genus, saddle };

struct MinmaxLevel {
    LevelKind kind = LevelKind::genus;
    int k = 0;
    double tau = 1, mu = 0, delta = 0;
    double value = 0; // estimated level
    double upper = 0; // current sup over the optimized family
    double lower = 0; // analytic bound
};

struct GenusOptions {
    double tau = 1.0;
    double p = 3.0;
    int pairs = 64;          // S^1 pairs; k=3 uses the icosahedral set instead
    double flow_tol_factor = 1e-6;
    long max_steps = 60000;
    double rho_margin = 4.0; // rho = margin * lambda_k * mu
    bool enforce_gates = true;
};

struct MinmaxOutcome {
    MinmaxLevel level;
    SolutionRecord record;
    Field terminal;
    bool ok = false;
    std::string note;
};

MinmaxOutcome estimate_genus_level(int k, double mu, double delta, const DomainPtr& dom,
                                   const GenusOptions& opt);

struct SaddleOptions {
    double p = 7.0;
    int nt = 17;             // path resolution in t
    int pairs = 8;           // S^{k-1} representatives
    int sweeps = 400;        // string-method iterations
    int burst_steps = 8;
    double top_fraction = 0.4;
    double tau_min = 0.5;    // most demanding tau the shared endpoints must serve
    double delta = 0;        // 0 -> 0.5 sqrt(lam1 mu / 2)
    long polish_band = 4;    // how many top slices to try to polish
    bool verbose = false;
};

struct SaddlePath {
    int k = 0;
    std::vector<double> t_grid;
    std::vector<std::vector<double>> s_grid;      // representatives
    std::vector<std::vector<Field>> gamma;        // [t][s]
    std::vector<Field> endpoints0, endpoints1;
};

struct SaddleOutcome {
    MinmaxLevel level;
    SolutionRecord record;
    Field terminal;
    SaddlePath path;
    bool ok = false;
    std::string note;
};

SaddleOutcome estimate_saddle_level(int k, double mu, double tau, const DomainPtr& dom,
                                    const SpectralData& spec, const SaddleOptions& opt,
                                    const SaddlePath* warm_start = nullptr);

std::vector<SaddleOutcome> tau_continuation(int k, double mu, const std::vector<double>& tau_grid,
                                            const DomainPtr& dom, const SpectralData& spec,
                                            SaddleOptions opt);

} // namespace massflow

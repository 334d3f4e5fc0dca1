#include "massflow/morse.hpp"

#include "massflow/flow.hpp"
#include "massflow/tridiag.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace massflow {

namespace {

constexpr double kDeadBand = 1e-9;

SymTridiag linearized(const Domain& d, const std::vector<double>& u, double lambda, double tau, double p) {
    SymTridiag Q = d.stiffness;
    for (int i = 0; i < d.n_grid; ++i)
        Q.d[i] += d.quad_w[i] * (lambda - (p - 1) * tau * std::pow(std::abs(u[i]), p - 2));
    return Q;
}

void require_solution(const Field& u, double lambda, double tau, double p) {
    const double res = equation_residual(u.domain(), u.values(), lambda, tau, p);
    if (res > 1e-9 * (1.0 + std::sqrt(u.dirichlet())))
        throw std::invalid_argument("morse: (u, lambda) does not solve the equation to 1e-9");
}

} // namespace

LinearizationSpectrum morse_index(const Field& u, double lambda, double tau, double p, int n_eigs) {
    require_solution(u, lambda, tau, p);
    const Domain& d = u.domain();
    const int n = d.n_grid;
    SymTridiag Q = linearized(d, u.values(), lambda, tau, p);
    // symmetrize against the mass weights: C = M^{-1/2} Q M^{-1/2}
    SymTridiag C;
    C.d.resize(n);
    C.e.resize(n - 1);
    for (int i = 0; i < n; ++i) C.d[i] = Q.d[i] / d.quad_w[i];
    for (int i = 0; i + 1 < n; ++i) C.e[i] = Q.e[i] / std::sqrt(d.quad_w[i] * d.quad_w[i + 1]);
    TridiagEigen eig = lowest_eigenpairs(C, n_eigs, false);
    if (eig.info != 0) throw std::runtime_error("morse_index: eigensolver failed");

    LinearizationSpectrum out;
    out.lambda = lambda;
    out.tau = tau;
    out.eigvals = eig.values;
    const double scale = 1.0 + std::abs(eig.values.front());
    for (double v : eig.values) {
        if (v < -kDeadBand * scale) ++out.morse_index;
        if (std::abs(v) < kDeadBand * scale) out.degenerate = true;
    }
    // definitional count over the whole spectrum, in case n_eigs was too few
    if (out.morse_index == n_eigs)
        out.morse_index = sturm_count_below(Q, d.quad_w, -kDeadBand * scale);
    out.constrained_index = constrained_index(u, lambda, tau, p, 0.0);
    return out;
}

int constrained_index(const Field& u, double lambda, double tau, double p, double theta) {
    require_solution(u, lambda, tau, p);
    const Domain& d = u.domain();
    const int n = d.n_grid;
    const double sigma = -theta; // count eigenvalues of (Q, M) restricted to u-perp below -theta
    SymTridiag A = linearized(d, u.values(), lambda, tau, p);
    for (int i = 0; i < n; ++i) A.d[i] -= sigma * d.quad_w[i];

    // Haynsworth: In[K] = In[A] + In[-b^T A^{-1} b] for K = [[A, b],[b^T, 0]],
    // and the restricted negative count is n_-(K) - 1, with b = M u.
    double jitter = 0.0;
    for (int attempt = 0; attempt < 6; ++attempt) {
        SymTridiag Aj = A;
        if (jitter != 0)
            for (int i = 0; i < n; ++i) Aj.d[i] += jitter * d.quad_w[i];
        LuTridiagFactor lu(Aj);
        if (lu.singular()) {
            jitter = (jitter == 0) ? 1e-11 : jitter * 32;
            continue;
        }
        std::vector<double> b(n), x(n);
        for (int i = 0; i < n; ++i) b[i] = d.quad_w[i] * u.values()[i];
        lu.solve(b.data(), x.data());
        double schur = 0;
        for (int i = 0; i < n; ++i) schur -= b[i] * x[i];
        if (std::abs(schur) < 1e-14 * u.mass()) {
            jitter = (jitter == 0) ? 1e-11 : jitter * 32;
            continue;
        }
        const int neg_A = sturm_count_below(Aj, d.quad_w, 0.0);
        const int neg_K = neg_A + (schur < 0 ? 1 : 0);
        return neg_K - 1;
    }
    throw std::runtime_error("constrained_index: shifted operator persistently singular");
}

BridgeReport multiplier_energy_bridge(const std::vector<BridgePoint>& fam, double p, int N) {
    BridgeReport rep;
    rep.expected_exponent = p / (p - 2.0) - N / 2.0;
    if (fam.size() < 3) {
        rep.summary = "too few points";
        return rep;
    }
    double lam_min = fam.front().lambda, lam_max = fam.front().lambda;
    double e_min = fam.front().energy, e_max = fam.front().energy;
    for (const auto& f : fam) {
        lam_min = std::min(lam_min, f.lambda);
        lam_max = std::max(lam_max, f.lambda);
        e_min = std::min(e_min, f.energy);
        e_max = std::max(e_max, f.energy);
    }
    // L-infinity vs lambda correlation on log scales (Lemma-3.2-style bridge)
    {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int m = 0;
        for (const auto& f : fam) {
            if (f.lambda <= 0 || f.linf <= 0) continue;
            const double x = std::log(f.lambda), y = std::log(f.linf);
            sx += x; sy += y; sxx += x * x; sxy += x * y;
            ++m;
        }
        if (m >= 3) rep.linf_lambda_correlation = (m * sxy - sx * sy) / std::max(1e-30, m * sxx - sx * sx);
    }
    if (lam_max < 10.0 * std::max(1.0, lam_min)) {
        rep.cls = BridgeClass::bounded;
        rep.summary = "lambda stays bounded; energies bounded with it";
        return rep;
    }
    // blow-up branch: fit log E ~ s log lambda over the large-lambda half
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (const auto& f : fam) {
        if (f.lambda < 0.1 * lam_max || f.lambda <= 0) continue;
        const double aE = std::abs(f.energy);
        if (aE <= 0) continue;
        const double x = std::log(f.lambda), y = std::log(aE);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
        ++m;
    }
    if (m >= 3) rep.fitted_exponent = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    bool energy_up = e_max > 10.0 * std::max(1.0, std::abs(e_min));
    bool energy_down = e_min < -10.0;
    std::ostringstream os;
    if (p > 2.0 + 4.0 / N && energy_up) {
        rep.cls = BridgeClass::supercritical_blowup;
        os << "lambda -> inf with E -> +inf, fitted exponent " << rep.fitted_exponent;
    } else if (p < 2.0 + 4.0 / N && energy_down) {
        rep.cls = BridgeClass::subcritical_blowup;
        os << "lambda -> inf with E -> -inf";
    } else {
        rep.cls = BridgeClass::inconclusive;
        os << "mixed trends";
    }
    rep.summary = os.str();
    return rep;
}

} // namespace massflow

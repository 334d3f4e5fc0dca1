#include "massflow/tridiag.hpp"

#include <cmath>
#include <cstring>
#include <lapacke.h>

namespace massflow {

void tridiag_apply(const SymTridiag& T, const double* x, double* y) {
    const std::size_t n = T.size();
    for (std::size_t i = 0; i < n; ++i) {
        double s = T.d[i] * x[i];
        if (i > 0) s += T.e[i - 1] * x[i - 1];
        if (i + 1 < n) s += T.e[i] * x[i + 1];
        y[i] = s;
    }
}

SpdTridiagFactor::SpdTridiagFactor(const SymTridiag& T) : d_(T.d), e_(T.e) {
    const int n = static_cast<int>(d_.size());
    int info = LAPACKE_dpttrf(n, d_.data(), e_.data());
    if (info != 0) throw std::runtime_error("SpdTridiagFactor: matrix not positive definite");
}

void SpdTridiagFactor::solve(const double* b, double* x) const {
    const int n = static_cast<int>(d_.size());
    if (x != b) std::memcpy(x, b, sizeof(double) * n);
    LAPACKE_dpttrs(LAPACK_COL_MAJOR, n, 1, d_.data(), e_.data(), x, n);
}

std::vector<double> SpdTridiagFactor::solve(const std::vector<double>& b) const {
    std::vector<double> x(b);
    solve(b.data(), x.data());
    return x;
}

LuTridiagFactor::LuTridiagFactor(const SymTridiag& T)
    : n_(static_cast<int>(T.size())), dl_(T.e), dd_(T.d), du_(T.e), du2_(T.size() >= 2 ? T.size() - 2 : 0),
      ipiv_(T.size()) {
    int info = LAPACKE_dgttrf(n_, dl_.data(), dd_.data(), du_.data(), du2_.data(), ipiv_.data());
    singular_ = (info != 0);
}

void LuTridiagFactor::solve(const double* b, double* x) const {
    if (singular_) throw std::runtime_error("LuTridiagFactor: singular matrix");
    if (x != b) std::memcpy(x, b, sizeof(double) * n_);
    LAPACKE_dgttrs(LAPACK_COL_MAJOR, 'N', n_, 1, dl_.data(), dd_.data(), du_.data(), du2_.data(),
                   ipiv_.data(), x, n_);
}

int sturm_count_below(const SymTridiag& T, const std::vector<double>& m, double sigma) {
    const std::size_t n = T.size();
    // pivots of LDL^T of (T - sigma M); zero pivots nudged as in LAPACK dlaneg
    int count = 0;
    double piv = 0.0;
    const double tiny = 1e-307;
    for (std::size_t i = 0; i < n; ++i) {
        double a = T.d[i] - sigma * m[i];
        if (i > 0) {
            double b = T.e[i - 1];
            a -= b * b / piv;
        }
        if (a == 0.0) a = tiny;
        if (std::abs(a) < tiny) a = (a < 0 ? -tiny : tiny);
        piv = a;
        if (a < 0) ++count;
    }
    return count;
}

TridiagEigen lowest_eigenpairs(const SymTridiag& T, int k, bool want_vectors) {
    const int n = static_cast<int>(T.size());
    if (k > n) k = n;
    std::vector<double> d(T.d), e(T.e);
    e.resize(n, 0.0); // dstevr wants length n workspace for e
    std::vector<double> w(n), z;
    std::vector<int> isuppz(2 * std::max(1, k));
    int mfound = 0;
    TridiagEigen out;
    if (want_vectors) z.resize(static_cast<std::size_t>(n) * k);
    out.info = LAPACKE_dstevr(LAPACK_COL_MAJOR, want_vectors ? 'V' : 'N', 'I', n, d.data(), e.data(),
                              0.0, 0.0, 1, k, 0.0, &mfound, w.data(),
                              want_vectors ? z.data() : nullptr, n, isuppz.data());
    if (out.info != 0) return out;
    out.values.assign(w.begin(), w.begin() + mfound);
    if (want_vectors) {
        out.vectors.resize(mfound);
        for (int j = 0; j < mfound; ++j)
            out.vectors[j].assign(z.begin() + static_cast<std::size_t>(j) * n,
                                  z.begin() + static_cast<std::size_t>(j + 1) * n);
    }
    return out;
}

} // namespace massflow

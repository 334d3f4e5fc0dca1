#pragma once

// Symmetric tridiagonal kernels used by every solver in this library:
// SPD factor/solve (Cholesky LDL^T), pivoted LU for indefinite systems,
// Sturm-sequence negative-eigenvalue counts and a LAPACK dstevr wrapper
// for the lowest eigenpairs.

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace massflow {

// d: diagonal (n), e: subdiagonal (n-1)
struct SymTridiag {
    std::vector<double> d;
    std::vector<double> e;
    std::size_t size() const { return d.size(); }
};

// y = T x
void tridiag_apply(const SymTridiag& T, const double* x, double* y);

// LDL^T factorization of an SPD tridiagonal (LAPACK dpttrf). Throws if not SPD.
struct SpdTridiagFactor {
    explicit SpdTridiagFactor(const SymTridiag& T);
    void solve(const double* b, double* x) const;
    std::vector<double> solve(const std::vector<double>& b) const;
    std::size_t size() const { return d_.size(); }

  private:
    std::vector<double> d_, e_;
};

// Pivoted LU of a (possibly indefinite) tridiagonal (LAPACK dgttrf/dgttrs).
struct LuTridiagFactor {
    explicit LuTridiagFactor(const SymTridiag& T);
    bool singular() const { return singular_; }
    void solve(const double* b, double* x) const;

  private:
    int n_ = 0;
    bool singular_ = false;
    std::vector<double> dl_, dd_, du_, du2_;
    std::vector<int> ipiv_;
};

// Number of eigenvalues of the pencil (T, diag(m)) strictly below sigma,
// by the standard safeguarded Sturm pivot recurrence on T - sigma*diag(m).
int sturm_count_below(const SymTridiag& T, const std::vector<double>& m, double sigma);

// Lowest k eigenpairs of the standard symmetric tridiagonal T (dstevr).
// Returns eigenvalues ascending; vectors column-wise in vecs[k][n].
struct TridiagEigen {
    std::vector<double> values;
    std::vector<std::vector<double>> vectors;
    int info = 0;
};
TridiagEigen lowest_eigenpairs(const SymTridiag& T, int k, bool want_vectors = true);

} // namespace massflow

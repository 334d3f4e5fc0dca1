#pragma once

// Discretized Dirichlet domains: 1D intervals and radially symmetric balls
// in dimension N <= 3. Second-order finite differences; the radial operator
// is the conservative r^{N-1}-weighted flux stencil, with the r=0 node
// carrying the natural regularity condition u'(0)=0 (no flux through the
// origin face). Stiffness and quadrature are kept as a symmetric pair so
// that u^T B u ~ int |grad u|^2 and u^T M u ~ int u^2.

#include "massflow/tridiag.hpp"

#include <memory>
#include <string>
#include <vector>

namespace massflow {

enum class DomainKind { interval, ball };

struct Domain {
    DomainKind kind;
    int dim = 1;          // spatial dimension N (1 for intervals)
    double a = 0, b = 1;  // interval endpoints; for balls [0, radius]
    int n_grid = 0;       // interior node count
    double h = 0;
    std::vector<double> x;       // node coordinates (radii for balls; x[0] = 0)
    std::vector<double> quad_w;  // per-node quadrature weights, all > 0
    SymTridiag stiffness;        // Dirichlet form B
    double surface = 1.0;        // sigma_N area factor folded into w and B

    double radius() const { return b; }
    double length() const { return b - a; }
};

using DomainPtr = std::shared_ptr<const Domain>;

// n_grid >= 16 enforced; interval needs b > a, ball needs radius > 0, dim in {1,2,3}.
DomainPtr build_interval(double a, double b, int n_grid);
DomainPtr build_ball(int dim, double radius, int n_grid);

std::string describe(const Domain& d);

} // namespace massflow

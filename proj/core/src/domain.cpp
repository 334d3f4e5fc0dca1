#include "massflow/domain.hpp"

#include <cmath>
#include <stdexcept>

namespace massflow {

static constexpr double kPi = 3.14159265358979323846;

DomainPtr build_interval(double a, double b, int n_grid) {
    if (n_grid < 16) throw std::invalid_argument("build_interval: n_grid < 16");
    if (!(b > a)) throw std::invalid_argument("build_interval: nonpositive length");
    auto d = std::make_shared<Domain>();
    d->kind = DomainKind::interval;
    d->dim = 1;
    d->a = a;
    d->b = b;
    d->n_grid = n_grid;
    d->h = (b - a) / (n_grid + 1);
    d->x.resize(n_grid);
    d->quad_w.assign(n_grid, d->h);
    d->stiffness.d.assign(n_grid, 2.0 / d->h);
    d->stiffness.e.assign(n_grid - 1, -1.0 / d->h);
    for (int i = 0; i < n_grid; ++i) d->x[i] = a + (i + 1) * d->h;
    return d;
}

DomainPtr build_ball(int dim, double radius, int n_grid) {
    if (n_grid < 16) throw std::invalid_argument("build_ball: n_grid < 16");
    if (!(radius > 0)) throw std::invalid_argument("build_ball: nonpositive radius");
    if (dim < 1 || dim > 3) throw std::invalid_argument("build_ball: dim must be 1, 2 or 3");
    auto d = std::make_shared<Domain>();
    d->kind = DomainKind::ball;
    d->dim = dim;
    d->a = 0;
    d->b = radius;
    d->n_grid = n_grid;
    // nodes r_i = i*h, i = 0..n-1; Dirichlet boundary at r = n*h = radius
    d->h = radius / n_grid;
    const double sigma = (dim == 1) ? 2.0 : (dim == 2 ? 2.0 * kPi : 4.0 * kPi);
    d->surface = sigma;
    d->x.resize(n_grid);
    d->quad_w.resize(n_grid);
    d->stiffness.d.assign(n_grid, 0.0);
    d->stiffness.e.assign(n_grid - 1, 0.0);
    const double h = d->h;
    auto facepow = [&](double i_half) { return std::pow(i_half * h, dim - 1); };
    for (int i = 0; i < n_grid; ++i) {
        d->x[i] = i * h;
        const double rin = (i == 0) ? 0.0 : (i - 0.5) * h;
        const double rout = (i + 0.5) * h;
        d->quad_w[i] = sigma * (std::pow(rout, dim) - std::pow(rin, dim)) / dim;
        double diag = sigma * facepow(i + 0.5) / h;  // flux to node i+1 (or boundary)
        if (i > 0) diag += sigma * facepow(i - 0.5) / h;
        d->stiffness.d[i] = diag;
        if (i + 1 < n_grid) d->stiffness.e[i] = -sigma * facepow(i + 0.5) / h;
    }
    return d;
}

std::string describe(const Domain& d) {
    if (d.kind == DomainKind::interval)
        return "interval(" + std::to_string(d.a) + "," + std::to_string(d.b) + ") n=" + std::to_string(d.n_grid);
    return "ball(N=" + std::to_string(d.dim) + ",R=" + std::to_string(d.b) + ") n=" + std::to_string(d.n_grid);
}

} // namespace massflow

#include "massflow/shooting.hpp"

#include "massflow/flow.hpp"
#include "massflow/gn.hpp"
#include "massflow/ode.hpp"
#include "massflow/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace massflow {

namespace {

struct Trajectory {
    std::vector<double> r, u;
    double first_zero = -1; // < 0 when no zero in [0, 1]
};

// integrate the radial IVP from the center value a; records (r, u) samples,
// stops at the first zero crossing (located by local linear interpolation)
Trajectory integrate(double a, double lambda, double tau, double p, int N, bool record) {
    auto rhs = [&](double r, const OdeState<2>& y, OdeState<2>& dy) {
        const double u = y[0], v = y[1];
        const double g = lambda * u - tau * std::pow(std::abs(u), p - 2) * u;
        dy[0] = v;
        dy[1] = (r < 1e-14) ? g / N : (-(N - 1) / r * v + g);
    };
    Rk45<2, decltype(rhs)> ode(rhs, 1e-11, 1e-13 * a);
    const double hmax = 0.02 / std::sqrt(std::max(1.0, std::abs(lambda)));
    Trajectory out;
    OdeState<2> y{a, 0.0};
    double r = 0, h = hmax / 8;
    if (record) {
        out.r.push_back(0);
        out.u.push_back(a);
    }
    double rp = 0, up = a;
    while (r < 1.0) {
        if (!ode.step(r, y, h, std::min(hmax, 1.0 - r + 1e-9))) break;
        if (y[0] <= 0.0) {
            out.first_zero = rp + (r - rp) * up / (up - y[0]);
            break;
        }
        if (record) {
            out.r.push_back(r);
            out.u.push_back(y[0]);
        }
        rp = r;
        up = y[0];
    }
    return out;
}

double bisect_center_value(double lambda, double tau, double p, int N) {
    auto zero_before_boundary = [&](double a) {
        auto t = integrate(a, lambda, tau, p, N, false);
        return t.first_zero >= 0 && t.first_zero < 1.0;
    };
    double ahi = 1.0;
    int guard = 0;
    while (!zero_before_boundary(ahi)) {
        ahi *= 2;
        if (++guard > 60)
            throw std::runtime_error("shoot: no sign change for any center value (lambda <= -lambda_1?)");
    }
    double alo = ahi / 2;
    while (zero_before_boundary(alo)) {
        alo *= 0.5;
        if (alo < 1e-300) throw std::runtime_error("shoot: bracket collapse");
    }
    for (int it = 0; it < 120 && (ahi - alo) > 1e-15 * ahi; ++it) {
        const double am = 0.5 * (alo + ahi);
        (zero_before_boundary(am) ? ahi : alo) = am;
    }
    return 0.5 * (alo + ahi);
}

double interp(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
    if (x <= xs.front()) return ys.front();
    if (x >= xs.back()) return ys.back();
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    const std::size_t k = it - xs.begin();
    const double t = (x - xs[k - 1]) / (xs[k] - xs[k - 1]);
    return (1 - t) * ys[k - 1] + t * ys[k];
}

} // namespace

ShootResult shoot(double lambda, double tau, double p, int N, const ShootOptions& opt) {
    if (lambda > opt.lambda_cap)
        throw std::invalid_argument("shoot: lambda beyond the single-shooting cap");
    const double a = bisect_center_value(lambda, tau, p, N);
    auto traj = integrate(a, lambda, tau, p, N, true);

    // resolution follows the profile width ~ 1/sqrt(lambda)
    int n = opt.n_grid;
    const double want = 32.0 * std::sqrt(std::max(1.0, lambda));
    while (n < want && n < (1 << 20)) n *= 2;
    DomainPtr dom = build_ball(N, 1.0, n);

    std::vector<double> u(n);
    const double rstop = traj.r.back();
    for (int i = 0; i < n; ++i) {
        const double r = dom->x[i];
        if (r <= rstop) {
            u[i] = interp(traj.r, traj.u, r);
        } else {
            // linear ramp to the Dirichlet boundary from the last trusted sample
            u[i] = traj.u.back() * (1.0 - r) / std::max(1.0 - rstop, 1e-12);
        }
    }
    double res = 0;
    if (!newton_fixed_lambda(*dom, u, lambda, tau, p, &res))
        throw std::runtime_error("shoot: grid Newton did not converge");

    ShootResult out;
    out.lambda = lambda;
    out.tau = tau;
    out.p = p;
    out.N = N;
    double umin = 0;
    for (double x : u) umin = std::min(umin, x);
    out.u = Field(dom, std::move(u));
    out.center_value = out.u.values()[0];
    out.mass = out.u.mass();
    out.energy = out.u.energy(tau, p);
    out.ode_residual = res / (1.0 + std::sqrt(out.u.dirichlet()));
    out.positive = umin > -1e-10 * out.u.linf();
    return out;
}

MassCurve mass_curve(double tau, double p, int N, const std::vector<double>& lambda_grid,
                     const ShootOptions& opt) {
    MassCurve c;
    c.tau = tau;
    c.p = p;
    c.N = N;
    for (double lam : lambda_grid) {
        try {
            ShootResult s = shoot(lam, tau, p, N, opt);
            c.lambda_samples.push_back(lam);
            c.M_values.push_back(s.mass);
            c.E_values.push_back(s.energy);
            c.u0_values.push_back(s.center_value);
            c.residuals.push_back(s.ode_residual);
        } catch (const std::exception&) {
            // recorded as a gap
        }
    }
    // detect monotone runs of the sampled masses
    const std::size_t m = c.M_values.size();
    std::size_t start = 0;
    for (std::size_t i = 1; i <= m; ++i) {
        const bool flip = i == m || ((i >= 2) && ((c.M_values[i] > c.M_values[i - 1]) !=
                                                  (c.M_values[i - 1] > c.M_values[i - 2])));
        if (flip && i - start >= 1) {
            MonotoneSegment seg;
            seg.begin = start;
            seg.end = i - 1;
            seg.increasing = c.M_values[i - 1] > c.M_values[start];
            c.monotone_segments.push_back(seg);
            start = i - 1;
        }
    }
    return c;
}

std::vector<double> default_lambda_grid(double p, int N, double lambda_max, int count) {
    // geometric refinement toward -lambda_1 where the branch bifurcates
    DomainPtr probe = build_ball(N, 1.0, 512);
    const double lam1 = lambda1(probe);
    std::vector<double> grid(count);
    const double eta0 = 1e-4;
    for (int i = 0; i < count; ++i) {
        const double t = static_cast<double>(i) / (count - 1);
        const double eta = eta0 * std::pow((lambda_max + lam1) / (lam1 * eta0), t);
        grid[i] = -lam1 + eta * lam1;
        if (grid[i] > lambda_max) grid[i] = lambda_max;
    }
    grid.back() = lambda_max;
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
}

namespace {

ShootResult bisect_crossing(double mu, double tau, double p, int N, double lam_lo, double lam_hi,
                            double M_lo, const ShootOptions& opt) {
    // bracketed bisection of M(lambda) = mu on a monotone stretch
    const bool increasing_through = M_lo < mu;
    ShootResult best;
    for (int it = 0; it < 60; ++it) {
        const double lam = 0.5 * (lam_lo + lam_hi);
        best = shoot(lam, tau, p, N, opt);
        const bool below = best.mass < mu;
        if (below == increasing_through) lam_lo = lam;
        else lam_hi = lam;
        if (std::abs(best.mass - mu) < 1e-9 * mu) break;
    }
    return best;
}

} // namespace

TwoSolutions find_two_positive(double mu, double tau, double p, int N, const ShootOptions& opt) {
    ExponentData e = exponents(p, N);
    if (e.regime != Regime::supercritical)
        throw std::invalid_argument("find_two_positive: supercritical regime required");
    TwoSolutions out;
    out.mu = mu;
    auto grid = default_lambda_grid(p, N, opt.lambda_cap * 0.8, 48);
    MassCurve c = mass_curve(tau, p, N, grid, opt);
    const std::size_t m = c.M_values.size();
    if (m < 4) return out;

    std::vector<std::pair<std::size_t, std::size_t>> brackets;
    for (std::size_t i = 1; i < m; ++i) {
        const double f0 = c.M_values[i - 1] - mu, f1 = c.M_values[i] - mu;
        if (f0 == 0 || (f0 < 0) != (f1 < 0)) brackets.push_back({i - 1, i});
    }
    int count = static_cast<int>(brackets.size());

    // soliton-tail extension: in the supercritical regime the curve keeps
    // decreasing like lambda^{2/(p-2)-N/2} past the computed grid
    const double tail_exp = 2.0 / (p - 2.0) - N / 2.0; // < 0 here
    bool tail_crossing = false;
    if (!c.M_values.empty() && mu < c.M_values.back() &&
        c.M_values.back() < *std::max_element(c.M_values.begin(), c.M_values.end())) {
        tail_crossing = true;
        ++count;
    }
    out.count_verified = count;
    if (count < 2) return out;

    out.u_low = bisect_crossing(mu, tau, p, N, c.lambda_samples[brackets.front().first],
                                c.lambda_samples[brackets.front().second],
                                c.M_values[brackets.front().first], opt);
    if (tail_crossing) {
        const double lam_ref = c.lambda_samples.back();
        const double lam_ext = lam_ref * std::pow(c.M_values.back() / mu, -1.0 / tail_exp);
        ShootResult ext;
        ext.lambda = lam_ext;
        ext.tau = tau;
        ext.p = p;
        ext.N = N;
        ext.mass = mu;
        ext.energy = c.E_values.back() * std::pow(lam_ext / lam_ref, p / (p - 2.0) - N / 2.0);
        ext.center_value = c.u0_values.back() * std::pow(lam_ext / lam_ref, 1.0 / (p - 2.0));
        ext.positive = true;
        ext.extended = true;
        out.u_high = std::move(ext);
    } else {
        out.u_high = bisect_crossing(mu, tau, p, N, c.lambda_samples[brackets.back().first],
                                     c.lambda_samples[brackets.back().second],
                                     c.M_values[brackets.back().first], opt);
    }
    out.ok = out.u_low.lambda < out.u_high.lambda;
    return out;
}

double pohozaev_check(const Field& profile, double p) {
    const Domain& d = profile.domain();
    const double tail = std::abs(profile.values().back());
    if (tail > 1e-8 * std::max(1.0, profile.linf()))
        throw std::invalid_argument("pohozaev_check: profile not decayed at the boundary");
    const int N = d.dim;
    const int n = d.n_grid;
    const double h = d.h;
    const bool ball = d.kind == DomainKind::ball;
    // 4th-order derivative and Simpson quadrature; the grid stiffness/mass
    // forms are only second order, not enough for the identity check
    auto uat = [&](int i) -> double {
        if (i >= n) return 0.0;                    // Dirichlet side, decayed anyway
        if (i < 0) return ball ? profile.values()[-i] : 0.0; // even reflection at r=0
        return profile.values()[i];
    };
    auto du = [&](int i) {
        return (-uat(i + 2) + 8 * uat(i + 1) - 8 * uat(i - 1) + uat(i - 2)) / (12.0 * h);
    };
    const double sigma = ball ? d.surface : 1.0;
    auto wgt = [&](int i) { return ball ? sigma * std::pow(d.x[i], N - 1) : 1.0; };
    double D = 0, M = 0, P = 0;
    // composite Simpson over the nodes; the decayed tail makes the parity
    // fix-up at the last interval irrelevant
    for (int i = 0; i < n; ++i) {
        double s = (i == 0 || i == n - 1) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        const double w = s * h / 3.0 * wgt(i);
        const double ui = uat(i), dui = du(i);
        D += w * dui * dui;
        M += w * ui * ui;
        P += w * std::pow(std::abs(ui), p);
    }
    return std::abs((N - 2) * 0.5 * D + N * 0.5 * M - N / p * P) / P;
}

Field rescale_to_soliton_frame(const ShootResult& s, int n_grid) {
    if (s.extended || s.u.empty())
        throw std::invalid_argument("rescale_to_soliton_frame: no computed profile");
    const double lam = s.lambda;
    if (!(lam > 0)) throw std::invalid_argument("rescale_to_soliton_frame: lambda must be positive");
    const double R = std::sqrt(lam);
    DomainPtr big = build_ball(s.N, R, n_grid);
    const Domain& small = s.u.domain();
    const double amp = std::pow(lam, -1.0 / (s.p - 2.0)) * std::pow(s.tau, 1.0 / (s.p - 2.0));
    std::vector<double> v(n_grid);
    for (int i = 0; i < n_grid; ++i) {
        const double rr = big->x[i] / R; // back to [0,1)
        const double pos = rr / small.h;
        const int k = std::min(static_cast<int>(pos), small.n_grid - 1);
        const double t = pos - k;
        const double uk = s.u.values()[k];
        const double uk1 = (k + 1 < small.n_grid) ? s.u.values()[k + 1] : 0.0;
        v[i] = amp * ((1 - t) * uk + t * uk1);
    }
    return Field(big, std::move(v));
}

} // namespace massflow

#include "massflow/gn.hpp"

#include "massflow/field.hpp"
#include "massflow/ode.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace massflow {

namespace {

constexpr double kPi = 3.14159265358979323846;

double surface_area(int N) { return N == 1 ? 2.0 : (N == 2 ? 2.0 * kPi : 4.0 * kPi); }

// int_0^inf f(r) r^{N-1} dr by composite Simpson on [0, R]
template <class F>
double simpson_radial(F f, int N, double R, int m) {
    if (m % 2) ++m;
    const double h = R / m;
    double s = 0;
    for (int i = 0; i <= m; ++i) {
        double r = i * h;
        double w = (i == 0 || i == m) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        s += w * f(r) * std::pow(r, N - 1);
    }
    return s * h / 3.0;
}

SolitonData soliton_1d_closed_form(double p) {
    // Q(x) = (p/2)^{1/(p-2)} sech^{2/(p-2)}((p-2) x / 2)
    const double amp = std::pow(p / 2.0, 1.0 / (p - 2.0));
    const double a = (p - 2.0) / 2.0;
    const double e = 2.0 / (p - 2.0);
    SolitonData s;
    s.p = p;
    s.N = 1;
    s.center_value = amp;
    s.profile = [amp, a, e](double r) { return amp * std::pow(1.0 / std::cosh(a * r), e); };
    auto dprofile = [amp, a, e](double r) {
        double sech = 1.0 / std::cosh(a * r);
        return -amp * e * a * std::tanh(a * r) * std::pow(sech, e);
    };
    const double R = std::min(60.0 / (a * e) + 20.0, 2000.0);
    const int m = 400000;
    s.mass = 2.0 * simpson_radial([&](double r) { double q = s.profile(r); return q * q; }, 1, R, m);
    s.lp = 2.0 * simpson_radial([&](double r) { return std::pow(s.profile(r), p); }, 1, R, m);
    s.dirichlet = 2.0 * simpson_radial([&](double r) { double d = dprofile(r); return d * d; }, 1, R, m);
    s.pohozaev_residual =
        std::abs(-0.5 * s.dirichlet + 0.5 * s.mass - s.lp / p) / s.lp;
    return s;
}

// decay-shooting for N >= 2; also usable for N = 1 as a cross-check
SolitonData soliton_shoot(double p, int N) {
    const double rmax = 40.0;
    auto rhs = [p, N](double r, const OdeState<2>& y, OdeState<2>& dy) {
        const double u = y[0], v = y[1];
        const double g = u - std::pow(std::abs(u), p - 2) * u;
        dy[0] = v;
        dy[1] = (r < 1e-12) ? g / N : (-(N - 1) / r * v + g);
    };
    using R45 = Rk45<2, decltype(rhs)>;

    // classify: -1 crossed zero, +1 turned up while positive, 0 reached rmax
    auto classify = [&](double a) {
        R45 ode(rhs, 1e-12, 1e-14 * a);
        OdeState<2> y{a, 0.0};
        double r = 0, h = 1e-4;
        while (r < rmax) {
            if (!ode.step(r, y, h, 0.05)) break;
            if (y[0] <= 0) return -1;
            if (y[1] > 0) return +1;
        }
        return 0;
    };
    double alo = 1.0 + 1e-3, ahi = 2.0;
    while (classify(ahi) >= 0) {
        ahi *= 2;
        if (ahi > 1e6) throw std::runtime_error("ground_soliton: no crossing bracket");
    }
    for (int it = 0; it < 200 && (ahi - alo) > 1e-16 * ahi; ++it) {
        double am = 0.5 * (alo + ahi);
        (classify(am) < 0 ? ahi : alo) = am;
    }
    const double a = alo;

    // integrate once accumulating the radial integrals, stop at turn-up/crossing
    SolitonData s;
    s.p = p;
    s.N = N;
    s.center_value = a;
    const double sig = surface_area(N);
    auto rhs5 = [p, N, sig](double r, const OdeState<5>& y, OdeState<5>& dy) {
        const double u = y[0], v = y[1];
        const double g = u - std::pow(std::abs(u), p - 2) * u;
        const double w = (N == 1) ? sig : sig * std::pow(r, N - 1);
        dy[0] = v;
        dy[1] = (r < 1e-12) ? g / N : (-(N - 1) / r * v + g);
        dy[2] = w * u * u;
        dy[3] = w * v * v;
        dy[4] = w * std::pow(std::abs(u), p);
    };
    Rk45<5, decltype(rhs5)> ode(rhs5, 1e-12, 1e-15 * a);
    OdeState<5> y{a, 0, 0, 0, 0};
    double r = 0, h = 1e-4;
    while (r < rmax) {
        if (!ode.step(r, y, h, 0.02)) break;
        if (y[0] <= 1e-12 * a || y[1] > 0) break;
    }
    s.mass = y[2];
    s.dirichlet = y[3];
    s.lp = y[4];
    s.pohozaev_residual =
        std::abs((N - 2) * 0.5 * s.dirichlet + N * 0.5 * s.mass - N / p * s.lp) / s.lp;
    // pointwise profile via a second dense integration, tabulated
    auto table = std::make_shared<std::vector<std::pair<double, double>>>();
    {
        Rk45<2, decltype(rhs)> o2(rhs, 1e-12, 1e-14 * a);
        OdeState<2> z{a, 0};
        double rr = 0, hh = 1e-4;
        table->push_back({0.0, a});
        while (rr < rmax) {
            if (!o2.step(rr, z, hh, 0.01)) break;
            table->push_back({rr, z[0]});
            if (z[0] <= 1e-12 * a || z[1] > 0) break;
        }
    }
    s.profile = [table](double rr) {
        if (rr <= 0) return table->front().second;
        auto it = std::lower_bound(table->begin(), table->end(), rr,
                                   [](const auto& e, double v) { return e.first < v; });
        if (it == table->end()) return 0.0;
        if (it == table->begin()) return it->second;
        auto p0 = *(it - 1);
        double t = (rr - p0.first) / (it->first - p0.first);
        return (1 - t) * p0.second + t * it->second;
    };
    return s;
}

std::mutex g_soliton_mutex;
std::map<std::pair<double, int>, SolitonData> g_soliton_cache;

} // namespace

const SolitonData& ground_soliton(double p, int N) {
    ExponentData e = exponents(p, N); // validates range
    (void)e;
    std::lock_guard<std::mutex> lock(g_soliton_mutex);
    auto key = std::make_pair(p, N);
    auto it = g_soliton_cache.find(key);
    if (it != g_soliton_cache.end()) return it->second;
    SolitonData s = (N == 1) ? soliton_1d_closed_form(p) : soliton_shoot(p, N);
    return g_soliton_cache.emplace(key, std::move(s)).first->second;
}

double gn_constant(double p, int N) {
    const SolitonData& s = ground_soliton(p, N);
    const double g = N * (0.5 - 1.0 / p);
    return std::pow(s.lp, 1.0 / p) /
           (std::pow(s.dirichlet, g / 2.0) * std::pow(s.mass, (1.0 - g) / 2.0));
}

double sobolev_constant(const DomainPtr& dom, double p) {
    // maximize |u|_p / |grad u| ; fixed point of u <- B^{-1}(M |u|^{p-2}u) up to scaling
    const int n = dom->n_grid;
    SpdTridiagFactor B(dom->stiffness);
    std::vector<double> u(n), rhs(n);
    for (int i = 0; i < n; ++i) u[i] = 1.0; // positive start -> positive extremal
    double prev = 0;
    for (int it = 0; it < 500; ++it) {
        for (int i = 0; i < n; ++i)
            rhs[i] = dom->quad_w[i] * std::pow(std::abs(u[i]), p - 2) * u[i];
        B.solve(rhs.data(), u.data());
        double nn = std::sqrt(mass_of(*dom, u));
        for (auto& x : u) x /= nn;
        double q = std::pow(lp_of(*dom, u, p), 1.0 / p) / std::sqrt(dirichlet_of(*dom, u));
        if (std::abs(q - prev) < 1e-12 * q) return q;
        prev = q;
    }
    return prev;
}

double mu_bar(int N) {
    const double pc = 2.0 + 4.0 / N;
    const double C = gn_constant(pc, N);
    return std::pow(pc / (2.0 * std::pow(C, pc)), 2.0 / (pc - 2.0));
}

ThetaResult theta_set_and_rho(double mu, int k, double p, int N, double lambda_k) {
    (void)k;
    ExponentData e = exponents(p, N);
    if (e.regime != Regime::supercritical)
        throw std::invalid_argument("theta_set_and_rho: supercritical regime required");
    const double g = e.gamma_p, pg = p * g;
    const double C = gn_constant(p, N);
    ThetaResult out;
    out.rho_mu = std::pow(1.0 / (g * std::pow(C, p)), 2.0 / (pg - 2.0)) *
                 std::pow(mu, -p * (1.0 - g) / (pg - 2.0));
    out.f_max = (0.5 - 1.0 / pg) * out.rho_mu;
    out.margin = 2.0 * out.f_max - lambda_k * mu;
    out.nonempty = out.margin > 0;
    return out;
}

double mu2_threshold(double p, int N, double lambda_2) {
    double lo = 1e-12, hi = 1.0;
    auto nonempty = [&](double mu) { return theta_set_and_rho(mu, 2, p, N, lambda_2).nonempty; };
    if (!nonempty(lo)) throw std::runtime_error("mu2_threshold: Theta empty even at tiny mu");
    while (nonempty(hi)) {
        hi *= 2;
        if (hi > 1e12) throw std::runtime_error("mu2_threshold: no upper bracket");
    }
    for (int it = 0; it < 200 && (hi - lo) > 1e-14 * hi; ++it) {
        double mid = 0.5 * (lo + hi);
        (nonempty(mid) ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double gamma1_exterior_radius(double mu, double p, int N) {
    ExponentData e = exponents(p, N);
    const double g = e.gamma_p, pg = p * g;
    const double C = gn_constant(p, N);
    return std::pow(p / (2.0 * std::pow(C, p)), 2.0 / (pg - 2.0)) *
           std::pow(mu, -p * (1.0 - g) / (pg - 2.0));
}

} // namespace massflow

#include "massflow/minmax.hpp"

#include "massflow/morse.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace massflow {

namespace {

double measure(const Domain& d) {
    if (d.kind == DomainKind::interval) return d.b - d.a;
    return d.surface * std::pow(d.b, d.dim) / d.dim;
}

std::vector<std::vector<double>> icosahedral_half(int min_pairs) {
    const double ph = 0.5 * (1.0 + std::sqrt(5.0));
    std::vector<std::array<double, 3>> v = {{0, 1, ph},  {0, -1, ph},  {0, 1, -ph}, {0, -1, -ph},
                                            {1, ph, 0},  {-1, ph, 0},  {1, -ph, 0}, {-1, -ph, 0},
                                            {ph, 0, 1},  {ph, 0, -1},  {-ph, 0, 1}, {-ph, 0, -1}};
    for (auto& x : v) {
        double n = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
        for (auto& c : x) c /= n;
    }
    // faces = triples at minimal pairwise distance
    auto d2 = [&](int i, int j) {
        double s = 0;
        for (int c = 0; c < 3; ++c) s += (v[i][c] - v[j][c]) * (v[i][c] - v[j][c]);
        return s;
    };
    double emin = 1e9;
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = i + 1; j < v.size(); ++j) emin = std::min(emin, d2(i, j));
    std::vector<std::array<int, 3>> faces;
    for (int i = 0; i < 12; ++i)
        for (int j = i + 1; j < 12; ++j)
            for (int l = j + 1; l < 12; ++l)
                if (d2(i, j) < emin * 1.1 && d2(i, l) < emin * 1.1 && d2(j, l) < emin * 1.1)
                    faces.push_back({i, j, l});

    auto key = [](const std::array<double, 3>& x) {
        auto q = [](double t) { return std::llround(t * 1e9); };
        return std::to_string(q(x[0])) + "," + std::to_string(q(x[1])) + "," + std::to_string(q(x[2]));
    };
    while (static_cast<int>(v.size()) / 2 < min_pairs) {
        std::map<std::string, int> index;
        std::vector<std::array<double, 3>> nv;
        auto add = [&](std::array<double, 3> x) {
            double n = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
            for (auto& c : x) c /= n;
            auto it = index.find(key(x));
            if (it != index.end()) return it->second;
            index[key(x)] = static_cast<int>(nv.size());
            nv.push_back(x);
            return static_cast<int>(nv.size()) - 1;
        };
        std::vector<std::array<int, 3>> nf;
        for (auto& f : faces) {
            std::array<double, 3> a = v[f[0]], b = v[f[1]], c = v[f[2]];
            auto mid = [&](const std::array<double, 3>& x, const std::array<double, 3>& y) {
                return std::array<double, 3>{0.5 * (x[0] + y[0]), 0.5 * (x[1] + y[1]), 0.5 * (x[2] + y[2])};
            };
            int ia = add(a), ib = add(b), ic = add(c);
            int ab = add(mid(a, b)), bc = add(mid(b, c)), ca = add(mid(c, a));
            nf.push_back({ia, ab, ca});
            nf.push_back({ib, bc, ab});
            nf.push_back({ic, ca, bc});
            nf.push_back({ab, bc, ca});
        }
        v = std::move(nv);
        faces = std::move(nf);
    }
    // one representative per antipodal pair
    std::vector<std::vector<double>> reps;
    std::map<std::string, bool> seen;
    for (auto& x : v) {
        std::array<double, 3> m{-x[0], -x[1], -x[2]};
        if (seen.count(key(x)) || seen.count(key(m))) continue;
        seen[key(x)] = true;
        reps.push_back({x[0], x[1], x[2]});
    }
    return reps;
}

} // namespace

std::vector<std::vector<double>> sphere_samples(int k, int pairs) {
    if (k == 1) return {{1.0}};
    if (k == 2) {
        std::vector<std::vector<double>> reps(pairs);
        for (int j = 0; j < pairs; ++j) {
            const double th = 3.14159265358979323846 * (j + 0.5) / pairs;
            reps[j] = {std::cos(th), std::sin(th)};
        }
        return reps;
    }
    if (k == 3) return icosahedral_half(pairs);
    throw std::invalid_argument("sphere_samples: k in {1,2,3} supported");
}

GenusSet build_M_k(int k, double mu, const SpectralData& spec, double delta, double p) {
    if (k > static_cast<int>(spec.lambda.size()))
        throw std::invalid_argument("build_M_k: not enough eigenpairs");
    const Domain& d = *spec.domain;
    GenusSet out;
    out.k = k;
    out.mu = mu;
    out.sphere_points = sphere_samples(k, 64);
    const double smu = std::sqrt(mu);
    out.sup_energy = -1e300;
    out.sup_energy_on_Sstar = -1e300;
    for (const auto& s : out.sphere_points) {
        std::vector<double> v(d.n_grid, 0.0);
        for (int j = 0; j < k; ++j)
            for (int i = 0; i < d.n_grid; ++i) v[i] += s[j] * smu * spec.phi[j][i];
        Field f(spec.domain, std::move(v));
        const double E = f.energy(1.0, p);
        out.sup_energy = std::max(out.sup_energy, E);
        if (cone_distances(f, delta).in_Sstar) out.sup_energy_on_Sstar = std::max(out.sup_energy_on_Sstar, E);
        out.members.push_back(std::move(f));
    }
    return out;
}

namespace {

std::vector<double> bump_vector(const Domain& d, double center, double halfwidth, double mu) {
    std::vector<double> v(d.n_grid, 0.0);
    for (int i = 0; i < d.n_grid; ++i) {
        const double z = (d.x[i] - center) / halfwidth;
        if (std::abs(z) < 1.0) v[i] = std::exp(-1.0 / (1.0 - z * z));
    }
    double m = mass_of(d, v);
    if (!(m > 0)) throw std::runtime_error("bump_vector: unresolved bump");
    normalize_mass(d, v, mu);
    return v;
}

} // namespace

Gamma1 build_gamma1(int k, double mu, const DomainPtr& dom, const SpectralData& spec, double p,
                    const Gamma1Options& opt) {
    const Domain& d = *dom;
    const ExponentData e = exponents(p, d.dim);
    if (e.regime != Regime::supercritical)
        throw std::invalid_argument("build_gamma1: supercritical regime required");
    const double span = d.b - d.a;
    const double base_half = span / (4.0 * k);
    const double wf = opt.width_floor > 0 ? opt.width_floor : 10.0 * d.h;
    const double gmu = gamma1_exterior_radius(mu, p, d.dim);

    auto reps = sphere_samples(k, 16);
    auto make = [&](double t) {
        std::vector<Field> bumps;
        for (int i = 0; i < k; ++i) {
            const double c = d.a + (i + 0.5) * span / k;
            bumps.emplace_back(dom, bump_vector(d, c, base_half / t, mu));
        }
        return bumps;
    };
    auto sphere_stats = [&](const std::vector<Field>& bumps, double tau) {
        double maxE = -1e300, minD = 1e300;
        std::vector<double> v(d.n_grid);
        for (const auto& s : reps) {
            for (int i = 0; i < d.n_grid; ++i) {
                double x = 0;
                for (int j = 0; j < k; ++j) x += s[j] * bumps[j].values()[i];
                v[i] = x;
            }
            maxE = std::max(maxE, energy_of(d, v, tau, p));
            minD = std::min(minD, dirichlet_of(d, v));
        }
        return std::make_pair(maxE, minD);
    };
    const double EM = [&] {
        GenusSet mk = build_M_k(k, mu, spec, 0.0, p);
        double m = -1e300;
        for (auto& f : mk.members)
            m = std::max(m, f.energy(opt.tau_min, p)); // tau_min gives the largest values
        return m;
    }();

    auto strict_ok = [&](double t) {
        auto bumps = make(t);
        auto [e0, d0] = sphere_stats(bumps, opt.tau_min);
        auto [e1, d1] = sphere_stats(bumps, 1.0);
        return std::max(e0, e1) < EM && std::min(d0, d1) > 1.2 * gmu;
    };

    const double t_cap = base_half / wf;
    double t = 1.0;
    while (t <= t_cap && !strict_ok(t)) t *= 2.0;
    Gamma1 out;
    if (t <= t_cap) {
        // bisect down to a near-minimal strict t and keep a small margin
        double lo = t / 2, hi = t;
        for (int it = 0; it < 30; ++it) {
            double mid = 0.5 * (lo + hi);
            (strict_ok(mid) ? hi : lo) = mid;
        }
        out.t_scale = 1.05 * hi;
        out.strict_rule = true;
    } else if (opt.allow_relaxed) {
        // exterior-only fallback: widest bumps outside B_{g(mu)}
        double tr = 1.0;
        bool found = false;
        for (; tr <= t_cap; tr *= 1.25) {
            auto bumps = make(tr);
            auto [e1, d1] = sphere_stats(bumps, 1.0);
            (void)e1;
            if (d1 > 1.5 * gmu) {
                found = true;
                break;
            }
        }
        if (!found) throw std::runtime_error("build_gamma1: cannot exit B_{g(mu)} at resolvable widths");
        out.t_scale = tr;
        out.strict_rule = false;
    } else {
        throw std::runtime_error("build_gamma1: energy condition needs unresolvable bump widths");
    }
    out.bumps = make(out.t_scale);
    auto [e0, d0] = sphere_stats(out.bumps, opt.tau_min);
    auto [e1, d1] = sphere_stats(out.bumps, 1.0);
    out.max_energy = std::max(e0, e1);
    out.min_dirichlet = std::min(d0, d1);
    return out;
}

namespace {

double analytic_genus_lower(double mu, int k, double p, int N, double lambda_k, double h) {
    const ExponentData e = exponents(p, N);
    const double g = e.gamma_p, pg = p * g;
    const double C = gn_constant(p, N);
    const double A = std::pow(C, p) / p * std::pow(mu, p * (1 - g) / 2.0);
    auto f = [&](double t) { return 0.5 * t - A * std::pow(t, pg / 2.0); };
    const double t0 = lambda_k * mu * (1.0 - 5.0 * h);
    if (pg < 2.0) {
        const double tmu = std::pow(1.0 / (g * std::pow(C, p)), 2.0 / (pg - 2.0)) *
                           std::pow(mu, p * (1 - g) / (2.0 - pg));
        return f(std::max(t0, tmu));
    }
    if (pg == 2.0) return f(t0);
    return f(t0); // supercritical truncated variant: value at the forced radius
}

SolutionRecord record_from(const Field& u, const NewtonResult& nr, double mu, double tau, double p,
                           int k, const std::string& kind) {
    SolutionRecord r;
    r.kind = kind;
    r.mu = mu;
    r.tau = tau;
    r.p = p;
    r.N = u.domain().dim;
    r.k = k;
    r.lambda = nr.lambda;
    r.energy = nr.u.energy(tau, p);
    r.residual = nr.residual / (1.0 + std::sqrt(nr.u.dirichlet()));
    r.mass_err = std::abs(nr.u.mass() - mu);
    r.sign_changes = nr.u.sign_changes();
    try {
        LinearizationSpectrum ls = morse_index(nr.u, nr.lambda, tau, p);
        r.morse = ls.morse_index;
        r.constrained_morse = ls.constrained_index;
    } catch (const std::exception&) {
        r.morse = r.constrained_morse = -1;
    }
    return r;
}

} // namespace

MinmaxOutcome estimate_genus_level(int k, double mu, double delta, const DomainPtr& dom,
                                   const GenusOptions& opt) {
    MinmaxOutcome out;
    const Domain& d = *dom;
    const double p = opt.p;
    const ExponentData e = exponents(p, d.dim);
    SpectralData spec = dirichlet_eigenpairs(dom, std::max(k + 2, 8));
    const double lam1 = spec.lambda[0], lamk = spec.lambda[k - 1];

    if (opt.enforce_gates) {
        if (e.regime == Regime::critical && mu >= mu_bar(d.dim))
            throw std::domain_error("genus: critical-mass gate mu < mu_bar violated (Theorem 7.3 hypothesis)");
        if (e.regime == Regime::supercritical) {
            // sufficient condition for the truncated genus level to separate
            const double g = e.gamma_p, pg = p * g;
            const double C = gn_constant(p, d.dim);
            const double rho_m = std::pow(1.0 / (g * std::pow(C, p)), 2.0 / (pg - 2.0)) *
                                 std::pow(mu, -p * (1.0 - g) / (pg - 2.0));
            const double fm = (0.5 - 1.0 / pg) * rho_m;
            const double extra = 2.0 / p * std::pow(measure(d), (2.0 - p) / 2.0) * std::pow(mu, p / 2.0);
            if (!(2.0 * fm - lamk * mu + extra > 0))
                throw std::domain_error("genus: supercritical truncation condition violated");
        }
    }

    GenusSet A = build_M_k(k, mu, spec, delta, p);
    const double rho = opt.rho_margin * lamk * mu;
    OperatorConfig cfg;
    cfg.tau = opt.tau;
    cfg.p = p;
    cfg.mu = mu;
    cfg.rho = rho;
    cfg.lambda_bar = select_lambda_bar(rho, mu, p, dom);
    ConstrainedOperator op(dom, cfg);

    const double tol = opt.flow_tol_factor * std::sqrt(lam1 * mu);
    const int m = static_cast<int>(A.members.size());
    std::vector<std::vector<double>> U(m);
    std::vector<double> E(m), dt(m, 0.02 * std::sqrt(mu));
    std::vector<bool> done(m, false);
    for (int i = 0; i < m; ++i) {
        U[i] = A.members[i].values();
        E[i] = energy_of(d, U[i], opt.tau, p);
    }
    FlowConfig fcfg;
    fcfg.tol_pg = tol;
    fcfg.dt_max = 0.2 * std::sqrt(mu);

    double level = 1e300;
    long total = 0;
    std::vector<double> V;
    const int chunk = 40;
    while (total < opt.max_steps) {
        bool all_done = true;
        for (int i = 0; i < m; ++i) {
            if (done[i]) continue;
            for (int s = 0; s < chunk; ++s) {
                const double used = flow_step(d, op, fcfg, U[i], E[i], dt[i]);
                ++total;
                if (used == 0.0) break;
            }
            const double nV = op.pseudogradient(U[i], V);
            if (nV <= tol) done[i] = true;
            else all_done = false;
        }
        double sup = -1e300;
        for (int i = 0; i < m; ++i)
            if (cone_distances(d, U[i], delta).in_Sstar) sup = std::max(sup, E[i]);
        if (sup > -1e300) level = std::min(level, sup);
        if (all_done) break;
    }

    // localized terminal: smallest |V| among members still in S*(delta)
    int best = -1;
    double bestV = 1e300;
    for (int i = 0; i < m; ++i) {
        if (!cone_distances(d, U[i], delta).in_Sstar) continue;
        const double nV = op.pseudogradient(U[i], V);
        if (nV < bestV) {
            bestV = nV;
            best = i;
        }
    }
    out.level.kind = LevelKind::genus;
    out.level.k = k;
    out.level.tau = opt.tau;
    out.level.mu = mu;
    out.level.delta = delta;
    out.level.lower = analytic_genus_lower(mu, k, p, d.dim, lamk, d.h);
    out.level.upper = 0.5 * lamk * mu; // sup over M_k of E is at most this
    if (best < 0) {
        out.ok = false;
        out.note = "all terminals entered D*_delta";
        return out;
    }
    Field term(dom, U[best]);
    const double lam_guess = (opt.tau * term.lp(p) - term.dirichlet()) / mu;
    NewtonResult nr = newton_polish(term, lam_guess, mu, opt.tau, p);
    out.terminal = nr.u;
    out.level.value = (level < 1e300) ? std::min(level, nr.u.energy(opt.tau, p)) : nr.u.energy(opt.tau, p);
    out.record = record_from(term, nr, mu, opt.tau, p, k, "genus");
    out.ok = nr.converged && out.record.sign_changes >= 1;
    if (!nr.converged) out.note = "newton polish did not converge";
    else if (out.record.sign_changes < 1) out.note = "terminal is one-signed";
    return out;
}

// ---------------------------------------------------------------------------
// saddle paths
// ---------------------------------------------------------------------------

namespace {

struct FrameBasis {
    std::vector<std::vector<double>> q; // L2-orthonormal vectors
    std::vector<std::vector<double>> E0, F0; // coordinates of start/target frames (columns)
};

std::vector<std::vector<double>> complete_frame(const std::vector<std::vector<double>>& cols, int dim) {
    std::vector<std::vector<double>> out = cols;
    for (int ei = 0; ei < dim && static_cast<int>(out.size()) < dim; ++ei) {
        std::vector<double> v(dim, 0.0);
        v[ei] = 1.0;
        for (const auto& c : out) {
            double dp = std::inner_product(c.begin(), c.end(), v.begin(), 0.0);
            for (int i = 0; i < dim; ++i) v[i] -= dp * c[i];
        }
        double nv = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
        if (nv > 1e-8) {
            for (auto& x : v) x /= nv;
            out.push_back(v);
        }
    }
    if (static_cast<int>(out.size()) != dim) throw std::runtime_error("complete_frame: rank deficiency");
    return out;
}

// Givens decomposition of R in SO(d): list of (i, j, theta) whose product is R
struct GivensPath {
    int dim = 0;
    std::vector<std::array<double, 3>> rots; // (i, j, theta)

    // apply the partial product R(t), t in [0,1], to vector a
    std::vector<double> apply(double t, std::vector<double> a) const {
        const double total = static_cast<double>(rots.size());
        const double pos = t * total;
        for (std::size_t r = 0; r < rots.size(); ++r) {
            double frac = std::clamp(pos - static_cast<double>(r), 0.0, 1.0);
            if (frac <= 0) break;
            const int i = static_cast<int>(rots[r][0]), j = static_cast<int>(rots[r][1]);
            const double th = rots[r][2] * frac;
            const double c = std::cos(th), s = std::sin(th);
            const double ai = a[i], aj = a[j];
            a[i] = c * ai - s * aj;
            a[j] = s * ai + c * aj;
        }
        return a;
    }
};

GivensPath givens_decompose(std::vector<std::vector<double>> R) {
    // R given column-major: R[j][i] = entry (i, j). Reduce to identity by
    // left-multiplying rotations; the inverse sequence reproduces R.
    const int dim = static_cast<int>(R.size());
    GivensPath path;
    path.dim = dim;
    std::vector<std::array<double, 3>> seq;
    for (int j = 0; j < dim; ++j) {
        for (int i = dim - 1; i > j; --i) {
            const double a = R[j][i - 1], b = R[j][i];
            if (std::abs(b) < 1e-15) continue;
            const double r = std::hypot(a, b);
            const double c = a / r, s = -b / r;
            // rotate rows i-1, i of all columns
            for (int col = 0; col < dim; ++col) {
                const double x = R[col][i - 1], y = R[col][i];
                R[col][i - 1] = c * x - s * y;
                R[col][i] = s * x + c * y;
            }
            seq.push_back({static_cast<double>(i - 1), static_cast<double>(i), std::atan2(-s, c)});
        }
    }
    // R should now be (close to) identity; reverse order with inverse angles
    for (auto it = seq.rbegin(); it != seq.rend(); ++it)
        path.rots.push_back({(*it)[0], (*it)[1], -(*it)[2]});
    return path;
}

} // namespace

SaddleOutcome estimate_saddle_level(int k, double mu, double tau, const DomainPtr& dom,
                                    const SpectralData& spec, const SaddleOptions& opt,
                                    const SaddlePath* warm_start) {
    SaddleOutcome out;
    const Domain& d = *dom;
    const double p = opt.p;
    const double lam1 = spec.lambda[0];
    const double lamk = spec.lambda[k - 1];
    const double delta = opt.delta > 0 ? opt.delta : 0.5 * std::sqrt(lam1 * mu / 2.0);

    ThetaResult theta = theta_set_and_rho(mu, k, p, d.dim, lamk);
    if (!theta.nonempty)
        throw std::domain_error("saddle: Theta(mu) empty, mu >= mu_2 (eq. 9.1 gate)");

    out.path.k = k;
    out.path.s_grid = sphere_samples(k, opt.pairs);
    const int NS = static_cast<int>(out.path.s_grid.size());
    const int NT = opt.nt;
    out.path.t_grid.resize(NT);
    for (int i = 0; i < NT; ++i) out.path.t_grid[i] = static_cast<double>(i) / (NT - 1);

    Gamma1 g1;
    bool have_warm = warm_start && !warm_start->gamma.empty() &&
                     static_cast<int>(warm_start->gamma.size()) == NT &&
                     static_cast<int>(warm_start->gamma[0].size()) == NS;
    if (have_warm) {
        out.path = *warm_start;
    } else {
        Gamma1Options gopt;
        gopt.tau_min = opt.tau_min;
        g1 = build_gamma1(k, mu, dom, spec, p, gopt);
        // L2-orthonormal basis of span{sqrt(mu) phi_i ; w_i}
        std::vector<std::vector<double>> basis;
        const double smu = std::sqrt(mu);
        for (int j = 0; j < k; ++j) {
            std::vector<double> v(d.n_grid);
            for (int i = 0; i < d.n_grid; ++i) v[i] = smu * spec.phi[j][i];
            basis.push_back(std::move(v));
        }
        for (int j = 0; j < k; ++j) basis.push_back(g1.bumps[j].values());
        std::vector<std::vector<double>> q;
        for (auto& b : basis) {
            std::vector<double> v = b;
            for (const auto& qq : q) {
                const double dp = l2dot(d, qq, v);
                for (int i = 0; i < d.n_grid; ++i) v[i] -= dp * qq[i];
            }
            const double nv = std::sqrt(mass_of(d, v));
            if (nv > 1e-9 * std::sqrt(mass_of(d, b))) {
                for (auto& x : v) x /= nv;
                q.push_back(std::move(v));
            }
        }
        const int dim = static_cast<int>(q.size());
        auto coords = [&](const std::vector<double>& u) {
            std::vector<double> c(dim);
            for (int l = 0; l < dim; ++l) c[l] = l2dot(d, q[l], u) / smu;
            return c;
        };
        std::vector<std::vector<double>> Ecols, Fcols;
        for (int j = 0; j < k; ++j) Ecols.push_back(coords(basis[j]));
        for (int j = 0; j < k; ++j) Fcols.push_back(coords(g1.bumps[j].values()));
        auto Efull = complete_frame(Ecols, dim);
        auto Ffull = complete_frame(Fcols, dim);
        // det sign fix so R lands in SO(dim): flip one complementary column
        auto det_sign = [&](const std::vector<std::vector<double>>& M) {
            // LU-free small determinant via Gaussian elimination
            auto A = M;
            double sign = 1.0;
            for (int c = 0; c < dim; ++c) {
                int piv = c;
                for (int r = c + 1; r < dim; ++r)
                    if (std::abs(A[c][r]) > std::abs(A[c][piv])) piv = r;
                if (piv != c) {
                    for (int cc = 0; cc < dim; ++cc) std::swap(A[cc][c], A[cc][piv]);
                    sign = -sign;
                }
                if (A[c][c] < 0) sign = -sign;
                for (int r = c + 1; r < dim; ++r) {
                    const double f = A[c][r] / A[c][c];
                    for (int cc = c; cc < dim; ++cc) A[cc][r] -= f * A[cc][c];
                }
            }
            return sign;
        };
        if (det_sign(Efull) != det_sign(Ffull))
            for (auto& x : Ffull.back()) x = -x;
        // R = Ffull * Efull^T, column-major
        std::vector<std::vector<double>> R(dim, std::vector<double>(dim, 0.0));
        for (int cc = 0; cc < dim; ++cc)
            for (int rr = 0; rr < dim; ++rr) {
                double s = 0;
                for (int l = 0; l < dim; ++l) s += Ffull[l][rr] * Efull[l][cc];
                R[cc][rr] = s;
            }
        GivensPath gp = givens_decompose(R);

        out.path.gamma.assign(NT, std::vector<Field>(NS));
        for (int it = 0; it < NT; ++it) {
            for (int js = 0; js < NS; ++js) {
                std::vector<double> a(dim, 0.0);
                for (int j = 0; j < k; ++j)
                    for (int l = 0; l < dim; ++l) a[l] += out.path.s_grid[js][j] * Ecols[j][l];
                a = gp.apply(out.path.t_grid[it], a);
                std::vector<double> v(d.n_grid, 0.0);
                for (int l = 0; l < dim; ++l)
                    for (int i = 0; i < d.n_grid; ++i) v[i] += smu * a[l] * q[l][i];
                normalize_mass(d, v, mu);
                out.path.gamma[it][js] = Field(dom, std::move(v));
            }
        }
        out.path.endpoints0 = out.path.gamma.front();
        out.path.endpoints1 = out.path.gamma.back();
    }

    // ------- string optimization: flow the hot slices, reparametrize in t
    OperatorConfig cfg;
    cfg.tau = tau;
    cfg.p = p;
    cfg.mu = mu;
    cfg.lambda_bar = 0.0; // pure constrained gradient for descent
    ConstrainedOperator op(dom, cfg);
    FlowConfig fcfg;
    fcfg.tol_pg = 1e-10;
    fcfg.dt_max = 0.2 * std::sqrt(mu);

    auto& gam = out.path.gamma;
    std::vector<std::vector<double>> Eg(NT, std::vector<double>(NS));
    auto refresh_energy = [&](int i) {
        for (int j = 0; j < NS; ++j) Eg[i][j] = gam[i][j].energy(tau, p);
    };
    for (int i = 0; i < NT; ++i) refresh_energy(i);

    std::vector<double> V;
    double last_max = 1e300;
    int stable = 0;
    for (int sweep = 0; sweep < opt.sweeps; ++sweep) {
        std::vector<double> flat;
        flat.reserve((NT - 2) * NS);
        for (int i = 1; i < NT - 1; ++i)
            for (int j = 0; j < NS; ++j) flat.push_back(Eg[i][j]);
        std::sort(flat.begin(), flat.end());
        const double thr = flat[static_cast<std::size_t>((1.0 - opt.top_fraction) * (flat.size() - 1))];
        for (int i = 1; i < NT - 1; ++i) {
            for (int j = 0; j < NS; ++j) {
                if (Eg[i][j] < thr) continue;
                std::vector<double> u = gam[i][j].values();
                double E = Eg[i][j];
                double dt = 0.05 * std::sqrt(mu);
                for (int s = 0; s < opt.burst_steps; ++s)
                    if (flow_step(d, op, fcfg, u, E, dt) == 0.0) break;
                gam[i][j] = Field(dom, std::move(u));
                Eg[i][j] = E;
            }
        }
        if (sweep % 3 == 2) {
            // arc-length reparametrization of each s-column
            for (int j = 0; j < NS; ++j) {
                std::vector<double> cum(NT, 0.0);
                for (int i = 1; i < NT; ++i) {
                    double s2 = 0;
                    for (int l = 0; l < d.n_grid; ++l) {
                        const double diff = gam[i][j].values()[l] - gam[i - 1][j].values()[l];
                        s2 += d.quad_w[l] * diff * diff;
                    }
                    cum[i] = cum[i - 1] + std::sqrt(s2);
                }
                if (cum.back() < 1e-13) continue;
                std::vector<Field> col(NT);
                col[0] = gam[0][j];
                col[NT - 1] = gam[NT - 1][j];
                for (int i = 1; i < NT - 1; ++i) {
                    const double target = cum.back() * i / (NT - 1);
                    auto itc = std::upper_bound(cum.begin(), cum.end(), target);
                    int kk = std::clamp(static_cast<int>(itc - cum.begin()), 1, NT - 1);
                    const double a = (target - cum[kk - 1]) / std::max(cum[kk] - cum[kk - 1], 1e-30);
                    std::vector<double> v(d.n_grid);
                    for (int l = 0; l < d.n_grid; ++l)
                        v[l] = (1 - a) * gam[kk - 1][j].values()[l] + a * gam[kk][j].values()[l];
                    normalize_mass(d, v, mu);
                    col[i] = Field(dom, std::move(v));
                }
                for (int i = 0; i < NT; ++i) gam[i][j] = col[i];
            }
            for (int i = 0; i < NT; ++i) refresh_energy(i);
        }
        double mx = -1e300;
        for (int i = 0; i < NT; ++i)
            for (int j = 0; j < NS; ++j) mx = std::max(mx, Eg[i][j]);
        if (std::abs(mx - last_max) < 1e-7 * (1 + std::abs(mx))) {
            if (++stable > 25) break;
        } else {
            stable = 0;
        }
        last_max = mx;
    }

    double path_max = -1e300;
    for (int i = 0; i < NT; ++i)
        for (int j = 0; j < NS; ++j) path_max = std::max(path_max, Eg[i][j]);

    // candidates: high slices in S*(delta), smallest |V| first
    std::vector<std::tuple<double, int, int>> cand;
    for (int i = 1; i < NT - 1; ++i)
        for (int j = 0; j < NS; ++j) {
            if (Eg[i][j] < 0.5 * path_max) continue;
            if (!cone_distances(d, gam[i][j].values(), delta).in_Sstar) continue;
            const double nV = op.pseudogradient(gam[i][j].values(), V);
            cand.push_back({nV, i, j});
        }
    std::sort(cand.begin(), cand.end());

    out.level.kind = LevelKind::saddle;
    out.level.k = k;
    out.level.tau = tau;
    out.level.mu = mu;
    out.level.delta = delta;
    out.level.lower = theta.f_max;
    out.level.upper = path_max;
    out.level.value = path_max;

    bool polished = false;
    for (std::size_t ci = 0; ci < cand.size() && ci < static_cast<std::size_t>(opt.polish_band); ++ci) {
        auto [nv, i, j] = cand[ci];
        const Field& u = gam[i][j];
        const double lam_guess = (tau * u.lp(p) - u.dirichlet()) / mu;
        NewtonResult nr = newton_polish(u, lam_guess, mu, tau, p);
        if (!nr.converged) continue;
        if (nr.u.sign_changes() < 1) continue;
        if (!cone_distances(nr.u, delta).in_Sstar) continue;
        out.terminal = nr.u;
        out.record = record_from(u, nr, mu, tau, p, k, "saddle");
        out.level.value = nr.u.energy(tau, p);
        polished = true;
        break;
    }
    // endpoint gap: max endpoint energy strictly below the level value
    double emax = -1e300;
    for (int j = 0; j < NS; ++j)
        emax = std::max({emax, gam[0][j].energy(tau, p), gam[NT - 1][j].energy(tau, p)});
    const bool gap_ok = emax < out.level.value - 1e-6 * std::abs(out.level.value);
    out.ok = polished && gap_ok;
    if (!polished) out.note = "no sign-changing candidate polished to a solution";
    else if (!gap_ok) out.note = "endpoint gap violated; re-scale bumps";
    return out;
}

std::vector<SaddleOutcome> tau_continuation(int k, double mu, const std::vector<double>& tau_grid,
                                            const DomainPtr& dom, const SpectralData& spec,
                                            SaddleOptions opt) {
    if (tau_grid.empty() || tau_grid.back() != 1.0)
        throw std::invalid_argument("tau_continuation: grid must increase to tau = 1");
    opt.tau_min = tau_grid.front();
    std::vector<SaddleOutcome> out;
    const SaddlePath* warm = nullptr;
    std::vector<double> grid = tau_grid;
    for (std::size_t gi = 0; gi < grid.size(); ++gi) {
        SaddleOutcome so = estimate_saddle_level(k, mu, grid[gi], dom, spec, opt, warm);
        if (!so.ok && so.record.sign_changes < 1 && gi > 0 && out.back().ok) {
            // a tau step lost the sign change: bisect the step once
            const double mid = 0.5 * (grid[gi - 1] + grid[gi]);
            SaddleOutcome half = estimate_saddle_level(k, mu, mid, dom, spec, opt, &out.back().path);
            if (half.ok) {
                out.push_back(std::move(half));
                warm = &out.back().path;
                so = estimate_saddle_level(k, mu, grid[gi], dom, spec, opt, warm);
            }
        }
        out.push_back(std::move(so));
        warm = &out.back().path;
    }
    return out;
}

} // namespace massflow

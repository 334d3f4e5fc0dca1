// Command-line driver: radial shooting, mass curves, two-solution search,
// descending flows, genus / saddle min-max runs, sweeps and the acceptance
// suite. Configuration comes from an optional JSON file; flags override.

#include "massflow/acceptance.hpp"
#include "massflow/flow.hpp"
#include "massflow/gn.hpp"
#include "massflow/minmax.hpp"
#include "massflow/morse.hpp"
#include "massflow/records.hpp"
#include "massflow/random_fields.hpp"
#include "massflow/shooting.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

using namespace massflow;

namespace {

DomainPtr domain_from_spec(const DomainSpec& ds) {
    if (ds.kind == "interval") return build_interval(ds.a, ds.b, ds.n_grid);
    if (ds.kind == "ball") return build_ball(ds.N, ds.radius, ds.n_grid);
    throw std::runtime_error("config: unknown domain kind " + ds.kind);
}

std::string out_path(const ExperimentConfig& cfg, const std::string& name) {
    std::string dir = cfg.out_dir;
    if (const char* env = std::getenv("MASSFLOW_OUT")) dir = env;
    std::filesystem::create_directories(dir);
    return dir + "/" + name;
}

void write_curve_csv(const MassCurve& c, const std::string& path) {
    std::ofstream out(path);
    out << "lambda,M,E,u0,residual\n";
    for (std::size_t i = 0; i < c.lambda_samples.size(); ++i)
        out << format_g17(c.lambda_samples[i]) << ',' << format_g17(c.M_values[i]) << ','
            << format_g17(c.E_values[i]) << ',' << format_g17(c.u0_values[i]) << ','
            << format_g17(c.residuals[i]) << '\n';
}

void write_trace_csv(const FlowTrace& tr, const std::string& path) {
    std::ofstream out(path);
    out << "t,E,normV,d_plus,d_minus,mass_err\n";
    for (const auto& p : tr.points)
        out << format_g17(p.t) << ',' << format_g17(p.energy) << ',' << format_g17(p.norm_V) << ','
            << format_g17(p.d_plus) << ',' << format_g17(p.d_minus) << ',' << format_g17(p.mass_err)
            << '\n';
}

SolutionRecord shoot_record(const ShootResult& s, double mu, const std::string& id) {
    SolutionRecord r;
    r.id = id;
    r.kind = "shoot";
    r.mu = mu;
    r.tau = s.tau;
    r.p = s.p;
    r.N = s.N;
    r.k = 1;
    r.lambda = s.lambda;
    r.energy = s.energy;
    r.residual = s.ode_residual;
    r.mass_err = std::abs(s.mass - mu);
    r.sign_changes = s.extended ? 0 : s.u.sign_changes();
    return r;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"prescribed-mass NLS toolbox"};
    app.require_subcommand(1);

    std::string config_path, out_dir_flag;
    app.add_option("--config", config_path, "JSON config file");
    app.add_option("--out", out_dir_flag, "output directory (overrides config)");

    double lambda = 1.0, tau = 1.0, p = 3.0, mu = 1.0, lambda_max = 2000.0;
    int N = 1, n_grid = 0, k = 2, points = 48, workers = 0;
    std::string csv, trace_path, kind = "genus";
    std::vector<double> mus, taus;
    std::vector<int> only;
    std::uint64_t seed_flag = 0;

    auto* c_shoot = app.add_subcommand("shoot", "positive radial solution at fixed lambda");
    c_shoot->add_option("--lambda", lambda)->required();
    c_shoot->add_option("--tau", tau);
    c_shoot->add_option("--p", p)->required();
    c_shoot->add_option("--N", N);
    c_shoot->add_option("--n", n_grid);

    auto* c_curve = app.add_subcommand("curve", "mass curve M_tau(lambda)");
    c_curve->add_option("--p", p)->required();
    c_curve->add_option("--N", N);
    c_curve->add_option("--tau", tau);
    c_curve->add_option("--lambda-max", lambda_max);
    c_curve->add_option("--points", points);
    c_curve->add_option("--csv", csv);

    auto* c_two = app.add_subcommand("two", "both positive solutions at mass mu");
    c_two->add_option("--mu", mu)->required();
    c_two->add_option("--tau", tau);
    c_two->add_option("--p", p)->required();
    c_two->add_option("--N", N);

    auto* c_flow = app.add_subcommand("flow", "descending flow from a random start");
    c_flow->add_option("--p", p);
    c_flow->add_option("--mu", mu);
    c_flow->add_option("--tau", tau);
    c_flow->add_option("--trace", trace_path);

    auto* c_genus = app.add_subcommand("genus", "genus min-max run");
    c_genus->add_option("--p", p);
    c_genus->add_option("--mu", mu);
    c_genus->add_option("--k", k);
    c_genus->add_option("--tau", tau);

    auto* c_saddle = app.add_subcommand("saddle", "saddle min-max run");
    c_saddle->add_option("--p", p);
    c_saddle->add_option("--mu", mu);
    c_saddle->add_option("--k", k);
    c_saddle->add_option("--tau", tau);

    auto* c_sweep = app.add_subcommand("sweep", "(mu, tau, k) job sweep");
    c_sweep->add_option("--p", p);
    c_sweep->add_option("--kind", kind);
    c_sweep->add_option("--mus", mus)->delimiter(',');
    c_sweep->add_option("--taus", taus)->delimiter(',');
    c_sweep->add_option("--k", k);
    c_sweep->add_option("--workers", workers);

    auto* c_morse = app.add_subcommand("morse", "morse/blow-up diagnostics along the high branch");
    c_morse->add_option("--p", p);
    c_morse->add_option("--N", N);
    c_morse->add_option("--tau", tau);
    c_morse->add_option("--lambda-max", lambda_max);

    auto* c_accept = app.add_subcommand("accept", "run the acceptance suite");
    c_accept->add_option("--only", only)->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    ExperimentConfig cfg;
    try {
        if (!config_path.empty()) cfg = ExperimentConfig::from_file(config_path);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }
    if (!out_dir_flag.empty()) cfg.out_dir = out_dir_flag;
    if (seed_flag) cfg.seed = seed_flag;
    if (workers > 0) cfg.workers = workers;

    try {
        if (*c_shoot) {
            ShootOptions so;
            if (n_grid > 0) so.n_grid = n_grid;
            ShootResult s = shoot(lambda, tau, p, N, so);
            std::cout << shoot_record(s, s.mass, "shoot").to_jsonl() << "\n";
            return 0;
        }
        if (*c_curve) {
            auto grid = default_lambda_grid(p, N, lambda_max, points);
            MassCurve c = mass_curve(tau, p, N, grid);
            const std::string path = csv.empty() ? out_path(cfg, "curve.csv") : csv;
            write_curve_csv(c, path);
            std::cout << "wrote " << path << " (" << c.lambda_samples.size() << " points, "
                      << c.monotone_segments.size() << " monotone segments)\n";
            return 0;
        }
        if (*c_two) {
            TwoSolutions ts = find_two_positive(mu, tau, p, N);
            if (!ts.ok) {
                std::cerr << "no two solutions: crossing count " << ts.count_verified << "\n";
                return 1;
            }
            ResultStore store(out_path(cfg, "two.jsonl"));
            auto rl = shoot_record(ts.u_low, mu, "two-low");
            auto rh = shoot_record(ts.u_high, mu, "two-high");
            store.append(rl);
            store.append(rh);
            std::cout << rl.to_jsonl() << "\n" << rh.to_jsonl() << "\n";
            return 0;
        }
        if (*c_flow) {
            DomainPtr dom = domain_from_spec(cfg.domain);
            FieldSampler sampler(dom, 8, cfg.seed);
            OperatorConfig ocfg;
            ocfg.tau = tau;
            ocfg.p = p;
            ocfg.mu = mu;
            ocfg.rho = 50.0 * mu * lambda1(dom);
            ocfg.lambda_bar = select_lambda_bar(ocfg.rho, mu, p, dom);
            ConstrainedOperator op(dom, ocfg);
            FlowConfig fc;
            fc.delta = 0.5 * std::sqrt(lambda1(dom) * mu / 2.0);
            fc.trace_stride = 8;
            auto [tr, term] = run_flow(Field(dom, sampler.in_ball(mu, ocfg.rho)), op, fc);
            if (!trace_path.empty()) write_trace_csv(tr, trace_path);
            std::cout << "steps " << tr.steps << " converged " << tr.converged << " E "
                      << format_g17(term.energy(tau, p)) << "\n";
            return tr.converged ? 0 : 1;
        }
        if (*c_genus || *c_saddle || *c_sweep) {
            DomainPtr dom = domain_from_spec(cfg.domain);
            std::vector<double> mu_list = !mus.empty() ? mus : (cfg.mu_list.empty() ? std::vector<double>{mu} : cfg.mu_list);
            std::vector<double> tau_list = !taus.empty() ? taus : std::vector<double>{tau};
            std::vector<int> k_list = cfg.k_list.empty() ? std::vector<int>{k} : cfg.k_list;
            if (*c_genus) {
                mu_list = {mu};
                tau_list = {tau};
                k_list = {k};
                kind = "genus";
            }
            if (*c_saddle) {
                mu_list = {mu};
                tau_list = {tau};
                k_list = {k};
                kind = "saddle";
            }
            struct Job {
                double mu, tau;
                int k;
            };
            std::vector<Job> jobs;
            for (double m : mu_list)
                for (double t : tau_list)
                    for (int kk : k_list) jobs.push_back({m, t, kk});
            std::vector<SolutionRecord> results(jobs.size());
            std::vector<char> ok(jobs.size(), 0);
            std::mutex err_mutex;
            std::string first_error;
            auto run_job = [&](std::size_t j) {
                try {
                    const Job& job = jobs[j];
                    if (kind == "genus") {
                        const double delta = 0.5 * std::sqrt(lambda1(dom) * job.mu / 2.0);
                        GenusOptions go;
                        go.p = p;
                        go.tau = job.tau;
                        MinmaxOutcome o = estimate_genus_level(job.k, job.mu, delta, dom, go);
                        if (!o.ok) throw std::runtime_error(o.note);
                        results[j] = o.record;
                    } else {
                        auto spec = dirichlet_eigenpairs(dom, std::max(6, job.k + 2));
                        SaddleOptions so;
                        so.p = p;
                        SaddleOutcome o = estimate_saddle_level(job.k, job.mu, job.tau, dom, spec, so);
                        if (!o.ok) throw std::runtime_error(o.note);
                        results[j] = o.record;
                    }
                    results[j].id = kind + "-" + std::to_string(j);
                    ok[j] = 1;
                } catch (const std::exception& e) {
                    std::lock_guard<std::mutex> lk(err_mutex);
                    if (first_error.empty()) first_error = e.what();
                }
            };
            const int W = std::max(1, cfg.workers);
            std::vector<std::thread> pool;
            std::atomic<std::size_t> next{0};
            for (int w = 0; w < W; ++w)
                pool.emplace_back([&] {
                    for (std::size_t j = next++; j < jobs.size(); j = next++) run_job(j);
                });
            for (auto& th : pool) th.join();
            ResultStore store(out_path(cfg, kind + ".jsonl"));
            std::ofstream plot(out_path(cfg, kind + "_sweep.csv"));
            plot << "mu,tau,k,E,lambda\n";
            for (std::size_t j = 0; j < jobs.size(); ++j) {
                if (!ok[j]) continue;
                store.append(results[j]);
                plot << format_g17(jobs[j].mu) << ',' << format_g17(jobs[j].tau) << ',' << jobs[j].k
                     << ',' << format_g17(results[j].energy) << ',' << format_g17(results[j].lambda)
                     << '\n';
                std::cout << results[j].to_jsonl() << "\n";
            }
            if (!first_error.empty()) {
                std::cerr << "job failure: " << first_error << "\n";
                return 1;
            }
            return 0;
        }
        if (*c_morse) {
            std::vector<double> grid;
            for (int i = 0; i < 12; ++i) grid.push_back(50.0 * std::pow(lambda_max / 50.0, i / 11.0));
            MassCurve c = mass_curve(tau, p, N, grid);
            std::vector<BridgePoint> fam;
            ResultStore store(out_path(cfg, "morse.jsonl"));
            for (std::size_t i = 0; i < c.lambda_samples.size(); ++i) {
                ShootResult s = shoot(c.lambda_samples[i], tau, p, N);
                LinearizationSpectrum ls = morse_index(s.u, s.lambda, tau, p);
                SolutionRecord r = shoot_record(s, s.mass, "morse-" + std::to_string(i));
                r.kind = "morse";
                r.morse = ls.morse_index;
                r.constrained_morse = ls.constrained_index;
                store.append(r);
                fam.push_back({s.lambda, s.energy, s.u.linf(), s.mass});
            }
            BridgeReport rep = multiplier_energy_bridge(fam, p, N);
            std::cout << "bridge: " << rep.summary << " (fitted " << rep.fitted_exponent << ", expected "
                      << rep.expected_exponent << ")\n";
            return 0;
        }
        if (*c_accept) {
            AcceptanceOptions ao;
            ao.out_dir = out_path(cfg, "accept");
            ao.only = only;
            ao.seed = cfg.seed;
            auto res = run_acceptance(ao);
            std::cout << format_report(res);
            for (const auto& r : res)
                if (!r.passed) return 1;
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

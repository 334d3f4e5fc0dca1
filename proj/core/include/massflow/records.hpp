#pragma once

// Persistence: solution records as JSON-lines with fixed 17-significant-digit
// float formatting (byte-identical reruns), an append-only store keyed by
// (id, mu, tau, k), and the experiment configuration with lossless
// round-tripping.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace massflow {

struct SolutionRecord {
    std::string id;
    std::string kind;   // "genus" | "saddle" | "shoot" | "flow" | ...
    double mu = 0, tau = 1, p = 0;
    int N = 1, k = 0;
    double lambda = 0, energy = 0;
    int morse = -1, constrained_morse = -1, sign_changes = -1;
    double residual = 0, mass_err = 0;

    std::string to_jsonl() const;
    static SolutionRecord from_jsonl(const std::string& line);
};

std::string format_g17(double x);

class ResultStore {
  public:
    explicit ResultStore(std::string path);
    // throws if the (id, mu, tau, k) key is already present
    void append(const SolutionRecord& rec);
    const std::vector<SolutionRecord>& records() const { return records_; }
    static std::vector<SolutionRecord> load(const std::string& path);

  private:
    std::string path_;
    std::vector<SolutionRecord> records_;
    std::map<std::string, bool> keys_;
};

struct DomainSpec {
    std::string kind = "interval"; // "interval" | "ball"
    double a = 0, b = 1;           // interval
    int N = 1;
    double radius = 1;             // ball
    int n_grid = 1024;
};

struct ExperimentConfig {
    DomainSpec domain;
    double p = 3;
    std::vector<double> mu_list;
    std::vector<double> tau_grid;
    std::vector<int> k_list;
    double delta_scale = 0.5; // delta = delta_scale * min(sqrt(lam1 mu/2), delta_hat)
    double tol_pg = 0;        // 0 -> library default
    long max_steps = 200000;
    std::string out_dir = "out";
    std::uint64_t seed = 12345;
    int workers = 1;

    std::string to_json() const;
    static ExperimentConfig from_json(const std::string& text);
    static ExperimentConfig from_file(const std::string& path);
    std::uint64_t hash() const; // FNV-1a of the canonical serialization
};

} // namespace massflow

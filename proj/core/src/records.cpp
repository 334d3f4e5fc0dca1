#include "massflow/records.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace massflow {

using nlohmann::json;

std::string format_g17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string SolutionRecord::to_jsonl() const {
    // hand-rolled, fixed field order and float formatting
    std::ostringstream os;
    os << "{\"id\":\"" << id << "\",\"kind\":\"" << kind << "\""
       << ",\"mu\":" << format_g17(mu) << ",\"tau\":" << format_g17(tau)
       << ",\"p\":" << format_g17(p) << ",\"N\":" << N << ",\"k\":" << k
       << ",\"lambda\":" << format_g17(lambda) << ",\"energy\":" << format_g17(energy)
       << ",\"morse\":" << morse << ",\"constrained_morse\":" << constrained_morse
       << ",\"sign_changes\":" << sign_changes
       << ",\"residual\":" << format_g17(residual)
       << ",\"mass_err\":" << format_g17(mass_err) << "}";
    return os.str();
}

SolutionRecord SolutionRecord::from_jsonl(const std::string& line) {
    json j = json::parse(line);
    SolutionRecord r;
    r.id = j.at("id").get<std::string>();
    r.kind = j.at("kind").get<std::string>();
    r.mu = j.at("mu").get<double>();
    r.tau = j.at("tau").get<double>();
    r.p = j.at("p").get<double>();
    r.N = j.at("N").get<int>();
    r.k = j.at("k").get<int>();
    r.lambda = j.at("lambda").get<double>();
    r.energy = j.at("energy").get<double>();
    r.morse = j.at("morse").get<int>();
    r.constrained_morse = j.at("constrained_morse").get<int>();
    r.sign_changes = j.at("sign_changes").get<int>();
    r.residual = j.at("residual").get<double>();
    r.mass_err = j.at("mass_err").get<double>();
    return r;
}

ResultStore::ResultStore(std::string path) : path_(std::move(path)) {
    std::ifstream in(path_);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        SolutionRecord r = SolutionRecord::from_jsonl(line);
        keys_[r.id + "|" + format_g17(r.mu) + "|" + format_g17(r.tau) + "|" + std::to_string(r.k)] = true;
        records_.push_back(std::move(r));
    }
}

void ResultStore::append(const SolutionRecord& rec) {
    std::string key =
        rec.id + "|" + format_g17(rec.mu) + "|" + format_g17(rec.tau) + "|" + std::to_string(rec.k);
    if (keys_.count(key)) throw std::runtime_error("ResultStore: key already present: " + key);
    std::ofstream out(path_, std::ios::app);
    if (!out) throw std::runtime_error("ResultStore: cannot open " + path_);
    out << rec.to_jsonl() << "\n";
    keys_[key] = true;
    records_.push_back(rec);
}

std::vector<SolutionRecord> ResultStore::load(const std::string& path) {
    return ResultStore(path).records_;
}

std::string ExperimentConfig::to_json() const {
    json j;
    j["domain"] = {{"kind", domain.kind}, {"a", domain.a},       {"b", domain.b},
                   {"N", domain.N},       {"radius", domain.radius}, {"n_grid", domain.n_grid}};
    j["p"] = p;
    j["mu_list"] = mu_list;
    j["tau_grid"] = tau_grid;
    j["k_list"] = k_list;
    j["delta_scale"] = delta_scale;
    j["tol_pg"] = tol_pg;
    j["max_steps"] = max_steps;
    j["out_dir"] = out_dir;
    j["seed"] = seed;
    j["workers"] = workers;
    return j.dump(2);
}

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
    json j = json::parse(text);
    ExperimentConfig c;
    if (j.contains("domain")) {
        auto& d = j["domain"];
        c.domain.kind = d.value("kind", c.domain.kind);
        c.domain.a = d.value("a", c.domain.a);
        c.domain.b = d.value("b", c.domain.b);
        c.domain.N = d.value("N", c.domain.N);
        c.domain.radius = d.value("radius", c.domain.radius);
        c.domain.n_grid = d.value("n_grid", c.domain.n_grid);
    }
    c.p = j.value("p", c.p);
    c.mu_list = j.value("mu_list", c.mu_list);
    c.tau_grid = j.value("tau_grid", c.tau_grid);
    c.k_list = j.value("k_list", c.k_list);
    c.delta_scale = j.value("delta_scale", c.delta_scale);
    c.tol_pg = j.value("tol_pg", c.tol_pg);
    c.max_steps = j.value("max_steps", c.max_steps);
    c.out_dir = j.value("out_dir", c.out_dir);
    c.seed = j.value("seed", c.seed);
    c.workers = j.value("workers", c.workers);
    return c;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json(ss.str());
}

std::uint64_t ExperimentConfig::hash() const {
    std::string s = to_json();
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace massflow

#include <doctest.h>

#include "massflow/acceptance.hpp"
#include "massflow/records.hpp"

#include <cstdio>
#include <filesystem>

using namespace massflow;

TEST_CASE("solution records round-trip through JSON lines deterministically") {
    SolutionRecord r;
    r.id = "x1";
    r.kind = "genus";
    r.mu = 1e-3;
    r.tau = 0.97;
    r.p = 7.0;
    r.N = 1;
    r.k = 2;
    r.lambda = -39.47841760435743;
    r.energy = 0.019738962349456;
    r.morse = 3;
    r.constrained_morse = 2;
    r.sign_changes = 1;
    r.residual = 3.14e-13;
    r.mass_err = 1e-16;
    const std::string line = r.to_jsonl();
    CHECK(line == r.to_jsonl()); // byte-identical reserialization
    SolutionRecord q = SolutionRecord::from_jsonl(line);
    CHECK(q.to_jsonl() == line);
    CHECK(q.lambda == r.lambda);
    CHECK(q.kind == r.kind);
}

TEST_CASE("store forbids key overwrites and reloads in order") {
    const std::string path = "test_store.jsonl";
    std::remove(path.c_str());
    {
        ResultStore store(path);
        SolutionRecord a;
        a.id = "a";
        a.mu = 1.0;
        a.tau = 1.0;
        a.k = 2;
        store.append(a);
        SolutionRecord b = a;
        b.id = "b";
        store.append(b);
        CHECK_THROWS(store.append(a)); // same (id, mu, tau, k)
    }
    auto loaded = ResultStore::load(path);
    REQUIRE(loaded.size() == 2);
    CHECK(loaded[0].id == "a");
    CHECK(loaded[1].id == "b");
    std::remove(path.c_str());
}

TEST_CASE("experiment config round-trips losslessly") {
    ExperimentConfig c;
    c.domain.kind = "ball";
    c.domain.N = 3;
    c.domain.radius = 1.0;
    c.domain.n_grid = 4096;
    c.p = 5.0;
    c.mu_list = {1e-2, 1e-3};
    c.tau_grid = {0.5, 0.75, 1.0};
    c.k_list = {2, 3};
    c.seed = 987654321;
    const std::string j = c.to_json();
    ExperimentConfig d = ExperimentConfig::from_json(j);
    CHECK(d.to_json() == j);
    CHECK(d.hash() == c.hash());
    ExperimentConfig e = ExperimentConfig::from_json(j);
    e.seed += 1;
    CHECK(e.hash() != c.hash());
    CHECK_THROWS(ExperimentConfig::from_json("{ not json"));
}

TEST_CASE("fault injection: a corrupted GN constant fails only its criterion") {
    AcceptanceOptions opt;
    opt.out_dir = "test_accept_fault";
    opt.gn_constant_scale = 0.5; // sabotage the constant used by criterion 2
    opt.only = {1, 2};
    auto res = run_acceptance(opt);
    REQUIRE(res.size() == 2);
    CHECK(res[0].passed);   // eigen oracle unaffected
    CHECK(!res[1].passed);  // GN criterion must fail
    std::filesystem::remove_all(opt.out_dir);
}

#pragma once

// The quantitative acceptance suite: one entry per criterion, each returning
// pass/fail with a one-line detail. Sweep-style criteria write their solution
// records through the ResultStore and verify from what they read back.

#include <cstdint>
#include <string>
#include <vector>

namespace massflow {

struct AcceptanceOptions {
    std::string out_dir = "accept_out";
    std::uint64_t seed = 20240901;
    std::vector<int> only;         // empty -> all criteria
    double gn_constant_scale = 1.0; // fault-injection hook used by tests
    bool verbose = false;
};

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    double seconds = 0;
    std::string detail;
};

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt);

// render "PASS  3  multiplier-sign   (12.3 s)  detail" lines
std::string format_report(const std::vector<CriterionResult>& results);

} // namespace massflow

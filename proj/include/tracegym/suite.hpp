#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tracegym/random_tensors.hpp"
#include "tracegym/report.hpp"

namespace tracegym {

/// Parameters of one suite run. instances = 0 keeps the suite's default size
/// (sized so the stock acceptance thresholds are met); threads = 0 reads
/// TRACEGYM_THREADS (default 1). Results are independent of the thread count.
struct SuiteConfig {
    std::string suite;
    std::uint64_t seed = 1;
    int instances = 0;
    double quad_budget = 1e-6;
    int threads = 0;
    std::vector<RandomTensorModel> models; // tails suite override
};

struct SuiteSummary {
    std::int64_t pass = 0;
    std::int64_t fail = 0;
    std::int64_t equality = 0;
    std::int64_t numerical_errors = 0;
};

struct SuiteResult {
    std::string suite;
    std::uint64_t seed = 0;
    int instances = 0;
    double quad_budget = 0;
    std::vector<InequalityReport> reports;
    std::vector<TailBoundReport> tail_reports;
    std::vector<std::string> errors;
    double wall_time_ms = 0;

    SuiteSummary summary() const;

    /// 0 all pass; 1 any fail verdict; 3 captured numerical errors with zero
    /// fails.
    int exit_code() const;

    /// Deterministic for a fixed config: wall_time_ms is the only field that
    /// varies between identical runs.
    ordered_json to_json() const;
    std::string to_csv() const;
};

/// algebra, pinching, two-tensor, multivariate, log-trace, tails.
const std::vector<std::string>& suite_names();

SuiteResult run_suite(const SuiteConfig& cfg);

/// Writes <out_dir>/<suite>.json and <out_dir>/<suite>.csv.
void write_suite_outputs(const SuiteResult& result, const std::string& out_dir);

/// Parses "(2,2;2,2)" or "2,2;2,2" into a Shape.
Shape shape_from_string(const std::string& text);

} // namespace tracegym

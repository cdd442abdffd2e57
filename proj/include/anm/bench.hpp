#pragma once

#include "anm/regression.hpp"
#include "anm/simulation.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace anm {

enum class BenchMethod { resit, gds, brute_force, random_baseline };
const char* to_string(BenchMethod m);
BenchMethod parse_bench_method(const std::string& name);

struct BenchConfig {
    std::vector<Regime> regimes{Regime::linear_nongauss};
    std::vector<int> p{4};
    std::vector<int> n{100};
    int replicates = 100;
    std::vector<BenchMethod> methods{BenchMethod::resit, BenchMethod::gds, BenchMethod::brute_force,
                                     BenchMethod::random_baseline};
    double lambda;
    double alpha = 0.05;
    std::uint64_t seed = 0;
    std::string out;
    /// Unset: linear regression for linear_nongauss, kernel otherwise.
    std::optional<RegressionKind> regression;
    /// Largest p brute force may run at (4, or 5 as an explicit override).
    int brute_force_max_p = 4;

    BenchConfig();
    /// Throws std::invalid_argument on an inconsistent configuration.
    void validate() const;
};

/// Flat "key = value" lines; lists are comma separated, '#' starts a comment.
BenchConfig parse_bench_config(std::istream& in);
BenchConfig read_bench_config_file(const std::string& path);

struct ReplicateRow {
    Regime regime = Regime::linear_nongauss;
    int p = 0;
    int n = 0;
    int replicate = 0;
    BenchMethod method = BenchMethod::resit;
    bool ok = false;
    std::string error;
    int shd_dag = 0;
    int shd_cpdag = 0;
    int sid = 0;
    /// Penalized independence score of the output graph on the replicate's data.
    double score = 0.0;
};

struct AggregateRow {
    Regime regime = Regime::linear_nongauss;
    int p = 0;
    int n = 0;
    BenchMethod method = BenchMethod::resit;
    std::string metric;
    double mean = 0.0;
    double sd = 0.0;
    int replicates = 0;
};

struct BenchReport {
    std::vector<ReplicateRow> rows;
    std::vector<AggregateRow> aggregates;
    int failures = 0;
    double failure_rate() const;
};

/// Runs every (regime, p, n, replicate) cell; all methods see the same data.
/// When cfg.out is set, writes bench.csv, replicates.csv and failures.csv
/// there.
BenchReport run_benchmark(const BenchConfig& cfg);

void write_aggregate_csv(std::ostream& out, const BenchReport& report);
void write_replicate_csv(std::ostream& out, const BenchReport& report);

}  // namespace anm

#pragma once

#include "anm/dataset.hpp"
#include "anm/graphs.hpp"
#include "anm/independence.hpp"
#include "anm/regression.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace anm {

/// Edge penalty: an extra edge must lift a p-value from 0.01 to 0.05.
inline const double kDefaultLambda = std::log10(0.05) - std::log10(0.01);

/// Residuals of `response` regressed on `predictors` (empty predictors:
/// the centered column).
using ResidualFn = std::function<Eigen::VectorXd(const Dataset&, int response, const std::vector<int>& predictors)>;
/// p-value of the hypothesis "residual independent of the columns of others".
using PValueFn = std::function<double(const Eigen::VectorXd& residual, const Eigen::MatrixXd& others)>;

/// How a residual is tested against several variables: one joint HSIC test
/// on the concatenated block, or one test per column with a Bonferroni
/// correction.
enum class IndependenceMode { joint, pairwise };

struct DiscoveryOptions {
    RegressionMethod regression{};
    /// Phase-2 level of RESIT: a parent is dropped when p >= alpha.
    double alpha = 0.05;
    double lambda = kDefaultLambda;
    IndependenceMode mode = IndependenceMode::joint;
    /// Brute force refuses larger graphs (543 DAGs at p = 4).
    int enumeration_cap = 4;
    std::uint64_t seed = 0;
    int max_steps = 100000;
    /// Test doubles; when set they replace the regression / HSIC backends.
    ResidualFn residuals{};
    PValueFn independence{};
};

struct ScoreReport {
    Dag graph{1};
    std::vector<double> per_node_dm;
    int edge_count = 0;
    double lambda = 0.0;
    double total = 0.0;
};

struct DiscoveryResult {
    Dag graph{1};
    std::optional<std::vector<int>> order;
    std::optional<ScoreReport> score;
    std::map<std::string, std::string> diagnostics;
};

enum class Direction { x_causes_y, y_causes_x, undecided };

struct DirectionVerdict {
    double p_forward = 1.0;
    double p_backward = 1.0;
    Direction decision = Direction::undecided;
    double rank_key = 1.0;
    bool degenerate = false;
};

/// Memoizing evaluator of the penalized independence score. Residuals are
/// cached per (node, parent set), scores per graph.
class IndependenceScorer {
public:
    IndependenceScorer(const Dataset& data, DiscoveryOptions opts);
    ~IndependenceScorer();
    IndependenceScorer(const IndependenceScorer&) = delete;
    IndependenceScorer& operator=(const IndependenceScorer&) = delete;

    const Eigen::VectorXd& residual(int node, NodeMask parents);
    /// p-value of residual against the given columns of the raw data.
    double pvalue_against_data(const Eigen::VectorXd& residual, NodeMask columns);
    ScoreReport score(const Dag& g);

    std::size_t graphs_scored() const;
    const Dataset& data() const { return data_; }
    const DiscoveryOptions& options() const { return opts_; }

private:
    struct Impl;
    const Dataset& data_;
    DiscoveryOptions opts_;
    std::unique_ptr<Impl> impl_;
};

ScoreReport score_graph(const Dataset& data, const Dag& g, const DiscoveryOptions& opts = {});

/// Regression with subsequent independence test: sink-first causal order,
/// then pruning of superfluous parents.
DiscoveryResult resit(const Dataset& data, const DiscoveryOptions& opts = {});
DiscoveryResult resit(IndependenceScorer& scorer);

/// Exact minimizer of the score over all DAGs; ties go to the
/// lexicographically smallest edge set.
DiscoveryResult brute_force(const Dataset& data, const DiscoveryOptions& opts = {});
DiscoveryResult brute_force(IndependenceScorer& scorer);

/// Greedy DAG search from the empty graph with a one-step look-ahead.
DiscoveryResult gds(const Dataset& data, const DiscoveryOptions& opts = {});
DiscoveryResult gds(IndependenceScorer& scorer);

struct DirectionOptions {
    RegressionMethod regression{RegressionKind::kernel, {}};
    HsicOptions hsic{};
    /// Both p-values below this floor leave the pair undecided.
    double rejection_floor = 0.0;
};

/// Fits both additive noise models for a pair and compares the HSIC
/// p-values of residual vs input.
DirectionVerdict infer_direction(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                                 const DirectionOptions& opts = {});

const char* to_string(Direction d);

/// Graph text plus a "key=value" diagnostics side-file.
void write_result(const std::string& graph_path, const std::string& diagnostics_path,
                  const DiscoveryResult& result);

}  // namespace anm

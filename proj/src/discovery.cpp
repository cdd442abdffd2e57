#include "anm/discovery.hpp"

#include "anm/kernels.hpp"
#include "anm/rng.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace anm {

namespace {

// Above this sample size per-residual distance matrices are not cached.
constexpr Eigen::Index kDistanceCacheRows = 400;
constexpr double kScoreTolerance = 1e-12;

std::string format_double(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

std::string format_mask(NodeMask m) {
    std::string out;
    for (int v : mask_nodes(m)) out += (out.empty() ? "" : " ") + std::to_string(v);
    return out;
}

struct ResidualEntry {
    Eigen::VectorXd residual;
    Eigen::MatrixXd sqdist;  // of the standardized residual; empty if not cached
};

}  // namespace

struct IndependenceScorer::Impl {
    std::unordered_map<std::uint64_t, ResidualEntry> residuals;  // key: node * 2^58 ^ mask hash
    std::map<std::vector<NodeMask>, ScoreReport> scores;
    std::vector<Eigen::MatrixXd> column_sqdist;

    static std::uint64_t key(int node, NodeMask parents) {
        // parents never contains node, so (node, parents) -> parents | bit(node) plus node id is unique
        return (parents | bit(node)) * 64u + static_cast<std::uint64_t>(node);
    }
};

IndependenceScorer::IndependenceScorer(const Dataset& data, DiscoveryOptions opts)
    : data_(data), opts_(std::move(opts)), impl_(std::make_unique<Impl>()) {
    if (data.cols() > 58) throw std::invalid_argument("scorer supports at most 58 variables");
}

IndependenceScorer::~IndependenceScorer() = default;

std::size_t IndependenceScorer::graphs_scored() const { return impl_->scores.size(); }

const Eigen::VectorXd& IndependenceScorer::residual(int node, NodeMask parents) {
    const auto k = Impl::key(node, parents);
    auto it = impl_->residuals.find(k);
    if (it != impl_->residuals.end()) return it->second.residual;

    const std::vector<int> preds = mask_nodes(parents);
    ResidualEntry entry;
    if (opts_.residuals) {
        entry.residual = opts_.residuals(data_, node, preds);
    } else {
        try {
            entry.residual = fit(data_, node, preds, opts_.regression).residuals;
        } catch (const std::exception& e) {
            throw std::runtime_error("regression of node " + std::to_string(node) + " on {" +
                                     format_mask(parents) + "} failed: " + e.what());
        }
    }
    if (entry.residual.size() != data_.rows()) throw std::runtime_error("residual length mismatch");
    if (!opts_.independence && data_.rows() <= kDistanceCacheRows) {
        entry.sqdist = squared_distances(standardize_columns(entry.residual));
    }
    return impl_->residuals.emplace(k, std::move(entry)).first->second.residual;
}

double IndependenceScorer::pvalue_against_data(const Eigen::VectorXd& res, NodeMask columns) {
    const Eigen::MatrixXd others = data_.columns(mask_nodes(columns));
    if (opts_.independence) return opts_.independence(res, others);
    if (opts_.mode == IndependenceMode::pairwise) {
        double pmin = 1.0;
        for (Eigen::Index c = 0; c < others.cols(); ++c) {
            pmin = std::min(pmin, hsic_pvalue(res, others.col(c)).p_value);
        }
        return std::min(1.0, pmin * static_cast<double>(others.cols()));
    }
    return hsic_pvalue(res, others).p_value;
}

ScoreReport IndependenceScorer::score(const Dag& g) {
    if (g.size() != data_.cols()) throw std::invalid_argument("score: graph size differs from data");
    auto found = impl_->scores.find(g.parent_masks());
    if (found != impl_->scores.end()) return found->second;

    const int p = g.size();
    ScoreReport report;
    report.graph = g;
    report.lambda = opts_.lambda;
    report.edge_count = g.edge_count();
    report.per_node_dm.assign(static_cast<std::size_t>(p), 0.0);

    std::vector<const ResidualEntry*> entries(static_cast<std::size_t>(p));
    for (int v = 0; v < p; ++v) {
        residual(v, g.parents(v));
        entries[v] = &impl_->residuals.at(Impl::key(v, g.parents(v)));
    }
    if (p > 1) {
        const Eigen::Index n = data_.rows();
        const bool fast = !opts_.independence && opts_.mode == IndependenceMode::joint &&
                          entries[0]->sqdist.size() > 0;
        for (int i = 0; i < p; ++i) {
            double pval = 1.0;
            if (fast) {
                Eigen::MatrixXd others = Eigen::MatrixXd::Zero(n, n);
                for (int k = 0; k < p; ++k) {
                    if (k != i) others += entries[k]->sqdist;
                }
                pval = hsic_gamma_from_sqdist(entries[i]->sqdist, others).p_value;
            } else {
                Eigen::MatrixXd others(n, p - 1);
                for (int k = 0, c = 0; k < p; ++k) {
                    if (k != i) others.col(c++) = entries[k]->residual;
                }
                if (opts_.independence) {
                    pval = opts_.independence(entries[i]->residual, others);
                } else if (opts_.mode == IndependenceMode::pairwise) {
                    double pmin = 1.0;
                    for (Eigen::Index c = 0; c < others.cols(); ++c) {
                        pmin = std::min(pmin, hsic_pvalue(entries[i]->residual, others.col(c)).p_value);
                    }
                    pval = std::min(1.0, pmin * static_cast<double>(others.cols()));
                } else {
                    pval = hsic_pvalue(entries[i]->residual, others).p_value;
                }
            }
            report.per_node_dm[i] = dependence_measure(pval);
        }
    }
    double sum = 0.0;
    for (double dm : report.per_node_dm) sum += dm;
    report.total = sum + report.lambda * report.edge_count;
    impl_->scores.emplace(g.parent_masks(), report);
    return report;
}

ScoreReport score_graph(const Dataset& data, const Dag& g, const DiscoveryOptions& opts) {
    IndependenceScorer scorer(data, opts);
    return scorer.score(g);
}

// ---------------------------------------------------------------- RESIT

DiscoveryResult resit(IndependenceScorer& scorer) {
    const Dataset& data = scorer.data();
    const DiscoveryOptions& opts = scorer.options();
    const int p = data.cols();
    if (p < 2) throw std::invalid_argument("resit: need at least 2 variables");
    if (data.rows() < 20) throw std::invalid_argument("resit: need at least 20 samples");

    DiscoveryResult out;
    std::vector<NodeMask> parents(static_cast<std::size_t>(p), 0);
    std::vector<int> order;  // built sink-first, reversed at the end
    NodeMask remaining = p == 64 ? ~NodeMask{0} : bit(p) - 1;

    // phase 1: peel off the node whose residuals are least dependent
    int round = 0;
    while (popcount(remaining) > 1) {
        int sink = -1;
        double best_dm = std::numeric_limits<double>::infinity();
        double best_p = 0.0;
        for (int k : mask_nodes(remaining)) {
            const NodeMask others = remaining & ~bit(k);
            const double pval = scorer.pvalue_against_data(scorer.residual(k, others), others);
            const double dm = dependence_measure(pval);
            if (dm < best_dm) {
                best_dm = dm;
                best_p = pval;
                sink = k;
            }
        }
        remaining &= ~bit(sink);
        parents[sink] = remaining;
        order.push_back(sink);
        out.diagnostics["phase1.round" + std::to_string(round) + ".sink"] = std::to_string(sink);
        out.diagnostics["phase1.round" + std::to_string(round) + ".p_value"] = format_double(best_p);
        ++round;
    }
    order.push_back(mask_nodes(remaining).front());
    std::reverse(order.begin(), order.end());

    // phase 2: drop parents whose removal keeps residuals independent of all predecessors
    NodeMask predecessors = bit(order[0]);
    int dropped = 0;
    for (int k = 1; k < p; ++k) {
        const int node = order[k];
        for (int parent : mask_nodes(parents[node])) {
            const NodeMask candidate = parents[node] & ~bit(parent);
            const double pval = scorer.pvalue_against_data(scorer.residual(node, candidate), predecessors);
            if (pval >= opts.alpha) {
                parents[node] = candidate;
                ++dropped;
            }
        }
        predecessors |= bit(node);
    }
    out.diagnostics["phase2.edges_removed"] = std::to_string(dropped);

    out.graph = Dag::from_parents(parents);
    out.order = order;
    std::string ord;
    for (int v : order) ord += (ord.empty() ? "" : " ") + std::to_string(v);
    out.diagnostics["order"] = ord;
    return out;
}

DiscoveryResult resit(const Dataset& data, const DiscoveryOptions& opts) {
    IndependenceScorer scorer(data, opts);
    return resit(scorer);
}

// ---------------------------------------------------------------- brute force

DiscoveryResult brute_force(IndependenceScorer& scorer) {
    const int p = scorer.data().cols();
    const auto dags = enumerate_dags(p, scorer.options().enumeration_cap);
    std::optional<ScoreReport> best;
    for (const Dag& g : dags) {
        ScoreReport r = scorer.score(g);
        if (!best || r.total < best->total - kScoreTolerance ||
            (std::abs(r.total - best->total) <= kScoreTolerance && edge_set_less(g, best->graph))) {
            best = std::move(r);
        }
    }
    DiscoveryResult out;
    out.graph = best->graph;
    out.order = best->graph.topological_order();
    out.score = *best;
    out.diagnostics["graphs_scored"] = std::to_string(dags.size());
    out.diagnostics["score"] = format_double(best->total);
    return out;
}

DiscoveryResult brute_force(const Dataset& data, const DiscoveryOptions& opts) {
    IndependenceScorer scorer(data, opts);
    return brute_force(scorer);
}

// ---------------------------------------------------------------- GDS

namespace {

// Neighbor visiting order: nodes are drawn without replacement with weight
// proportional to 1/p-value of their residual test (Gumbel-top-k in log
// space); each node's incoming edits follow in shuffled order.
std::vector<EdgeEdit> ordered_edits(const Dag& g, const ScoreReport& report, Rng& rng) {
    const int p = g.size();
    std::vector<std::pair<double, int>> keys;
    for (int v = 0; v < p; ++v) {
        const double u = std::max(rng.uniform(), 1e-300);
        keys.emplace_back(report.per_node_dm[v] * std::log(10.0) - std::log(-std::log(u)), v);
    }
    std::stable_sort(keys.begin(), keys.end(), [](const auto& a, const auto& b) { return a.first > b.first; });

    const auto edits = legal_edits(g);
    std::vector<EdgeEdit> out;
    out.reserve(edits.size());
    for (const auto& [key, node] : keys) {
        std::vector<EdgeEdit> group;
        for (const EdgeEdit& e : edits) {
            if (e.target() == node) group.push_back(e);
        }
        rng.shuffle(std::span<EdgeEdit>(group));
        out.insert(out.end(), group.begin(), group.end());
    }
    return out;
}

struct ScanResult {
    std::optional<ScoreReport> improving;  // best scanned graph beating the threshold
    std::optional<ScoreReport> best;       // best scanned graph overall
    std::size_t scanned = 0;
};

// Scores neighbors in order; stops once at least `min_scanned` graphs were
// scored and one of them beats `threshold`.
ScanResult scan(IndependenceScorer& scorer, const Dag& g, const std::vector<EdgeEdit>& order,
                double threshold, std::size_t min_scanned) {
    ScanResult out;
    for (const EdgeEdit& e : order) {
        ScoreReport r = scorer.score(apply_edit(g, e));
        ++out.scanned;
        if (!out.best || r.total < out.best->total - kScoreTolerance) out.best = r;
        if (r.total < threshold - kScoreTolerance &&
            (!out.improving || r.total < out.improving->total - kScoreTolerance)) {
            out.improving = r;
        }
        if (out.improving && out.scanned >= min_scanned) break;
    }
    return out;
}

}  // namespace

DiscoveryResult gds(IndependenceScorer& scorer) {
    const int p = scorer.data().cols();
    if (p < 2) throw std::invalid_argument("gds: need at least 2 variables");
    const DiscoveryOptions& opts = scorer.options();
    Rng rng(opts.seed);

    ScoreReport current = scorer.score(Dag(p));
    int steps = 0;
    int lookahead_moves = 0;
    while (steps < opts.max_steps) {
        const auto order = ordered_edits(current.graph, current, rng);
        if (order.empty()) break;
        ScanResult direct = scan(scorer, current.graph, order, current.total, static_cast<std::size_t>(p));
        if (direct.improving) {
            current = *direct.improving;
            ++steps;
            continue;
        }
        // no better neighbor: step to the best one and look one move further,
        // never back to the current graph
        const ScoreReport h = *direct.best;
        const auto h_order = ordered_edits(h.graph, h, rng);
        std::vector<EdgeEdit> filtered;
        for (const EdgeEdit& e : h_order) {
            if (!(apply_edit(h.graph, e) == current.graph)) filtered.push_back(e);
        }
        ScanResult ahead = scan(scorer, h.graph, filtered, current.total, static_cast<std::size_t>(p));
        if (!ahead.improving) break;
        current = *ahead.improving;
        ++steps;
        ++lookahead_moves;
    }

    DiscoveryResult out;
    out.graph = current.graph;
    out.order = current.graph.topological_order();
    out.score = current;
    out.diagnostics["steps"] = std::to_string(steps);
    out.diagnostics["tabu_moves"] = std::to_string(lookahead_moves);
    out.diagnostics["graphs_scored"] = std::to_string(scorer.graphs_scored());
    out.diagnostics["score"] = format_double(current.total);
    out.diagnostics["step_limit_hit"] = steps >= opts.max_steps ? "1" : "0";
    return out;
}

DiscoveryResult gds(const Dataset& data, const DiscoveryOptions& opts) {
    IndependenceScorer scorer(data, opts);
    return gds(scorer);
}

// ---------------------------------------------------------------- bivariate

const char* to_string(Direction d) {
    switch (d) {
        case Direction::x_causes_y:
            return "x_causes_y";
        case Direction::y_causes_x:
            return "y_causes_x";
        case Direction::undecided:
            break;
    }
    return "undecided";
}

DirectionVerdict infer_direction(const Eigen::VectorXd& x, const Eigen::VectorXd& y, const DirectionOptions& opts) {
    if (x.size() != y.size()) throw std::invalid_argument("infer_direction: length mismatch");
    if (x.size() < 20) throw std::invalid_argument("infer_direction: need at least 20 samples");
    DirectionVerdict out;
    auto constant = [](const Eigen::VectorXd& v) { return (v.array() - v.mean()).abs().maxCoeff() <= 1e-12 * (std::abs(v.mean()) + 1.0); };
    if (constant(x) || constant(y)) {
        out.degenerate = true;
        return out;
    }
    const Eigen::VectorXd ry = fit(Eigen::MatrixXd(x), y, opts.regression).residuals;
    const Eigen::VectorXd rx = fit(Eigen::MatrixXd(y), x, opts.regression).residuals;
    out.p_forward = hsic_pvalue(ry, x, opts.hsic).p_value;
    out.p_backward = hsic_pvalue(rx, y, opts.hsic).p_value;
    out.rank_key = std::max(out.p_forward, out.p_backward);
    if (out.rank_key < opts.rejection_floor || out.p_forward == out.p_backward) {
        out.decision = Direction::undecided;
    } else {
        out.decision = out.p_forward > out.p_backward ? Direction::x_causes_y : Direction::y_causes_x;
    }
    return out;
}

void write_result(const std::string& graph_path, const std::string& diagnostics_path, const DiscoveryResult& result) {
    write_graph_file(graph_path, result.graph);
    std::ofstream out(diagnostics_path);
    if (!out) throw std::runtime_error("cannot write diagnostics file " + diagnostics_path);
    auto diag = result.diagnostics;
    if (result.score) {
        diag["score.total"] = format_double(result.score->total);
        diag["score.lambda"] = format_double(result.score->lambda);
        diag["score.edge_count"] = std::to_string(result.score->edge_count);
        for (std::size_t i = 0; i < result.score->per_node_dm.size(); ++i) {
            diag["score.dm." + std::to_string(i)] = format_double(result.score->per_node_dm[i]);
        }
    }
    for (const auto& [k, v] : diag) out << k << '=' << v << '\n';
}

}  // namespace anm

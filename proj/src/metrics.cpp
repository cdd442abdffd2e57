#include "anm/metrics.hpp"

#include "anm/errors.hpp"
#include "anm/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace anm {

int shd(const Pdag& a, const Pdag& b) {
    if (a.size() != b.size()) throw std::invalid_argument("shd: graphs differ in node count");
    int d = 0;
    for (int i = 0; i < a.size(); ++i) {
        for (int j = i + 1; j < a.size(); ++j) {
            if (a.edge_type(i, j) != b.edge_type(i, j)) ++d;
        }
    }
    return d;
}

int shd(const Dag& a, const Dag& b) { return shd(Pdag::from_dag(a), Pdag::from_dag(b)); }

namespace {

SidResult empty_result(int p) {
    SidResult r;
    r.good.assign(static_cast<std::size_t>(p), std::vector<bool>(static_cast<std::size_t>(p), true));
    return r;
}

void finish(SidResult& r) {
    const int p = static_cast<int>(r.good.size());
    r.bad_pairs = 0;
    for (int i = 0; i < p; ++i) {
        for (int j = 0; j < p; ++j) {
            if (i != j && !r.good[i][j]) ++r.bad_pairs;
        }
    }
    r.lower = r.upper = r.bad_pairs;
}

// Valid adjustment for the effect of i on j (j not in z): z avoids every
// descendant of a non-i node on a proper causal path from i to j, and z
// d-separates i and j once the first edge of each such path is removed.
bool valid_adjustment(const Dag& g, int i, int j, NodeMask z) {
    const NodeMask de_i = g.descendants(i);
    const NodeMask an_j = g.ancestors_of(bit(j));
    // nodes other than i lying on a directed path from i to j
    const NodeMask on_path = de_i & an_j;
    NodeMask forbidden = 0;
    for (int w : mask_nodes(on_path)) forbidden |= bit(w) | g.descendants(w);
    if ((z & forbidden) != 0) return false;

    auto parents = g.parent_masks();
    for (int c : mask_nodes(g.children(i) & on_path)) parents[c] &= ~bit(i);
    return d_separated(Dag::from_parents(parents), bit(i), bit(j), z);
}

}  // namespace

SidResult sid(const Dag& truth, const Dag& estimate) {
    if (truth.size() != estimate.size()) throw std::invalid_argument("sid: graphs differ in node count");
    const int p = truth.size();
    SidResult r = empty_result(p);
    for (int i = 0; i < p; ++i) {
        const NodeMask z = estimate.parents(i);
        const NodeMask de_i = truth.descendants(i);
        for (int j = 0; j < p; ++j) {
            if (i == j) continue;
            if (contains(z, j)) {
                // adjusting for j itself predicts no effect of i on j
                r.good[i][j] = !contains(de_i, j);
            } else {
                r.good[i][j] = valid_adjustment(truth, i, j, z);
            }
        }
    }
    finish(r);
    return r;
}

namespace {

// Exact joint distribution of a binary SEM: index bit k = value of node k.
struct BinarySem {
    int p;
    std::vector<NodeMask> parents;
    std::vector<std::vector<double>> prob_one;  // per node, per parent configuration

    double conditional(int node, std::uint32_t state) const {
        std::size_t cfg = 0;
        int pos = 0;
        for (int u : mask_nodes(parents[node])) cfg |= static_cast<std::size_t>((state >> u) & 1U) << pos++;
        const double q = prob_one[node][cfg];
        return ((state >> node) & 1U) ? q : 1.0 - q;
    }

    // Truncated factorization with node `target` clamped (target < 0: observational).
    std::vector<double> joint(int target = -1, int value = 0) const {
        const std::uint32_t states = 1U << p;
        std::vector<double> out(states, 0.0);
        for (std::uint32_t s = 0; s < states; ++s) {
            if (target >= 0 && static_cast<int>((s >> target) & 1U) != value) continue;
            double pr = 1.0;
            for (int v = 0; v < p; ++v) {
                if (v != target) pr *= conditional(v, s);
            }
            out[s] = pr;
        }
        return out;
    }
};

BinarySem random_binary_sem(const Dag& g, Rng& rng) {
    BinarySem sem{g.size(), g.parent_masks(), {}};
    for (int v = 0; v < g.size(); ++v) {
        std::vector<double> table(std::size_t{1} << popcount(g.parents(v)));
        for (double& q : table) q = rng.uniform(0.1, 0.9);
        sem.prob_one.push_back(std::move(table));
    }
    return sem;
}

// p(x_j = 1 | do(x_i = v)) from the adjustment formula with set z, using the
// observational joint only.
double adjusted_effect(const std::vector<double>& joint, int i, int v, int j, NodeMask z) {
    // sum_z p(x_j = 1 | x_i = v, z) p(z)
    std::vector<double> p_z;        // indexed by z-configuration
    std::vector<double> p_iz;       // p(x_i = v, z)
    std::vector<double> p_jiz;      // p(x_j = 1, x_i = v, z)
    const auto znodes = mask_nodes(z);
    const std::size_t configs = std::size_t{1} << znodes.size();
    p_z.assign(configs, 0.0);
    p_iz.assign(configs, 0.0);
    p_jiz.assign(configs, 0.0);
    for (std::uint32_t s = 0; s < joint.size(); ++s) {
        std::size_t cfg = 0;
        for (std::size_t k = 0; k < znodes.size(); ++k) cfg |= static_cast<std::size_t>((s >> znodes[k]) & 1U) << k;
        p_z[cfg] += joint[s];
        if (static_cast<int>((s >> i) & 1U) == v) {
            p_iz[cfg] += joint[s];
            if ((s >> j) & 1U) p_jiz[cfg] += joint[s];
        }
    }
    double total = 0.0;
    for (std::size_t c = 0; c < configs; ++c) {
        if (p_z[c] > 0.0) total += p_jiz[c] / p_iz[c] * p_z[c];
    }
    return total;
}

}  // namespace

SidResult sid_oracle(const Dag& truth, const Dag& estimate, int trials, std::uint64_t seed) {
    if (truth.size() != estimate.size()) throw std::invalid_argument("sid_oracle: graphs differ in node count");
    if (truth.size() > 6) throw RefusalError("sid_oracle: exact enumeration limited to p <= 6");
    if (trials < 1) throw std::invalid_argument("sid_oracle: trials must be >= 1");
    const int p = truth.size();
    SidResult r = empty_result(p);
    Rng rng(seed);
    for (int t = 0; t < trials; ++t) {
        const BinarySem sem = random_binary_sem(truth, rng);
        const auto observational = sem.joint();
        for (int i = 0; i < p; ++i) {
            const NodeMask z = estimate.parents(i);
            for (int v = 0; v <= 1; ++v) {
                const auto intervened = sem.joint(i, v);
                for (int j = 0; j < p; ++j) {
                    if (i == j || !r.good[i][j]) continue;
                    double truth_one = 0.0;
                    for (std::uint32_t s = 0; s < intervened.size(); ++s) {
                        if ((s >> j) & 1U) truth_one += intervened[s];
                    }
                    const double est_one = adjusted_effect(observational, i, v, j, z);
                    // total variation of two Bernoulli laws = |difference of P(1)|
                    if (std::abs(truth_one - est_one) > 1e-9) r.good[i][j] = false;
                }
            }
        }
    }
    finish(r);
    return r;
}

SidResult sid_bounds(const Dag& truth, const Pdag& estimate) {
    const auto members = dag_extensions(estimate);
    SidResult best;
    int lo = 0;
    int hi = 0;
    for (std::size_t k = 0; k < members.size(); ++k) {
        SidResult r = sid(truth, members[k]);
        if (k == 0 || r.bad_pairs < lo) {
            lo = r.bad_pairs;
            best = r;
        }
        hi = k == 0 ? r.bad_pairs : std::max(hi, r.bad_pairs);
    }
    best.lower = lo;
    best.upper = hi;
    return best;
}

}  // namespace anm

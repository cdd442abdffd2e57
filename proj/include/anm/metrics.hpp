#pragma once

#include "anm/graphs.hpp"

#include <cstdint>
#include <vector>

namespace anm {

struct SidResult {
    int bad_pairs = 0;
    /// good[i][j]: p(x_j | do(x_i)) is recovered by adjusting for the
    /// estimate's parents of i. Diagonal unused (true).
    std::vector<std::vector<bool>> good;
    int lower = 0;
    int upper = 0;
};

/// Number of node pairs whose edge type (none, i->j, j->i, undirected)
/// differs. Throws std::invalid_argument on mismatched node counts.
int shd(const Pdag& a, const Pdag& b);
int shd(const Dag& a, const Dag& b);

/// Structural intervention distance by the graphical adjustment criterion.
SidResult sid(const Dag& truth, const Dag& estimate);

/// Ground-truth SID: random binary SEMs on `truth` (conditional
/// probabilities uniform in (0.1, 0.9)); a pair is good iff the
/// parent-adjusted estimate matches the truncated-factorization
/// interventional distribution to 1e-9 in total variation in every trial.
SidResult sid_oracle(const Dag& truth, const Dag& estimate, int trials = 5, std::uint64_t seed = 0);

/// Minimum and maximum SID over the DAGs represented by a CPDAG.
SidResult sid_bounds(const Dag& truth, const Pdag& estimate);

}  // namespace anm

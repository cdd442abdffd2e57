#pragma once

#include "anm/discovery.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace anm {

enum class PairTruth { x_causes_y, y_causes_x };

struct PairRecord {
    std::string id;
    Eigen::VectorXd x;
    Eigen::VectorXd y;
    double weight = 1.0;
    PairTruth truth = PairTruth::x_causes_y;
    /// Multivariate cause or effect block; not evaluated.
    bool skipped = false;
    /// Sample size before the n-cap.
    Eigen::Index original_n = 0;
};

inline constexpr Eigen::Index kPairSampleCap = 2000;

/// Reads <dir>/pairmeta.txt ("id causeFirst causeLast effectFirst effectLast
/// weight", 1-based columns) and the sample files <dir>/pair<id>.txt.
/// Longer pairs are subsampled without replacement to `cap` rows.
std::vector<PairRecord> load_pairs(const std::string& dir, std::uint64_t seed = 0,
                                   Eigen::Index cap = kPairSampleCap);

struct CurvePoint {
    double decision_rate = 0.0;
    double accuracy = 0.0;
    double ci68_low = 0.0;
    double ci68_high = 1.0;
    double ci95_low = 0.0;
    double ci95_high = 1.0;
};

struct AccuracyCurve {
    std::vector<CurvePoint> points;
};

struct RankedPair {
    std::string id;
    double weight = 1.0;
    double rank_key = 0.0;
    bool correct = false;
};

/// Sorts by rank_key (descending, ties by id) and emits one point per
/// tie group. Undecided pairs count as taken but incorrect.
AccuracyCurve accuracy_curve(std::vector<RankedPair> ranked);

/// Runs infer_direction on every non-skipped record and builds the curve.
AccuracyCurve rank_and_curve(const std::vector<PairRecord>& records, const DirectionOptions& opts = {},
                             std::vector<DirectionVerdict>* verdicts = nullptr);

void write_curve_csv(std::ostream& out, const AccuracyCurve& curve);

}  // namespace anm

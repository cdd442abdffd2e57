#include "anm/pairs.hpp"
#include "anm/rng.hpp"
#include "anm/simulation.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

using namespace anm;
namespace fs = std::filesystem;

namespace {

class TempDir {
public:
    TempDir() {
        path_ = fs::temp_directory_path() /
                ("anm_pairs_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
                 ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    const fs::path& path() const { return path_; }
    void write(const std::string& name, const std::string& body) const { std::ofstream(path_ / name) << body; }

private:
    fs::path path_;
};

std::string columns(int n, int width, double offset = 0.0) {
    std::ostringstream os;
    for (int i = 0; i < n; ++i) {
        for (int c = 0; c < width; ++c) os << (c ? " " : "") << offset + i + 0.1 * c;
        os << '\n';
    }
    return os.str();
}

// Weighted prefix sweep written without tie grouping; only the last entry
// of each tie group is compared.
std::vector<CurvePoint> naive_curve(std::vector<RankedPair> r) {
    std::sort(r.begin(), r.end(), [](auto& a, auto& b) {
        return a.rank_key != b.rank_key ? a.rank_key > b.rank_key : a.id < b.id;
    });
    double total = 0.0;
    for (auto& x : r) total += x.weight;
    std::vector<CurvePoint> out;
    for (std::size_t k = 1; k <= r.size(); ++k) {
        if (k < r.size() && r[k].rank_key == r[k - 1].rank_key) continue;
        double w = 0.0, c = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            w += r[i].weight;
            if (r[i].correct) c += r[i].weight;
        }
        out.push_back({w / total, c / w});
    }
    return out;
}

void expect_same(const AccuracyCurve& a, const std::vector<CurvePoint>& b) {
    ASSERT_EQ(a.points.size(), b.size());
    for (std::size_t i = 0; i < b.size(); ++i) {
        EXPECT_NEAR(a.points[i].decision_rate, b[i].decision_rate, 1e-12);
        EXPECT_NEAR(a.points[i].accuracy, b[i].accuracy, 1e-12);
    }
}

}  // namespace

TEST(LoadPairs, TwoUnivariatePairs) {
    TempDir d;
    d.write("pairmeta.txt", "0001 1 1 2 2 1\n0002 2 2 1 1 0.5\n");
    d.write("pair0001.txt", columns(30, 2));
    d.write("pair0002.txt", columns(40, 2, 100.0));
    const auto recs = load_pairs(d.path().string());
    ASSERT_EQ(recs.size(), 2U);
    for (const auto& r : recs) EXPECT_FALSE(r.skipped);
    EXPECT_EQ(recs[0].truth, PairTruth::x_causes_y);
    EXPECT_EQ(recs[1].truth, PairTruth::y_causes_x);
    EXPECT_EQ(recs[1].weight, 0.5);
    EXPECT_EQ(recs[1].x.size(), 40);
    EXPECT_DOUBLE_EQ(recs[1].x(3), 103.0);
    EXPECT_DOUBLE_EQ(recs[1].y(3), 103.1);
}

TEST(LoadPairs, MultivariateBlockIsSkipped) {
    TempDir d;
    d.write("pairmeta.txt", "0001 1 1 2 2 1\n0052 1 2 3 3 1\n");
    d.write("pair0001.txt", columns(30, 2));
    d.write("pair0052.txt", columns(30, 3));
    const auto recs = load_pairs(d.path().string());
    ASSERT_EQ(recs.size(), 2U);
    EXPECT_FALSE(recs[0].skipped);
    EXPECT_TRUE(recs[1].skipped);
}

TEST(LoadPairs, MalformedRowNamesTheRow) {
    TempDir d;
    d.write("pairmeta.txt", "0001 1 1 2 2 1\n0002 1 x 2 2 1\n");
    d.write("pair0001.txt", columns(30, 2));
    try {
        load_pairs(d.path().string());
        FAIL();
    } catch (const std::runtime_error& e) {
        EXPECT_NE(std::string(e.what()).find("row 2"), std::string::npos);
    }
}

TEST(LoadPairs, MissingFileNamesTheId) {
    TempDir d;
    d.write("pairmeta.txt", "0007 1 1 2 2 1\n");
    try {
        load_pairs(d.path().string());
        FAIL();
    } catch (const std::runtime_error& e) {
        EXPECT_NE(std::string(e.what()).find("0007"), std::string::npos);
    }
}

TEST(LoadPairs, CapSubsamplesDeterministically) {
    TempDir d;
    d.write("pairmeta.txt", "0001 1 1 2 2 1\n");
    d.write("pair0001.txt", columns(500, 2));
    const auto a = load_pairs(d.path().string(), 4, 100);
    const auto b = load_pairs(d.path().string(), 4, 100);
    ASSERT_EQ(a[0].x.size(), 100);
    EXPECT_EQ(a[0].original_n, 500);
    EXPECT_EQ(a[0].x, b[0].x);
    // rows stay paired and in file order
    for (Eigen::Index i = 0; i < 100; ++i) EXPECT_NEAR(a[0].y(i) - a[0].x(i), 0.1, 1e-9);
    for (Eigen::Index i = 1; i < 100; ++i) EXPECT_LT(a[0].x(i - 1), a[0].x(i));
    EXPECT_NE(load_pairs(d.path().string(), 5, 100)[0].x, a[0].x);
}

TEST(Curve, AllCorrectGivesOne) {
    std::vector<RankedPair> r;
    for (int i = 0; i < 12; ++i) r.push_back({"p" + std::to_string(i), 1.0, 1.0 - 0.05 * i, true});
    const auto c = accuracy_curve(r);
    ASSERT_EQ(c.points.size(), 12U);
    for (const auto& p : c.points) {
        EXPECT_EQ(p.accuracy, 1.0);
        EXPECT_EQ(p.ci68_high, 1.0);
        EXPECT_EQ(p.ci95_high, 1.0);
        EXPECT_LE(p.ci95_low, p.ci68_low);
    }
    EXPECT_EQ(c.points.back().decision_rate, 1.0);
}

TEST(Curve, DecisionRatesAreCumulativeWeights) {
    Rng rng(3);
    std::vector<RankedPair> r;
    for (int i = 0; i < 40; ++i) {
        r.push_back({"p" + std::to_string(100 + i), rng.uniform(0.05, 1.0), rng.uniform(), rng.uniform() < 0.7});
    }
    expect_same(accuracy_curve(r), naive_curve(r));
    const auto c = accuracy_curve(r);
    for (std::size_t i = 1; i < c.points.size(); ++i) {
        EXPECT_GT(c.points[i].decision_rate, c.points[i - 1].decision_rate);
        EXPECT_LE(c.points[i].ci95_low, c.points[i].ci68_low);
        EXPECT_LE(c.points[i].ci68_high, c.points[i].ci95_high);
    }
}

TEST(Curve, EightFoldPairCountsOnce) {
    std::vector<RankedPair> r;
    for (int k = 0; k < 8; ++k) r.push_back({"rep" + std::to_string(k), 1.0 / 8, 0.9 - 0.01 * k, k < 4});
    r.push_back({"single", 1.0, 0.1, true});
    const auto c = accuracy_curve(r);
    EXPECT_NEAR(c.points[7].decision_rate, 0.5, 1e-12);
    EXPECT_NEAR(c.points[7].accuracy, 0.5, 1e-12);
    EXPECT_NEAR(c.points.back().accuracy, 0.75, 1e-12);
}

TEST(Curve, TiesAreOrderInvariant) {
    std::vector<RankedPair> r{{"a", 1.0, 0.5, true}, {"b", 0.5, 0.5, false}, {"c", 1.0, 0.5, false},
                              {"d", 0.3, 0.9, true}, {"e", 0.7, 0.1, true}};
    const auto base = accuracy_curve(r);
    ASSERT_EQ(base.points.size(), 3U);
    std::sort(r.begin(), r.end(), [](auto& x, auto& y) { return x.id > y.id; });
    do {
        const auto c = accuracy_curve(r);
        for (std::size_t i = 0; i < 3; ++i) {
            EXPECT_DOUBLE_EQ(c.points[i].accuracy, base.points[i].accuracy);
            EXPECT_DOUBLE_EQ(c.points[i].decision_rate, base.points[i].decision_rate);
        }
    } while (std::prev_permutation(r.begin(), r.end(), [](auto& x, auto& y) { return x.id < y.id; }));
}

TEST(Curve, RemovalMatchesReducedSet) {
    Rng rng(9);
    std::vector<RankedPair> r;
    for (int i = 0; i < 15; ++i) r.push_back({"q" + std::to_string(i), rng.uniform(0.1, 1.0), rng.uniform(), i % 3 != 0});
    for (std::size_t drop = 0; drop < r.size(); ++drop) {
        auto reduced = r;
        reduced.erase(reduced.begin() + static_cast<long>(drop));
        expect_same(accuracy_curve(reduced), naive_curve(reduced));
    }
}

TEST(Curve, CsvColumns) {
    std::ostringstream os;
    write_curve_csv(os, accuracy_curve({{"a", 1.0, 0.2, true}}));
    EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "decision_rate,accuracy,ci68_low,ci68_high,ci95_low,ci95_high");
}

TEST(RankAndCurve, SyntheticNonlinearPairs) {
    std::vector<PairRecord> recs;
    for (int i = 0; i < 20; ++i) {
        const bool flip = i % 2 == 1;
        const auto [data, spec] = sample_nonlinear_sem(Dag(2, {{0, 1}}), 500, derive_seed(77, i));
        PairRecord rec;
        rec.id = "s" + std::to_string(i);
        rec.x = data.column(flip ? 1 : 0);
        rec.y = data.column(flip ? 0 : 1);
        rec.truth = flip ? PairTruth::y_causes_x : PairTruth::x_causes_y;
        rec.original_n = 500;
        recs.push_back(rec);
    }
    std::vector<DirectionVerdict> verdicts;
    const auto c = rank_and_curve(recs, {}, &verdicts);
    EXPECT_EQ(verdicts.size(), 20U);
    EXPECT_EQ(c.points.back().decision_rate, 1.0);
    EXPECT_GE(c.points.back().accuracy, 0.9);
}

TEST(RankAndCurve, AllSkippedIsAnError) {
    PairRecord rec;
    rec.skipped = true;
    EXPECT_THROW(rank_and_curve({rec}), std::invalid_argument);
}

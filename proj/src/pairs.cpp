#include "anm/pairs.hpp"

#include "anm/rng.hpp"
#include "anm/stats.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace anm {

namespace {

std::vector<std::vector<double>> read_table(const std::filesystem::path& path, const std::string& id) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("pairs: missing sample file for pair '" + id + "' (" + path.string() + ")");
    std::vector<std::vector<double>> rows;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream is(line);
        std::vector<double> row;
        std::string tok;
        while (is >> tok) {
            try {
                std::size_t used = 0;
                row.push_back(std::stod(tok, &used));
                if (used != tok.size()) throw std::invalid_argument(tok);
            } catch (const std::exception&) {
                throw std::runtime_error("pairs: pair '" + id + "' line " + std::to_string(line_no) +
                                         ": non-numeric value '" + tok + "'");
            }
        }
        if (row.empty()) continue;
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw std::runtime_error("pairs: pair '" + id + "' line " + std::to_string(line_no) +
                                     ": inconsistent column count");
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::runtime_error("pairs: pair '" + id + "' has no samples");
    return rows;
}

std::filesystem::path sample_path(const std::filesystem::path& dir, const std::string& id) {
    const std::string stem = id.rfind("pair", 0) == 0 ? id : "pair" + id;
    return dir / (stem + ".txt");
}

}  // namespace

std::vector<PairRecord> load_pairs(const std::string& dir, std::uint64_t seed, Eigen::Index cap) {
    const std::filesystem::path root(dir);
    std::ifstream meta(root / "pairmeta.txt");
    if (!meta) throw std::runtime_error("pairs: cannot open " + (root / "pairmeta.txt").string());

    std::vector<PairRecord> out;
    std::string line;
    int row_no = 0;
    while (std::getline(meta, line)) {
        ++row_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream is(line);
        std::string id;
        int cf = 0, cl = 0, ef = 0, el = 0;
        double w = 0.0;
        std::string extra;
        if (!(is >> id >> cf >> cl >> ef >> el >> w) || (is >> extra)) {
            throw std::runtime_error("pairs: malformed metadata row " + std::to_string(row_no) + ": '" + line + "'");
        }
        if (cf < 1 || cl < cf || ef < 1 || el < ef || !(w > 0.0) || w > 1.0) {
            throw std::runtime_error("pairs: invalid metadata row " + std::to_string(row_no) + ": '" + line + "'");
        }

        PairRecord rec;
        rec.id = id;
        rec.weight = w;
        const auto rows = read_table(sample_path(root, id), id);
        const int width = static_cast<int>(rows.front().size());
        if (std::max(cl, el) > width) {
            throw std::runtime_error("pairs: metadata row " + std::to_string(row_no) + " references column " +
                                     std::to_string(std::max(cl, el)) + " but pair '" + id + "' has " +
                                     std::to_string(width));
        }
        rec.original_n = static_cast<Eigen::Index>(rows.size());
        if (cl > cf || el > ef) {
            rec.skipped = true;
            out.push_back(std::move(rec));
            continue;
        }
        // x is always the first column of the file
        const int xc = std::min(cf, ef) - 1;
        const int yc = std::max(cf, ef) - 1;
        rec.truth = cf < ef ? PairTruth::x_causes_y : PairTruth::y_causes_x;

        std::vector<int> keep(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) keep[i] = static_cast<int>(i);
        if (static_cast<Eigen::Index>(rows.size()) > cap) {
            Rng rng(derive_seed(seed, static_cast<std::uint64_t>(out.size())));
            rng.shuffle(std::span<int>(keep));
            keep.resize(static_cast<std::size_t>(cap));
            std::sort(keep.begin(), keep.end());
        }
        rec.x.resize(static_cast<Eigen::Index>(keep.size()));
        rec.y.resize(static_cast<Eigen::Index>(keep.size()));
        for (std::size_t i = 0; i < keep.size(); ++i) {
            rec.x(static_cast<Eigen::Index>(i)) = rows[keep[i]][xc];
            rec.y(static_cast<Eigen::Index>(i)) = rows[keep[i]][yc];
        }
        out.push_back(std::move(rec));
    }
    return out;
}

AccuracyCurve accuracy_curve(std::vector<RankedPair> ranked) {
    if (ranked.empty()) throw std::invalid_argument("accuracy_curve: no decided pairs");
    std::sort(ranked.begin(), ranked.end(), [](const RankedPair& a, const RankedPair& b) {
        if (a.rank_key != b.rank_key) return a.rank_key > b.rank_key;
        return a.id < b.id;
    });
    double total = 0.0;
    for (const auto& r : ranked) total += r.weight;

    AccuracyCurve curve;
    double taken = 0.0;
    double right = 0.0;
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        taken += ranked[i].weight;
        if (ranked[i].correct) right += ranked[i].weight;
        if (i + 1 < ranked.size() && ranked[i + 1].rank_key == ranked[i].rank_key) continue;

        CurvePoint pt;
        pt.decision_rate = taken / total;
        pt.accuracy = right / taken;
        const long trials = std::max(1L, std::lround(taken));
        const long wins = std::clamp(std::lround(right), 0L, trials);
        std::tie(pt.ci68_low, pt.ci68_high) = clopper_pearson(wins, trials, 0.68);
        std::tie(pt.ci95_low, pt.ci95_high) = clopper_pearson(wins, trials, 0.95);
        curve.points.push_back(pt);
    }
    return curve;
}

AccuracyCurve rank_and_curve(const std::vector<PairRecord>& records, const DirectionOptions& opts,
                             std::vector<DirectionVerdict>* verdicts) {
    std::vector<RankedPair> ranked;
    for (const auto& rec : records) {
        if (rec.skipped) continue;
        const DirectionVerdict v = infer_direction(rec.x, rec.y, opts);
        if (verdicts) verdicts->push_back(v);
        const bool correct = (v.decision == Direction::x_causes_y && rec.truth == PairTruth::x_causes_y) ||
                             (v.decision == Direction::y_causes_x && rec.truth == PairTruth::y_causes_x);
        ranked.push_back({rec.id, rec.weight, v.rank_key, correct});
    }
    if (ranked.empty()) throw std::invalid_argument("rank_and_curve: every record is skipped");
    return accuracy_curve(std::move(ranked));
}

void write_curve_csv(std::ostream& out, const AccuracyCurve& curve) {
    out << "decision_rate,accuracy,ci68_low,ci68_high,ci95_low,ci95_high\n" << std::setprecision(10);
    for (const auto& p : curve.points) {
        out << p.decision_rate << ',' << p.accuracy << ',' << p.ci68_low << ',' << p.ci68_high << ','
            << p.ci95_low << ',' << p.ci95_high << '\n';
    }
}

}  // namespace anm

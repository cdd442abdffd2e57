#include "anm/bench.hpp"

#include "anm/discovery.hpp"
#include "anm/metrics.hpp"
#include "anm/rng.hpp"
#include "anm/stats.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace anm {

const char* to_string(BenchMethod m) {
    switch (m) {
        case BenchMethod::resit: return "resit";
        case BenchMethod::gds: return "gds";
        case BenchMethod::brute_force: return "brute_force";
        case BenchMethod::random_baseline: return "random_baseline";
    }
    return "?";
}

BenchMethod parse_bench_method(const std::string& name) {
    if (name == "resit") return BenchMethod::resit;
    if (name == "gds") return BenchMethod::gds;
    if (name == "brute_force" || name == "brute-force") return BenchMethod::brute_force;
    if (name == "random_baseline" || name == "random") return BenchMethod::random_baseline;
    throw std::invalid_argument("unknown method '" + name + "'");
}

BenchConfig::BenchConfig() : lambda(kDefaultLambda) {}

void BenchConfig::validate() const {
    if (replicates < 1) throw std::invalid_argument("bench: replicates must be >= 1");
    if (regimes.empty() || p.empty() || n.empty() || methods.empty()) {
        throw std::invalid_argument("bench: regimes, p, n and methods must be non-empty");
    }
    if (brute_force_max_p < 1 || brute_force_max_p > 5) {
        throw std::invalid_argument("bench: brute_force_max_p must be in [1, 5]");
    }
    for (int v : p) {
        if (v < 2 || v > 58) throw std::invalid_argument("bench: p must be in [2, 58]");
    }
    for (int v : n) {
        if (v < 10) throw std::invalid_argument("bench: n must be >= 10");
    }
    const bool brute = std::find(methods.begin(), methods.end(), BenchMethod::brute_force) != methods.end();
    if (brute && *std::max_element(p.begin(), p.end()) > brute_force_max_p) {
        throw std::invalid_argument("bench: brute_force requested with p > " + std::to_string(brute_force_max_p));
    }
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("bench: alpha must be in (0, 1)");
    if (!(lambda >= 0.0)) throw std::invalid_argument("bench: lambda must be non-negative");
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

int to_int(const std::string& key, const std::string& s) {
    std::size_t used = 0;
    int v = 0;
    try {
        v = std::stoi(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != s.size() || s.empty()) throw std::invalid_argument("bench config: '" + key + "' expects an integer, got '" + s + "'");
    return v;
}

double to_double(const std::string& key, const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != s.size() || s.empty()) throw std::invalid_argument("bench config: '" + key + "' expects a number, got '" + s + "'");
    return v;
}

}  // namespace

BenchConfig parse_bench_config(std::istream& in) {
    BenchConfig cfg;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("bench config line " + std::to_string(line_no) + ": expected key=value");
        }
        const std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
        const auto items = split_list(value);
        if (key == "regimes" || key == "regime") {
            cfg.regimes.clear();
            for (const auto& s : items) cfg.regimes.push_back(parse_regime(s));
        } else if (key == "p") {
            cfg.p.clear();
            for (const auto& s : items) cfg.p.push_back(to_int(key, s));
        } else if (key == "n") {
            cfg.n.clear();
            for (const auto& s : items) cfg.n.push_back(to_int(key, s));
        } else if (key == "replicates") {
            cfg.replicates = to_int(key, value);
        } else if (key == "methods" || key == "method") {
            cfg.methods.clear();
            for (const auto& s : items) cfg.methods.push_back(parse_bench_method(s));
        } else if (key == "lambda") {
            cfg.lambda = to_double(key, value);
        } else if (key == "alpha") {
            cfg.alpha = to_double(key, value);
        } else if (key == "seed") {
            cfg.seed = static_cast<std::uint64_t>(std::stoull(value));
        } else if (key == "out" || key == "output") {
            cfg.out = value;
        } else if (key == "regression") {
            if (value == "auto") {
                cfg.regression.reset();
            } else {
                cfg.regression = parse_regression_kind(value);
            }
        } else if (key == "brute_force_max_p") {
            cfg.brute_force_max_p = to_int(key, value);
        } else {
            throw std::invalid_argument("bench config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
    }
    cfg.validate();
    return cfg;
}

BenchConfig read_bench_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open bench config " + path);
    return parse_bench_config(in);
}

double BenchReport::failure_rate() const {
    return rows.empty() ? 0.0 : static_cast<double>(failures) / static_cast<double>(rows.size());
}

namespace {

std::uint64_t cell_seed(std::uint64_t seed, Regime r, int p, int n, int rep) {
    std::uint64_t s = derive_seed(seed, static_cast<std::uint64_t>(r));
    s = derive_seed(s, static_cast<std::uint64_t>(p) * 1000003ULL + static_cast<std::uint64_t>(n));
    return derive_seed(s, static_cast<std::uint64_t>(rep));
}

void aggregate(BenchReport& report, const BenchConfig& cfg) {
    using Key = std::tuple<int, int, int, int>;
    std::map<Key, std::vector<const ReplicateRow*>> cells;
    for (const auto& row : report.rows) {
        if (row.ok) cells[{static_cast<int>(row.regime), row.p, row.n, static_cast<int>(row.method)}].push_back(&row);
    }
    for (Regime r : cfg.regimes) {
        for (int p : cfg.p) {
            for (int n : cfg.n) {
                for (BenchMethod m : cfg.methods) {
                    const auto& rows = cells[{static_cast<int>(r), p, n, static_cast<int>(m)}];
                    auto add = [&](const std::string& metric, auto get) {
                        std::vector<double> v;
                        for (const auto* row : rows) v.push_back(get(*row));
                        report.aggregates.push_back({r, p, n, m, metric, v.empty() ? 0.0 : mean(v), sample_sd(v),
                                                     static_cast<int>(v.size())});
                    };
                    add("shd_dag", [](const ReplicateRow& x) { return double(x.shd_dag); });
                    add("shd_cpdag", [](const ReplicateRow& x) { return double(x.shd_cpdag); });
                    add("sid", [](const ReplicateRow& x) { return double(x.sid); });
                }
            }
        }
    }
}

}  // namespace

BenchReport run_benchmark(const BenchConfig& cfg) {
    cfg.validate();
    BenchReport report;
    for (Regime regime : cfg.regimes) {
        for (int p : cfg.p) {
            for (int n : cfg.n) {
                for (int rep = 0; rep < cfg.replicates; ++rep) {
                    const std::uint64_t seed = cell_seed(cfg.seed, regime, p, n, rep);
                    std::optional<std::pair<Dataset, SemSpec>> sim;
                    std::string sim_error;
                    try {
                        sim = simulate({p, n, regime, seed, std::nullopt});
                    } catch (const std::exception& e) {
                        sim_error = std::string("simulate: ") + e.what();
                    }

                    std::optional<IndependenceScorer> scorer;
                    if (sim) {
                        DiscoveryOptions opts;
                        opts.alpha = cfg.alpha;
                        opts.lambda = cfg.lambda;
                        opts.seed = seed;
                        opts.enumeration_cap = cfg.brute_force_max_p;
                        opts.regression.kind = cfg.regression.value_or(
                            regime == Regime::linear_nongauss ? RegressionKind::linear : RegressionKind::kernel);
                        opts.regression.kernel.seed = seed;
                        scorer.emplace(sim->first, opts);
                    }

                    for (BenchMethod method : cfg.methods) {
                        ReplicateRow row;
                        row.regime = regime;
                        row.p = p;
                        row.n = n;
                        row.replicate = rep;
                        row.method = method;
                        if (!sim) {
                            row.error = sim_error;
                            report.rows.push_back(row);
                            ++report.failures;
                            continue;
                        }
                        try {
                            Dag est{p};
                            switch (method) {
                                case BenchMethod::resit: est = resit(*scorer).graph; break;
                                case BenchMethod::gds: est = gds(*scorer).graph; break;
                                case BenchMethod::brute_force: est = brute_force(*scorer).graph; break;
                                case BenchMethod::random_baseline:
                                    est = random_baseline_dag(p, derive_seed(seed, 7));
                                    break;
                            }
                            const Dag& truth = sim->second.graph;
                            row.shd_dag = shd(truth, est);
                            row.shd_cpdag = shd(cpdag(truth), cpdag(est));
                            row.sid = sid(truth, est).bad_pairs;
                            row.score = scorer->score(est).total;
                            row.ok = true;
                        } catch (const std::exception& e) {
                            row.error = e.what();
                            ++report.failures;
                        }
                        report.rows.push_back(row);
                    }
                }
            }
        }
    }
    aggregate(report, cfg);

    if (!cfg.out.empty()) {
        std::filesystem::create_directories(cfg.out);
        const std::filesystem::path dir(cfg.out);
        std::ofstream agg(dir / "bench.csv");
        std::ofstream reps(dir / "replicates.csv");
        std::ofstream fails(dir / "failures.csv");
        if (!agg || !reps || !fails) throw std::runtime_error("bench: cannot write into " + cfg.out);
        write_aggregate_csv(agg, report);
        write_replicate_csv(reps, report);
        fails << "regime,p,n,replicate,method,error\n";
        for (const auto& row : report.rows) {
            if (row.ok) continue;
            std::string msg = row.error;
            std::replace(msg.begin(), msg.end(), ',', ';');
            std::replace(msg.begin(), msg.end(), '\n', ' ');
            fails << to_string(row.regime) << ',' << row.p << ',' << row.n << ',' << row.replicate << ','
                  << to_string(row.method) << ',' << msg << '\n';
        }
    }
    return report;
}

void write_aggregate_csv(std::ostream& out, const BenchReport& report) {
    out << "regime,p,n,method,metric,mean,sd,replicates\n" << std::setprecision(6);
    for (const auto& a : report.aggregates) {
        out << to_string(a.regime) << ',' << a.p << ',' << a.n << ',' << to_string(a.method) << ',' << a.metric << ','
            << a.mean << ',' << a.sd << ',' << a.replicates << '\n';
    }
}

void write_replicate_csv(std::ostream& out, const BenchReport& report) {
    out << "regime,p,n,replicate,method,status,shd_dag,shd_cpdag,sid,score\n" << std::setprecision(17);
    for (const auto& r : report.rows) {
        out << to_string(r.regime) << ',' << r.p << ',' << r.n << ',' << r.replicate << ',' << to_string(r.method)
            << ',' << (r.ok ? "ok" : "failed");
        if (r.ok) {
            out << ',' << r.shd_dag << ',' << r.shd_cpdag << ',' << r.sid << ',' << r.score << '\n';
        } else {
            out << ",,,,\n";
        }
    }
}

}  // namespace anm

#include "anm/bench.hpp"
#include "anm/dataset.hpp"
#include "anm/discovery.hpp"
#include "anm/graphs.hpp"
#include "anm/identifiability.hpp"
#include "anm/metrics.hpp"
#include "anm/pairs.hpp"
#include "anm/simulation.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    return f;
}

// writes to the file when a path is given, otherwise to stdout
template <typename Fn>
void emit(const std::string& path, Fn&& fn) {
    if (path.empty() || path == "-") {
        fn(std::cout);
    } else {
        auto f = open_out(path);
        fn(f);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Additive noise model causal discovery toolkit"};
    app.require_subcommand(1);
    std::uint64_t seed = 0;

    // simulate
    auto* sim = app.add_subcommand("simulate", "Sample a random DAG and data from an additive noise SEM");
    anm::SimConfig sim_cfg;
    std::string sim_regime = "linear_nongauss", sim_out, sim_graph, sim_spec;
    sim->add_option("--p", sim_cfg.p, "Number of variables")->check(CLI::Range(1, 58));
    sim->add_option("--n", sim_cfg.n, "Sample size")->check(CLI::Range(2, 10000000));
    sim->add_option("--regime", sim_regime, "linear_nongauss | nonlinear_gauss");
    sim->add_option("--out", sim_out, "Data CSV")->required();
    sim->add_option("--graph-out", sim_graph, "True graph file");
    sim->add_option("--spec-out", sim_spec, "SEM description (key=value)");
    sim->add_option("--seed", seed, "Random seed")->capture_default_str();

    // discover
    auto* disc = app.add_subcommand("discover", "Estimate a DAG from data");
    std::string disc_data, disc_method = "resit", disc_out, disc_diag, disc_regression = "kernel", disc_mode = "joint";
    anm::DiscoveryOptions disc_opts;
    disc->add_option("--data", disc_data, "Data CSV")->required();
    disc->add_option("--method", disc_method, "resit | gds | brute_force")
        ->check(CLI::IsMember({"resit", "gds", "brute_force"}));
    disc->add_option("--alpha", disc_opts.alpha, "RESIT pruning level")->capture_default_str();
    disc->add_option("--lambda", disc_opts.lambda, "Edge penalty of the score")->capture_default_str();
    disc->add_option("--regression", disc_regression, "linear | kernel")->check(CLI::IsMember({"linear", "kernel"}));
    disc->add_option("--independence", disc_mode, "joint | pairwise")->check(CLI::IsMember({"joint", "pairwise"}));
    disc->add_option("--out", disc_out, "Output graph file")->required();
    disc->add_option("--diag", disc_diag, "Diagnostics file (default <out>.diag)");
    disc->add_option("--seed", seed, "Random seed")->capture_default_str();

    // evaluate
    auto* eval = app.add_subcommand("evaluate", "Compare an estimated graph with the true DAG");
    std::string eval_true, eval_est, eval_metrics = "shd,sid", eval_out;
    eval->add_option("--true", eval_true, "True DAG")->required();
    eval->add_option("--est", eval_est, "Estimated DAG or CPDAG")->required();
    eval->add_option("--metrics", eval_metrics, "Comma list of shd, shd_cpdag, sid");
    eval->add_option("--out", eval_out, "CSV output (default stdout)");
    eval->add_option("--seed", seed, "Random seed")->capture_default_str();

    // identifiability
    auto* ident = app.add_subcommand("identifiability", "Evaluate the third-order identifiability residual");
    std::string ident_spec, ident_out;
    ident->add_option("--spec", ident_spec, "Triple description (key=value)")->required();
    ident->add_option("--out", ident_out, "Residual CSV (default stdout)");
    ident->add_option("--seed", seed, "Random seed")->capture_default_str();

    // pairs
    auto* pairs = app.add_subcommand("pairs", "Cause-effect pairs accuracy curve");
    std::string pairs_dir, pairs_regression = "kernel", pairs_out;
    pairs->add_option("--dir", pairs_dir, "Directory with pairmeta.txt and pair files")->required();
    pairs->add_option("--regression", pairs_regression, "linear | kernel")->check(CLI::IsMember({"linear", "kernel"}));
    pairs->add_option("--out", pairs_out, "Curve CSV (default stdout)");
    pairs->add_option("--seed", seed, "Random seed")->capture_default_str();

    // bench
    auto* bench = app.add_subcommand("bench", "Simulation benchmark");
    std::string bench_config, bench_out;
    bench->add_option("--config", bench_config, "key=value config file")->required();
    bench->add_option("--out", bench_out, "Output directory (overrides config)");
    bench->add_option("--seed", seed, "Random seed (overrides config when given)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        std::cerr << app.help();
        return 2;
    }

    try {
        if (*sim) {
            sim_cfg.regime = anm::parse_regime(sim_regime);
            sim_cfg.seed = seed;
            const auto [data, spec] = anm::simulate(sim_cfg);
            anm::write_csv_file(sim_out, data);
            if (!sim_graph.empty()) anm::write_graph_file(sim_graph, spec.graph);
            if (!sim_spec.empty()) {
                auto f = open_out(sim_spec);
                anm::write_sem_spec(f, spec);
            }
        } else if (*disc) {
            const anm::Dataset data = anm::read_csv_file(disc_data);
            disc_opts.seed = seed;
            disc_opts.regression.kind = anm::parse_regression_kind(disc_regression);
            disc_opts.regression.kernel.seed = seed;
            disc_opts.mode = disc_mode == "joint" ? anm::IndependenceMode::joint : anm::IndependenceMode::pairwise;
            anm::DiscoveryResult res;
            if (disc_method == "resit") {
                res = anm::resit(data, disc_opts);
            } else if (disc_method == "gds") {
                res = anm::gds(data, disc_opts);
            } else {
                res = anm::brute_force(data, disc_opts);
            }
            anm::write_result(disc_out, disc_diag.empty() ? disc_out + ".diag" : disc_diag, res);
        } else if (*eval) {
            const anm::Pdag truth_p = anm::read_graph_file(eval_true);
            const anm::Pdag est = anm::read_graph_file(eval_est);
            if (!truth_p.is_fully_directed()) throw std::runtime_error("evaluate: true graph must be a DAG");
            const anm::Dag truth = truth_p.to_dag();
            std::vector<std::string> header, row;
            for (const auto& m : split(eval_metrics, ',')) {
                if (m == "shd") {
                    header.push_back("shd");
                    row.push_back(std::to_string(anm::shd(truth_p, est)));
                } else if (m == "shd_cpdag") {
                    header.push_back("shd_cpdag");
                    const anm::Pdag est_c = est.is_fully_directed() ? anm::cpdag(est.to_dag()) : est;
                    row.push_back(std::to_string(anm::shd(anm::cpdag(truth), est_c)));
                } else if (m == "sid") {
                    const auto r = est.is_fully_directed() ? anm::sid(truth, est.to_dag()) : anm::sid_bounds(truth, est);
                    const bool exact = est.is_fully_directed();
                    header.insert(header.end(), {"sid", "sid_lower", "sid_upper"});
                    row.push_back(exact ? std::to_string(r.bad_pairs) : "");
                    row.push_back(std::to_string(exact ? r.bad_pairs : r.lower));
                    row.push_back(std::to_string(exact ? r.bad_pairs : r.upper));
                } else {
                    throw std::runtime_error("evaluate: unknown metric '" + m + "'");
                }
            }
            emit(eval_out, [&](std::ostream& os) {
                for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
                os << '\n';
                for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
                os << '\n';
            });
        } else if (*ident) {
            std::ifstream in(ident_spec);
            if (!in) throw std::runtime_error("cannot open " + ident_spec);
            const anm::TripleSpec spec = anm::parse_triple_spec(in);
            const auto points = anm::condition1_residual(spec.triple, spec.grid);
            emit(ident_out, [&](std::ostream& os) { anm::write_residual_csv(os, points); });
        } else if (*pairs) {
            const auto records = anm::load_pairs(pairs_dir, seed);
            anm::DirectionOptions opts;
            opts.regression.kind = anm::parse_regression_kind(pairs_regression);
            opts.regression.kernel.seed = seed;
            opts.hsic.seed = seed;
            const auto curve = anm::rank_and_curve(records, opts);
            emit(pairs_out, [&](std::ostream& os) { anm::write_curve_csv(os, curve); });
        } else if (*bench) {
            anm::BenchConfig cfg = anm::read_bench_config_file(bench_config);
            if (!bench_out.empty()) cfg.out = bench_out;
            if (bench->count("--seed") > 0) cfg.seed = seed;
            const auto report = anm::run_benchmark(cfg);
            if (cfg.out.empty()) anm::write_aggregate_csv(std::cout, report);
            if (report.failure_rate() > 0.05) {
                std::cerr << "bench: " << report.failures << " of " << report.rows.size() << " runs failed\n";
                return 1;
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

#include "anm/graphs.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

const fs::path& workdir() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "anm_cli_test";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

fs::path at(const std::string& name) { return workdir() / name; }

int run(const std::string& args) {
    const std::string cmd = std::string("\"") + ANM_CLI_PATH + "\" " + args + " > \"" + at("stdout.txt").string() +
                            "\" 2> \"" + at("stderr.txt").string() + "\"";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

}  // namespace

TEST(Cli, UnknownFlagExitsTwoWithUsage) {
    EXPECT_EQ(run("simulate --out x.csv --bogus 1"), 2);
    EXPECT_NE(slurp(at("stderr.txt")).find("simulate"), std::string::npos);
    EXPECT_EQ(run("frobnicate"), 2);
}

TEST(Cli, HelpExitsZero) {
    EXPECT_EQ(run("discover --help"), 0);
    EXPECT_NE(slurp(at("stdout.txt")).find("--method"), std::string::npos);
}

TEST(Cli, RuntimeFailureExitsOne) {
    EXPECT_EQ(run("discover --data \"" + at("missing.csv").string() + "\" --out \"" + at("g.txt").string() + "\""), 1);
    EXPECT_NE(slurp(at("stderr.txt")).find("error"), std::string::npos);
}

TEST(Cli, SimulateDiscoverEvaluate) {
    const auto data = at("d.csv"), truth = at("t.txt"), spec = at("spec.txt"), est = at("e.txt");
    ASSERT_EQ(run("simulate --p 3 --n 120 --regime linear_nongauss --seed 5 --out \"" + data.string() +
                  "\" --graph-out \"" + truth.string() + "\" --spec-out \"" + spec.string() + "\""),
              0);
    EXPECT_EQ(first_line(slurp(data)), "X0,X1,X2");
    EXPECT_EQ(first_line(slurp(truth)), "p=3");
    EXPECT_FALSE(slurp(spec).empty());

    const std::string copy = slurp(data);
    ASSERT_EQ(run("simulate --p 3 --n 120 --regime linear_nongauss --seed 5 --out \"" + data.string() + "\""), 0);
    EXPECT_EQ(slurp(data), copy);

    for (const char* method : {"resit", "gds", "brute_force"}) {
        ASSERT_EQ(run(std::string("discover --method ") + method + " --regression linear --alpha 0.05 --data \"" +
                      data.string() + "\" --out \"" + est.string() + "\""),
                  0)
            << method << slurp(at("stderr.txt"));
        const anm::Pdag g = anm::read_graph_file(est.string());
        EXPECT_EQ(g.size(), 3);
        EXPECT_TRUE(g.is_fully_directed());
        EXPECT_TRUE(fs::exists(est.string() + ".diag"));
    }

    ASSERT_EQ(run("evaluate --true \"" + truth.string() + "\" --est \"" + truth.string() + "\" --metrics shd,shd_cpdag,sid"),
              0);
    EXPECT_EQ(slurp(at("stdout.txt")), "shd,shd_cpdag,sid,sid_lower,sid_upper\n0,0,0,0,0\n");

    std::ofstream(at("empty.txt")) << "p=3\n";
    ASSERT_EQ(run("evaluate --true \"" + truth.string() + "\" --est \"" + at("empty.txt").string() +
                  "\" --metrics shd --out \"" + at("eval.csv").string() + "\""),
              0);
    EXPECT_EQ(first_line(slurp(at("eval.csv"))), "shd");
    EXPECT_EQ(run("evaluate --true \"" + truth.string() + "\" --est \"" + truth.string() + "\" --metrics nope"), 1);
}

TEST(Cli, EvaluateCpdagGivesBounds) {
    std::ofstream(at("chain.txt")) << "p=3\n0 -> 1\n1 -> 2\n";
    std::ofstream(at("cp.txt")) << "p=3\n0 -- 1\n1 -- 2\n";
    ASSERT_EQ(run("evaluate --true \"" + at("chain.txt").string() + "\" --est \"" + at("cp.txt").string() +
                  "\" --metrics sid"),
              0)
        << slurp(at("stderr.txt"));
    const std::string out = slurp(at("stdout.txt"));
    EXPECT_EQ(first_line(out), "sid,sid_lower,sid_upper");
    const std::string row = out.substr(out.find('\n') + 1);
    EXPECT_EQ(row.front(), ',');
}

TEST(Cli, Identifiability) {
    std::ofstream(at("triple.txt")) << "f=polynomial 0 1\nx=gaussian 0 1\nnoise=gaussian 0 1\ngrid=4\n";
    ASSERT_EQ(run("identifiability --spec \"" + at("triple.txt").string() + "\" --out \"" + at("r.csv").string() + "\""),
              0);
    const std::string csv = slurp(at("r.csv"));
    EXPECT_EQ(first_line(csv), "x,y,residual,admissible");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 17);
    std::ofstream(at("bad.txt")) << "f=polynomial 0 1\n";
    EXPECT_EQ(run("identifiability --spec \"" + at("bad.txt").string() + "\""), 1);
}

TEST(Cli, Pairs) {
    const fs::path dir = at("pairs");
    fs::create_directories(dir);
    std::ofstream(dir / "pairmeta.txt") << "0001 1 1 2 2 1\n0002 2 2 1 1 1\n";
    for (const char* name : {"pair0001.txt", "pair0002.txt"}) {
        std::ofstream f(dir / name);
        for (int i = 0; i < 80; ++i) {
            const double x = -2.0 + 4.0 * i / 79.0;
            f << x << ' ' << x * x * x + 0.3 * std::sin(7.0 * i) << '\n';
        }
    }
    ASSERT_EQ(run("pairs --regression linear --dir \"" + dir.string() + "\" --out \"" + at("curve.csv").string() + "\""),
              0)
        << slurp(at("stderr.txt"));
    EXPECT_EQ(first_line(slurp(at("curve.csv"))), "decision_rate,accuracy,ci68_low,ci68_high,ci95_low,ci95_high");
    EXPECT_EQ(run("pairs --dir \"" + at("nowhere").string() + "\""), 1);
}

TEST(Cli, Bench) {
    std::ofstream(at("bench.cfg")) << "p = 3\nn = 50\nreplicates = 2\nmethods = resit, random_baseline\n";
    ASSERT_EQ(run("bench --config \"" + at("bench.cfg").string() + "\" --out \"" + at("bench").string() + "\""), 0)
        << slurp(at("stderr.txt"));
    EXPECT_EQ(first_line(slurp(at("bench") / "bench.csv")), "regime,p,n,method,metric,mean,sd,replicates");
    const std::string first = slurp(at("bench") / "replicates.csv");
    ASSERT_EQ(run("bench --config \"" + at("bench.cfg").string() + "\" --out \"" + at("bench").string() + "\""), 0);
    EXPECT_EQ(slurp(at("bench") / "replicates.csv"), first);
    std::ofstream(at("bad.cfg")) << "replicates = 0\n";
    EXPECT_EQ(run("bench --config \"" + at("bad.cfg").string() + "\""), 1);
}

#include "anm/discovery.hpp"
#include "anm/identifiability.hpp"
#include "anm/rng.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace anm;

namespace {

AnmTriple linear_gaussian() {
    AnmTriple t;
    t.f = polynomial({0.5, 1.3});
    t.xi = gaussian_log_density(0.2, 1.1);
    t.nu = gaussian_log_density(0.0, 0.7);
    return t;
}

AnmTriple cubic_gaussian() {
    AnmTriple t;
    t.f = polynomial({0.0, 0.0, 0.0, 1.0});
    t.xi = gaussian_log_density(0.0, 1.0);
    t.nu = gaussian_log_density(0.0, 1.0);
    return t;
}

const std::array<double, 4> kC{-1.0, 1.0, 1.0, 0.0};
const std::array<double, 4> kGamma{-1.0, -1.0, -1.0, 0.0};

std::vector<GridPoint> example7_grid(const AnmTriple& t) {
    return default_grid(t, central_interval(t.xi.value), central_interval(t.nu.value));
}

}  // namespace

TEST(Residual, LinearGaussianVanishes) {
    const auto pts = condition1_residual(linear_gaussian(), uniform_grid({-2, 2}, {-2, 2}));
    ASSERT_EQ(pts.size(), 441U);
    for (const auto& p : pts) EXPECT_TRUE(p.admissible);
    EXPECT_LT(max_abs_residual(pts), 1e-8);
}

TEST(Residual, CubicGaussianDoesNot) {
    const auto pts = condition1_residual(cubic_gaussian(), uniform_grid({-2, 2}, {-2, 2}));
    EXPECT_GT(max_abs_residual(pts), 1e-7);
    EXPECT_GT(max_abs_residual(pts), 1.0);
}

TEST(Residual, FlatDerivativeIsInadmissible) {
    // f'(0) = 0 for the cubic
    const auto pts = condition1_residual(cubic_gaussian(), {{0.0, 0.5}, {1.0, 0.5}});
    EXPECT_FALSE(pts[0].admissible);
    EXPECT_EQ(pts[0].residual, 0.0);
    EXPECT_TRUE(pts[1].admissible);
}

TEST(Residual, MatchesClosedFormForLinearF) {
    // with f linear, only xi''' and the nu''' terms survive:
    // r = xi''' + xi'' nu''' a / nu''
    const double a = 1.0;
    const AnmTriple t = log_mix_lin_exp_triple(a, 0.0, {-1.0, 1.1, 1.0, 0.0}, kGamma);
    for (const auto& p : condition1_residual(t, uniform_grid({-1, 1}, {-1, 1}, 5))) {
        const double u = p.y - a * p.x;
        const double expected = t.xi.d3(p.x) + t.xi.d2(p.x) * t.nu.d3(u) * a / t.nu.d2(u);
        EXPECT_NEAR(p.residual, expected, 1e-12 * (1.0 + std::abs(expected)));
        // and by hand: c1 c2^2 e^{c2 x} (c2 + a gamma2)
        EXPECT_NEAR(p.residual, -1.0 * 1.21 * std::exp(1.1 * p.x) * (1.1 - 1.0), 1e-12);
    }
}

TEST(Residual, Example7VanishesAndPerturbationBreaksIt) {
    const AnmTriple t = log_mix_lin_exp_triple(1.0, 0.0, kC, kGamma);
    const auto grid = example7_grid(t);
    const double base = max_abs_residual(condition1_residual(t, grid));
    EXPECT_LT(base, 1e-6);

    auto c = kC;
    c[1] *= 1.1;
    const AnmTriple bent = log_mix_lin_exp_triple(1.0, 0.0, c, kGamma);
    const double broken = max_abs_residual(condition1_residual(bent, example7_grid(bent)));
    EXPECT_GE(broken, 1e3 * std::max(base, 1e-6));
}

TEST(Residual, AnalyticAgreesWithCentralDifferences) {
    for (AnmTriple t : {linear_gaussian(), cubic_gaussian(), log_mix_lin_exp_triple(1.0, 0.0, kC, kGamma),
                        log_mix_lin_exp_triple(-0.7, 0.3, {-0.5, 0.8, 2.0, 0.0}, {-2.0, 0.6, 0.4, 0.0})}) {
        const auto grid = uniform_grid({-1.5, 1.5}, {-1.5, 1.5});
        EXPECT_LT(derivative_consistency(t, grid), 1e-4);
        const auto analytic = condition1_residual(t, grid);
        t.mode = DerivativeMode::central_difference;
        const auto numeric = condition1_residual(t, grid);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (!analytic[i].admissible || !numeric[i].admissible) continue;
            const double scale = std::max(1.0, analytic[i].magnitude);
            EXPECT_LE(std::abs(analytic[i].residual - numeric[i].residual) / scale, 1e-3) << i;
        }
    }
}

TEST(CentralInterval, GaussianQuantiles) {
    const auto [lo, hi] = central_interval(gaussian_log_density(1.0, 2.0).value);
    EXPECT_NEAR(lo, 1.0 - 1.959964 * 2.0, 1e-3);
    EXPECT_NEAR(hi, 1.0 + 1.959964 * 2.0, 1e-3);
}

TEST(Example7, Verdicts) {
    EXPECT_TRUE(verify_example7_constraint(1.0, 0.0, kC, kGamma).non_identifiable);
    auto c = kC;
    c[1] = 2.0;
    c[2] = 2.0;
    EXPECT_FALSE(verify_example7_constraint(1.0, 0.0, c, kGamma).non_identifiable);
    // c3 = a gamma3
    const auto equal = verify_example7_constraint(1.0, 0.0, {-1.0, 1.0, 1.0, 0.0}, {-1.0, 1.0, 1.0, 0.0});
    EXPECT_FALSE(equal.non_identifiable);
    EXPECT_EQ(equal.diagnostics.at("slope_differs"), 0.0);
}

TEST(Example7, ConstraintErrorsListEveryFailure) {
    try {
        verify_example7_constraint(0.0, 0.0, {1.0, 1.0, -1.0, 0.0}, {1.0, 1.0, -1.0, 0.0});
        FAIL();
    } catch (const std::invalid_argument& e) {
        const std::string msg = e.what();
        for (const char* k : {"a != 0", "c1 < 0", "c2 * c3 > 0", "gamma1 < 0", "gamma2 * gamma3 > 0"}) {
            EXPECT_NE(msg.find(k), std::string::npos) << k;
        }
    }
}

TEST(Example7, BackwardModelFromDiagnostics) {
    const double a = 1.0, b = 0.0;
    const auto check = verify_example7_constraint(a, b, kC, kGamma);
    const auto& d = check.diagnostics;
    // log p(x, y) = xi(x) + nu(y - a x - b)
    const SmoothFn xi = log_mix_lin_exp(kC[0], kC[1], kC[2], kC[3]);
    const SmoothFn nu = log_mix_lin_exp(kGamma[0], kGamma[1], kGamma[2], kGamma[3]);
    const double c2 = kC[1];
    // backward shift g(y) from matching the exponential terms (C = 0)
    auto g = [&](double y) { return -std::log(-kC[0] - kGamma[0] * std::exp(kGamma[1] * (y - b))) / c2; };
    auto backward_noise = [&](double e) {
        return d.at("delta1") * std::exp(d.at("delta2") * e) + d.at("delta3") * e + d.at("delta4");
    };
    auto effect = [&](double y) {
        return d.at("d1") * y + d.at("d2") * std::log(d.at("d3") + d.at("d4") * std::exp(d.at("d5") * y)) + d.at("d6");
    };
    for (double y : {-1.5, -0.3, 0.0, 0.8, 2.0}) {
        for (double x : {-1.0, 0.0, 0.5, 1.7}) {
            const double joint = xi.value(x) + nu.value(y - a * x - b);
            EXPECT_NEAR(joint, effect(y) + backward_noise(x - g(y)), 1e-10) << x << "," << y;
        }
    }
    EXPECT_EQ(d.at("generalized_mixture_valid"), 1.0);
}

TEST(TripleSpec, ParsesAndWritesCsv) {
    std::istringstream in(
        "# cubic with gaussian input and noise\n"
        "f=polynomial 0 0 0 1\n"
        "x=gaussian 0 1\n"
        "noise=gaussian 0 0.5\n"
        "derivatives=central 1e-4\n"
        "grid=5\n");
    const TripleSpec spec = parse_triple_spec(in);
    EXPECT_EQ(spec.grid.size(), 25U);
    EXPECT_EQ(spec.triple.mode, DerivativeMode::central_difference);
    std::ostringstream out;
    write_residual_csv(out, condition1_residual(spec.triple, spec.grid));
    const std::string csv = out.str();
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "x,y,residual,admissible");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 26);
}

TEST(TripleSpec, LogMixLinExpAndRanges) {
    std::istringstream in(
        "f=polynomial 0 1\n"
        "x=log-mix-lin-exp -1 1 1 0\n"
        "noise=log-mix-lin-exp -1 -1 -1 0\n"
        "x_range=-1 1\n"
        "y_range=-2 2\n");
    const TripleSpec spec = parse_triple_spec(in);
    EXPECT_EQ(spec.grid.size(), 441U);
    EXPECT_EQ(spec.grid.front().x, -1.0);
    EXPECT_EQ(spec.grid.back().y, 2.0);
    EXPECT_LT(max_abs_residual(condition1_residual(spec.triple, spec.grid)), 1e-6);
}

TEST(TripleSpec, Errors) {
    std::istringstream missing("f=polynomial 0 1\n");
    EXPECT_THROW(parse_triple_spec(missing), std::invalid_argument);
    std::istringstream family("f=polynomial 0 1\nx=cauchy 0 1\nnoise=gaussian 0 1\n");
    EXPECT_THROW(parse_triple_spec(family), std::invalid_argument);
    std::istringstream junk("f=polynomial 0 one\nx=gaussian 0 1\nnoise=gaussian 0 1\n");
    EXPECT_THROW(parse_triple_spec(junk), std::invalid_argument);
}

// Samples from a vanishing-residual triple admit both directions; samples
// from a large-residual triple admit one.
TEST(Bridge, LinearGaussianBothDirectionsAccepted) {
    int both = 0;
    for (std::uint64_t s = 0; s < 100; ++s) {
        Rng rng(derive_seed(31, s));
        Eigen::VectorXd x(2000), y(2000);
        for (int i = 0; i < 2000; ++i) {
            x(i) = rng.normal(0.2, 1.1);
            y(i) = 1.3 * x(i) + 0.5 + rng.normal(0.0, 0.7);
        }
        DirectionOptions o;
        o.regression.kind = RegressionKind::linear;
        const auto v = infer_direction(x, y, o);
        if (v.p_forward > 0.05 && v.p_backward > 0.05) ++both;
    }
    EXPECT_GE(both, 80);
}

TEST(Bridge, CubicGaussianSingleDirection) {
    int single = 0;
    for (std::uint64_t s = 0; s < 100; ++s) {
        Rng rng(derive_seed(32, s));
        Eigen::VectorXd x(500), y(500);
        for (int i = 0; i < 500; ++i) {
            x(i) = rng.normal();
            y(i) = x(i) * x(i) * x(i) + rng.normal();
        }
        DirectionOptions o;
        o.regression.kernel.seed = s;
        const auto v = infer_direction(x, y, o);
        if ((v.p_forward > 0.05) != (v.p_backward > 0.05)) ++single;
    }
    EXPECT_GE(single, 90);
}

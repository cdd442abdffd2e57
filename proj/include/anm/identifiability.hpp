#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace anm {

using ScalarFn = std::function<double(double)>;

/// A scalar function with its first three derivatives.
struct SmoothFn {
    ScalarFn value;
    ScalarFn d1;
    ScalarFn d2;
    ScalarFn d3;
};

SmoothFn polynomial(std::vector<double> coefficients_ascending);
/// Log-density of N(mean, sd^2), up to the normalizing constant.
SmoothFn gaussian_log_density(double mean, double sd);
/// c1 exp(c2 x) + c3 x + c4.
SmoothFn log_mix_lin_exp(double c1, double c2, double c3, double c4);

enum class DerivativeMode { analytic, central_difference };

/// Additive noise model Y = f(X) + N for the residual of the
/// third-order identifiability equation. xi = log p_X, nu = log p_N
/// (unnormalized).
struct AnmTriple {
    SmoothFn f;
    SmoothFn xi;
    SmoothFn nu;
    DerivativeMode mode = DerivativeMode::analytic;
    /// Base finite-difference step (scaled by max(1, |t|)); the 2nd and 3rd
    /// derivatives use 10x and 100x the base step.
    double step = 1e-4;
};

struct GridPoint {
    double x = 0.0;
    double y = 0.0;
};

struct ResidualPoint {
    double x = 0.0;
    double y = 0.0;
    double residual = 0.0;
    /// |nu''(y - f(x)) f'(x)| > 1e-12; inadmissible points carry residual 0.
    bool admissible = false;
    /// Sum of absolute values of the terms, for relative comparisons.
    double magnitude = 0.0;
};

inline constexpr double kAdmissibilityThreshold = 1e-12;

/// r(x, y) = xi''' - [xi'' (-nu''' f'/nu'' + f''/f') - 2 nu'' f'' f'
///                     + nu' f''' + nu' nu''' f'' f'/nu'' - nu' (f'')^2 / f'],
/// with nu-terms at y - f(x) and xi, f terms at x. r vanishes everywhere iff
/// the triple admits a backward additive noise model.
std::vector<ResidualPoint> condition1_residual(const AnmTriple& t, const std::vector<GridPoint>& grid);

/// Largest |r| over admissible points (0 if none).
double max_abs_residual(const std::vector<ResidualPoint>& points);

/// Largest relative gap between analytic derivatives and central differences
/// of the base functions over the grid.
double derivative_consistency(const AnmTriple& t, const std::vector<GridPoint>& grid);

std::vector<GridPoint> uniform_grid(std::pair<double, double> x_range, std::pair<double, double> y_range,
                                    int points_per_axis = 21);

/// Central `mass` interval of the density exp(log_density), by quadrature.
std::pair<double, double> central_interval(const ScalarFn& log_density, double mass = 0.95,
                                           double lo = -60.0, double hi = 60.0);

/// Grid over the central 95% region: x from the input law, y over
/// f(x-range) widened by the noise interval.
std::vector<GridPoint> default_grid(const AnmTriple& t, std::pair<double, double> x_interval,
                                    std::pair<double, double> noise_interval, int points_per_axis = 21);

/// Linear forward model with log-mix-lin-exp input and noise.
AnmTriple log_mix_lin_exp_triple(double a, double b, const std::array<double, 4>& c,
                                 const std::array<double, 4>& gamma);

struct Example7Check {
    bool non_identifiable = false;
    std::map<std::string, double> diagnostics;
};

/// For X2 = a X1 + b + N2 with log-mix-lin-exp X1 (c) and N2 (gamma): a
/// backward model exists iff c2 = -a gamma2 and c3 != a gamma3. Diagnostics
/// hold the backward noise parameters delta and the generalized-mixture
/// parameters d1..d6 of the effect (normalization constant C = 0, delta4 = 0).
/// Throws std::invalid_argument listing every violated family constraint.
Example7Check verify_example7_constraint(double a, double b, const std::array<double, 4>& c,
                                         const std::array<double, 4>& gamma);

/// Parsed triple description (see README for the key=value format).
struct TripleSpec {
    AnmTriple triple;
    std::vector<GridPoint> grid;
};
TripleSpec parse_triple_spec(std::istream& in);
void write_residual_csv(std::ostream& out, const std::vector<ResidualPoint>& points);

}  // namespace anm

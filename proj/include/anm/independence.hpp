#pragma once

#include <Eigen/Dense>

#include <cstdint>

namespace anm {

enum class PValueMethod { gamma, permutation };

struct HsicOptions {
    PValueMethod method = PValueMethod::gamma;
    /// Shuffles of y's rows in permutation mode.
    int permutations = 1000;
    std::uint64_t seed = 0;
};

struct HsicResult {
    /// Biased estimate (1/n^2) tr(K H L H).
    double statistic = 0.0;
    Eigen::Index n = 0;
    double p_value = 1.0;
    /// Gamma fit to the null of n * statistic; zero when degenerate.
    double gamma_shape = 0.0;
    double gamma_scale = 0.0;
    PValueMethod method = PValueMethod::gamma;
    /// A block has no spread (its centered Gram matrix vanishes).
    bool degenerate = false;
};

/// p-values below this floor are clamped before taking logarithms.
inline constexpr double kLog10PValueFloor = -350.0;

/// HSIC with Gaussian kernels whose bandwidths come from the median
/// heuristic, each block standardized column-wise first.
double hsic_statistic(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y);
/// Fixed bandwidths, applied to the standardized blocks.
double hsic_statistic(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, double sigma_x, double sigma_y);

HsicResult hsic_pvalue(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, const HsicOptions& opts = {});

/// Gamma-approximation test on precomputed squared-distance matrices of the
/// (standardized) blocks; bandwidths by the median heuristic.
HsicResult hsic_gamma_from_sqdist(const Eigen::MatrixXd& dx, const Eigen::MatrixXd& dy);

/// Upper tail of the gamma approximation at a given statistic for fixed
/// Gram-derived moments (exposed for monotonicity checks).
double gamma_tail(double n_times_statistic, double shape, double scale);

/// -log10(max(p, 1e-350)); a p-value that underflows to 0 maps to 350.
double dependence_measure(double p_value);
/// Dependence of a residual on the columns of `others` via a joint HSIC test.
double dependence_measure(const Eigen::VectorXd& residual, const Eigen::MatrixXd& others,
                          const HsicOptions& opts = {});

}  // namespace anm

#pragma once

#include "anm/dataset.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace anm {

enum class RegressionKind { linear, kernel };

/// Kernel ridge regression with an isotropic RBF kernel on standardized
/// predictors. The bandwidth starts at the median heuristic; the multiplier
/// and ridge are picked by k-fold cross-validation over a fixed grid.
struct KernelRidgeOptions {
    std::vector<double> bandwidth_multipliers{0.5, 1.0, 2.0};
    std::vector<double> ridges{1e-4, 1e-3, 1e-2, 1e-1, 1.0};
    int folds = 5;
    /// Seeds the fold assignment.
    std::uint64_t seed = 0;
};

struct RegressionMethod {
    RegressionKind kind = RegressionKind::linear;
    KernelRidgeOptions kernel{};
};

struct RegressionFit {
    RegressionKind method = RegressionKind::linear;
    std::vector<int> predictors;
    int response = -1;
    Eigen::VectorXd fitted;
    Eigen::VectorXd residuals;
    std::map<std::string, double> hyperparameters;
};

/// Ordinary least squares with intercept. A rank-deficient design is solved
/// with a 1e-10 ridge and flagged as hyperparameters["rank_deficient"] = 1.
RegressionFit fit_linear(const Dataset& data, int response, const std::vector<int>& predictors);
RegressionFit fit_kernel(const Dataset& data, int response, const std::vector<int>& predictors,
                         const KernelRidgeOptions& opts = {});
RegressionFit fit(const Dataset& data, int response, const std::vector<int>& predictors,
                  const RegressionMethod& method);

/// Matrix-level entry points (predictors as columns of x, possibly zero columns).
RegressionFit fit_linear(const Eigen::MatrixXd& x, const Eigen::VectorXd& y);
RegressionFit fit_kernel(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                         const KernelRidgeOptions& opts = {});
RegressionFit fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const RegressionMethod& method);

/// Cholesky factorization of a symmetric matrix that escalates an additive
/// diagonal jitter 1e-10, 1e-9, ..., 1e-4 on failure. The jitter applied is
/// written to `jitter` when non-null. Throws std::runtime_error if even the
/// largest jitter fails.
Eigen::LLT<Eigen::MatrixXd> cholesky_with_jitter(const Eigen::MatrixXd& a, double* jitter = nullptr);

const char* to_string(RegressionKind kind);
RegressionKind parse_regression_kind(const std::string& name);

}  // namespace anm

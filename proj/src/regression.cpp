#include "anm/regression.hpp"

#include "anm/kernels.hpp"
#include "anm/rng.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace anm {

namespace {

void check_predictors(const Dataset& data, int response, const std::vector<int>& predictors) {
    if (response < 0 || response >= data.cols()) throw std::invalid_argument("response index out of range");
    for (int k : predictors) {
        if (k < 0 || k >= data.cols()) throw std::invalid_argument("predictor index out of range");
        if (k == response) throw std::invalid_argument("predictors must exclude the response");
    }
}

RegressionFit mean_fit(const Eigen::VectorXd& y, RegressionKind kind) {
    RegressionFit out;
    out.method = kind;
    const double mean = y.mean();
    out.fitted = Eigen::VectorXd::Constant(y.size(), mean);
    out.residuals = y.array() - mean;
    return out;
}

}  // namespace

const char* to_string(RegressionKind kind) {
    return kind == RegressionKind::linear ? "linear" : "kernel";
}

RegressionKind parse_regression_kind(const std::string& name) {
    if (name == "linear") return RegressionKind::linear;
    if (name == "kernel") return RegressionKind::kernel;
    throw std::invalid_argument("unknown regression method '" + name + "'");
}

Eigen::LLT<Eigen::MatrixXd> cholesky_with_jitter(const Eigen::MatrixXd& a, double* jitter) {
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() == Eigen::Success) {
        if (jitter) *jitter = 0.0;
        return llt;
    }
    for (double eps = 1e-10; eps <= 1e-4 * 1.0001; eps *= 10.0) {
        Eigen::MatrixXd shifted = a;
        shifted.diagonal().array() += eps;
        llt.compute(shifted);
        if (llt.info() == Eigen::Success) {
            if (jitter) *jitter = eps;
            return llt;
        }
    }
    throw std::runtime_error("Cholesky factorization failed even with jitter 1e-4");
}

RegressionFit fit_linear(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
    const Eigen::Index n = y.size();
    if (x.rows() != n) throw std::invalid_argument("fit_linear: row mismatch");
    if (x.cols() == 0) return mean_fit(y, RegressionKind::linear);
    if (n <= x.cols() + 1) {
        throw std::invalid_argument("fit_linear: need n > predictors + 1");
    }
    const Eigen::RowVectorXd xmean = x.colwise().mean();
    const double ymean = y.mean();
    const Eigen::MatrixXd xc = x.rowwise() - xmean;
    const Eigen::VectorXd yc = y.array() - ymean;

    RegressionFit out;
    out.method = RegressionKind::linear;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(xc);
    Eigen::VectorXd beta;
    if (qr.rank() == xc.cols()) {
        beta = qr.solve(yc);
        out.hyperparameters["rank_deficient"] = 0.0;
    } else {
        Eigen::MatrixXd gram = xc.transpose() * xc;
        gram.diagonal().array() += 1e-10;
        beta = gram.ldlt().solve(xc.transpose() * yc);
        out.hyperparameters["rank_deficient"] = 1.0;
    }
    out.fitted = (xc * beta).array() + ymean;
    out.residuals = y - out.fitted;
    return out;
}

RegressionFit fit_kernel(const Eigen::MatrixXd& x_raw, const Eigen::VectorXd& y,
                         const KernelRidgeOptions& opts) {
    const Eigen::Index n = y.size();
    if (x_raw.rows() != n) throw std::invalid_argument("fit_kernel: row mismatch");
    if (opts.bandwidth_multipliers.empty() || opts.ridges.empty()) {
        throw std::invalid_argument("fit_kernel: empty hyperparameter grid");
    }

    // drop zero-variance predictors
    std::vector<Eigen::Index> keep;
    for (Eigen::Index j = 0; j < x_raw.cols(); ++j) {
        const double mean = x_raw.col(j).mean();
        const double spread = (x_raw.col(j).array() - mean).abs().maxCoeff();
        if (spread > 1e-12 * (std::abs(mean) + 1.0)) keep.push_back(j);
    }
    const double dropped = static_cast<double>(x_raw.cols()) - static_cast<double>(keep.size());

    const double ymean = y.mean();
    const double ysd = std::sqrt((y.array() - ymean).square().sum() / static_cast<double>(std::max<Eigen::Index>(n - 1, 1)));
    if (keep.empty() || ysd <= 1e-12 * (std::abs(ymean) + 1.0)) {
        RegressionFit out = mean_fit(y, RegressionKind::kernel);
        out.hyperparameters["dropped_columns"] = dropped;
        return out;
    }

    Eigen::MatrixXd x(n, static_cast<Eigen::Index>(keep.size()));
    for (std::size_t k = 0; k < keep.size(); ++k) x.col(static_cast<Eigen::Index>(k)) = x_raw.col(keep[k]);
    const Eigen::MatrixXd xs = standardize_columns(x);
    const Eigen::VectorXd ys = (y.array() - ymean) / ysd;
    const Eigen::MatrixXd sqdist = squared_distances(xs);
    const double sigma0 = median_bandwidth(sqdist);

    double best_mult = 1.0;
    double best_ridge = opts.ridges[opts.ridges.size() / 2];
    double best_err = std::numeric_limits<double>::infinity();
    const bool use_cv = n >= 10 && opts.folds >= 2;
    if (use_cv) {
        const int folds = static_cast<int>(std::min<Eigen::Index>(opts.folds, n));
        Rng rng(opts.seed);
        const auto perm = rng.permutation(static_cast<int>(n));
        std::vector<int> fold_of(static_cast<std::size_t>(n));
        for (Eigen::Index i = 0; i < n; ++i) fold_of[perm[i]] = static_cast<int>(i % folds);

        for (double mult : opts.bandwidth_multipliers) {
            const Eigen::MatrixXd gram = rbf_gram(sqdist, mult * sigma0);
            std::vector<double> sse(opts.ridges.size(), 0.0);
            for (int f = 0; f < folds; ++f) {
                std::vector<Eigen::Index> train;
                std::vector<Eigen::Index> valid;
                for (Eigen::Index i = 0; i < n; ++i) (fold_of[i] == f ? valid : train).push_back(i);
                const auto nt = static_cast<Eigen::Index>(train.size());
                const auto nv = static_cast<Eigen::Index>(valid.size());
                Eigen::MatrixXd ktt(nt, nt);
                Eigen::MatrixXd kvt(nv, nt);
                Eigen::VectorXd yt(nt);
                Eigen::VectorXd yv(nv);
                for (Eigen::Index a = 0; a < nt; ++a) {
                    yt(a) = ys(train[a]);
                    for (Eigen::Index b = 0; b < nt; ++b) ktt(a, b) = gram(train[a], train[b]);
                }
                for (Eigen::Index a = 0; a < nv; ++a) {
                    yv(a) = ys(valid[a]);
                    for (Eigen::Index b = 0; b < nt; ++b) kvt(a, b) = gram(valid[a], train[b]);
                }
                for (std::size_t r = 0; r < opts.ridges.size(); ++r) {
                    Eigen::MatrixXd reg = ktt;
                    reg.diagonal().array() += opts.ridges[r];
                    const auto llt = cholesky_with_jitter(reg);
                    const Eigen::VectorXd alpha = llt.solve(yt);
                    sse[r] += (yv - kvt * alpha).squaredNorm();
                }
            }
            for (std::size_t r = 0; r < opts.ridges.size(); ++r) {
                const double err = sse[r] / static_cast<double>(n);
                if (err < best_err) {
                    best_err = err;
                    best_mult = mult;
                    best_ridge = opts.ridges[r];
                }
            }
        }
    }

    Eigen::MatrixXd reg = rbf_gram(sqdist, best_mult * sigma0);
    const Eigen::MatrixXd gram = reg;
    reg.diagonal().array() += best_ridge;
    double jitter = 0.0;
    const auto llt = cholesky_with_jitter(reg, &jitter);
    const Eigen::VectorXd alpha = llt.solve(ys);

    RegressionFit out;
    out.method = RegressionKind::kernel;
    out.fitted = (gram * alpha).array() * ysd + ymean;
    out.residuals = y - out.fitted;
    out.hyperparameters["bandwidth"] = best_mult * sigma0;
    out.hyperparameters["bandwidth_multiplier"] = best_mult;
    out.hyperparameters["ridge"] = best_ridge;
    out.hyperparameters["cv"] = use_cv ? 1.0 : 0.0;
    if (use_cv) out.hyperparameters["cv_mse"] = best_err;
    out.hyperparameters["dropped_columns"] = dropped;
    out.hyperparameters["jitter"] = jitter;
    return out;
}

RegressionFit fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const RegressionMethod& method) {
    return method.kind == RegressionKind::linear ? fit_linear(x, y) : fit_kernel(x, y, method.kernel);
}

RegressionFit fit_linear(const Dataset& data, int response, const std::vector<int>& predictors) {
    check_predictors(data, response, predictors);
    RegressionFit out = fit_linear(data.columns(predictors), data.column(response));
    out.response = response;
    out.predictors = predictors;
    return out;
}

RegressionFit fit_kernel(const Dataset& data, int response, const std::vector<int>& predictors,
                         const KernelRidgeOptions& opts) {
    check_predictors(data, response, predictors);
    RegressionFit out = fit_kernel(data.columns(predictors), data.column(response), opts);
    out.response = response;
    out.predictors = predictors;
    return out;
}

RegressionFit fit(const Dataset& data, int response, const std::vector<int>& predictors,
                  const RegressionMethod& method) {
    return method.kind == RegressionKind::linear ? fit_linear(data, response, predictors)
                                                 : fit_kernel(data, response, predictors, method.kernel);
}

}  // namespace anm

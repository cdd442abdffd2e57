#include "anm/independence.hpp"

#include "anm/kernels.hpp"
#include "anm/rng.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace anm {

namespace {

void check_blocks(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
    if (x.rows() != y.rows()) throw std::invalid_argument("hsic: row counts differ");
    if (x.rows() < 4) throw std::invalid_argument("hsic: need at least 4 samples");
    if (x.cols() < 1 || y.cols() < 1) throw std::invalid_argument("hsic: empty block");
}

Eigen::MatrixXd center(const Eigen::MatrixXd& k) {
    const Eigen::VectorXd row_mean = k.rowwise().mean();
    const Eigen::RowVectorXd col_mean = k.colwise().mean();
    const double grand = k.mean();
    Eigen::MatrixXd out = k;
    out.colwise() -= row_mean;
    out.rowwise() -= col_mean;
    out.array() += grand;
    return out;
}

bool vanishes(const Eigen::MatrixXd& kc) { return kc.cwiseAbs().maxCoeff() < 1e-12; }

double biased_statistic(const Eigen::MatrixXd& kc, const Eigen::MatrixXd& lc) {
    const double n = static_cast<double>(kc.rows());
    const double s = kc.cwiseProduct(lc).sum() / (n * n);
    return s < 0.0 ? 0.0 : s;
}

// Gram matrices K, L and their centered versions; fills the gamma fit.
HsicResult gamma_test(const Eigen::MatrixXd& k, const Eigen::MatrixXd& l) {
    const Eigen::Index n = k.rows();
    const double nd = static_cast<double>(n);
    HsicResult out;
    out.n = n;
    const Eigen::MatrixXd kc = center(k);
    const Eigen::MatrixXd lc = center(l);
    if (vanishes(kc) || vanishes(lc)) {
        out.degenerate = true;
        return out;
    }
    out.statistic = biased_statistic(kc, lc);
    const double test_stat = nd * out.statistic;

    // null variance from the elementwise product of centered Grams
    const Eigen::ArrayXXd prod = (kc.array() * lc.array() / 6.0).square();
    const double off_diag = prod.sum() - prod.matrix().diagonal().sum();
    double var = off_diag / (nd * (nd - 1.0));
    var *= 72.0 * (nd - 4.0) * (nd - 5.0) / (nd * (nd - 1.0) * (nd - 2.0) * (nd - 3.0));

    const double mu_x = (k.sum() - k.diagonal().sum()) / (nd * (nd - 1.0));
    const double mu_y = (l.sum() - l.diagonal().sum()) / (nd * (nd - 1.0));
    const double mean = (1.0 + mu_x * mu_y - mu_x - mu_y) / nd;
    if (!(var > 0.0) || !(mean > 0.0)) {
        out.degenerate = true;
        return out;
    }
    out.gamma_shape = mean * mean / var;
    out.gamma_scale = var * nd / mean;
    out.p_value = gamma_tail(test_stat, out.gamma_shape, out.gamma_scale);
    return out;
}

Eigen::MatrixXd block_sqdist(const Eigen::MatrixXd& x) { return squared_distances(standardize_columns(x)); }

}  // namespace

double gamma_tail(double n_times_statistic, double shape, double scale) {
    if (n_times_statistic <= 0.0) return 1.0;
    return boost::math::gamma_q(shape, n_times_statistic / scale);
}

double hsic_statistic(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, double sigma_x, double sigma_y) {
    check_blocks(x, y);
    const Eigen::MatrixXd kc = center(rbf_gram(block_sqdist(x), sigma_x));
    const Eigen::MatrixXd lc = center(rbf_gram(block_sqdist(y), sigma_y));
    return biased_statistic(kc, lc);
}

double hsic_statistic(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
    check_blocks(x, y);
    const Eigen::MatrixXd dx = block_sqdist(x);
    const Eigen::MatrixXd dy = block_sqdist(y);
    const Eigen::MatrixXd kc = center(rbf_gram(dx, median_bandwidth(dx)));
    const Eigen::MatrixXd lc = center(rbf_gram(dy, median_bandwidth(dy)));
    return biased_statistic(kc, lc);
}

HsicResult hsic_gamma_from_sqdist(const Eigen::MatrixXd& dx, const Eigen::MatrixXd& dy) {
    if (dx.rows() != dy.rows() || dx.rows() < 4) throw std::invalid_argument("hsic: bad distance matrices");
    return gamma_test(rbf_gram(dx, median_bandwidth(dx)), rbf_gram(dy, median_bandwidth(dy)));
}

HsicResult hsic_pvalue(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, const HsicOptions& opts) {
    check_blocks(x, y);
    const Eigen::MatrixXd dx = block_sqdist(x);
    const Eigen::MatrixXd dy = block_sqdist(y);
    const Eigen::MatrixXd k = rbf_gram(dx, median_bandwidth(dx));
    const Eigen::MatrixXd l = rbf_gram(dy, median_bandwidth(dy));
    HsicResult out = gamma_test(k, l);
    if (opts.method == PValueMethod::gamma || out.degenerate) {
        out.method = opts.method;
        return out;
    }
    if (opts.permutations < 1) throw std::invalid_argument("hsic: permutations must be >= 1");

    out.method = PValueMethod::permutation;
    const Eigen::MatrixXd kc = center(k);
    const Eigen::MatrixXd lc = center(l);
    const Eigen::Index n = x.rows();
    const double observed = kc.cwiseProduct(lc).sum();
    const double tol = 1e-12 * std::abs(observed);
    Rng rng(opts.seed);
    std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) perm[i] = i;
    int exceed = 0;
    for (int b = 0; b < opts.permutations; ++b) {
        rng.shuffle(std::span<Eigen::Index>(perm));
        double s = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            const Eigen::Index pj = perm[j];
            for (Eigen::Index i = 0; i < n; ++i) s += kc(i, j) * lc(perm[i], pj);
        }
        if (s >= observed - tol) ++exceed;
    }
    out.p_value = (1.0 + exceed) / (1.0 + opts.permutations);
    return out;
}

double dependence_measure(double p_value) {
    if (!(p_value > 0.0)) return -kLog10PValueFloor;
    return std::min(-std::log10(std::min(p_value, 1.0)), -kLog10PValueFloor) + 0.0;
}

double dependence_measure(const Eigen::VectorXd& residual, const Eigen::MatrixXd& others,
                          const HsicOptions& opts) {
    if (others.cols() < 1) throw std::invalid_argument("dependence_measure: need at least one other column");
    return dependence_measure(hsic_pvalue(residual, others, opts).p_value);
}

}  // namespace anm

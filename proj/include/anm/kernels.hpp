#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace anm {

/// Rows used by the median heuristic are capped to keep it O(n^2)-bounded.
inline constexpr Eigen::Index kMedianHeuristicRows = 500;

/// Column-wise standardization (zero mean, unit sample sd). Constant
/// columns become zero.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> standardize_columns(
    const Eigen::MatrixBase<Derived>& x) {
    using Scalar = typename Derived::Scalar;
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out = x;
    const auto n = x.rows();
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        const Scalar mean = out.col(j).mean();
        out.col(j).array() -= mean;
        const Scalar ss = out.col(j).squaredNorm();
        const Scalar sd = n > 1 ? std::sqrt(ss / Scalar(n - 1)) : Scalar(0);
        if (sd > Scalar(1e-12) * (std::abs(mean) + Scalar(1))) {
            out.col(j) /= sd;
        } else {
            out.col(j).setZero();
        }
    }
    return out;
}

/// Pairwise squared Euclidean distances between rows.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> squared_distances(
    const Eigen::MatrixBase<Derived>& x) {
    using Scalar = typename Derived::Scalar;
    const auto n = x.rows();
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> d(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        d(j, j) = Scalar(0);
        for (Eigen::Index i = j + 1; i < n; ++i) {
            const Scalar v = (x.row(i) - x.row(j)).squaredNorm();
            d(i, j) = v;
            d(j, i) = v;
        }
    }
    return d;
}

/// Row subset used by the median heuristic: all rows when n is small,
/// otherwise an evenly spread deterministic subset.
inline std::vector<Eigen::Index> median_rows(Eigen::Index n) {
    std::vector<Eigen::Index> rows;
    const Eigen::Index m = std::min(n, kMedianHeuristicRows);
    rows.reserve(static_cast<std::size_t>(m));
    for (Eigen::Index k = 0; k < m; ++k) rows.push_back(k * n / m);
    return rows;
}

/// Median heuristic on a precomputed squared-distance matrix: the median of
/// the strictly positive pairwise distances among the subsampled rows.
/// Returns 1 when every distance is zero.
template <typename Derived>
typename Derived::Scalar median_bandwidth(const Eigen::MatrixBase<Derived>& sqdist) {
    using Scalar = typename Derived::Scalar;
    const auto rows = median_rows(sqdist.rows());
    std::vector<Scalar> vals;
    vals.reserve(rows.size() * (rows.size() - 1) / 2);
    for (std::size_t a = 0; a < rows.size(); ++a) {
        for (std::size_t b = a + 1; b < rows.size(); ++b) {
            const Scalar v = sqdist(rows[a], rows[b]);
            if (v > Scalar(0)) vals.push_back(v);
        }
    }
    if (vals.empty()) return Scalar(1);
    const std::size_t mid = vals.size() / 2;
    std::nth_element(vals.begin(), vals.begin() + static_cast<std::ptrdiff_t>(mid), vals.end());
    Scalar med = vals[mid];
    if (vals.size() % 2 == 0) {
        const Scalar lower = *std::max_element(vals.begin(), vals.begin() + static_cast<std::ptrdiff_t>(mid));
        med = (med + lower) / Scalar(2);
    }
    return std::sqrt(med);
}

/// Gaussian RBF Gram matrix exp(-d^2 / (2 sigma^2)) from squared distances.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> rbf_gram(
    const Eigen::MatrixBase<Derived>& sqdist, typename Derived::Scalar sigma) {
    using Scalar = typename Derived::Scalar;
    const Scalar scale = Scalar(-1) / (Scalar(2) * sigma * sigma);
    return (sqdist.array() * scale).exp().matrix();
}

}  // namespace anm

#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <string>
#include <vector>

namespace anm {

/// n x p observational sample with column names.
struct Dataset {
    Eigen::MatrixXd values;
    std::vector<std::string> names;

    Dataset() = default;
    /// Validates shape, finiteness and name uniqueness; generates names
    /// "X0".."X{p-1}" when none are given.
    explicit Dataset(Eigen::MatrixXd values, std::vector<std::string> names = {});

    Eigen::Index rows() const { return values.rows(); }
    int cols() const { return static_cast<int>(values.cols()); }
    Eigen::VectorXd column(int j) const { return values.col(j); }
    /// Columns listed in `nodes`, in that order.
    Eigen::MatrixXd columns(const std::vector<int>& nodes) const;
};

/// Header row of names, one sample per row, '.' decimal point. Parse
/// failures throw std::runtime_error naming row and column.
Dataset read_csv(std::istream& in);
Dataset read_csv_file(const std::string& path);
void write_csv(std::ostream& out, const Dataset& data);
void write_csv_file(const std::string& path, const Dataset& data);

}  // namespace anm

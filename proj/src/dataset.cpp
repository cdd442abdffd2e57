#include "anm/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <set>
#include <stdexcept>

namespace anm {

Dataset::Dataset(Eigen::MatrixXd v, std::vector<std::string> n)
    : values(std::move(v)), names(std::move(n)) {
    if (values.rows() < 2) throw std::invalid_argument("dataset needs at least 2 rows");
    if (values.cols() < 1) throw std::invalid_argument("dataset needs at least 1 column");
    if (!values.allFinite()) throw std::invalid_argument("dataset contains non-finite entries");
    if (names.empty()) {
        for (Eigen::Index j = 0; j < values.cols(); ++j) names.push_back("X" + std::to_string(j));
    }
    if (static_cast<Eigen::Index>(names.size()) != values.cols()) {
        throw std::invalid_argument("dataset: name count does not match column count");
    }
    std::set<std::string> seen(names.begin(), names.end());
    if (seen.size() != names.size()) throw std::invalid_argument("dataset: column names not unique");
}

Eigen::MatrixXd Dataset::columns(const std::vector<int>& nodes) const {
    Eigen::MatrixXd out(values.rows(), static_cast<Eigen::Index>(nodes.size()));
    for (std::size_t k = 0; k < nodes.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = values.col(nodes[k]);
    return out;
}

namespace {

std::vector<std::string> split_commas(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(',', start);
        out.push_back(line.substr(start, pos - start));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return out;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

}  // namespace

Dataset read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("csv: empty input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> names;
    for (const auto& f : split_commas(line)) names.push_back(trim(f));
    const std::size_t p = names.size();

    std::vector<double> flat;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        ++row;
        const auto fields = split_commas(line);
        if (fields.size() != p) {
            throw std::runtime_error("csv row " + std::to_string(row) + ": expected " +
                                     std::to_string(p) + " fields, got " +
                                     std::to_string(fields.size()));
        }
        for (std::size_t c = 0; c < p; ++c) {
            const std::string f = trim(fields[c]);
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
            if (f.empty() || ec != std::errc() || ptr != f.data() + f.size() || !std::isfinite(v)) {
                throw std::runtime_error("csv row " + std::to_string(row) + ", column " +
                                         std::to_string(c + 1) + " (" + names[c] +
                                         "): cannot parse '" + f + "'");
            }
            flat.push_back(v);
        }
    }
    Eigen::MatrixXd values(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(p));
    for (std::size_t r = 0; r < row; ++r) {
        for (std::size_t c = 0; c < p; ++c) {
            values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = flat[r * p + c];
        }
    }
    return Dataset(std::move(values), std::move(names));
}

Dataset read_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open data file " + path);
    return read_csv(in);
}

void write_csv(std::ostream& out, const Dataset& data) {
    for (std::size_t j = 0; j < data.names.size(); ++j) out << (j ? "," : "") << data.names[j];
    out << '\n';
    out << std::setprecision(17);
    for (Eigen::Index i = 0; i < data.values.rows(); ++i) {
        for (Eigen::Index j = 0; j < data.values.cols(); ++j) {
            out << (j ? "," : "") << data.values(i, j);
        }
        out << '\n';
    }
}

void write_csv_file(const std::string& path, const Dataset& data) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write data file " + path);
    write_csv(out, data);
}

}  // namespace anm

#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "ppmix/mixture.hpp"

namespace ppmix {

/// A numeric data matrix with optional 1-based integer labels.
struct LabeledDataset {
    MatrixXd points;
    VectorXi labels;  // size 0 when absent
    std::vector<std::string> column_names;

    bool has_labels() const { return labels.size() == points.rows(); }
};

/// Two well-separated groups in a high-dimensional space: n rows, p
/// attributes, a `weight` fraction in group 1. Group 1 is standard normal
/// everywhere; group 2 moves the first `n_shifted` attributes to mean `shift`
/// with standard deviation `spread`. Group sizes are the rounded expected
/// counts, so the draw order is deterministic: all group-1 rows first.
LabeledDataset gen_two_group(int n, int dim, double weight, int n_shifted,
                             double shift, double spread, std::uint64_t seed);
/// The replication design: 100 x 50, 85/15 split, 15 shifted attributes,
/// shift 1.5, spread 0.2.
LabeledDataset gen_two_group(std::uint64_t seed);

/// Eight unit-variance Gaussian blocks on the corners of a rectangular box in
/// the first three coordinates, with `n_noise` standard normal noise
/// coordinates appended. Corner side lengths keep a 3:2:1 proportion and are
/// wide enough that the population density has exactly eight modes. Rows
/// cycle through the corners; labels are the 1-based corner index.
LabeledDataset gen_block_clusters(int n, int n_noise, std::uint64_t seed);
/// The replication design: 400 rows (50 per corner), 5 noise coordinates.
LabeledDataset gen_block_clusters(std::uint64_t seed);

/// Column standardization to zero mean, unit variance. Constant columns keep
/// scale 1 so transform stays finite.
struct Standardization {
    VectorXd mean;
    VectorXd scale;

    MatrixXd transform(const MatrixXd& points) const;
    MatrixXd inverse(const MatrixXd& points) const;
};
Standardization fit_standardization(const MatrixXd& points);

/// CSV ingestion. Expects a rectangular table, one row per line, comma
/// separated, decimal point '.'. A first line with any non-numeric field is
/// taken as a header; headerless files get default names X1..Xp.
///
/// Labels: when `label_column` is given, that named column (exact match,
/// header required) becomes the labels; when omitted, a column named "class"
/// (case-insensitive) is used if present. Integer label values are kept
/// as-is; otherwise distinct values are mapped to 1, 2, ... by first
/// appearance. Throws ParseError with line numbers on malformed input.
LabeledDataset load_csv(const std::string& path,
                        const std::optional<std::string>& label_column = std::nullopt);

/// Writers used by the CLI. Doubles round-trip exactly (shortest
/// representation). Writes are atomic: temp file in the target directory,
/// then rename.
void write_csv(const std::string& path, const MatrixXd& points,
               const std::vector<std::string>& column_names,
               const VectorXi* labels = nullptr,
               const std::string& label_name = "class");
void write_text_file(const std::string& path, const std::string& content);

}  // namespace ppmix

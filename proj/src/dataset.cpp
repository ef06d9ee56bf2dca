#include "ppmix/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "ppmix/rng.hpp"

namespace ppmix {
namespace {

std::vector<std::string> default_names(int p) {
    std::vector<std::string> names;
    names.reserve(p);
    for (int k = 1; k <= p; ++k) names.push_back("X" + std::to_string(k));
    return names;
}

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

bool parse_double(const std::string& token, double& out) {
    const char* begin = token.data();
    const char* end = begin + token.size();
    if (begin != end && *begin == '+') ++begin;
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc{} && ptr == end && begin != end;
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(trim(line.substr(start)));
            break;
        }
        fields.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
    return fields;
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return s;
}

void append_double(std::string& out, double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, ptr);
}

}  // namespace

LabeledDataset gen_two_group(int n, int dim, double weight, int n_shifted,
                             double shift, double spread, std::uint64_t seed) {
    if (n < 2 || dim < 1) throw ContractViolation("need n >= 2 and dim >= 1");
    if (!(weight > 0.0 && weight < 1.0)) {
        throw ContractViolation("group weight must lie strictly inside (0, 1)");
    }
    if (n_shifted < 1 || n_shifted > dim) {
        throw ContractViolation("shifted attribute count must lie in [1, dim]");
    }
    if (!(spread > 0.0)) throw ContractViolation("spread must be positive");

    const int n1 = std::clamp(static_cast<int>(std::lround(weight * n)), 1, n - 1);
    auto rng = make_rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    LabeledDataset out;
    out.points.resize(n, dim);
    out.labels.resize(n);
    out.column_names = default_names(dim);
    for (int i = 0; i < n; ++i) {
        const bool second = i >= n1;
        for (int k = 0; k < dim; ++k) {
            const double z = normal(rng);
            if (second && k < n_shifted) {
                out.points(i, k) = shift + spread * z;
            } else {
                out.points(i, k) = z;
            }
        }
        out.labels[i] = second ? 2 : 1;
    }
    return out;
}

LabeledDataset gen_two_group(std::uint64_t seed) {
    return gen_two_group(100, 50, 0.85, 15, 1.5, 0.2, seed);
}

LabeledDataset gen_block_clusters(int n, int n_noise, std::uint64_t seed) {
    if (n < 8) throw ContractViolation("need at least one row per corner");
    if (n_noise < 0) throw ContractViolation("noise dimension must be nonnegative");

    // Corner separations keep the 3:2:1 side proportion; the shortest gap is
    // six unit standard deviations, wide enough that all eight corners stay
    // distinct modes of the population density.
    const double side[3] = {18.0, 12.0, 6.0};
    MatrixXd corners(8, 3);
    int c = 0;
    for (int bx = 0; bx < 2; ++bx) {
        for (int by = 0; by < 2; ++by) {
            for (int bz = 0; bz < 2; ++bz) {
                corners(c, 0) = bx * side[0];
                corners(c, 1) = by * side[1];
                corners(c, 2) = bz * side[2];
                ++c;
            }
        }
    }

    const int dim = 3 + n_noise;
    auto rng = make_rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    LabeledDataset out;
    out.points.resize(n, dim);
    out.labels.resize(n);
    out.column_names = default_names(dim);
    for (int i = 0; i < n; ++i) {
        const int corner = i % 8;
        for (int k = 0; k < 3; ++k) out.points(i, k) = corners(corner, k) + normal(rng);
        for (int k = 3; k < dim; ++k) out.points(i, k) = normal(rng);
        out.labels[i] = corner + 1;
    }
    return out;
}

LabeledDataset gen_block_clusters(std::uint64_t seed) {
    return gen_block_clusters(400, 5, seed);
}

MatrixXd Standardization::transform(const MatrixXd& points) const {
    if (points.cols() != mean.size()) {
        throw ContractViolation("standardization dimension mismatch");
    }
    return (points.rowwise() - mean.transpose()).array().rowwise() /
           scale.transpose().array();
}

MatrixXd Standardization::inverse(const MatrixXd& points) const {
    if (points.cols() != mean.size()) {
        throw ContractViolation("standardization dimension mismatch");
    }
    return (points.array().rowwise() * scale.transpose().array()).matrix().rowwise() +
           mean.transpose();
}

Standardization fit_standardization(const MatrixXd& points) {
    const int n = static_cast<int>(points.rows());
    if (n < 1) throw ContractViolation("cannot standardize an empty matrix");
    Standardization out;
    out.mean = points.colwise().mean();
    if (n == 1) {
        out.scale = VectorXd::Ones(points.cols());
        return out;
    }
    VectorXd var = (points.rowwise() - out.mean.transpose()).colwise().squaredNorm() /
                   static_cast<double>(n - 1);
    out.scale = var.array().sqrt();
    for (int k = 0; k < out.scale.size(); ++k) {
        if (!(out.scale[k] > 0.0)) out.scale[k] = 1.0;
    }
    return out;
}

LabeledDataset load_csv(const std::string& path,
                        const std::optional<std::string>& label_column) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();

    struct Line {
        std::string text;
        int number;
    };
    std::vector<Line> lines;
    std::size_t start = 0;
    int number = 1;
    while (start <= text.size()) {
        std::size_t nl = text.find('\n', start);
        if (nl == std::string::npos) nl = text.size();
        std::string line = text.substr(start, nl - start);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!trim(line).empty()) lines.push_back({std::move(line), number});
        ++number;
        start = nl + 1;
    }
    if (lines.empty()) throw ParseError(path + ": no data rows");

    std::vector<std::string> first = split_fields(lines.front().text);
    const int n_fields = static_cast<int>(first.size());
    bool has_header = false;
    for (const std::string& token : first) {
        double value;
        if (!parse_double(token, value)) {
            has_header = true;
            break;
        }
    }

    LabeledDataset out;
    int label_col = -1;
    if (has_header) {
        for (int k = 0; k < n_fields; ++k) {
            if (first[k].empty()) {
                throw ParseError(path + ": line " + std::to_string(lines.front().number) +
                                 ": empty column name");
            }
            const bool is_label = label_column.has_value()
                                      ? first[k] == *label_column
                                      : lower(first[k]) == "class";
            if (is_label) {
                if (label_col >= 0) {
                    throw ParseError(path + ": duplicate label column '" + first[k] + "'");
                }
                label_col = k;
            } else {
                out.column_names.push_back(first[k]);
            }
        }
        if (label_column.has_value() && label_col < 0) {
            throw ParseError(path + ": no column named '" + *label_column + "'");
        }
    } else {
        if (label_column.has_value()) {
            throw ParseError(path + ": label column requested but file has no header");
        }
        out.column_names = default_names(n_fields);
    }

    const std::size_t first_data = has_header ? 1 : 0;
    const std::size_t n_rows = lines.size() - first_data;
    if (n_rows == 0) throw ParseError(path + ": no data rows");
    const int p = label_col >= 0 ? n_fields - 1 : n_fields;
    if (p < 1) throw ParseError(path + ": no numeric columns");

    out.points.resize(static_cast<int>(n_rows), p);
    std::vector<std::string> raw_labels;
    if (label_col >= 0) raw_labels.reserve(n_rows);
    for (std::size_t r = 0; r < n_rows; ++r) {
        const Line& line = lines[first_data + r];
        std::vector<std::string> fields = split_fields(line.text);
        if (static_cast<int>(fields.size()) != n_fields) {
            throw ParseError(path + ": line " + std::to_string(line.number) +
                             ": expected " + std::to_string(n_fields) +
                             " fields, got " + std::to_string(fields.size()));
        }
        int col = 0;
        for (int k = 0; k < n_fields; ++k) {
            if (k == label_col) {
                if (fields[k].empty()) {
                    throw ParseError(path + ": line " + std::to_string(line.number) +
                                     ": empty label");
                }
                raw_labels.push_back(fields[k]);
                continue;
            }
            double value;
            if (!parse_double(fields[k], value)) {
                throw ParseError(path + ": line " + std::to_string(line.number) +
                                 ": field " + std::to_string(k + 1) +
                                 " is not numeric: '" + fields[k] + "'");
            }
            out.points(static_cast<int>(r), col++) = value;
        }
    }

    if (label_col >= 0) {
        // Integer label values pass through; anything else is categorical,
        // coded 1, 2, ... by first appearance.
        out.labels.resize(static_cast<int>(n_rows));
        bool all_integer = true;
        for (const std::string& token : raw_labels) {
            double value;
            if (!parse_double(token, value) || value != std::floor(value) ||
                std::abs(value) > 1e9) {
                all_integer = false;
                break;
            }
        }
        if (all_integer) {
            for (std::size_t r = 0; r < n_rows; ++r) {
                double value;
                parse_double(raw_labels[r], value);
                out.labels[static_cast<int>(r)] = static_cast<int>(value);
            }
        } else {
            std::vector<std::string> seen;
            for (std::size_t r = 0; r < n_rows; ++r) {
                int code = -1;
                for (std::size_t s = 0; s < seen.size(); ++s) {
                    if (seen[s] == raw_labels[r]) {
                        code = static_cast<int>(s) + 1;
                        break;
                    }
                }
                if (code < 0) {
                    seen.push_back(raw_labels[r]);
                    code = static_cast<int>(seen.size());
                }
                out.labels[static_cast<int>(r)] = code;
            }
        }
    }
    return out;
}

void write_text_file(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write file: " + tmp);
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw std::runtime_error("short write: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw std::runtime_error("cannot replace file: " + path);
    }
}

void write_csv(const std::string& path, const MatrixXd& points,
               const std::vector<std::string>& column_names, const VectorXi* labels,
               const std::string& label_name) {
    if (static_cast<int>(column_names.size()) != points.cols()) {
        throw ContractViolation("column name count does not match matrix width");
    }
    if (labels != nullptr && labels->size() != points.rows()) {
        throw ContractViolation("label count does not match row count");
    }
    std::string out;
    for (std::size_t k = 0; k < column_names.size(); ++k) {
        if (k > 0) out += ',';
        out += column_names[k];
    }
    if (labels != nullptr) out += column_names.empty() ? label_name : "," + label_name;
    out += '\n';
    for (int i = 0; i < points.rows(); ++i) {
        for (int k = 0; k < points.cols(); ++k) {
            if (k > 0) out += ',';
            append_double(out, points(i, k));
        }
        if (labels != nullptr) {
            if (points.cols() > 0) out += ',';
            out += std::to_string((*labels)[i]);
        }
        out += '\n';
    }
    write_text_file(path, out);
}

}  // namespace ppmix

#include "ppmix/metrics.hpp"

#include <map>
#include <vector>

namespace ppmix {

double adjusted_rand_index(const VectorXi& a, const VectorXi& b) {
    const int n = static_cast<int>(a.size());
    if (n < 2) throw ContractViolation("adjusted Rand index needs at least two items");
    if (b.size() != n) throw ContractViolation("labelings differ in length");

    std::map<int, int> index_a;
    std::map<int, int> index_b;
    for (int i = 0; i < n; ++i) {
        index_a.emplace(a[i], static_cast<int>(index_a.size()));
        index_b.emplace(b[i], static_cast<int>(index_b.size()));
    }
    const int ka = static_cast<int>(index_a.size());
    const int kb = static_cast<int>(index_b.size());
    std::vector<double> table(static_cast<std::size_t>(ka) * kb, 0.0);
    std::vector<double> row(ka, 0.0);
    std::vector<double> col(kb, 0.0);
    for (int i = 0; i < n; ++i) {
        const int ra = index_a[a[i]];
        const int cb = index_b[b[i]];
        table[static_cast<std::size_t>(ra) * kb + cb] += 1.0;
        row[ra] += 1.0;
        col[cb] += 1.0;
    }

    auto pairs = [](double m) { return m * (m - 1.0) / 2.0; };
    double sum_cells = 0.0;
    for (double cell : table) sum_cells += pairs(cell);
    double sum_rows = 0.0;
    for (double r : row) sum_rows += pairs(r);
    double sum_cols = 0.0;
    for (double c : col) sum_cols += pairs(c);
    const double total = pairs(static_cast<double>(n));

    const double expected = sum_rows * sum_cols / total;
    const double maximum = 0.5 * (sum_rows + sum_cols);
    const double denominator = maximum - expected;
    if (denominator == 0.0) {
        // 0/0 arises only for trivial partitions. Identical partitions agree
        // perfectly; anything else has no defined index.
        bool identical = true;
        for (int i = 0; i < n && identical; ++i) {
            identical = index_a[a[i]] == index_b[b[i]];
        }
        if (identical) return 1.0;
        throw AlgorithmFault("adjusted Rand index undefined: zero denominator for differing partitions");
    }
    return (sum_cells - expected) / denominator;
}

}  // namespace ppmix

#include "snb/dependence.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "snb/error.hpp"
#include "snb/parallel.hpp"

namespace snb {

double mutual_information(const ContingencyTable& table) {
    const std::size_t R = table.rows;
    const std::size_t C = table.cols;
    if (table.counts.size() != R * C) throw ValidationError("contingency table has the wrong size");
    std::vector<double> row_sum(R, 0.0);
    std::vector<double> col_sum(C, 0.0);
    double n = 0.0;
    for (std::size_t i = 0; i < R; ++i) {
        for (std::size_t j = 0; j < C; ++j) {
            const double c = table.counts[i * C + j];
            if (c < 0.0) throw ValidationError("negative count in contingency table");
            row_sum[i] += c;
            col_sum[j] += c;
        }
    }
    for (double r : row_sum) n += r;
    if (n <= 0.0) return 0.0;

    std::vector<double> terms;
    terms.reserve(R * C);
    for (std::size_t i = 0; i < R; ++i) {
        for (std::size_t j = 0; j < C; ++j) {
            const double c = table.counts[i * C + j];
            if (c == 0.0) continue;
            terms.push_back(c / n * std::log((c * n) / (row_sum[i] * col_sum[j])));
        }
    }
    std::sort(terms.begin(), terms.end());
    double mi = 0.0;
    for (double t : terms) mi += t;
    return std::max(mi, 0.0);
}

namespace {

std::size_t bin_span(std::span<const int> x) {
    int hi = -1;
    for (int v : x) {
        if (v < 0) throw ValidationError("negative bin index");
        hi = std::max(hi, v);
    }
    return static_cast<std::size_t>(hi + 1);
}

}  // namespace

double mutual_information(std::span<const int> x, std::span<const int> y) {
    if (x.size() != y.size()) throw ValidationError("mutual_information: sequences differ in length");
    if (x.empty()) throw ValidationError("mutual_information: empty sequences");
    ContingencyTable t;
    t.rows = bin_span(x);
    t.cols = bin_span(y);
    t.counts.assign(t.rows * t.cols, 0.0);
    for (std::size_t r = 0; r < x.size(); ++r) {
        t.counts[static_cast<std::size_t>(x[r]) * t.cols + static_cast<std::size_t>(y[r])] += 1.0;
    }
    return mutual_information(t);
}

DependenceMatrix build_dependence_matrix(const DiscretizedDataset& train, int threads) {
    const std::size_t p = train.num_features();
    const std::size_t K = train.num_classes;
    DependenceMatrix out;
    out.m = SquareMatrix(p, 0.0);

    std::vector<std::vector<std::size_t>> members(K);
    for (std::size_t r = 0; r < train.num_rows(); ++r) members[static_cast<std::size_t>(train.labels[r])].push_back(r);
    for (std::size_t k = 0; k < K; ++k) {
        const std::string name = k < train.class_names.size() ? train.class_names[k] : std::to_string(k + 1);
        if (members[k].empty()) {
            out.warnings.push_back("class '" + name + "' absent from training rows; skipped in dependence matrix");
        } else if (members[k].size() == 1) {
            out.warnings.push_back("class '" + name + "' has a single training row; its conditional MI is 0");
        }
    }

    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    pairs.reserve(p * (p > 0 ? p - 1 : 0) / 2);
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = i + 1; j < p; ++j) pairs.emplace_back(i, j);
    }
    std::vector<double> values(pairs.size(), 0.0);
    parallel_for(pairs.size(), threads, [&](std::size_t idx) {
        const auto [i, j] = pairs[idx];
        ContingencyTable t;
        t.rows = static_cast<std::size_t>(train.bin_counts[i]);
        t.cols = static_cast<std::size_t>(train.bin_counts[j]);
        double best = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
            if (members[k].size() < 2) continue;
            t.counts.assign(t.rows * t.cols, 0.0);
            for (auto r : members[k]) {
                t.counts[static_cast<std::size_t>(train.bins[i][r]) * t.cols +
                         static_cast<std::size_t>(train.bins[j][r])] += 1.0;
            }
            best = std::max(best, mutual_information(t));
        }
        values[idx] = best;
    });
    for (std::size_t idx = 0; idx < pairs.size(); ++idx) {
        const auto [i, j] = pairs[idx];
        out.m(i, j) = values[idx];
        out.m(j, i) = values[idx];
        out.m_star = std::max(out.m_star, values[idx]);
    }
    return out;
}

DissimilarityMatrix dissimilarity(const DependenceMatrix& dep) {
    const std::size_t p = dep.m.size();
    DissimilarityMatrix out;
    out.h = SquareMatrix(p, 0.0);
    if (!(dep.m_star > 0.0)) {
        if (p > 1) out.warnings.push_back("all feature pairs are independent in sample (M* = 0); H set to 1 off the diagonal");
        for (std::size_t i = 0; i < p; ++i) {
            for (std::size_t j = 0; j < p; ++j) out.h(i, j) = i == j ? 0.0 : 1.0;
        }
        return out;
    }
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = 0; j < p; ++j) {
            if (i == j) continue;
            out.h(i, j) = std::clamp(1.0 - dep.m(i, j) / dep.m_star, 0.0, 1.0);
        }
    }
    return out;
}

void write_matrix_csv(std::ostream& out, const SquareMatrix& m, const std::vector<std::string>& names) {
    out << "feature";
    for (const auto& n : names) out << ',' << n;
    out << '\n';
    out.precision(17);
    for (std::size_t i = 0; i < m.size(); ++i) {
        out << (i < names.size() ? names[i] : std::to_string(i + 1));
        for (std::size_t j = 0; j < m.size(); ++j) out << ',' << m(i, j);
        out << '\n';
    }
}

}  // namespace snb

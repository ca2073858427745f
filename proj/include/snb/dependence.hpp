#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "snb/discretize.hpp"

namespace snb {

/// Dense row-major square matrix.
class SquareMatrix {
public:
    SquareMatrix() = default;
    explicit SquareMatrix(std::size_t n, double fill = 0.0) : n_(n), data_(n * n, fill) {}

    std::size_t size() const { return n_; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
    double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }

private:
    std::size_t n_ = 0;
    std::vector<double> data_;
};

/// Max-over-classes conditional mutual information between feature pairs (nats).
struct DependenceMatrix {
    SquareMatrix m;
    double m_star = 0.0;  // largest off-diagonal entry
    std::vector<std::string> warnings;
};

/// 0 for the most dependent pair, 1 for independent pairs; zero diagonal.
struct DissimilarityMatrix {
    SquareMatrix h;
    std::vector<std::string> warnings;
};

/// Row-major counts, `rows` x `cols`.
struct ContingencyTable {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> counts;
};

/// Plug-in MI of a joint count table, in nats. Terms are summed in sorted
/// order so the result is bit-identical under transposition.
double mutual_information(const ContingencyTable& table);

/// Plug-in MI of two equally long bin sequences.
double mutual_information(std::span<const int> x, std::span<const int> y);

/// Pairwise max over classes of the class-conditional MI, computed on `train`.
/// `threads` > 1 evaluates pairs in parallel; the result does not depend on it.
DependenceMatrix build_dependence_matrix(const DiscretizedDataset& train, int threads = 1);

DissimilarityMatrix dissimilarity(const DependenceMatrix& m);

void write_matrix_csv(std::ostream& out, const SquareMatrix& m, const std::vector<std::string>& names);

}  // namespace snb

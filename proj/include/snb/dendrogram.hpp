#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "snb/dependence.hpp"

namespace snb {

enum class Linkage { complete, single, average };

const char* to_string(Linkage linkage);
Linkage parse_linkage(const std::string& text);

/// Node ids follow the usual convention: leaves are 0..p-1 and the cluster
/// created by merge i is p + i.
struct Merge {
    std::size_t left;
    std::size_t right;
    double height;
    std::size_t size;
};

struct Dendrogram {
    std::size_t leaves = 0;
    Linkage linkage = Linkage::complete;
    std::vector<Merge> merges;  // p - 1 entries, heights non-decreasing
};

/// Agglomerative clustering over a symmetric dissimilarity matrix. Equal
/// candidates resolve to the pair with the smallest (lower, higher) minimum
/// leaf indices.
Dendrogram cluster(const SquareMatrix& h, Linkage linkage = Linkage::complete);
inline Dendrogram cluster(const DissimilarityMatrix& h, Linkage linkage = Linkage::complete) {
    return cluster(h.h, linkage);
}

struct CutGrid {
    std::vector<double> cuts;  // ascending, distinct, in [0, 1]
};

/// Offset below each merge height, relative to the height range.
inline constexpr double kCutNudge = 0x1.0p-30;

/// One cut just below every distinct merge height, thinned to `max_cuts` at
/// evenly spaced quantile positions when there are more.
CutGrid cut_grid(const Dendrogram& d, std::size_t max_cuts = 100);

struct Partition {
    std::vector<std::vector<std::size_t>> clusters;  // ordered by smallest member
};

/// Connected components after dropping merges above `cut`.
Partition partition_at(const Dendrogram& d, double cut);

void write_merges_csv(std::ostream& out, const Dendrogram& d);

}  // namespace snb

#pragma once

#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "snb/dataset.hpp"
#include "snb/discretize.hpp"

namespace testing {

inline snb::DiscretizedDataset discretized(std::vector<std::vector<int>> bins, std::vector<int> bin_counts,
                                           std::vector<int> labels, std::size_t K) {
    snb::DiscretizedDataset d;
    d.bins = std::move(bins);
    d.bin_counts = std::move(bin_counts);
    d.labels = std::move(labels);
    d.num_classes = K;
    for (std::size_t i = 0; i < d.bins.size(); ++i) d.feature_names.push_back("F" + std::to_string(i + 1));
    for (std::size_t k = 0; k < K; ++k) d.class_names.push_back(std::to_string(k + 1));
    return d;
}

/// Random discretized data: p features with `b` bins each.
inline snb::DiscretizedDataset random_discretized(std::size_t p, std::size_t n, int b, std::size_t K,
                                                  std::mt19937_64& gen) {
    std::uniform_int_distribution<int> bin(0, b - 1);
    std::uniform_int_distribution<int> cls(0, static_cast<int>(K) - 1);
    std::vector<std::vector<int>> bins(p, std::vector<int>(n));
    std::vector<int> labels(n);
    for (std::size_t r = 0; r < n; ++r) {
        labels[r] = r < K ? static_cast<int>(r) : cls(gen);
        for (std::size_t f = 0; f < p; ++f) bins[f][r] = bin(gen);
    }
    return discretized(std::move(bins), std::vector<int>(p, b), std::move(labels), K);
}

inline snb::Dataset parse(const std::string& text, const snb::Schema& schema = {},
                          const std::string& label = "class") {
    std::istringstream in(text);
    return snb::parse_csv(in, schema, label);
}

}  // namespace testing

#pragma once

#include <cstddef>
#include <cstdint>

#include "snb/dataset.hpp"

namespace snb {

/// Two equicorrelated Gaussian blocks (the first floor(p/4) features, then
/// the rest) feeding a noisy linear response; the class is the sign of it.
struct BlockConfig {
    std::size_t p = 100;
    std::size_t n = 2000;
    double rho = 0.5;
    double noise_sd = 2.5;
    std::uint64_t seed = 0;
};

/// Columns X1..Xp and classes "1" (y > 0) and "2" (y <= 0).
Dataset generate_blocks(const BlockConfig& cfg);

/// Four Gaussian features, two classes, conditionally independent except for
/// the correlated (X1, X2) pair. Class means are uniform on [mean_lo, mean_hi].
struct PairConfig {
    std::size_t n = 2000;
    double correlation = 0.95;
    double sd = 2.25;
    double mean_lo = 1.0;
    double mean_hi = 7.0;
    std::uint64_t seed = 0;
};

/// Rows alternate between classes "1" and "2".
Dataset generate_gaussian_pair(const PairConfig& cfg);

}  // namespace snb

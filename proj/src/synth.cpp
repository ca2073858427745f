#include "snb/synth.hpp"

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "snb/error.hpp"
#include "snb/random.hpp"

namespace snb {

Dataset generate_blocks(const BlockConfig& cfg) {
    if (!(cfg.rho >= 0.0 && cfg.rho < 1.0)) throw UsageError("rho must lie in [0, 1)");
    if (cfg.p < 1 || cfg.n < 1) throw UsageError("p and n must be positive");
    if (!(cfg.noise_sd >= 0.0)) throw UsageError("noise sd must be non-negative");

    Rng rng(cfg.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const std::size_t first = cfg.p / 4;

    std::vector<double> beta(cfg.p);
    for (std::size_t i = 0; i < cfg.p; ++i) {
        const double u = rng.uniform();
        beta[i] = i < first ? 0.9 + 0.2 * u : (-1.0 / 3.0 - 0.1) + 0.2 * u;
    }

    const double shared = std::sqrt(cfg.rho);
    const double own = std::sqrt(1.0 - cfg.rho);
    std::vector<std::vector<double>> cols(cfg.p, std::vector<double>(cfg.n));
    std::vector<std::string> labels(cfg.n);
    for (std::size_t r = 0; r < cfg.n; ++r) {
        const double z1 = normal(rng.engine());
        const double z2 = normal(rng.engine());
        double y = 0.0;
        for (std::size_t i = 0; i < cfg.p; ++i) {
            const double x = shared * (i < first ? z1 : z2) + own * normal(rng.engine());
            cols[i][r] = x;
            y += beta[i] * x;
        }
        y += cfg.noise_sd * normal(rng.engine());
        labels[r] = y > 0.0 ? "1" : "2";
    }

    std::vector<FeatureColumn> features;
    features.reserve(cfg.p);
    for (std::size_t i = 0; i < cfg.p; ++i) {
        features.push_back(FeatureColumn::continuous("X" + std::to_string(i + 1), std::move(cols[i])));
    }
    return Dataset::from_label_tokens(std::move(features), labels);
}

Dataset generate_gaussian_pair(const PairConfig& cfg) {
    if (!(std::abs(cfg.correlation) < 1.0)) throw UsageError("correlation must lie in (-1, 1)");
    if (!(cfg.sd > 0.0)) throw UsageError("sd must be positive");
    if (cfg.n < 2) throw UsageError("n must be at least 2");

    Rng rng(cfg.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    double mean[4][2];
    for (auto& feature : mean) {
        for (double& m : feature) m = cfg.mean_lo + (cfg.mean_hi - cfg.mean_lo) * rng.uniform();
    }

    const double rest = std::sqrt(1.0 - cfg.correlation * cfg.correlation);
    std::vector<std::vector<double>> cols(4, std::vector<double>(cfg.n));
    std::vector<std::string> labels(cfg.n);
    for (std::size_t r = 0; r < cfg.n; ++r) {
        const std::size_t k = r % 2;
        const double z1 = normal(rng.engine());
        const double z2 = normal(rng.engine());
        cols[0][r] = mean[0][k] + cfg.sd * z1;
        cols[1][r] = mean[1][k] + cfg.sd * (cfg.correlation * z1 + rest * z2);
        cols[2][r] = mean[2][k] + cfg.sd * normal(rng.engine());
        cols[3][r] = mean[3][k] + cfg.sd * normal(rng.engine());
        labels[r] = k == 0 ? "1" : "2";
    }

    std::vector<FeatureColumn> features;
    for (std::size_t i = 0; i < 4; ++i) {
        features.push_back(FeatureColumn::continuous("X" + std::to_string(i + 1), std::move(cols[i])));
    }
    return Dataset::from_label_tokens(std::move(features), labels);
}

}  // namespace snb

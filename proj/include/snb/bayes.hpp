#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "snb/discretize.hpp"

namespace snb {

/// Sorted, duplicate-free, non-empty set of feature indices.
class FeatureCombination {
public:
    FeatureCombination() = default;
    explicit FeatureCombination(std::vector<std::size_t> indices);

    static FeatureCombination all(std::size_t p);

    const std::vector<std::size_t>& indices() const { return indices_; }
    std::size_t size() const { return indices_.size(); }
    bool empty() const { return indices_.empty(); }

    friend bool operator==(const FeatureCombination&, const FeatureCombination&) = default;
    friend auto operator<=>(const FeatureCombination&, const FeatureCombination&) = default;

private:
    std::vector<std::size_t> indices_;
};

/// Log class-conditional table of one feature, laid out [bin * K + k], with
/// add-alpha smoothing over all of the feature's bins.
std::vector<double> log_conditional_table(const DiscretizedDataset& train, std::size_t feature, double alpha);

/// Log class priors from training frequencies; every class must occur.
std::vector<double> log_class_priors(const DiscretizedDataset& train);

struct NBModel {
    std::size_t num_classes = 0;
    double alpha = 1.0;
    std::vector<double> log_priors;
    std::vector<std::size_t> features;            // the combination
    std::vector<int> bin_counts;                  // per selected feature
    std::vector<std::vector<double>> log_tables;  // per selected feature, [bin * K + k]

    nlohmann::json to_json(const std::vector<std::string>& feature_names = {},
                           const std::vector<std::string>& class_names = {}) const;
};

NBModel fit(const DiscretizedDataset& train, const FeatureCombination& combo, double alpha = 1.0);

/// Unnormalised log posterior: log prior plus the selected features' log
/// likelihoods, accumulated in ascending feature order. `row` is indexed by
/// feature over the full feature set.
std::vector<double> log_scores(const NBModel& model, std::span<const int> row);

/// Normalises log scores with log-sum-exp.
std::vector<double> normalize_log_scores(std::span<const double> scores);

std::vector<double> posterior(const NBModel& model, std::span<const int> row);

/// Index of the largest score; exact ties go to the lowest index.
std::size_t argmax_class(std::span<const double> scores);

std::size_t predict(const NBModel& model, std::span<const int> row);

/// Row `r` of a discretized dataset as a feature-indexed vector.
std::vector<int> row_bins(const DiscretizedDataset& ds, std::size_t r);

}  // namespace snb

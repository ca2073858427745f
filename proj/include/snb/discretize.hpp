#pragma once

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "snb/dataset.hpp"

namespace snb {

/// Bin layout of one feature: regular bins [0, regular_bins), then the
/// optional unseen and missing bins.
struct FeatureBins {
    std::string name;
    FeatureKind kind = FeatureKind::continuous;
    std::vector<double> cuts;          // continuous; strictly increasing
    std::vector<std::string> tokens;   // categorical; training alphabet, bin = position
    int regular_bins = 1;
    int unseen_bin = -1;               // categorical only
    int missing_bin = -1;              // present when the column allows missing values

    int total_bins() const;
    /// Continuous rule: number of cuts strictly below the value.
    int bin_of(double value) const;
};

struct BinMap {
    std::vector<FeatureBins> features;

    nlohmann::json to_json() const;
};

/// Feature-major bin indices.
struct DiscretizedDataset {
    std::vector<std::vector<int>> bins;  // [feature][row]
    std::vector<int> bin_counts;         // total bins per feature
    std::vector<int> labels;
    std::size_t num_classes = 0;
    std::vector<std::string> feature_names;
    std::vector<std::string> class_names;

    std::size_t num_features() const { return bins.size(); }
    std::size_t num_rows() const { return labels.size(); }
};

/// Cut points for one continuous feature by recursive entropy splitting with
/// the MDL stopping rule. Missing (NaN) values must be removed by the caller.
std::vector<double> mdlp_cuts(std::span<const double> values, std::span<const int> labels, std::size_t num_classes);

/// Fits continuous features with MDLP and categorical features with an
/// identity map over the training alphabet.
BinMap fit_mdlp(const Dataset& train);

DiscretizedDataset transform(const Dataset& ds, const BinMap& bins);

}  // namespace snb

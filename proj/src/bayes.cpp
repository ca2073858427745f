#include "snb/bayes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "snb/error.hpp"

namespace snb {

FeatureCombination::FeatureCombination(std::vector<std::size_t> indices) : indices_(std::move(indices)) {
    std::sort(indices_.begin(), indices_.end());
    if (std::adjacent_find(indices_.begin(), indices_.end()) != indices_.end()) {
        throw ValidationError("feature combination has duplicate indices");
    }
}

FeatureCombination FeatureCombination::all(std::size_t p) {
    std::vector<std::size_t> idx(p);
    for (std::size_t i = 0; i < p; ++i) idx[i] = i;
    return FeatureCombination(std::move(idx));
}

std::vector<double> log_class_priors(const DiscretizedDataset& train) {
    const std::size_t K = train.num_classes;
    std::vector<double> counts(K, 0.0);
    for (int y : train.labels) counts[static_cast<std::size_t>(y)] += 1.0;
    const double n = static_cast<double>(train.num_rows());
    std::vector<double> out(K);
    for (std::size_t k = 0; k < K; ++k) {
        if (counts[k] == 0.0) {
            const std::string name = k < train.class_names.size() ? train.class_names[k] : std::to_string(k + 1);
            throw ValidationError("class '" + name + "' absent from training data");
        }
        out[k] = std::log(counts[k] / n);
    }
    return out;
}

std::vector<double> log_conditional_table(const DiscretizedDataset& train, std::size_t feature, double alpha) {
    if (!(alpha > 0.0)) throw UsageError("smoothing alpha must be positive");
    const std::size_t K = train.num_classes;
    const auto bins = static_cast<std::size_t>(train.bin_counts.at(feature));
    std::vector<double> counts(bins * K, 0.0);
    std::vector<double> class_n(K, 0.0);
    const auto& col = train.bins[feature];
    for (std::size_t r = 0; r < train.num_rows(); ++r) {
        const auto k = static_cast<std::size_t>(train.labels[r]);
        counts[static_cast<std::size_t>(col[r]) * K + k] += 1.0;
        class_n[k] += 1.0;
    }
    std::vector<double> table(bins * K);
    for (std::size_t b = 0; b < bins; ++b) {
        for (std::size_t k = 0; k < K; ++k) {
            table[b * K + k] = std::log((counts[b * K + k] + alpha) / (class_n[k] + alpha * static_cast<double>(bins)));
        }
    }
    return table;
}

NBModel fit(const DiscretizedDataset& train, const FeatureCombination& combo, double alpha) {
    if (combo.empty()) throw ValidationError("cannot fit a model on an empty feature combination");
    NBModel model;
    model.num_classes = train.num_classes;
    model.alpha = alpha;
    model.log_priors = log_class_priors(train);
    model.features = combo.indices();
    for (auto f : combo.indices()) {
        if (f >= train.num_features()) throw ValidationError("feature index out of range");
        model.bin_counts.push_back(train.bin_counts[f]);
        model.log_tables.push_back(log_conditional_table(train, f, alpha));
    }
    return model;
}

std::vector<double> log_scores(const NBModel& model, std::span<const int> row) {
    const std::size_t K = model.num_classes;
    std::vector<double> s(model.log_priors);
    for (std::size_t i = 0; i < model.features.size(); ++i) {
        const int b = row[model.features[i]];
        if (b < 0 || b >= model.bin_counts[i]) throw ValidationError("bin index out of range for the model");
        const double* cell = model.log_tables[i].data() + static_cast<std::size_t>(b) * K;
        for (std::size_t k = 0; k < K; ++k) s[k] += cell[k];
    }
    return s;
}

std::vector<double> normalize_log_scores(std::span<const double> scores) {
    const double hi = *std::max_element(scores.begin(), scores.end());
    double total = 0.0;
    for (double s : scores) total += std::exp(s - hi);
    const double lse = hi + std::log(total);
    std::vector<double> out(scores.size());
    for (std::size_t k = 0; k < scores.size(); ++k) out[k] = std::exp(scores[k] - lse);
    return out;
}

std::vector<double> posterior(const NBModel& model, std::span<const int> row) {
    const auto s = log_scores(model, row);
    return normalize_log_scores(s);
}

std::size_t argmax_class(std::span<const double> scores) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < scores.size(); ++k) {
        if (scores[k] > scores[best]) best = k;
    }
    return best;
}

std::size_t predict(const NBModel& model, std::span<const int> row) {
    const auto s = log_scores(model, row);
    return argmax_class(s);
}

std::vector<int> row_bins(const DiscretizedDataset& ds, std::size_t r) {
    std::vector<int> row(ds.num_features());
    for (std::size_t f = 0; f < ds.num_features(); ++f) row[f] = ds.bins[f][r];
    return row;
}

nlohmann::json NBModel::to_json(const std::vector<std::string>& feature_names,
                                const std::vector<std::string>& class_names) const {
    nlohmann::json j;
    j["alpha"] = alpha;
    std::vector<double> priors;
    for (double lp : log_priors) priors.push_back(std::exp(lp));
    j["priors"] = priors;
    if (!class_names.empty()) j["classes"] = class_names;
    auto feats = nlohmann::json::array();
    for (std::size_t i = 0; i < features.size(); ++i) {
        nlohmann::json f;
        f["index"] = features[i];
        if (features[i] < feature_names.size()) f["name"] = feature_names[features[i]];
        // conditional[k][b] = p(bin b | class k)
        std::vector<std::vector<double>> cond(num_classes, std::vector<double>(static_cast<std::size_t>(bin_counts[i])));
        for (std::size_t b = 0; b < cond.front().size(); ++b) {
            for (std::size_t k = 0; k < num_classes; ++k) cond[k][b] = std::exp(log_tables[i][b * num_classes + k]);
        }
        f["conditional"] = cond;
        feats.push_back(std::move(f));
    }
    j["features"] = std::move(feats);
    return j;
}

}  // namespace snb

#include "snb/discretize.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "snb/error.hpp"

namespace snb {

int FeatureBins::total_bins() const {
    int total = regular_bins;
    if (unseen_bin >= 0) ++total;
    if (missing_bin >= 0) ++total;
    return total;
}

int FeatureBins::bin_of(double value) const {
    return static_cast<int>(std::lower_bound(cuts.begin(), cuts.end(), value) - cuts.begin());
}

nlohmann::json BinMap::to_json() const {
    auto out = nlohmann::json::array();
    for (const auto& f : features) {
        nlohmann::json j;
        j["name"] = f.name;
        j["kind"] = to_string(f.kind);
        j["bins"] = f.regular_bins;
        if (f.kind == FeatureKind::continuous) {
            j["cuts"] = f.cuts;
        } else {
            j["tokens"] = f.tokens;
            j["unseen_bin"] = f.unseen_bin;
        }
        j["missing_bin"] = f.missing_bin >= 0 ? nlohmann::json(f.missing_bin) : nlohmann::json(nullptr);
        out.push_back(std::move(j));
    }
    return nlohmann::json{{"features", std::move(out)}};
}

namespace {

double entropy_bits(std::span<const std::size_t> counts, std::size_t total) {
    if (total == 0) return 0.0;
    double h = 0.0;
    const double n = static_cast<double>(total);
    for (auto c : counts) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / n;
        h -= p * std::log2(p);
    }
    return h;
}

std::size_t classes_present(std::span<const std::size_t> counts) {
    return static_cast<std::size_t>(std::count_if(counts.begin(), counts.end(), [](std::size_t c) { return c > 0; }));
}

struct Sorted {
    std::vector<double> values;
    std::vector<int> labels;
    std::size_t num_classes;
};

void split_range(const Sorted& s, std::size_t lo, std::size_t hi, std::vector<double>& cuts) {
    const std::size_t n = hi - lo;
    if (n < 2) return;
    const std::size_t K = s.num_classes;

    std::vector<std::size_t> total(K, 0);
    for (std::size_t i = lo; i < hi; ++i) ++total[static_cast<std::size_t>(s.labels[i])];
    const double ent_all = entropy_bits(total, n);
    if (ent_all == 0.0) return;

    // Group runs of equal values; a group is pure when all its labels agree.
    struct Group {
        std::size_t end;
        int label;  // -1 when mixed
    };
    std::vector<Group> groups;
    for (std::size_t i = lo; i < hi;) {
        std::size_t j = i;
        int label = s.labels[i];
        while (j < hi && s.values[j] == s.values[i]) {
            if (s.labels[j] != label) label = -1;
            ++j;
        }
        groups.push_back({j, label});
        i = j;
    }
    if (groups.size() < 2) return;

    std::vector<std::size_t> left(K, 0);
    std::vector<std::size_t> right(K, 0);
    std::vector<std::size_t> best_left;
    double best_e = 0.0;
    std::size_t best_pos = 0;
    bool found = false;
    std::size_t pos = lo;
    for (std::size_t g = 0; g + 1 < groups.size(); ++g) {
        for (; pos < groups[g].end; ++pos) ++left[static_cast<std::size_t>(s.labels[pos])];
        const bool boundary = !(groups[g].label >= 0 && groups[g].label == groups[g + 1].label);
        if (!boundary) continue;
        const std::size_t n1 = pos - lo;
        const std::size_t n2 = n - n1;
        for (std::size_t k = 0; k < K; ++k) right[k] = total[k] - left[k];
        const double e = (static_cast<double>(n1) * entropy_bits(left, n1) +
                          static_cast<double>(n2) * entropy_bits(right, n2)) /
                         static_cast<double>(n);
        if (!found || e < best_e) {
            found = true;
            best_e = e;
            best_pos = pos;
            best_left = left;
        }
    }
    if (!found) return;

    const std::size_t n1 = best_pos - lo;
    const std::size_t n2 = n - n1;
    for (std::size_t k = 0; k < K; ++k) right[k] = total[k] - best_left[k];
    const double ent1 = entropy_bits(best_left, n1);
    const double ent2 = entropy_bits(right, n2);
    const double gain = ent_all - best_e;
    const auto k0 = static_cast<double>(classes_present(total));
    const auto k1 = static_cast<double>(classes_present(best_left));
    const auto k2 = static_cast<double>(classes_present(right));
    const double delta = std::log2(std::pow(3.0, k0) - 2.0) - (k0 * ent_all - k1 * ent1 - k2 * ent2);
    const double threshold = (std::log2(static_cast<double>(n) - 1.0) + delta) / static_cast<double>(n);
    if (!(gain > threshold)) return;

    const double a = s.values[best_pos - 1];
    const double b = s.values[best_pos];
    double cut = a + (b - a) / 2.0;
    if (!(cut < b)) cut = a;
    cuts.push_back(cut);
    split_range(s, lo, best_pos, cuts);
    split_range(s, best_pos, hi, cuts);
}

}  // namespace

std::vector<double> mdlp_cuts(std::span<const double> values, std::span<const int> labels, std::size_t num_classes) {
    if (values.size() != labels.size()) throw ValidationError("mdlp: values and labels differ in length");
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (values[a] != values[b]) return values[a] < values[b];
        return labels[a] < labels[b];
    });
    Sorted s{{}, {}, num_classes};
    s.values.reserve(order.size());
    s.labels.reserve(order.size());
    for (auto i : order) {
        s.values.push_back(values[i]);
        s.labels.push_back(labels[i]);
    }
    std::vector<double> cuts;
    split_range(s, 0, s.values.size(), cuts);
    std::sort(cuts.begin(), cuts.end());
    return cuts;
}

BinMap fit_mdlp(const Dataset& train) {
    BinMap map;
    map.features.reserve(train.num_features());
    const auto& labels = train.labels();
    for (const auto& col : train.features()) {
        FeatureBins fb;
        fb.name = col.name;
        fb.kind = col.kind;
        if (col.kind == FeatureKind::continuous) {
            std::vector<double> v;
            std::vector<int> y;
            for (std::size_t r = 0; r < col.numeric.size(); ++r) {
                if (std::isnan(col.numeric[r])) continue;
                v.push_back(col.numeric[r]);
                y.push_back(labels[r]);
            }
            fb.cuts = mdlp_cuts(v, y, train.num_classes());
            fb.regular_bins = static_cast<int>(fb.cuts.size()) + 1;
        } else {
            std::vector<bool> seen(col.categories.size(), false);
            for (int c : col.codes) {
                if (c >= 0) seen[static_cast<std::size_t>(c)] = true;
            }
            for (std::size_t c = 0; c < seen.size(); ++c) {
                if (seen[c]) fb.tokens.push_back(col.categories[c]);
            }
            fb.regular_bins = std::max<int>(1, static_cast<int>(fb.tokens.size()));
            fb.unseen_bin = fb.regular_bins;
        }
        if (col.allows_missing) fb.missing_bin = fb.regular_bins + (fb.unseen_bin >= 0 ? 1 : 0);
        map.features.push_back(std::move(fb));
    }
    return map;
}

DiscretizedDataset transform(const Dataset& ds, const BinMap& bins) {
    if (ds.num_features() != bins.features.size()) throw SchemaError("bin map and dataset differ in feature count");
    DiscretizedDataset out;
    out.labels = ds.labels();
    out.num_classes = ds.num_classes();
    out.class_names = ds.class_names();
    out.feature_names = ds.feature_names();
    out.bins.resize(ds.num_features());
    out.bin_counts.resize(ds.num_features());
    for (std::size_t f = 0; f < ds.num_features(); ++f) {
        const auto& col = ds.feature(f);
        const auto& fb = bins.features[f];
        if (col.kind != fb.kind || col.name != fb.name) {
            throw SchemaError("feature '" + col.name + "' does not match the bin map");
        }
        auto& dst = out.bins[f];
        dst.resize(col.size());
        out.bin_counts[f] = fb.total_bins();
        auto missing_bin = [&] {
            if (fb.missing_bin < 0) throw SchemaError("feature '" + col.name + "' has a missing value but no missing bin");
            return fb.missing_bin;
        };
        if (col.kind == FeatureKind::continuous) {
            for (std::size_t r = 0; r < col.numeric.size(); ++r) {
                dst[r] = std::isnan(col.numeric[r]) ? missing_bin() : fb.bin_of(col.numeric[r]);
            }
        } else {
            std::map<std::string, int> token_bin;
            for (std::size_t b = 0; b < fb.tokens.size(); ++b) token_bin[fb.tokens[b]] = static_cast<int>(b);
            std::vector<int> code_bin(col.categories.size(), fb.unseen_bin);
            for (std::size_t c = 0; c < col.categories.size(); ++c) {
                if (auto it = token_bin.find(col.categories[c]); it != token_bin.end()) code_bin[c] = it->second;
            }
            for (std::size_t r = 0; r < col.codes.size(); ++r) {
                dst[r] = col.codes[r] < 0 ? missing_bin() : code_bin[static_cast<std::size_t>(col.codes[r])];
            }
        }
    }
    return out;
}

}  // namespace snb

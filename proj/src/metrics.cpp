#include "snb/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

#include "snb/error.hpp"

namespace snb {

ConfusionMatrix ConfusionMatrix::from_predictions(std::span<const int> truth, std::span<const int> predicted,
                                                  std::size_t num_classes) {
    if (truth.size() != predicted.size()) throw ValidationError("truth and predictions differ in length");
    ConfusionMatrix cm(num_classes);
    for (std::size_t i = 0; i < truth.size(); ++i) {
        cm.add(static_cast<std::size_t>(truth[i]), static_cast<std::size_t>(predicted[i]));
    }
    return cm;
}

std::size_t ConfusionMatrix::total() const { return std::accumulate(counts_.begin(), counts_.end(), std::size_t{0}); }

std::size_t ConfusionMatrix::true_total(std::size_t k) const {
    std::size_t s = 0;
    for (std::size_t j = 0; j < k_; ++j) s += at(k, j);
    return s;
}

std::size_t ConfusionMatrix::predicted_total(std::size_t k) const {
    std::size_t s = 0;
    for (std::size_t i = 0; i < k_; ++i) s += at(i, k);
    return s;
}

std::size_t ConfusionMatrix::trace() const {
    std::size_t s = 0;
    for (std::size_t k = 0; k < k_; ++k) s += at(k, k);
    return s;
}

std::optional<double> recall_k(const ConfusionMatrix& cm, std::size_t k) {
    const auto n = cm.true_total(k);
    if (n == 0) return std::nullopt;
    return static_cast<double>(cm.at(k, k)) * 100.0 / static_cast<double>(n);
}

std::optional<double> acc(const ConfusionMatrix& cm) {
    const auto n = cm.total();
    if (n == 0) return std::nullopt;
    return static_cast<double>(cm.trace()) * 100.0 / static_cast<double>(n);
}

std::optional<double> precision_k(const ConfusionMatrix& cm, std::size_t k) {
    const auto n = cm.predicted_total(k);
    if (n == 0) return std::nullopt;
    return static_cast<double>(cm.at(k, k)) / static_cast<double>(n);
}

double auc_binary(std::span<const double> scores, std::span<const int> labels, int positive) {
    if (scores.size() != labels.size()) throw ValidationError("auc: scores and labels differ in length");
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Sum of (1-based, tie-averaged) ranks of the positive rows.
    double rank_sum = 0.0;
    double n_pos = 0.0;
    double n_neg = 0.0;
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
        const double mid = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t t = i; t < j; ++t) {
            if (labels[order[t]] == positive) {
                rank_sum += mid;
                n_pos += 1.0;
            } else {
                n_neg += 1.0;
            }
        }
        i = j;
    }
    if (n_pos == 0.0 || n_neg == 0.0) throw ValidationError("auc requires both classes to be present");
    return (rank_sum - n_pos * (n_pos + 1.0) / 2.0) / (n_pos * n_neg);
}

std::string Measure::label(const std::vector<std::string>& class_names) const {
    auto cls_name = [&] { return cls < class_names.size() ? class_names[cls] : std::to_string(cls + 1); };
    switch (kind) {
        case MeasureKind::acc: return "acc";
        case MeasureKind::auc: return "auc";
        case MeasureKind::recall: return "recall:" + cls_name();
        case MeasureKind::precision: return "precision:" + cls_name();
    }
    return "acc";
}

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t");
    return s.substr(first, last - first + 1);
}

std::size_t resolve_class(const std::string& token, const std::vector<std::string>& class_names) {
    for (std::size_t k = 0; k < class_names.size(); ++k) {
        if (class_names[k] == token) return k;
    }
    std::size_t pos = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), pos);
    if (ec == std::errc{} && ptr == token.data() + token.size() && pos >= 1 && pos <= class_names.size()) {
        return pos - 1;
    }
    throw UsageError("unknown class '" + token + "'");
}

}  // namespace

Measure parse_measure(const std::string& text, const std::vector<std::string>& class_names) {
    const std::string t = trim(text);
    const auto colon = t.find(':');
    const std::string head = t.substr(0, colon);
    Measure m;
    if (head == "acc" || head == "auc") {
        if (colon != std::string::npos) throw UsageError("measure '" + head + "' takes no class");
        m.kind = head == "acc" ? MeasureKind::acc : MeasureKind::auc;
        if (m.kind == MeasureKind::auc && class_names.size() != 2) {
            throw UsageError("auc is only defined for two-class problems");
        }
        return m;
    }
    if (head == "recall" || head == "precision") {
        if (colon == std::string::npos) throw UsageError("measure '" + head + "' needs a class, e.g. " + head + ":1");
        m.kind = head == "recall" ? MeasureKind::recall : MeasureKind::precision;
        m.cls = resolve_class(trim(t.substr(colon + 1)), class_names);
        return m;
    }
    throw UsageError("unknown measure '" + t + "'");
}

std::string Constraint::label(const std::vector<std::string>& class_names) const {
    std::string thr = std::to_string(threshold);
    thr.erase(thr.find_last_not_of('0') + 1);
    if (!thr.empty() && thr.back() == '.') thr.pop_back();
    return measure.label(class_names) + (strict ? ">" : ">=") + thr;
}

ConstraintSpec parse_constraints(const std::string& text, const std::vector<std::string>& class_names) {
    ConstraintSpec spec;
    std::vector<std::string> items;
    for (std::size_t start = 0;;) {
        const auto end = text.find(',', start);
        items.push_back(trim(text.substr(start, end == std::string::npos ? std::string::npos : end - start)));
        if (end == std::string::npos) break;
        start = end + 1;
    }
    for (const auto& item : items) {
        if (item.empty()) continue;
        const auto op = item.find('>');
        if (op == std::string::npos) throw UsageError("constraint '" + item + "' needs '>' or '>='");
        Constraint c;
        c.strict = !(op + 1 < item.size() && item[op + 1] == '=');
        c.measure = parse_measure(item.substr(0, op), class_names);
        const std::string num = trim(item.substr(op + (c.strict ? 1 : 2)));
        auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), c.threshold);
        if (num.empty() || ec != std::errc{} || ptr != num.data() + num.size() || !std::isfinite(c.threshold)) {
            throw UsageError("constraint '" + item + "' has an invalid threshold");
        }
        if (c.threshold < 0.0 || c.threshold > c.measure.range()) {
            throw UsageError("constraint '" + item + "' threshold is outside the measure's range");
        }
        spec.items.push_back(c);
    }
    return spec;
}

std::optional<double> Evaluation::value(const Measure& m) const {
    switch (m.kind) {
        case MeasureKind::acc: return snb::acc(cm);
        case MeasureKind::auc: return auc;
        case MeasureKind::recall: return recall_k(cm, m.cls);
        case MeasureKind::precision: return precision_k(cm, m.cls);
    }
    return std::nullopt;
}

Evaluation evaluate(std::span<const int> truth, std::span<const int> predicted, std::size_t num_classes,
                    std::span<const double> positive_scores) {
    Evaluation e{ConfusionMatrix::from_predictions(truth, predicted, num_classes), std::nullopt};
    if (num_classes == 2 && !positive_scores.empty() && e.cm.true_total(0) > 0 && e.cm.true_total(1) > 0) {
        e.auc = auc_binary(positive_scores, truth, 1);
    }
    return e;
}

ConstraintResult check_constraints(const Evaluation& eval, const ConstraintSpec& spec) {
    ConstraintResult res;
    for (std::size_t i = 0; i < spec.items.size(); ++i) {
        const auto& c = spec.items[i];
        const auto v = eval.value(c.measure);
        if (!v) {
            res.feasible = false;
            res.violations.push_back({i, std::nullopt, 0.0, true});
            res.total_violation += 1.0;
            continue;
        }
        const bool ok = c.strict ? *v > c.threshold : *v >= c.threshold;
        if (!ok) {
            res.feasible = false;
            const double margin = c.threshold - *v;
            res.violations.push_back({i, v, margin, false});
            res.total_violation += margin / c.measure.range();
        }
    }
    return res;
}

}  // namespace snb

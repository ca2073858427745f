#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace snb {

/// K x K counts, true class by predicted class.
class ConfusionMatrix {
public:
    explicit ConfusionMatrix(std::size_t num_classes = 2)
        : k_(num_classes), counts_(num_classes * num_classes, 0) {}

    static ConfusionMatrix from_predictions(std::span<const int> truth, std::span<const int> predicted,
                                            std::size_t num_classes);

    void add(std::size_t truth, std::size_t predicted) { ++counts_[truth * k_ + predicted]; }

    std::size_t num_classes() const { return k_; }
    std::size_t at(std::size_t truth, std::size_t predicted) const { return counts_[truth * k_ + predicted]; }
    std::size_t total() const;
    std::size_t true_total(std::size_t k) const;
    std::size_t predicted_total(std::size_t k) const;
    std::size_t trace() const;

private:
    std::size_t k_;
    std::vector<std::size_t> counts_;
};

/// Percent of class-k rows predicted as k; empty when class k has no rows.
std::optional<double> recall_k(const ConfusionMatrix& cm, std::size_t k);

/// Percent of rows predicted correctly; empty on an empty matrix.
std::optional<double> acc(const ConfusionMatrix& cm);

/// Fraction of rows predicted as k that are truly k; empty when none is predicted as k.
std::optional<double> precision_k(const ConfusionMatrix& cm, std::size_t k);

/// Normalised Mann-Whitney statistic; ties count one half. `labels` holds
/// 0/1 class indices and `positive` names the class whose score is given.
double auc_binary(std::span<const double> scores, std::span<const int> labels, int positive = 1);

enum class MeasureKind { acc, auc, recall, precision };

struct Measure {
    MeasureKind kind = MeasureKind::acc;
    std::size_t cls = 0;  // recall / precision only

    /// Full range of the measure: 100 for percentages, 1 otherwise.
    double range() const { return kind == MeasureKind::acc || kind == MeasureKind::recall ? 100.0 : 1.0; }
    std::string label(const std::vector<std::string>& class_names) const;

    friend bool operator==(const Measure&, const Measure&) = default;
};

/// `acc`, `auc`, `recall:CLASS`, `precision:CLASS`; CLASS is a class name or
/// a 1-based class position. AUC is refused unless there are two classes.
Measure parse_measure(const std::string& text, const std::vector<std::string>& class_names);

struct Constraint {
    Measure measure;
    bool strict = true;  // '>' vs '>='
    double threshold = 0.0;

    std::string label(const std::vector<std::string>& class_names) const;
};

struct ConstraintSpec {
    std::vector<Constraint> items;

    bool empty() const { return items.empty(); }
};

/// Comma-separated `measure[:class](>|>=)threshold` list; empty text gives no constraints.
ConstraintSpec parse_constraints(const std::string& text, const std::vector<std::string>& class_names);

/// Measures available for one set of predictions.
struct Evaluation {
    ConfusionMatrix cm;
    std::optional<double> auc;  // binary problems with both classes present

    std::optional<double> value(const Measure& m) const;
};

/// `positive_scores` (posterior of class index 1) enables AUC for K = 2.
Evaluation evaluate(std::span<const int> truth, std::span<const int> predicted, std::size_t num_classes,
                    std::span<const double> positive_scores = {});

struct Violation {
    std::size_t constraint = 0;
    std::optional<double> value;
    double margin = 0.0;     // threshold - value, in the measure's units
    bool undefined = false;  // measure could not be evaluated
};

struct ConstraintResult {
    bool feasible = true;
    std::vector<Violation> violations;
    /// Sum over failed constraints of margin / range; an undefined measure adds 1.
    double total_violation = 0.0;
};

ConstraintResult check_constraints(const Evaluation& eval, const ConstraintSpec& spec);

}  // namespace snb

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "snb/bayes.hpp"
#include "snb/dataset.hpp"
#include "snb/dendrogram.hpp"
#include "snb/dependence.hpp"
#include "snb/discretize.hpp"
#include "snb/metrics.hpp"

namespace snb {

struct SearchConfig {
    std::size_t max_cuts = 100;   // C is min(p - 1, max_cuts)
    std::size_t max_combos = 25;  // S, draws per cut
    std::optional<double> q;      // empty: chosen from the dependence matrix
    Measure objective;
    ConstraintSpec constraints;
    std::uint64_t seed = 0;
    double alpha = 1.0;
    int threads = 1;
};

/// Product of cluster sizes, saturated at `cap` + 1.
std::size_t nc(const Partition& partition, std::size_t cap);

struct SampledCombination {
    std::size_t draw = 0;
    FeatureCombination combo;
};

/// min(nc, S) draws at one cut. Each draw includes, per cluster and with
/// probability q, one uniformly chosen member. Empty draws are dropped.
/// Draw s uses the stream derive_seed(seed, cut_id, s).
std::vector<SampledCombination> sample_combinations(const Partition& partition, std::size_t max_combos, double q,
                                                    std::uint64_t seed, std::uint64_t cut_id);

/// Fraction of dependence entries above this value decides q.
inline constexpr double kDependentEntry = 0.1;
inline constexpr double kDependentShare = 0.2;
inline constexpr double kSparseQ = 0.4;
inline constexpr double kDenseQ = 0.6;

/// q = 0.4 when at least 20% of the off-diagonal entries exceed 0.1, else 0.6.
double choose_q(const DependenceMatrix& m);

/// Scores feature combinations of a model fit on `train` against `target`.
/// Per-feature log-likelihood contributions are tabulated once, so each call
/// costs O(rows x |combo| x K). Results match fit() + log_scores() exactly.
class CandidateEvaluator {
public:
    CandidateEvaluator(const DiscretizedDataset& train, const DiscretizedDataset& target, double alpha);

    Evaluation evaluate(const FeatureCombination& combo) const;

    /// Unnormalised log scores for every target row, row-major [row * K + k].
    std::vector<double> scores(const FeatureCombination& combo) const;

    std::size_t num_features() const { return contrib_.size(); }

private:
    std::size_t classes_;
    std::size_t rows_;
    std::vector<double> log_priors_;
    std::vector<std::vector<double>> contrib_;  // [feature][row * K + k]
    std::vector<int> labels_;
};

/// Higher objective wins; undefined objectives lose to any value. Ties go to
/// fewer features, then the lexicographically smaller index set.
bool better_candidate(const std::optional<double>& a_obj, const FeatureCombination& a,
                      const std::optional<double>& b_obj, const FeatureCombination& b);

enum class WinnerSource { candidate, full_set, fallback };

const char* to_string(WinnerSource source);

struct Candidate {
    std::size_t cut_index = 0;
    double cut = 0.0;
    std::size_t draw = 0;
    FeatureCombination combo;
    std::optional<double> objective;  // validation set
    ConstraintResult constraints;
};

struct SelectionResult {
    FeatureCombination winner;
    WinnerSource source = WinnerSource::full_set;
    std::optional<double> winner_objective;
    ConstraintResult winner_constraints;
    Evaluation winner_validation;
    std::optional<double> full_objective;
    ConstraintResult full_constraints;
    double q = 0.0;
    CutGrid grid;
    std::vector<Candidate> audit;  // every non-empty draw, duplicates included
    std::size_t distinct_evaluated = 0;
};

/// Samples along the dendrogram's cut grid, scores each distinct combination
/// on `validation`, and returns the best feasible one. The full feature set
/// always competes when feasible. With nothing feasible, the combination with
/// the smallest total violation is returned and flagged as a fallback.
/// `config.q` must be set.
SelectionResult run_selection(const DiscretizedDataset& train, const DiscretizedDataset& validation,
                              const Dendrogram& dendrogram, const SearchConfig& config);

struct SubsetScore {
    FeatureCombination combo;
    std::optional<double> objective;
    ConstraintResult constraints;
};

struct BruteForceResult {
    FeatureCombination best;
    WinnerSource source = WinnerSource::candidate;
    std::optional<double> best_objective;
    std::vector<SubsetScore> table;  // ordered by size, then lexicographically
};

inline constexpr std::size_t kBruteForceMaxFeatures = 15;

/// Exhaustive search over all 2^p - 1 subsets with the run_selection rules.
BruteForceResult brute_force(const DiscretizedDataset& train, const DiscretizedDataset& validation,
                             const Measure& objective, const ConstraintSpec& constraints, double alpha = 1.0,
                             std::size_t max_p = kBruteForceMaxFeatures, int threads = 1);

void write_audit_csv(std::ostream& out, const SelectionResult& result, const std::vector<std::string>& names);

struct CvConfig {
    SearchConfig search;
    Linkage linkage = Linkage::complete;
    bool refit_bins_per_fold = true;
    bool baseline_only = false;  // skip the search, score the full set
};

/// Test-set measures keyed by Measure::label().
struct MeasureSet {
    std::vector<std::pair<std::string, std::optional<double>>> values;

    std::optional<double> get(const std::string& label) const;
};

/// acc, recall:k and precision:k for every class, plus auc for two classes.
std::vector<Measure> standard_measures(std::size_t num_classes);
MeasureSet measure_set(const Evaluation& eval, const std::vector<Measure>& measures,
                       const std::vector<std::string>& class_names);

struct FoldRecord {
    int run = 0;
    int fold = 0;
    bool ok = true;
    std::string error;
    std::uint64_t seed = 0;
    double q = 0.0;
    std::size_t cuts = 0;
    std::size_t draws = 0;
    std::size_t distinct_evaluated = 0;
    FeatureCombination winner;
    WinnerSource source = WinnerSource::full_set;
    bool validation_feasible = true;
    std::optional<double> validation_objective;
    std::optional<double> full_validation_objective;
    MeasureSet sparse_test;
    MeasureSet classic_test;
    double seconds = 0.0;
    std::vector<std::string> warnings;
    std::vector<Candidate> audit;
};

struct Summary {
    std::string measure;
    double mean = 0.0;
    double sd = 0.0;
    std::size_t count = 0;
};

struct CvReport {
    std::vector<FoldRecord> folds;
    std::vector<Summary> sparse;
    std::vector<Summary> classic;
    Summary sparsity;  // winner size
    std::size_t num_features = 0;
    std::vector<std::string> feature_names;
    std::vector<std::string> class_names;
    std::vector<std::string> warnings;

    const Summary* sparse_summary(const std::string& measure) const;
    const Summary* classic_summary(const std::string& measure) const;
};

/// Per fold: fit bins, dependence, dendrogram and search on train; select on
/// validation; score the winner and the full set on test.
CvReport cross_validated_run(const Dataset& ds, const SplitPlan& plan, const CvConfig& config);

/// Seed used for the search in fold (run, fold).
std::uint64_t fold_seed(std::uint64_t master, int run, int fold);

}  // namespace snb

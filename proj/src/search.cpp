#include "snb/search.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <ostream>

#include "snb/error.hpp"
#include "snb/parallel.hpp"
#include "snb/random.hpp"

namespace snb {

std::size_t nc(const Partition& partition, std::size_t cap) {
    std::size_t prod = 1;
    for (const auto& c : partition.clusters) {
        prod = std::min(prod * c.size(), cap + 1);
    }
    return prod;
}

std::vector<SampledCombination> sample_combinations(const Partition& partition, std::size_t max_combos, double q,
                                                    std::uint64_t seed, std::uint64_t cut_id) {
    if (!(q >= 0.0 && q <= 1.0)) throw UsageError("q must lie in [0, 1]");
    const std::size_t draws = std::min(nc(partition, max_combos), max_combos);
    std::vector<SampledCombination> out;
    out.reserve(draws);
    for (std::size_t s = 0; s < draws; ++s) {
        Rng rng(derive_seed(seed, cut_id, s));
        std::vector<std::size_t> picked;
        for (const auto& cluster : partition.clusters) {
            if (rng.uniform() < q) picked.push_back(cluster[rng.below(cluster.size())]);
        }
        if (!picked.empty()) out.push_back({s, FeatureCombination(std::move(picked))});
    }
    return out;
}

double choose_q(const DependenceMatrix& dep) {
    const std::size_t p = dep.m.size();
    if (p < 2) return kDenseQ;
    std::size_t above = 0;
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = 0; j < p; ++j) {
            if (i != j && dep.m(i, j) > kDependentEntry) ++above;
        }
    }
    const double share = static_cast<double>(above) / static_cast<double>(p * (p - 1));
    return share >= kDependentShare ? kSparseQ : kDenseQ;
}

CandidateEvaluator::CandidateEvaluator(const DiscretizedDataset& train, const DiscretizedDataset& target,
                                       double alpha)
    : classes_(train.num_classes), rows_(target.num_rows()), labels_(target.labels) {
    if (train.num_features() != target.num_features()) throw SchemaError("train and target differ in feature count");
    log_priors_ = log_class_priors(train);
    contrib_.resize(train.num_features());
    for (std::size_t f = 0; f < train.num_features(); ++f) {
        const auto table = log_conditional_table(train, f, alpha);
        auto& dst = contrib_[f];
        dst.resize(rows_ * classes_);
        const auto bins = train.bin_counts[f];
        for (std::size_t r = 0; r < rows_; ++r) {
            const int b = target.bins[f][r];
            if (b < 0 || b >= bins) throw SchemaError("target bin outside the training layout");
            for (std::size_t k = 0; k < classes_; ++k) dst[r * classes_ + k] = table[static_cast<std::size_t>(b) * classes_ + k];
        }
    }
}

std::vector<double> CandidateEvaluator::scores(const FeatureCombination& combo) const {
    std::vector<double> s(rows_ * classes_);
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t k = 0; k < classes_; ++k) s[r * classes_ + k] = log_priors_[k];
    }
    for (auto f : combo.indices()) {
        const auto& c = contrib_.at(f);
        for (std::size_t i = 0; i < s.size(); ++i) s[i] += c[i];
    }
    return s;
}

Evaluation CandidateEvaluator::evaluate(const FeatureCombination& combo) const {
    const auto s = scores(combo);
    std::vector<int> predicted(rows_);
    std::vector<double> positive;
    if (classes_ == 2) positive.resize(rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
        const std::span<const double> row(s.data() + r * classes_, classes_);
        predicted[r] = static_cast<int>(argmax_class(row));
        if (classes_ == 2) positive[r] = normalize_log_scores(row)[1];
    }
    return snb::evaluate(labels_, predicted, classes_, positive);
}

bool better_candidate(const std::optional<double>& a_obj, const FeatureCombination& a,
                      const std::optional<double>& b_obj, const FeatureCombination& b) {
    if (a_obj.has_value() != b_obj.has_value()) return a_obj.has_value();
    if (a_obj && *a_obj != *b_obj) return *a_obj > *b_obj;
    if (a.size() != b.size()) return a.size() < b.size();
    return a.indices() < b.indices();
}

const char* to_string(WinnerSource source) {
    switch (source) {
        case WinnerSource::candidate: return "candidate";
        case WinnerSource::full_set: return "full-set";
        case WinnerSource::fallback: return "fallback-least-violating";
    }
    return "candidate";
}

namespace {

struct Scored {
    FeatureCombination combo;
    Evaluation eval;
    std::optional<double> objective;
    ConstraintResult constraints;
};

std::vector<Scored> score_all(const CandidateEvaluator& evaluator, std::vector<FeatureCombination> combos,
                              const Measure& objective, const ConstraintSpec& constraints, int threads) {
    std::vector<Scored> out(combos.size());
    parallel_for(combos.size(), threads, [&](std::size_t i) {
        auto eval = evaluator.evaluate(combos[i]);
        auto obj = eval.value(objective);
        auto cons = check_constraints(eval, constraints);
        out[i] = Scored{std::move(combos[i]), std::move(eval), obj, std::move(cons)};
    });
    return out;
}

/// Index of the best feasible entry, or of the least violating one.
std::pair<std::size_t, bool> pick(const std::vector<Scored>& pool) {
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        if (!pool[i].constraints.feasible) continue;
        if (!best || better_candidate(pool[i].objective, pool[i].combo, pool[*best].objective, pool[*best].combo)) {
            best = i;
        }
    }
    if (best) return {*best, true};
    std::size_t least = 0;
    for (std::size_t i = 1; i < pool.size(); ++i) {
        const auto& a = pool[i];
        const auto& b = pool[least];
        if (a.constraints.total_violation != b.constraints.total_violation) {
            if (a.constraints.total_violation < b.constraints.total_violation) least = i;
        } else if (better_candidate(a.objective, a.combo, b.objective, b.combo)) {
            least = i;
        }
    }
    return {least, false};
}

}  // namespace

SelectionResult run_selection(const DiscretizedDataset& train, const DiscretizedDataset& validation,
                              const Dendrogram& dendrogram, const SearchConfig& config) {
    if (!config.q) throw UsageError("run_selection needs a resolved q");
    const std::size_t p = train.num_features();
    if (p == 0) throw ValidationError("no features to select from");
    if (dendrogram.leaves != p) throw ValidationError("dendrogram does not match the feature count");

    SelectionResult result;
    result.q = *config.q;
    result.grid = cut_grid(dendrogram, config.max_cuts);

    std::map<FeatureCombination, std::size_t> slot;
    std::vector<FeatureCombination> distinct;
    auto intern = [&](const FeatureCombination& c) {
        auto [it, inserted] = slot.try_emplace(c, distinct.size());
        if (inserted) distinct.push_back(c);
        return it->second;
    };
    const auto full = FeatureCombination::all(p);
    const std::size_t full_slot = intern(full);

    std::vector<std::size_t> audit_slot;
    for (std::size_t ci = 0; ci < result.grid.cuts.size(); ++ci) {
        const double cut = result.grid.cuts[ci];
        const auto partition = partition_at(dendrogram, cut);
        for (auto& s : sample_combinations(partition, config.max_combos, *config.q, config.seed, ci)) {
            audit_slot.push_back(intern(s.combo));
            result.audit.push_back(Candidate{ci, cut, s.draw, std::move(s.combo), std::nullopt, {}});
        }
    }

    const CandidateEvaluator evaluator(train, validation, config.alpha);
    const auto scored = score_all(evaluator, distinct, config.objective, config.constraints, config.threads);
    result.distinct_evaluated = scored.size();
    for (std::size_t i = 0; i < result.audit.size(); ++i) {
        result.audit[i].objective = scored[audit_slot[i]].objective;
        result.audit[i].constraints = scored[audit_slot[i]].constraints;
    }
    result.full_objective = scored[full_slot].objective;
    result.full_constraints = scored[full_slot].constraints;

    const auto [idx, feasible] = pick(scored);
    const auto& w = scored[idx];
    result.winner = w.combo;
    result.winner_objective = w.objective;
    result.winner_constraints = w.constraints;
    result.winner_validation = w.eval;
    if (!feasible) {
        result.source = WinnerSource::fallback;
    } else {
        result.source = idx == full_slot ? WinnerSource::full_set : WinnerSource::candidate;
    }
    return result;
}

BruteForceResult brute_force(const DiscretizedDataset& train, const DiscretizedDataset& validation,
                             const Measure& objective, const ConstraintSpec& constraints, double alpha,
                             std::size_t max_p, int threads) {
    const std::size_t p = train.num_features();
    if (p == 0) throw ValidationError("no features to enumerate");
    if (p > max_p) {
        throw UsageError("brute force refused: " + std::to_string(p) + " features exceed the limit of " +
                         std::to_string(max_p));
    }
    std::vector<FeatureCombination> combos;
    combos.reserve((std::size_t{1} << p) - 1);
    for (std::size_t mask = 1; mask < (std::size_t{1} << p); ++mask) {
        std::vector<std::size_t> idx;
        for (std::size_t f = 0; f < p; ++f) {
            if (mask & (std::size_t{1} << f)) idx.push_back(f);
        }
        combos.emplace_back(std::move(idx));
    }
    std::sort(combos.begin(), combos.end(), [](const FeatureCombination& a, const FeatureCombination& b) {
        if (a.size() != b.size()) return a.size() < b.size();
        return a.indices() < b.indices();
    });

    const CandidateEvaluator evaluator(train, validation, alpha);
    auto scored = score_all(evaluator, std::move(combos), objective, constraints, threads);
    const auto [idx, feasible] = pick(scored);

    BruteForceResult out;
    out.best = scored[idx].combo;
    out.best_objective = scored[idx].objective;
    if (!feasible) {
        out.source = WinnerSource::fallback;
    } else {
        out.source = out.best.size() == p ? WinnerSource::full_set : WinnerSource::candidate;
    }
    out.table.reserve(scored.size());
    for (auto& s : scored) out.table.push_back({std::move(s.combo), s.objective, std::move(s.constraints)});
    return out;
}

namespace {

std::string combo_text(const FeatureCombination& c, const std::vector<std::string>& names, char sep) {
    std::string out;
    for (auto f : c.indices()) {
        if (!out.empty()) out.push_back(sep);
        out += f < names.size() ? names[f] : std::to_string(f + 1);
    }
    return out;
}

}  // namespace

void write_audit_csv(std::ostream& out, const SelectionResult& result, const std::vector<std::string>& names) {
    out << "cut_index,cut,draw,features,size,objective,feasible,total_violation\n";
    out.precision(17);
    for (const auto& c : result.audit) {
        out << c.cut_index + 1 << ',' << c.cut << ',' << c.draw + 1 << ",\"" << combo_text(c.combo, names, ' ')
            << "\"," << c.combo.size() << ',';
        if (c.objective) out << *c.objective;
        out << ',' << (c.constraints.feasible ? "true" : "false") << ',' << c.constraints.total_violation << '\n';
    }
}

std::optional<double> MeasureSet::get(const std::string& label) const {
    for (const auto& [l, v] : values) {
        if (l == label) return v;
    }
    return std::nullopt;
}

std::vector<Measure> standard_measures(std::size_t num_classes) {
    std::vector<Measure> out{{MeasureKind::acc, 0}};
    if (num_classes == 2) out.push_back({MeasureKind::auc, 0});
    for (std::size_t k = 0; k < num_classes; ++k) out.push_back({MeasureKind::recall, k});
    for (std::size_t k = 0; k < num_classes; ++k) out.push_back({MeasureKind::precision, k});
    return out;
}

MeasureSet measure_set(const Evaluation& eval, const std::vector<Measure>& measures,
                       const std::vector<std::string>& class_names) {
    MeasureSet out;
    for (const auto& m : measures) out.values.emplace_back(m.label(class_names), eval.value(m));
    return out;
}

const Summary* CvReport::sparse_summary(const std::string& measure) const {
    for (const auto& s : sparse) {
        if (s.measure == measure) return &s;
    }
    return nullptr;
}

const Summary* CvReport::classic_summary(const std::string& measure) const {
    for (const auto& s : classic) {
        if (s.measure == measure) return &s;
    }
    return nullptr;
}

std::uint64_t fold_seed(std::uint64_t master, int run, int fold) {
    return derive_seed(master, 0xf01dULL + static_cast<std::uint64_t>(run), static_cast<std::uint64_t>(fold));
}

namespace {

Summary summarize(const std::string& name, const std::vector<double>& xs) {
    Summary s;
    s.measure = name;
    s.count = xs.size();
    if (xs.empty()) return s;
    double sum = 0.0;
    for (double x : xs) sum += x;
    s.mean = sum / static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - s.mean) * (x - s.mean);
        s.sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    }
    return s;
}

std::vector<Summary> summarize_sets(const std::vector<FoldRecord>& folds, const std::vector<std::string>& labels,
                                    bool sparse) {
    std::vector<Summary> out;
    for (const auto& label : labels) {
        std::vector<double> xs;
        for (const auto& f : folds) {
            if (!f.ok) continue;
            if (auto v = (sparse ? f.sparse_test : f.classic_test).get(label)) xs.push_back(*v);
        }
        out.push_back(summarize(label, xs));
    }
    return out;
}

}  // namespace

CvReport cross_validated_run(const Dataset& ds, const SplitPlan& plan, const CvConfig& config) {
    CvReport report;
    report.num_features = ds.num_features();
    report.feature_names = ds.feature_names();
    report.class_names = ds.class_names();
    report.warnings = plan.warnings;
    if (config.search.objective.kind == MeasureKind::auc && ds.num_classes() != 2) {
        throw UsageError("auc objective requires a two-class dataset");
    }

    const auto measures = standard_measures(ds.num_classes());
    std::optional<BinMap> global_bins;
    if (!config.refit_bins_per_fold) global_bins = fit_mdlp(ds);

    for (int run = 0; run < plan.runs; ++run) {
        for (int fold = 0; fold < plan.folds; ++fold) {
            const auto started = std::chrono::steady_clock::now();
            FoldRecord rec;
            rec.run = run;
            rec.fold = fold;
            rec.seed = fold_seed(config.search.seed, run, fold);
            try {
                const auto& idx = plan.at(run, fold);
                const auto train = ds.rows(idx.train);
                const auto validation = ds.rows(idx.validation);
                const auto test = ds.rows(idx.test);
                const BinMap bins = global_bins ? *global_bins : fit_mdlp(train);
                const auto dtrain = transform(train, bins);
                const auto dval = transform(validation, bins);
                const auto dtest = transform(test, bins);

                const auto full = FeatureCombination::all(ds.num_features());
                FeatureCombination winner = full;
                if (config.baseline_only) {
                    rec.source = WinnerSource::full_set;
                    const CandidateEvaluator val_eval(dtrain, dval, config.search.alpha);
                    const auto e = val_eval.evaluate(full);
                    rec.validation_objective = e.value(config.search.objective);
                    rec.full_validation_objective = rec.validation_objective;
                    rec.validation_feasible = check_constraints(e, config.search.constraints).feasible;
                } else {
                    const auto dep = build_dependence_matrix(dtrain, config.search.threads);
                    const auto h = dissimilarity(dep);
                    rec.warnings.insert(rec.warnings.end(), dep.warnings.begin(), dep.warnings.end());
                    rec.warnings.insert(rec.warnings.end(), h.warnings.begin(), h.warnings.end());
                    const auto tree = cluster(h, config.linkage);

                    SearchConfig sc = config.search;
                    sc.seed = rec.seed;
                    if (!sc.q) sc.q = choose_q(dep);
                    auto sel = run_selection(dtrain, dval, tree, sc);
                    rec.q = *sc.q;
                    rec.cuts = sel.grid.cuts.size();
                    rec.draws = sel.audit.size();
                    rec.distinct_evaluated = sel.distinct_evaluated;
                    rec.source = sel.source;
                    rec.validation_feasible = sel.winner_constraints.feasible;
                    rec.validation_objective = sel.winner_objective;
                    rec.full_validation_objective = sel.full_objective;
                    winner = sel.winner;
                    rec.audit = std::move(sel.audit);
                }
                rec.winner = winner;

                const CandidateEvaluator test_eval(dtrain, dtest, config.search.alpha);
                rec.sparse_test = measure_set(test_eval.evaluate(winner), measures, ds.class_names());
                rec.classic_test = measure_set(test_eval.evaluate(full), measures, ds.class_names());
            } catch (const Error& e) {
                rec.ok = false;
                rec.error = e.what();
            }
            rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
            report.folds.push_back(std::move(rec));
        }
    }

    std::vector<std::string> labels;
    for (const auto& m : measures) labels.push_back(m.label(ds.class_names()));
    report.sparse = summarize_sets(report.folds, labels, true);
    report.classic = summarize_sets(report.folds, labels, false);
    std::vector<double> sizes;
    for (const auto& f : report.folds) {
        if (f.ok) sizes.push_back(static_cast<double>(f.winner.size()));
    }
    report.sparsity = summarize("sparsity", sizes);
    return report;
}

}  // namespace snb

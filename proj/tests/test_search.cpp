#include <doctest.h>

#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "helpers.hpp"
#include "snb/bayes.hpp"
#include "snb/error.hpp"
#include "snb/search.hpp"
#include "snb/synth.hpp"

using namespace snb;

namespace {

Partition sizes(const std::vector<std::size_t>& s) {
    Partition p;
    std::size_t next = 0;
    for (auto n : s) {
        std::vector<std::size_t> c;
        for (std::size_t i = 0; i < n; ++i) c.push_back(next++);
        p.clusters.push_back(c);
    }
    return p;
}

DependenceMatrix uniform_dependence(std::size_t p, double v) {
    DependenceMatrix d;
    d.m = SquareMatrix(p, v);
    for (std::size_t i = 0; i < p; ++i) d.m(i, i) = 0.0;
    d.m_star = v;
    return d;
}

struct Fold {
    DiscretizedDataset train;
    DiscretizedDataset validation;
};

Fold pair_fold(std::uint64_t seed) {
    PairConfig cfg;
    cfg.seed = seed;
    const auto ds = generate_gaussian_pair(cfg);
    const auto plan = make_split_plan(ds, 1, 10, seed);
    const auto train = ds.rows(plan.at(0, 0).train);
    const auto bins = fit_mdlp(train);
    return {transform(train, bins), transform(ds.rows(plan.at(0, 0).validation), bins)};
}

SearchConfig acc_config(double q, std::uint64_t seed) {
    SearchConfig c;
    c.q = q;
    c.seed = seed;
    return c;
}

}  // namespace

TEST_CASE("nc is the product of cluster sizes, saturated") {
    std::vector<std::size_t> aus(10, 1);
    aus.push_back(2);
    aus.push_back(2);
    CHECK(nc(sizes(aus), 25) == 4);
    CHECK(nc(sizes({1, 1, 1}), 25) == 1);
    CHECK(nc(sizes({3, 2}), 25) == 6);
    CHECK(nc(sizes({10, 10, 10}), 25) == 26);
}

TEST_CASE("sampling limits") {
    const auto singletons = sizes({1, 1, 1, 1});
    const auto all = sample_combinations(singletons, 25, 1.0, 1, 0);
    REQUIRE(all.size() == 1);
    CHECK(all[0].combo == FeatureCombination::all(4));
    CHECK(sample_combinations(sizes({3, 2, 2}), 25, 0.0, 1, 0).empty());
    CHECK(sample_combinations(sizes({3, 2, 2}), 5, 1.0, 1, 0).size() == 5);
    CHECK(sample_combinations(sizes({3, 2, 2}), 25, 1.0, 1, 0).size() == 12);
    CHECK_THROWS_AS(sample_combinations(singletons, 25, 1.5, 1, 0), UsageError);
}

TEST_CASE("sampled combinations take at most one feature per cluster") {
    const auto part = sizes({4, 3, 1, 2, 5});
    std::vector<std::size_t> owner;
    for (std::size_t c = 0; c < part.clusters.size(); ++c) {
        for (std::size_t i = 0; i < part.clusters[c].size(); ++i) owner.push_back(c);
    }
    for (std::uint64_t cut = 0; cut < 50; ++cut) {
        for (const auto& s : sample_combinations(part, 25, 0.5, 99, cut)) {
            std::set<std::size_t> seen;
            for (auto f : s.combo.indices()) CHECK(seen.insert(owner[f]).second);
        }
    }
}

TEST_CASE("sampling streams depend only on seed, cut and draw") {
    const auto part = sizes({2, 2, 3});
    const auto a = sample_combinations(part, 12, 0.5, 7, 3);
    const auto b = sample_combinations(part, 12, 0.5, 7, 3);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].combo == b[i].combo);
    const auto c = sample_combinations(part, 12, 0.5, 7, 4);
    bool differs = a.size() != c.size();
    for (std::size_t i = 0; !differs && i < a.size(); ++i) differs = !(a[i].combo == c[i].combo);
    CHECK(differs);
}

TEST_CASE("choose_q thresholds") {
    CHECK(choose_q(uniform_dependence(5, 0.5)) == kSparseQ);
    CHECK(choose_q(uniform_dependence(5, 0.0)) == kDenseQ);
    // p = 5 has 20 ordered off-diagonal entries; 4 above 0.1 is exactly 20%.
    auto d = uniform_dependence(5, 0.0);
    d.m(0, 1) = d.m(1, 0) = 0.2;
    d.m(2, 3) = d.m(3, 2) = 0.2;
    CHECK(choose_q(d) == kSparseQ);
    d.m(2, 3) = d.m(3, 2) = 0.1;
    CHECK(choose_q(d) == kDenseQ);
}

TEST_CASE("candidate evaluator agrees with fit and posterior") {
    std::mt19937_64 gen(4);
    const auto train = testing::random_discretized(6, 120, 3, 2, gen);
    const auto val = testing::random_discretized(6, 40, 3, 2, gen);
    const CandidateEvaluator ev(train, val, 1.0);
    const FeatureCombination combo({0, 2, 5});
    const auto model = fit(train, combo, 1.0);
    const auto s = ev.scores(combo);
    std::vector<int> pred;
    for (std::size_t r = 0; r < 40; ++r) {
        const auto want = log_scores(model, row_bins(val, r));
        CHECK(s[r * 2] == want[0]);
        CHECK(s[r * 2 + 1] == want[1]);
        pred.push_back(static_cast<int>(predict(model, row_bins(val, r))));
    }
    const auto e = ev.evaluate(combo);
    CHECK(e.cm.trace() == ConfusionMatrix::from_predictions(val.labels, pred, 2).trace());
}

TEST_CASE("tie rule prefers fewer features, then lexicographic order") {
    CHECK(better_candidate(80.0, FeatureCombination({1, 2, 3}), 80.0, FeatureCombination({0, 1, 2, 3, 4})));
    CHECK(better_candidate(80.0, FeatureCombination({0, 5}), 80.0, FeatureCombination({1, 2})));
    CHECK(better_candidate(81.0, FeatureCombination({0, 1, 2}), 80.0, FeatureCombination({1})));
    CHECK(better_candidate(0.0, FeatureCombination({0, 1, 2}), std::nullopt, FeatureCombination({1})));
}

TEST_CASE("winner never trails the full set without constraints") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto f = pair_fold(seed);
        const auto tree = cluster(dissimilarity(build_dependence_matrix(f.train)));
        const auto sel = run_selection(f.train, f.validation, tree, acc_config(0.6, seed));
        REQUIRE(sel.winner_objective.has_value());
        CHECK(*sel.winner_objective >= *sel.full_objective);
        CHECK(sel.source != WinnerSource::fallback);
        CHECK(sel.grid.cuts.size() == 3);
    }
}

TEST_CASE("full set wins when no draw is evaluated") {
    const auto f = pair_fold(3);
    const auto tree = cluster(dissimilarity(build_dependence_matrix(f.train)));
    const auto sel = run_selection(f.train, f.validation, tree, acc_config(0.0, 1));
    CHECK(sel.audit.empty());
    CHECK(sel.source == WinnerSource::full_set);
    CHECK(sel.winner == FeatureCombination::all(4));
    CHECK_THROWS_AS(run_selection(f.train, f.validation, tree, SearchConfig{}), UsageError);
}

TEST_CASE("infeasible constraints fall back to the least violation") {
    const auto f = pair_fold(2);
    const auto tree = cluster(dissimilarity(build_dependence_matrix(f.train)));
    auto cfg = acc_config(0.6, 2);
    cfg.constraints = parse_constraints("acc>99.9", f.train.class_names);
    const auto sel = run_selection(f.train, f.validation, tree, cfg);
    CHECK(sel.source == WinnerSource::fallback);
    CHECK_FALSE(sel.winner_constraints.feasible);
    const auto bf = brute_force(f.train, f.validation, cfg.objective, cfg.constraints);
    CHECK(bf.source == WinnerSource::fallback);
    for (const auto& row : bf.table) CHECK(row.constraints.total_violation >= 0.0);
    // The fallback minimises total violation, i.e. maximises accuracy here.
    double best = 0.0;
    for (const auto& row : bf.table) best = std::max(best, *row.objective);
    CHECK(*bf.best_objective == best);
}

TEST_CASE("brute force enumerates every subset once") {
    const auto f = pair_fold(5);
    const auto bf = brute_force(f.train, f.validation, Measure{}, ConstraintSpec{});
    REQUIRE(bf.table.size() == 15);
    CHECK(bf.table.front().combo == FeatureCombination({0}));
    CHECK(bf.table.back().combo == FeatureCombination::all(4));
    std::set<FeatureCombination> seen;
    for (const auto& r : bf.table) CHECK(seen.insert(r.combo).second);
    for (const auto& r : bf.table) CHECK(*bf.best_objective >= *r.objective);

    auto one = f.train;
    one.bins.resize(1);
    one.bin_counts.resize(1);
    auto one_val = f.validation;
    one_val.bins.resize(1);
    one_val.bin_counts.resize(1);
    const auto single = brute_force(one, one_val, Measure{}, ConstraintSpec{});
    CHECK(single.table.size() == 1);
    CHECK(single.best == FeatureCombination({0}));
    CHECK_THROWS_AS(brute_force(f.train, f.validation, Measure{}, ConstraintSpec{}, 1.0, 3), UsageError);
}

TEST_CASE("audit csv lists each draw") {
    const auto f = pair_fold(1);
    const auto tree = cluster(dissimilarity(build_dependence_matrix(f.train)));
    const auto sel = run_selection(f.train, f.validation, tree, acc_config(0.6, 1));
    std::ostringstream out;
    write_audit_csv(out, sel, f.train.feature_names);
    std::size_t lines = 0;
    for (char c : out.str()) lines += c == '\n';
    CHECK(lines == sel.audit.size() + 1);
    CHECK(sel.distinct_evaluated <= sel.audit.size() + 1);
}

TEST_CASE("cross-validated run aggregates every fold") {
    PairConfig cfg;
    cfg.n = 400;
    cfg.seed = 8;
    const auto ds = generate_gaussian_pair(cfg);
    const auto plan = make_split_plan(ds, 2, 5, 8);
    CvConfig cv;
    cv.search.seed = 8;
    const auto report = cross_validated_run(ds, plan, cv);
    REQUIRE(report.folds.size() == 10);
    for (const auto& f : report.folds) {
        CHECK(f.ok);
        CHECK(f.q == kDenseQ);
        CHECK(*f.validation_objective >= *f.full_validation_objective);
    }
    REQUIRE(report.sparse_summary("acc") != nullptr);
    CHECK(report.sparse_summary("acc")->count == 10);
    CHECK(report.classic_summary("auc") != nullptr);
    CHECK(report.sparsity.mean <= 4.0);

    cv.baseline_only = true;
    const auto base = cross_validated_run(ds, plan, cv);
    for (const auto& f : base.folds) CHECK(f.winner == FeatureCombination::all(4));
    CHECK(base.sparse_summary("acc")->mean == report.classic_summary("acc")->mean);
}

TEST_CASE("folds with an error are recorded, not fatal") {
    PairConfig pc;
    pc.n = 60;
    pc.seed = 1;
    const auto ds = generate_gaussian_pair(pc);
    // Second fold trains on class-1 rows only.
    SplitPlan plan;
    plan.runs = 1;
    plan.folds = 2;
    FoldIndices good;
    FoldIndices bad;
    for (std::size_t r = 0; r < 60; ++r) {
        (r < 40 ? good.train : r < 50 ? good.validation : good.test).push_back(r);
        if (ds.labels()[r] == 0 && bad.train.size() < 20) {
            bad.train.push_back(r);
        } else {
            (bad.validation.size() < 20 ? bad.validation : bad.test).push_back(r);
        }
    }
    plan.splits = {good, bad};
    const auto report = cross_validated_run(ds, plan, CvConfig{});
    REQUIRE(report.folds.size() == 2);
    CHECK(report.folds[0].ok);
    CHECK_FALSE(report.folds[1].ok);
    CHECK_FALSE(report.folds[1].error.empty());
    CHECK(report.sparse_summary("acc")->count == 1);
}

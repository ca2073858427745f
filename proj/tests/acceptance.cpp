// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "snb/bayes.hpp"
#include "snb/dataset.hpp"
#include "snb/dendrogram.hpp"
#include "snb/dependence.hpp"
#include "snb/discretize.hpp"
#include "snb/metrics.hpp"
#include "snb/report.hpp"
#include "snb/search.hpp"
#include "snb/synth.hpp"

using namespace snb;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void criterion(int id, const char* title, double budget_seconds, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < budget_seconds;
    const bool pass = o.pass && in_time;
    if (!pass) ++failures;
    std::printf("%s [%2d] %s: %s (%.2f s of %.0f s)\n", pass ? "PASS" : "FAIL", id, title, o.detail.c_str(), secs,
                budget_seconds);
    std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

Dataset australian() {
    return load_csv(SNB_DATA_DIR "/australian.csv", read_schema(SNB_DATA_DIR "/australian.schema"), "class");
}

SquareMatrix random_h(std::size_t p, std::mt19937_64& gen, int levels) {
    SquareMatrix h(p, 0.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = i + 1; j < p; ++j) {
            const double v = levels > 0 ? static_cast<double>(gen() % static_cast<unsigned>(levels)) / levels : u(gen);
            h(i, j) = h(j, i) = v;
        }
    }
    return h;
}

struct FoldData {
    DiscretizedDataset train;
    DiscretizedDataset validation;
    DiscretizedDataset test;
};

FoldData fold_data(const Dataset& ds, const SplitPlan& plan, int run, int fold) {
    const auto& idx = plan.at(run, fold);
    const auto train = ds.rows(idx.train);
    const auto bins = fit_mdlp(train);
    return {transform(train, bins), transform(ds.rows(idx.validation), bins), transform(ds.rows(idx.test), bins)};
}

CvReport cv(const Dataset& ds, int runs, int folds, std::uint64_t seed, const std::string& constraints = "",
            int threads = 1) {
    RunSettings s;
    s.constraints = constraints;
    s.runs = runs;
    s.folds = folds;
    s.seed = seed;
    s.threads = threads;
    return cross_validated_run(ds, make_split_plan(ds, runs, folds, seed), make_cv_config(s, ds));
}

void strip_timing(nlohmann::json& j) {
    if (j.is_object()) {
        j.erase("seconds");
        for (auto& [k, v] : j.items()) strip_timing(v);
    } else if (j.is_array()) {
        for (auto& v : j) strip_timing(v);
    }
}

}  // namespace

int main() {
    criterion(1, "MI matches direct summation on 1000 tables up to 6x6", 1.0, [] {
        std::mt19937_64 gen(1);
        double worst = 0.0;
        for (int t = 0; t < 1000; ++t) {
            const std::size_t R = 1 + gen() % 6;
            const std::size_t C = 1 + gen() % 6;
            ContingencyTable tab{R, C, std::vector<double>(R * C)};
            for (auto& c : tab.counts) c = gen() % 4 == 0 ? 0.0 : static_cast<double>(gen() % 50);
            const double want = std::max(0.0, oracle::mutual_information(tab.counts, R, C));
            worst = std::max(worst, std::abs(mutual_information(tab) - want));
        }
        return Outcome{worst <= 1e-12, fmt("max |diff| = %.3g", worst)};
    });

    criterion(2, "complete linkage equals per-step agglomeration oracle on 200 matrices", 5.0, [] {
        std::mt19937_64 gen(2);
        int mismatches = 0;
        for (int t = 0; t < 200; ++t) {
            const std::size_t p = 2 + gen() % 7;
            const auto h = random_h(p, gen, t % 4 == 3 ? 5 : 0);
            std::vector<std::vector<double>> rows(p, std::vector<double>(p));
            for (std::size_t i = 0; i < p; ++i) {
                for (std::size_t j = 0; j < p; ++j) rows[i][j] = h(i, j);
            }
            const auto got = cluster(h).merges;
            const auto want = oracle::complete_linkage(rows);
            bool same = got.size() == want.size();
            for (std::size_t i = 0; same && i < got.size(); ++i) {
                same = got[i].left == want[i].left && got[i].right == want[i].right && got[i].height == want[i].height;
            }
            mismatches += !same;
        }
        return Outcome{mismatches == 0, fmt("%d of 200 sequences differ", mismatches)};
    });

    criterion(3, "dissimilarity endpoints and cut-grid sizes", 10.0, [] {
        std::vector<std::string> bad;
        const auto ds = australian();
        const auto dep = build_dependence_matrix(transform(ds, fit_mdlp(ds)));
        const auto h = dissimilarity(dep);
        const std::size_t p = dep.m.size();
        for (std::size_t i = 0; i < p; ++i) {
            if (h.h(i, i) != 0.0) bad.push_back("diagonal");
            for (std::size_t j = 0; j < p; ++j) {
                if (h.h(i, j) < 0.0 || h.h(i, j) > 1.0) bad.push_back("range");
                if (i != j && dep.m(i, j) == dep.m_star && h.h(i, j) != 0.0) bad.push_back("max pair");
                if (i != j && dep.m(i, j) == 0.0 && h.h(i, j) != 1.0) bad.push_back("zero pair");
            }
        }
        DependenceMatrix toy;
        toy.m = SquareMatrix(2, 0.0);
        toy.m(0, 1) = toy.m(1, 0) = 0.2;
        toy.m_star = 0.8;
        if (dissimilarity(toy).h(0, 1) != 0.75) bad.push_back("0.8/0.2 arithmetic");
        toy.m = SquareMatrix(3, 0.0);
        toy.m_star = 0.0;
        const auto ones = dissimilarity(toy);
        if (ones.h(0, 2) != 1.0 || ones.warnings.empty()) bad.push_back("m_star = 0 convention");

        std::mt19937_64 gen(3);
        const auto c14 = cut_grid(cluster(random_h(14, gen, 0))).cuts.size();
        const auto c200 = cut_grid(cluster(random_h(200, gen, 0))).cuts.size();
        const auto c2 = cut_grid(cluster(random_h(2, gen, 0))).cuts.size();
        if (c14 != 13) bad.push_back("p=14");
        if (c200 != 100) bad.push_back("p=200");
        if (c2 != 1) bad.push_back("p=2");
        const auto aus = cut_grid(cluster(h)).cuts.size();
        std::string detail = fmt("p=14 -> %zu cuts, p=200 -> %zu, p=2 -> %zu; Australian tree -> %zu distinct", c14,
                                 c200, c2, aus);
        for (const auto& b : bad) detail += "; broken: " + b;
        return Outcome{bad.empty(), detail};
    });

    criterion(4, "10,000 draws: one feature per cluster, mean size near q x p", 5.0, [] {
        std::size_t same_cluster = 0;
        std::string detail;
        bool ok = true;
        struct Case {
            std::vector<std::size_t> sizes;
            double q;
        };
        // All-singleton partitions, where the expected size is exactly q * p, and
        // clustered ones, where p counts the clusters.
        const std::vector<Case> cases{{std::vector<std::size_t>(14, 1), 0.4},
                                      {std::vector<std::size_t>(100, 1), 0.6},
                                      {{2, 2, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1}, 0.4},
                                      {{5, 3, 3, 2, 4, 1, 7}, 0.6}};
        for (std::size_t ci = 0; ci < cases.size(); ++ci) {
            Partition part;
            std::vector<std::size_t> owner;
            for (std::size_t c = 0; c < cases[ci].sizes.size(); ++c) {
                std::vector<std::size_t> members;
                for (std::size_t i = 0; i < cases[ci].sizes[c]; ++i) {
                    members.push_back(owner.size());
                    owner.push_back(c);
                }
                part.clusters.push_back(members);
            }
            const double q = cases[ci].q;
            const std::size_t per_call = std::min<std::size_t>(nc(part, 25), 25);
            std::size_t draws = 0;
            double sum = 0.0;
            for (std::uint64_t cut = 0; draws < 10000; ++cut) {
                for (const auto& s : sample_combinations(part, 25, q, 4242 + ci, cut)) {
                    std::set<std::size_t> seen;
                    for (auto f : s.combo.indices()) same_cluster += !seen.insert(owner[f]).second;
                    sum += static_cast<double>(s.combo.size());
                }
                draws += per_call;
            }
            const double m = static_cast<double>(part.clusters.size());
            const double mean = sum / static_cast<double>(draws);
            const double se = std::sqrt(m * q * (1.0 - q) / static_cast<double>(draws));
            const double z = (mean - q * m) / se;
            ok = ok && std::abs(z) <= 3.0;
            detail += fmt("%s%zu clusters q=%.1f mean %.3f vs %.1f (z=%.2f)", ci ? "; " : "", part.clusters.size(), q,
                          mean, q * m, z);
        }
        return Outcome{ok && same_cluster == 0, fmt("%zu same-cluster pairs; ", same_cluster) + detail};
    });

    criterion(5, "winner >= full set on validation in 50 synthetic folds", 120.0, [] {
        int folds = 0;
        int held = 0;
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            BlockConfig cfg;
            cfg.p = 24;
            cfg.n = 600;
            cfg.rho = 0.1 + 0.15 * static_cast<double>(seed);
            cfg.seed = seed;
            const auto report = cv(generate_blocks(cfg), 1, 10, seed);
            for (const auto& f : report.folds) {
                ++folds;
                held += f.ok && *f.validation_objective >= *f.full_validation_objective;
            }
        }
        return Outcome{held == folds && folds == 50, fmt("%d of %d folds", held, folds)};
    });

    criterion(6, "exhaustive search dominates the sampler on the four-feature example", 60.0, [] {
        int held = 0;
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            PairConfig pc;
            pc.seed = seed;
            const auto ds = generate_gaussian_pair(pc);
            const auto plan = make_split_plan(ds, 1, 10, seed);
            const auto f = fold_data(ds, plan, 0, 0);
            const auto dep = build_dependence_matrix(f.train);
            SearchConfig sc;
            sc.seed = fold_seed(seed, 0, 0);
            sc.q = choose_q(dep);
            const auto sel = run_selection(f.train, f.validation, cluster(dissimilarity(dep)), sc);
            const auto bf = brute_force(f.train, f.validation, sc.objective, sc.constraints);
            held += *bf.best_objective >= *sel.winner_objective;
        }
        return Outcome{held == 10, fmt("%d of 10 seeds", held)};
    });

    criterion(7, "a strict subset beats the full set on test ACC in >= 7 of 10 seeds", 60.0, [] {
        int wins = 0;
        int ties = 0;
        std::string detail;
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            PairConfig pc;
            pc.seed = seed;
            const auto ds = generate_gaussian_pair(pc);
            const auto plan = make_split_plan(ds, 1, 10, seed);
            std::vector<double> mean(15, 0.0);
            std::vector<FeatureCombination> combos;
            for (int fold = 0; fold < 10; ++fold) {
                const auto f = fold_data(ds, plan, 0, fold);
                const auto table = brute_force(f.train, f.test, Measure{}, ConstraintSpec{}).table;
                for (std::size_t i = 0; i < table.size(); ++i) mean[i] += *table[i].objective / 10.0;
                if (combos.empty()) {
                    for (const auto& r : table) combos.push_back(r.combo);
                }
            }
            const double full = mean.back();
            std::size_t best = 0;
            for (std::size_t i = 1; i + 1 < mean.size(); ++i) {
                if (mean[i] > mean[best]) best = i;
            }
            const bool win = mean[best] > full;
            wins += win;
            ties += mean[best] == full;
            detail += fmt("%s%.2f/%.2f", seed > 1 ? " " : "", mean[best], full);
        }
        return Outcome{wins >= 7, fmt("%d of 10 seeds, %d exact ties (best subset/full: ", wins, ties) + detail + ")"};
    });

    criterion(8, "blocks p=100 rho=0.9: sparse beats classic by >= 3 points with <= 40 features", 600.0, [] {
        BlockConfig cfg;
        cfg.p = 100;
        cfg.n = 2000;
        cfg.rho = 0.9;
        cfg.seed = 7;
        const auto report = cv(generate_blocks(cfg), 2, 10, 7);
        const double sparse = report.sparse_summary("acc")->mean;
        const double classic = report.classic_summary("acc")->mean;
        const double size = report.sparsity.mean;
        return Outcome{sparse >= classic + 3.0 && size <= 40.0,
                       fmt("sparse %.2f vs classic %.2f, mean size %.1f", sparse, classic, size)};
    });

    criterion(9, "Australian 10x10: classic in [82, 89], sparse <= 9 features within 2.5 points", 300.0, [] {
        const auto report = cv(australian(), 10, 10, 1);
        const double sparse = report.sparse_summary("acc")->mean;
        const double classic = report.classic_summary("acc")->mean;
        const double size = report.sparsity.mean;
        const bool ok = classic >= 82.0 && classic <= 89.0 && size <= 9.0 && std::abs(sparse - classic) <= 2.5 &&
                        report.sparsity.count == 100;
        return Outcome{ok, fmt("classic %.2f, sparse %.2f with %.2f features", classic, sparse, size)};
    });

    criterion(10, "Australian recall:+>85: winners feasible or flagged, test Recall+ rises", 300.0, [] {
        const auto ds = australian();
        const auto plain = cv(ds, 10, 10, 1);
        const auto constrained = cv(ds, 10, 10, 1, "recall:+>85");
        int accounted = 0;
        int fallback = 0;
        for (const auto& f : constrained.folds) {
            const bool flagged = f.source == WinnerSource::fallback;
            fallback += flagged;
            accounted += f.ok && (f.validation_feasible || flagged);
        }
        const double before = plain.sparse_summary("recall:+")->mean;
        const double after = constrained.sparse_summary("recall:+")->mean;
        return Outcome{accounted == 100 && after > before,
                       fmt("%d of 100 folds accounted for (%d fallback); Recall+ %.2f -> %.2f", accounted, fallback,
                           before, after)};
    });

    criterion(11, "posteriors sum to 1, AUC equals ROC area, runs identical at 1/4/8 threads", 300.0, [] {
        std::mt19937_64 gen(11);
        double worst_sum = 0.0;
        std::size_t predictions = 0;
        while (predictions < 100000) {
            const std::size_t K = 2 + gen() % 4;
            const std::size_t p = 1 + gen() % 6;
            const std::size_t n = 20 + gen() % 80;
            DiscretizedDataset d;
            d.num_classes = K;
            d.labels.resize(n);
            for (std::size_t r = 0; r < n; ++r) d.labels[r] = static_cast<int>(r < K ? r : gen() % K);
            for (std::size_t f = 0; f < p; ++f) {
                const int b = 1 + static_cast<int>(gen() % 6);
                d.bin_counts.push_back(b);
                std::vector<int> col(n);
                for (auto& v : col) v = static_cast<int>(gen() % static_cast<unsigned>(b));
                d.bins.push_back(col);
            }
            const double alpha = std::pow(10.0, -6.0 + 7.0 * static_cast<double>(gen() % 1000) / 1000.0);
            const auto model = fit(d, FeatureCombination::all(p), alpha);
            for (int t = 0; t < 500; ++t, ++predictions) {
                std::vector<int> row(p);
                for (std::size_t f = 0; f < p; ++f) row[f] = static_cast<int>(gen() % static_cast<unsigned>(d.bin_counts[f]));
                double s = 0.0;
                for (double v : posterior(model, row)) s += v;
                worst_sum = std::max(worst_sum, std::abs(s - 1.0));
            }
        }

        double worst_auc = 0.0;
        for (int t = 0; t < 1000; ++t) {
            const std::size_t n = 2 + gen() % 200;
            std::vector<double> s(n);
            std::vector<int> y(n);
            const bool coarse = t % 2 == 0;
            for (std::size_t i = 0; i < n; ++i) {
                s[i] = coarse ? static_cast<double>(gen() % 8) / 8.0 : std::ldexp(static_cast<double>(gen() >> 11), -53);
                y[i] = static_cast<int>(gen() % 2);
            }
            y[0] = 0;
            y[1] = 1;
            worst_auc = std::max(worst_auc, std::abs(auc_binary(s, y) - oracle::trapezoid_auc(s, y, 1)));
        }

        const auto ds = australian();
        BlockConfig bc;
        bc.p = 30;
        bc.n = 500;
        bc.rho = 0.7;
        bc.seed = 5;
        const auto blocks = generate_blocks(bc);
        bool identical = true;
        for (const Dataset* data : {&ds, &blocks}) {
            std::string reference;
            for (int threads : {1, 4, 8}) {
                RunSettings s;
                s.runs = 2;
                s.folds = 5;
                s.seed = 3;
                s.threads = threads;
                const auto report =
                    cross_validated_run(*data, make_split_plan(*data, 2, 5, 3), make_cv_config(s, *data));
                auto j = report_to_json(report, s, data->num_rows());
                strip_timing(j);
                j["config"].erase("threads");
                const auto text = j.dump();
                if (reference.empty()) {
                    reference = text;
                } else {
                    identical = identical && text == reference;
                }
            }
        }
        return Outcome{worst_sum <= 1e-9 && worst_auc <= 1e-12 && identical,
                       fmt("%zu posteriors, max |sum - 1| = %.2g; max AUC diff %.2g; thread runs %s", predictions,
                           worst_sum, worst_auc, identical ? "identical" : "DIFFER")};
    });

    std::printf("%s: %d criteria failed\n", failures ? "FAIL" : "PASS", failures);
    return failures ? 1 : 0;
}

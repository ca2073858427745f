#include <doctest.h>

#include <sstream>

#include "snb/error.hpp"
#include "snb/report.hpp"
#include "snb/synth.hpp"

using namespace snb;

namespace {

Dataset small_pair() {
    PairConfig cfg;
    cfg.n = 300;
    cfg.seed = 2;
    return generate_gaussian_pair(cfg);
}

}  // namespace

TEST_CASE("settings resolve into a search configuration") {
    const auto ds = small_pair();
    RunSettings s;
    s.measure = "recall:2";
    s.constraints = "acc>50";
    s.q = "0.3";
    s.linkage = "single";
    s.discretize = "global";
    const auto cfg = make_cv_config(s, ds);
    CHECK(cfg.search.objective.kind == MeasureKind::recall);
    CHECK(cfg.search.objective.cls == 1);
    CHECK(cfg.search.constraints.items.size() == 1);
    CHECK(*cfg.search.q == 0.3);
    CHECK(cfg.linkage == Linkage::single);
    CHECK_FALSE(cfg.refit_bins_per_fold);
    CHECK_FALSE(make_cv_config(RunSettings{}, ds).search.q.has_value());
}

TEST_CASE("bad settings are usage errors") {
    const auto ds = small_pair();
    auto bad = [&](auto edit) {
        RunSettings s;
        edit(s);
        CHECK_THROWS_AS(make_cv_config(s, ds), UsageError);
    };
    bad([](RunSettings& s) { s.q = "1.2"; });
    bad([](RunSettings& s) { s.q = "often"; });
    bad([](RunSettings& s) { s.max_combos = 0; });
    bad([](RunSettings& s) { s.alpha = 0.0; });
    bad([](RunSettings& s) { s.threads = 0; });
    bad([](RunSettings& s) { s.discretize = "never"; });
    bad([](RunSettings& s) { s.measure = "recall:9"; });
}

TEST_CASE("report json carries folds and aggregates") {
    const auto ds = small_pair();
    RunSettings s;
    s.runs = 1;
    s.folds = 3;
    const auto report = cross_validated_run(ds, make_split_plan(ds, 1, 3, 1), make_cv_config(s, ds));
    const auto j = report_to_json(report, s, ds.num_rows());
    CHECK(j["tool"] == "snb");
    CHECK(j["dataset"]["rows"] == 300);
    CHECK(j["folds"].size() == 3);
    CHECK(j["folds"][0]["run"] == 1);
    CHECK(j["folds"][0]["test"]["sparse"].contains("acc"));
    REQUIRE(j["aggregate"]["sparse"].size() == j["aggregate"]["classic"].size());
    CHECK(j["aggregate"]["sparse"][0]["measure"] == "acc");
    CHECK(j["config"]["folds"] == 3);

    std::ostringstream csv;
    write_summary_csv(csv, report);
    CHECK(csv.str().rfind("model,measure,mean,sd,sparsity\n", 0) == 0);
    std::ostringstream audit;
    write_cv_audit_csv(audit, report);
    CHECK(audit.str().rfind("run,fold,", 0) == 0);
}

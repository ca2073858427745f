#include "snb/report.hpp"

#include <charconv>
#include <ostream>

#include "snb/error.hpp"

namespace snb {

namespace {

nlohmann::json opt(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }

nlohmann::json names_of(const FeatureCombination& c, const std::vector<std::string>& names) {
    auto out = nlohmann::json::array();
    for (auto f : c.indices()) out.push_back(f < names.size() ? names[f] : std::to_string(f + 1));
    return out;
}

nlohmann::json measures_json(const MeasureSet& m) {
    nlohmann::json out = nlohmann::json::object();
    for (const auto& [label, v] : m.values) out[label] = opt(v);
    return out;
}

nlohmann::json summary_json(const Summary& s) {
    return {{"measure", s.measure}, {"mean", s.mean}, {"sd", s.sd}, {"count", s.count}};
}

}  // namespace

nlohmann::json settings_to_json(const RunSettings& s) {
    return {{"data", s.data},
            {"schema", s.schema},
            {"label", s.label},
            {"missing", s.missing},
            {"measure", s.measure},
            {"constraint", s.constraints},
            {"cuts", s.cuts},
            {"max_combos", s.max_combos},
            {"q", s.q},
            {"alpha", s.alpha},
            {"runs", s.runs},
            {"folds", s.folds},
            {"seed", s.seed},
            {"threads", s.threads},
            {"linkage", s.linkage},
            {"stratify", s.stratify ? "on" : "off"},
            {"discretize", s.discretize},
            {"baseline", s.baseline}};
}

CvConfig make_cv_config(const RunSettings& s, const Dataset& ds) {
    CvConfig cfg;
    cfg.search.objective = parse_measure(s.measure, ds.class_names());
    cfg.search.constraints = parse_constraints(s.constraints, ds.class_names());
    if (s.cuts < 1) throw UsageError("--cuts must be >= 1");
    if (s.max_combos < 1) throw UsageError("--max-combos must be >= 1");
    cfg.search.max_cuts = s.cuts;
    cfg.search.max_combos = s.max_combos;
    if (s.q != "auto") {
        double q = 0.0;
        auto [ptr, ec] = std::from_chars(s.q.data(), s.q.data() + s.q.size(), q);
        if (ec != std::errc{} || ptr != s.q.data() + s.q.size() || !(q >= 0.0 && q <= 1.0)) {
            throw UsageError("--q must be 'auto' or a number in [0, 1]");
        }
        cfg.search.q = q;
    }
    if (!(s.alpha > 0.0)) throw UsageError("--alpha must be positive");
    cfg.search.alpha = s.alpha;
    cfg.search.seed = s.seed;
    if (s.threads < 1) throw UsageError("--threads must be >= 1");
    if (s.runs < 1) throw UsageError("--runs must be >= 1");
    cfg.search.threads = s.threads;
    cfg.linkage = parse_linkage(s.linkage);
    if (s.discretize != "fold" && s.discretize != "global") throw UsageError("--discretize must be fold or global");
    cfg.refit_bins_per_fold = s.discretize == "fold";
    cfg.baseline_only = s.baseline;
    return cfg;
}

nlohmann::json report_to_json(const CvReport& report, const RunSettings& settings, std::size_t num_rows) {
    nlohmann::json j;
    j["tool"] = "snb";
    j["version"] = kVersion;
    j["config"] = settings_to_json(settings);
    j["dataset"] = {{"rows", num_rows},
                    {"features", report.num_features},
                    {"feature_names", report.feature_names},
                    {"classes", report.class_names}};
    auto folds = nlohmann::json::array();
    for (const auto& f : report.folds) {
        nlohmann::json r;
        r["run"] = f.run + 1;
        r["fold"] = f.fold + 1;
        r["ok"] = f.ok;
        r["seed"] = f.seed;
        if (!f.ok) {
            r["error"] = f.error;
        } else {
            r["q"] = f.q;
            r["cuts"] = f.cuts;
            r["draws"] = f.draws;
            r["distinct_evaluated"] = f.distinct_evaluated;
            r["winner"] = names_of(f.winner, report.feature_names);
            r["winner_indices"] = f.winner.indices();
            r["winner_size"] = f.winner.size();
            r["winner_source"] = to_string(f.source);
            r["validation_feasible"] = f.validation_feasible;
            r["validation_objective"] = opt(f.validation_objective);
            r["full_validation_objective"] = opt(f.full_validation_objective);
            r["test"] = {{"sparse", measures_json(f.sparse_test)}, {"classic", measures_json(f.classic_test)}};
        }
        r["seconds"] = f.seconds;
        r["warnings"] = f.warnings;
        folds.push_back(std::move(r));
    }
    j["folds"] = std::move(folds);

    auto sparse = nlohmann::json::array();
    for (const auto& s : report.sparse) sparse.push_back(summary_json(s));
    auto classic = nlohmann::json::array();
    for (const auto& s : report.classic) classic.push_back(summary_json(s));
    j["aggregate"] = {{"sparse", sparse},
                      {"classic", classic},
                      {"sparsity", {{"mean", report.sparsity.mean},
                                    {"sd", report.sparsity.sd},
                                    {"count", report.sparsity.count}}}};
    j["warnings"] = report.warnings;
    return j;
}

void write_summary_csv(std::ostream& out, const CvReport& report) {
    out << "model,measure,mean,sd,sparsity\n";
    out.precision(10);
    for (const auto& s : report.classic) {
        out << "classic," << s.measure << ',' << s.mean << ',' << s.sd << ',' << report.num_features << '\n';
    }
    for (const auto& s : report.sparse) {
        out << "sparse," << s.measure << ',' << s.mean << ',' << s.sd << ',' << report.sparsity.mean << '\n';
    }
}

void write_cv_audit_csv(std::ostream& out, const CvReport& report) {
    out << "run,fold,cut_index,cut,draw,features,size,objective,feasible,total_violation\n";
    out.precision(17);
    for (const auto& f : report.folds) {
        for (const auto& c : f.audit) {
            out << f.run + 1 << ',' << f.fold + 1 << ',' << c.cut_index + 1 << ',' << c.cut << ',' << c.draw + 1
                << ",\"";
            bool first = true;
            for (auto idx : c.combo.indices()) {
                if (!first) out << ' ';
                first = false;
                out << report.feature_names[idx];
            }
            out << "\"," << c.combo.size() << ',';
            if (c.objective) out << *c.objective;
            out << ',' << (c.constraints.feasible ? "true" : "false") << ',' << c.constraints.total_violation << '\n';
        }
    }
}

nlohmann::json oracle_to_json(const BruteForceResult& oracle, const SelectionResult& sparse,
                              const std::vector<std::string>& feature_names, const std::string& objective) {
    nlohmann::json j;
    j["objective"] = objective;
    auto rows = nlohmann::json::array();
    for (const auto& s : oracle.table) {
        rows.push_back({{"features", names_of(s.combo, feature_names)},
                        {"objective", opt(s.objective)},
                        {"feasible", s.constraints.feasible}});
    }
    j["subsets"] = std::move(rows);
    j["brute_force"] = {{"features", names_of(oracle.best, feature_names)},
                        {"objective", opt(oracle.best_objective)},
                        {"source", to_string(oracle.source)}};
    j["sparse_nb"] = {{"features", names_of(sparse.winner, feature_names)},
                      {"objective", opt(sparse.winner_objective)},
                      {"source", to_string(sparse.source)},
                      {"q", sparse.q},
                      {"cuts", sparse.grid.cuts.size()},
                      {"draws", sparse.audit.size()}};
    const double bf = oracle.best_objective.value_or(-1.0);
    const double sn = sparse.winner_objective.value_or(-1.0);
    j["oracle_dominates"] = bf >= sn;
    return j;
}

}  // namespace snb

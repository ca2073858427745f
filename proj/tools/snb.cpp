// snb: batch front end for the sparse Naive Bayes selector.
//
//   snb select  --data FILE --label NAME [--measure acc] [--constraint SPEC] ...
//   snb synth   blocks|pair [--seed N] --out FILE
//   snb oracle  --data FILE --label NAME [--measure acc]
//   snb inspect --data FILE --label NAME --out-dir DIR

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "snb/dataset.hpp"
#include "snb/dependence.hpp"
#include "snb/dendrogram.hpp"
#include "snb/discretize.hpp"
#include "snb/error.hpp"
#include "snb/report.hpp"
#include "snb/search.hpp"
#include "snb/synth.hpp"

namespace {

constexpr int kDataError = 1;
constexpr int kUsageError = 2;

struct DataArgs {
    std::string data;
    std::string schema;
    std::string label = "class";
    std::string missing = "?";
};

void add_data_options(CLI::App* cmd, DataArgs& a) {
    cmd->add_option("--data", a.data, "CSV file with a header row")->required()->check(CLI::ExistingFile);
    cmd->add_option("--schema", a.schema, "column kinds, one 'name,kind' line each");
    cmd->add_option("--label", a.label, "label column name")->capture_default_str();
    cmd->add_option("--missing", a.missing, "missing-value marker")->capture_default_str();
}

snb::Dataset load(const DataArgs& a) {
    const snb::Schema schema = a.schema.empty() ? snb::Schema{} : snb::read_schema(a.schema);
    snb::CsvOptions opts;
    opts.missing_marker = a.missing;
    return snb::load_csv(a.data, schema, a.label, opts);
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw snb::Error("cannot write '" + path + "'");
    return out;
}

void write_json(const nlohmann::json& j, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << j.dump(2) << '\n';
    } else {
        auto out = open_out(path);
        out << j.dump(2) << '\n';
    }
}

void warn_all(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sparse Naive Bayes with dependence-guided feature selection"};
    app.require_subcommand(1);
    app.set_version_flag("--version", snb::kVersion);

    // select
    auto* select = app.add_subcommand("select", "cross-validated feature selection and evaluation");
    DataArgs select_data;
    snb::RunSettings settings;
    std::string out_path;
    std::string summary_path;
    std::string audit_path;
    std::string stratify = "on";
    add_data_options(select, select_data);
    select->add_option("--measure", settings.measure, "objective: acc | auc | recall:K | precision:K")
        ->capture_default_str();
    select->add_option("--constraint", settings.constraints, "e.g. 'recall:2>=92,acc>80'");
    select->add_option("--cuts", settings.cuts, "maximum dendrogram cuts C")->capture_default_str();
    select->add_option("--max-combos", settings.max_combos, "draws per cut S")->capture_default_str();
    select->add_option("--q", settings.q, "cluster inclusion probability or 'auto'")->capture_default_str();
    select->add_option("--alpha", settings.alpha, "additive smoothing")->capture_default_str();
    select->add_option("--runs", settings.runs, "cross-validation repetitions")->capture_default_str();
    select->add_option("--folds", settings.folds, "folds per run")->capture_default_str();
    select->add_option("--seed", settings.seed, "master seed")->capture_default_str();
    select->add_option("--threads", settings.threads, "worker threads")->capture_default_str();
    select->add_option("--linkage", settings.linkage, "complete | single | average")
        ->check(CLI::IsMember({"complete", "single", "average"}))
        ->capture_default_str();
    select->add_option("--stratify", stratify, "on | off")->check(CLI::IsMember({"on", "off"}))->capture_default_str();
    select->add_option("--discretize", settings.discretize, "fit bins per fold or once globally")
        ->check(CLI::IsMember({"fold", "global"}))
        ->capture_default_str();
    select->add_flag("--baseline", settings.baseline, "skip the search and score all features");
    select->add_option("--out", out_path, "JSON report path (default stdout)");
    select->add_option("--summary", summary_path, "CSV summary path");
    select->add_option("--audit", audit_path, "CSV audit trail of every sampled combination");

    // synth
    auto* synth = app.add_subcommand("synth", "write a synthetic dataset as CSV");
    synth->require_subcommand(1);
    auto* blocks = synth->add_subcommand("blocks", "block-correlated linear model, class = sign of response");
    snb::BlockConfig block_cfg;
    std::string blocks_out;
    blocks->add_option("--p", block_cfg.p, "features")->capture_default_str();
    blocks->add_option("--n", block_cfg.n, "rows")->capture_default_str();
    blocks->add_option("--rho", block_cfg.rho, "within-block correlation in [0, 1)")->capture_default_str();
    blocks->add_option("--noise-sd", block_cfg.noise_sd, "response noise sd")->capture_default_str();
    blocks->add_option("--seed", block_cfg.seed, "seed")->capture_default_str();
    blocks->add_option("--out", blocks_out, "CSV path")->required();
    auto* pair = synth->add_subcommand("pair", "four Gaussian features with one correlated pair");
    snb::PairConfig pair_cfg;
    std::string pair_out;
    pair->add_option("--n", pair_cfg.n, "rows")->capture_default_str();
    pair->add_option("--corr", pair_cfg.correlation, "correlation of X1 and X2")->capture_default_str();
    pair->add_option("--sd", pair_cfg.sd, "class-conditional sd")->capture_default_str();
    pair->add_option("--seed", pair_cfg.seed, "seed")->capture_default_str();
    pair->add_option("--out", pair_out, "CSV path")->required();

    // oracle
    auto* oracle = app.add_subcommand("oracle", "exhaustive subset search beside the sparse selector");
    DataArgs oracle_data;
    snb::RunSettings oracle_settings;
    std::string oracle_out;
    std::string oracle_table;
    std::size_t max_p = snb::kBruteForceMaxFeatures;
    add_data_options(oracle, oracle_data);
    oracle->add_option("--measure", oracle_settings.measure, "objective")->capture_default_str();
    oracle->add_option("--constraint", oracle_settings.constraints, "constraints");
    oracle->add_option("--q", oracle_settings.q, "q or 'auto'")->capture_default_str();
    oracle->add_option("--alpha", oracle_settings.alpha, "additive smoothing")->capture_default_str();
    oracle->add_option("--cuts", oracle_settings.cuts, "maximum cuts")->capture_default_str();
    oracle->add_option("--max-combos", oracle_settings.max_combos, "draws per cut")->capture_default_str();
    oracle->add_option("--folds", oracle_settings.folds, "folds; the first split of run 1 is used")
        ->capture_default_str();
    oracle->add_option("--seed", oracle_settings.seed, "seed")->capture_default_str();
    oracle->add_option("--max-p", max_p, "refuse above this many features")->capture_default_str();
    oracle->add_option("--out", oracle_out, "JSON path (default stdout)");
    oracle->add_option("--table", oracle_table, "CSV table of every subset");

    // inspect
    auto* inspect = app.add_subcommand("inspect", "export bins, dependence and dissimilarity matrices, dendrogram");
    DataArgs inspect_data;
    std::string out_dir;
    std::string inspect_linkage = "complete";
    add_data_options(inspect, inspect_data);
    inspect->add_option("--out-dir", out_dir, "output directory")->required();
    inspect->add_option("--linkage", inspect_linkage, "linkage")
        ->check(CLI::IsMember({"complete", "single", "average"}))
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsageError;
    }

    try {
        if (*select) {
            settings.data = select_data.data;
            settings.schema = select_data.schema;
            settings.label = select_data.label;
            settings.missing = select_data.missing;
            settings.stratify = stratify == "on";
            const auto ds = load(select_data);
            const auto cfg = snb::make_cv_config(settings, ds);
            const auto plan = snb::make_split_plan(ds, settings.runs, settings.folds, settings.seed, settings.stratify);
            const auto report = snb::cross_validated_run(ds, plan, cfg);
            warn_all(report.warnings);
            for (const auto& f : report.folds) {
                if (!f.ok) std::cerr << "warning: run " << f.run + 1 << " fold " << f.fold + 1 << " failed: " << f.error << '\n';
            }
            write_json(snb::report_to_json(report, settings, ds.num_rows()), out_path);
            if (!summary_path.empty()) {
                auto out = open_out(summary_path);
                snb::write_summary_csv(out, report);
            }
            if (!audit_path.empty()) {
                auto out = open_out(audit_path);
                snb::write_cv_audit_csv(out, report);
            }
        } else if (*synth) {
            if (*blocks) {
                const auto ds = snb::generate_blocks(block_cfg);
                auto out = open_out(blocks_out);
                snb::write_csv(out, ds);
            } else {
                const auto ds = snb::generate_gaussian_pair(pair_cfg);
                auto out = open_out(pair_out);
                snb::write_csv(out, ds);
            }
        } else if (*oracle) {
            oracle_settings.data = oracle_data.data;
            oracle_settings.label = oracle_data.label;
            const auto ds = load(oracle_data);
            if (ds.num_features() > max_p) {
                throw snb::UsageError("oracle refused: " + std::to_string(ds.num_features()) +
                                      " features exceed --max-p " + std::to_string(max_p));
            }
            auto cfg = snb::make_cv_config(oracle_settings, ds);
            const auto plan = snb::make_split_plan(ds, 1, oracle_settings.folds, oracle_settings.seed);
            warn_all(plan.warnings);
            const auto& idx = plan.at(0, 0);
            const auto train = ds.rows(idx.train);
            const auto bins = snb::fit_mdlp(train);
            const auto dtrain = snb::transform(train, bins);
            const auto dval = snb::transform(ds.rows(idx.validation), bins);
            const auto bf = snb::brute_force(dtrain, dval, cfg.search.objective, cfg.search.constraints,
                                             cfg.search.alpha, max_p, cfg.search.threads);
            const auto dep = snb::build_dependence_matrix(dtrain);
            const auto tree = snb::cluster(snb::dissimilarity(dep), cfg.linkage);
            cfg.search.seed = snb::fold_seed(oracle_settings.seed, 0, 0);
            if (!cfg.search.q) cfg.search.q = snb::choose_q(dep);
            const auto sel = snb::run_selection(dtrain, dval, tree, cfg.search);
            write_json(snb::oracle_to_json(bf, sel, ds.feature_names(), oracle_settings.measure), oracle_out);
            if (!oracle_table.empty()) {
                auto out = open_out(oracle_table);
                out << "features,objective,feasible\n";
                out.precision(10);
                const auto names = ds.feature_names();
                for (const auto& row : bf.table) {
                    out << '"';
                    for (std::size_t i = 0; i < row.combo.size(); ++i) out << (i ? " " : "") << names[row.combo.indices()[i]];
                    out << "\",";
                    if (row.objective) out << *row.objective;
                    out << ',' << (row.constraints.feasible ? "true" : "false") << '\n';
                }
            }
        } else if (*inspect) {
            const auto ds = load(inspect_data);
            std::filesystem::create_directories(out_dir);
            const auto dir = std::filesystem::path(out_dir);
            const auto bins = snb::fit_mdlp(ds);
            const auto disc = snb::transform(ds, bins);
            const auto dep = snb::build_dependence_matrix(disc);
            const auto h = snb::dissimilarity(dep);
            warn_all(dep.warnings);
            warn_all(h.warnings);
            const auto tree = snb::cluster(h, snb::parse_linkage(inspect_linkage));
            const auto names = ds.feature_names();
            {
                auto out = open_out((dir / "bins.json").string());
                out << bins.to_json().dump(2) << '\n';
            }
            {
                auto out = open_out((dir / "dependence.csv").string());
                snb::write_matrix_csv(out, dep.m, names);
            }
            {
                auto out = open_out((dir / "dissimilarity.csv").string());
                snb::write_matrix_csv(out, h.h, names);
            }
            {
                auto out = open_out((dir / "dendrogram.csv").string());
                snb::write_merges_csv(out, tree);
            }
            const auto grid = snb::cut_grid(tree);
            nlohmann::json summary{{"m_star", dep.m_star},
                                   {"q", snb::choose_q(dep)},
                                   {"cuts", grid.cuts},
                                   {"features", names}};
            auto out = open_out((dir / "summary.json").string());
            out << summary.dump(2) << '\n';
        }
    } catch (const snb::UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsageError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kDataError;
    }
    return 0;
}

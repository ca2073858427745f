#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "snb/search.hpp"

namespace snb {

inline constexpr const char* kVersion = "0.1.0";

/// Resolved settings of a `select` run, echoed into its report.
struct RunSettings {
    std::string data;
    std::string schema;
    std::string label = "class";
    std::string missing = "?";
    std::string measure = "acc";
    std::string constraints;
    std::size_t cuts = 100;
    std::size_t max_combos = 25;
    std::string q = "auto";
    double alpha = 1.0;
    int runs = 10;
    int folds = 10;
    std::uint64_t seed = 1;
    int threads = 1;
    std::string linkage = "complete";
    bool stratify = true;
    std::string discretize = "fold";
    bool baseline = false;
};

nlohmann::json settings_to_json(const RunSettings& s);

/// Builds the search/CV configuration a settings block describes.
CvConfig make_cv_config(const RunSettings& s, const Dataset& ds);

nlohmann::json report_to_json(const CvReport& report, const RunSettings& settings, std::size_t num_rows);

/// model,measure,mean,sd,sparsity
void write_summary_csv(std::ostream& out, const CvReport& report);

/// Per-fold audit trails stacked, prefixed with run and fold.
void write_cv_audit_csv(std::ostream& out, const CvReport& report);

nlohmann::json oracle_to_json(const BruteForceResult& oracle, const SelectionResult& sparse,
                              const std::vector<std::string>& feature_names, const std::string& objective);

}  // namespace snb

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace snb {

enum class FeatureKind { continuous, categorical };

const char* to_string(FeatureKind kind);
FeatureKind parse_feature_kind(const std::string& text);

/// One feature column. Continuous values use NaN as the missing marker;
/// categorical values are codes into `categories`, with -1 for missing.
struct FeatureColumn {
    std::string name;
    FeatureKind kind = FeatureKind::continuous;
    std::vector<double> numeric;
    std::vector<int> codes;
    std::vector<std::string> categories;
    /// Set when the loaded column held a missing value; row subsets keep it so
    /// every split reserves the same missing bin.
    bool allows_missing = false;

    static FeatureColumn continuous(std::string name, std::vector<double> values);
    /// Tokens equal to `missing` become missing; the alphabet is the sorted set of the rest.
    static FeatureColumn categorical(std::string name, const std::vector<std::string>& tokens,
                                     const std::string& missing = "?");

    std::size_t size() const { return kind == FeatureKind::continuous ? numeric.size() : codes.size(); }
    bool is_missing(std::size_t row) const;
    bool has_missing() const;
};

/// Rectangular table of features plus class labels in [0, K).
class Dataset {
public:
    /// Validates shape, K >= 2 and that every class occurs.
    Dataset(std::vector<FeatureColumn> features, std::vector<int> labels, std::vector<std::string> class_names);

    /// Builds class names from label tokens (numeric-aware sort order).
    static Dataset from_label_tokens(std::vector<FeatureColumn> features, const std::vector<std::string>& tokens);

    std::size_t num_features() const { return features_.size(); }
    std::size_t num_rows() const { return labels_.size(); }
    std::size_t num_classes() const { return class_names_.size(); }

    const FeatureColumn& feature(std::size_t i) const { return features_.at(i); }
    const std::vector<FeatureColumn>& features() const { return features_; }
    const std::vector<int>& labels() const { return labels_; }
    const std::vector<std::string>& class_names() const { return class_names_; }
    std::vector<std::string> feature_names() const;

    /// Class index by name, or by 1-based position when no class has that name.
    std::optional<int> find_class(const std::string& token) const;

    std::vector<std::size_t> class_counts() const;

    /// Row subset; keeps the schema (alphabets, class names). Classes may be absent.
    Dataset rows(std::span<const std::size_t> indices) const;

private:
    struct Unchecked {};
    Dataset(Unchecked, std::vector<FeatureColumn> features, std::vector<int> labels,
            std::vector<std::string> class_names);

    std::vector<FeatureColumn> features_;
    std::vector<int> labels_;
    std::vector<std::string> class_names_;
};

/// Column-kind declarations, one `name,kind` line each.
using Schema = std::map<std::string, FeatureKind>;

Schema read_schema(const std::string& path);
Schema parse_schema(std::istream& in);

struct CsvOptions {
    std::string missing_marker = "?";
    char delimiter = ',';
};

/// RFC-4180 reader: quoted fields, doubled quotes, CRLF tolerated.
std::vector<std::vector<std::string>> read_csv_records(std::istream& in, char delimiter = ',');

Dataset load_csv(const std::string& path, const Schema& schema, const std::string& label_column,
                 const CsvOptions& options = {});
Dataset parse_csv(std::istream& in, const Schema& schema, const std::string& label_column,
                  const CsvOptions& options = {});

/// Writes features then a label column; doubles in shortest round-trip form.
void write_csv(std::ostream& out, const Dataset& ds, const std::string& label_column = "class",
               const std::string& missing_marker = "?");

std::string format_double(double v);

struct FoldIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> validation;
    std::vector<std::size_t> test;
};

/// Runs x folds of disjoint (train, validation, test) index sets.
struct SplitPlan {
    int runs = 0;
    int folds = 0;
    std::uint64_t seed = 0;
    bool stratified = true;
    std::vector<FoldIndices> splits;  // run-major
    std::vector<std::string> warnings;

    const FoldIndices& at(int run, int fold) const {
        return splits.at(static_cast<std::size_t>(run) * static_cast<std::size_t>(folds) + static_cast<std::size_t>(fold));
    }
};

/// Test = one fold; the rest splits 2:1 into train:validation, rounding toward train.
SplitPlan make_split_plan(const Dataset& ds, int runs, int folds, std::uint64_t seed, bool stratify = true);

}  // namespace snb

#include "snb/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include "snb/error.hpp"
#include "snb/random.hpp"

namespace snb {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::optional<double> parse_real(const std::string& text) {
    const std::string t = trim(text);
    if (t.empty()) return std::nullopt;
    double v = 0.0;
    const char* begin = t.data();
    const char* end = t.data() + t.size();
    if (*begin == '+') ++begin;
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc{} || ptr != end || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::vector<std::string> sorted_alphabet(const std::vector<std::string>& tokens) {
    std::set<std::string> uniq(tokens.begin(), tokens.end());
    std::vector<std::string> out(uniq.begin(), uniq.end());
    bool numeric = !out.empty();
    for (const auto& t : out) {
        if (!parse_real(t)) {
            numeric = false;
            break;
        }
    }
    if (numeric) {
        std::stable_sort(out.begin(), out.end(), [](const std::string& a, const std::string& b) {
            return *parse_real(a) < *parse_real(b);
        });
    }
    return out;
}

}  // namespace

const char* to_string(FeatureKind kind) {
    return kind == FeatureKind::continuous ? "continuous" : "categorical";
}

FeatureKind parse_feature_kind(const std::string& text) {
    const std::string t = trim(text);
    if (t == "continuous" || t == "numeric" || t == "real") return FeatureKind::continuous;
    if (t == "categorical" || t == "nominal" || t == "discrete") return FeatureKind::categorical;
    throw SchemaError("unknown column kind '" + t + "'");
}

FeatureColumn FeatureColumn::continuous(std::string name, std::vector<double> values) {
    for (double v : values) {
        if (std::isinf(v)) throw ValidationError("continuous column '" + name + "' holds a non-finite value");
    }
    FeatureColumn col;
    col.name = std::move(name);
    col.kind = FeatureKind::continuous;
    col.numeric = std::move(values);
    col.allows_missing = col.has_missing();
    return col;
}

FeatureColumn FeatureColumn::categorical(std::string name, const std::vector<std::string>& tokens,
                                         const std::string& missing) {
    std::vector<std::string> present;
    present.reserve(tokens.size());
    for (const auto& t : tokens) {
        if (t != missing) present.push_back(t);
    }
    FeatureColumn col;
    col.name = std::move(name);
    col.kind = FeatureKind::categorical;
    col.categories = sorted_alphabet(present);
    std::map<std::string, int> index;
    for (std::size_t i = 0; i < col.categories.size(); ++i) index[col.categories[i]] = static_cast<int>(i);
    col.codes.reserve(tokens.size());
    for (const auto& t : tokens) col.codes.push_back(t == missing ? -1 : index.at(t));
    col.allows_missing = col.has_missing();
    return col;
}

bool FeatureColumn::is_missing(std::size_t row) const {
    return kind == FeatureKind::continuous ? std::isnan(numeric[row]) : codes[row] < 0;
}

bool FeatureColumn::has_missing() const {
    for (std::size_t r = 0; r < size(); ++r) {
        if (is_missing(r)) return true;
    }
    return false;
}

Dataset::Dataset(Unchecked, std::vector<FeatureColumn> features, std::vector<int> labels,
                 std::vector<std::string> class_names)
    : features_(std::move(features)), labels_(std::move(labels)), class_names_(std::move(class_names)) {}

Dataset::Dataset(std::vector<FeatureColumn> features, std::vector<int> labels, std::vector<std::string> class_names)
    : Dataset(Unchecked{}, std::move(features), std::move(labels), std::move(class_names)) {
    if (labels_.empty()) throw ValidationError("dataset has no rows");
    if (class_names_.size() < 2) throw ValidationError("dataset needs at least two classes");
    for (const auto& f : features_) {
        if (f.size() != labels_.size()) {
            throw ValidationError("column '" + f.name + "' length differs from the label column");
        }
    }
    std::vector<std::size_t> counts(class_names_.size(), 0);
    for (int y : labels_) {
        if (y < 0 || static_cast<std::size_t>(y) >= class_names_.size()) throw ValidationError("label out of range");
        ++counts[static_cast<std::size_t>(y)];
    }
    for (std::size_t k = 0; k < counts.size(); ++k) {
        if (counts[k] == 0) throw ValidationError("class '" + class_names_[k] + "' has no rows");
    }
}

Dataset Dataset::from_label_tokens(std::vector<FeatureColumn> features, const std::vector<std::string>& tokens) {
    auto names = sorted_alphabet(tokens);
    if (names.size() < 2) {
        throw ValidationError("label column has " + std::to_string(names.size()) + " distinct value(s); need >= 2");
    }
    std::map<std::string, int> index;
    for (std::size_t i = 0; i < names.size(); ++i) index[names[i]] = static_cast<int>(i);
    std::vector<int> labels;
    labels.reserve(tokens.size());
    for (const auto& t : tokens) labels.push_back(index.at(t));
    return Dataset(std::move(features), std::move(labels), std::move(names));
}

std::vector<std::string> Dataset::feature_names() const {
    std::vector<std::string> out;
    out.reserve(features_.size());
    for (const auto& f : features_) out.push_back(f.name);
    return out;
}

std::optional<int> Dataset::find_class(const std::string& token) const {
    for (std::size_t k = 0; k < class_names_.size(); ++k) {
        if (class_names_[k] == token) return static_cast<int>(k);
    }
    int pos = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), pos);
    if (ec == std::errc{} && ptr == token.data() + token.size() && pos >= 1 &&
        static_cast<std::size_t>(pos) <= class_names_.size()) {
        return pos - 1;
    }
    return std::nullopt;
}

std::vector<std::size_t> Dataset::class_counts() const {
    std::vector<std::size_t> counts(class_names_.size(), 0);
    for (int y : labels_) ++counts[static_cast<std::size_t>(y)];
    return counts;
}

Dataset Dataset::rows(std::span<const std::size_t> indices) const {
    std::vector<FeatureColumn> cols;
    cols.reserve(features_.size());
    for (const auto& f : features_) {
        FeatureColumn c;
        c.name = f.name;
        c.kind = f.kind;
        c.categories = f.categories;
        c.allows_missing = f.allows_missing;
        if (f.kind == FeatureKind::continuous) {
            c.numeric.reserve(indices.size());
            for (auto r : indices) c.numeric.push_back(f.numeric.at(r));
        } else {
            c.codes.reserve(indices.size());
            for (auto r : indices) c.codes.push_back(f.codes.at(r));
        }
        cols.push_back(std::move(c));
    }
    std::vector<int> labels;
    labels.reserve(indices.size());
    for (auto r : indices) labels.push_back(labels_.at(r));
    return Dataset(Unchecked{}, std::move(cols), std::move(labels), class_names_);
}

Schema parse_schema(std::istream& in) {
    Schema schema;
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto comma = t.rfind(',');
        if (comma == std::string::npos) throw ParseError("schema line must be 'name,kind'", row, 1);
        schema[trim(t.substr(0, comma))] = parse_feature_kind(t.substr(comma + 1));
    }
    return schema;
}

Schema read_schema(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open schema file '" + path + "'");
    return parse_schema(in);
}

std::vector<std::vector<std::string>> read_csv_records(std::istream& in, char delimiter) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;
    std::size_t row = 1;
    std::size_t col = 1;
    char ch = 0;

    auto end_field = [&] {
        record.push_back(std::move(field));
        field.clear();
        field_started = false;
        ++col;
    };
    auto end_record = [&] {
        end_field();
        if (!(record.size() == 1 && record.front().empty())) records.push_back(std::move(record));
        record.clear();
        ++row;
        col = 1;
    };

    while (in.get(ch)) {
        if (in_quotes) {
            if (ch == '"') {
                if (in.peek() == '"') {
                    in.get(ch);
                    field.push_back('"');
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(ch);
            }
            continue;
        }
        if (ch == '"') {
            if (field_started && !trim(field).empty()) throw ParseError("quote inside unquoted field", row, col);
            field.clear();
            in_quotes = true;
            field_started = true;
        } else if (ch == delimiter) {
            end_field();
        } else if (ch == '\n') {
            end_record();
        } else if (ch == '\r') {
            if (in.peek() == '\n') in.get(ch);
            end_record();
        } else {
            field.push_back(ch);
            field_started = true;
        }
    }
    if (in_quotes) throw ParseError("unterminated quoted field", row, col);
    if (field_started || !record.empty()) end_record();
    return records;
}

Dataset parse_csv(std::istream& in, const Schema& schema, const std::string& label_column,
                  const CsvOptions& options) {
    auto records = read_csv_records(in, options.delimiter);
    if (records.empty()) throw ParseError("missing header row", 1, 1);
    std::vector<std::string> header;
    for (const auto& h : records.front()) header.push_back(trim(h));

    const auto label_it = std::find(header.begin(), header.end(), label_column);
    if (label_it == header.end()) throw SchemaError("label column '" + label_column + "' not found in header");
    const auto label_pos = static_cast<std::size_t>(label_it - header.begin());
    for (const auto& [name, kind] : schema) {
        if (std::find(header.begin(), header.end(), name) == header.end()) {
            throw SchemaError("schema declares column '" + name + "' absent from header");
        }
    }

    std::vector<std::size_t> kept;
    for (std::size_t r = 1; r < records.size(); ++r) {
        if (records[r].size() != header.size()) {
            throw ParseError("expected " + std::to_string(header.size()) + " fields, found " +
                                 std::to_string(records[r].size()),
                             r + 1, std::min(records[r].size(), header.size()) + 1);
        }
        const std::string lab = trim(records[r][label_pos]);
        if (lab.empty() || lab == options.missing_marker) continue;
        kept.push_back(r);
    }
    if (kept.empty()) throw ValidationError("no labelled rows");

    std::vector<FeatureColumn> features;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (c == label_pos) continue;
        std::vector<std::string> tokens;
        tokens.reserve(kept.size());
        for (auto r : kept) tokens.push_back(trim(records[r][c]));

        FeatureKind kind;
        if (auto it = schema.find(header[c]); it != schema.end()) {
            kind = it->second;
        } else {
            bool all_numeric = true;
            for (const auto& t : tokens) {
                if (t != options.missing_marker && !t.empty() && !parse_real(t)) {
                    all_numeric = false;
                    break;
                }
            }
            kind = all_numeric ? FeatureKind::continuous : FeatureKind::categorical;
        }

        if (kind == FeatureKind::continuous) {
            std::vector<double> values;
            values.reserve(tokens.size());
            for (std::size_t i = 0; i < tokens.size(); ++i) {
                const auto& t = tokens[i];
                if (t.empty() || t == options.missing_marker) {
                    values.push_back(std::numeric_limits<double>::quiet_NaN());
                    continue;
                }
                auto v = parse_real(t);
                if (!v) throw ParseError("non-numeric value '" + t + "' in continuous column", kept[i] + 1, c + 1);
                values.push_back(*v);
            }
            features.push_back(FeatureColumn::continuous(header[c], std::move(values)));
        } else {
            for (auto& t : tokens) {
                if (t.empty()) t = options.missing_marker;
            }
            features.push_back(FeatureColumn::categorical(header[c], tokens, options.missing_marker));
        }
    }

    std::vector<std::string> labels;
    labels.reserve(kept.size());
    for (auto r : kept) labels.push_back(trim(records[r][label_pos]));
    return Dataset::from_label_tokens(std::move(features), labels);
}

Dataset load_csv(const std::string& path, const Schema& schema, const std::string& label_column,
                 const CsvOptions& options) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open data file '" + path + "'");
    return parse_csv(in, schema, label_column, options);
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

namespace {

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

}  // namespace

void write_csv(std::ostream& out, const Dataset& ds, const std::string& label_column,
               const std::string& missing_marker) {
    for (const auto& f : ds.features()) out << csv_escape(f.name) << ',';
    out << csv_escape(label_column) << '\n';
    for (std::size_t r = 0; r < ds.num_rows(); ++r) {
        for (const auto& f : ds.features()) {
            if (f.is_missing(r)) {
                out << missing_marker;
            } else if (f.kind == FeatureKind::continuous) {
                out << format_double(f.numeric[r]);
            } else {
                out << csv_escape(f.categories[static_cast<std::size_t>(f.codes[r])]);
            }
            out << ',';
        }
        out << csv_escape(ds.class_names()[static_cast<std::size_t>(ds.labels()[r])]) << '\n';
    }
}

SplitPlan make_split_plan(const Dataset& ds, int runs, int folds, std::uint64_t seed, bool stratify) {
    const std::size_t n = ds.num_rows();
    if (runs < 1) throw UsageError("runs must be >= 1");
    if (folds < 2) throw UsageError("folds must be >= 2");
    if (n < static_cast<std::size_t>(folds)) throw UsageError("fewer rows than folds");

    SplitPlan plan;
    plan.runs = runs;
    plan.folds = folds;
    plan.seed = seed;
    plan.stratified = stratify;

    const auto counts = ds.class_counts();
    if (stratify) {
        for (std::size_t k = 0; k < counts.size(); ++k) {
            if (counts[k] < static_cast<std::size_t>(folds)) {
                plan.warnings.push_back("class '" + ds.class_names()[k] + "' has " + std::to_string(counts[k]) +
                                        " rows, fewer than " + std::to_string(folds) +
                                        " folds; stratification is best effort");
            }
        }
    }

    for (int run = 0; run < runs; ++run) {
        Rng rng(derive_seed(seed, 0x5eed'f01dULL, static_cast<std::uint64_t>(run)));
        // Order rows class by class (each class shuffled) so that dealing
        // positions round-robin stratifies every fold.
        std::vector<std::size_t> order;
        order.reserve(n);
        if (stratify) {
            for (std::size_t k = 0; k < counts.size(); ++k) {
                std::vector<std::size_t> members;
                for (std::size_t r = 0; r < n; ++r) {
                    if (static_cast<std::size_t>(ds.labels()[r]) == k) members.push_back(r);
                }
                rng.shuffle(std::span<std::size_t>(members));
                order.insert(order.end(), members.begin(), members.end());
            }
        } else {
            order.resize(n);
            std::iota(order.begin(), order.end(), std::size_t{0});
            rng.shuffle(std::span<std::size_t>(order));
        }

        const auto nfolds = static_cast<std::size_t>(folds);
        for (std::size_t f = 0; f < nfolds; ++f) {
            FoldIndices idx;
            std::size_t t = 0;
            for (std::size_t pos = 0; pos < n; ++pos) {
                const std::size_t row = order[pos];
                if (pos % nfolds == f) {
                    idx.test.push_back(row);
                } else {
                    (t % 3 == 2 ? idx.validation : idx.train).push_back(row);
                    ++t;
                }
            }
            std::sort(idx.train.begin(), idx.train.end());
            std::sort(idx.validation.begin(), idx.validation.end());
            std::sort(idx.test.begin(), idx.test.end());
            plan.splits.push_back(std::move(idx));
        }
    }
    return plan;
}

}  // namespace snb

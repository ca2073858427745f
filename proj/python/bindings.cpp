#include <sstream>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "snb/dataset.hpp"
#include "snb/dendrogram.hpp"
#include "snb/dependence.hpp"
#include "snb/discretize.hpp"
#include "snb/error.hpp"
#include "snb/metrics.hpp"
#include "snb/report.hpp"
#include "snb/search.hpp"
#include "snb/synth.hpp"

namespace py = pybind11;

namespace {

snb::Dataset load(const std::string& data, const std::string& label, const std::string& schema,
                  const std::string& missing) {
    snb::CsvOptions opts;
    opts.missing_marker = missing;
    return snb::load_csv(data, schema.empty() ? snb::Schema{} : snb::read_schema(schema), label, opts);
}

std::string run_select(const std::string& data, const std::string& label, const std::string& schema,
                       const std::string& measure, const std::string& constraints, std::size_t cuts,
                       std::size_t max_combos, const std::string& q, double alpha, int runs, int folds,
                       std::uint64_t seed, int threads, const std::string& linkage, bool stratify,
                       const std::string& discretize, bool baseline, const std::string& missing) {
    snb::RunSettings s;
    s.data = data;
    s.schema = schema;
    s.label = label;
    s.missing = missing;
    s.measure = measure;
    s.constraints = constraints;
    s.cuts = cuts;
    s.max_combos = max_combos;
    s.q = q;
    s.alpha = alpha;
    s.runs = runs;
    s.folds = folds;
    s.seed = seed;
    s.threads = threads;
    s.linkage = linkage;
    s.stratify = stratify;
    s.discretize = discretize;
    s.baseline = baseline;
    const auto ds = load(data, label, schema, missing);
    const auto cfg = snb::make_cv_config(s, ds);
    const auto plan = snb::make_split_plan(ds, runs, folds, seed, stratify);
    snb::CvReport report;
    {
        py::gil_scoped_release release;
        report = snb::cross_validated_run(ds, plan, cfg);
    }
    return snb::report_to_json(report, s, ds.num_rows()).dump();
}

std::string dataset_csv(const snb::Dataset& ds) {
    std::ostringstream out;
    snb::write_csv(out, ds);
    return out.str();
}

std::vector<std::vector<double>> to_rows(const snb::SquareMatrix& m) {
    std::vector<std::vector<double>> rows(m.size(), std::vector<double>(m.size()));
    for (std::size_t i = 0; i < m.size(); ++i) {
        for (std::size_t j = 0; j < m.size(); ++j) rows[i][j] = m(i, j);
    }
    return rows;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Sparse Naive Bayes core";
    m.attr("__version__") = snb::kVersion;

    py::register_exception<snb::Error>(m, "SnbError", PyExc_RuntimeError);
    py::register_exception<snb::UsageError>(m, "UsageError", PyExc_ValueError);

    m.def("select", &run_select, py::arg("data"), py::arg("label") = "class", py::arg("schema") = "",
          py::arg("measure") = "acc", py::arg("constraints") = "", py::arg("cuts") = 100,
          py::arg("max_combos") = 25, py::arg("q") = "auto", py::arg("alpha") = 1.0, py::arg("runs") = 10,
          py::arg("folds") = 10, py::arg("seed") = 1, py::arg("threads") = 1, py::arg("linkage") = "complete",
          py::arg("stratify") = true, py::arg("discretize") = "fold", py::arg("baseline") = false,
          py::arg("missing") = "?", "Run cross-validated selection; returns the report as a JSON string.");

    m.def("mutual_information",
          [](const std::vector<int>& x, const std::vector<int>& y) { return snb::mutual_information(x, y); },
          py::arg("x"), py::arg("y"), "Plug-in mutual information (nats) of two coded sequences.");

    m.def("auc", [](const std::vector<double>& scores, const std::vector<int>& labels,
                    int positive) { return snb::auc_binary(scores, labels, positive); },
          py::arg("scores"), py::arg("labels"), py::arg("positive") = 1);

    m.def("mdlp_cuts",
          [](const std::vector<double>& values, const std::vector<int>& labels, std::size_t k) {
              return snb::mdlp_cuts(values, labels, k);
          },
          py::arg("values"), py::arg("labels"), py::arg("num_classes"));

    m.def("cluster",
          [](const std::vector<std::vector<double>>& h, const std::string& linkage) {
              snb::SquareMatrix mat(h.size(), 0.0);
              for (std::size_t i = 0; i < h.size(); ++i) {
                  if (h[i].size() != h.size()) throw snb::ValidationError("dissimilarity matrix must be square");
                  for (std::size_t j = 0; j < h.size(); ++j) mat(i, j) = h[i][j];
              }
              const auto d = snb::cluster(mat, snb::parse_linkage(linkage));
              std::vector<std::tuple<std::size_t, std::size_t, double, std::size_t>> out;
              for (const auto& mg : d.merges) out.emplace_back(mg.left, mg.right, mg.height, mg.size);
              return out;
          },
          py::arg("h"), py::arg("linkage") = "complete",
          "Agglomerative clustering; returns (left, right, height, size) per merge.");

    m.def("dependence",
          [](const std::string& data, const std::string& label, const std::string& schema,
             const std::string& missing) {
              const auto ds = load(data, label, schema, missing);
              const auto disc = snb::transform(ds, snb::fit_mdlp(ds));
              const auto dep = snb::build_dependence_matrix(disc);
              const auto h = snb::dissimilarity(dep);
              py::dict out;
              out["features"] = ds.feature_names();
              out["m"] = to_rows(dep.m);
              out["m_star"] = dep.m_star;
              out["h"] = to_rows(h.h);
              out["q"] = snb::choose_q(dep);
              return out;
          },
          py::arg("data"), py::arg("label") = "class", py::arg("schema") = "", py::arg("missing") = "?",
          "Class-conditional dependence and dissimilarity matrices of a CSV file.");

    m.def("synth_blocks",
          [](std::size_t p, std::size_t n, double rho, double noise_sd, std::uint64_t seed) {
              snb::BlockConfig c;
              c.p = p;
              c.n = n;
              c.rho = rho;
              c.noise_sd = noise_sd;
              c.seed = seed;
              return dataset_csv(snb::generate_blocks(c));
          },
          py::arg("p") = 100, py::arg("n") = 2000, py::arg("rho") = 0.5, py::arg("noise_sd") = 2.5,
          py::arg("seed") = 0, "Block-correlated synthetic data as CSV text.");

    m.def("synth_pair",
          [](std::size_t n, double correlation, double sd, std::uint64_t seed) {
              snb::PairConfig c;
              c.n = n;
              c.correlation = correlation;
              c.sd = sd;
              c.seed = seed;
              return dataset_csv(snb::generate_gaussian_pair(c));
          },
          py::arg("n") = 2000, py::arg("correlation") = 0.95, py::arg("sd") = 2.25, py::arg("seed") = 0,
          "Four-feature Gaussian data with one correlated pair, as CSV text.");
}

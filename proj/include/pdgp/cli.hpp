#pragma once

#include <cstdio>
#include <filesystem>
#include <future>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "pdgp/divisive.hpp"
#include "pdgp/errors.hpp"
#include "pdgp/eval.hpp"
#include "pdgp/io.hpp"
#include "pdgp/weighting.hpp"

namespace pdgp::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kData = 3, kNumerical = 4 };

inline int exit_code(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::Usage: return kUsage;
    case ErrorCategory::Data: return kData;
    case ErrorCategory::Numerical: return kNumerical;
  }
  return kData;
}

struct RunConfig {
  std::filesystem::path input;
  std::optional<std::string> format;  // csv | mtx; inferred from the extension when unset
  SplitRule strategy = SplitRule::Gap;
  Index k = 1;
  double tau = 0.2;
  bool tau_given = false;
  WeightingScheme weighting = WeightingScheme::None;
  CsvOptions csv;
  std::optional<std::filesystem::path> recipe;
  std::optional<std::filesystem::path> labels;
  std::optional<std::filesystem::path> out;
  PowerIterationOptions svd;
  Selection selection = Selection::Scatter;
  bool strict_convergence = false;

  std::string resolved_format() const {
    if (format) return *format;
    return input.extension() == ".mtx" ? "mtx" : "csv";
  }

  ClusterOptions cluster_options() const {
    return {{strategy, tau}, selection, svd, strict_convergence};
  }
};

inline nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json j;
  j["input"] = c.input.string();
  j["format"] = c.resolved_format();
  j["strategy"] = to_string(c.strategy);
  j["k"] = c.k;
  j["tau"] = c.tau;
  j["weighting"] = to_string(c.weighting);
  if (c.resolved_format() == "csv") j["csv"] = to_json(c.csv);
  j["recipe"] = c.recipe ? nlohmann::json(c.recipe->string()) : nlohmann::json(nullptr);
  j["labels"] = c.labels ? nlohmann::json(c.labels->string()) : nlohmann::json(nullptr);
  j["out"] = c.out ? nlohmann::json(c.out->string()) : nlohmann::json(nullptr);
  j["svd_tol"] = c.svd.tol;
  j["svd_max_iter"] = c.svd.max_iter;
  j["selection"] = to_string(c.selection);
  j["strict_convergence"] = c.strict_convergence;
  return j;
}

/// Error tagged with the pipeline stage it came from.
struct StageError {
  std::string stage;
  Error error;
};

inline int report(const StageError& e, std::ostream& err) {
  err << "error [" << e.stage << "]: " << e.error.what() << '\n';
  return exit_code(e.error.category());
}

template <typename F>
auto in_stage(const std::string& stage, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    throw StageError{stage, e};
  }
}

/// Reads the input, attaches labels and applies weighting.
inline Dataset load_input(const RunConfig& c) {
  Dataset ds = in_stage("load", [&] {
    if (c.resolved_format() == "mtx") return Dataset{load_matrix_market(c.input), {}, {}, {}, {}};
    return load_dense_csv(c.input, c.recipe ? load_recipe(*c.recipe) : c.csv);
  });
  if (c.labels) in_stage("labels", [&] { attach_labels(ds, *c.labels); });
  in_stage("weighting", [&] { ds.matrix = apply_weighting(ds.matrix, c.weighting); });
  return ds;
}

inline std::string format_entropy(double e) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(4) << e;
  return os.str();
}

inline int run_cluster(const RunConfig& c, std::ostream& out, std::ostream& err) {
  try {
    std::vector<std::string> notes;
    if (c.strategy == SplitRule::Sign && c.tau_given) {
      notes.push_back("--tau is ignored by pddp");
    }
    const Dataset ds = load_input(c);
    ClusterTree tree = in_stage("cluster", [&] { return cluster(ds.matrix, c.k, c.cluster_options()); });
    tree.warnings.insert(tree.warnings.begin(), notes.begin(), notes.end());
    for (const auto& w : tree.warnings) err << "warning: " << w << '\n';

    std::optional<double> entropy;
    if (ds.labels) {
      const auto table = contingency(tree.assignment, *ds.labels);
      if (table.class_count() >= 2) entropy = normalized_entropy(table);
    }

    if (!c.out) {
      for (Index j = 0; j < tree.assignment.size(); ++j) {
        out << ds.column_id(j) << '\t' << tree.assignment[j] << '\n';
      }
      if (entropy) err << "entropy\t" << format_entropy(*entropy) << '\n';
      return kOk;
    }
    in_stage("write", [&] { write_results(tree, ds, *c.out, {c.cluster_options(), to_json(c)}); });
    out << "clusters\t" << tree.cluster_count() << " of " << c.k << '\n';
    for (Index cl = 0; cl < tree.cluster_count(); ++cl) {
      out << "cluster " << cl << "\tsize " << tree.leaf(cl).members.size() << '\n';
    }
    if (entropy) out << "entropy\t" << format_entropy(*entropy) << '\n';
    return kOk;
  } catch (const StageError& e) {
    return report(e, err);
  }
}

inline void print_table(const ContingencyTable& t, const std::vector<std::string>& class_names,
                        std::ostream& out) {
  out << "cluster";
  for (Index id : t.class_ids) out << '\t' << class_names[id];
  out << "\ttotal\n";
  for (Index r = 0; r < t.cluster_count(); ++r) {
    out << t.cluster_ids[r];
    for (Index count : t.counts[r]) out << '\t' << count;
    out << '\t' << t.cluster_sizes[r] << '\n';
  }
}

/// Entropy of an assignments file (`id<TAB>cluster` or one cluster per line)
/// against a labels file keyed the same way, or positional.
inline int run_eval(const std::filesystem::path& assignments, const std::filesystem::path& labels,
                    std::ostream& out, std::ostream& err) {
  try {
    const auto assigned = in_stage("load", [&] { return read_keyed_column(assignments); });
    std::vector<std::string> ids = assigned.ids;
    if (ids.empty()) {
      for (Index j = 0; j < assigned.values.size(); ++j) ids.push_back(std::to_string(j));
    }
    const auto label_text = in_stage("labels", [&] {
      return align_to_ids(read_keyed_column(labels), ids, labels.string());
    });
    const auto cluster_ids = in_stage("load", [&] {
      std::vector<Index> v;
      for (const auto& s : assigned.values) {
        const auto id = detail::parse_index(s);
        if (!id) fail(ErrorCode::MalformedEntry, "cluster id '" + s + "' is not a nonnegative integer");
        v.push_back(*id);
      }
      return v;
    });
    const auto [label_ids, names] = encode_labels(label_text);
    in_stage("eval", [&] {
      const auto table = contingency(cluster_ids, label_ids);
      const double e = normalized_entropy(table);
      print_table(table, names, out);
      out << "entropy\t" << format_entropy(e) << '\n';
    });
    return kOk;
  } catch (const StageError& e) {
    return report(e, err);
  }
}

/// Entropy per k (rows) and strategy (columns). Each strategy is one run to the
/// largest k, sampled as the tree grows.
inline int run_compare(const RunConfig& base, const std::vector<Index>& ks,
                       const std::vector<SplitRule>& strategies, std::ostream& out, std::ostream& err) {
  try {
    const Dataset ds = load_input(base);
    if (!ds.labels) {
      throw StageError{"eval", Error(ErrorCode::InvalidArgument, "compare needs labels")};
    }
    const Index k_max = *std::max_element(ks.begin(), ks.end());

    struct Column {
      std::map<Index, double> entropy;
      std::vector<std::string> warnings;
    };
    const auto run = [&](SplitRule rule) {
      RunConfig c = base;
      c.strategy = rule;
      c.k = k_max;
      Column col;
      const auto sample = [&](const ClusterTree& t) {
        col.entropy[t.cluster_count()] = normalized_entropy(contingency(t.assignment, *ds.labels));
      };
      const auto tree = cluster(ds.matrix, k_max, c.cluster_options(), sample);
      if (std::find(ks.begin(), ks.end(), Index{1}) != ks.end()) {
        col.entropy[1] = normalized_entropy(contingency(std::vector<Index>(ds.matrix.cols(), 0), *ds.labels));
      }
      col.warnings = tree.warnings;
      return col;
    };

    std::vector<std::future<Column>> futures;
    for (const auto rule : strategies) futures.push_back(std::async(std::launch::async, run, rule));
    std::vector<Column> columns;
    for (auto& f : futures) columns.push_back(in_stage("cluster", [&] { return f.get(); }));

    if (base.tau_given && std::find(strategies.begin(), strategies.end(), SplitRule::Sign) != strategies.end()) {
      err << "warning: --tau is ignored by pddp\n";
    }
    for (Index s = 0; s < strategies.size(); ++s) {
      for (const auto& w : columns[s].warnings) err << "warning: " << to_string(strategies[s]) << ": " << w << '\n';
    }
    out << 'k';
    for (const auto rule : strategies) out << '\t' << to_string(rule);
    out << '\n';
    for (const Index k : ks) {
      out << k;
      for (const auto& col : columns) {
        const auto it = col.entropy.find(k);
        out << '\t' << (it == col.entropy.end() ? std::string("-") : format_entropy(it->second));
      }
      out << '\n';
    }
    return kOk;
  } catch (const StageError& e) {
    return report(e, err);
  }
}

inline std::vector<Index> parse_k_list(const std::string& text) {
  std::vector<Index> ks;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    const auto k = detail::parse_index(item);
    if (!k || *k == 0) fail(ErrorCode::InvalidK, "bad k value '" + item + "' in '" + text + "'");
    ks.push_back(*k);
  }
  if (ks.empty()) fail(ErrorCode::InvalidK, "empty k list");
  return ks;
}

inline std::vector<SplitRule> parse_strategies(const std::string& text) {
  std::vector<SplitRule> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    const auto name = std::string(detail::trim(item));
    if (name == "pddp") {
      out.push_back(SplitRule::Sign);
    } else if (name == "pdgp") {
      out.push_back(SplitRule::Gap);
    } else {
      fail(ErrorCode::InvalidArgument, "unknown strategy '" + name + "'");
    }
  }
  if (out.empty()) fail(ErrorCode::InvalidArgument, "empty strategy list");
  return out;
}

namespace detail {

// Raw flag values before validation.
struct Flags {
  std::string input;
  std::string format;
  std::string strategy = "pdgp";
  std::string weighting = "none";
  std::string selection = "scatter";
  std::string observations_as;
  std::string missing;
  std::string label_column;
  std::string drop_columns;
  std::string recipe;
  std::string labels;
  std::string out;
  double tau = 0.2;
  double svd_tol = 1e-8;
  std::size_t svd_max_iter = 1000;
  bool has_header = false;
  bool strict = false;
};

inline void add_input_flags(CLI::App& app, Flags& f) {
  app.add_option("--input", f.input, "Data file (CSV or MatrixMarket)")->required();
  app.add_option("--format", f.format, "Input format")->check(CLI::IsMember({"csv", "mtx"}));
  app.add_option("--tau", f.tau, "Fringe tolerance for pdgp")->capture_default_str();
  app.add_option("--weighting", f.weighting, "Column weighting")
      ->check(CLI::IsMember({"none", "norm", "tfidf", "tfidf-sparse"}))
      ->capture_default_str();
  app.add_flag("--has-header", f.has_header, "CSV has a header line");
  app.add_option("--label-column", f.label_column, "CSV field holding class labels (index or name)");
  app.add_option("--observations-as", f.observations_as, "CSV orientation")
      ->check(CLI::IsMember({"rows", "columns"}));
  app.add_option("--missing", f.missing, "Missing-cell policy")->check(CLI::IsMember({"zero", "reject"}));
  app.add_option("--drop-columns", f.drop_columns, "Comma-separated CSV fields to ignore");
  app.add_option("--recipe", f.recipe, "JSON file of CSV loading options");
  app.add_option("--labels", f.labels, "Label file: id<TAB>label or one label per line");
  app.add_option("--svd-tol", f.svd_tol, "Power iteration tolerance")->capture_default_str();
  app.add_option("--svd-max-iter", f.svd_max_iter, "Power iteration limit")->capture_default_str();
  app.add_option("--selection", f.selection, "Leaf selection rule")
      ->check(CLI::IsMember({"scatter", "variance"}))
      ->capture_default_str();
  app.add_flag("--strict-convergence", f.strict, "Fail when power iteration does not converge");
}

inline RunConfig to_config(const CLI::App& app, const Flags& f) {
  const auto given = [&](const char* name) { return app.get_option(name)->count() > 0; };
  RunConfig c;
  c.input = f.input;
  if (!f.format.empty()) c.format = f.format;
  c.strategy = f.strategy == "pddp" ? SplitRule::Sign : SplitRule::Gap;
  c.tau = f.tau;
  c.tau_given = given("--tau");
  c.weighting = f.weighting == "norm"           ? WeightingScheme::Norm
                : f.weighting == "tfidf"        ? WeightingScheme::Tfidf
                : f.weighting == "tfidf-sparse" ? WeightingScheme::TfidfSparse
                                                : WeightingScheme::None;
  c.selection = f.selection == "variance" ? Selection::Variance : Selection::Scatter;
  c.svd = {f.svd_tol, f.svd_max_iter};
  c.strict_convergence = f.strict;
  if (!(f.svd_tol > 0.0)) fail(ErrorCode::InvalidArgument, "--svd-tol must be positive");
  if (f.svd_max_iter == 0) fail(ErrorCode::InvalidArgument, "--svd-max-iter must be positive");
  if (c.strategy == SplitRule::Gap && !(f.tau >= 0.0 && f.tau < 1.0)) {
    fail(ErrorCode::InvalidArgument, "--tau must lie in [0, 1)");
  }

  const char* csv_flags[] = {"--has-header", "--label-column", "--observations-as", "--missing",
                             "--drop-columns"};
  std::vector<std::string> csv_given;
  for (const char* name : csv_flags) {
    if (given(name)) csv_given.push_back(name);
  }
  if (!f.recipe.empty()) {
    if (!csv_given.empty()) {
      fail(ErrorCode::InvalidArgument, "--recipe conflicts with " + csv_given.front());
    }
    c.recipe = f.recipe;
  }
  if (c.resolved_format() == "mtx" && (c.recipe || !csv_given.empty())) {
    fail(ErrorCode::InvalidArgument, "CSV options do not apply to MatrixMarket input");
  }
  c.csv.has_header = f.has_header;
  if (!f.label_column.empty()) c.csv.label_field = f.label_column;
  if (f.observations_as == "columns") c.csv.observations_as = Orientation::Columns;
  if (f.missing == "reject") c.csv.missing = MissingPolicy::Reject;
  if (!f.drop_columns.empty()) {
    std::stringstream ss(f.drop_columns);
    for (std::string item; std::getline(ss, item, ',');) c.csv.drop_fields.emplace_back(pdgp::detail::trim(item));
  }
  if (!f.labels.empty()) {
    if (c.csv.label_field) fail(ErrorCode::InvalidArgument, "--labels conflicts with --label-column");
    c.labels = f.labels;
  }
  if (!f.out.empty()) c.out = f.out;
  return c;
}

}  // namespace detail

/// Full command line: `pdgp cluster|eval|compare ...`. Returns the process exit code.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Divisive spectral clustering (PDDP / PDGP)", "pdgp"};
  app.require_subcommand(1);

  detail::Flags cf;
  std::size_t k = 0;
  auto* cluster_cmd = app.add_subcommand("cluster", "Cluster the columns of a data matrix");
  detail::add_input_flags(*cluster_cmd, cf);
  cluster_cmd->add_option("--k", k, "Number of clusters")->required();
  cluster_cmd->add_option("--strategy", cf.strategy, "Split rule")
      ->check(CLI::IsMember({"pddp", "pdgp"}))
      ->capture_default_str();
  cluster_cmd->add_option("--out", cf.out, "Output directory (assignments go to stdout when omitted)");

  std::string assignments_path;
  std::string eval_labels;
  auto* eval_cmd = app.add_subcommand("eval", "Normalized entropy of an assignment against labels");
  eval_cmd->add_option("--assignments", assignments_path, "id<TAB>cluster file")->required();
  eval_cmd->add_option("--labels", eval_labels, "id<TAB>label file")->required();

  detail::Flags mf;
  std::string k_list;
  std::string strategies = "pddp,pdgp";
  auto* compare_cmd = app.add_subcommand("compare", "Entropy table over k for several strategies");
  detail::add_input_flags(*compare_cmd, mf);
  compare_cmd->add_option("--k", k_list, "Comma-separated cluster counts")->required();
  compare_cmd->add_option("--strategies", strategies, "Comma-separated strategies")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error [usage]: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (*cluster_cmd) {
      auto config = detail::to_config(*cluster_cmd, cf);
      config.k = k;
      return run_cluster(config, out, err);
    }
    if (*eval_cmd) return run_eval(assignments_path, eval_labels, out, err);
    auto config = detail::to_config(*compare_cmd, mf);
    auto ks = parse_k_list(k_list);
    return run_compare(config, ks, parse_strategies(strategies), out, err);
  } catch (const Error& e) {
    err << "error [usage]: " << e.what() << '\n';
    return exit_code(e.category());
  }
}

}  // namespace pdgp::cli

#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "pdgp/divisive.hpp"
#include "pdgp/errors.hpp"
#include "pdgp/eval.hpp"
#include "pdgp/matrix.hpp"

namespace pdgp {

/// A matrix of observations (columns) with optional ground truth and names.
struct Dataset {
  ColumnMatrix matrix;
  std::optional<std::vector<Index>> labels;  // dense class ids, first-occurrence order
  std::vector<std::string> class_names;      // class_names[id]
  std::vector<std::string> column_ids;       // empty, or one unique id per observation
  std::vector<std::string> feature_ids;      // empty, or one per row

  std::string column_id(Index j) const {
    return column_ids.empty() ? std::to_string(j) : column_ids[j];
  }
};

enum class Orientation { Rows, Columns };
enum class MissingPolicy { ZeroFill, Reject };

/// How to read a delimited text table. Field selectors (label, dropped and
/// categorical fields) are 0-based field indices or, when the file has a header
/// and observations are rows, header names.
///
/// With observations_as = Columns each data line is one feature and each field
/// one observation; the header line (if any) then holds observation ids and
/// selectors index data lines.
struct CsvOptions {
  bool has_header = false;
  std::optional<std::string> label_field;
  Orientation observations_as = Orientation::Rows;
  MissingPolicy missing = MissingPolicy::ZeroFill;
  std::vector<std::string> drop_fields;
  // selector -> (category text -> numeric code)
  std::map<std::string, std::map<std::string, double>> categories;
  char delimiter = ',';
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return value;
}

inline std::optional<Index> parse_index(std::string_view s) {
  s = trim(s);
  Index value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return value;
}

/// Shortest representation that reads back to the same double.
inline std::string format_double(double x) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

/// Splits one record, honouring double-quoted fields with "" escapes.
inline std::vector<std::string> split_record(std::string_view line, char delimiter) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        field += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == delimiter) {
      fields.push_back(std::string(trim(field)));
      field.clear();
    } else {
      field += ch;
    }
  }
  fields.push_back(std::string(trim(field)));
  return fields;
}

inline std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::FileUnreadable, "cannot open " + path.string());
  return in;
}

inline bool is_blank(std::string_view line) { return trim(line).empty(); }

}  // namespace detail

/// Reads a JSON preprocessing recipe into CsvOptions. Recognised keys:
/// has_header, label, observations_as ("rows"|"columns"), missing ("zero"|"reject"),
/// drop (list), categories ({selector: {text: code}}), delimiter.
inline CsvOptions csv_options_from_json(const nlohmann::json& j) {
  CsvOptions o;
  try {
    o.has_header = j.value("has_header", false);
    if (j.contains("label") && !j["label"].is_null()) {
      o.label_field = j["label"].is_string() ? j["label"].get<std::string>() : j["label"].dump();
    }
    const auto orient = j.value("observations_as", std::string("rows"));
    if (orient != "rows" && orient != "columns") {
      fail(ErrorCode::InvalidArgument, "observations_as must be rows or columns");
    }
    o.observations_as = orient == "rows" ? Orientation::Rows : Orientation::Columns;
    const auto missing = j.value("missing", std::string("zero"));
    if (missing != "zero" && missing != "reject") {
      fail(ErrorCode::InvalidArgument, "missing must be zero or reject");
    }
    o.missing = missing == "zero" ? MissingPolicy::ZeroFill : MissingPolicy::Reject;
    for (const auto& d : j.value("drop", nlohmann::json::array())) {
      o.drop_fields.push_back(d.is_string() ? d.get<std::string>() : d.dump());
    }
    const auto categories = j.value("categories", nlohmann::json::object());
    for (const auto& [selector, mapping] : categories.items()) {
      for (const auto& [text, code] : mapping.items()) o.categories[selector][text] = code.get<double>();
    }
    const auto delim = j.value("delimiter", std::string(","));
    if (delim.size() != 1) fail(ErrorCode::InvalidArgument, "delimiter must be one character");
    o.delimiter = delim.front();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::InvalidArgument, std::string("malformed recipe: ") + e.what());
  }
  return o;
}

inline CsvOptions load_recipe(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  try {
    return csv_options_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::InvalidArgument, "recipe " + path.string() + " is not valid JSON: " + e.what());
  }
}

inline nlohmann::json to_json(const CsvOptions& o) {
  nlohmann::json j;
  j["has_header"] = o.has_header;
  j["label"] = o.label_field ? nlohmann::json(*o.label_field) : nlohmann::json(nullptr);
  j["observations_as"] = o.observations_as == Orientation::Rows ? "rows" : "columns";
  j["missing"] = o.missing == MissingPolicy::ZeroFill ? "zero" : "reject";
  j["drop"] = o.drop_fields;
  j["categories"] = o.categories;
  j["delimiter"] = std::string(1, o.delimiter);
  return j;
}

/// Loads a rectangular numeric table. Cells that are empty or "?" are missing:
/// zero-filled or rejected per options. Observations always end up as matrix
/// columns, in file order.
inline Dataset load_dense_csv(const std::filesystem::path& path, const CsvOptions& options = {}) {
  auto in = detail::open_input(path);
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> records;
  std::vector<Index> line_numbers;
  std::string line;
  Index line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (detail::is_blank(line)) continue;
    auto fields = detail::split_record(line, options.delimiter);
    if (options.has_header && header.empty() && records.empty()) {
      header = std::move(fields);
      continue;
    }
    if (!records.empty() && fields.size() != records.front().size()) {
      fail(ErrorCode::RaggedRows, path.string() + " line " + std::to_string(line_no) + " has " +
                                      std::to_string(fields.size()) + " fields, expected " +
                                      std::to_string(records.front().size()));
    }
    records.push_back(std::move(fields));
    line_numbers.push_back(line_no);
  }
  if (records.empty()) fail(ErrorCode::InvalidMatrix, path.string() + " contains no data lines");

  const bool by_rows = options.observations_as == Orientation::Rows;
  const Index file_cols = records.front().size();
  const Index field_count = by_rows ? file_cols : records.size();
  const Index observation_count = by_rows ? records.size() : file_cols;
  if (options.has_header && header.size() != file_cols) {
    fail(ErrorCode::RaggedRows, path.string() + " header has " + std::to_string(header.size()) +
                                    " fields, expected " + std::to_string(file_cols));
  }
  // field f of observation o, plus its 1-based file coordinates for diagnostics
  const auto cell = [&](Index o, Index f) -> const std::string& {
    return by_rows ? records[o][f] : records[f][o];
  };
  const auto where = [&](Index o, Index f) {
    const Index file_line = by_rows ? line_numbers[o] : line_numbers[f];
    const Index file_col = (by_rows ? f : o) + 1;
    return "line " + std::to_string(file_line) + ", column " + std::to_string(file_col);
  };

  const auto resolve = [&](const std::string& selector) -> Index {
    if (by_rows && options.has_header) {
      const auto it = std::find(header.begin(), header.end(), selector);
      if (it != header.end()) return static_cast<Index>(it - header.begin());
    }
    const auto idx = detail::parse_index(selector);
    if (!idx || *idx >= field_count) {
      fail(ErrorCode::InvalidArgument, "field selector '" + selector + "' matches no field of " +
                                           path.string());
    }
    return *idx;
  };

  std::optional<Index> label_field;
  if (options.label_field) label_field = resolve(*options.label_field);
  std::vector<bool> skip(field_count, false);
  for (const auto& d : options.drop_fields) skip[resolve(d)] = true;
  if (label_field) skip[*label_field] = true;
  std::unordered_map<Index, const std::map<std::string, double>*> categorical;
  for (const auto& [selector, mapping] : options.categories) categorical[resolve(selector)] = &mapping;

  std::vector<Index> features;
  for (Index f = 0; f < field_count; ++f) {
    if (!skip[f]) features.push_back(f);
  }
  if (features.empty()) fail(ErrorCode::InvalidMatrix, path.string() + " has no feature fields left");

  std::vector<double> values(features.size() * observation_count);
  for (Index o = 0; o < observation_count; ++o) {
    for (Index r = 0; r < features.size(); ++r) {
      const Index f = features[r];
      const std::string& text = cell(o, f);
      double x = 0.0;
      if (const auto cat = categorical.find(f); cat != categorical.end()) {
        const auto hit = cat->second->find(text);
        if (hit == cat->second->end()) {
          fail(ErrorCode::NonNumericCell, "unknown category '" + text + "' at " + where(o, f));
        }
        x = hit->second;
      } else if (text.empty() || text == "?") {
        if (options.missing == MissingPolicy::Reject) {
          fail(ErrorCode::NonNumericCell, "missing value at " + where(o, f));
        }
      } else if (const auto parsed = detail::parse_double(text); parsed && std::isfinite(*parsed)) {
        x = *parsed;
      } else {
        fail(ErrorCode::NonNumericCell, "'" + text + "' at " + where(o, f) + " is not a number");
      }
      values[o * features.size() + r] = x;
    }
  }

  Dataset ds{DenseMatrix(features.size(), observation_count, std::move(values)), {}, {}, {}, {}};
  if (label_field) {
    std::vector<Index> labels(observation_count);
    std::unordered_map<std::string, Index> ids;
    for (Index o = 0; o < observation_count; ++o) {
      const auto& text = cell(o, *label_field);
      const auto [it, inserted] = ids.try_emplace(text, ds.class_names.size());
      if (inserted) ds.class_names.push_back(text);
      labels[o] = it->second;
    }
    ds.labels = std::move(labels);
  }
  if (options.has_header) {
    if (by_rows) {
      for (Index f : features) ds.feature_ids.push_back(header[f]);
    } else {
      std::unordered_set<std::string> seen;
      for (const auto& id : header) {
        if (!seen.insert(id).second) fail(ErrorCode::DuplicateId, "observation id '" + id + "' repeats");
      }
      ds.column_ids = header;
    }
  }
  return ds;
}

/// Reads `%%MatrixMarket matrix coordinate real general` (integer values are
/// accepted too). Indices are 1-based in the file; duplicates are summed.
inline ColumnMatrix load_matrix_market(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::BadHeader, path.string() + " is empty");
  {
    std::istringstream hs(line);
    std::vector<std::string> tokens;
    for (std::string t; hs >> t;) {
      std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
      tokens.push_back(t);
    }
    const bool ok = tokens.size() == 5 && tokens[0] == "%%matrixmarket" && tokens[1] == "matrix" &&
                    tokens[2] == "coordinate" && (tokens[3] == "real" || tokens[3] == "integer") &&
                    tokens[4] == "general";
    if (!ok) {
      fail(ErrorCode::BadHeader, path.string() + ": expected '%%MatrixMarket matrix coordinate real "
                                                 "general', got '" + line + "'");
    }
  }
  Index line_no = 1;
  const auto next_data_line = [&](std::string& out) {
    while (std::getline(in, out)) {
      ++line_no;
      if (!out.empty() && out.back() == '\r') out.pop_back();
      if (detail::is_blank(out) || out.front() == '%') continue;
      return true;
    }
    return false;
  };

  if (!next_data_line(line)) fail(ErrorCode::BadHeader, path.string() + " has no size line");
  Index rows = 0;
  Index cols = 0;
  Index nnz = 0;
  {
    std::istringstream ss(line);
    std::string r, c, z, extra;
    ss >> r >> c >> z;
    const auto pr = detail::parse_index(r);
    const auto pc = detail::parse_index(c);
    const auto pz = detail::parse_index(z);
    if (!pr || !pc || !pz || (ss >> extra)) {
      fail(ErrorCode::BadHeader, path.string() + " line " + std::to_string(line_no) +
                                     ": malformed size line '" + line + "'");
    }
    rows = *pr;
    cols = *pc;
    nnz = *pz;
  }

  std::vector<MatrixEntry> entries;
  entries.reserve(nnz);
  for (Index k = 0; k < nnz; ++k) {
    if (!next_data_line(line)) {
      fail(ErrorCode::MalformedEntry, path.string() + ": expected " + std::to_string(nnz) +
                                          " entries, found " + std::to_string(k));
    }
    std::istringstream ss(line);
    std::string r, c, v, extra;
    ss >> r >> c >> v;
    const auto pr = detail::parse_index(r);
    const auto pc = detail::parse_index(c);
    const auto pv = detail::parse_double(v);
    if (!pr || !pc || !pv || (ss >> extra)) {
      fail(ErrorCode::MalformedEntry, path.string() + " line " + std::to_string(line_no) + ": '" +
                                          line + "'");
    }
    if (*pr < 1 || *pr > rows || *pc < 1 || *pc > cols) {
      fail(ErrorCode::IndexOutOfRange, path.string() + " line " + std::to_string(line_no) + ": (" +
                                           r + ", " + c + ") outside " + std::to_string(rows) + "x" +
                                           std::to_string(cols));
    }
    entries.push_back({*pr - 1, *pc - 1, *pv});
  }
  if (next_data_line(line)) {
    fail(ErrorCode::MalformedEntry, path.string() + " line " + std::to_string(line_no) +
                                        ": data beyond the declared " + std::to_string(nnz) + " entries");
  }
  return SparseMatrix::from_entries(rows, cols, std::move(entries));
}

/// Writes nonzeros in column-major order with round-trip precision.
inline void write_matrix_market(const std::filesystem::path& path, const ColumnMatrix& a) {
  std::vector<MatrixEntry> entries;
  for (Index j = 0; j < a.cols(); ++j) {
    if (a.is_sparse()) {
      const auto col = a.sparse().column(j);
      for (Index p = 0; p < col.rows.size(); ++p) entries.push_back({col.rows[p], j, col.values[p]});
    } else {
      for (Index i = 0; i < a.rows(); ++i) {
        if (a.dense()(i, j) != 0.0) entries.push_back({i, j, a.dense()(i, j)});
      }
    }
  }
  std::ofstream out(path);
  if (!out) fail(ErrorCode::OutDirUnwritable, "cannot write " + path.string());
  out << "%%MatrixMarket matrix coordinate real general\n"
      << a.rows() << ' ' << a.cols() << ' ' << entries.size() << '\n';
  for (const auto& e : entries) {
    out << e.row + 1 << ' ' << e.col + 1 << ' ' << detail::format_double(e.value) << '\n';
  }
}

/// Lines of `id<TAB>value`, or of `value` alone (ids then empty).
struct KeyedColumn {
  std::vector<std::string> ids;
  std::vector<std::string> values;
};

inline KeyedColumn read_keyed_column(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  KeyedColumn out;
  std::string line;
  Index line_no = 0;
  std::optional<bool> keyed;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (detail::is_blank(line)) continue;
    const auto tab = line.find('\t');
    const bool has_key = tab != std::string::npos;
    if (keyed && *keyed != has_key) {
      fail(ErrorCode::MalformedEntry, path.string() + " line " + std::to_string(line_no) +
                                          " mixes keyed and unkeyed lines");
    }
    keyed = has_key;
    if (has_key) {
      if (line.find('\t', tab + 1) != std::string::npos) {
        fail(ErrorCode::MalformedEntry, path.string() + " line " + std::to_string(line_no) +
                                            " has more than two fields");
      }
      out.ids.emplace_back(detail::trim(std::string_view(line).substr(0, tab)));
      out.values.emplace_back(detail::trim(std::string_view(line).substr(tab + 1)));
    } else {
      out.values.emplace_back(detail::trim(line));
    }
  }
  return out;
}

/// Orders `values` to follow `ids` using the file's keys (or positionally when the
/// file is unkeyed). LengthMismatch on count differences, UnknownId on unmatched keys.
inline std::vector<std::string> align_to_ids(const KeyedColumn& file, const std::vector<std::string>& ids,
                                             const std::string& what) {
  if (file.values.size() != ids.size()) {
    fail(ErrorCode::LengthMismatch, what + " has " + std::to_string(file.values.size()) +
                                        " entries for " + std::to_string(ids.size()) + " observations");
  }
  if (file.ids.empty()) return file.values;
  std::unordered_map<std::string, Index> position;
  for (Index k = 0; k < file.ids.size(); ++k) {
    if (!position.emplace(file.ids[k], k).second) {
      fail(ErrorCode::DuplicateId, what + " repeats id '" + file.ids[k] + "'");
    }
  }
  std::vector<std::string> out;
  out.reserve(ids.size());
  for (const auto& id : ids) {
    const auto it = position.find(id);
    if (it == position.end()) fail(ErrorCode::UnknownId, what + " has no entry for id '" + id + "'");
    out.push_back(file.values[it->second]);
  }
  return out;
}

/// Dense ids for string labels in first-occurrence order.
inline std::pair<std::vector<Index>, std::vector<std::string>> encode_labels(
    const std::vector<std::string>& labels) {
  std::vector<Index> ids(labels.size());
  std::vector<std::string> names;
  std::unordered_map<std::string, Index> seen;
  for (Index k = 0; k < labels.size(); ++k) {
    const auto [it, inserted] = seen.try_emplace(labels[k], names.size());
    if (inserted) names.push_back(labels[k]);
    ids[k] = it->second;
  }
  return {std::move(ids), std::move(names)};
}

/// Attaches labels from a side file (keyed by observation id, or positional).
inline void attach_labels(Dataset& ds, const std::filesystem::path& path) {
  std::vector<std::string> ids(ds.matrix.cols());
  for (Index j = 0; j < ids.size(); ++j) ids[j] = ds.column_id(j);
  auto [labels, names] = encode_labels(align_to_ids(read_keyed_column(path), ids, path.string()));
  ds.labels = std::move(labels);
  ds.class_names = std::move(names);
}

/// Everything about a run that summary.json records besides the tree itself.
struct RunMetadata {
  ClusterOptions options;
  nlohmann::json config = nlohmann::json::object();  // the full invocation, for reproducibility
};

namespace detail {

inline nlohmann::json node_json(const ClusterTree& tree, Index id) {
  const auto& node = tree.nodes[id];
  nlohmann::json j;
  j["id"] = node.id;
  j["size"] = node.members.size();
  j["scatter"] = node.scatter;
  if (node.is_leaf()) {
    const auto pos = std::find(tree.leaves.begin(), tree.leaves.end(), id) - tree.leaves.begin();
    j["cluster"] = pos;
    j["members"] = node.members;
    if (!node.splittable) j["unsplittable"] = node.unsplittable_reason;
    return j;
  }
  const auto& s = *node.split;
  nlohmann::json split;
  split["rule"] = s.rule == SplitRule::Sign ? "sign" : "gap";
  split["sigma"] = s.sigma;
  split["iterations"] = s.iterations;
  split["converged"] = s.converged;
  if (s.gap) {
    std::vector<Index> perm(s.gap->permutation.size());
    for (Index i = 0; i < perm.size(); ++i) perm[i] = node.members[s.gap->permutation[i]];
    split["sorted_values"] = s.gap->sorted_values;
    split["sorted_columns"] = perm;
    split["gap_index"] = s.gap->gap_index;
    split["gap_width"] = s.gap->gap_width;
    split["fringe_lo"] = s.gap->fringe_lo;
    split["fringe_hi"] = s.gap->fringe_hi;
  }
  j["split"] = std::move(split);
  j["children"] = nlohmann::json::array({node_json(tree, s.left_child), node_json(tree, s.right_child)});
  return j;
}

inline std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::OutDirUnwritable, "cannot write " + path.string());
  return out;
}

}  // namespace detail

/// Rows of one dot plot: projections of a split node's members in ascending
/// order, with the child each member went to.
struct DotPlotRow {
  Index rank;  // 1-based
  double value;
  bool left;
};

inline std::vector<DotPlotRow> dot_plot(const ClusterTree& tree, const ClusterNode& node) {
  const auto& s = *node.split;
  std::vector<Index> order(s.projections.size());
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return s.projections[a] < s.projections[b]; });
  const auto& left_members = tree.nodes[s.left_child].members;
  std::vector<DotPlotRow> rows;
  rows.reserve(order.size());
  for (Index r = 0; r < order.size(); ++r) {
    const Index col = node.members[order[r]];
    const bool left = std::binary_search(left_members.begin(), left_members.end(), col);
    rows.push_back({r + 1, s.projections[order[r]], left});
  }
  return rows;
}

inline nlohmann::json summary_json(const ClusterTree& tree, const Dataset& dataset,
                                   const RunMetadata& meta) {
  nlohmann::json j;
  j["strategy"] = to_string(meta.options.strategy.rule);
  j["tau"] = meta.options.strategy.tau;
  j["selection"] = to_string(meta.options.selection);
  j["svd"] = {{"tol", meta.options.svd.tol}, {"max_iter", meta.options.svd.max_iter}};
  j["observations"] = dataset.matrix.cols();
  j["features"] = dataset.matrix.rows();
  j["requested_k"] = tree.requested_k;
  j["clusters"] = tree.cluster_count();
  j["complete"] = tree.complete;
  j["warnings"] = tree.warnings;
  auto leaves = nlohmann::json::array();
  for (Index c = 0; c < tree.cluster_count(); ++c) {
    const auto& leaf = tree.leaf(c);
    leaves.push_back({{"cluster", c}, {"node", leaf.id}, {"size", leaf.members.size()},
                      {"scatter", leaf.scatter}});
  }
  j["leaves"] = std::move(leaves);
  j["entropy"] = nullptr;
  if (dataset.labels) {
    const auto table = contingency(tree.assignment, *dataset.labels);
    nlohmann::json ct;
    ct["classes"] = dataset.class_names;
    ct["counts"] = table.counts;
    j["contingency"] = std::move(ct);
    j["raw_entropy"] = raw_entropy(table);
    if (table.class_count() >= 2) j["entropy"] = normalized_entropy(table);
  }
  j["config"] = meta.config;
  return j;
}

/// Writes assignments.tsv, tree.json, summary.json and one dotplot_<node>.tsv per
/// split node into out_dir (created if needed).
inline void write_results(const ClusterTree& tree, const Dataset& dataset,
                          const std::filesystem::path& out_dir, const RunMetadata& meta = {}) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec || !std::filesystem::is_directory(out_dir)) {
    fail(ErrorCode::OutDirUnwritable, "cannot create output directory " + out_dir.string());
  }
  if (tree.assignment.size() != dataset.matrix.cols()) {
    fail(ErrorCode::LengthMismatch, "tree covers " + std::to_string(tree.assignment.size()) +
                                        " observations, dataset has " +
                                        std::to_string(dataset.matrix.cols()));
  }

  {
    auto out = detail::open_output(out_dir / "assignments.tsv");
    for (Index j = 0; j < tree.assignment.size(); ++j) {
      out << dataset.column_id(j) << '\t' << tree.assignment[j] << '\n';
    }
  }
  {
    auto out = detail::open_output(out_dir / "tree.json");
    out << detail::node_json(tree, 0).dump(2) << '\n';
  }
  for (const auto& node : tree.nodes) {
    if (node.is_leaf()) continue;
    auto out = detail::open_output(out_dir / ("dotplot_" + std::to_string(node.id) + ".tsv"));
    for (const auto& row : dot_plot(tree, node)) {
      out << row.rank << '\t' << detail::format_double(row.value) << '\t'
          << (row.left ? "left" : "right") << '\n';
    }
  }
  {
    auto out = detail::open_output(out_dir / "summary.json");
    out << summary_json(tree, dataset, meta).dump(2) << '\n';
  }
}

}  // namespace pdgp

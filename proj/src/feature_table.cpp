#include "splitchain/feature_table.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "splitchain/numeric_text.hpp"

namespace splitchain {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) {
    field = trim(field);
    if (field.size() >= 2 && field.front() == '"' && field.back() == '"') field = field.substr(1, field.size() - 2);
    fields.push_back(field);
  }
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace

std::optional<std::size_t> FeatureTable::column_index(const std::string& name) const {
  auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) return std::nullopt;
  return static_cast<std::size_t>(it - columns.begin());
}

std::size_t FeatureTable::require_column(const std::string& name) const {
  auto idx = column_index(name);
  if (!idx) fail(ErrorKind::Schema, "unknown column '" + name + "'");
  return *idx;
}

nn::VectorXd FeatureTable::column(const std::string& name) const {
  return values.col(static_cast<Eigen::Index>(require_column(name)));
}

nn::VectorXd FeatureTable::label_vector() const {
  if (!labels) fail(ErrorKind::Label, "table has no labels");
  nn::VectorXd y(static_cast<Eigen::Index>(labels->size()));
  for (std::size_t i = 0; i < labels->size(); ++i) y[static_cast<Eigen::Index>(i)] = (*labels)[i];
  return y;
}

FeatureTable FeatureTable::select_rows(const std::vector<std::size_t>& indices) const {
  FeatureTable out;
  out.columns = columns;
  out.values.resize(static_cast<Eigen::Index>(indices.size()), values.cols());
  if (labels) out.labels.emplace();
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const std::size_t src = indices[i];
    if (src >= rows()) fail(ErrorKind::Shape, "row index out of range");
    out.ids.push_back(ids[src]);
    out.values.row(static_cast<Eigen::Index>(i)) = values.row(static_cast<Eigen::Index>(src));
    if (labels) out.labels->push_back((*labels)[src]);
  }
  return out;
}

FeatureTable FeatureTable::select_columns(const std::vector<std::string>& names) const {
  FeatureTable out;
  out.ids = ids;
  out.labels = labels;
  out.columns = names;
  out.values.resize(values.rows(), static_cast<Eigen::Index>(names.size()));
  for (std::size_t c = 0; c < names.size(); ++c)
    out.values.col(static_cast<Eigen::Index>(c)) = values.col(static_cast<Eigen::Index>(require_column(names[c])));
  return out;
}

FeatureTable FeatureTable::without_labels() const {
  FeatureTable out = *this;
  out.labels.reset();
  return out;
}

void FeatureTable::validate() const {
  if (static_cast<std::size_t>(values.rows()) != ids.size() || static_cast<std::size_t>(values.cols()) != columns.size())
    fail(ErrorKind::Shape, "table values do not match ids/columns");
  if (labels && labels->size() != ids.size()) fail(ErrorKind::Shape, "label count does not match row count");
  std::unordered_set<SampleId> seen;
  for (SampleId id : ids)
    if (!seen.insert(id).second) fail(ErrorKind::Integrity, "duplicate ID " + std::to_string(id));
  std::unordered_set<std::string> names;
  for (const auto& c : columns)
    if (!names.insert(c).second) fail(ErrorKind::Schema, "duplicate column '" + c + "'");
  if (labels)
    for (std::size_t i = 0; i < labels->size(); ++i)
      if ((*labels)[i] != 0 && (*labels)[i] != 1)
        fail(ErrorKind::Label, "label for ID " + std::to_string(ids[i]) + " is not 0 or 1");
}

FeatureTable parse_table_csv(const std::string& text, const CsvOptions& options) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || trim(line).empty()) fail(ErrorKind::Ingestion, "missing header row");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  const std::vector<std::string> header = split_fields(line);

  std::optional<std::size_t> id_col, label_col;
  for (std::size_t c = 0; c < header.size(); ++c) {
    for (const auto& name : options.id_columns)
      if (!id_col && lower(header[c]) == lower(name)) id_col = c;
  }
  for (const auto& name : options.label_columns) {
    for (std::size_t c = 0; c < header.size() && !label_col; ++c)
      if (header[c] == name) label_col = c;
    if (label_col) break;
  }

  FeatureTable table;
  std::vector<std::size_t> feature_cols;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c == id_col || c == label_col) continue;
    if (header[c].empty()) fail(ErrorKind::Ingestion, "empty column name at header position " + std::to_string(c + 1));
    feature_cols.push_back(c);
    table.columns.push_back(header[c]);
  }
  if (label_col) table.labels.emplace();

  std::vector<double> flat;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != header.size())
      fail(ErrorKind::Ingestion, "row " + std::to_string(line_no) + " has " + std::to_string(fields.size()) +
                                     " fields, header has " + std::to_string(header.size()));
    if (id_col) {
      auto id = parse_int(fields[*id_col]);
      if (!id) fail(ErrorKind::Ingestion, "row " + std::to_string(line_no) + ", column '" + header[*id_col] +
                                              "': non-integer ID '" + fields[*id_col] + "'");
      table.ids.push_back(*id);
    } else {
      table.ids.push_back(static_cast<SampleId>(table.ids.size()));
    }
    if (label_col) {
      auto v = parse_double(fields[*label_col]);
      if (!v) fail(ErrorKind::Ingestion, "row " + std::to_string(line_no) + ", column '" + header[*label_col] +
                                             "': unparseable label '" + fields[*label_col] + "'");
      if (*v != 0.0 && *v != 1.0)
        fail(ErrorKind::Label, "row " + std::to_string(line_no) + ": label must be 0 or 1");
      table.labels->push_back(static_cast<int>(*v));
    }
    for (std::size_t c : feature_cols) {
      auto v = parse_double(fields[c]);
      if (!v || !std::isfinite(*v))
        fail(ErrorKind::Ingestion, "row " + std::to_string(line_no) + ", column '" + header[c] +
                                       "': cannot parse '" + fields[c] + "' as a number");
      flat.push_back(*v);
    }
  }

  const auto n = static_cast<Eigen::Index>(table.ids.size());
  const auto w = static_cast<Eigen::Index>(table.columns.size());
  table.values.resize(n, w);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < w; ++c) table.values(r, c) = flat[static_cast<std::size_t>(r * w + c)];
  table.validate();
  return table;
}

FeatureTable load_csv(const std::filesystem::path& path, const CsvOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_table_csv(buf.str(), options);
}

std::string table_to_csv(const FeatureTable& table) {
  table.validate();
  std::string out = "id";
  for (const auto& c : table.columns) {
    if (c.find_first_of(",\n") != std::string::npos) fail(ErrorKind::Schema, "column name contains a separator: " + c);
    out += ',' + c;
  }
  if (table.labels) out += ",label";
  out += '\n';
  for (std::size_t r = 0; r < table.rows(); ++r) {
    out += std::to_string(table.ids[r]);
    for (Eigen::Index c = 0; c < table.values.cols(); ++c)
      out += ',' + format_double(table.values(static_cast<Eigen::Index>(r), c));
    if (table.labels) out += ',' + std::to_string((*table.labels)[r]);
    out += '\n';
  }
  return out;
}

void save_csv(const FeatureTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
  out << table_to_csv(table);
  if (!out) fail(ErrorKind::Io, "write failed for " + path.string());
}

}  // namespace splitchain

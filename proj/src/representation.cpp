#include "splitchain/representation.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "splitchain/numeric_text.hpp"

namespace splitchain {

namespace {

std::string feature_header(int width) {
  std::string h = "id";
  for (int i = 1; i <= width; ++i) h += ",f" + std::to_string(i);
  return h;
}

// Reorders rows so IDs ascend.
void sort_by_id(RepresentationFile& repr) {
  std::vector<std::size_t> order(repr.ids.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return repr.ids[a] < repr.ids[b]; });
  if (std::is_sorted(order.begin(), order.end())) return;
  std::vector<SampleId> ids(order.size());
  nn::MatrixXd rows(repr.rows.rows(), repr.rows.cols());
  for (std::size_t i = 0; i < order.size(); ++i) {
    ids[i] = repr.ids[order[i]];
    rows.row(static_cast<Eigen::Index>(i)) = repr.rows.row(static_cast<Eigen::Index>(order[i]));
  }
  repr.ids = std::move(ids);
  repr.rows = std::move(rows);
}

}  // namespace

void RepresentationFile::validate() const {
  if (static_cast<std::size_t>(rows.rows()) != ids.size()) fail(ErrorKind::Shape, "representation rows and IDs disagree");
  for (std::size_t i = 1; i < ids.size(); ++i) {
    if (ids[i] == ids[i - 1]) fail(ErrorKind::Integrity, "duplicate ID " + std::to_string(ids[i]) + " in representation");
    if (ids[i] < ids[i - 1]) fail(ErrorKind::Integrity, "representation IDs are not ascending");
  }
  if (!rows.allFinite() || (rows.size() > 0 && rows.minCoeff() < 0.0))
    fail(ErrorKind::NumericInput, "representation entries must be finite and non-negative");
}

std::string RepresentationFile::to_csv() const {
  validate();
  std::string out = feature_header(width()) + '\n';
  for (std::size_t r = 0; r < ids.size(); ++r) {
    out += std::to_string(ids[r]);
    for (Eigen::Index c = 0; c < rows.cols(); ++c) out += ',' + format_double(rows(static_cast<Eigen::Index>(r), c));
    out += '\n';
  }
  return out;
}

RepresentationFile RepresentationFile::parse_csv(std::string_view text, std::string source) {
  std::size_t pos = text.find('\n');
  if (pos == std::string_view::npos) fail(ErrorKind::Parse, "representation payload has no header line");
  const std::string header(text.substr(0, pos));
  const auto width = static_cast<int>(std::count(header.begin(), header.end(), ','));
  if (width < 1 || header != feature_header(width)) fail(ErrorKind::Parse, "not a representation payload: " + header);

  RepresentationFile repr;
  repr.source = std::move(source);
  std::vector<double> flat;
  ++pos;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    if (line.empty()) continue;
    std::size_t start = 0;
    int field = 0;
    for (;;) {
      const auto comma = line.find(',', start);
      const auto token = line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
      if (field == 0) {
        auto id = parse_int(token);
        if (!id) fail(ErrorKind::Parse, "bad ID '" + std::string(token) + "' in representation payload");
        repr.ids.push_back(*id);
      } else {
        auto v = parse_double(token);
        if (!v) fail(ErrorKind::Parse, "bad value '" + std::string(token) + "' in representation payload");
        flat.push_back(*v);
      }
      ++field;
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (field != width + 1) fail(ErrorKind::Shape, "representation row has " + std::to_string(field - 1) +
                                                       " values, header declares " + std::to_string(width));
  }
  repr.rows.resize(static_cast<Eigen::Index>(repr.ids.size()), width);
  for (Eigen::Index r = 0; r < repr.rows.rows(); ++r)
    for (Eigen::Index c = 0; c < width; ++c) repr.rows(r, c) = flat[static_cast<std::size_t>(r * width + c)];
  std::set<SampleId> unique(repr.ids.begin(), repr.ids.end());
  if (unique.size() != repr.ids.size()) fail(ErrorKind::Integrity, "duplicate IDs in representation payload");
  sort_by_id(repr);
  repr.validate();
  return repr;
}

PayloadKind classify_payload(ByteView payload) {
  const std::string text = to_text(payload.first(std::min<std::size_t>(payload.size(), 4096)));
  const auto nl = text.find('\n');
  const std::string header = text.substr(0, nl);
  const auto width = static_cast<int>(std::count(header.begin(), header.end(), ','));
  if (width >= 1 && header == feature_header(width)) return PayloadKind::Representation;
  if (header.rfind("id,", 0) == 0) return PayloadKind::FeatureTable;
  return PayloadKind::Unknown;
}

RepresentationFile extract_representation(const nn::FfnnModel& model, const FeatureTable& table, std::string source) {
  if (static_cast<int>(table.width()) != model.input_width())
    fail(ErrorKind::Shape, "table has " + std::to_string(table.width()) + " columns, model expects " +
                               std::to_string(model.input_width()));
  RepresentationFile repr;
  repr.source = std::move(source);
  repr.ids = table.ids;
  if (table.rows() == 0) {
    repr.rows.resize(0, model.representation_width());
    return repr;
  }
  repr.rows = nn::forward<double>(model, table.values).representation();
  sort_by_id(repr);
  repr.validate();
  return repr;
}

RepresentationFile concatenate_representations(const RepresentationFile& first, const RepresentationFile& second,
                                               std::string source) {
  std::map<SampleId, Eigen::Index> second_rows;
  for (std::size_t i = 0; i < second.ids.size(); ++i) second_rows[second.ids[i]] = static_cast<Eigen::Index>(i);
  std::map<SampleId, Eigen::Index> first_rows;
  for (std::size_t i = 0; i < first.ids.size(); ++i) first_rows[first.ids[i]] = static_cast<Eigen::Index>(i);

  std::vector<SampleId> missing;
  for (const auto& [id, _] : first_rows)
    if (!second_rows.count(id)) missing.push_back(id);
  for (const auto& [id, _] : second_rows)
    if (!first_rows.count(id)) missing.push_back(id);
  if (!missing.empty() || first_rows.size() != first.ids.size() || second_rows.size() != second.ids.size()) {
    std::string list;
    for (std::size_t i = 0; i < missing.size() && i < 20; ++i) list += (i ? ", " : "") + std::to_string(missing[i]);
    if (missing.size() > 20) list += ", ...";
    fail(ErrorKind::Join, missing.empty() ? std::string("duplicate IDs in a representation file")
                                          : "IDs present in only one representation file: " + list);
  }

  RepresentationFile out;
  out.source = std::move(source);
  out.rows.resize(static_cast<Eigen::Index>(first_rows.size()), first.rows.cols() + second.rows.cols());
  Eigen::Index r = 0;
  for (const auto& [id, i1] : first_rows) {
    out.ids.push_back(id);
    out.rows.row(r) << first.rows.row(i1), second.rows.row(second_rows.at(id));
    ++r;
  }
  return out;
}

FeatureTable to_feature_table(const RepresentationFile& repr) {
  FeatureTable t;
  t.ids = repr.ids;
  t.values = repr.rows;
  for (int i = 1; i <= repr.width(); ++i) t.columns.push_back("f" + std::to_string(i));
  return t;
}

}  // namespace splitchain

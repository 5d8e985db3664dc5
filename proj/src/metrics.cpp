#include "splitchain/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "splitchain/error.hpp"
#include "splitchain/numeric_text.hpp"

namespace splitchain {

namespace {

void check_pair(std::span<const int> y_true, std::span<const int> y_pred) {
  if (y_true.size() != y_pred.size())
    fail(ErrorKind::Shape, "label vectors differ in length (" + std::to_string(y_true.size()) + " vs " +
                               std::to_string(y_pred.size()) + ")");
  if (y_true.empty()) fail(ErrorKind::EmptyInput, "no labels to score");
  for (std::size_t i = 0; i < y_true.size(); ++i)
    if ((y_true[i] != 0 && y_true[i] != 1) || (y_pred[i] != 0 && y_pred[i] != 1))
      fail(ErrorKind::Label, "labels must be binary (position " + std::to_string(i) + ")");
}

std::string fixed(double v, int decimals) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

std::string pad_left(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

}  // namespace

double accuracy(std::span<const int> y_true, std::span<const int> y_pred) {
  check_pair(y_true, y_pred);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < y_true.size(); ++i) hits += y_true[i] == y_pred[i];
  return static_cast<double>(hits) / static_cast<double>(y_true.size());
}

ClassificationReport classification_report(std::span<const int> y_true, std::span<const int> y_pred) {
  check_pair(y_true, y_pred);
  std::array<std::array<std::size_t, 2>, 2> confusion{};  // [true][pred]
  for (std::size_t i = 0; i < y_true.size(); ++i) ++confusion[y_true[i]][y_pred[i]];

  ClassificationReport r;
  r.total = y_true.size();
  for (int c = 0; c < 2; ++c) {
    const std::size_t tp = confusion[c][c];
    const std::size_t fp = confusion[1 - c][c];
    const std::size_t fn = confusion[c][1 - c];
    ClassMetrics& m = r.per_class[c];
    m.support = tp + fn;
    if (tp + fp == 0) m.precision_undefined = true;
    else m.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    if (tp + fn == 0) m.recall_undefined = true;
    else m.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
    m.f1 = m.precision + m.recall > 0.0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
  }
  r.accuracy = static_cast<double>(confusion[0][0] + confusion[1][1]) / static_cast<double>(r.total);

  const double n = static_cast<double>(r.total);
  for (const auto& m : r.per_class) {
    r.macro.precision += m.precision / 2.0;
    r.macro.recall += m.recall / 2.0;
    r.macro.f1 += m.f1 / 2.0;
    const double w = static_cast<double>(m.support) / n;
    r.weighted.precision += w * m.precision;
    r.weighted.recall += w * m.recall;
    r.weighted.f1 += w * m.f1;
  }
  return r;
}

std::string ClassificationReport::to_text() const {
  std::ostringstream out;
  auto row = [&](const std::string& label, const std::string& p, const std::string& rc, const std::string& f,
                 std::size_t support) {
    out << pad_left(label, 12) << pad_left(p, 11) << pad_left(rc, 10) << pad_left(f, 10)
        << pad_left(std::to_string(support), 10) << '\n';
  };
  out << pad_left("", 12) << pad_left("precision", 11) << pad_left("recall", 10) << pad_left("f1-score", 10)
      << pad_left("support", 10) << "\n\n";
  for (int c = 0; c < 2; ++c) {
    const auto& m = per_class[c];
    row(std::to_string(c), fixed(m.precision, 2), fixed(m.recall, 2), fixed(m.f1, 2), m.support);
  }
  out << '\n';
  row("accuracy", "", "", fixed(accuracy, 4), total);
  row("macro avg", fixed(macro.precision, 2), fixed(macro.recall, 2), fixed(macro.f1, 2), total);
  row("weighted avg", fixed(weighted.precision, 2), fixed(weighted.recall, 2), fixed(weighted.f1, 2), total);
  return out.str();
}

std::string ClassificationReport::to_key_values(const std::string& prefix) const {
  std::ostringstream out;
  auto kv = [&](const std::string& key, const std::string& value) { out << prefix << key << '=' << value << '\n'; };
  kv("accuracy", format_double(accuracy));
  kv("total", std::to_string(total));
  for (int c = 0; c < 2; ++c) {
    const auto& m = per_class[c];
    const std::string k = "class" + std::to_string(c) + ".";
    kv(k + "precision", format_double(m.precision));
    kv(k + "recall", format_double(m.recall));
    kv(k + "f1", format_double(m.f1));
    kv(k + "support", std::to_string(m.support));
    kv(k + "precision_undefined", m.precision_undefined ? "1" : "0");
    kv(k + "recall_undefined", m.recall_undefined ? "1" : "0");
  }
  kv("macro.precision", format_double(macro.precision));
  kv("macro.recall", format_double(macro.recall));
  kv("macro.f1", format_double(macro.f1));
  kv("weighted.precision", format_double(weighted.precision));
  kv("weighted.recall", format_double(weighted.recall));
  kv("weighted.f1", format_double(weighted.f1));
  return out.str();
}

int convergence_epoch(const nn::TrainHistory& history, double fraction) {
  if (history.accuracy.empty()) fail(ErrorKind::EmptyInput, "empty training history");
  const double target = fraction * history.accuracy.back();
  for (std::size_t e = 0; e < history.accuracy.size(); ++e)
    if (history.accuracy[e] >= target) return static_cast<int>(e) + 1;
  return static_cast<int>(history.accuracy.size());
}

std::string curve_csv(const nn::TrainHistory& history) {
  if (history.loss.empty() || history.loss.size() != history.accuracy.size())
    fail(ErrorKind::EmptyInput, "training history is empty or ragged");
  std::string out = "epoch,loss,accuracy\n";
  for (std::size_t e = 0; e < history.loss.size(); ++e)
    out += std::to_string(e + 1) + ',' + format_double(history.loss[e]) + ',' + format_double(history.accuracy[e]) + '\n';
  return out;
}

namespace {

std::string curve_svg(const std::string& title, const nn::TrainHistory& h) {
  constexpr double W = 640, H = 360, L = 50, R = 20, T = 30, B = 40;
  const std::size_t n = h.loss.size();
  const double max_loss = std::max(1e-12, *std::max_element(h.loss.begin(), h.loss.end()));
  auto x = [&](std::size_t e) { return L + (W - L - R) * (n > 1 ? static_cast<double>(e) / (n - 1) : 0.0); };
  auto y = [&](double v) { return T + (H - T - B) * (1.0 - v); };
  auto poly = [&](auto value) {
    std::string pts;
    for (std::size_t e = 0; e < n; ++e) pts += fixed(x(e), 2) + ',' + fixed(y(value(e)), 2) + ' ';
    return pts;
  };
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    << "<text x=\"" << L << "\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\">" << title
    << " (accuracy blue, loss/max red)</text>\n"
    << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
    << "\" stroke=\"black\"/>\n"
    << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n"
    << "<polyline fill=\"none\" stroke=\"blue\" points=\"" << poly([&](std::size_t e) { return h.accuracy[e]; })
    << "\"/>\n"
    << "<polyline fill=\"none\" stroke=\"red\" points=\""
    << poly([&](std::size_t e) { return h.loss[e] / max_loss; }) << "\"/>\n"
    << "<text x=\"" << L << "\" y=\"" << H - 10 << "\" font-family=\"sans-serif\" font-size=\"12\">epochs 1.." << n
    << "</text>\n</svg>\n";
  return s.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
  out << text;
  if (!out) fail(ErrorKind::Io, "write failed for " + path.string());
}

}  // namespace

std::vector<std::filesystem::path> emit_curves(const std::vector<NamedHistory>& histories,
                                               const std::filesystem::path& dir, bool render_plot) {
  if (histories.empty()) fail(ErrorKind::EmptyInput, "no histories to emit");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorKind::Io, "cannot create " + dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> written;
  for (const auto& [name, history] : histories) {
    const std::string csv = curve_csv(history);
    const auto path = dir / (name + "_curve.csv");
    write_file(path, csv);
    written.push_back(path);
    if (render_plot) {
      const auto svg = dir / (name + "_curve.svg");
      write_file(svg, curve_svg(name, history));
      written.push_back(svg);
    }
  }
  return written;
}

}  // namespace splitchain

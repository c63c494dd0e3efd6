#include "wolbachia/io.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <json.hpp>
#include <openssl/evp.h>

#include "wolbachia/errors.hpp"
#include "wolbachia/numeric_format.hpp"

namespace wolbachia {

namespace fs = std::filesystem;

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  std::string hex;
  hex.reserve(2 * length);
  for (unsigned int i = 0; i < length; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

void atomic_write(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", tmp.string()));
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw std::runtime_error(fmt::format("write to '{}' failed", tmp.string()));
  }
  fs::rename(tmp, path);
}

std::string trajectory_csv(const std::vector<StateVector>& daily,
                           const ReleaseSchedule& schedule,
                           const ModelParameters& params) {
  std::string out = "day,release";
  for (auto n : kCompartmentNames) {
    out += ',';
    out += n;
  }
  out += ",N_h,I_v,I_v_w\n";
  for (std::size_t d = 0; d < daily.size(); ++d) {
    const auto& s = daily[d];
    out += std::to_string(d);
    out += ',';
    out += format_number(schedule.evaluate(static_cast<double>(d)));
    for (double v : s.values) {
      out += ',';
      out += format_number(v);
    }
    const DerivedAggregates agg = derived_aggregates(s, params);
    out += fmt::format(",{},{},{}\n", format_number(agg.N_h), format_number(agg.I_v),
                       format_number(agg.I_v_w));
  }
  return out;
}

namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

std::vector<StateVector> parse_trajectory_csv(std::string_view csv) {
  std::vector<StateVector> out;
  std::size_t pos = 0;
  bool header = true;
  std::vector<std::size_t> columns(kStateSize);
  while (pos < csv.size()) {
    auto end = csv.find('\n', pos);
    if (end == std::string_view::npos) end = csv.size();
    std::string_view line = csv.substr(pos, end - pos);
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (header) {
      for (std::size_t i = 0; i < kStateSize; ++i) {
        const auto it = std::find(cells.begin(), cells.end(), kCompartmentNames[i]);
        if (it == cells.end()) {
          throw ValidationError(
              fmt::format("trajectory CSV lacks column '{}'", kCompartmentNames[i]));
        }
        columns[i] = static_cast<std::size_t>(it - cells.begin());
      }
      header = false;
      continue;
    }
    StateVector s;
    for (std::size_t i = 0; i < kStateSize; ++i) {
      if (columns[i] >= cells.size()) throw ValidationError("trajectory CSV row too short");
      s.values[i] = parse_number(cells[columns[i]]);
    }
    out.push_back(s);
  }
  return out;
}

std::string cost_csv(const CostBreakdown& cost, const ReleaseSchedule& schedule) {
  std::string out = "day,release,release_cost,societal_cost,cumulative_total\n";
  double cumulative = 0.0;
  for (std::size_t i = 0; i < cost.daily_release.size(); ++i) {
    cumulative += cost.daily_release[i] + cost.daily_societal[i];
    out += fmt::format("{},{},{},{},{}\n", i + 1,
                       format_number(schedule.evaluate(static_cast<double>(i + 1))),
                       format_number(cost.daily_release[i]),
                       format_number(cost.daily_societal[i]), format_number(cumulative));
  }
  return out;
}

std::string policy_csv(const std::vector<double>& values, int horizon) {
  const int pieces = static_cast<int>(values.size());
  const int len = piece_length(horizon, pieces);
  std::string out = "piece,first_day,last_day,release\n";
  for (int i = 1; i <= pieces; ++i) {
    out += fmt::format("{},{},{},{}\n", i, len * (i - 1) + 1, std::min(len * i, horizon),
                       format_number(values[static_cast<std::size_t>(i - 1)]));
  }
  return out;
}

std::string pareto_csv(const ParetoFront& front, int pieces) {
  std::string out = "k,budget_cap,release_cost,societal_cost,failed,dominated";
  for (int i = 1; i <= pieces; ++i) out += fmt::format(",r_{}", i);
  out += '\n';
  for (const auto& p : front.points) {
    out += fmt::format("{},{},{},{},{},{}", p.k, format_number(p.budget_cap),
                       format_number(p.release_cost), format_number(p.societal_cost),
                       p.failed ? 1 : 0, p.dominated ? 1 : 0);
    for (int i = 0; i < pieces; ++i) {
      out += ',';
      if (static_cast<std::size_t>(i) < p.policy.size()) {
        out += format_number(p.policy[static_cast<std::size_t>(i)]);
      }
    }
    out += '\n';
  }
  return out;
}

namespace {

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string svg_line_chart(const std::vector<ChartSeries>& series,
                           std::string_view title, std::string_view x_label,
                           std::string_view y_label) {
  constexpr double width = 720, height = 420;
  constexpr double left = 90, right = 160, top = 40, bottom = 60;
  double x0 = INFINITY, x1 = -INFINITY, y0 = 0.0, y1 = -INFINITY;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  }
  if (!(x1 > x0)) {
    x0 = 0.0;
    x1 = 1.0;
  }
  if (!(y1 > y0)) y1 = y0 + 1.0;
  const double pw = width - left - right;
  const double ph = height - top - bottom;
  auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return top + ph - (y - y0) / (y1 - y0) * ph; };

  static constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c",
                                            "#ff7f0e", "#9467bd", "#8c564b"};
  std::string out = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" "
      "viewBox=\"0 0 {} {}\">\n",
      width, height, width, height);
  out += fmt::format("<rect width=\"{}\" height=\"{}\" fill=\"white\"/>\n", width, height);
  out += fmt::format(
      "<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      "font-size=\"15\">{}</text>\n",
      left + pw / 2, xml_escape(title));
  out += fmt::format(
      "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" "
      "stroke=\"black\"/>\n",
      left, top, pw, ph);
  for (int i = 0; i <= 4; ++i) {
    const double xv = x0 + (x1 - x0) * i / 4.0;
    const double yv = y0 + (y1 - y0) * i / 4.0;
    out += fmt::format(
        "<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\" "
        "font-family=\"sans-serif\" font-size=\"11\">{:.4g}</text>\n",
        px(xv), top + ph + 16, xv);
    out += fmt::format(
        "<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"end\" "
        "font-family=\"sans-serif\" font-size=\"11\">{:.4g}</text>\n",
        left - 6, py(yv) + 4, yv);
  }
  out += fmt::format(
      "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      "font-size=\"12\">{}</text>\n",
      left + pw / 2, height - 18, xml_escape(x_label));
  out += fmt::format(
      "<text x=\"18\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      "font-size=\"12\" transform=\"rotate(-90 18 {})\">{}</text>\n",
      top + ph / 2, top + ph / 2, xml_escape(y_label));
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = kColors[k % std::size(kColors)];
    std::string points;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      points += fmt::format("{:.2f},{:.2f} ", px(s.x[i]), py(s.y[i]));
    }
    if (!points.empty()) points.pop_back();
    out += fmt::format(
        "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
        color, points);
    out += fmt::format(
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" "
        "fill=\"{}\">{}</text>\n",
        left + pw + 10, top + 14 + 16 * static_cast<double>(k), color,
        xml_escape(s.label));
  }
  out += "</svg>\n";
  return out;
}

OutputWriter::OutputWriter(fs::path dir, RunRecord record)
    : dir_(std::move(dir)), record_(std::move(record)) {
  fs::create_directories(dir_);
}

void OutputWriter::write(const std::string& relative, std::string_view content) {
  atomic_write(dir_ / relative, content);
  auto it = std::find_if(record_.outputs.begin(), record_.outputs.end(),
                         [&](const auto& e) { return e.path == relative; });
  OutputEntry entry{relative, sha256_hex(content), content.size()};
  if (it == record_.outputs.end()) {
    record_.outputs.push_back(std::move(entry));
  } else {
    *it = std::move(entry);
  }
}

std::string OutputWriter::finish() {
  nlohmann::ordered_json doc;
  doc["command"] = record_.command;
  doc["scenario_sha256"] = record_.scenario_sha256;
  doc["seed"] = std::to_string(record_.seed);
  if (record_.started) doc["started"] = *record_.started;
  if (record_.finished) doc["finished"] = *record_.finished;
  auto outputs = nlohmann::ordered_json::array();
  for (const auto& e : record_.outputs) {
    outputs.push_back({{"path", e.path}, {"sha256", e.sha256}, {"bytes", e.bytes}});
  }
  doc["outputs"] = outputs;
  const std::string text = doc.dump(2) + "\n";
  atomic_write(dir_ / "manifest.json", text);
  return text;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace wolbachia

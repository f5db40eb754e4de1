#include "hocm/emit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>

namespace hocm {

using nlohmann::json;

std::string format_number(double x) {
  if (x == 0.0) x = 0.0;  // drops the sign of -0
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

void write_rows_csv(std::ostream& out, const std::vector<ScanRow>& rows) {
  out << "xi,vector,order,bipartition,nu_min,class,verdict,leakage_flag\n";
  for (const auto& r : rows) {
    out << format_number(r.xi) << ',' << r.vector << ',' << r.order << ',' << r.bipartition << ','
        << format_number(r.nu_min) << ',' << to_string(r.sufficiency) << ',' << to_string(r.verdict)
        << ',' << (r.leakage_flag ? "true" : "false") << '\n';
  }
}

void write_thresholds_csv(std::ostream& out, const std::vector<Crossing>& crossings) {
  out << "vector,bipartition,crossing_xi,direction\n";
  for (const auto& c : crossings)
    out << c.vector << ',' << c.bipartition << ',' << format_number(c.xi) << ',' << c.direction << '\n';
}

json result_to_json(const ScanResult& result) {
  json rows = json::array();
  for (const auto& r : result.rows) {
    rows.push_back({{"xi", r.xi},
                    {"vector", r.vector},
                    {"order", r.order},
                    {"bipartition", r.bipartition},
                    {"nu_min", r.nu_min},
                    {"nu_block", r.nu_block},
                    {"class", to_string(r.sufficiency)},
                    {"verdict", to_string(r.verdict)},
                    {"leakage_flag", r.leakage_flag},
                    {"primary", r.primary},
                    {"reference", r.reference}});
  }
  json thresholds = json::array();
  for (const auto& c : result.crossings) {
    thresholds.push_back({{"vector", c.vector},
                          {"bipartition", c.bipartition},
                          {"crossing_xi", c.xi},
                          {"bracket", {c.lo, c.hi}},
                          {"direction", c.direction}});
  }
  json points = json::array();
  for (const auto& p : result.points) {
    points.push_back({{"xi", p.xi},
                      {"norm_drift", p.norm_drift},
                      {"leakage", p.leakage},
                      {"steps", p.steps},
                      {"n_a", p.n_a},
                      {"n_b", p.n_b},
                      {"n_p", p.n_p},
                      {"min_uncertainty", p.min_uncertainty},
                      {"max_mean", p.max_mean}});
  }
  return {{"scenario", result.scenario}, {"rows", rows}, {"thresholds", thresholds}, {"points", points}};
}

json report_to_json(const VerifyReport& report) {
  json checks = json::array();
  for (const auto& c : report.checks)
    checks.push_back({{"name", c.name}, {"passed", c.passed}, {"skipped", c.skipped}, {"detail", c.detail}});
  return {{"scenario", report.scenario}, {"passed", report.passed()}, {"checks", checks}};
}

void write_svg(std::ostream& out, const ScanResult& result) {
  constexpr double W = 720, H = 440, L = 70, R = 200, T = 30, B = 50;
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                  "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f"};

  std::vector<std::string> order;
  std::map<std::string, std::vector<std::pair<double, double>>> series;
  std::map<std::string, bool> is_reference;
  for (const auto& r : result.rows) {
    if (!r.primary) continue;
    const std::string key = r.vector + " " + r.bipartition;
    if (!series.count(key)) order.push_back(key);
    series[key].emplace_back(r.xi, r.nu_min);
    is_reference[key] = r.reference;
  }
  double x0 = 0, x1 = 1, y0 = 0, y1 = 0;
  bool first = true;
  for (const auto& [key, pts] : series) {
    for (const auto& [x, y] : pts) {
      if (first) x0 = x1 = x, first = false;
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    }
  }
  if (x1 <= x0) x1 = x0 + 1;
  if (y1 <= y0) y1 = y0 + 1;
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;
  auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return std::string(buf);
  };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << L << "\" y=\"18\" font-size=\"13\">" << result.scenario << "</text>\n";
  out << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\""
      << H - T - B << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double x = x0 + i * (x1 - x0) / 4, y = y0 + i * (y1 - y0) / 4;
    out << "<text x=\"" << num(px(x)) << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\">"
        << format_number(std::round(x * 1000) / 1000) << "</text>\n";
    out << "<text x=\"" << L - 6 << "\" y=\"" << num(py(y) + 4) << "\" text-anchor=\"end\">"
        << format_number(std::round(y * 1000) / 1000) << "</text>\n";
  }
  out << "<text x=\"" << num((L + W - R) / 2) << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">xi</text>\n";
  out << "<text x=\"16\" y=\"" << num((T + H - B) / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << num((T + H - B) / 2) << ")\">nu_min</text>\n";
  if (y0 < 0 && y1 > 0)
    out << "<line x1=\"" << L << "\" y1=\"" << num(py(0)) << "\" x2=\"" << W - R << "\" y2=\"" << num(py(0))
        << "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto& key = order[i];
    const char* color = palette[i % std::size(palette)];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"";
    if (is_reference[key]) out << " stroke-dasharray=\"6 3\"";
    out << " points=\"";
    for (std::size_t j = 0; j < series[key].size(); ++j) {
      const auto& [x, y] = series[key][j];
      out << (j ? " " : "") << num(px(x)) << ',' << num(py(y));
    }
    out << "\"/>\n";
    const double ly = T + 14 * (i + 1);
    out << "<line x1=\"" << W - R + 10 << "\" y1=\"" << ly - 4 << "\" x2=\"" << W - R + 30 << "\" y2=\""
        << ly - 4 << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << W - R + 35 << "\" y=\"" << ly << "\">" << key << "</text>\n";
  }
  out << "</svg>\n";
}

OutputFormat parse_format(const std::string& name) {
  if (name == "csv") return OutputFormat::Csv;
  if (name == "json") return OutputFormat::Json;
  if (name == "svg") return OutputFormat::Svg;
  throw EmitError("unknown format '" + name + "' (expected csv, json or svg)");
}

namespace {

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw EmitError("cannot write '" + p.string() + "'");
  return f;
}

}  // namespace

std::vector<std::string> emit(const ScanResult& result, const std::string& dir, OutputFormat format) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw EmitError("cannot create '" + dir + "': " + ec.message());
  const fs::path base = fs::path(dir) / result.scenario;
  std::vector<std::string> written;
  switch (format) {
    case OutputFormat::Csv: {
      const fs::path rows = base.string() + ".csv", thr = base.string() + "_thresholds.csv";
      auto f = open_out(rows);
      write_rows_csv(f, result.rows);
      auto g = open_out(thr);
      write_thresholds_csv(g, result.crossings);
      written = {rows.string(), thr.string()};
      break;
    }
    case OutputFormat::Json: {
      const fs::path p = base.string() + ".json";
      auto f = open_out(p);
      f << result_to_json(result).dump(2) << '\n';
      written = {p.string()};
      break;
    }
    case OutputFormat::Svg: {
      const fs::path p = base.string() + ".svg";
      auto f = open_out(p);
      write_svg(f, result);
      written = {p.string()};
      break;
    }
  }
  return written;
}

}  // namespace hocm

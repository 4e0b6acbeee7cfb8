// Copyright (C) 2026 The Paralab Authors
// SPDX-License-Identifier: Apache-2.0

#include "paralab/evaluate/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "paralab/common/error.hpp"
#include "paralab/common/format.hpp"
#include "paralab/common/hash.hpp"

namespace paralab::evaluate {

void EvalReport::validate() const {
  for (const auto& s : series) {
    if (s.x.size() != s.y.size()) fail(ErrorCode::InvalidArgument, "series " + s.name + " is ragged");
    for (std::size_t i = 1; i < s.x.size(); ++i) {
      if (!(s.x[i] > s.x[i - 1])) {
        fail(ErrorCode::InvalidArgument, "series " + s.name + " has non-increasing x");
      }
    }
  }
}

const Series* EvalReport::find(std::string_view name) const {
  for (const auto& s : series) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

std::string EvalReport::to_csv() const {
  validate();
  std::string out = "series,metric,x,seed,value\n";
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      out += csv_field(s.name) + "," + csv_field(s.metric) + "," + format_number(s.x[i]) + "," +
             std::to_string(s.seed) + "," + format_number(s.y[i]) + "\n";
    }
  }
  return out;
}

nlohmann::json EvalReport::to_json() const {
  validate();
  nlohmann::json js = nlohmann::json::array();
  for (const auto& s : series) {
    js.push_back({{"name", s.name}, {"metric", s.metric}, {"seed", s.seed}, {"x", s.x}, {"y", s.y}});
  }
  return {{"series", js}, {"metadata", metadata}};
}

EvalReport EvalReport::from_json(const nlohmann::json& j) {
  EvalReport r;
  try {
    for (const auto& s : j.at("series")) {
      r.series.push_back({s.at("name").get<std::string>(), s.at("metric").get<std::string>(),
                          s.value("seed", std::uint64_t{0}), s.at("x").get<std::vector<double>>(),
                          s.at("y").get<std::vector<double>>()});
    }
    if (j.contains("metadata")) r.metadata = j["metadata"];
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::MalformedJson, std::string("report: ") + e.what());
  }
  r.validate();
  return r;
}

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// Round tick step: 1, 2 or 5 times a power of ten.
double nice_step(double span, int target) {
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (raw <= m * mag) return m * mag;
  }
  return 10.0 * mag;
}

}  // namespace

std::string render_curves_svg(const EvalReport& report, std::string_view title,
                              std::string_view x_label, std::string_view y_label) {
  report.validate();
  const double W = 720, H = 440, L = 70, R = 210, T = 40, B = 55;
  const double pw = W - L - R, ph = H - T - B;
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
  for (const auto& s : report.series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  }
  if (!std::isfinite(xmin)) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  if (xmax == xmin) xmin -= 0.5, xmax += 0.5;
  if (ymax == ymin) ymin -= 0.5, ymax += 0.5;
  const double ystep = nice_step(ymax - ymin, 5);
  ymin = std::floor(ymin / ystep) * ystep;
  ymax = std::ceil(ymax / ystep) * ystep;
  auto px = [&](double x) { return L + (x - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double y) { return T + ph - (y - ymin) / (ymax - ymin) * ph; };

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"720\" height=\"440\" "
       "viewBox=\"0 0 720 440\" font-family=\"sans-serif\" font-size=\"11\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  if (!title.empty()) {
    s += "<text x=\"" + fmt("%.1f", L) + "\" y=\"24\" font-size=\"14\">" + escape_xml(title) +
         "</text>\n";
  }
  for (double y = ymin; y <= ymax + ystep * 1e-9; y += ystep) {
    s += "<line x1=\"" + fmt("%.2f", L) + "\" y1=\"" + fmt("%.2f", py(y)) + "\" x2=\"" +
         fmt("%.2f", L + pw) + "\" y2=\"" + fmt("%.2f", py(y)) +
         "\" stroke=\"#e0e0e0\"/>\n";
    s += "<text x=\"" + fmt("%.2f", L - 6) + "\" y=\"" + fmt("%.2f", py(y) + 4) +
         "\" text-anchor=\"end\">" + format_number(std::round(y / ystep) * ystep) + "</text>\n";
  }
  const double xstep = nice_step(xmax - xmin, 6);
  for (double x = std::ceil(xmin / xstep) * xstep; x <= xmax + xstep * 1e-9; x += xstep) {
    s += "<text x=\"" + fmt("%.2f", px(x)) + "\" y=\"" + fmt("%.2f", T + ph + 16) +
         "\" text-anchor=\"middle\">" + format_number(std::round(x / xstep) * xstep) + "</text>\n";
  }
  s += "<rect x=\"" + fmt("%.2f", L) + "\" y=\"" + fmt("%.2f", T) + "\" width=\"" + fmt("%.2f", pw) +
       "\" height=\"" + fmt("%.2f", ph) + "\" fill=\"none\" stroke=\"#333333\"/>\n";
  s += "<text x=\"" + fmt("%.2f", L + pw / 2) + "\" y=\"" + fmt("%.2f", H - 12) +
       "\" text-anchor=\"middle\">" + escape_xml(x_label) + "</text>\n";
  s += "<text x=\"16\" y=\"" + fmt("%.2f", T + ph / 2) + "\" text-anchor=\"middle\" " +
       "transform=\"rotate(-90 16 " + fmt("%.2f", T + ph / 2) + ")\">" + escape_xml(y_label) +
       "</text>\n";

  for (std::size_t k = 0; k < report.series.size(); ++k) {
    const auto& se = report.series[k];
    const std::string color = kPalette[k % std::size(kPalette)];
    std::string pts;
    for (std::size_t i = 0; i < se.x.size(); ++i) {
      pts += fmt("%.2f", px(se.x[i])) + "," + fmt("%.2f", py(se.y[i])) + " ";
    }
    if (se.x.size() > 1) {
      s += "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.8\" points=\"" + pts +
           "\"/>\n";
    }
    for (std::size_t i = 0; i < se.x.size(); ++i) {
      s += "<circle cx=\"" + fmt("%.2f", px(se.x[i])) + "\" cy=\"" + fmt("%.2f", py(se.y[i])) +
           "\" r=\"2.5\" fill=\"" + color + "\"/>\n";
    }
    const double ly = T + 10 + 16.0 * static_cast<double>(k);
    s += "<line x1=\"" + fmt("%.2f", L + pw + 15) + "\" y1=\"" + fmt("%.2f", ly) + "\" x2=\"" +
         fmt("%.2f", L + pw + 35) + "\" y2=\"" + fmt("%.2f", ly) + "\" stroke=\"" + color +
         "\" stroke-width=\"2\"/>\n";
    s += "<text x=\"" + fmt("%.2f", L + pw + 40) + "\" y=\"" + fmt("%.2f", ly + 4) + "\">" +
         escape_xml(se.name) + "</text>\n";
  }
  s += "</svg>\n";
  return s;
}

void render_curves(const EvalReport& report, const std::filesystem::path& path,
                   std::string_view title, std::string_view x_label, std::string_view y_label) {
  write_file(path, render_curves_svg(report, title, x_label, y_label));
}

}  // namespace paralab::evaluate

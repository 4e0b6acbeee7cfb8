// Copyright (C) 2026 The Paralab Authors
// SPDX-License-Identifier: Apache-2.0

#include "paralab/correlate/map.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>

#include "paralab/common/error.hpp"
#include "paralab/common/format.hpp"
#include "paralab/common/hash.hpp"
#include "paralab/tensorio/binary_io.hpp"

namespace paralab::correlate {

namespace {

constexpr std::string_view kMagic = "CMAP";
constexpr std::uint32_t kVersion = 1;

constexpr std::array<std::string_view, 6> kKindNames = {
    "paracorr", "modelcorr", "poscorr", "tokencorr", "random-pair", "full-random"};

// Column z-scores scaled so that z_a' z_b is the correlation; zero-variance
// columns stay all-zero and are reported in `flat`.
Matrix standardize(const Matrix& m, std::vector<bool>& flat) {
  Matrix z(m.rows(), m.cols());
  flat.assign(static_cast<std::size_t>(m.cols()), false);
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    Moments mo;
    for (Eigen::Index r = 0; r < m.rows(); ++r) mo.add(m(r, c));
    if (mo.m2 <= 0.0) {
      z.col(c).setZero();
      flat[static_cast<std::size_t>(c)] = true;
      continue;
    }
    const double inv = 1.0 / std::sqrt(mo.m2);
    for (Eigen::Index r = 0; r < m.rows(); ++r) z(r, c) = (m(r, c) - mo.mean) * inv;
  }
  return z;
}

Matrix ranked(const Matrix& m) {
  Matrix out(m.rows(), m.cols());
  std::vector<double> col(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) col[static_cast<std::size_t>(r)] = m(r, c);
    const auto rk = average_ranks(col);
    for (Eigen::Index r = 0; r < m.rows(); ++r) out(r, c) = rk[static_cast<std::size_t>(r)];
  }
  return out;
}

void check_samples(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) {
    fail(ErrorCode::LengthMismatch, "conditions have " + std::to_string(a.rows()) + " and " +
                                        std::to_string(b.rows()) + " samples");
  }
  if (a.rows() < 2) fail(ErrorCode::TooFewSamples, "correlation needs at least two sentences");
}

}  // namespace

std::string_view kind_name(ExperimentKind k) { return kKindNames[static_cast<std::size_t>(k)]; }

ExperimentKind parse_kind(std::string_view name) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i) {
    if (kKindNames[i] == name) return static_cast<ExperimentKind>(i);
  }
  fail(ErrorCode::InvalidArgument, "unknown experiment kind '" + std::string(name) + "'");
}

CorrelationMap correlation_map(const Matrix& a, const Matrix& b, Method method) {
  check_samples(a, b);
  std::vector<bool> flat_a, flat_b;
  const Matrix za = method == Method::Spearman ? standardize(ranked(a), flat_a) : standardize(a, flat_a);
  const Matrix zb = method == Method::Spearman ? standardize(ranked(b), flat_b) : standardize(b, flat_b);
  CorrelationMap map;
  map.method = method;
  map.values.noalias() = za.transpose() * zb;
  map.values = map.values.cwiseMax(-1.0).cwiseMin(1.0);
  map.degenerate.assign(map.rows() * map.cols(), 0);
  for (std::size_t i = 0; i < map.rows(); ++i) {
    for (std::size_t j = 0; j < map.cols(); ++j) {
      if (flat_a[i] || flat_b[j]) map.degenerate[i * map.cols() + j] = 1;
    }
  }
  return map;
}

std::vector<Correlation> paired_correlations(const Matrix& a, const Matrix& b, Method method) {
  check_samples(a, b);
  if (a.cols() != b.cols()) fail(ErrorCode::NonSquare, "conditions differ in neuron count");
  std::vector<Correlation> out;
  std::vector<double> x(static_cast<std::size_t>(a.rows())), y(x.size());
  for (Eigen::Index c = 0; c < a.cols(); ++c) {
    for (Eigen::Index r = 0; r < a.rows(); ++r) {
      x[static_cast<std::size_t>(r)] = a(r, c);
      y[static_cast<std::size_t>(r)] = b(r, c);
    }
    out.push_back(correlate(method, x, y));
  }
  return out;
}

std::vector<double> diag(const CorrelationMap& map) {
  if (map.rows() != map.cols() || map.taps_a != map.taps_b) {
    fail(ErrorCode::NonSquare, "diagonal needs a square map over matching taps");
  }
  std::vector<double> d(map.rows());
  for (std::size_t i = 0; i < d.size(); ++i) {
    d[i] = map.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i));
  }
  return d;
}

std::string encode_map(const CorrelationMap& map) {
  tensorio::ByteWriter w;
  w.bytes(kMagic);
  w.u32(kVersion);
  w.u8(static_cast<std::uint8_t>(map.kind));
  w.u8(static_cast<std::uint8_t>(map.method));
  w.u32(static_cast<std::uint32_t>(map.rows()));
  w.u32(static_cast<std::uint32_t>(map.cols()));
  for (const auto* taps : {&map.taps_a, &map.taps_b}) {
    w.u32(static_cast<std::uint32_t>(taps->size()));
    for (const auto& t : *taps) w.string(tensorio::tap_label(t));
  }
  w.u32(static_cast<std::uint32_t>(map.seeds.size()));
  for (auto s : map.seeds) w.u64(s);
  for (Eigen::Index i = 0; i < map.values.size(); ++i) w.f64(map.values.data()[i]);
  for (auto f : map.degenerate) w.u8(f);
  return w.take();
}

CorrelationMap decode_map(std::string_view bytes) {
  tensorio::ByteReader r(bytes);
  if (bytes.size() < 4 || r.bytes(4) != kMagic) fail(ErrorCode::BadMagic, "not a CMAP file");
  if (const auto v = r.u32(); v != kVersion) {
    fail(ErrorCode::UnsupportedVersion, "CMAP version " + std::to_string(v));
  }
  CorrelationMap map;
  const auto kind = r.u8();
  const auto method = r.u8();
  if (kind >= kKindNames.size() || method > 1) fail(ErrorCode::SizeMismatch, "bad CMAP header");
  map.kind = static_cast<ExperimentKind>(kind);
  map.method = static_cast<Method>(method);
  const auto rows = r.u32(), cols = r.u32();
  for (auto* taps : {&map.taps_a, &map.taps_b}) {
    const auto n = r.u32();
    for (std::uint32_t i = 0; i < n; ++i) taps->push_back(tensorio::parse_tap(r.string()));
  }
  const auto n_seeds = r.u32();
  for (std::uint32_t i = 0; i < n_seeds; ++i) map.seeds.push_back(r.u64());
  const std::size_t cells = static_cast<std::size_t>(rows) * cols;
  if (r.remaining() != cells * 9) fail(ErrorCode::SizeMismatch, "CMAP payload size mismatch");
  map.values.resize(rows, cols);
  for (std::size_t i = 0; i < cells; ++i) map.values.data()[i] = r.f64();
  map.degenerate.resize(cells);
  for (auto& f : map.degenerate) f = r.u8();
  return map;
}

void write_map(const CorrelationMap& map, const std::filesystem::path& path) {
  write_file(path, encode_map(map));
}

CorrelationMap read_map(const std::filesystem::path& path) { return decode_map(read_file(path)); }

std::string map_to_csv(const CorrelationMap& map) {
  std::string out = "neuron";
  for (std::size_t j = 0; j < map.cols(); ++j) out += "," + std::to_string(j);
  out += '\n';
  for (std::size_t i = 0; i < map.rows(); ++i) {
    out += std::to_string(i);
    for (std::size_t j = 0; j < map.cols(); ++j) {
      out += ',';
      out += format_number(map.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    }
    out += '\n';
  }
  return out;
}

std::string diverging_color(double v) {
  v = std::clamp(v, -1.0, 1.0);
  // white at 0, (33,102,172) at -1, (178,24,43) at +1
  const double t = std::abs(v);
  const int tr = v < 0 ? 33 : 178, tg = v < 0 ? 102 : 24, tb = v < 0 ? 172 : 43;
  auto mix = [&](int target) {
    return static_cast<int>(std::lround(255.0 + (target - 255.0) * t));
  };
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", mix(tr), mix(tg), mix(tb));
  return buf;
}

std::string render_heatmap_svg(const CorrelationMap& map, std::string_view title) {
  const double plot = 640.0;
  const double margin_left = 150.0, margin_top = 50.0, legend_w = 90.0, margin_bottom = 140.0;
  const double cw = map.cols() ? plot / static_cast<double>(map.cols()) : plot;
  const double ch = map.rows() ? plot / static_cast<double>(map.rows()) : plot;
  const double width = margin_left + plot + legend_w, height = margin_top + plot + margin_bottom;
  std::string s;
  s.reserve(map.rows() * map.cols() * 90 + 4096);
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" "
                "viewBox=\"0 0 %.0f %.0f\" font-family=\"sans-serif\" font-size=\"11\">\n",
                width, height, width, height);
  s += buf;
  s += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  std::string heading = title.empty() ? std::string(kind_name(map.kind)) + " (" +
                                            std::string(method_name(map.method)) + ")"
                                      : std::string(title);
  std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"28\" font-size=\"15\">", margin_left);
  s += buf;
  s += escape_xml(heading) + "</text>\n";
  s += "<g shape-rendering=\"crispEdges\">\n";
  for (std::size_t i = 0; i < map.rows(); ++i) {
    for (std::size_t j = 0; j < map.cols(); ++j) {
      std::snprintf(buf, sizeof buf,
                    "<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" fill=\"%s\"/>\n",
                    margin_left + cw * static_cast<double>(j),
                    margin_top + ch * static_cast<double>(i), cw + 0.02, ch + 0.02,
                    diverging_color(map.values(static_cast<Eigen::Index>(i),
                                               static_cast<Eigen::Index>(j)))
                        .c_str());
      s += buf;
    }
  }
  s += "</g>\n";
  std::snprintf(buf, sizeof buf,
                "<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" fill=\"none\" "
                "stroke=\"#333333\"/>\n",
                margin_left, margin_top, plot, plot);
  s += buf;

  // Tap bands along each axis.
  auto axis = [&](const std::vector<tensorio::TapId>& taps, std::size_t n, bool rows) {
    if (taps.empty() || n % taps.size() != 0) return;
    const std::size_t per = n / taps.size();
    const double step = rows ? ch : cw;
    for (std::size_t t = 0; t < taps.size(); ++t) {
      const double mid = (static_cast<double>(t * per) + static_cast<double>(per) / 2.0) * step;
      const std::string label = escape_xml(tensorio::tap_label(taps[t]));
      if (rows) {
        std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\">",
                      margin_left - 6, margin_top + mid + 4);
      } else {
        std::snprintf(buf, sizeof buf,
                      "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\" "
                      "transform=\"rotate(-60 %.1f %.1f)\">",
                      margin_left + mid, margin_top + plot + 12, margin_left + mid,
                      margin_top + plot + 12);
      }
      s += buf;
      s += label + "</text>\n";
      if (t > 0) {
        const double at = static_cast<double>(t * per) * step;
        if (rows) {
          std::snprintf(buf, sizeof buf,
                        "<line x1=\"%.1f\" y1=\"%.2f\" x2=\"%.1f\" y2=\"%.2f\" stroke=\"#555555\" "
                        "stroke-width=\"0.5\"/>\n",
                        margin_left, margin_top + at, margin_left + plot, margin_top + at);
        } else {
          std::snprintf(buf, sizeof buf,
                        "<line x1=\"%.2f\" y1=\"%.1f\" x2=\"%.2f\" y2=\"%.1f\" stroke=\"#555555\" "
                        "stroke-width=\"0.5\"/>\n",
                        margin_left + at, margin_top, margin_left + at, margin_top + plot);
        }
        s += buf;
      }
    }
  };
  axis(map.taps_a, map.rows(), true);
  axis(map.taps_b, map.cols(), false);

  // Color legend.
  const double lx = margin_left + plot + 25, lw = 18;
  for (int k = 0; k < 100; ++k) {
    const double v = 1.0 - 2.0 * (k + 0.5) / 100.0;
    std::snprintf(buf, sizeof buf,
                  "<rect x=\"%.1f\" y=\"%.2f\" width=\"%.1f\" height=\"%.2f\" fill=\"%s\"/>\n", lx,
                  margin_top + plot * k / 100.0, lw, plot / 100.0 + 0.02,
                  diverging_color(v).c_str());
    s += buf;
  }
  for (double v : {1.0, 0.5, 0.0, -0.5, -1.0}) {
    std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\">%+.1f</text>\n", lx + lw + 4,
                  margin_top + plot * (1.0 - v) / 2.0 + 4, v);
    s += buf;
  }
  s += "</svg>\n";
  return s;
}

void render_heatmap(const CorrelationMap& map, const std::filesystem::path& path,
                    std::string_view title) {
  write_file(path, render_heatmap_svg(map, title));
}

}  // namespace paralab::correlate

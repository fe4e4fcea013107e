#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "riesz/audit.hpp"
#include "riesz/error.hpp"
#include "riesz/measure.hpp"

namespace riesz::io {

/// Shortest round-trip text for a double (17 significant digits).
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline double parse_double(const std::string& s, std::size_t line) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  // from_chars, unlike stod, accepts subnormals and ignores the locale
  const char* first = s.data();
  const char* last = first + s.size();
  if (first != last && *first == '+') ++first;
  double v = 0.0;
  const auto [end, ec] = std::from_chars(first, last, v);
  if (first == last || ec != std::errc() || end != last) {
    throw FormatError("line " + std::to_string(line) + ": not a number: '" + s + "'");
  }
  return v;
}

/// Comma-separated table without quoting (fields never contain commas).
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    throw FormatError("missing column '" + name + "'");
  }
};

inline std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

inline CsvTable read_csv(std::istream& in) {
  CsvTable t;
  std::string line;
  std::size_t no = 0;
  while (std::getline(in, line)) {
    ++no;
    if (line.empty() || line == "\r") continue;
    auto f = split(line);
    if (t.header.empty()) {
      t.header = std::move(f);
      continue;
    }
    if (f.size() != t.header.size()) {
      throw FormatError("line " + std::to_string(no) + ": expected " + std::to_string(t.header.size()) + " fields, got " +
                        std::to_string(f.size()));
    }
    t.rows.push_back(std::move(f));
  }
  if (t.header.empty()) throw FormatError("empty CSV input");
  return t;
}

inline void write_csv(std::ostream& out, const CsvTable& t) {
  auto row = [&](const std::vector<std::string>& r) {
    for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << r[i];
    out << '\n';
  };
  row(t.header);
  for (const auto& r : t.rows) row(r);
}

// ---------------------------------------------------------------- measures
//
// atomic:                     grid (n = 1):
//   kind,n                      kind,n,origin1,spacing,extent1
//   atomic,<n>                  grid,1,<o>,<h>,<E>
//   x1,...,xn,weight            i1,weight
//   <coords>,<w>                <index>,<w>      (nonzero cells only)
//
// grid (n = 2) carries origin1,origin2 and extent1,extent2 and rows i1,i2,weight.

inline void write_measure(std::ostream& out, const Measure& m) {
  if (const auto* a = std::get_if<AtomicMeasure>(&m)) {
    out << "kind,n\natomic," << a->dim() << '\n';
    for (int d = 0; d < a->dim(); ++d) out << 'x' << d + 1 << ',';
    out << "weight\n";
    for (std::size_t i = 0; i < a->size(); ++i) {
      for (int d = 0; d < a->dim(); ++d) out << format_double(a->point(i)[d]) << ',';
      out << format_double(a->weight(i)) << '\n';
    }
    return;
  }
  const auto& g = std::get<GridMeasure>(m);
  if (g.dim() == 1) {
    out << "kind,n,origin1,spacing,extent1\ngrid,1," << format_double(g.origin()[0]) << ',' << format_double(g.spacing())
        << ',' << g.extent()[0] << "\ni1,weight\n";
  } else {
    out << "kind,n,origin1,origin2,spacing,extent1,extent2\ngrid,2," << format_double(g.origin()[0]) << ','
        << format_double(g.origin()[1]) << ',' << format_double(g.spacing()) << ',' << g.extent()[0] << ','
        << g.extent()[1] << "\ni1,i2,weight\n";
  }
  for (auto k : g.nonzero()) {
    const auto idx = g.unflatten(k);
    out << idx[0] << ',';
    if (g.dim() == 2) out << idx[1] << ',';
    out << format_double(g.weights()[k]) << '\n';
  }
}

inline Measure read_measure(std::istream& in) {
  std::vector<std::pair<std::size_t, std::vector<std::string>>> lines;
  std::string line;
  std::size_t no = 0;
  while (std::getline(in, line)) {
    ++no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    lines.emplace_back(no, split(line));
  }
  auto fail = [](std::size_t l, const std::string& msg) -> FormatError {
    return FormatError("line " + std::to_string(l) + ": " + msg);
  };
  if (lines.size() < 3) throw FormatError("measure CSV needs a header, a metadata row and a column row");
  const auto& head = lines[0].second;
  if (head.size() < 2 || head[0] != "kind" || head[1] != "n") throw fail(lines[0].first, "header must start with kind,n");
  const auto& meta = lines[1].second;
  if (meta.size() != head.size()) throw fail(lines[1].first, "metadata row does not match header");
  const double nd = parse_double(meta[1], lines[1].first);
  const int n = static_cast<int>(nd);
  if (nd != n || n < 1) throw fail(lines[1].first, "n must be a positive integer");
  auto as_index = [&](const std::string& s, std::size_t l) {
    const double v = parse_double(s, l);
    if (v < 0 || v != std::floor(v)) throw fail(l, "index must be a nonnegative integer");
    return static_cast<std::size_t>(v);
  };

  if (meta[0] == "atomic") {
    if (head.size() != 2) throw fail(lines[0].first, "atomic header is kind,n");
    if (lines[2].second.size() != static_cast<std::size_t>(n) + 1) throw fail(lines[2].first, "expected n coordinate columns and weight");
    std::vector<double> coords, weights;
    for (std::size_t i = 3; i < lines.size(); ++i) {
      const auto& [l, f] = lines[i];
      if (f.size() != static_cast<std::size_t>(n) + 1) throw fail(l, "wrong field count");
      for (int d = 0; d < n; ++d) coords.push_back(parse_double(f[d], l));
      weights.push_back(parse_double(f[n], l));
    }
    try {
      return AtomicMeasure(n, std::move(coords), std::move(weights));
    } catch (const DomainError& e) {
      throw FormatError(e.what());
    }
  }
  if (meta[0] != "grid") throw fail(lines[1].first, "kind must be atomic or grid");
  if (n != 1 && n != 2) throw fail(lines[1].first, "grid measures have n = 1 or 2");
  const std::size_t expect = n == 1 ? 5 : 7;
  if (head.size() != expect) throw fail(lines[0].first, "grid header has the wrong number of fields");
  std::array<double, 2> origin{parse_double(meta[2], lines[1].first), 0.0};
  if (n == 2) origin[1] = parse_double(meta[3], lines[1].first);
  const double h = parse_double(meta[n == 1 ? 3 : 4], lines[1].first);
  std::array<std::size_t, 2> ext{as_index(meta[n == 1 ? 4 : 5], lines[1].first), 1};
  if (n == 2) ext[1] = as_index(meta[6], lines[1].first);
  if (ext[0] == 0 || ext[1] == 0 || ext[0] * ext[1] > (std::size_t{1} << 26)) throw fail(lines[1].first, "bad extent");
  std::vector<double> w(ext[0] * ext[1], 0.0);
  for (std::size_t i = 3; i < lines.size(); ++i) {
    const auto& [l, f] = lines[i];
    if (f.size() != static_cast<std::size_t>(n) + 1) throw fail(l, "wrong field count");
    const std::size_t i0 = as_index(f[0], l);
    const std::size_t i1 = n == 2 ? as_index(f[1], l) : 0;
    if (i0 >= ext[0] || i1 >= ext[1]) throw fail(l, "cell index outside the extent");
    w[i0 * ext[1] + i1] = parse_double(f[n], l);
  }
  try {
    return GridMeasure(n, origin, h, ext, std::move(w));
  } catch (const DomainError& e) {
    throw FormatError(e.what());
  }
}

// ----------------------------------------------------------------- reports

inline const std::vector<std::string>& report_header() {
  static const std::vector<std::string> h{"name", "value_lhs", "value_rhs", "gap", "tolerance", "pass"};
  return h;
}

inline void write_report(std::ostream& out, const std::vector<CheckResult>& rows) {
  CsvTable t;
  t.header = report_header();
  for (const auto& r : rows) {
    t.rows.push_back({r.name, format_double(r.lhs), format_double(r.rhs), format_double(r.gap), format_double(r.tolerance),
                      r.pass ? "true" : "false"});
  }
  write_csv(out, t);
}

inline std::vector<CheckResult> read_report(std::istream& in) {
  const auto t = read_csv(in);
  if (t.header != report_header()) throw FormatError("report header must be name,value_lhs,value_rhs,gap,tolerance,pass");
  std::vector<CheckResult> out;
  std::size_t line = 1;
  for (const auto& r : t.rows) {
    ++line;
    CheckResult c;
    c.name = r[0];
    c.lhs = parse_double(r[1], line);
    c.rhs = parse_double(r[2], line);
    c.gap = parse_double(r[3], line);
    c.tolerance = parse_double(r[4], line);
    if (r[5] != "true" && r[5] != "false") throw FormatError("line " + std::to_string(line) + ": pass must be true or false");
    c.pass = r[5] == "true";
    out.push_back(c);
  }
  return out;
}

// -------------------------------------------------------------------- SVG

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool markers = false;  ///< draw points instead of a polyline
  std::string color = "#1f77b4";
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
  std::vector<Series> series;
};

namespace detail {
inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}
inline std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}
inline std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out.push_back(c);
  }
  return out;
}
}  // namespace detail

/// Renders a plot as a standalone SVG document. Output depends only on the
/// spec, so identical inputs give byte-identical files.
inline std::string render_svg(const PlotSpec& spec) {
  constexpr double W = 640, H = 420, L = 70, R = 20, T = 40, B = 50;
  auto tx = [&](double v) { return spec.log_x ? std::log10(v) : v; };
  auto ty = [&](double v) { return spec.log_y ? std::log10(v) : v; };
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : spec.series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      if ((spec.log_x && s.x[i] <= 0) || (spec.log_y && s.y[i] <= 0)) continue;
      x0 = std::min(x0, tx(s.x[i]));
      x1 = std::max(x1, tx(s.x[i]));
      y0 = std::min(y0, ty(s.y[i]));
      y1 = std::max(y1, ty(s.y[i]));
    }
  }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 == x0) x0 -= 0.5, x1 += 0.5;
  if (y1 == y0) y0 -= 0.5, y1 += 0.5;
  auto px = [&](double v) { return L + (tx(v) - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double v) { return H - B - (ty(v) - y0) / (y1 - y0) * (H - T - B); };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W << ' '
    << H << "\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">"
    << detail::escape(spec.title) << "</text>\n";
  o << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\"" << H - T - B
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double fx = x0 + (x1 - x0) * k / 4.0;
    const double fy = y0 + (y1 - y0) * k / 4.0;
    const double sx = L + (W - L - R) * k / 4.0;
    const double sy = H - B - (H - T - B) * k / 4.0;
    o << "<text x=\"" << detail::num(sx) << "\" y=\"" << H - B + 18
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
      << detail::tick(spec.log_x ? std::pow(10.0, fx) : fx) << "</text>\n";
    o << "<text x=\"" << L - 6 << "\" y=\"" << detail::num(sy + 4)
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
      << detail::tick(spec.log_y ? std::pow(10.0, fy) : fy) << "</text>\n";
  }
  o << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 10
    << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << detail::escape(spec.x_label)
    << "</text>\n";
  o << "<text x=\"16\" y=\"" << (T + H - B) / 2 << "\" transform=\"rotate(-90 16 " << (T + H - B) / 2
    << ")\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << detail::escape(spec.y_label)
    << "</text>\n";
  double legend_y = T + 14;
  for (const auto& s : spec.series) {
    std::string pts;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      if ((spec.log_x && s.x[i] <= 0) || (spec.log_y && s.y[i] <= 0)) continue;
      if (s.markers) {
        o << "<circle cx=\"" << detail::num(px(s.x[i])) << "\" cy=\"" << detail::num(py(s.y[i])) << "\" r=\"3\" fill=\""
          << s.color << "\"/>\n";
      } else {
        pts += detail::num(px(s.x[i])) + "," + detail::num(py(s.y[i])) + " ";
      }
    }
    if (!s.markers && !pts.empty()) {
      pts.pop_back();
      o << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.2\" points=\"" << pts << "\"/>\n";
    }
    if (!s.label.empty()) {
      o << "<text x=\"" << W - R - 8 << "\" y=\"" << legend_y << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
        << "font-size=\"11\" fill=\"" << s.color << "\">" << detail::escape(s.label) << "</text>\n";
      legend_y += 14;
    }
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace riesz::io

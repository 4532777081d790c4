#include "qbattery/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <system_error>

#include "qbattery/error.hpp"

namespace qbattery::io {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) return "0";  // folds -0 into 0
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(const std::vector<double>& values) {
  if (values.size() != header_.size()) throw InvalidArgument("CSV row width does not match header");
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(format_double(v));
  rows_.push_back(std::move(cells));
}

void CsvTable::add_text_row(std::vector<std::string> cells) {
  if (cells.size() != header_.size()) throw InvalidArgument("CSV row width does not match header");
  rows_.push_back(std::move(cells));
}

std::string CsvTable::str() const {
  std::string out;
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) {
      if (k) out += ',';
      out += cells[k];
    }
    out += '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return out;
}

void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  }
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open " + tmp.string() + " for writing");
    f.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    f.flush();
    if (!f) throw IoError("write to " + tmp.string() + " failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot move output into place at " + path.string());
  }
}

namespace {

constexpr double kWidth = 640, kHeight = 420;
constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 50;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// fixed 2-decimal coordinates keep the SVG text stable across platforms
std::string coord(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 2);
  return std::string(buf, res.ptr);
}

std::string tick_label(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 4);
  return std::string(buf, res.ptr);
}

struct Range {
  double lo = 0, hi = 1;
  void fit(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
};

Range finite_range(const std::vector<double>& vs, bool log) {
  Range r{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (double v : vs) {
    if (log && !(v > 0)) continue;
    r.fit(log ? std::log10(v) : v);
  }
  if (!(r.lo <= r.hi)) return {0, 1};
  if (r.hi - r.lo < 1e-300) {
    r.lo -= 0.5;
    r.hi += 0.5;
  }
  return r;
}

std::string frame(const PlotSpec& spec, Range xr, Range yr) {
  std::ostringstream s;
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << coord(kWidth / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
    << escape(spec.title) << "</text>\n";
  s << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << coord(pw) << "\" height=\""
    << coord(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double fx = xr.lo + (xr.hi - xr.lo) * k / 4;
    const double fy = yr.lo + (yr.hi - yr.lo) * k / 4;
    const double px = kLeft + pw * k / 4;
    const double py = kTop + ph - ph * k / 4;
    s << "<text x=\"" << coord(px) << "\" y=\"" << coord(kTop + ph + 16)
      << "\" text-anchor=\"middle\">" << tick_label(spec.log_x ? std::pow(10, fx) : fx) << "</text>\n";
    s << "<text x=\"" << coord(kLeft - 6) << "\" y=\"" << coord(py + 4) << "\" text-anchor=\"end\">"
      << tick_label(spec.log_y ? std::pow(10, fy) : fy) << "</text>\n";
  }
  s << "<text x=\"" << coord(kLeft + pw / 2) << "\" y=\"" << coord(kHeight - 10)
    << "\" text-anchor=\"middle\">" << escape(spec.x_label) << "</text>\n";
  s << "<text x=\"16\" y=\"" << coord(kTop + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
    << coord(kTop + ph / 2) << ")\">" << escape(spec.y_label) << "</text>\n";
  return s.str();
}

}  // namespace

std::string svg_line_plot(const PlotSpec& spec, const std::vector<Series>& series) {
  std::vector<double> xs, ys;
  for (const auto& sr : series) {
    xs.insert(xs.end(), sr.x.begin(), sr.x.end());
    ys.insert(ys.end(), sr.y.begin(), sr.y.end());
  }
  const Range xr = finite_range(xs, spec.log_x), yr = finite_range(ys, spec.log_y);
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double x) {
    const double v = spec.log_x ? std::log10(x) : x;
    return kLeft + pw * (v - xr.lo) / (xr.hi - xr.lo);
  };
  auto py = [&](double y) {
    const double v = spec.log_y ? std::log10(y) : y;
    return kTop + ph - ph * (v - yr.lo) / (yr.hi - yr.lo);
  };
  std::ostringstream s;
  s << frame(spec, xr, yr);
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& sr = series[k];
    const char* colour = kPalette[k % std::size(kPalette)];
    std::string points;
    for (std::size_t i = 0; i < std::min(sr.x.size(), sr.y.size()); ++i) {
      if ((spec.log_x && !(sr.x[i] > 0)) || (spec.log_y && !(sr.y[i] > 0))) continue;
      if (!std::isfinite(sr.x[i]) || !std::isfinite(sr.y[i])) continue;
      if (sr.markers) {
        s << "<circle cx=\"" << coord(px(sr.x[i])) << "\" cy=\"" << coord(py(sr.y[i]))
          << "\" r=\"2.5\" fill=\"" << colour << "\"/>\n";
      } else {
        points += coord(px(sr.x[i])) + "," + coord(py(sr.y[i])) + " ";
      }
    }
    if (!sr.markers) {
      s << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\""
        << points << "\"/>\n";
    }
    s << "<text x=\"" << coord(kWidth - kRight - 6) << "\" y=\"" << coord(kTop + 16 + 14 * k)
      << "\" text-anchor=\"end\" fill=\"" << colour << "\">" << escape(sr.label) << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

std::string svg_heatmap(const PlotSpec& spec, const std::vector<double>& x,
                        const std::vector<double>& y, const std::vector<double>& values) {
  if (values.size() != x.size() * y.size()) throw InvalidArgument("heatmap size mismatch");
  const Range xr = finite_range(x, false), yr = finite_range(y, false);
  const Range vr = finite_range(values, false);
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  std::ostringstream s;
  s << frame(spec, xr, yr);
  const double cw = pw / static_cast<double>(std::max<std::size_t>(1, x.size()));
  const double ch = ph / static_cast<double>(std::max<std::size_t>(1, y.size()));
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < y.size(); ++j) {
      const double v = values[i * y.size() + j];
      std::string fill = "#bbbbbb";
      if (std::isfinite(v)) {
        const double f = (v - vr.lo) / (vr.hi - vr.lo);
        const int r = static_cast<int>(std::lround(255 * f));
        const int b = 255 - r;
        char buf[8];
        std::snprintf(buf, sizeof buf, "#%02x40%02x", r, b);
        fill = buf;
      }
      s << "<rect x=\"" << coord(kLeft + cw * static_cast<double>(i)) << "\" y=\""
        << coord(kTop + ph - ch * static_cast<double>(j + 1)) << "\" width=\"" << coord(cw)
        << "\" height=\"" << coord(ch) << "\" fill=\"" << fill << "\"/>\n";
    }
  }
  s << "<text x=\"" << coord(kWidth - kRight) << "\" y=\"" << coord(kTop - 6)
    << "\" text-anchor=\"end\">" << tick_label(vr.lo) << " (blue) to " << tick_label(vr.hi)
    << " (red)</text>\n";
  s << "</svg>\n";
  return s.str();
}

}  // namespace qbattery::io

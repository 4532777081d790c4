#pragma once

// Deterministic artifact output: CSV text with shortest round-trip numbers,
// whole-file writes, and small static SVG plots.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace qbattery::io {

inline constexpr std::string_view kArtifactVersion = "qb-artifact/1";

/// Shortest decimal string that parses back to exactly `value` ("nan",
/// "inf", "-inf" for non-finite values). Locale independent.
std::string format_double(double value);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  void add_row(const std::vector<double>& values);
  /// Cells already formatted as text (labels mixed with numbers).
  void add_text_row(std::vector<std::string> cells);
  std::size_t rows() const { return rows_.size(); }
  /// Header plus rows, LF line endings, trailing newline.
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Creates `dir` (and parents) if needed; throws IoError when that fails.
void ensure_directory(const std::filesystem::path& dir);

/// Writes `contents` to `path` through a temporary sibling and a rename.
/// Throws IoError on failure.
void write_file(const std::filesystem::path& path, std::string_view contents);

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool markers = false;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
};

std::string svg_line_plot(const PlotSpec& spec, const std::vector<Series>& series);

/// values are axis1-major (values[i * y.size() + j]); NaN cells are drawn grey.
std::string svg_heatmap(const PlotSpec& spec, const std::vector<double>& x,
                        const std::vector<double>& y, const std::vector<double>& values);

}  // namespace qbattery::io

#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace wgstark::lab {

/// Shortest round-trip form with 17 significant digits ("nan" for NaN).
std::string format_double(double v);

/// Git blob object id: SHA-1 of "blob <size>\0" followed by the bytes.
std::string git_blob_sha1(const std::string& bytes);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  CsvTable& row();
  CsvTable& add(double v);
  CsvTable& add(long long v);
  CsvTable& add(int v) { return add(static_cast<long long>(v)); }
  CsvTable& add(std::size_t v) { return add(static_cast<long long>(v)); }
  CsvTable& add(const std::string& v);

  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool line = false;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<PlotSeries> series;
};

/// Minimal standalone SVG: axes with ticks, markers and optional polylines.
std::string render_svg(const PlotSpec& spec);

/// Collects output files of one run; every write is hashed for the manifest.
class ArtifactWriter {
 public:
  explicit ArtifactWriter(std::filesystem::path dir);

  const std::filesystem::path& dir() const noexcept { return dir_; }
  void write(const std::string& name, const std::string& bytes);
  /// (file name, git blob id) in write order.
  const std::vector<std::pair<std::string, std::string>>& files() const noexcept { return files_; }

 private:
  std::filesystem::path dir_;
  std::vector<std::pair<std::string, std::string>> files_;
};

}  // namespace wgstark::lab

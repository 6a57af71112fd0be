#pragma once

#include <string>
#include <vector>

namespace uvg {

/// Shortest round-trip decimal form ("nan"/"inf" spelled out).
std::string format_double(double v);

/// Comma-separated table with a header row. Fields containing commas or
/// quotes are quoted.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  void add_row(std::vector<std::string> row);
  std::string str() const;
  /// Throws MissingArtifact when the file cannot be written.
  void write(const std::string& path) const;

  std::size_t rows() const { return rows_.size(); }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Parses a CSV produced by CsvTable (header included).
std::vector<std::vector<std::string>> read_csv(const std::string& path);

}  // namespace uvg

#pragma once

// Result files. Everything is rendered to text in memory first; OutputSet then
// writes the whole batch, so a run produces the same bytes regardless of the
// order in which its jobs finished.
//
// CSV: RFC-4180 quoting, CRLF-free (plain \n), numeric columns named
// `name[unit]` with `1` for dimensionless values. A leading `# key=value`
// comment line carries the run metadata (version, command, seed).
//
// Snapshots: <stem>.bin holds nx*ny little-endian float64 values of |psi|^2,
// row-major with x fastest; <stem>.txt is the sidecar header describing them.

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "ablab/evolve.hpp"
#include "ablab/experiment.hpp"
#include "ablab/field.hpp"
#include "ablab/weyl.hpp"

namespace ablab::io {

inline constexpr std::string_view kVersion = "0.3.0";

/// Quotes a field when it contains a comma, quote, CR or LF.
std::string csv_field(std::string_view text);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  /// Metadata comment written before the header.
  void set_meta(std::vector<std::pair<std::string, std::string>> meta) { meta_ = std::move(meta); }
  /// InvalidArgument if the row width differs from the header.
  void add_row(std::vector<std::string> row);
  std::size_t rows() const noexcept { return rows_.size(); }
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::pair<std::string, std::string>> meta_;
  std::vector<std::vector<std::string>> rows_;
};

/// Shortest round-trip text for a double.
std::string num(double v);

CsvTable weyl_sweep_table(const std::vector<weyl::SweepRow>& rows);
CsvTable fringe_sweep_table(const std::vector<experiment::FringeRecord>& records);
CsvTable detector_profile_table(const std::vector<double>& arclength,
                                const std::vector<double>& intensity);

struct Snapshot {
  std::string sidecar;         // text header
  std::vector<char> payload;   // raw little-endian doubles
};

Snapshot make_snapshot(const ComplexField& field, double time, std::string_view label);

struct SnapshotData {
  Grid2D grid;
  double time{0.0};
  std::vector<double> density;
};
/// IoError on a missing or inconsistent pair.
SnapshotData read_snapshot(const std::filesystem::path& stem);

/// Files collected during a run, written together by write_all.
class OutputSet {
 public:
  void add_text(const std::string& name, std::string content);
  void add_binary(const std::string& name, std::vector<char> content);
  void add_snapshot(const std::string& stem, Snapshot snap);
  /// IoError if the directory cannot be created or a file cannot be written.
  void write_all(const std::filesystem::path& dir) const;
  const std::map<std::string, std::string>& texts() const noexcept { return texts_; }
  bool empty() const noexcept { return texts_.empty() && binaries_.empty(); }

 private:
  std::map<std::string, std::string> texts_;
  std::map<std::string, std::vector<char>> binaries_;
};

std::string read_text_file(const std::filesystem::path& path);

}  // namespace ablab::io

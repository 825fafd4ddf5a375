#include "ablab/io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "ablab/config.hpp"
#include "ablab/errors.hpp"

namespace ablab::io {

static_assert(std::endian::native == std::endian::little, "snapshot writer assumes little endian");

std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(text);
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void CsvTable::add_row(std::vector<std::string> row) {
  if (row.size() != header_.size()) {
    throw Error(ErrorCode::InvalidArgument, "csv row has " + std::to_string(row.size()) +
                                                " fields, header has " + std::to_string(header_.size()));
  }
  rows_.push_back(std::move(row));
}

std::string CsvTable::str() const {
  std::string out;
  if (!meta_.empty()) {
    out += "#";
    for (const auto& [k, v] : meta_) out += " " + k + "=" + v;
    out += "\n";
  }
  auto line = [&](const std::vector<std::string>& fields) {
    for (std::size_t k = 0; k < fields.size(); ++k) {
      if (k) out += ',';
      out += csv_field(fields[k]);
    }
    out += '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return out;
}

std::string num(double v) { return config::format_double(v); }

CsvTable weyl_sweep_table(const std::vector<weyl::SweepRow>& rows) {
  CsvTable t({"alpha[1]", "x[len]", "y[len]", "a[len]", "b[len]", "phase_emp_re[1]", "phase_emp_im[1]",
              "phase_cf_re[1]", "phase_cf_im[1]", "discrepancy[rad]", "winding[1]", "modulus[1]", "error"});
  for (const auto& r : rows) {
    auto part = [](const std::optional<cplx>& z, bool imag) {
      return z ? num(imag ? z->imag() : z->real()) : std::string("nan");
    };
    t.add_row({num(r.c.alpha), num(r.c.x), num(r.c.y), num(r.c.a), num(r.c.b), part(r.empirical, false),
               part(r.empirical, true), part(r.closed_form, false), part(r.closed_form, true),
               r.ok() ? num(r.discrepancy) : "nan", std::to_string(r.winding), num(r.modulus), r.error});
  }
  return t;
}

CsvTable fringe_sweep_table(const std::vector<experiment::FringeRecord>& records) {
  CsvTable t({"delta_alpha[1]", "fitted_phase[rad]", "visibility[1]", "fit_residual[1]", "mode",
              "fringe_k[rad/len]", "fit_degenerate", "coherent"});
  for (const auto& r : records) {
    t.add_row({num(r.delta_alpha), num(r.fitted_phase), num(r.visibility), num(r.fit_residual),
               std::string(experiment::to_string(r.mode)), num(r.fringe_k), r.fit_degenerate ? "1" : "0",
               r.coherent ? "1" : "0"});
  }
  return t;
}

CsvTable detector_profile_table(const std::vector<double>& arclength,
                                const std::vector<double>& intensity) {
  if (arclength.size() != intensity.size()) {
    throw Error(ErrorCode::InvalidArgument, "profile columns differ in length");
  }
  CsvTable t({"arclength[len]", "intensity[1/len]"});
  for (std::size_t k = 0; k < arclength.size(); ++k) t.add_row({num(arclength[k]), num(intensity[k])});
  return t;
}

Snapshot make_snapshot(const ComplexField& field, double time, std::string_view label) {
  const Grid2D& g = field.grid;
  Snapshot s;
  std::ostringstream h;
  h << "format = ablab-density\n"
    << "version = " << kVersion << "\n"
    << "label = " << label << "\n"
    << "quantity = |psi|^2\n"
    << "dtype = float64-le\n"
    << "layout = row-major, x fastest\n"
    << "nx = " << g.nx << "\n"
    << "ny = " << g.ny << "\n"
    << "dx = " << num(g.dx) << "\n"
    << "dy = " << num(g.dy) << "\n"
    << "origin_x = " << num(g.origin.x) << "\n"
    << "origin_y = " << num(g.origin.y) << "\n"
    << "time = " << num(time) << "\n"
    << "norm = " << num(field.norm_squared()) << "\n";
  s.sidecar = h.str();
  s.payload.resize(field.values.size() * sizeof(double));
  for (std::size_t k = 0; k < field.values.size(); ++k) {
    const double d = std::norm(field.values[k]);
    std::memcpy(s.payload.data() + k * sizeof(double), &d, sizeof(double));
  }
  return s;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SnapshotData read_snapshot(const std::filesystem::path& stem) {
  std::filesystem::path txt = stem, bin = stem;
  txt += ".txt";
  bin += ".bin";
  std::map<std::string, std::string> kv;
  std::istringstream in(read_text_file(txt));
  for (std::string line; std::getline(in, line);) {
    const auto eq = line.find(" = ");
    if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 3);
  }
  SnapshotData d;
  try {
    d.grid.nx = std::stoi(kv.at("nx"));
    d.grid.ny = std::stoi(kv.at("ny"));
    d.grid.dx = std::stod(kv.at("dx"));
    d.grid.dy = std::stod(kv.at("dy"));
    d.grid.origin = {std::stod(kv.at("origin_x")), std::stod(kv.at("origin_y"))};
    d.time = std::stod(kv.at("time"));
  } catch (const std::exception&) {
    throw Error(ErrorCode::IoError, "incomplete sidecar " + txt.string());
  }
  const std::string raw = read_text_file(bin);
  if (raw.size() != d.grid.size() * sizeof(double)) {
    throw Error(ErrorCode::IoError, "payload size does not match sidecar for " + stem.string());
  }
  d.density.resize(d.grid.size());
  std::memcpy(d.density.data(), raw.data(), raw.size());
  return d;
}

void OutputSet::add_text(const std::string& name, std::string content) { texts_[name] = std::move(content); }

void OutputSet::add_binary(const std::string& name, std::vector<char> content) {
  binaries_[name] = std::move(content);
}

void OutputSet::add_snapshot(const std::string& stem, Snapshot snap) {
  add_text(stem + ".txt", std::move(snap.sidecar));
  add_binary(stem + ".bin", std::move(snap.payload));
}

void OutputSet::write_all(const std::filesystem::path& dir) const {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());
  auto put = [&](const std::string& name, const char* data, std::size_t n) {
    const auto path = dir / name;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    out.write(data, static_cast<std::streamsize>(n));
    if (!out) throw Error(ErrorCode::IoError, "short write to " + path.string());
  };
  for (const auto& [name, text] : texts_) put(name, text.data(), text.size());
  for (const auto& [name, bytes] : binaries_) put(name, bytes.data(), bytes.size());
}

}  // namespace ablab::io

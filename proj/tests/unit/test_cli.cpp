#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>

#include "ablab/errors.hpp"
#include "ablab/evolve.hpp"
#include "ablab/io.hpp"
#include "ablab/run.hpp"

using namespace ablab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("ablab_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("csv quoting") {
  CHECK(io::csv_field("plain") == "plain");
  CHECK(io::csv_field("a,b") == "\"a,b\"");
  CHECK(io::csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(io::csv_field("two\nlines") == "\"two\nlines\"");
  io::CsvTable t({"x[len]", "y[len]"});
  t.set_meta({{"seed", "7"}});
  t.add_row({"1", "2"});
  CHECK(t.str() == "# seed=7\nx[len],y[len]\n1,2\n");
  CHECK_THROWS_AS(t.add_row({"1"}), Error);
}

TEST_CASE("snapshot round trip") {
  const Grid2D g{48, 40, 0.25, 0.25, {-3.0, 1.0}};
  const ComplexField psi = evolve::init_gaussian(g, {2.75, 5.75}, 1.2, {0.4, 0.0});
  const fs::path dir = scratch("snap");
  io::OutputSet out;
  out.add_snapshot("snapshot_final", io::make_snapshot(psi, 12.5, "final"));
  out.write_all(dir);
  const io::SnapshotData d = io::read_snapshot(dir / "snapshot_final");
  CHECK(d.grid == g);
  CHECK(d.time == 12.5);
  REQUIRE(d.density.size() == g.size());
  for (std::size_t k = 0; k < g.size(); ++k) CHECK(d.density[k] == std::norm(psi.values[k]));
  CHECK_THROWS_AS(io::read_snapshot(dir / "missing"), Error);
  fs::remove_all(dir);
}

TEST_CASE("quantize prints the exact value") {
  cli::RunManifest m;
  m.species = "deuteron";
  m.n_a = 0;
  m.n_b = 1;
  const auto r = cli::run(m);
  CHECK(r.exit_code == 0);
  CHECK(r.stdout_text == "1/2\n");
  m.species = "photon";
  const auto bad = cli::run(m);
  CHECK(bad.exit_code != 0);
  const auto j = nlohmann::json::parse(bad.error_json);
  CHECK(j["error"]["code"] == "InvalidArgument");
  CHECK(j["command"] == "quantize");
}

TEST_CASE("holonomy output is deterministic for a seed") {
  cli::RunManifest m;
  m.command = cli::Command::Holonomy;
  m.seed = 42;
  m.output_dir = scratch("holo1");
  const auto a = cli::run(m);
  REQUIRE(a.exit_code == 0);
  m.output_dir = scratch("holo2");
  const auto b = cli::run(m);
  REQUIRE(b.exit_code == 0);
  const std::string csv = io::read_text_file(fs::path(m.output_dir) / "holonomy.csv");
  CHECK(csv == io::read_text_file(fs::temp_directory_path() / "ablab_test_holo1" / "holonomy.csv"));
  CHECK(csv.rfind("# ", 0) == 0);
  CHECK(csv.find("seed=42") != std::string::npos);
  CHECK(fs::exists(m.output_dir / "summary.json"));
  CHECK(fs::exists(m.output_dir / "run.log"));
  const auto s = nlohmann::json::parse(io::read_text_file(m.output_dir / "summary.json"));
  CHECK(s["seed"] == 42);
  m.seed = 43;
  m.output_dir = scratch("holo3");
  REQUIRE(cli::run(m).exit_code == 0);
  CHECK(io::read_text_file(m.output_dir / "holonomy.csv") != csv);
  for (const char* n : {"holo1", "holo2", "holo3"}) fs::remove_all(scratch(n));
}

TEST_CASE("missing config is reported") {
  cli::RunManifest m;
  m.command = cli::Command::EigenCheck;
  m.config_path = "/nonexistent/ablab.conf";
  m.output_dir = scratch("err");
  const auto r = cli::run(m);
  CHECK(r.exit_code != 0);
  CHECK_FALSE(r.error_json.empty());
  CHECK(fs::exists(m.output_dir / "error.json"));
  fs::remove_all(m.output_dir);
}

TEST_CASE("eigen-check writes the residual ladder") {
  const fs::path dir = scratch("eig");
  const fs::path conf = dir.string() + ".conf";
  {
    std::ofstream f(conf);
    f << "[eigen]\nladder = 32, 64, 128\n";
  }
  cli::RunManifest m;
  m.command = cli::Command::EigenCheck;
  m.config_path = conf;
  m.output_dir = dir;
  const auto r = cli::run(m);
  REQUIRE(r.exit_code == 0);
  const std::string csv = io::read_text_file(dir / "eigen_residuals.csv");
  CHECK(csv.find("points_per_unit[1/len],h[len],residual[1],ratio[1]") != std::string::npos);
  int lines = 0;
  for (char ch : csv) lines += ch == '\n';
  CHECK(lines == 5);
  fs::remove_all(dir);
  fs::remove(conf);
}

TEST_CASE("commutator run on the shipped case grid") {
  cli::RunManifest m;
  m.command = cli::Command::Commutator;
  m.config_path = std::string(ABLAB_SOURCE_DIR) + "/configs/commutator_default.conf";
  m.output_dir = scratch("comm");
  const auto r = cli::run(m);
  REQUIRE(r.exit_code == 0);
  const auto s = nlohmann::json::parse(io::read_text_file(m.output_dir / "summary.json"));
  CHECK(s["failed_rows"] == 0);
  CHECK(s["max_discrepancy_rad"].get<double>() < 1e-6);
  CHECK(s["all_below_1e-6"] == true);
  fs::remove_all(m.output_dir);
}

#include <filesystem>
#include <fstream>
#include <sstream>

#include "dispatch.hpp"
#include "doctest.h"
#include "report.hpp"

using namespace porehom;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "porehom");
  std::ostringstream out, err;
  const int code = dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

const std::string kDefault = POREHOM_SOURCE_DIR "/configs/default.cfg";
const std::string kQuick = POREHOM_SOURCE_DIR "/configs/quick.cfg";

fs::path scratch(const char* name) {
  const fs::path dir = fs::temp_directory_path() / "porehom_cli_test" / name;
  fs::remove_all(dir);
  return dir;
}

std::size_t count_lines(const fs::path& path) {
  std::ifstream in(path);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) ++n;
  return n;
}

void check_manifest(const fs::path& dir) {
  const Json m = read_json(dir / "manifest.json");
  bool self = false;
  for (const auto& f : m["files"]) {
    const fs::path p = dir / f["path"].get<std::string>();
    REQUIRE(fs::exists(p));
    CHECK(fs::file_size(p) == f["bytes"].get<std::uintmax_t>());
    self = self || f["path"] == "manifest.json";
  }
  CHECK(self);
}

}  // namespace

TEST_CASE("usage errors exit with 2") {
  const Result none = run({});
  CHECK(none.code == 2);
  CHECK(none.err.find("Usage") != std::string::npos);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"cell"}).code == 2);
  CHECK(run({"cell", "--config", kDefault, "--bogus"}).code == 2);
  CHECK(run({"micro", "--config", kDefault, "--eps", "0.2,0.1"}).code == 2);
  CHECK(run({"micro", "--config", kDefault, "--point", "0.6"}).code == 2);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("run errors exit with 1 and name their kind") {
  const Result missing = run({"cell", "--config", "/nonexistent/porehom.cfg"});
  CHECK(missing.code == 1);
  CHECK(missing.err.rfind("error [io]: ", 0) == 0);
  const Result invalid = run({"micro", "--config", kDefault, "--dt", "-1"});
  CHECK(invalid.code == 1);
  CHECK(invalid.err.rfind("error [validation]: ", 0) == 0);
  const Result tiling = run({"micro", "--config", kDefault, "--eps", "0.35"});
  CHECK(tiling.code == 1);
}

TEST_CASE("cell and macro commands") {
  const fs::path cell = scratch("cell");
  const Result c = run({"cell", "--config", kDefault, "--cell-h", "0.05", "--out", cell.string()});
  REQUIRE(c.code == 0);
  const Json j = read_json(cell / "cell.json");
  const MacroCoefficients coeffs = macro_coefficients_from_json(j["coefficients"]);
  CHECK(coeffs.A[0][0] == doctest::Approx(0.8358).epsilon(0.01));
  CHECK(coeffs.B[0][0] == doctest::Approx(2.0 * coeffs.A[0][0]).epsilon(1e-14));
  CHECK(fs::exists(cell / "cell.vtk"));
  check_manifest(cell);

  const fs::path macro = scratch("macro");
  const Result m = run({"macro", "--config", kQuick, "--cell", (cell / "cell.json").string(), "--macro-h", "0.1",
                        "--out", macro.string()});
  REQUIRE(m.code == 0);
  // T = 0.5, dt = 0.01, stride 10: floor(T / (dt * stride)) + 1 snapshots
  std::size_t snapshots = 0;
  for (const auto& e : fs::directory_iterator(macro / "vtk")) snapshots += e.path().extension() == ".vtk";
  CHECK(snapshots == 6);
  const Json summary = read_json(macro / "macro_summary.json");
  CHECK(summary["conservation_drift_u"].get<double>() < 1e-8);
  CHECK(macro_coefficients_from_json(summary["coefficients"]).A == coeffs.A);
  // every step through 0.5 plus the initial sample, then the header
  CHECK(count_lines(macro / "macro_trace.csv") == 52);
  check_manifest(macro);

  const fs::path tensor = scratch("tensor");
  CHECK(run({"macro", "--config", kQuick, "--tensor", "0.8358,0,0.8358", "--no-vtk", "--T", "0.1", "--out",
             tensor.string()})
            .code == 0);
  CHECK(!fs::exists(tensor / "vtk"));
  CHECK(run({"macro", "--config", kQuick, "--tensor", "1,2", "--out", tensor.string()}).code == 2);
}

TEST_CASE("converge writes one norms row per epsilon") {
  const fs::path dir = scratch("converge");
  const Result r = run({"converge", "--config", kQuick, "--eps", "0.2,0.1", "--T", "0.1", "--mesh-h", "0.25",
                        "--cell-h", "0.1", "--macro-h", "0.1", "--reference-h", "0.1", "--n-gamma", "32", "--out", dir.string()});
  REQUIRE(r.code == 0);
  CHECK(count_lines(dir / "norms.csv") == 3);
  for (const char* f : {"energies_0.2.csv", "energies_0.1.csv", "energies_0.2.svg", "traces_0.1.svg", "report.json"})
    CHECK(fs::exists(dir / f));

  const Json report = read_json(dir / "report.json");
  REQUIRE(report["rows"].size() == 2);
  CHECK(report["rows"][1]["epsilon"].get<double>() == 0.1);
  CHECK(report["wall_time_ratio"].get<double>() > 0.0);
  CHECK(report["reference_macro_h"].get<double>() == 0.1);
  CHECK(report["compatibility"]["rows"].size() == 2);

  std::ifstream in(dir / "norms.csv");
  std::string header, line;
  std::getline(in, header);
  CHECK(header ==
        "epsilon,norm_u_C_L2,norm_grad_u,norm_v_C_L2,norm_grad_v,norm_w_C_L2,energy_sup_diff,wall_time_micro,"
        "wall_time_macro");
  std::getline(in, line);
  const NormReport first = norm_report_from_json(report["rows"][0]);
  CHECK(line.rfind("0.2,", 0) == 0);
  CHECK(std::stod(line.substr(4)) == first.norm_u_C_L2);
  check_manifest(dir);
}

TEST_CASE("report JSON round-trips exactly") {
  NormReport r{0.1, 1.0 / 3.0, 2.0e-17, 0.1 + 0.2, 5.5, 1e300, 7.0 / 11.0, 123.456, 0.5};
  const Json j = Json::parse(to_json(r).dump());
  CHECK(norm_report_from_json(j) == r);

  MacroCoefficients c;
  c.A = {{{0.8366595674139601, 1.791066429440345e-17}, {1.791066429440345e-17, 0.8366595674139636}}};
  c.B = c.A;
  c.porosity = 0.8040;
  c.interface_measure = 1.5701;
  const MacroCoefficients back = macro_coefficients_from_json(Json::parse(to_json(c).dump()));
  CHECK(back.A == c.A);
  CHECK(back.porosity == c.porosity);
}

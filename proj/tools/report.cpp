#include "report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "porehom/error.hpp"
#include "porehom/io.hpp"

namespace porehom {

Json to_json(const NormReport& r) {
  return Json{{"epsilon", r.epsilon},
              {"norm_u_C_L2", r.norm_u_C_L2},
              {"norm_grad_u", r.norm_grad_u},
              {"norm_v_C_L2", r.norm_v_C_L2},
              {"norm_grad_v", r.norm_grad_v},
              {"norm_w_C_L2", r.norm_w_C_L2},
              {"energy_sup_diff", r.energy_sup_diff},
              {"wall_time_micro", r.wall_time_micro},
              {"wall_time_macro", r.wall_time_macro}};
}

NormReport norm_report_from_json(const Json& j) {
  NormReport r;
  r.epsilon = j.at("epsilon").get<double>();
  r.norm_u_C_L2 = j.at("norm_u_C_L2").get<double>();
  r.norm_grad_u = j.at("norm_grad_u").get<double>();
  r.norm_v_C_L2 = j.at("norm_v_C_L2").get<double>();
  r.norm_grad_v = j.at("norm_grad_v").get<double>();
  r.norm_w_C_L2 = j.at("norm_w_C_L2").get<double>();
  r.energy_sup_diff = j.at("energy_sup_diff").get<double>();
  r.wall_time_micro = j.at("wall_time_micro").get<double>();
  r.wall_time_macro = j.at("wall_time_macro").get<double>();
  return r;
}

Json to_json(const Mat2& m) { return Json::array({{m[0][0], m[0][1]}, {m[1][0], m[1][1]}}); }

Mat2 mat2_from_json(const Json& j) {
  Mat2 m{};
  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < 2; ++k) m[i][k] = j.at(i).at(k).get<double>();
  return m;
}

Json to_json(const MacroCoefficients& c) {
  return Json{{"A", to_json(c.A)},
              {"B", to_json(c.B)},
              {"porosity", c.porosity},
              {"interface_measure", c.interface_measure}};
}

MacroCoefficients macro_coefficients_from_json(const Json& j) {
  MacroCoefficients c;
  c.A = mat2_from_json(j.at("A"));
  c.B = mat2_from_json(j.at("B"));
  c.porosity = j.at("porosity").get<double>();
  c.interface_measure = j.at("interface_measure").get<double>();
  return c;
}

Json run_summary(const Trace& trace) {
  const auto& mu = trace["mass_u"];
  const auto& mv = trace["mass_v"];
  const auto& mw = trace["mass_w"];
  double drift_u = 0.0, drift_v = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    drift_u = std::max(drift_u, std::abs(mu[i] + mw[i] - mu[0] - mw[0]) / std::abs(mu[0] + mw[0]));
    drift_v = std::max(drift_v, std::abs(mv[i] + mw[i] - mv[0] - mw[0]) / std::abs(mv[0] + mw[0]));
  }
  auto lowest = [&](const char* name) {
    const auto& s = trace[name];
    return s.empty() ? 0.0 : *std::min_element(s.begin(), s.end());
  };
  const auto& zmax = trace["max_z"];
  const EnergySeries energy{trace.times(), trace["energy_direct"], trace["energy_flux"]};
  return Json{{"wall_time", trace.wall_time},
              {"samples", trace.times().size()},
              {"final_time", trace.times().empty() ? 0.0 : trace.times().back()},
              {"conservation_drift_u", drift_u},
              {"conservation_drift_v", drift_v},
              {"min_u", lowest("min_u")},
              {"min_v", lowest("min_v")},
              {"min_w", lowest("min_w")},
              {"min_z", lowest("min_z")},
              {"max_z", zmax.empty() ? 0.0 : *std::max_element(zmax.begin(), zmax.end())},
              {"energy_relative_gap", energy.max_relative_gap()}};
}

void write_json(const std::filesystem::path& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, path.string() + ": " + e.what());
  }
}

Json write_manifest(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  const fs::path target = dir / "manifest.json";
  std::vector<std::pair<std::string, std::uintmax_t>> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path() == target) continue;
    files.emplace_back(fs::relative(entry.path(), dir).generic_string(), entry.file_size());
  }
  std::sort(files.begin(), files.end());

  // The manifest lists itself, so its recorded size has to be a fixed point.
  std::uintmax_t own = 0;
  Json j;
  std::string text;
  for (int round = 0; round < 8; ++round) {
    j = Json{{"files", Json::array()}};
    for (const auto& [path, size] : files) j["files"].push_back({{"path", path}, {"bytes", size}});
    j["files"].push_back({{"path", "manifest.json"}, {"bytes", own}});
    text = j.dump(2) + "\n";
    if (text.size() == own) break;
    own = text.size();
  }
  write_text(target, text);
  return j;
}

}  // namespace porehom

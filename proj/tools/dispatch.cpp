#include "dispatch.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <numbers>
#include <ostream>

#include "CLI11.hpp"
#include "porehom/config.hpp"
#include "porehom/error.hpp"
#include "porehom/format.hpp"
#include "porehom/io.hpp"
#include "report.hpp"

namespace porehom {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;
constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Options {
  std::string config;
  std::string out;
  std::vector<double> eps;
  double dt = kUnset;
  double T = kUnset;
  double micro_h = kUnset;
  double cell_h = kUnset;
  double macro_h = kUnset;
  double reference_h = kUnset;
  int n_gamma = 0;
  std::vector<std::string> points;
  std::string cell_json;
  std::vector<double> tensor;
  bool no_vtk = false;
};

RunConfig resolve(const Options& o, bool eps_is_list) {
  RunConfig c = load_config(o.config);
  if (!o.eps.empty()) {
    if (eps_is_list) {
      c.eps_list = o.eps;
    } else if (o.eps.size() == 1) {
      c.params.epsilon = o.eps.front();
    } else {
      throw Error(ErrorKind::Usage, "--eps takes a single value for this command");
    }
  }
  if (!std::isnan(o.dt)) c.params.dt = o.dt;
  if (!std::isnan(o.T)) c.params.T = o.T;
  if (!std::isnan(o.micro_h)) c.micro_h = o.micro_h;
  if (!std::isnan(o.cell_h)) c.cell_h = o.cell_h;
  if (!std::isnan(o.macro_h)) c.macro_h = o.macro_h;
  if (!std::isnan(o.reference_h)) c.study_macro_h = o.reference_h;
  if (o.n_gamma != 0) c.n_gamma = o.n_gamma;
  if (!o.points.empty()) {
    c.trace_points.clear();
    for (const std::string& p : o.points) {
      const auto comma = p.find(',');
      if (comma == std::string::npos) throw Error(ErrorKind::Usage, "--point expects x,y; got '" + p + "'");
      try {
        c.trace_points.push_back({std::stod(p.substr(0, comma)), std::stod(p.substr(comma + 1))});
      } catch (const std::exception&) {
        throw Error(ErrorKind::Usage, "--point expects x,y; got '" + p + "'");
      }
    }
  }
  if (!o.out.empty()) c.output_dir = o.out;
  c.validate();
  return c;
}

UnitCellSpec cell_spec(const RunConfig& c, double h) { return {c.radius, c.n_gamma, h, c.radius > 0.0}; }

Json mesh_json(const Mesh2D& m) {
  return Json{{"vertices", m.num_vertices()},
              {"triangles", m.num_triangles()},
              {"edges", m.num_edges()},
              {"area", m.total_area()},
              {"interface_length", m.boundary_length(EdgeTag::Interface)},
              {"outer_length", m.boundary_length(EdgeTag::Outer)},
              {"cells", m.num_cells()}};
}

void finish(const fs::path& dir, std::ostream& out) {
  const Json manifest = write_manifest(dir);
  out << "wrote " << manifest["files"].size() << " files to " << dir.string() << "\n";
}

int cmd_mesh(const RunConfig& c, std::ostream& out) {
  const fs::path dir = c.output_dir;
  const Mesh2D cell = build_unit_cell_mesh(cell_spec(c, c.cell_h));
  const Mesh2D tmpl = build_unit_cell_mesh(cell_spec(c, c.micro_h));
  const Mesh2D micro = build_perforated_mesh(c.domain, c.params.epsilon, tmpl);
  const Mesh2D macro = build_macro_mesh(c.domain, c.macro_h);
  write_vtk(dir / "mesh_cell.vtk", cell, {}, "unit cell");
  write_vtk(dir / "mesh_template.vtk", tmpl, {}, "cell template");
  write_vtk(dir / "mesh_micro.vtk", micro, {}, "perforated domain");
  write_vtk(dir / "mesh_macro.vtk", macro, {}, "homogenized domain");
  write_json(dir / "mesh.json", Json{{"epsilon", c.params.epsilon},
                                     {"cell", mesh_json(cell)},
                                     {"template", mesh_json(tmpl)},
                                     {"micro", mesh_json(micro)},
                                     {"macro", mesh_json(macro)}});
  out << "micro mesh: " << micro.num_vertices() << " vertices, " << micro.num_cells() << " cells, pore area "
      << format_double(micro.total_area()) << "\n";
  finish(dir, out);
  return 0;
}

int cmd_cell(const RunConfig& c, std::ostream& out) {
  const fs::path dir = c.output_dir;
  const auto t0 = Clock::now();
  const auto mesh = std::make_shared<const Mesh2D>(build_unit_cell_mesh(cell_spec(c, c.cell_h)));
  const CellSolution sol = solve_cell_problems(mesh, {std::min(c.solver.rel_tol, 1e-12), c.solver.max_iter});
  const EffectiveTensor a = effective_tensor(sol, c.params.D1);
  const EffectiveTensor b = effective_tensor(sol, c.params.D2);
  const double wall = seconds_since(t0);
  write_json(dir / "cell.json", Json{{"radius", c.radius},
                                     {"n_gamma", c.n_gamma},
                                     {"h", c.cell_h},
                                     {"mesh", mesh_json(*mesh)},
                                     {"coefficients", to_json(macro_coefficients(sol, c.params))},
                                     {"asymmetry_A", a.asymmetry},
                                     {"asymmetry_B", b.asymmetry},
                                     {"compatibility_residual", sol.compatibility_residual()},
                                     {"iterations", sol.iterations()},
                                     {"wall_time", wall}});
  write_vtk(dir / "cell.vtk", *mesh, {{"l1", sol.l(0)}, {"l2", sol.l(1)}}, "cell problem solutions");
  out << "A = [[" << format_double(a.value[0][0]) << ", " << format_double(a.value[0][1]) << "], ["
      << format_double(a.value[1][0]) << ", " << format_double(a.value[1][1]) << "]]\n";
  finish(dir, out);
  return 0;
}

std::string snapshot_name(const char* prefix, int step) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "vtk/%s_%06d.vtk", prefix, step);
  return buf;
}

void write_run_outputs(const fs::path& dir, const char* prefix, const RunConfig& c, const Trace& trace,
                       Json summary) {
  write_trace_csv(dir / (std::string(prefix) + "_trace.csv"), trace);
  write_csv(dir / (std::string(prefix) + "_energy.csv"), {"time", "energy_direct", "energy_flux"},
            {trace.times(), trace["energy_direct"], trace["energy_flux"]});
  PlotSpec plot{std::string(prefix) + " point traces", "t", "concentration", {}};
  for (Vec2 p : c.trace_points) {
    for (const char* s : {"u", "v"}) {
      const std::string name = probe_name(s, p);
      plot.series.push_back({name, trace.times(), trace[name]});
    }
  }
  write_svg(dir / (std::string(prefix) + "_trace.svg"), plot);
  write_svg(dir / (std::string(prefix) + "_energy.svg"),
            {std::string(prefix) + " energy", "t", "E",
             {{"direct", trace.times(), trace["energy_direct"]}, {"flux", trace.times(), trace["energy_flux"]}}});
  summary.update(run_summary(trace));
  write_json(dir / (std::string(prefix) + "_summary.json"), summary);
}

// Runs a coupled problem, writing stride snapshots unless disabled; the time
// spent writing is excluded from the recorded wall time.
Trace run_with_snapshots(const CoupledOperators& ops, const RunConfig& c, const fs::path& dir, const char* prefix,
                         bool vtk, bool surface_on_interface, double assembly) {
  double io = 0.0;
  Trace trace = run_coupled(ops, c.init, c.trace_request(), [&](const ReactiveState& s, bool stride) {
    if (!vtk || !stride) return;
    const auto t0 = Clock::now();
    const Mesh2D& m = *ops.mesh;
    std::vector<VtkField> fields{{"u", s.u}, {"v", s.v}};
    if (surface_on_interface) {
      fields.push_back({"w", expand_surface(m, s.w)});
      fields.push_back({"z", expand_surface(m, s.z)});
    } else if (s.w.size() == m.num_vertices()) {
      fields.push_back({"w", s.w});
      fields.push_back({"z", s.z});
    }
    write_vtk(dir / snapshot_name(prefix, s.step), m, fields, prefix + std::string(" t=") + format_double(s.t));
    io += seconds_since(t0);
  });
  trace.wall_time = assembly + trace.wall_time - io;
  return trace;
}

int cmd_micro(const RunConfig& c, const Options& o, std::ostream& out) {
  const fs::path dir = c.output_dir;
  const auto t0 = Clock::now();
  const Mesh2D tmpl = build_unit_cell_mesh(cell_spec(c, c.micro_h));
  const auto mesh = std::make_shared<const Mesh2D>(build_perforated_mesh(c.domain, c.params.epsilon, tmpl));
  const CoupledOperators ops = make_micro_operators(mesh, c.params, c.solver);
  const Trace trace = run_with_snapshots(ops, c, dir, "micro", !o.no_vtk, true, seconds_since(t0));
  write_run_outputs(dir, "micro", c, trace,
                    Json{{"epsilon", c.params.epsilon}, {"vertices", mesh->num_vertices()}, {"cells", mesh->num_cells()}});
  out << "micro run: " << trace.times().size() << " samples, wall time " << format_double(trace.wall_time) << " s\n";
  finish(dir, out);
  return 0;
}

MacroCoefficients resolve_coefficients(const RunConfig& c, const Options& o) {
  if (!o.cell_json.empty()) {
    const Json j = read_json(o.cell_json);
    if (!j.contains("coefficients")) throw Error(ErrorKind::Parse, o.cell_json + " has no coefficients");
    return macro_coefficients_from_json(j.at("coefficients"));
  }
  if (!o.tensor.empty()) {
    if (o.tensor.size() != 3) throw Error(ErrorKind::Usage, "--tensor expects a11,a12,a22");
    MacroCoefficients m;
    m.A = {{{o.tensor[0], o.tensor[1]}, {o.tensor[1], o.tensor[2]}}};
    m.B = scaled(m.A, c.params.D2 / c.params.D1);
    // Exact measures of the polygonal inclusion the meshes use.
    const double n = c.n_gamma;
    const double r = c.radius;
    m.porosity = 1.0 - 0.5 * n * r * r * std::sin(2.0 * std::numbers::pi / n);
    m.interface_measure = 2.0 * n * r * std::sin(std::numbers::pi / n);
    return m;
  }
  const auto mesh = std::make_shared<const Mesh2D>(build_unit_cell_mesh(cell_spec(c, c.cell_h)));
  return macro_coefficients(solve_cell_problems(mesh), c.params);
}

int cmd_macro(const RunConfig& c, const Options& o, std::ostream& out) {
  const fs::path dir = c.output_dir;
  const MacroCoefficients coeffs = resolve_coefficients(c, o);
  const auto t0 = Clock::now();
  const auto mesh = std::make_shared<const Mesh2D>(build_macro_mesh(c.domain, c.macro_h));
  const CoupledOperators ops = make_macro_operators(mesh, c.params, coeffs, c.solver);
  const Trace trace = run_with_snapshots(ops, c, dir, "macro", !o.no_vtk, false, seconds_since(t0));
  write_run_outputs(dir, "macro", c, trace, Json{{"vertices", mesh->num_vertices()}, {"coefficients", to_json(coeffs)}});
  out << "macro run: " << trace.times().size() << " samples, wall time " << format_double(trace.wall_time) << " s\n";
  finish(dir, out);
  return 0;
}

const std::vector<std::string> kNormHeader{"epsilon",     "norm_u_C_L2",     "norm_grad_u",
                                           "norm_v_C_L2", "norm_grad_v",     "norm_w_C_L2",
                                           "energy_sup_diff", "wall_time_micro", "wall_time_macro"};

void write_norms(const fs::path& path, const std::vector<NormReport>& rows) {
  std::vector<std::vector<double>> cols(kNormHeader.size());
  for (const NormReport& r : rows) {
    const double values[] = {r.epsilon,     r.norm_u_C_L2,     r.norm_grad_u,     r.norm_v_C_L2,    r.norm_grad_v,
                             r.norm_w_C_L2, r.energy_sup_diff, r.wall_time_micro, r.wall_time_macro};
    for (std::size_t k = 0; k < cols.size(); ++k) cols[k].push_back(values[k]);
  }
  write_csv(path, kNormHeader, cols);
}

int cmd_study(const RunConfig& c, bool sweep, std::ostream& out) {
  const fs::path dir = c.output_dir;
  const std::vector<double> eps = sweep ? c.eps_list : std::vector<double>{c.params.epsilon};
  if (eps.empty()) throw Error(ErrorKind::Validation, "the epsilon list is empty");
  std::vector<NormReport> rows;
  Json micro_summaries = Json::array();
  Trace macro;
  auto plots = [&](const StudyRun& run, const Trace& ref) {
    const std::string tag = format_double(run.norms.epsilon);
    write_csv(dir / ("energies_" + tag + ".csv"), {"time", "micro_direct", "micro_flux", "macro_direct", "macro_flux"},
              {run.micro.times(), run.micro["energy_direct"], run.micro["energy_flux"], ref["energy_direct"],
               ref["energy_flux"]});
    write_svg(dir / ("energies_" + tag + ".svg"),
              {"energy, epsilon = " + tag, "t", "E",
               {{"micro", run.micro.times(), run.micro["energy_direct"]}, {"macro", ref.times(), ref["energy_direct"]}}});
    PlotSpec traces{"point traces, epsilon = " + tag, "t", "concentration", {}};
    for (Vec2 p : c.trace_points) {
      for (const char* s : {"u", "v"}) {
        const std::string name = probe_name(s, p);
        traces.series.push_back({"micro " + name, run.micro.times(), run.micro[name]});
        traces.series.push_back({"macro " + name, ref.times(), ref[name]});
      }
    }
    write_svg(dir / ("traces_" + tag + ".svg"), traces);
  };
  StudyResult result = convergence_study(c.study_setup(), eps, [&](const StudyRun& run) {
    rows.push_back(run.norms);
    write_norms(dir / "norms.csv", rows);
    micro_summaries.push_back(run_summary(run.micro));
    out << "epsilon " << format_double(run.norms.epsilon) << ": micro " << format_double(run.norms.wall_time_micro)
        << " s, macro " << format_double(run.norms.wall_time_macro) << " s\n";
  });
  for (const StudyRun& run : result.runs) plots(run, result.macro);

  // The cost comparison uses a macro run at the production resolution, not the
  // finer study reference.
  const auto macro_start = Clock::now();
  const auto macro_mesh = std::make_shared<const Mesh2D>(build_macro_mesh(c.domain, c.macro_h));
  const Trace production =
      run_coupled(make_macro_operators(macro_mesh, c.params, result.coefficients, c.solver), c.init, c.trace_request());
  const double macro_wall = seconds_since(macro_start);

  Json report{{"rows", Json::array()}};
  for (const NormReport& r : rows) report["rows"].push_back(to_json(r));
  report["reference_macro_h"] = c.study_macro_h;
  report["wall_time_macro_production"] = macro_wall;
  report["wall_time_ratio"] = macro_wall / rows.front().wall_time_micro;
  report["macro_production"] = run_summary(production);
  report["coefficients"] = to_json(result.coefficients);
  report["macro"] = run_summary(result.macro);
  report["micro"] = micro_summaries;
  if (sweep) {
    const Mesh2D tmpl = build_unit_cell_mesh(cell_spec(c, c.micro_h));
    const CompatibilityTable table = initial_compatibility(eps, c.init.w, c.domain, tmpl, *macro_mesh,
                                                           result.coefficients.interface_measure);
    Json compat{{"limit", table.limit}, {"rows", Json::array()}};
    for (const CompatibilityRow& r : table.rows) compat["rows"].push_back({{"epsilon", r.epsilon}, {"value", r.value}});
    report["compatibility"] = compat;
  }
  write_json(dir / "report.json", report);
  finish(dir, out);
  return 0;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Micro and homogenized simulations of reactive transport in a perforated medium", "porehom"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "configuration file")->required();
    sub->add_option("--out", o.out, "output directory (overrides output.directory)");
  };
  auto geometry = [&](CLI::App* sub) {
    sub->add_option("--mesh-h", o.micro_h, "micro template mesh size in cell units");
    sub->add_option("--cell-h", o.cell_h, "cell-problem mesh size");
    sub->add_option("--macro-h", o.macro_h, "macro mesh size");
    sub->add_option("--n-gamma", o.n_gamma, "polygon sides of each inclusion");
  };
  auto timing = [&](CLI::App* sub) {
    sub->add_option("--dt", o.dt, "time step");
    sub->add_option("--T", o.T, "final time");
    sub->add_option("--point", o.points, "trace point x,y (repeatable; replaces the configured points)");
  };

  CLI::App* mesh = app.add_subcommand("mesh", "build and export the meshes");
  common(mesh);
  geometry(mesh);
  mesh->add_option("--eps", o.eps, "scale parameter");
  CLI::App* cell = app.add_subcommand("cell", "solve the cell problems and report the effective tensors");
  common(cell);
  geometry(cell);
  CLI::App* micro = app.add_subcommand("micro", "run the perforated-domain model");
  common(micro);
  geometry(micro);
  timing(micro);
  micro->add_option("--eps", o.eps, "scale parameter");
  micro->add_flag("--no-vtk", o.no_vtk, "skip field snapshots");
  CLI::App* macro = app.add_subcommand("macro", "run the homogenized model");
  common(macro);
  geometry(macro);
  timing(macro);
  macro->add_option("--cell", o.cell_json, "cell.json written by the cell command");
  macro->add_option("--tensor", o.tensor, "effective tensor a11,a12,a22 (B is scaled by D2/D1)")->delimiter(',');
  macro->add_flag("--no-vtk", o.no_vtk, "skip field snapshots");
  CLI::App* verify = app.add_subcommand("verify", "compare micro and macro runs at one epsilon");
  common(verify);
  geometry(verify);
  timing(verify);
  verify->add_option("--reference-h", o.reference_h, "macro mesh size of the reference solution");
  verify->add_option("--eps", o.eps, "scale parameter");
  CLI::App* converge = app.add_subcommand("converge", "corrector norms over a list of epsilon values");
  common(converge);
  geometry(converge);
  timing(converge);
  converge->add_option("--reference-h", o.reference_h, "macro mesh size of the reference solution");
  converge->add_option("--eps", o.eps, "comma-separated scale parameters")->delimiter(',');

  std::vector<std::string> reversed(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n" << app.help();
    return 2;
  }

  try {
    if (mesh->parsed()) return cmd_mesh(resolve(o, false), out);
    if (cell->parsed()) return cmd_cell(resolve(o, false), out);
    if (micro->parsed()) return cmd_micro(resolve(o, false), o, out);
    if (macro->parsed()) return cmd_macro(resolve(o, false), o, out);
    if (verify->parsed()) return cmd_study(resolve(o, false), false, out);
    if (converge->parsed()) return cmd_study(resolve(o, true), true, out);
  } catch (const Error& e) {
    err << "error [" << to_string(e.kind()) << "]: " << e.what() << "\n";
    return e.kind() == ErrorKind::Usage ? 2 : 1;
  } catch (const std::exception& e) {
    err << "error [internal]: " << e.what() << "\n";
    return 1;
  }
  err << app.help();
  return 2;
}

}  // namespace porehom

#include "porehom/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "porehom/error.hpp"

namespace porehom {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

EnergySeries energy_from(const Trace& trace) {
  return {trace.times(), trace["energy_direct"], trace["energy_flux"]};
}

double quadratic_form(const SparseMatrix& m, const std::vector<double>& x) { return dot(x, m * x); }

}  // namespace

double EnergySeries::max_relative_gap() const {
  double gap = 0.0;
  for (std::size_t i = 0; i < direct.size(); ++i) {
    const double scale = std::abs(direct[i]);
    const double d = std::abs(direct[i] - flux[i]);
    gap = std::max(gap, scale > 0.0 ? d / scale : d);
  }
  return gap;
}

EnergySeries micro_energy(const Trace& trace) { return energy_from(trace); }
EnergySeries macro_energy(const Trace& trace) { return energy_from(trace); }

CorrectorField periodic_corrector(const CellSolution& cell, double epsilon) {
  return [&cell, epsilon](Vec2 x) {
    Vec2 y{x.x / epsilon, x.y / epsilon};
    y.x -= std::floor(y.x);
    y.y -= std::floor(y.y);
    return cell.corrector_at(y);
  };
}

CorrectorField identity_corrector() {
  return [](Vec2) { return identity2(); };
}

struct NormAccumulator::Impl {
  const CoupledOperators* micro = nullptr;
  const CoupledOperators* ref = nullptr;
  const Trace* ref_trace = nullptr;
  std::vector<PointLocation> at_vertex;  // micro vertex -> reference element
  std::vector<int> ref_triangle;         // micro triangle -> reference element of its barycenter
  std::vector<Mat2> corrector;           // C^eps at micro barycenters
  SparseMatrix interface_mass;           // eps-scaled, consistent
  bool has_interface = false;

  std::size_t sample = 0;
  double sup_u = 0.0, sup_v = 0.0, sup_w = 0.0;
  double int_gu = 0.0, int_gv = 0.0;
  double prev_t = 0.0, prev_gu = 0.0, prev_gv = 0.0;

  double interp(const std::vector<double>& f, const PointLocation& loc) const {
    const auto& tri = ref->mesh->triangle(static_cast<std::size_t>(loc.triangle));
    return loc.bary[0] * f[static_cast<std::size_t>(tri[0])] + loc.bary[1] * f[static_cast<std::size_t>(tri[1])] +
           loc.bary[2] * f[static_cast<std::size_t>(tri[2])];
  }

  std::vector<double> difference(const std::vector<double>& micro_values, const std::vector<double>& ref_values) const {
    std::vector<double> e(micro_values.size());
    for (std::size_t i = 0; i < e.size(); ++i) e[i] = micro_values[i] - interp(ref_values, at_vertex[i]);
    return e;
  }

  double gradient_error(const std::vector<double>& micro_values, const std::vector<double>& ref_values) const {
    const Mesh2D& mesh = *micro->mesh;
    const std::vector<Vec2> g0 = element_gradients(*ref->mesh, ref_values);
    double s = 0.0;
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
      const Vec2 g = element_gradient(mesh, t, micro_values);
      const Vec2 r = apply(corrector[t], g0[static_cast<std::size_t>(ref_triangle[t])]);
      const Vec2 d = g - r;
      s += mesh.area(t) * dot(d, d);
    }
    return s;
  }
};

NormAccumulator::NormAccumulator(const CoupledOperators& micro, const CoupledOperators& reference,
                                 const Trace& reference_trace, const CorrectorField& corrector)
    : impl_(std::make_unique<Impl>()) {
  Impl& d = *impl_;
  d.micro = &micro;
  d.ref = &reference;
  d.ref_trace = &reference_trace;
  if (reference_trace.snapshots().size() != reference_trace.times().size()) {
    throw Error(ErrorKind::Validation, "reference trace must keep a snapshot at every sample");
  }
  const Mesh2D& mesh = *micro.mesh;
  const PointLocator locator(*reference.mesh);
  auto locate = [&](Vec2 p) {
    const auto loc = locator.locate(p);
    if (!loc) {
      std::ostringstream os;
      os << "micro point (" << p.x << ", " << p.y << ") lies outside the reference mesh";
      throw Error(ErrorKind::Geometry, os.str());
    }
    return *loc;
  };
  d.at_vertex.reserve(mesh.num_vertices());
  for (Vec2 p : mesh.vertices()) d.at_vertex.push_back(locate(p));
  d.ref_triangle.reserve(mesh.num_triangles());
  d.corrector.reserve(mesh.num_triangles());
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const Vec2 b = mesh.barycenter(t);
    d.ref_triangle.push_back(locate(b).triangle);
    d.corrector.push_back(corrector(b));
  }
  d.has_interface = mesh.count_edges(EdgeTag::Interface) > 0;
  if (d.has_interface) {
    d.interface_mass = assemble_interface_mass(mesh, EdgeTag::Interface, false).scaled(micro.params.epsilon);
  }
}

NormAccumulator::~NormAccumulator() = default;
NormAccumulator::NormAccumulator(NormAccumulator&&) noexcept = default;

void NormAccumulator::observe(const ReactiveState& state) {
  Impl& d = *impl_;
  const auto& snaps = d.ref_trace->snapshots();
  if (d.sample >= snaps.size() || snaps[d.sample].step != state.step) {
    std::ostringstream os;
    os << "micro sample at step " << state.step << " has no matching reference sample";
    throw Error(ErrorKind::Validation, os.str());
  }
  const Snapshot& ref = snaps[d.sample];

  const std::vector<double> eu = d.difference(state.u, ref.u);
  const std::vector<double> ev = d.difference(state.v, ref.v);
  d.sup_u = std::max(d.sup_u, std::sqrt(std::max(0.0, quadratic_form(d.micro->mass, eu))));
  d.sup_v = std::max(d.sup_v, std::sqrt(std::max(0.0, quadratic_form(d.micro->mass, ev))));

  if (d.has_interface) {
    // Expand both precipitate fields to vertex arrays, then compare at the
    // micro interface vertices.
    std::vector<double> ref_w(d.ref->num_volume(), 0.0);
    for (std::size_t j = 0; j < d.ref->num_surface(); ++j) {
      ref_w[static_cast<std::size_t>(d.ref->surface_vertex[j])] = ref.w[j];
    }
    std::vector<double> ew(d.micro->num_volume(), 0.0);
    for (std::size_t j = 0; j < d.micro->num_surface(); ++j) {
      const auto v = static_cast<std::size_t>(d.micro->surface_vertex[j]);
      ew[v] = state.w[j] - d.interp(ref_w, d.at_vertex[v]);
    }
    d.sup_w = std::max(d.sup_w, std::sqrt(std::max(0.0, quadratic_form(d.interface_mass, ew))));
  }

  const double gu = d.gradient_error(state.u, ref.u);
  const double gv = d.gradient_error(state.v, ref.v);
  if (d.sample > 0) {
    const double h = state.t - d.prev_t;
    d.int_gu += 0.5 * h * (d.prev_gu + gu);
    d.int_gv += 0.5 * h * (d.prev_gv + gv);
  }
  d.prev_t = state.t;
  d.prev_gu = gu;
  d.prev_gv = gv;
  ++d.sample;
}

NormReport NormAccumulator::finish(const Trace& micro_trace) const {
  const Impl& d = *impl_;
  if (d.sample != d.ref_trace->times().size() || micro_trace.times().size() != d.sample) {
    throw Error(ErrorKind::Validation, "micro and reference runs were sampled at different times");
  }
  NormReport r;
  r.epsilon = d.micro->params.epsilon;
  r.norm_u_C_L2 = d.sup_u;
  r.norm_v_C_L2 = d.sup_v;
  r.norm_w_C_L2 = d.sup_w;
  r.norm_grad_u = std::sqrt(d.int_gu);
  r.norm_grad_v = std::sqrt(d.int_gv);
  const auto& em = micro_trace["energy_direct"];
  const auto& e0 = (*d.ref_trace)["energy_direct"];
  for (std::size_t i = 0; i < em.size(); ++i) r.energy_sup_diff = std::max(r.energy_sup_diff, std::abs(em[i] - e0[i]));
  r.wall_time_micro = micro_trace.wall_time;
  r.wall_time_macro = d.ref_trace->wall_time;
  return r;
}

NormReport corrector_norms(const CoupledOperators& micro, const Trace& micro_trace, const CoupledOperators& reference,
                           const Trace& reference_trace, const CorrectorField& corrector) {
  if (micro_trace.snapshots().size() != micro_trace.times().size()) {
    throw Error(ErrorKind::Validation, "micro trace must keep a snapshot at every sample");
  }
  NormAccumulator acc(micro, reference, reference_trace, corrector);
  for (const Snapshot& s : micro_trace.snapshots()) acc.observe({s.step, s.time, s.u, s.v, s.w, s.z});
  return acc.finish(micro_trace);
}

CompatibilityTable initial_compatibility(std::span<const double> eps_list, const Polynomial2& w_init,
                                         const Rect& domain, const Mesh2D& cell_template, const Mesh2D& macro,
                                         double interface_measure) {
  CompatibilityTable table;
  auto nodal = [&](const Mesh2D& m) {
    std::vector<double> f(m.num_vertices());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = w_init(m.vertex(static_cast<int>(i)));
    return f;
  };
  for (double eps : eps_list) {
    const Mesh2D mesh = build_perforated_mesh(domain, eps, cell_template);
    const SparseMatrix m_gamma = assemble_interface_mass(mesh, EdgeTag::Interface, false);
    table.rows.push_back({eps, eps * quadratic_form(m_gamma, nodal(mesh))});
  }
  table.limit = interface_measure * quadratic_form(assemble_mass(macro), nodal(macro));
  return table;
}

StudyResult convergence_study(const StudySetup& setup, std::span<const double> eps_list,
                              const std::function<void(const StudyRun&)>& on_row) {
  if (eps_list.empty()) throw Error(ErrorKind::Validation, "the epsilon list is empty");
  StudyResult result;

  const auto cell_mesh =
      std::make_shared<const Mesh2D>(build_unit_cell_mesh({setup.radius, setup.n_gamma, setup.cell_h, setup.radius > 0.0}));
  const CellSolution cell = solve_cell_problems(cell_mesh);
  result.coefficients = macro_coefficients(cell, setup.params);

  TraceRequest ref_request = setup.trace;
  ref_request.keep_snapshots = true;
  const auto macro_start = Clock::now();
  const auto macro_mesh = std::make_shared<const Mesh2D>(build_macro_mesh(setup.domain, setup.macro_h));
  const CoupledOperators macro_ops =
      make_macro_operators(macro_mesh, setup.params, result.coefficients, setup.solver);
  result.macro = run_coupled(macro_ops, setup.init, ref_request);
  result.macro.wall_time = seconds_since(macro_start);

  const Mesh2D cell_template = build_unit_cell_mesh({setup.radius, setup.n_gamma, setup.micro_h, setup.radius > 0.0});
  TraceRequest micro_request = setup.trace;
  micro_request.keep_snapshots = false;
  for (double eps : eps_list) {
    ModelParams params = setup.params;
    params.epsilon = eps;
    const auto start = Clock::now();
    const auto mesh = std::make_shared<const Mesh2D>(build_perforated_mesh(setup.domain, eps, cell_template));
    const CoupledOperators ops = make_micro_operators(mesh, params, setup.solver);
    const double assembly = seconds_since(start);

    NormAccumulator acc(ops, macro_ops, result.macro, periodic_corrector(cell, eps));
    double observing = 0.0;
    Trace micro = run_coupled(ops, setup.init, micro_request, [&](const ReactiveState& s, bool) {
      const auto t0 = Clock::now();
      acc.observe(s);
      observing += seconds_since(t0);
    });
    micro.wall_time = assembly + micro.wall_time - observing;
    StudyRun run{acc.finish(micro), std::move(micro)};
    if (on_row) on_row(run);
    result.runs.push_back(std::move(run));
  }
  return result;
}

}  // namespace porehom

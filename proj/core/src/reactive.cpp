#include "porehom/reactive.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>
#include <string>

#include "porehom/error.hpp"

namespace porehom {
namespace {

void check_finite(const std::vector<double>& f, const char* name, double t) {
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (std::isfinite(f[i])) continue;
    const auto [lo, hi] = std::minmax_element(f.begin(), f.end(), [](double a, double b) {
      return std::isfinite(a) && (!std::isfinite(b) || a < b);
    });
    std::ostringstream os;
    os << "field " << name << " became non-finite at t = " << t << " (dof " << i << "; finite range [" << *lo
       << ", " << *hi << "])";
    throw Error(ErrorKind::Numerical, os.str());
  }
}

double min_of(const std::vector<double>& f) {
  return f.empty() ? 0.0 : *std::min_element(f.begin(), f.end());
}

double max_of(const std::vector<double>& f) {
  return f.empty() ? 0.0 : *std::max_element(f.begin(), f.end());
}

}  // namespace

void CoupledOperators::finalize() {
  const double dt = params.dt;
  system_u = SparseMatrix::combine(1.0, mass, dt, stiff_u);
  system_v = SparseMatrix::combine(1.0, mass, dt, stiff_v);
  const std::vector<double> rows = coupling.row_sums();
  surface_weight.resize(surface_vertex.size());
  for (std::size_t j = 0; j < surface_vertex.size(); ++j) {
    surface_weight[j] = rows[static_cast<std::size_t>(surface_vertex[j])];
  }
}

ReactiveState initial_state(const CoupledOperators& ops, const InitialData& init) {
  const Mesh2D& mesh = *ops.mesh;
  ReactiveState s;
  s.u.resize(ops.num_volume());
  s.v.resize(ops.num_volume());
  s.w.resize(ops.num_surface());
  s.z.resize(ops.num_surface());
  auto reject = [](const char* name, Vec2 p, double value) {
    std::ostringstream os;
    os << "initial " << name << " is negative (" << value << ") at (" << p.x << ", " << p.y << ")";
    throw Error(ErrorKind::Validation, os.str());
  };
  for (std::size_t i = 0; i < ops.num_volume(); ++i) {
    const Vec2 p = mesh.vertex(static_cast<int>(i));
    s.u[i] = init.u(p);
    s.v[i] = init.v(p);
    if (s.u[i] < 0.0) reject("u", p, s.u[i]);
    if (s.v[i] < 0.0) reject("v", p, s.v[i]);
  }
  for (std::size_t j = 0; j < ops.num_surface(); ++j) {
    const Vec2 p = mesh.vertex(ops.surface_vertex[j]);
    s.w[j] = init.w(p);
    if (s.w[j] < 0.0) reject("w", p, s.w[j]);
    s.z[j] = psi_reg(s.w[j], ops.params.delta);
  }
  return s;
}

StepInfo advance(const CoupledOperators& ops, ReactiveState& state) {
  const ModelParams& p = ops.params;
  const std::size_t n = ops.num_volume();
  StepInfo info;
  info.coupling_rhs.assign(n, 0.0);

  std::vector<double> dw(n, 0.0);
  for (std::size_t j = 0; j < ops.num_surface(); ++j) {
    const auto vtx = static_cast<std::size_t>(ops.surface_vertex[j]);
    const double rate = reaction_rate(state.u[vtx], state.v[vtx], p);
    const double next = advance_precipitate(state.w[j], rate, p.dt, p.k_d, p.delta);
    dw[vtx] = next - state.w[j];
    state.w[j] = next;
    state.z[j] = psi_reg(next, p.delta);
  }
  ops.coupling.multiply(dw, info.coupling_rhs);

  const double t_next = (state.step + 1) * p.dt;
  check_finite(state.w, "w", t_next);
  std::vector<double> rhs(n);
  auto solve = [&](const SparseMatrix& system, std::vector<double>& f, const char* name) {
    ops.mass.multiply(f, rhs);
    for (std::size_t i = 0; i < n; ++i) rhs[i] -= info.coupling_rhs[i];
    SolveResult r = solve_spd(system, rhs, ops.solver, f);
    check_finite(r.x, name, t_next);
    f = std::move(r.x);
    return r.iterations;
  };
  info.iterations_u = solve(ops.system_u, state.u, "u");
  info.iterations_v = solve(ops.system_v, state.v, "v");
  state.step += 1;
  state.t = t_next;
  return info;
}

double volume_total(const CoupledOperators& ops, const std::vector<double>& f) {
  const std::vector<double> mf = ops.mass * f;
  double s = 0.0;
  for (double x : mf) s += x;
  return s;
}

double surface_total(const CoupledOperators& ops, const std::vector<double>& f) {
  double s = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) s += ops.surface_weight[j] * f[j];
  return s;
}

Trace run_coupled(const CoupledOperators& ops, const InitialData& init, const TraceRequest& request,
                  const StateObserver& observer) {
  const auto start = std::chrono::steady_clock::now();
  const ModelParams& p = ops.params;
  p.validate();
  const Mesh2D& mesh = *ops.mesh;

  const PointLocator locator(mesh);
  std::vector<PointLocation> probes;
  std::vector<std::string> names;
  for (Vec2 q : request.points) {
    const auto loc = locator.locate(q);
    if (!loc) {
      std::ostringstream os;
      os << "trace point (" << q.x << ", " << q.y << ") is outside the computational domain";
      throw Error(ErrorKind::Geometry, os.str());
    }
    probes.push_back(*loc);
  }
  for (Vec2 q : request.points) names.push_back(probe_name("u", q));
  for (Vec2 q : request.points) names.push_back(probe_name("v", q));
  for (const char* s : {"mass_u", "mass_v", "mass_w", "min_u", "min_v", "min_w", "min_z", "max_z", "energy_direct",
                        "energy_flux", "iterations"}) {
    names.emplace_back(s);
  }

  ReactiveState state = initial_state(ops, init);
  std::vector<double> ku = ops.stiff_u * state.u;
  const double initial_energy = 0.5 * dot(state.u, ops.mass * state.u);
  double dissipation = 0.0;  // integral of u.K_u u over time, trapezoidal
  double exchange = 0.0;     // integral of u.C dw/dt over time, trapezoidal
  int iterations = 0;

  Trace trace;
  auto interp = [&](const std::vector<double>& f, const PointLocation& loc) {
    const auto& tri = mesh.triangle(static_cast<std::size_t>(loc.triangle));
    return loc.bary[0] * f[static_cast<std::size_t>(tri[0])] + loc.bary[1] * f[static_cast<std::size_t>(tri[1])] +
           loc.bary[2] * f[static_cast<std::size_t>(tri[2])];
  };
  auto record = [&]() {
    std::vector<double> values;
    for (const auto& loc : probes) values.push_back(interp(state.u, loc));
    for (const auto& loc : probes) values.push_back(interp(state.v, loc));
    const double half_norm = 0.5 * dot(state.u, ops.mass * state.u);
    values.insert(values.end(), {volume_total(ops, state.u), volume_total(ops, state.v), surface_total(ops, state.w),
                                 min_of(state.u), min_of(state.v), min_of(state.w), min_of(state.z), max_of(state.z),
                                 ops.energy_weight * (half_norm + dissipation),
                                 ops.energy_weight * (initial_energy - exchange), static_cast<double>(iterations)});
    trace.append(state.step, state.t, names, values);
    const bool stride = is_stride_step(state.step, p);
    if (request.keep_snapshots) trace.snapshots().push_back({state.step, state.t, state.u, state.v, state.w, state.z});
    if (observer) observer(state, stride);
  };

  record();
  const int steps = p.num_steps();
  for (int n = 0; n < steps; ++n) {
    const std::vector<double> previous = state.u;
    const StepInfo info = advance(ops, state);
    iterations = info.iterations_u + info.iterations_v;
    std::vector<double> ku_next = ops.stiff_u * state.u;
    dissipation += 0.5 * p.dt * (dot(previous, ku) + dot(state.u, ku_next));
    ku = std::move(ku_next);
    double flux = 0.0;
    for (std::size_t i = 0; i < state.u.size(); ++i) {
      flux += 0.5 * (previous[i] + state.u[i]) * info.coupling_rhs[i];
    }
    exchange += flux;
    if (is_sample_step(state.step, p, request)) record();
  }
  trace.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return trace;
}

}  // namespace porehom

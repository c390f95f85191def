#include <cmath>
#include <numbers>

#include "doctest.h"
#include "porehom/error.hpp"
#include "porehom/macro.hpp"
#include "porehom/micro.hpp"
#include "porehom/verify.hpp"

using namespace porehom;

namespace {

const Rect kDomain{0.0, 0.0, 1.2, 1.0};

MeshPtr coarse_micro(double eps = 0.2) {
  const Mesh2D tmpl = build_unit_cell_mesh({0.25, 32, 0.25, true});
  return std::make_shared<const Mesh2D>(build_perforated_mesh(kDomain, eps, tmpl));
}

ModelParams short_params(double T) {
  ModelParams p;
  p.T = T;
  return p;
}

double half_mass_norm(const CoupledOperators& ops, const std::vector<double>& f) {
  std::vector<double> mf(f.size());
  ops.mass.multiply(f, mf);
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * mf[i];
  return 0.5 * s;
}

StudySetup small_setup() {
  StudySetup s;
  s.cell_h = 0.1;
  s.micro_h = 0.25;
  s.macro_h = 0.1;
  s.n_gamma = 32;
  s.params.T = 0.1;
  s.trace.points = {{0.6, 0.5}};
  s.trace.burst_end = 0.05;
  return s;
}

}  // namespace

TEST_CASE("energies at t = 0 and over a short run") {
  const CoupledOperators ops = make_micro_operators(coarse_micro(), short_params(0.3));
  const Trace t = run_coupled(ops, InitialData{}, {{{0.6, 0.5}}, 0.1});
  const EnergySeries e = micro_energy(t);
  const double e0 = half_mass_norm(ops, init_micro(ops, InitialData{}).u);
  CHECK(e.direct.front() == doctest::Approx(e0).epsilon(1e-14));
  CHECK(e.flux.front() == doctest::Approx(e0).epsilon(1e-14));
  CHECK(e.times == t.times());
  CHECK(e.max_relative_gap() < 0.01);
  for (std::size_t i = 1; i < e.direct.size(); ++i) CHECK(e.direct[i] > 0.0);

  MacroCoefficients c;
  c.A = {{{0.8358, 0.0}, {0.0, 0.8358}}};
  c.B = {{{1.6716, 0.0}, {0.0, 1.6716}}};
  c.porosity = 0.8;
  c.interface_measure = 1.5;
  const auto mesh = std::make_shared<const Mesh2D>(build_macro_mesh(kDomain, 0.1));
  const CoupledOperators mops = make_macro_operators(mesh, short_params(0.3), c);
  const Trace mt = run_coupled(mops, InitialData{}, {{{0.6, 0.5}}, 0.1});
  const EnergySeries me = macro_energy(mt);
  const double m0 = 0.8 * half_mass_norm(mops, init_macro(mops, InitialData{}).u);
  CHECK(me.direct.front() == doctest::Approx(m0).epsilon(1e-14));
  CHECK(me.flux.front() == doctest::Approx(m0).epsilon(1e-14));
  CHECK(me.max_relative_gap() < 0.01);
}

TEST_CASE("frozen precipitate keeps the flux energy constant") {
  ModelParams p = short_params(0.1);
  p.k_d = 0.0;
  const CoupledOperators ops = make_micro_operators(coarse_micro(), p);
  const EnergySeries e = micro_energy(run_coupled(ops, InitialData{}, {{}, 0.05}));
  for (double x : e.flux) CHECK(x == e.flux.front());
  // the direct form decays while dissipation accumulates, but the sum does not
  CHECK(e.max_relative_gap() < 0.01);
}

TEST_CASE("self comparison gives zero norms") {
  const CoupledOperators ops = make_micro_operators(coarse_micro(), short_params(0.05));
  TraceRequest req{{}, 0.02, true};
  const Trace t = run_coupled(ops, InitialData{}, req);
  const NormReport r = corrector_norms(ops, t, ops, t, identity_corrector());
  CHECK(r.epsilon == 0.2);
  CHECK(r.norm_u_C_L2 < 1e-12);
  CHECK(r.norm_v_C_L2 < 1e-12);
  CHECK(r.norm_grad_u < 1e-10);
  CHECK(r.norm_grad_v < 1e-10);
  CHECK(r.norm_w_C_L2 < 1e-12);
  CHECK(r.energy_sup_diff < 1e-12);

  TraceRequest sparse = req;
  sparse.burst_end = 0.0;
  const Trace other = run_coupled(ops, InitialData{}, sparse);
  CHECK_THROWS_AS(corrector_norms(ops, t, ops, other, identity_corrector()), Error);
}

TEST_CASE("periodic corrector mean recovers the effective tensor") {
  const auto cell_mesh = std::make_shared<const Mesh2D>(build_unit_cell_mesh({0.25, 32, 0.05, true}));
  const CellSolution cell = solve_cell_problems(cell_mesh);
  const double eps = 0.2;
  const CorrectorField c = periodic_corrector(cell, eps);
  Mat2 mean{};
  double area = 0.0;
  for (const auto& tri : cell_mesh->triangles()) {
    const Vec2 a = cell_mesh->vertex(tri[0]), b = cell_mesh->vertex(tri[1]), d = cell_mesh->vertex(tri[2]);
    const double t_area = 0.5 * std::abs((b.x - a.x) * (d.y - a.y) - (d.x - a.x) * (b.y - a.y));
    const Vec2 centroid{(a.x + b.x + d.x) / 3.0, (a.y + b.y + d.y) / 3.0};
    // sample the same cell point in the third column, second row of cells
    const Mat2 m = c({eps * (2.0 + centroid.x), eps * (1.0 + centroid.y)});
    for (int i = 0; i < 2; ++i)
      for (int k = 0; k < 2; ++k) mean[i][k] += t_area * m[i][k];
    area += t_area;
  }
  const EffectiveTensor a = effective_tensor(cell, 1.0);
  CHECK(area == doctest::Approx(cell.porosity()).epsilon(1e-12));
  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < 2; ++k) CHECK(std::abs(mean[i][k] - cell.porosity() * a.value[i][k]) < 1e-10);
}

TEST_CASE("initial compatibility table") {
  const Mesh2D tmpl = build_unit_cell_mesh({0.25, 64, 0.25, true});
  const Mesh2D macro = build_macro_mesh(kDomain, 0.05);
  const double perimeter = 2.0 * 64 * 0.25 * std::sin(std::numbers::pi / 64);
  const std::vector<double> eps{0.2, 0.1};

  const CompatibilityTable zero = initial_compatibility(eps, Polynomial2::constant(0.0), kDomain, tmpl, macro, perimeter);
  CHECK(zero.limit == 0.0);
  for (const auto& r : zero.rows) CHECK(r.value == 0.0);

  const CompatibilityTable one = initial_compatibility(eps, Polynomial2::constant(1.0), kDomain, tmpl, macro, perimeter);
  REQUIRE(one.rows.size() == 2);
  CHECK(one.limit == doctest::Approx(1.2 * perimeter).epsilon(1e-12));
  CHECK(std::abs(one.limit - std::numbers::pi / 2.0 * 1.2) < 1e-3);
  for (const auto& r : one.rows) CHECK(r.value == doctest::Approx(1.2 * perimeter).epsilon(1e-12));

  const CompatibilityTable lin = initial_compatibility(eps, parse_polynomial("3*x1 + x2"), kDomain, tmpl, macro, perimeter);
  CHECK(std::abs(lin.rows[1].value - lin.limit) < std::abs(lin.rows[0].value - lin.limit));
}

TEST_CASE("convergence study bookkeeping") {
  const StudySetup setup = small_setup();
  CHECK_THROWS_AS(convergence_study(setup, std::vector<double>{}), Error);

  int rows = 0;
  const StudyResult r = convergence_study(setup, std::vector<double>{0.2}, [&](const StudyRun&) { ++rows; });
  CHECK(rows == 1);
  REQUIRE(r.runs.size() == 1);
  const NormReport& n = r.runs[0].norms;
  CHECK(n.epsilon == 0.2);
  for (double x : {n.norm_u_C_L2, n.norm_grad_u, n.norm_v_C_L2, n.norm_grad_v, n.norm_w_C_L2, n.energy_sup_diff}) {
    CHECK(std::isfinite(x));
    CHECK(x > 0.0);
  }
  CHECK(n.wall_time_micro > 0.0);
  CHECK(n.wall_time_macro > 0.0);

  // the same row through the batch interface
  const auto cell_mesh = std::make_shared<const Mesh2D>(build_unit_cell_mesh({0.25, 32, setup.cell_h, true}));
  const CellSolution cell = solve_cell_problems(cell_mesh);
  const auto macro_mesh = std::make_shared<const Mesh2D>(build_macro_mesh(kDomain, setup.macro_h));
  const CoupledOperators macro_ops = make_macro_operators(macro_mesh, setup.params, macro_coefficients(cell, setup.params));
  TraceRequest req = setup.trace;
  req.keep_snapshots = true;
  const Trace macro = run_coupled(macro_ops, setup.init, req);
  const Mesh2D tmpl = build_unit_cell_mesh({0.25, 32, setup.micro_h, true});
  const CoupledOperators micro_ops =
      make_micro_operators(std::make_shared<const Mesh2D>(build_perforated_mesh(kDomain, 0.2, tmpl)), setup.params);
  const Trace micro = run_coupled(micro_ops, setup.init, req);
  const NormReport direct = corrector_norms(micro_ops, micro, macro_ops, macro, periodic_corrector(cell, 0.2));
  CHECK(direct.norm_u_C_L2 == doctest::Approx(n.norm_u_C_L2).epsilon(1e-12));
  CHECK(direct.norm_grad_u == doctest::Approx(n.norm_grad_u).epsilon(1e-12));
  CHECK(direct.norm_v_C_L2 == doctest::Approx(n.norm_v_C_L2).epsilon(1e-12));
  CHECK(direct.norm_grad_v == doctest::Approx(n.norm_grad_v).epsilon(1e-12));
  CHECK(direct.norm_w_C_L2 == doctest::Approx(n.norm_w_C_L2).epsilon(1e-12));
  CHECK(direct.energy_sup_diff == doctest::Approx(n.energy_sup_diff).epsilon(1e-12));
}

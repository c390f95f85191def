#include "porehom/macro.hpp"

#include <chrono>
#include <numeric>

namespace porehom {

MacroCoefficients macro_coefficients(const CellSolution& cell, const ModelParams& params) {
  MacroCoefficients c;
  c.A = effective_tensor(cell, params.D1).value;
  c.B = effective_tensor(cell, params.D2).value;
  c.porosity = cell.porosity();
  c.interface_measure = cell.interface_measure();
  return c;
}

CoupledOperators make_macro_operators(MeshPtr mesh, const ModelParams& params, const MacroCoefficients& coeffs,
                                      const SolverOptions& solver) {
  params.validate();
  CoupledOperators ops;
  ops.mesh = mesh;
  ops.params = params;
  ops.solver = solver;
  ops.mass = assemble_mass(*mesh);
  ops.stiff_u = assemble_stiffness(*mesh, coeffs.A);
  ops.stiff_v = assemble_stiffness(*mesh, coeffs.B);
  ops.coupling = ops.mass.scaled(coeffs.interface_measure / coeffs.porosity);
  // Without an interface there is no precipitate to carry, as in a micro
  // domain without inclusions.
  if (coeffs.interface_measure > 0.0) {
    ops.surface_vertex.resize(mesh->num_vertices());
    std::iota(ops.surface_vertex.begin(), ops.surface_vertex.end(), 0);
  }
  ops.energy_weight = coeffs.porosity;
  ops.finalize();
  return ops;
}

MacroState init_macro(const CoupledOperators& ops, const InitialData& init) { return initial_state(ops, init); }

StepInfo step_macro(const CoupledOperators& ops, MacroState& state) { return advance(ops, state); }

Trace run_macro(MeshPtr mesh, const ModelParams& params, const MacroCoefficients& coeffs, const InitialData& init,
                const TraceRequest& request, const SolverOptions& solver, const StateObserver& observer) {
  const auto start = std::chrono::steady_clock::now();
  const CoupledOperators ops = make_macro_operators(std::move(mesh), params, coeffs, solver);
  Trace trace = run_coupled(ops, init, request, observer);
  trace.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return trace;
}

}  // namespace porehom

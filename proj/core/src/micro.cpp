#include "porehom/micro.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "porehom/error.hpp"

namespace porehom {

CoupledOperators make_micro_operators(MeshPtr mesh, const ModelParams& params, const SolverOptions& solver) {
  params.validate();
  if (mesh->num_cells() > 0) {
    const double eps = mesh->bounding_box().width() / mesh->cells_x();
    if (std::abs(eps - params.epsilon) > 1e-9 * params.epsilon) {
      std::ostringstream os;
      os << "mesh was tiled with epsilon = " << eps << " but the parameters say " << params.epsilon;
      throw Error(ErrorKind::Validation, os.str());
    }
  }
  CoupledOperators ops;
  ops.mesh = mesh;
  ops.params = params;
  ops.solver = solver;
  ops.mass = assemble_mass(*mesh);
  const SparseMatrix k = assemble_stiffness(*mesh, identity2());
  ops.stiff_u = k.scaled(params.D1);
  ops.stiff_v = k.scaled(params.D2);
  const auto n = static_cast<int>(mesh->num_vertices());
  if (mesh->count_edges(EdgeTag::Interface) > 0) {
    const SparseMatrix m_gamma = assemble_interface_mass(*mesh, EdgeTag::Interface, true);
    ops.coupling = m_gamma.scaled(params.epsilon);
  } else {
    ops.coupling = SparseMatrix::from_triplets(n, {}, true);
  }
  ops.surface_vertex = mesh->interface_vertices();
  ops.energy_weight = 1.0;
  ops.finalize();
  return ops;
}

MicroState init_micro(const CoupledOperators& ops, const InitialData& init) { return initial_state(ops, init); }

StepInfo step_micro(const CoupledOperators& ops, MicroState& state) { return advance(ops, state); }

Trace run_micro(MeshPtr mesh, const ModelParams& params, const InitialData& init, const TraceRequest& request,
                const SolverOptions& solver, const StateObserver& observer) {
  const auto start = std::chrono::steady_clock::now();
  const CoupledOperators ops = make_micro_operators(std::move(mesh), params, solver);
  Trace trace = run_coupled(ops, init, request, observer);
  trace.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return trace;
}

double total_mass(const CoupledOperators& ops, const ReactiveState& state, Species species) {
  switch (species) {
    case Species::U:
      return volume_total(ops, state.u);
    case Species::V:
      return volume_total(ops, state.v);
    case Species::W:
      return surface_total(ops, state.w);
  }
  return 0.0;
}

}  // namespace porehom

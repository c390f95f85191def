#pragma once

#include "porehom/reactive.hpp"

namespace porehom {

using MicroState = ReactiveState;

// Perforated-domain operators: stiffness scaled by D1 and D2, coupling
// C = epsilon * (lumped interface mass), surface dofs on Interface vertices.
CoupledOperators make_micro_operators(MeshPtr mesh, const ModelParams& params,
                                      const SolverOptions& solver = {1e-12, 20000});

MicroState init_micro(const CoupledOperators& ops, const InitialData& init);
StepInfo step_micro(const CoupledOperators& ops, MicroState& state);

// Assembly plus time stepping; wall_time covers both.
Trace run_micro(MeshPtr mesh, const ModelParams& params, const InitialData& init, const TraceRequest& request,
                const SolverOptions& solver = {1e-12, 20000}, const StateObserver& observer = {});

enum class Species { U, V, W };

// 1^T M f for u and v; epsilon * 1^T M_Gamma w for the precipitate.
double total_mass(const CoupledOperators& ops, const ReactiveState& state, Species species);

}  // namespace porehom

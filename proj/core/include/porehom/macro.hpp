#pragma once

#include "porehom/cell.hpp"
#include "porehom/reactive.hpp"

namespace porehom {

using MacroState = ReactiveState;

// Cell-problem output the homogenized system needs.
struct MacroCoefficients {
  Mat2 A{};                        // effective tensor for u
  Mat2 B{};                        // effective tensor for v
  double porosity = 1.0;           // |Y^p|
  double interface_measure = 0.0;  // |Gamma|
};

MacroCoefficients macro_coefficients(const CellSolution& cell, const ModelParams& params);

// Unperforated operators: stiffness with A and B, coupling
// C = (|Gamma| / |Y^p|) M, one precipitate value per vertex, energy weight |Y^p|.
CoupledOperators make_macro_operators(MeshPtr mesh, const ModelParams& params, const MacroCoefficients& coeffs,
                                      const SolverOptions& solver = {1e-12, 20000});

MacroState init_macro(const CoupledOperators& ops, const InitialData& init);
StepInfo step_macro(const CoupledOperators& ops, MacroState& state);

Trace run_macro(MeshPtr mesh, const ModelParams& params, const MacroCoefficients& coeffs, const InitialData& init,
                const TraceRequest& request, const SolverOptions& solver = {1e-12, 20000},
                const StateObserver& observer = {});

}  // namespace porehom

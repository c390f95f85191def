#pragma once

#include <functional>
#include <vector>

#include "porehom/fem.hpp"
#include "porehom/kinetics.hpp"
#include "porehom/mesh.hpp"
#include "porehom/polynomial.hpp"
#include "porehom/trace.hpp"

namespace porehom {

// Initial data u_I, v_I, w_I; defaults are 5(x1+x2), 8x1+2x2, 3x1+x2.
struct InitialData {
  Polynomial2 u{{0.0, 5.0, 5.0, 0.0, 0.0, 0.0}};
  Polynomial2 v{{0.0, 8.0, 2.0, 0.0, 0.0, 0.0}};
  Polynomial2 w{{0.0, 3.0, 1.0, 0.0, 0.0, 0.0}};

  bool operator==(const InitialData&) const = default;
};

// u, v live on mesh vertices; w, z on the surface dofs of the operators.
struct ReactiveState {
  int step = 0;
  double t = 0.0;
  std::vector<double> u, v, w, z;
};

// Everything one time step needs, assembled once. The micro and macro
// problems differ only in the tensors, the coupling matrix and where the
// surface unknowns sit:
//   w^{n+1} = advance_precipitate(w^n, R(u^n, v^n))        per surface dof
//   (M + dt K_u) u^{n+1} = M u^n - C (w^{n+1} - w^n)       and likewise for v
struct CoupledOperators {
  MeshPtr mesh;
  ModelParams params;
  SolverOptions solver;
  SparseMatrix mass;
  SparseMatrix stiff_u;   // includes the diffusion coefficient or tensor
  SparseMatrix stiff_v;
  SparseMatrix system_u;  // M + dt * stiff_u
  SparseMatrix system_v;
  SparseMatrix coupling;  // C, acting on w expanded to vertices
  std::vector<int> surface_vertex;     // vertex carrying each surface dof
  std::vector<double> surface_weight;  // row sums of C at surface dofs
  double energy_weight = 1.0;          // overall prefactor of the energy

  std::size_t num_volume() const { return mesh->num_vertices(); }
  std::size_t num_surface() const { return surface_vertex.size(); }

  // Shared tail of the micro/macro builders: systems and surface weights.
  void finalize();
};

// Nodal interpolation; z = psi_reg(w). Negative initial values are rejected
// with Error(Validation).
ReactiveState initial_state(const CoupledOperators& ops, const InitialData& init);

struct StepInfo {
  int iterations_u = 0;
  int iterations_v = 0;
  std::vector<double> coupling_rhs;  // C (w^{n+1} - w^n), kept for energy bookkeeping
};

// Advances `state` by one step in place. Throws Error(Numerical) when a field
// turns non-finite and SolverError when a linear solve fails.
StepInfo advance(const CoupledOperators& ops, ReactiveState& state);

// Volume total 1^T M f.
double volume_total(const CoupledOperators& ops, const std::vector<double>& f);
// Surface total sum_j weight_j f_j (the scaled surface measure).
double surface_total(const CoupledOperators& ops, const std::vector<double>& f);

// Receives every sampled state; `stride` marks the regular samples.
using StateObserver = std::function<void(const ReactiveState& state, bool stride)>;

// Runs from t = 0 to T. Recorded series: probes of u and v at the requested
// points, mass_u, mass_v, mass_w, min_u, min_v, min_w, min_z, max_z,
// energy_direct and energy_flux (the two expressions of the species-1
// energy), iterations.
Trace run_coupled(const CoupledOperators& ops, const InitialData& init, const TraceRequest& request,
                  const StateObserver& observer = {});

}  // namespace porehom

#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "porehom/cell.hpp"
#include "porehom/macro.hpp"
#include "porehom/micro.hpp"

namespace porehom {

// The two expressions of the species-1 energy, sampled on the trace times:
// `direct` = mass term plus accumulated dissipation, `flux` = initial energy
// minus the accumulated exchange with the precipitate.
struct EnergySeries {
  std::vector<double> times;
  std::vector<double> direct;
  std::vector<double> flux;

  // max over samples of |direct - flux| / |direct|.
  double max_relative_gap() const;
};

EnergySeries micro_energy(const Trace& trace);
EnergySeries macro_energy(const Trace& trace);

struct NormReport {
  double epsilon = 0.0;
  double norm_u_C_L2 = 0.0;   // max over samples of ||u_eps - u_0||
  double norm_grad_u = 0.0;   // space-time ||grad u_eps - C^eps grad u_0||
  double norm_v_C_L2 = 0.0;
  double norm_grad_v = 0.0;
  double norm_w_C_L2 = 0.0;   // max over samples of the eps-scaled interface norm of w_eps - w_0
  double energy_sup_diff = 0.0;
  double wall_time_micro = 0.0;
  double wall_time_macro = 0.0;

  bool operator==(const NormReport&) const = default;
};

// C^eps(x) for a micro point x.
using CorrectorField = std::function<Mat2(Vec2 x)>;

// c(x / eps mod 1) from a cell solution.
CorrectorField periodic_corrector(const CellSolution& cell, double epsilon);
CorrectorField identity_corrector();

// Streams the micro run sample by sample against a stored reference run (its
// trace must keep snapshots). Geometry lookups are done once up front.
class NormAccumulator {
 public:
  NormAccumulator(const CoupledOperators& micro, const CoupledOperators& reference, const Trace& reference_trace,
                  const CorrectorField& corrector);
  ~NormAccumulator();
  NormAccumulator(NormAccumulator&&) noexcept;

  // Call with every sampled micro state in order; Error(Validation) when the
  // step does not match the next reference sample.
  void observe(const ReactiveState& state);

  // Energy and wall-time fields come from the two traces.
  NormReport finish(const Trace& micro_trace) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Batch form over a micro trace that kept its snapshots.
NormReport corrector_norms(const CoupledOperators& micro, const Trace& micro_trace, const CoupledOperators& reference,
                           const Trace& reference_trace, const CorrectorField& corrector);

struct CompatibilityRow {
  double epsilon = 0.0;
  double value = 0.0;  // eps * integral of w_I^2 over the interfaces
};

struct CompatibilityTable {
  std::vector<CompatibilityRow> rows;
  double limit = 0.0;  // |Gamma| * integral over the domain of w_I^2
};

// `cell_template` is tiled for every epsilon; `macro` supplies the limit
// quadrature and `interface_measure` is |Gamma| of the same polygon.
CompatibilityTable initial_compatibility(std::span<const double> eps_list, const Polynomial2& w_init,
                                         const Rect& domain, const Mesh2D& cell_template, const Mesh2D& macro,
                                         double interface_measure);

struct StudySetup {
  Rect domain{0.0, 0.0, 1.2, 1.0};
  double radius = 0.25;
  int n_gamma = 64;
  double cell_h = 0.02;
  double micro_h = 0.1;  // template resolution in cell units
  double macro_h = 0.05;
  ModelParams params;    // epsilon is overridden per row
  InitialData init;
  TraceRequest trace;
  SolverOptions solver{1e-12, 20000};
};

struct StudyRun {
  NormReport norms;
  Trace micro;  // without snapshots
};

struct StudyResult {
  std::vector<StudyRun> runs;
  Trace macro;
  MacroCoefficients coefficients;
};

// One cell solution and one macro run are shared by all rows. `on_row` is
// invoked as soon as each epsilon completes.
StudyResult convergence_study(const StudySetup& setup, std::span<const double> eps_list,
                              const std::function<void(const StudyRun&)>& on_row = {});

}  // namespace porehom

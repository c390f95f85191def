#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "porehom/fem.hpp"
#include "porehom/geometry.hpp"
#include "porehom/kinetics.hpp"
#include "porehom/reactive.hpp"
#include "porehom/trace.hpp"
#include "porehom/verify.hpp"

namespace porehom {

// Everything a CLI run needs. Text form, one `section.key = value` per line:
//
//   geometry.domain = 0, 0, 1.2, 1      # x0, y0, x1, y1
//   geometry.epsilon = 0.2
//   params.D1 = 1
//   initial.u = 5*(x1 + x2)
//   run.trace_points = 0.6 0.5; 0.3 0.7
//   study.eps = 0.2, 0.1
//
// `#` starts a comment. Unknown or repeated keys are errors.
struct RunConfig {
  Rect domain{0.0, 0.0, 1.2, 1.0};
  double radius = 0.25;
  int n_gamma = 64;
  double cell_h = 0.02;
  double micro_h = 0.1;
  double macro_h = 0.05;
  ModelParams params;  // dt, T, sample_stride and epsilon included
  InitialData init;
  std::vector<Vec2> trace_points{{0.6, 0.5}};
  double burst_end = 0.5;
  std::string output_dir = "out";
  std::vector<double> eps_list{0.2, 0.1};
  // Macro mesh of the reference solution in convergence studies. Its
  // discretization error has to sit well below the eps-dependent error.
  double study_macro_h = 0.0125;
  SolverOptions solver{1e-12, 20000};

  bool operator==(const RunConfig&) const = default;

  // Error(Validation) naming the first violated constraint.
  void validate() const;

  TraceRequest trace_request() const;
  StudySetup study_setup() const;
};

// Error(Parse) with the line number for syntax problems and unknown keys;
// Error(Validation) for values that parse but violate a constraint.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

// Text that parse_config maps back to an identical RunConfig.
std::string serialize_config(const RunConfig& config);

}  // namespace porehom

#pragma once

namespace porehom {

// Kinetic and diffusive constants plus the time grid. All quantities are
// dimensionless.
struct ModelParams {
  double D1 = 1.0;
  double D2 = 2.0;
  double k_f = 1.8;   // forward precipitation constant
  double k_d = 2.2;   // dissolution constant
  double k1 = 1.0;    // Langmuir parameter, species 1
  double k2 = 1.0;    // Langmuir parameter, species 2
  double delta = 0.01;
  double epsilon = 0.2;
  double dt = 0.01;
  double T = 20.0;
  int sample_stride = 10;

  // k = k_f / k_d. With k_d = 0 the precipitate is frozen (dw/dt = k_d (R - z)
  // vanishes), so k is taken as 0 to keep R finite.
  double k() const { return k_d > 0.0 ? k_f / k_d : 0.0; }
  int num_steps() const;
  // Throws Error(Validation) naming the first violated constraint.
  void validate() const;

  bool operator==(const ModelParams&) const = default;
};

// Langmuir-type precipitation rate; zero off the open positive quadrant.
double reaction_rate(double u, double v, const ModelParams& p);

// Piecewise-linear selection of the dissolution graph: clamp(w / delta, 0, 1).
double psi_reg(double w, double delta);

// k_d * (R(u, v) - psi_reg(w)).
double w_rhs(double u, double v, double w, const ModelParams& p);

// One backward-Euler step of dw/dt = k_d (rate - psi_reg(w)) with the
// dissolution term implicit. psi_reg is monotone, so the scalar equation has a
// unique root, found branch by branch. Nonnegative whenever w and rate are.
double advance_precipitate(double w, double rate, double dt, double k_d, double delta);

}  // namespace porehom

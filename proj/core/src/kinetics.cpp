#include "porehom/kinetics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "porehom/error.hpp"

namespace porehom {

int ModelParams::num_steps() const { return static_cast<int>(std::llround(T / dt)); }

void ModelParams::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorKind::Validation, std::string("parameter constraint violated: ") + what);
  };
  require(D1 > 0.0, "D1 > 0");
  require(D2 > 0.0, "D2 > 0");
  require(k_d >= 0.0, "k_d >= 0");
  require(k_f >= 0.0, "k_f >= 0");
  require(k1 >= 0.0, "k1 >= 0");
  require(k2 >= 0.0, "k2 >= 0");
  require(delta > 0.0, "delta > 0");
  require(epsilon > 0.0, "epsilon > 0");
  require(dt > 0.0, "dt > 0");
  require(T > 0.0, "T > 0");
  require(dt <= T, "dt <= T");
  require(sample_stride >= 1, "sample_stride >= 1");
  require(std::abs(num_steps() * dt - T) <= 1e-9 * T, "T is an integer multiple of dt");
}

double reaction_rate(double u, double v, const ModelParams& p) {
  if (!(u > 0.0) || !(v > 0.0)) return 0.0;
  const double a = p.k1 * u;
  const double b = p.k2 * v;
  const double den = 1.0 + (a + b);
  return p.k() * (a * b) / (den * den);
}

double psi_reg(double w, double delta) {
  if (!(w > 0.0)) return 0.0;
  if (w >= delta) return 1.0;
  return w / delta;
}

double w_rhs(double u, double v, double w, const ModelParams& p) {
  return p.k_d * (reaction_rate(u, v, p) - psi_reg(w, p.delta));
}

double advance_precipitate(double w, double rate, double dt, double k_d, double delta) {
  const double b = w + dt * k_d * rate;
  const double full = b - dt * k_d;  // branch psi = 1
  if (full >= delta) return full;
  if (b <= 0.0) return b;            // branch psi = 0
  return b / (1.0 + dt * k_d / delta);
}

}  // namespace porehom

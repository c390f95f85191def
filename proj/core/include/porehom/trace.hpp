#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "porehom/geometry.hpp"
#include "porehom/kinetics.hpp"

namespace porehom {

struct TraceRequest {
  std::vector<Vec2> points;  // probed for u and v at every sample
  double burst_end = 0.5;    // every step is a sample while t <= burst_end
  bool keep_snapshots = false;
};

// True for step 0, the last step, multiples of the stride and the burst.
bool is_sample_step(int step, const ModelParams& params, const TraceRequest& request);
// Stride samples only; these are the ones written as field snapshots.
bool is_stride_step(int step, const ModelParams& params);

struct Series {
  std::string name;
  std::vector<double> values;
};

// Full nodal state at one sample.
struct Snapshot {
  int step = 0;
  double time = 0.0;
  std::vector<double> u, v, w, z;
};

// Time series sampled from a run. Every series has one value per entry of
// `times`.
class Trace {
 public:
  const std::vector<double>& times() const { return times_; }
  const std::vector<int>& steps() const { return steps_; }
  const std::vector<Series>& series() const { return series_; }
  const std::vector<Snapshot>& snapshots() const { return snapshots_; }
  std::vector<Snapshot>& snapshots() { return snapshots_; }

  // Throws Error(Validation) for an unknown name.
  const std::vector<double>& operator[](std::string_view name) const;
  bool has(std::string_view name) const;

  // Appends one sample; values follow the order of `names`, which must match
  // the first call.
  void append(int step, double time, const std::vector<std::string>& names, const std::vector<double>& values);

  double wall_time = 0.0;  // seconds spent in the run, assembly included

 private:
  std::vector<double> times_;
  std::vector<int> steps_;
  std::vector<Series> series_;
  std::vector<Snapshot> snapshots_;
};

// Series name of a point probe, e.g. "u@(0.6;0.5)"; no comma, so it is CSV-safe.
std::string probe_name(std::string_view species, Vec2 p);

}  // namespace porehom

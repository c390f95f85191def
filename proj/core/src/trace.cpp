#include "porehom/trace.hpp"

#include <algorithm>

#include "porehom/error.hpp"
#include "porehom/format.hpp"

namespace porehom {

bool is_stride_step(int step, const ModelParams& params) {
  return step % params.sample_stride == 0 || step == params.num_steps();
}

bool is_sample_step(int step, const ModelParams& params, const TraceRequest& request) {
  if (is_stride_step(step, params)) return true;
  return step * params.dt <= request.burst_end * (1.0 + 1e-12);
}

const std::vector<double>& Trace::operator[](std::string_view name) const {
  for (const Series& s : series_)
    if (s.name == name) return s.values;
  throw Error(ErrorKind::Validation, "trace has no series named '" + std::string(name) + "'");
}

bool Trace::has(std::string_view name) const {
  return std::any_of(series_.begin(), series_.end(), [&](const Series& s) { return s.name == name; });
}

void Trace::append(int step, double time, const std::vector<std::string>& names, const std::vector<double>& values) {
  if (names.size() != values.size()) throw Error(ErrorKind::Validation, "trace sample has mismatched names");
  if (!times_.empty() && !(time > times_.back())) {
    throw Error(ErrorKind::Validation, "trace times must increase strictly");
  }
  if (series_.empty()) {
    for (const std::string& n : names) series_.push_back({n, {}});
  } else if (series_.size() != names.size()) {
    throw Error(ErrorKind::Validation, "trace sample changes the series layout");
  }
  for (std::size_t i = 0; i < values.size(); ++i) series_[i].values.push_back(values[i]);
  times_.push_back(time);
  steps_.push_back(step);
}

std::string probe_name(std::string_view species, Vec2 p) {
  return std::string(species) + "@(" + format_double(p.x) + ";" + format_double(p.y) + ")";
}

}  // namespace porehom

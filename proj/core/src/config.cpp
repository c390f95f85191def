#include "porehom/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "porehom/error.hpp"
#include "porehom/format.hpp"
#include "porehom/mesh.hpp"

namespace porehom {
namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) return out;
    start = pos + 1;
  }
}

double to_double(std::string_view s) {
  s = trim(s);
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
    throw Error(ErrorKind::Parse, "expected a number, got '" + std::string(s) + "'");
  }
  return x;
}

int to_int(std::string_view s) {
  s = trim(s);
  int x = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
    throw Error(ErrorKind::Parse, "expected an integer, got '" + std::string(s) + "'");
  }
  return x;
}

std::vector<double> to_list(std::string_view s) {
  std::vector<double> out;
  if (trim(s).empty()) return out;
  for (std::string_view item : split(s, ',')) out.push_back(to_double(item));
  return out;
}

std::vector<Vec2> to_points(std::string_view s) {
  std::vector<Vec2> out;
  if (trim(s).empty()) return out;
  for (std::string_view item : split(s, ';')) {
    std::string text(item);
    for (char& c : text)
      if (c == ',') c = ' ';
    std::istringstream is(text);
    std::vector<std::string> parts;
    for (std::string part; is >> part;) parts.push_back(part);
    if (parts.size() != 2) throw Error(ErrorKind::Parse, "a point needs two coordinates, got '" + text + "'");
    out.push_back({to_double(parts[0]), to_double(parts[1])});
  }
  return out;
}

std::string join(const std::vector<double>& xs, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += sep;
    out += format_double(xs[i]);
  }
  return out;
}

struct Key {
  const char* name;
  std::function<void(RunConfig&, std::string_view)> read;
  std::function<std::string(const RunConfig&)> write;
};

Key number(const char* name, double RunConfig::*field) {
  return {name, [field](RunConfig& c, std::string_view v) { c.*field = to_double(v); },
          [field](const RunConfig& c) { return format_double(c.*field); }};
}

Key param(const char* name, double ModelParams::*field) {
  return {name, [field](RunConfig& c, std::string_view v) { c.params.*field = to_double(v); },
          [field](const RunConfig& c) { return format_double(c.params.*field); }};
}

Key initial(const char* name, Polynomial2 InitialData::*field) {
  return {name, [field](RunConfig& c, std::string_view v) { c.init.*field = parse_polynomial(v); },
          [field](const RunConfig& c) { return to_string(c.init.*field); }};
}

const std::vector<Key>& keys() {
  static const std::vector<Key> table = {
      {"geometry.domain",
       [](RunConfig& c, std::string_view v) {
         const auto xs = to_list(v);
         if (xs.size() != 4) throw Error(ErrorKind::Parse, "geometry.domain needs x0, y0, x1, y1");
         c.domain = {xs[0], xs[1], xs[2], xs[3]};
       },
       [](const RunConfig& c) { return join({c.domain.x0, c.domain.y0, c.domain.x1, c.domain.y1}, ", "); }},
      {"geometry.epsilon", [](RunConfig& c, std::string_view v) { c.params.epsilon = to_double(v); },
       [](const RunConfig& c) { return format_double(c.params.epsilon); }},
      number("geometry.radius", &RunConfig::radius),
      {"geometry.n_gamma", [](RunConfig& c, std::string_view v) { c.n_gamma = to_int(v); },
       [](const RunConfig& c) { return std::to_string(c.n_gamma); }},
      number("geometry.cell_h", &RunConfig::cell_h),
      number("geometry.micro_h", &RunConfig::micro_h),
      number("geometry.macro_h", &RunConfig::macro_h),
      param("params.D1", &ModelParams::D1),
      param("params.D2", &ModelParams::D2),
      param("params.k_f", &ModelParams::k_f),
      param("params.k_d", &ModelParams::k_d),
      param("params.k1", &ModelParams::k1),
      param("params.k2", &ModelParams::k2),
      param("params.delta", &ModelParams::delta),
      initial("initial.u", &InitialData::u),
      initial("initial.v", &InitialData::v),
      initial("initial.w", &InitialData::w),
      param("run.dt", &ModelParams::dt),
      param("run.T", &ModelParams::T),
      {"run.sample_stride", [](RunConfig& c, std::string_view v) { c.params.sample_stride = to_int(v); },
       [](const RunConfig& c) { return std::to_string(c.params.sample_stride); }},
      number("run.burst_end", &RunConfig::burst_end),
      {"run.trace_points", [](RunConfig& c, std::string_view v) { c.trace_points = to_points(v); },
       [](const RunConfig& c) {
         std::string out;
         for (std::size_t i = 0; i < c.trace_points.size(); ++i) {
           if (i) out += "; ";
           out += format_double(c.trace_points[i].x) + " " + format_double(c.trace_points[i].y);
         }
         return out;
       }},
      {"output.directory", [](RunConfig& c, std::string_view v) { c.output_dir = std::string(v); },
       [](const RunConfig& c) { return c.output_dir; }},
      {"study.eps", [](RunConfig& c, std::string_view v) { c.eps_list = to_list(v); },
       [](const RunConfig& c) { return join(c.eps_list, ", "); }},
      number("study.macro_h", &RunConfig::study_macro_h),
      {"solver.rel_tol", [](RunConfig& c, std::string_view v) { c.solver.rel_tol = to_double(v); },
       [](const RunConfig& c) { return format_double(c.solver.rel_tol); }},
      {"solver.max_iter", [](RunConfig& c, std::string_view v) { c.solver.max_iter = to_int(v); },
       [](const RunConfig& c) { return std::to_string(c.solver.max_iter); }},
  };
  return table;
}

}  // namespace

void RunConfig::validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw Error(ErrorKind::Validation, "configuration constraint violated: " + what);
  };
  params.validate();
  require(domain.width() > 0.0 && domain.height() > 0.0, "geometry.domain has positive width and height");
  require(radius >= 0.0 && radius < kMaxInclusionRadius, "0 <= geometry.radius < 0.45");
  require(n_gamma >= 16 && n_gamma % 8 == 0, "geometry.n_gamma is a multiple of 8, at least 16");
  require(cell_h > 0.0, "geometry.cell_h > 0");
  require(micro_h > 0.0, "geometry.micro_h > 0");
  require(macro_h > 0.0, "geometry.macro_h > 0");
  require(study_macro_h > 0.0, "study.macro_h > 0");
  require(burst_end >= 0.0, "run.burst_end >= 0");
  for (Vec2 p : trace_points) {
    require(domain.contains(p), "trace point (" + format_double(p.x) + ", " + format_double(p.y) + ") inside the domain");
  }
  auto commensurate = [&](double e) {
    const double nx = domain.width() / e, ny = domain.height() / e;
    return e > 0.0 && std::abs(nx - std::round(nx)) <= 1e-9 * nx && std::abs(ny - std::round(ny)) <= 1e-9 * ny;
  };
  require(commensurate(params.epsilon), "geometry.epsilon divides both domain sides");
  for (double e : eps_list) require(commensurate(e), "study.eps entry " + format_double(e) + " divides both domain sides");
  require(minimum_over(init.u, domain) >= 0.0, "initial.u is nonnegative on the domain");
  require(minimum_over(init.v, domain) >= 0.0, "initial.v is nonnegative on the domain");
  require(minimum_over(init.w, domain) >= 0.0, "initial.w is nonnegative on the domain");
  require(solver.rel_tol > 0.0, "solver.rel_tol > 0");
  require(solver.max_iter > 0, "solver.max_iter > 0");
  require(!output_dir.empty(), "output.directory is not empty");
}

TraceRequest RunConfig::trace_request() const {
  TraceRequest r;
  r.points = trace_points;
  r.burst_end = burst_end;
  return r;
}

StudySetup RunConfig::study_setup() const {
  StudySetup s;
  s.domain = domain;
  s.radius = radius;
  s.n_gamma = n_gamma;
  s.cell_h = cell_h;
  s.micro_h = micro_h;
  s.macro_h = study_macro_h;
  s.params = params;
  s.init = init;
  s.trace = trace_request();
  s.solver = solver;
  return s;
}

RunConfig parse_config(std::string_view text) {
  RunConfig config;
  std::set<std::string, std::less<>> seen;
  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = text.find('\n', start);
    std::string_view line = text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
    start = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    auto fail = [&](const std::string& msg) -> void {
      throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) + ": " + msg);
    };
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail("expected 'section.key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    const auto& table = keys();
    const auto it = std::find_if(table.begin(), table.end(), [&](const Key& k) { return key == k.name; });
    if (it == table.end()) fail("unknown key '" + key + "'");
    if (!seen.insert(key).second) fail("key '" + key + "' given twice");
    try {
      it->read(config, value);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Parse) throw;
      fail(key + ": " + e.what());
    }
  }
  config.validate();
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config(buf.str());
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

std::string serialize_config(const RunConfig& config) {
  std::string out;
  std::string section;
  for (const Key& k : keys()) {
    const std::string_view name = k.name;
    const std::string head(name.substr(0, name.find('.')));
    if (head != section) {
      if (!section.empty()) out += '\n';
      section = head;
    }
    out += k.name;
    out += " = ";
    out += k.write(config);
    out += '\n';
  }
  return out;
}

}  // namespace porehom

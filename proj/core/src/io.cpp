#include "porehom/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "porehom/error.hpp"
#include "porehom/format.hpp"

namespace porehom {
namespace {

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string short_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

// Round step of roughly (hi - lo) / 5 from the 1-2-5 sequence.
double tick_step(double lo, double hi) {
  const double raw = (hi - lo) / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (m * mag >= raw) return m * mag;
  return 10.0 * mag;
}

}  // namespace

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create directory " + path.parent_path().string() + ": " + ec.message());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot open " + path.string() + " for writing");
  out << text;
  out.close();
  if (!out) throw Error(ErrorKind::Io, "failed writing " + path.string());
}

std::string csv_text(const std::vector<std::string>& header, const std::vector<std::vector<double>>& columns) {
  if (header.size() != columns.size()) throw Error(ErrorKind::Validation, "CSV header and column count differ");
  const std::size_t rows = columns.empty() ? 0 : columns.front().size();
  for (const auto& c : columns)
    if (c.size() != rows) throw Error(ErrorKind::Validation, "CSV columns have different lengths");
  std::string out;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (j) out += ',';
    out += header[j];
  }
  out += '\n';
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < columns.size(); ++j) {
      if (j) out += ',';
      out += format_double(columns[j][i]);
    }
    out += '\n';
  }
  return out;
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns) {
  write_text(path, csv_text(header, columns));
}

void write_trace_csv(const std::filesystem::path& path, const Trace& trace) {
  std::vector<std::string> header{"time"};
  std::vector<std::vector<double>> columns{trace.times()};
  for (const Series& s : trace.series()) {
    header.push_back(s.name);
    columns.push_back(s.values);
  }
  write_csv(path, header, columns);
}

std::string vtk_text(const Mesh2D& mesh, const std::vector<VtkField>& point_data, const std::string& title) {
  std::ostringstream os;
  os << "# vtk DataFile Version 2.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << mesh.num_vertices() << " double\n";
  for (Vec2 p : mesh.vertices()) os << format_double(p.x) << ' ' << format_double(p.y) << " 0\n";
  const std::size_t nt = mesh.num_triangles();
  const std::size_t ne = mesh.boundary_edges().size();
  os << "CELLS " << nt + ne << ' ' << 4 * nt + 3 * ne << '\n';
  for (const auto& t : mesh.triangles()) os << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  for (const BoundaryEdge& e : mesh.boundary_edges()) os << "2 " << e.v[0] << ' ' << e.v[1] << '\n';
  os << "CELL_TYPES " << nt + ne << '\n';
  for (std::size_t i = 0; i < nt; ++i) os << "5\n";
  for (std::size_t i = 0; i < ne; ++i) os << "3\n";
  os << "CELL_DATA " << nt + ne << "\nSCALARS edge_tag int 1\nLOOKUP_TABLE default\n";
  for (std::size_t i = 0; i < nt; ++i) os << "0\n";
  for (const BoundaryEdge& e : mesh.boundary_edges()) os << static_cast<int>(e.tag) << '\n';
  if (!point_data.empty()) {
    os << "POINT_DATA " << mesh.num_vertices() << '\n';
    for (const VtkField& f : point_data) {
      if (f.values.size() != mesh.num_vertices()) {
        throw Error(ErrorKind::Validation, "VTK field '" + f.name + "' does not match the mesh");
      }
      os << "SCALARS " << f.name << " double 1\nLOOKUP_TABLE default\n";
      for (double x : f.values) os << format_double(x) << '\n';
    }
  }
  return os.str();
}

void write_vtk(const std::filesystem::path& path, const Mesh2D& mesh, const std::vector<VtkField>& point_data,
               const std::string& title) {
  write_text(path, vtk_text(mesh, point_data, title));
}

std::vector<double> expand_surface(const Mesh2D& mesh, const std::vector<double>& surface) {
  const auto& iv = mesh.interface_vertices();
  if (surface.size() != iv.size()) throw Error(ErrorKind::Validation, "surface field does not match the interface");
  std::vector<double> out(mesh.num_vertices(), 0.0);
  for (std::size_t j = 0; j < iv.size(); ++j) out[static_cast<std::size_t>(iv[j])] = surface[j];
  return out;
}

std::string svg_plot(const PlotSpec& spec) {
  constexpr double W = 800.0, H = 600.0;
  constexpr double left = 90.0, right = 190.0, top = 50.0, bottom = 70.0;
  const double pw = W - left - right;
  const double ph = H - top - bottom;
  static constexpr const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const PlotSeries& s : spec.series) {
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  }
  if (!(x0 <= x1)) x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
  if (x1 - x0 <= 0.0) x0 -= 0.5, x1 += 0.5;
  if (y1 - y0 <= 1e-12 * std::max(1.0, std::abs(y0))) y0 -= 0.5, y1 += 0.5;
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;
  auto sx = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
  auto sy = [&](double y) { return top + (y1 - y) / (y1 - y0) * ph; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 600\" width=\"800\" height=\"600\">\n";
  os << "<rect x=\"0\" y=\"0\" width=\"800\" height=\"600\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"28\" text-anchor=\"middle\" font-size=\"18\" font-family=\"sans-serif\">"
     << xml_escape(spec.title) << "</text>\n";
  os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n";

  const double xs = tick_step(x0, x1);
  for (double t = std::ceil(x0 / xs) * xs; t <= x1 + 1e-9 * xs; t += xs) {
    os << "<line x1=\"" << sx(t) << "\" y1=\"" << top + ph << "\" x2=\"" << sx(t) << "\" y2=\"" << top + ph + 6
       << "\" stroke=\"black\"/>";
    os << "<text x=\"" << sx(t) << "\" y=\"" << top + ph + 22
       << "\" text-anchor=\"middle\" font-size=\"12\" font-family=\"sans-serif\">" << short_number(t) << "</text>\n";
  }
  const double ys = tick_step(y0, y1);
  for (double t = std::ceil(y0 / ys) * ys; t <= y1 + 1e-9 * ys; t += ys) {
    os << "<line x1=\"" << left - 6 << "\" y1=\"" << sy(t) << "\" x2=\"" << left << "\" y2=\"" << sy(t)
       << "\" stroke=\"black\"/>";
    os << "<text x=\"" << left - 10 << "\" y=\"" << sy(t) + 4
       << "\" text-anchor=\"end\" font-size=\"12\" font-family=\"sans-serif\">" << short_number(t) << "</text>\n";
  }
  os << "<text x=\"" << left + pw / 2 << "\" y=\"" << H - 20
     << "\" text-anchor=\"middle\" font-size=\"14\" font-family=\"sans-serif\">" << xml_escape(spec.xlabel)
     << "</text>\n";
  os << "<text x=\"24\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" font-size=\"14\" font-family=\"sans-serif\""
     << " transform=\"rotate(-90 24 " << top + ph / 2 << ")\">" << xml_escape(spec.ylabel) << "</text>\n";

  for (std::size_t k = 0; k < spec.series.size(); ++k) {
    const PlotSeries& s = spec.series[k];
    const char* color = palette[k % std::size(palette)];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      os << short_number(sx(s.x[i])) << ',' << short_number(sy(s.y[i])) << ' ';
    }
    os << "\"/>\n";
    const double ly = top + 16.0 + 20.0 * static_cast<double>(k);
    os << "<line x1=\"" << left + pw + 12 << "\" y1=\"" << ly << "\" x2=\"" << left + pw + 36 << "\" y2=\"" << ly
       << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>";
    os << "<text x=\"" << left + pw + 42 << "\" y=\"" << ly + 4 << "\" font-size=\"12\" font-family=\"sans-serif\">"
       << xml_escape(s.label) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

void write_svg(const std::filesystem::path& path, const PlotSpec& spec) { write_text(path, svg_plot(spec)); }

}  // namespace porehom

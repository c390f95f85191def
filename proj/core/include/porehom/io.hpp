#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "porehom/mesh.hpp"
#include "porehom/trace.hpp"

namespace porehom {

// Error(Io) naming the path on failure. Parent directories are created.
void write_text(const std::filesystem::path& path, const std::string& text);

// One header row, then one row per index; every column must have the same
// length. Values use the shortest round-trip representation.
std::string csv_text(const std::vector<std::string>& header, const std::vector<std::vector<double>>& columns);
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns);

// Columns: time, then every series of the trace in order.
void write_trace_csv(const std::filesystem::path& path, const Trace& trace);

struct VtkField {
  std::string name;
  std::vector<double> values;  // one per mesh vertex
};

// Legacy ASCII VTK 2.0 unstructured grid. Triangles come first, then the
// tagged boundary edges as line cells; CELL_DATA "edge_tag" is 0 for
// triangles and the EdgeTag value for edges.
std::string vtk_text(const Mesh2D& mesh, const std::vector<VtkField>& point_data, const std::string& title);
void write_vtk(const std::filesystem::path& path, const Mesh2D& mesh, const std::vector<VtkField>& point_data,
               const std::string& title = "porehom");

// Surface values (one per interface vertex) spread onto all vertices, with
// zero at vertices off the interface.
std::vector<double> expand_surface(const Mesh2D& mesh, const std::vector<double>& surface);

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotSpec {
  std::string title;
  std::string xlabel;
  std::string ylabel;
  std::vector<PlotSeries> series;
};

// 800x600 line plot, one polyline per series, with axes, ticks and a legend.
std::string svg_plot(const PlotSpec& spec);
void write_svg(const std::filesystem::path& path, const PlotSpec& spec);

}  // namespace porehom

#pragma once

#include <optional>
#include <span>
#include <vector>

#include "porehom/geometry.hpp"
#include "porehom/mesh.hpp"

namespace porehom {

struct Triplet {
  int row;
  int col;
  double value;
};

// Compressed sparse row matrix; column indices strictly increasing per row.
class SparseMatrix {
 public:
  SparseMatrix() = default;

  // Duplicate (row, col) entries are summed in input order, so the result is
  // independent of hashing or threading.
  static SparseMatrix from_triplets(int n, std::vector<Triplet> triplets, bool symmetric);

  int size() const { return n_; }
  std::size_t nnz() const { return values_.size(); }
  bool symmetric() const { return symmetric_; }

  std::span<const int> row_offsets() const { return offsets_; }
  std::span<const int> columns() const { return cols_; }
  std::span<const double> values() const { return values_; }

  double at(int i, int j) const;
  void multiply(std::span<const double> x, std::span<double> y) const;
  std::vector<double> operator*(std::span<const double> x) const;
  std::vector<double> diagonal() const;
  std::vector<double> row_sums() const;
  double max_abs() const;
  // Largest |a_ij - a_ji| / max|a|.
  double asymmetry() const;

  SparseMatrix scaled(double alpha) const;

  // alpha * a + beta * b.
  static SparseMatrix combine(double alpha, const SparseMatrix& a, double beta, const SparseMatrix& b);

 private:
  int n_ = 0;
  bool symmetric_ = false;
  std::vector<int> offsets_{0};
  std::vector<int> cols_;
  std::vector<double> values_;
};

enum class FieldKind { Volume, Surface };

// Volume fields carry one value per mesh vertex; surface fields one value per
// entry of Mesh2D::interface_vertices().
struct NodalField {
  FieldKind kind = FieldKind::Volume;
  std::vector<double> values;
};

SparseMatrix assemble_mass(const Mesh2D& mesh);
SparseMatrix assemble_stiffness(const Mesh2D& mesh, const Mat2& tensor);
SparseMatrix assemble_stiffness(const Mesh2D& mesh, std::span<const Mat2> per_element);
// 1D P1 mass over edges carrying `tag`, in global vertex numbering.
SparseMatrix assemble_interface_mass(const Mesh2D& mesh, EdgeTag tag, bool lumped);

struct SolverOptions {
  double rel_tol = 1e-10;
  int max_iter = 10000;

  bool operator==(const SolverOptions&) const = default;
};

struct SolveResult {
  std::vector<double> x;
  int iterations = 0;
  double residual = 0.0;  // ||b - Ax|| / ||b||
};

// Jacobi-preconditioned conjugate gradients. `guess` seeds the iteration.
SolveResult solve_spd(const SparseMatrix& a, std::span<const double> b, const SolverOptions& opts = {},
                      std::span<const double> guess = {});

// Piecewise-constant gradient of a P1 field on triangle t.
Vec2 element_gradient(const Mesh2D& mesh, std::size_t t, std::span<const double> values);
std::vector<Vec2> element_gradients(const Mesh2D& mesh, std::span<const double> values);

struct FieldNorms {
  double l2_volume = 0.0;
  double l2_gradient = 0.0;
  double l2_surface = 0.0;
};

// Volume fields fill l2_volume and l2_gradient; surface fields fill l2_surface
// (unscaled; callers multiply by epsilon where the scaled measure is wanted).
FieldNorms field_norms(const Mesh2D& mesh, const NodalField& field);
// Norms of a - b; both fields must have the same kind.
FieldNorms field_norms(const Mesh2D& mesh, const NodalField& a, const NodalField& b);

enum class OutsidePolicy { Error, NearestVertex };

std::vector<double> interpolate(const PointLocator& locator, std::span<const double> values,
                                std::span<const Vec2> points, OutsidePolicy policy = OutsidePolicy::Error);
std::vector<double> interpolate(const Mesh2D& mesh, std::span<const double> values, std::span<const Vec2> points,
                                OutsidePolicy policy = OutsidePolicy::Error);

double dot(std::span<const double> a, std::span<const double> b);

}  // namespace porehom

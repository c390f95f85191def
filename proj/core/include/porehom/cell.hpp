#pragma once

#include <memory>
#include <vector>

#include "porehom/fem.hpp"
#include "porehom/geometry.hpp"
#include "porehom/mesh.hpp"

namespace porehom {

// Effective diffusion matrix with the asymmetry removed by averaging.
struct EffectiveTensor {
  Mat2 value{};
  double asymmetry = 0.0;  // |t12 - t21| before symmetrization
};

// Solutions l_1, l_2 of the periodic cell problems on Y^p, normalized to zero
// mean, together with the cell measures the macro model needs.
class CellSolution {
 public:
  CellSolution(MeshPtr mesh, std::vector<double> l1, std::vector<double> l2, double compatibility_residual,
               int iterations);

  const Mesh2D& mesh() const { return *mesh_; }
  MeshPtr mesh_ptr() const { return mesh_; }
  const std::vector<double>& l(int j) const { return j == 0 ? l1_ : l2_; }
  const std::vector<Vec2>& grad_l(int j) const { return j == 0 ? grad_l1_ : grad_l2_; }

  double porosity() const { return porosity_; }
  double interface_measure() const { return interface_measure_; }
  // Largest |1^T b_j| / ||b_j|| over the two periodic right-hand sides.
  double compatibility_residual() const { return compatibility_residual_; }
  int iterations() const { return iterations_; }

  // C_ij = delta_ij + d l_j / d y_i on triangle t.
  Mat2 corrector_on(std::size_t t) const;
  // Same, located by point; throws Error(Geometry) inside the inclusion.
  Mat2 corrector_at(Vec2 y) const;

 private:
  MeshPtr mesh_;
  std::unique_ptr<PointLocator> locator_;
  std::vector<double> l1_;
  std::vector<double> l2_;
  std::vector<Vec2> grad_l1_;
  std::vector<Vec2> grad_l2_;
  double porosity_ = 0.0;
  double interface_measure_ = 0.0;
  double compatibility_residual_ = 0.0;
  int iterations_ = 0;
};

// Solves grad.(grad l_j + e_j) = 0 in Y^p with the natural condition on the
// interface and periodicity across opposite faces (slave vertices eliminated
// onto masters, one vertex pinned, mean removed afterwards).
CellSolution solve_cell_problems(MeshPtr cell_mesh, const SolverOptions& opts = {1e-12, 20000});

// a_ij = (D / |Y^p|) * integral over Y^p of (delta_ij + d l_j / d y_i).
EffectiveTensor effective_tensor(const CellSolution& sol, double D);

Mat2 corrector_at(const CellSolution& sol, Vec2 y);

}  // namespace porehom

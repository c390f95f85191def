#include "porehom/cell.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "porehom/error.hpp"

namespace porehom {
namespace {

constexpr double kFaceTol = 1e-10;

// Maps every vertex to its periodic master: x = 1 folds onto x = 0 and
// y = 1 onto y = 0, so the four corners collapse onto (0, 0).
std::vector<int> periodic_masters(const Mesh2D& mesh) {
  std::map<std::pair<long long, long long>, int> lookup;
  auto key = [](Vec2 p) {
    return std::make_pair(std::llround(p.x / kFaceTol), std::llround(p.y / kFaceTol));
  };
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
    const Vec2 p = mesh.vertex(static_cast<int>(v));
    if (std::abs(p.x) < kFaceTol || std::abs(p.y) < kFaceTol) lookup[key(p)] = static_cast<int>(v);
  }
  std::vector<int> master(mesh.num_vertices());
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
    Vec2 p = mesh.vertex(static_cast<int>(v));
    bool folded = false;
    if (std::abs(p.x - 1.0) < kFaceTol) p.x = 0.0, folded = true;
    if (std::abs(p.y - 1.0) < kFaceTol) p.y = 0.0, folded = true;
    if (std::abs(p.x) < kFaceTol) p.x = 0.0;
    if (std::abs(p.y) < kFaceTol) p.y = 0.0;
    if (!folded) {
      master[v] = static_cast<int>(v);
      continue;
    }
    auto it = lookup.find(key(p));
    if (it == lookup.end()) {
      std::ostringstream os;
      os << "cell mesh vertex (" << mesh.vertex(static_cast<int>(v)).x << ", " << mesh.vertex(static_cast<int>(v)).y
         << ") has no periodic partner";
      throw Error(ErrorKind::Meshing, os.str());
    }
    master[v] = it->second;
  }
  return master;
}

double area_mean(const Mesh2D& mesh, std::span<const double> f) {
  double s = 0.0;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangle(t);
    s += mesh.area(t) * (f[static_cast<std::size_t>(tri[0])] + f[static_cast<std::size_t>(tri[1])] +
                         f[static_cast<std::size_t>(tri[2])]) / 3.0;
  }
  return s / mesh.total_area();
}

}  // namespace

CellSolution::CellSolution(MeshPtr mesh, std::vector<double> l1, std::vector<double> l2,
                           double compatibility_residual, int iterations)
    : mesh_(std::move(mesh)),
      locator_(std::make_unique<PointLocator>(*mesh_)),
      l1_(std::move(l1)),
      l2_(std::move(l2)),
      grad_l1_(element_gradients(*mesh_, l1_)),
      grad_l2_(element_gradients(*mesh_, l2_)),
      porosity_(mesh_->total_area()),
      interface_measure_(mesh_->boundary_length(EdgeTag::Interface)),
      compatibility_residual_(compatibility_residual),
      iterations_(iterations) {}

Mat2 CellSolution::corrector_on(std::size_t t) const {
  const Vec2 g1 = grad_l1_[t];
  const Vec2 g2 = grad_l2_[t];
  return {{{1.0 + g1.x, g2.x}, {g1.y, 1.0 + g2.y}}};
}

Mat2 CellSolution::corrector_at(Vec2 y) const {
  const auto loc = locator_->locate(y);
  if (!loc) {
    std::ostringstream os;
    os << "cell point (" << y.x << ", " << y.y << ") is not in the pore space";
    throw Error(ErrorKind::Geometry, os.str());
  }
  return corrector_on(static_cast<std::size_t>(loc->triangle));
}

Mat2 corrector_at(const CellSolution& sol, Vec2 y) { return sol.corrector_at(y); }

CellSolution solve_cell_problems(MeshPtr cell_mesh, const SolverOptions& opts) {
  const Mesh2D& mesh = *cell_mesh;
  if (mesh.count_edges(EdgeTag::CellFace) == 0) {
    throw Error(ErrorKind::Validation, "cell mesh has no periodic faces");
  }
  const std::vector<int> master = periodic_masters(mesh);
  std::vector<int> dof(mesh.num_vertices(), -1);
  int ndof = 0;
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
    if (master[v] == static_cast<int>(v)) dof[v] = ndof++;
  }
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) dof[v] = dof[static_cast<std::size_t>(master[v])];

  const SparseMatrix K = assemble_stiffness(mesh, identity2());
  constexpr int pin = 0;
  std::vector<Triplet> trip;
  trip.reserve(K.nnz());
  for (int i = 0; i < K.size(); ++i) {
    const int ri = dof[static_cast<std::size_t>(i)];
    for (int k = K.row_offsets()[static_cast<std::size_t>(i)]; k < K.row_offsets()[static_cast<std::size_t>(i) + 1]; ++k) {
      const int rj = dof[static_cast<std::size_t>(K.columns()[static_cast<std::size_t>(k)])];
      if (ri == pin || rj == pin) continue;
      trip.push_back({ri, rj, K.values()[static_cast<std::size_t>(k)]});
    }
  }
  trip.push_back({pin, pin, 1.0});
  const SparseMatrix Kr = SparseMatrix::from_triplets(ndof, std::move(trip), true);

  std::vector<std::vector<double>> sols;
  double compat = 0.0;
  int iterations = 0;
  for (int j = 0; j < 2; ++j) {
    // b_i = -integral of e_j . grad(phi_i)
    std::vector<double> b(static_cast<std::size_t>(ndof), 0.0);
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
      const auto& tri = mesh.triangle(t);
      const Vec2 p0 = mesh.vertex(tri[0]);
      const Vec2 p1 = mesh.vertex(tri[1]);
      const Vec2 p2 = mesh.vertex(tri[2]);
      // area * grad(phi_i) = 0.5 * rotated opposite edge
      const std::array<Vec2, 3> ag{0.5 * Vec2{p1.y - p2.y, p2.x - p1.x}, 0.5 * Vec2{p2.y - p0.y, p0.x - p2.x},
                                   0.5 * Vec2{p0.y - p1.y, p1.x - p0.x}};
      for (int i = 0; i < 3; ++i) {
        b[static_cast<std::size_t>(dof[static_cast<std::size_t>(tri[i])])] -= (j == 0 ? ag[i].x : ag[i].y);
      }
    }
    double sum = 0.0;
    for (double x : b) sum += x;
    const double bnorm = std::sqrt(dot(b, b));
    if (bnorm > 0.0) compat = std::max(compat, std::abs(sum) / bnorm);
    b[pin] = 0.0;

    const SolveResult res = solve_spd(Kr, b, opts);
    iterations = std::max(iterations, res.iterations);
    std::vector<double> l(mesh.num_vertices());
    for (std::size_t v = 0; v < mesh.num_vertices(); ++v) l[v] = res.x[static_cast<std::size_t>(dof[v])];
    const double mean = area_mean(mesh, l);
    for (double& x : l) x -= mean;
    sols.push_back(std::move(l));
  }
  return CellSolution(std::move(cell_mesh), std::move(sols[0]), std::move(sols[1]), compat, iterations);
}

EffectiveTensor effective_tensor(const CellSolution& sol, double D) {
  if (!(D > 0.0)) throw Error(ErrorKind::Validation, "diffusion coefficient must be positive");
  const Mesh2D& mesh = sol.mesh();
  Mat2 integral{};
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const Mat2 c = sol.corrector_on(t);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) integral[i][j] += mesh.area(t) * c[i][j];
  }
  const double scale = D / sol.porosity();
  EffectiveTensor out;
  out.asymmetry = scale * std::abs(integral[0][1] - integral[1][0]);
  const double off = 0.5 * (integral[0][1] + integral[1][0]);
  out.value = {{{scale * integral[0][0], scale * off}, {scale * off, scale * integral[1][1]}}};
  return out;
}

}  // namespace porehom

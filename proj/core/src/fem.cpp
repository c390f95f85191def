#include "porehom/fem.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "porehom/error.hpp"

namespace porehom {

SparseMatrix SparseMatrix::from_triplets(int n, std::vector<Triplet> triplets, bool symmetric) {
  std::stable_sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  SparseMatrix m;
  m.n_ = n;
  m.symmetric_ = symmetric;
  m.offsets_.assign(static_cast<std::size_t>(n) + 1, 0);
  for (std::size_t k = 0; k < triplets.size();) {
    const Triplet& t = triplets[k];
    if (t.row < 0 || t.row >= n || t.col < 0 || t.col >= n) {
      throw Error(ErrorKind::Validation, "sparse entry out of range");
    }
    double sum = 0.0;
    std::size_t j = k;
    for (; j < triplets.size() && triplets[j].row == t.row && triplets[j].col == t.col; ++j) sum += triplets[j].value;
    m.cols_.push_back(t.col);
    m.values_.push_back(sum);
    m.offsets_[static_cast<std::size_t>(t.row) + 1] += 1;
    k = j;
  }
  for (std::size_t i = 1; i < m.offsets_.size(); ++i) m.offsets_[i] += m.offsets_[i - 1];
  return m;
}

double SparseMatrix::at(int i, int j) const {
  const auto begin = cols_.begin() + offsets_[static_cast<std::size_t>(i)];
  const auto end = cols_.begin() + offsets_[static_cast<std::size_t>(i) + 1];
  auto it = std::lower_bound(begin, end, j);
  if (it == end || *it != j) return 0.0;
  return values_[static_cast<std::size_t>(it - cols_.begin())];
}

void SparseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  for (int i = 0; i < n_; ++i) {
    double s = 0.0;
    for (int k = offsets_[static_cast<std::size_t>(i)]; k < offsets_[static_cast<std::size_t>(i) + 1]; ++k) {
      s += values_[static_cast<std::size_t>(k)] * x[static_cast<std::size_t>(cols_[static_cast<std::size_t>(k)])];
    }
    y[static_cast<std::size_t>(i)] = s;
  }
}

std::vector<double> SparseMatrix::operator*(std::span<const double> x) const {
  std::vector<double> y(static_cast<std::size_t>(n_));
  multiply(x, y);
  return y;
}

std::vector<double> SparseMatrix::diagonal() const {
  std::vector<double> d(static_cast<std::size_t>(n_), 0.0);
  for (int i = 0; i < n_; ++i) d[static_cast<std::size_t>(i)] = at(i, i);
  return d;
}

std::vector<double> SparseMatrix::row_sums() const {
  std::vector<double> s(static_cast<std::size_t>(n_), 0.0);
  for (int i = 0; i < n_; ++i) {
    for (int k = offsets_[static_cast<std::size_t>(i)]; k < offsets_[static_cast<std::size_t>(i) + 1]; ++k) {
      s[static_cast<std::size_t>(i)] += values_[static_cast<std::size_t>(k)];
    }
  }
  return s;
}

double SparseMatrix::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double SparseMatrix::asymmetry() const {
  const double scale = max_abs();
  if (scale == 0.0) return 0.0;
  double worst = 0.0;
  for (int i = 0; i < n_; ++i) {
    for (int k = offsets_[static_cast<std::size_t>(i)]; k < offsets_[static_cast<std::size_t>(i) + 1]; ++k) {
      const int j = cols_[static_cast<std::size_t>(k)];
      worst = std::max(worst, std::abs(values_[static_cast<std::size_t>(k)] - at(j, i)));
    }
  }
  return worst / scale;
}

SparseMatrix SparseMatrix::scaled(double alpha) const {
  SparseMatrix m = *this;
  for (double& v : m.values_) v *= alpha;
  return m;
}

SparseMatrix SparseMatrix::combine(double alpha, const SparseMatrix& a, double beta, const SparseMatrix& b) {
  if (a.n_ != b.n_) throw Error(ErrorKind::Validation, "matrix dimensions differ");
  SparseMatrix m;
  m.n_ = a.n_;
  m.symmetric_ = a.symmetric_ && b.symmetric_;
  m.offsets_.assign(static_cast<std::size_t>(a.n_) + 1, 0);
  for (int i = 0; i < a.n_; ++i) {
    int ka = a.offsets_[static_cast<std::size_t>(i)];
    int kb = b.offsets_[static_cast<std::size_t>(i)];
    const int ea = a.offsets_[static_cast<std::size_t>(i) + 1];
    const int eb = b.offsets_[static_cast<std::size_t>(i) + 1];
    while (ka < ea || kb < eb) {
      const int ca = ka < ea ? a.cols_[static_cast<std::size_t>(ka)] : a.n_;
      const int cb = kb < eb ? b.cols_[static_cast<std::size_t>(kb)] : b.n_;
      double v = 0.0;
      const int c = std::min(ca, cb);
      if (ca == c) v += alpha * a.values_[static_cast<std::size_t>(ka++)];
      if (cb == c) v += beta * b.values_[static_cast<std::size_t>(kb++)];
      m.cols_.push_back(c);
      m.values_.push_back(v);
    }
    m.offsets_[static_cast<std::size_t>(i) + 1] = static_cast<int>(m.cols_.size());
  }
  return m;
}

// ---------------------------------------------------------------------------

namespace {

// Gradients of the three barycentric basis functions on triangle t.
std::array<Vec2, 3> grads(const Mesh2D& mesh, std::size_t t) {
  const auto& tri = mesh.triangle(t);
  const Vec2 p0 = mesh.vertex(tri[0]);
  const Vec2 p1 = mesh.vertex(tri[1]);
  const Vec2 p2 = mesh.vertex(tri[2]);
  const double s = 1.0 / (2.0 * mesh.area(t));
  return {s * Vec2{p1.y - p2.y, p2.x - p1.x}, s * Vec2{p2.y - p0.y, p0.x - p2.x}, s * Vec2{p0.y - p1.y, p1.x - p0.x}};
}

void check_spd(const Mat2& k) {
  const double asym = std::abs(k[0][1] - k[1][0]);
  const double scale = std::max({std::abs(k[0][0]), std::abs(k[1][1]), std::abs(k[0][1])});
  const double det = k[0][0] * k[1][1] - k[0][1] * k[1][0];
  if (!(k[0][0] > 0.0) || !(det > 0.0) || asym > 1e-12 * scale) {
    std::ostringstream os;
    os << "diffusion tensor [[" << k[0][0] << ", " << k[0][1] << "], [" << k[1][0] << ", " << k[1][1]
       << "]] is not symmetric positive-definite";
    throw Error(ErrorKind::Validation, os.str());
  }
}

}  // namespace

SparseMatrix assemble_mass(const Mesh2D& mesh) {
  std::vector<Triplet> trip;
  trip.reserve(mesh.num_triangles() * 9);
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangle(t);
    const double a = mesh.area(t) / 12.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) trip.push_back({tri[i], tri[j], (i == j ? 2.0 : 1.0) * a});
  }
  return SparseMatrix::from_triplets(static_cast<int>(mesh.num_vertices()), std::move(trip), true);
}

SparseMatrix assemble_stiffness(const Mesh2D& mesh, const Mat2& tensor) {
  check_spd(tensor);
  std::vector<Mat2> per(mesh.num_triangles(), tensor);
  return assemble_stiffness(mesh, per);
}

SparseMatrix assemble_stiffness(const Mesh2D& mesh, std::span<const Mat2> per_element) {
  if (per_element.size() != mesh.num_triangles()) {
    throw Error(ErrorKind::Validation, "one tensor per triangle expected");
  }
  std::vector<Triplet> trip;
  trip.reserve(mesh.num_triangles() * 9);
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const Mat2& k = per_element[t];
    check_spd(k);
    const auto& tri = mesh.triangle(t);
    const auto g = grads(mesh, t);
    const double a = mesh.area(t);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) trip.push_back({tri[i], tri[j], a * dot(g[i], apply(k, g[j]))});
  }
  return SparseMatrix::from_triplets(static_cast<int>(mesh.num_vertices()), std::move(trip), true);
}

SparseMatrix assemble_interface_mass(const Mesh2D& mesh, EdgeTag tag, bool lumped) {
  std::vector<Triplet> trip;
  for (const BoundaryEdge& e : mesh.boundary_edges()) {
    if (e.tag != tag) continue;
    const double len = norm(mesh.vertex(e.v[1]) - mesh.vertex(e.v[0]));
    if (lumped) {
      trip.push_back({e.v[0], e.v[0], 0.5 * len});
      trip.push_back({e.v[1], e.v[1], 0.5 * len});
    } else {
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) trip.push_back({e.v[i], e.v[j], (i == j ? 2.0 : 1.0) * len / 6.0});
    }
  }
  if (trip.empty()) throw Error(ErrorKind::Validation, "mesh has no boundary edges with the requested tag");
  return SparseMatrix::from_triplets(static_cast<int>(mesh.num_vertices()), std::move(trip), true);
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

SolveResult solve_spd(const SparseMatrix& a, std::span<const double> b, const SolverOptions& opts,
                      std::span<const double> guess) {
  const auto n = static_cast<std::size_t>(a.size());
  if (b.size() != n) throw Error(ErrorKind::Validation, "right-hand side has the wrong length");
  SolveResult res;
  res.x.assign(n, 0.0);
  const double bnorm = std::sqrt(dot(b, b));
  if (bnorm == 0.0) return res;
  if (!std::isfinite(bnorm)) throw Error(ErrorKind::Numerical, "non-finite right-hand side");
  if (!guess.empty()) std::copy(guess.begin(), guess.end(), res.x.begin());

  std::vector<double> inv_diag = a.diagonal();
  for (double& d : inv_diag) {
    if (!(d > 0.0)) throw Error(ErrorKind::Solver, "matrix has a non-positive diagonal entry");
    d = 1.0 / d;
  }
  std::vector<double> r(n), z(n), p(n), q(n);
  a.multiply(res.x, r);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
  double rnorm = std::sqrt(dot(r, r));
  const double target = opts.rel_tol * bnorm;
  if (rnorm <= target) {
    res.residual = rnorm / bnorm;
    return res;
  }
  for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
  p = z;
  double rz = dot(r, z);
  for (int it = 1; it <= opts.max_iter; ++it) {
    a.multiply(p, q);
    const double pq = dot(p, q);
    if (!(pq > 0.0)) {
      throw SolverError("conjugate gradients broke down (matrix not positive-definite?)", rnorm / bnorm, it);
    }
    const double alpha = rz / pq;
    for (std::size_t i = 0; i < n; ++i) {
      res.x[i] += alpha * p[i];
      r[i] -= alpha * q[i];
    }
    rnorm = std::sqrt(dot(r, r));
    if (rnorm <= target) {
      res.iterations = it;
      res.residual = rnorm / bnorm;
      return res;
    }
    for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  std::ostringstream os;
  os << "conjugate gradients did not converge in " << opts.max_iter << " iterations (relative residual "
     << rnorm / bnorm << ")";
  throw SolverError(os.str(), rnorm / bnorm, opts.max_iter);
}

Vec2 element_gradient(const Mesh2D& mesh, std::size_t t, std::span<const double> values) {
  const auto g = grads(mesh, t);
  const auto& tri = mesh.triangle(t);
  Vec2 out;
  for (int i = 0; i < 3; ++i) out = out + values[static_cast<std::size_t>(tri[i])] * g[i];
  return out;
}

std::vector<Vec2> element_gradients(const Mesh2D& mesh, std::span<const double> values) {
  std::vector<Vec2> out(mesh.num_triangles());
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) out[t] = element_gradient(mesh, t, values);
  return out;
}

namespace {

FieldNorms volume_norms(const Mesh2D& mesh, std::span<const double> f) {
  double l2 = 0.0;
  double grad = 0.0;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangle(t);
    const double f0 = f[static_cast<std::size_t>(tri[0])];
    const double f1 = f[static_cast<std::size_t>(tri[1])];
    const double f2 = f[static_cast<std::size_t>(tri[2])];
    // Edge-midpoint rule, exact for quadratics.
    const double m01 = 0.5 * (f0 + f1), m12 = 0.5 * (f1 + f2), m20 = 0.5 * (f2 + f0);
    l2 += mesh.area(t) / 3.0 * (m01 * m01 + m12 * m12 + m20 * m20);
    const Vec2 g = element_gradient(mesh, t, f);
    grad += mesh.area(t) * dot(g, g);
  }
  return {std::sqrt(l2), std::sqrt(grad), 0.0};
}

double surface_norm(const Mesh2D& mesh, std::span<const double> w) {
  const double g = 0.5 / std::sqrt(3.0);
  double s = 0.0;
  for (const BoundaryEdge& e : mesh.boundary_edges()) {
    if (e.tag != EdgeTag::Interface) continue;
    const double len = norm(mesh.vertex(e.v[1]) - mesh.vertex(e.v[0]));
    const double a = w[static_cast<std::size_t>(mesh.interface_index(e.v[0]))];
    const double b = w[static_cast<std::size_t>(mesh.interface_index(e.v[1]))];
    const double q1 = (0.5 + g) * a + (0.5 - g) * b;
    const double q2 = (0.5 - g) * a + (0.5 + g) * b;
    s += 0.5 * len * (q1 * q1 + q2 * q2);
  }
  return std::sqrt(s);
}

void check_length(const Mesh2D& mesh, const NodalField& f) {
  const std::size_t expected =
      f.kind == FieldKind::Volume ? mesh.num_vertices() : mesh.interface_vertices().size();
  if (f.values.size() != expected) throw Error(ErrorKind::Validation, "field length does not match the mesh");
}

}  // namespace

FieldNorms field_norms(const Mesh2D& mesh, const NodalField& field) {
  check_length(mesh, field);
  if (field.kind == FieldKind::Volume) return volume_norms(mesh, field.values);
  return {0.0, 0.0, surface_norm(mesh, field.values)};
}

FieldNorms field_norms(const Mesh2D& mesh, const NodalField& a, const NodalField& b) {
  if (a.kind != b.kind) throw Error(ErrorKind::Validation, "cannot difference a volume and a surface field");
  check_length(mesh, a);
  check_length(mesh, b);
  NodalField d{a.kind, a.values};
  for (std::size_t i = 0; i < d.values.size(); ++i) d.values[i] -= b.values[i];
  return field_norms(mesh, d);
}

std::vector<double> interpolate(const PointLocator& locator, std::span<const double> values,
                                std::span<const Vec2> points, OutsidePolicy policy) {
  const Mesh2D& mesh = locator.mesh();
  std::vector<double> out(points.size());
  for (std::size_t k = 0; k < points.size(); ++k) {
    const auto loc = locator.locate(points[k]);
    if (loc) {
      const auto& tri = mesh.triangle(static_cast<std::size_t>(loc->triangle));
      out[k] = loc->bary[0] * values[static_cast<std::size_t>(tri[0])] +
               loc->bary[1] * values[static_cast<std::size_t>(tri[1])] +
               loc->bary[2] * values[static_cast<std::size_t>(tri[2])];
      continue;
    }
    if (policy == OutsidePolicy::Error) {
      std::ostringstream os;
      os << "point (" << points[k].x << ", " << points[k].y << ") lies outside the source mesh";
      throw Error(ErrorKind::Geometry, os.str());
    }
    std::size_t best = 0;
    double best_d = INFINITY;
    for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
      const double d = norm(mesh.vertex(static_cast<int>(v)) - points[k]);
      if (d < best_d) {
        best_d = d;
        best = v;
      }
    }
    out[k] = values[best];
  }
  return out;
}

std::vector<double> interpolate(const Mesh2D& mesh, std::span<const double> values, std::span<const Vec2> points,
                                OutsidePolicy policy) {
  return interpolate(PointLocator(mesh), values, points, policy);
}

}  // namespace porehom

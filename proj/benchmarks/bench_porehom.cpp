#include <benchmark/benchmark.h>

#include <map>

#include "porehom/cell.hpp"
#include "porehom/fem.hpp"
#include "porehom/micro.hpp"

using namespace porehom;

namespace {

const Rect kDomain{0.0, 0.0, 1.2, 1.0};

// Reference-geometry micro mesh; template size from the benchmark argument in hundredths.
MeshPtr micro_mesh(double h) {
  static std::map<double, MeshPtr> cache;
  auto& m = cache[h];
  if (!m) m = std::make_shared<const Mesh2D>(build_perforated_mesh(kDomain, 0.2, build_unit_cell_mesh({0.25, 64, h, true})));
  return m;
}

double arg_h(const benchmark::State& state) { return static_cast<double>(state.range(0)) / 100.0; }

}  // namespace

static void BM_UnitCellMesh(benchmark::State& state) {
  const double h = arg_h(state);
  for (auto _ : state) benchmark::DoNotOptimize(build_unit_cell_mesh({0.25, 64, h, true}));
}
BENCHMARK(BM_UnitCellMesh)->Arg(10)->Arg(5)->Arg(2)->Unit(benchmark::kMillisecond);

static void BM_AssembleStiffness(benchmark::State& state) {
  const MeshPtr m = micro_mesh(arg_h(state));
  const Mat2 id{{{1.0, 0.0}, {0.0, 1.0}}};
  for (auto _ : state) benchmark::DoNotOptimize(assemble_stiffness(*m, id));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(m->num_triangles()));
}
BENCHMARK(BM_AssembleStiffness)->Arg(20)->Arg(10)->Unit(benchmark::kMillisecond);

static void BM_ConjugateGradient(benchmark::State& state) {
  const MeshPtr m = micro_mesh(arg_h(state));
  const SparseMatrix mass = assemble_mass(*m);
  const SparseMatrix stiff = assemble_stiffness(*m, Mat2{{{1.0, 0.0}, {0.0, 1.0}}});
  std::vector<double> ones(m->num_vertices(), 1.0), rhs(m->num_vertices());
  mass.multiply(ones, rhs);
  for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] += 1e-3 * static_cast<double>(i % 7);
  const SparseMatrix a = SparseMatrix::combine(1.0, mass, 0.01, stiff);  // M + dt K
  for (auto _ : state) benchmark::DoNotOptimize(solve_spd(a, rhs, {1e-12, 20000}));
  state.counters["unknowns"] = static_cast<double>(m->num_vertices());
}
BENCHMARK(BM_ConjugateGradient)->Arg(20)->Arg(10)->Unit(benchmark::kMillisecond);

static void BM_CellProblems(benchmark::State& state) {
  const auto m = std::make_shared<const Mesh2D>(build_unit_cell_mesh({0.25, 64, arg_h(state), true}));
  for (auto _ : state) benchmark::DoNotOptimize(solve_cell_problems(m));
}
BENCHMARK(BM_CellProblems)->Arg(5)->Arg(2)->Unit(benchmark::kMillisecond);

static void BM_MicroStep(benchmark::State& state) {
  const MeshPtr m = micro_mesh(arg_h(state));
  const CoupledOperators ops = make_micro_operators(m, ModelParams{});
  MicroState s = init_micro(ops, InitialData{});
  for (auto _ : state) {
    if (s.step == ops.params.num_steps()) s = init_micro(ops, InitialData{});
    benchmark::DoNotOptimize(step_micro(ops, s));
  }
}
BENCHMARK(BM_MicroStep)->Arg(20)->Arg(10)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

#include <benchmark/benchmark.h>

#include "fanlib/fan.hpp"

using namespace fanlib;

namespace {

// cone over a convex k-gon: points on the moment curve
std::vector<Vec> moment_gens(std::size_t k) {
  std::vector<Vec> out;
  for (Int i = 0; i < static_cast<Int>(k); ++i) out.push_back({1, i, i * i});
  return out;
}

ClassicalFanData projective_space(std::size_t n) {
  std::vector<Vec> rays;
  Vec last(n, -1);
  for (std::size_t i = 0; i < n; ++i) rays.push_back(unit_vector(n, i));
  rays.push_back(last);
  ClassicalFanData d;
  d.rank = n;
  for (std::size_t mask = 0; mask + 1 < (std::size_t{1} << (n + 1)); ++mask) {
    std::vector<Vec> g;
    for (std::size_t i = 0; i <= n; ++i)
      if ((mask >> i) & 1) g.push_back(rays[i]);
    d.cones.push_back(RationalCone::from_generators(n, g));
  }
  return d;
}

void dual_of_polygon_cone(benchmark::State& st) {
  RationalCone c = RationalCone::from_generators(3, moment_gens(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(dual_cone(c));
}
BENCHMARK(dual_of_polygon_cone)->Arg(4)->Arg(8)->Arg(16);

void face_poset_of_polygon_monoid(benchmark::State& st) {
  FineMonoid p(AbGroup::free(3), moment_gens(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(faces(p));
}
BENCHMARK(face_poset_of_polygon_monoid)->Arg(4)->Arg(8)->Arg(12);

// <(1,0), (1,1), (1,k)> saturates to k+1 generators
void saturate_plane_monoid(benchmark::State& st) {
  FineMonoid p(AbGroup::free(2), {{1, 0}, {1, 1}, {1, st.range(0)}});
  for (auto _ : st) benchmark::DoNotOptimize(transform(p, Transform::sat));
}
BENCHMARK(saturate_plane_monoid)->Arg(4)->Arg(16)->Arg(64);

void membership_sweep(benchmark::State& st) {
  FineMonoid p(AbGroup::free(2), {{1, 0}, {1, 3}, {2, 1}, {3, 7}});
  Int top = st.range(0);
  for (auto _ : st) {
    std::size_t hits = 0;
    for (Int a = 0; a < top; ++a)
      for (Int b = 0; b < top; ++b) hits += p.contains({a, b});
    benchmark::DoNotOptimize(hits);
  }
}
BENCHMARK(membership_sweep)->Arg(8)->Arg(16);

void classify_multiplication(benchmark::State& st) {
  std::size_t n = static_cast<std::size_t>(st.range(0));
  std::vector<Vec> basis;
  for (std::size_t i = 0; i < n; ++i) basis.push_back(unit_vector(n, i));
  FineMonoid p(AbGroup::free(n), basis);
  Matrix m = Matrix::identity(n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 2;
  MonoidHom h(p, p, GroupHom(p.ambient(), p.ambient(), m));
  for (auto _ : st) benchmark::DoNotOptimize(classify_hom(h));
}
BENCHMARK(classify_multiplication)->Arg(1)->Arg(2)->Arg(3);

void projective_space_properness(benchmark::State& st) {
  Fan x = from_classical(projective_space(static_cast<std::size_t>(st.range(0))));
  FanMap f = to_point(x);
  for (auto _ : st) benchmark::DoNotOptimize(properness_failure(f));
}
BENCHMARK(projective_space_properness)->Arg(1)->Arg(2)->Arg(3);

void projective_space_round_trip(benchmark::State& st) {
  ClassicalFanData d = projective_space(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(to_classical(from_classical(d)));
}
BENCHMARK(projective_space_round_trip)->Arg(1)->Arg(2)->Arg(3);

}  // namespace

BENCHMARK_MAIN();

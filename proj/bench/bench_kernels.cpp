/*
 Copyright 2026 The ddnpc Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
// Serial reference kernels against their OpenMP versions, plus the sweep
// task runner. Results are identical; only wall time differs.

#include "ddnpc/closedloop.hpp"
#include "ddnpc/experiment.hpp"
#include "ddnpc/parallel.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

using namespace ddnpc;

namespace {

Matrix sequence(Eigen::Index eta, Eigen::Index n) {
  Matrix s(eta, n);
  for (Eigen::Index k = 0; k < n; ++k)
    for (Eigen::Index e = 0; e < eta; ++e) s(e, k) = std::sin(0.01 * static_cast<double>(k * (e + 1)));
  return s;
}

Vector column(Eigen::Index c) {
  Vector v(32);
  for (int i = 0; i < 32; ++i) v(i) = std::exp(-1e-3 * static_cast<double>(c * i));
  return v;
}

double expensive(long i) {
  double acc = 0.0;
  for (int j = 0; j < 64; ++j) acc += std::sin(1e-3 * static_cast<double>(i + j));
  return acc;
}

template <Matrix (*Fn)(const Matrix&, int)>
void hankel(benchmark::State& st) {
  const Matrix s = sequence(3, st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(Fn(s, 20));
}

template <Matrix (*Fn)(Eigen::Index, Eigen::Index, const std::function<Vector(Eigen::Index)>&)>
void map_cols(benchmark::State& st) {
  const std::function<Vector(Eigen::Index)> f = [](Eigen::Index c) { return column(c); };
  for (auto _ : st) benchmark::DoNotOptimize(Fn(32, st.range(0), f));
}

template <double (*Fn)(long, const std::function<double(long)>&)>
void reduce(benchmark::State& st) {
  const std::function<double(long)> f = [](long i) { return expensive(i); };
  for (auto _ : st) benchmark::DoNotOptimize(Fn(st.range(0), f));
}

template <bool Parallel>
void sweep_tasks(benchmark::State& st) {
  ExperimentConfig cfg;
  cfg.n_steps = 20;
  const Dictionary dict = cfg.make_dictionary();
  const DataBundle b = collect_data(cfg, 1e-3, 1);
  const DictionaryConstants c = fit_constants(cfg, dict, b, 1e-3, EpsSetting{});
  std::vector<SweepTask> tasks;
  for (int r = 0; r < st.range(0); ++r) tasks.push_back({0, static_cast<Seed>(r)});
  const auto fn = [&](const SweepTask& t) { return run_experiment(cfg, dict, c, b.data, 1e-3, t.seed); };
  for (auto _ : st) {
    auto out = Parallel ? run_tasks_parallel(tasks, fn) : run_tasks_serial(tasks, fn);
    benchmark::DoNotOptimize(out);
  }
}

}  // namespace

BENCHMARK(hankel<serial::build_hankel>)->Name("hankel/serial")->Arg(2000)->Arg(20000);
BENCHMARK(hankel<omp::build_hankel>)->Name("hankel/omp")->Arg(2000)->Arg(20000);
BENCHMARK(map_cols<serial::map_columns>)->Name("map_columns/serial")->Arg(10000);
BENCHMARK(map_cols<omp::map_columns>)->Name("map_columns/omp")->Arg(10000);
BENCHMARK(reduce<serial::max_reduce>)->Name("max_reduce/serial")->Arg(100000);
BENCHMARK(reduce<omp::max_reduce>)->Name("max_reduce/omp")->Arg(100000);
BENCHMARK(sweep_tasks<false>)->Name("sweep_tasks/serial")->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(sweep_tasks<true>)->Name("sweep_tasks/omp")->Arg(8)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

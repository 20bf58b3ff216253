#include <benchmark/benchmark.h>

#include <random>

#include "canreg/optimizer.hpp"

using namespace canreg;

namespace {

ProblemSpec binary_problem(std::size_t M, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ProblemSpec spec;
  spec.M = M;
  spec.L = 1;
  for (std::size_t i = 0; i < M; ++i) spec.x_alphabets.push_back({"X" + std::to_string(i + 1), 2});
  spec.s_alphabet = {"S", 2};
  spec.v_alphabet = {"V", 2};
  spec.vhat_alphabets = {{"Vhat1", 2}};
  std::size_t cells = 4u << M;
  std::gamma_distribution<double> g(1.0, 1.0);
  std::vector<double> p(cells);
  double total = 0.0;
  for (auto& v : p) total += v = g(rng);
  for (auto& v : p) v /= total;
  spec.source = JointPmf(source_axes(spec.x_alphabets, spec.s_alphabet, spec.v_alphabet), p);
  DistortionTable d;
  d.rows = 2;
  d.cols = 2;
  d.values = {0, 1, 1, 0};
  spec.distortions = {d};
  spec.validate();
  return spec;
}

void BM_JointEntropy(benchmark::State& state) {
  const auto spec = binary_problem(state.range(0), 1);
  std::mt19937_64 rng(2);
  const auto aug = attach_channels(spec, random_channels(spec, rng));
  const VarSet half = VarSet::range(0, aug.joint().rank() / 2);
  for (auto _ : state) benchmark::DoNotOptimize(joint_entropy(aug.joint(), half));
}
BENCHMARK(BM_JointEntropy)->DenseRange(2, 4);

void BM_ExtremePoints(benchmark::State& state) {
  const auto spec = binary_problem(state.range(0), 3);
  std::mt19937_64 rng(4);
  const auto aug = attach_channels(spec, random_channels(spec, rng));
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_extreme_points(aug));
}
BENCHMARK(BM_ExtremePoints)->DenseRange(2, 4)->Unit(benchmark::kMillisecond);

void BM_Theta(benchmark::State& state) {
  const auto spec = binary_problem(3, 5);
  std::mt19937_64 rng(6);
  const auto channels = random_channels(spec, rng);
  const auto a = Direction::random(spec, rng);
  const FunctionalContext ctx(spec, 1, channels, a);
  const std::vector<double> t{0.3, 0.7};
  for (auto _ : state) benchmark::DoNotOptimize(ctx.theta(t));
}
BENCHMARK(BM_Theta);

void BM_SingleChannelLp(benchmark::State& state) {
  const auto spec = binary_problem(2, 7);
  std::mt19937_64 rng(8);
  const auto channels = random_channels(spec, rng);
  const auto a = Direction::random(spec, rng);
  const FunctionalContext ctx(spec, 0, channels, a);
  for (auto _ : state) benchmark::DoNotOptimize(optimize_single_channel(ctx, state.range(0), 1));
}
BENCHMARK(BM_SingleChannelLp)->Arg(16)->Arg(64)->Arg(256);

void BM_OracleLeaves(benchmark::State& state) {
  const auto spec = binary_problem(2, 9);
  std::mt19937_64 rng(10);
  const auto a = Direction::random(spec, rng);
  const std::size_t grid = state.range(0);
  double leaves = 0.0;
  for (auto _ : state) {
    const Direction dirs[] = {a};
    leaves += brute_force_oracle(spec, dirs, {2, 2}, grid, kOracleBudget, 1).evaluations;
  }
  state.counters["leaves/s"] = benchmark::Counter(leaves, benchmark::Counter::kIsRate);
}
BENCHMARK(BM_OracleLeaves)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

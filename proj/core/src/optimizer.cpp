#include "canreg/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <thread>

#include "canreg/errors.hpp"
#include "canreg/simplex_lp.hpp"

namespace canreg {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
  return splitmix(splitmix(splitmix(seed) ^ a) ^ b);
}

std::vector<double> dirichlet(std::size_t n, std::mt19937_64& rng) {
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> t(n);
  double total = 0.0;
  for (auto& v : t) total += v = expo(rng);
  for (auto& v : t) v /= total;
  return t;
}

void check_capped(const ProblemSpec& spec, const ChannelSet& channels) {
  if (channels.size() != spec.M - spec.J) throw StructuralError("expected one channel per k >= J");
  for (std::size_t k = spec.J; k < spec.M; ++k) {
    const auto& q = channels[k - spec.J];
    q.validate();
    if (q.inputs != spec.x_alphabets[k].size) {
      throw StructuralError("channel for source " + std::to_string(k + 1) + " has the wrong input alphabet");
    }
    if (q.outputs > q.inputs) {
      throw StructuralError("channel for source " + std::to_string(k + 1) + " has |Z| > |X|");
    }
  }
}

double binomial(std::size_t n, std::size_t r) {
  double v = 1.0;
  for (std::size_t i = 1; i <= r; ++i) v = v * static_cast<double>(n - r + i) / static_cast<double>(i);
  return v;
}

// All length-`parts` nonnegative integer vectors summing to `total`, in
// lexicographically decreasing order.
std::vector<std::vector<std::size_t>> compositions(std::size_t total, std::size_t parts) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> cur(parts, 0);
  auto rec = [&](auto&& self, std::size_t pos, std::size_t left) -> void {
    if (pos + 1 == parts) {
      cur[pos] = left;
      out.push_back(cur);
      return;
    }
    for (std::size_t n = left + 1; n-- > 0;) {
      cur[pos] = n;
      self(self, pos + 1, left - n);
    }
  };
  rec(rec, 0, total);
  return out;
}

}  // namespace

double weighted_objective(const ProblemSpec& spec, const ChannelSet& channels, const Direction& a) {
  return direct_objective(attach_channels(spec, channels), a);
}

std::vector<std::vector<double>> candidate_pool(const FunctionalContext& ctx, std::size_t random_draws,
                                                std::uint64_t seed) {
  const auto& p = ctx.source_marginal();
  const std::size_t n = p.size();
  std::vector<std::vector<double>> pool;
  for (std::size_t x = 0; x < n; ++x) {
    std::vector<double> e(n, 0.0);
    e[x] = 1.0;
    pool.push_back(std::move(e));
  }
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = x + 1; y < n; ++y) {
      std::vector<double> m(n, 0.0);
      m[x] = m[y] = 0.5;
      pool.push_back(std::move(m));
    }
  }
  if (n > 2) pool.emplace_back(n, 1.0 / static_cast<double>(n));
  pool.push_back(p);
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < random_draws; ++i) pool.push_back(dirichlet(n, rng));
  const auto incumbent = forward_to_reverse(ctx.spec(), ctx.k(), ctx.incumbent());
  for (std::size_t z = 0; z < incumbent.weights.size(); ++z) {
    if (incumbent.weights[z] > 0.0) pool.push_back(incumbent.columns[z]);
  }
  return pool;
}

SingleChannelResult optimize_single_channel(const FunctionalContext& ctx, std::size_t candidates,
                                            std::uint64_t seed) {
  if (!ctx.direction()) throw StructuralError("optimize_single_channel: context has no direction");
  auto pool = candidate_pool(ctx, candidates, seed);
  const auto& p = ctx.source_marginal();
  const std::size_t n = p.size();

  LinearProgram lp;
  lp.rows = n;
  lp.cols = pool.size();
  lp.A.assign(lp.rows * lp.cols, 0.0);
  lp.b = p;
  lp.c.resize(lp.cols);
  for (std::size_t j = 0; j < lp.cols; ++j) {
    lp.c[j] = ctx.theta(pool[j]);
    for (std::size_t x = 0; x < n; ++x) lp.A[x * lp.cols + j] = pool[j][x];
  }
  LpSolution sol;
  try {
    sol = solve_lp(lp);
  } catch (const std::runtime_error& e) {
    throw NumericError(std::string("optimize_single_channel: LP failed: ") + e.what());
  }

  SingleChannelResult out;
  out.pool_size = pool.size();
  for (std::size_t j : sol.basis) {
    if (sol.x[j] <= 0.0) continue;
    out.pair.weights.push_back(sol.x[j]);
    out.pair.columns.push_back(pool[j]);
    out.objective += sol.x[j] * lp.c[j];
  }
  return out;
}

OptimizeResult coordinate_descent(const ProblemSpec& spec, const Direction& a, const ChannelSet& init,
                                  const OptimizeOptions& options, std::uint64_t seed) {
  if (options.sweeps < 1) throw StructuralError("coordinate_descent: sweeps must be at least 1");
  check_capped(spec, init);
  const RdEvaluator evaluator(spec);

  OptimizeResult out;
  out.channels = init;
  out.objective = evaluator.objective(out.channels, a);
  out.trace.push_back(out.objective);
  if (spec.J < spec.M) {
    for (std::size_t sweep = 0; sweep < options.sweeps; ++sweep) {
      const double before = out.objective;
      for (std::size_t k = spec.J; k < spec.M; ++k) {
        const FunctionalContext ctx(spec, k, out.channels, a);
        const auto step = optimize_single_channel(ctx, options.candidates, derive(seed, sweep, k));
        ChannelSet next = out.channels;
        next[k - spec.J] = reverse_to_forward(spec, k, step.pair);
        const double value = evaluator.objective(next, a);
        if (value <= out.objective) {
          out.channels = std::move(next);
          out.objective = value;
        }
        out.steps.push_back(out.objective);
      }
      out.trace.push_back(out.objective);
      ++out.sweeps_run;
      if (before - out.objective < options.stop_improvement) break;
    }
  }
  out.rd_point = evaluator.evaluate(out.channels);
  return out;
}

std::vector<ChannelSet> restart_inits(const ProblemSpec& spec, std::size_t restarts, std::uint64_t seed) {
  std::vector<ChannelSet> inits;
  for (std::size_t i = 0; i < restarts; ++i) {
    if (i == 0) {
      inits.push_back(identity_channels(spec));
    } else if (i == 1) {
      inits.push_back(constant_channels(spec));
    } else {
      std::mt19937_64 rng(derive(seed, 0x1417, i));
      inits.push_back(random_channels(spec, rng));
    }
  }
  return inits;
}

OptimizeResult multi_start(const ProblemSpec& spec, const Direction& a, const OptimizeOptions& options,
                           std::uint64_t seed, const std::vector<ChannelSet>& extra) {
  auto inits = restart_inits(spec, std::max<std::size_t>(options.restarts, 1), seed);
  inits.insert(inits.end(), extra.begin(), extra.end());
  OptimizeResult best;
  best.objective = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < inits.size(); ++i) {
    auto run = coordinate_descent(spec, a, inits[i], options, derive(seed, 0x5eed, i));
    if (run.objective < best.objective) best = std::move(run);
  }
  return best;
}

std::vector<Channel> lattice_channels(std::size_t inputs, std::size_t outputs, std::size_t grid) {
  if (inputs == 0 || outputs == 0 || grid == 0) throw StructuralError("lattice_channels: sizes and grid must be positive");
  const auto rows = compositions(grid, outputs);
  std::vector<Channel> out;
  std::vector<std::size_t> pick(inputs, 0);
  auto columns_sorted = [&] {
    for (std::size_t z = 0; z + 1 < outputs; ++z) {
      for (std::size_t x = 0; x < inputs; ++x) {
        const std::size_t a = rows[pick[x]][z];
        const std::size_t b = rows[pick[x]][z + 1];
        if (a > b) break;
        if (a < b) return false;
      }
    }
    return true;
  };
  while (true) {
    if (columns_sorted()) {
      Channel q;
      q.inputs = inputs;
      q.outputs = outputs;
      q.rows.reserve(inputs * outputs);
      for (std::size_t x = 0; x < inputs; ++x) {
        for (std::size_t z = 0; z < outputs; ++z) {
          q.rows.push_back(static_cast<double>(rows[pick[x]][z]) / static_cast<double>(grid));
        }
      }
      out.push_back(std::move(q));
    }
    std::size_t pos = inputs;
    while (pos-- > 0) {
      if (++pick[pos] < rows.size()) break;
      pick[pos] = 0;
    }
    if (pos == static_cast<std::size_t>(-1)) break;
  }
  return out;
}

double oracle_cost(const ProblemSpec& spec, const std::vector<std::size_t>& z_sizes, std::size_t grid) {
  double cost = 1.0;
  for (std::size_t k = spec.J; k < spec.M; ++k) {
    const std::size_t nz = z_sizes[k - spec.J];
    double per_channel = std::pow(binomial(grid + nz - 1, nz - 1), static_cast<double>(spec.x_alphabets[k].size));
    for (std::size_t i = 2; i <= nz; ++i) per_channel /= static_cast<double>(i);
    cost *= std::max(1.0, per_channel);
  }
  return cost;
}

OracleRun brute_force_oracle(const ProblemSpec& spec, std::span<const Direction> directions,
                             const std::vector<std::size_t>& z_sizes, std::size_t grid, double budget,
                             std::size_t threads) {
  const std::size_t J = spec.J;
  const std::size_t M = spec.M;
  const std::size_t L = spec.L;
  if (z_sizes.size() != M - J) throw StructuralError("brute_force_oracle: need one output size per channel");
  if (grid == 0) throw StructuralError("brute_force_oracle: grid must be positive");
  for (const auto& a : directions) {
    if (a.sources() != M || a.distortions() != L) throw StructuralError("brute_force_oracle: direction dimension mismatch");
  }
  const double estimate = oracle_cost(spec, z_sizes, grid);
  if (estimate > budget) {
    throw BudgetError("brute_force_oracle: about " + std::to_string(static_cast<long long>(estimate)) +
                          " evaluations exceed the budget",
                      estimate);
  }

  std::vector<std::vector<Channel>> lattice;
  std::vector<std::vector<double>> entropies;
  const RdEvaluator evaluator(spec);
  double leaves = 1.0;
  for (std::size_t k = J; k < M; ++k) {
    lattice.push_back(lattice_channels(spec.x_alphabets[k].size, z_sizes[k - J], grid));
    std::vector<double> h;
    for (const auto& q : lattice.back()) h.push_back(evaluator.channel_entropy(k, q.rows.data(), q.outputs));
    entropies.push_back(std::move(h));
    leaves *= static_cast<double>(lattice.back().size());
  }
  if (leaves > budget) {
    throw BudgetError("brute_force_oracle: " + std::to_string(static_cast<long long>(leaves)) +
                          " evaluations exceed the budget",
                      leaves);
  }

  const std::size_t nd = directions.size();
  struct Local {
    std::vector<double> value;
    std::vector<std::vector<std::size_t>> choice;
  };
  auto search = [&](std::size_t first, std::size_t last) {
    Local local;
    local.value.assign(nd, std::numeric_limits<double>::infinity());
    local.choice.assign(nd, {});
    auto ws = evaluator.workspace();
    std::vector<std::size_t> pick(M - J, 0);
    std::vector<double> dist(L);
    auto leaf = [&] {
      evaluator.finish(ws, dist.data());
      for (std::size_t d = 0; d < nd; ++d) {
        const double v = directions[d].dot(ws.rates, dist);
        if (v < local.value[d]) {
          local.value[d] = v;
          local.choice[d] = pick;
        }
      }
    };
    auto rec = [&](auto&& self, std::size_t level) -> void {
      if (level == M - J) {
        leaf();
        return;
      }
      const std::size_t lo = level == 0 ? first : 0;
      const std::size_t hi = level == 0 ? last : lattice[level].size();
      for (std::size_t i = lo; i < hi; ++i) {
        const auto& q = lattice[level][i];
        pick[level] = i;
        evaluator.apply(ws, J + level, q.rows.data(), q.outputs, entropies[level][i]);
        self(self, level + 1);
      }
    };
    if (M == J) {
      leaf();
    } else {
      rec(rec, 0);
    }
    return local;
  };

  std::vector<Local> parts;
  const std::size_t top = M == J ? 1 : lattice[0].size();
  std::size_t workers = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, top);
  if (workers <= 1 || M == J) {
    parts.push_back(search(0, top));
  } else {
    parts.resize(workers);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t first = top * w / workers;
      const std::size_t last = top * (w + 1) / workers;
      pool.emplace_back([&, w, first, last] { parts[w] = search(first, last); });
    }
    for (auto& t : pool) t.join();
  }

  OracleRun run;
  run.evaluations = leaves;
  for (std::size_t d = 0; d < nd; ++d) {
    const Local* winner = nullptr;
    for (const auto& part : parts) {
      if (!winner || part.value[d] < winner->value[d]) winner = &part;
    }
    OracleResult r;
    r.objective = winner->value[d];
    for (std::size_t level = 0; level < M - J; ++level) r.channels.push_back(lattice[level][winner->choice[d][level]]);
    run.best.push_back(std::move(r));
  }
  return run;
}

OracleResult brute_force_oracle(const ProblemSpec& spec, const Direction& a, const std::vector<std::size_t>& z_sizes,
                                std::size_t grid, double budget) {
  const Direction dirs[] = {a};
  return brute_force_oracle(spec, dirs, z_sizes, grid, budget).best.front();
}

std::vector<AlphabetBoundReport> verify_alphabet_bound(const ProblemSpec& spec, std::span<const Direction> directions,
                                                       std::size_t grid, double tol, const OptimizeOptions& options,
                                                       std::uint64_t seed, double budget) {
  std::vector<std::size_t> capped;
  std::vector<std::size_t> enlarged;
  for (std::size_t k = spec.J; k < spec.M; ++k) {
    capped.push_back(spec.x_alphabets[k].size);
    enlarged.push_back(spec.x_alphabets[k].size + 2);
  }
  std::size_t capped_grid = 2 * grid;
  if (oracle_cost(spec, capped, capped_grid) > budget) capped_grid = grid;

  const auto enlarged_run = brute_force_oracle(spec, directions, enlarged, grid, budget);
  const auto capped_run = brute_force_oracle(spec, directions, capped, capped_grid, budget);

  std::vector<AlphabetBoundReport> reports;
  for (std::size_t d = 0; d < directions.size(); ++d) {
    AlphabetBoundReport r;
    r.capped_grid = capped_grid;
    r.enlarged_grid = grid;
    r.evaluations = enlarged_run.evaluations + capped_run.evaluations;
    r.capped_oracle = capped_run.best[d].objective;
    r.enlarged_min = enlarged_run.best[d].objective;
    r.enlarged_channels = enlarged_run.best[d].channels;
    const auto refined = multi_start(spec, directions[d], options, derive(seed, 0xab, d), {capped_run.best[d].channels});
    if (refined.objective < r.capped_oracle) {
      r.capped_min = refined.objective;
      r.capped_channels = refined.channels;
    } else {
      r.capped_min = r.capped_oracle;
      r.capped_channels = capped_run.best[d].channels;
    }
    r.passed = r.capped_min <= r.enlarged_min + tol;
    reports.push_back(std::move(r));
  }
  return reports;
}

AlphabetBoundReport verify_alphabet_bound(const ProblemSpec& spec, const Direction& a, std::size_t grid, double tol,
                                          const OptimizeOptions& options, std::uint64_t seed, double budget) {
  const Direction dirs[] = {a};
  return verify_alphabet_bound(spec, dirs, grid, tol, options, seed, budget).front();
}

std::vector<TracePoint> trace_inner_bound(const ProblemSpec& spec, std::span<const Direction> directions,
                                          const Permutation& perm, const OptimizeOptions& options,
                                          std::uint64_t seed) {
  if (perm.size() != spec.M) throw StructuralError("trace_inner_bound: permutation size must equal M");
  std::vector<TracePoint> out;
  for (std::size_t d = 0; d < directions.size(); ++d) {
    auto result = multi_start(spec, directions[d], options, derive(seed, 0x7ace, d));
    RDPoint corner;
    corner.rates = corner_point(attach_channels(spec, result.channels), perm);
    corner.distortions = result.rd_point.distortions;
    out.push_back(TracePoint{directions[d], std::move(result), std::move(corner)});
  }
  return out;
}

}  // namespace canreg

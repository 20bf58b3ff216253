#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "canreg/errors.hpp"
#include "problem_io.hpp"

namespace canreg::cli {

namespace {

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::mt19937_64 stream(std::uint64_t seed, std::uint64_t tag, std::uint64_t index) {
  return std::mt19937_64(mix(mix(mix(seed) ^ tag) ^ index));
}

Record numbers(const std::vector<double>& v) {
  Record a = Record::array();
  for (double x : v) a.push_back(x);
  return a;
}

Record subset_json(VarSet s) {
  Record a = Record::array();
  for (auto i : s.members()) a.push_back(i + 1);
  return a;
}

Record perm_json(const Permutation& p) {
  Record a = Record::array();
  for (std::size_t i = 0; i < p.size(); ++i) a.push_back(p[i] + 1);
  return a;
}

std::string perm_text(const Permutation& p) {
  std::string s;
  for (std::size_t i = 0; i < p.size(); ++i) s += (i ? " " : "") + std::to_string(p[i] + 1);
  return s;
}

std::string family_text(const std::vector<VarSet>& family) {
  std::string s;
  for (const auto& f : family) {
    if (!s.empty()) s += ' ';
    s += '{';
    bool first = true;
    for (auto i : f.members()) {
      s += (first ? "" : ",") + std::to_string(i + 1);
      first = false;
    }
    s += '}';
  }
  return s.empty() ? "-" : s;
}

Record counterexample(const std::string& suite, const ProblemSpec& spec, const ChannelSet& channels, Record detail) {
  Record r;
  r["suite"] = suite;
  r["problem"] = problem_to_json(spec);
  r["channels"] = channels_to_json(channels)["channels"];
  r["detail"] = std::move(detail);
  return r;
}

double default_tol(const Invocation& inv) {
  if (inv.command == "verify" && inv.suite == "alphabet-bound") return 1e-2;
  return 1e-9;
}

std::size_t default_trials(const Invocation& inv) {
  if (inv.command != "verify") return 0;
  if (inv.suite == "noncrossing") return 5;
  if (inv.suite == "alphabet-bound") return 10;
  return 200;
}

OptimizeOptions options_of(const Config& c) {
  OptimizeOptions o;
  o.sweeps = c.sweeps;
  o.candidates = c.candidates;
  o.restarts = c.restarts;
  return o;
}

std::vector<std::string> split(const std::string& text, const std::string& seps) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (seps.find(c) != std::string::npos) {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

double parse_number(const std::string& s, const std::string& where) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0' || !std::isfinite(v)) {
    throw InputError(InputError::Kind::Parse, where + ": '" + s + "' is not a number");
  }
  return v;
}

// --------------------------------------------------------------------------

int cmd_extreme_points(const ProblemSpec& spec, const Config& cfg, RunReport& report, std::ostream& out) {
  if (spec.M > kMaxEnumerationSources) {
    throw InputError(InputError::Kind::Usage, "extreme-points supports at most " +
                                                  std::to_string(kMaxEnumerationSources) + " sources");
  }
  ChannelSet channels;
  if (cfg.channels == "random") {
    auto rng = stream(cfg.seed, 0xc0, 0);
    channels = random_channels(spec, rng);
  } else if (cfg.channels == "identity") {
    channels = identity_channels(spec);
  } else if (cfg.channels == "constant") {
    channels = constant_channels(spec);
  } else {
    channels = load_channels(spec, cfg.channels);
  }
  const double tol = cfg.tol.value_or(1e-9);
  const auto aug = attach_channels(spec, channels);
  const auto set = enumerate_extreme_points(aug);
  const double reference = rate_term(aug, VarSet::range(0, spec.M), VarSet{});

  for (const auto& w : set.preflight.warnings) {
    report.add("warning", Record{{"message", w}});
    out << "warning: " << w << '\n';
  }

  std::vector<std::string> header{"perm"};
  for (std::size_t i = 0; i < spec.M; ++i) header.push_back("R" + std::to_string(i + 1));
  header.insert(header.end(), {"sum", "active", "chain"});
  TextTable table(header);

  bool all_chains = true;
  bool all_members = true;
  bool sum_ok = true;
  double lo = INFINITY;
  double hi = -INFINITY;
  for (const auto& p : set.points) {
    const auto rep = membership(aug, p.rates);
    const auto family = rep.active_family();
    const bool chain = is_chain(family);
    double sum = 0.0;
    for (double r : p.rates) sum += r;
    lo = std::min(lo, sum);
    hi = std::max(hi, sum);
    if (std::abs(sum - reference) > tol) sum_ok = false;
    all_chains = all_chains && chain;
    all_members = all_members && rep.member;

    std::vector<std::string> cells{perm_text(p.perm)};
    for (double r : p.rates) cells.push_back(fmt_num(r));
    cells.push_back(fmt_num(sum));
    cells.push_back(family_text(family));
    cells.push_back(chain ? "yes" : "no");
    table.row(std::move(cells));

    Record active = Record::array();
    for (const auto& f : family) active.push_back(subset_json(f));
    report.add("corner", Record{{"perm", perm_json(p.perm)},
                                {"rates", numbers(p.rates)},
                                {"sum_rate", sum},
                                {"member", rep.member},
                                {"active", std::move(active)},
                                {"chain", chain}});
  }
  table.print(out);

  const bool degenerate = set.distinct < set.points.size();
  const bool passed =
      sum_ok && (!set.preflight.passed || (!degenerate && all_chains && all_members));
  out << "corners: " << set.points.size() << ", distinct: " << set.distinct
      << ", min pairwise gap: " << fmt_num(set.min_pairwise_gap, 9) << '\n';
  out << "preflight: " << (set.preflight.passed ? "passed" : "FAILED") << " (smallest dependence "
      << fmt_num(set.preflight.smallest, 9) << ")" << (degenerate ? ", degenerate" : "") << '\n';
  out << "sum-rate: reference " << fmt_num(reference, 9) << ", spread " << fmt_num(hi - lo, 12) << " -> "
      << (sum_ok ? "ok" : "MISMATCH") << '\n';

  report.add("extreme_points", Record{{"channels", cfg.channels},
                                      {"corners", set.points.size()},
                                      {"distinct", set.distinct},
                                      {"min_pairwise_gap", set.min_pairwise_gap},
                                      {"preflight_passed", set.preflight.passed},
                                      {"preflight_smallest", set.preflight.smallest},
                                      {"degenerate", degenerate},
                                      {"sum_rate_reference", reference},
                                      {"sum_rate_spread", hi - lo},
                                      {"sum_rate_ok", sum_ok},
                                      {"chains_ok", all_chains},
                                      {"passed", passed}});
  if (!passed) {
    report.add("counterexample", counterexample("extreme-points", spec, channels, Record{{"tol", tol}}));
  }
  return passed ? kExitOk : kExitFailure;
}

// --------------------------------------------------------------------------

int verify_identities(const ProblemSpec& spec, const Config& cfg, std::size_t trials, double tol, RunReport& report,
                      std::ostream& out) {
  const std::size_t instances = std::max<std::size_t>(1, std::min<std::size_t>(trials, 10));
  const std::size_t per = (trials + instances - 1) / instances;
  TextTable table({"instance", "draws", "checks", "max eq gap", "min ineq slack", "violations"});
  bool passed = true;
  std::size_t total_draws = 0;
  for (std::size_t i = 0; i < instances; ++i) {
    auto rng = stream(cfg.seed, 0x1d, i);
    const auto channels = random_channels(spec, rng);
    const auto aug = attach_channels(spec, channels);
    const auto rep = verify_chain_identities(aug, per, tol, mix(cfg.seed ^ (0x1d00 + i)));
    total_draws += rep.draws;
    table.row({std::to_string(i), std::to_string(rep.draws), std::to_string(rep.checks),
               fmt_num(rep.max_equality_gap, 12), fmt_num(rep.min_inequality_slack, 12),
               std::to_string(rep.violations.size())});
    report.add("identities", Record{{"instance", i},
                                    {"draws", rep.draws},
                                    {"checks", rep.checks},
                                    {"max_equality_gap", rep.max_equality_gap},
                                    {"min_inequality_slack", rep.min_inequality_slack},
                                    {"violations", rep.violations.size()},
                                    {"passed", rep.passed()}});
    if (!rep.passed() && passed) {
      const auto& v = rep.violations.front();
      Record order = Record::array();
      for (auto o : v.order) order.push_back(o + 1);
      report.add("counterexample", counterexample("identities", spec, channels,
                                                  Record{{"identity", to_string(v.identity)},
                                                         {"first", subset_json(v.first)},
                                                         {"second", subset_json(v.second)},
                                                         {"order", std::move(order)},
                                                         {"lhs", v.lhs},
                                                         {"rhs", v.rhs},
                                                         {"tol", tol}}));
    }
    passed = passed && rep.passed();
  }
  table.print(out);
  out << "identities: " << total_draws << " draws -> " << (passed ? "PASS" : "FAIL") << '\n';
  return passed ? kExitOk : kExitFailure;
}

int verify_noncrossing_suite(const ProblemSpec& spec, const Config& cfg, std::size_t trials, double tol,
                             RunReport& report, std::ostream& out) {
  if (spec.M > kMaxEnumerationSources) {
    throw InputError(InputError::Kind::Usage, "noncrossing supports at most " +
                                                  std::to_string(kMaxEnumerationSources) + " sources");
  }
  constexpr std::size_t kMembers = 50;
  constexpr std::size_t kAttempts = 20;
  TextTable table({"instance", "corners", "members", "chains", "preflight"});
  bool passed = true;
  for (std::size_t i = 0; i < trials; ++i) {
    auto rng = stream(cfg.seed, 0x2c, i);
    ChannelSet channels;
    ExtremePointSet set;
    for (std::size_t attempt = 0; attempt < kAttempts; ++attempt) {
      channels = random_channels(spec, rng);
      set = enumerate_extreme_points(attach_channels(spec, channels), tol);
      if (set.preflight.passed) break;
    }
    const auto aug = attach_channels(spec, channels);
    if (!set.preflight.passed) {
      table.row({std::to_string(i), "-", "-", "-", "skipped"});
      report.add("noncrossing", Record{{"instance", i}, {"skipped", true}, {"passed", true}});
      continue;
    }
    std::size_t chains = 0;
    std::size_t checked = 0;
    std::vector<RateVector> failures;
    auto check = [&](const RateVector& r) {
      ++checked;
      if (verify_noncrossing(aug, r, tol)) {
        ++chains;
      } else {
        failures.push_back(r);
      }
    };
    for (const auto& p : set.points) check(p.rates);
    for (std::size_t m = 0; m < kMembers; ++m) check(sample_region_point(set, rng));
    const bool ok = failures.empty();
    table.row({std::to_string(i), std::to_string(set.points.size()), std::to_string(kMembers),
               std::to_string(chains) + "/" + std::to_string(checked), "passed"});
    report.add("noncrossing", Record{{"instance", i},
                                     {"skipped", false},
                                     {"corners", set.points.size()},
                                     {"members", kMembers},
                                     {"chains", chains},
                                     {"checked", checked},
                                     {"passed", ok}});
    if (!ok && passed) {
      report.add("counterexample",
                 counterexample("noncrossing", spec, channels, Record{{"rates", numbers(failures.front())}, {"tol", tol}}));
    }
    passed = passed && ok;
  }
  table.print(out);
  out << "noncrossing: " << trials << " instances -> " << (passed ? "PASS" : "FAIL") << '\n';
  return passed ? kExitOk : kExitFailure;
}

int verify_decomposition(const ProblemSpec& spec, const Config& cfg, std::size_t trials, double tol,
                         RunReport& report, std::ostream& out) {
  if (spec.J == spec.M) {
    out << "decomposition: no channels to decompose (J = M) -> PASS\n";
    report.add("decomposition", Record{{"draws", 0}, {"max_gap", 0.0}, {"passed", true}});
    return kExitOk;
  }
  double worst = 0.0;
  std::size_t failed = 0;
  std::size_t entries = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    auto rng = stream(cfg.seed, 0xde, t);
    std::vector<std::size_t> z;
    for (std::size_t k = spec.J; k < spec.M; ++k) {
      z.push_back(std::uniform_int_distribution<std::size_t>(1, spec.x_alphabets[k].size + 1)(rng));
    }
    const auto channels = random_channels(spec, z, rng);
    const auto a = Direction::random(spec, rng);
    const auto rep = verify_linear_decomposition(spec, channels, a, tol);
    worst = std::max(worst, rep.max_gap);
    entries += rep.entries.size();
    Record ks = Record::array();
    for (const auto& e : rep.entries) {
      ks.push_back(Record{{"k", e.k + 1}, {"functional", e.functional_path}, {"direct", e.direct_path}, {"gap", e.gap}});
    }
    report.add("decomposition", Record{{"draw", t},
                                       {"direction", numbers(a.weights())},
                                       {"entries", std::move(ks)},
                                       {"max_gap", rep.max_gap},
                                       {"passed", rep.passed}});
    if (!rep.passed) {
      if (failed == 0) {
        report.add("counterexample", counterexample("decomposition", spec, channels,
                                                    Record{{"direction", numbers(a.weights())},
                                                           {"max_gap", rep.max_gap},
                                                           {"tol", tol}}));
      }
      ++failed;
    }
  }
  TextTable table({"draws", "checks", "max gap", "tol", "failed"});
  table.row({std::to_string(trials), std::to_string(entries), fmt_num(worst, 17), fmt_num(tol, 17),
             std::to_string(failed)});
  table.print(out);
  out << "decomposition: " << (failed == 0 ? "PASS" : "FAIL") << '\n';
  return failed == 0 ? kExitOk : kExitFailure;
}

int verify_alphabet(const ProblemSpec& spec, const Config& cfg, std::size_t trials, double tol, RunReport& report,
                    std::ostream& out) {
  if (spec.J == spec.M && spec.L == 0) {
    throw InputError(InputError::Kind::Usage, "alphabet-bound needs at least one admissible direction coordinate");
  }
  std::vector<Direction> directions;
  for (std::size_t d = 0; d < trials; ++d) {
    auto rng = stream(cfg.seed, 0xab, d);
    directions.push_back(Direction::random(spec, rng));
  }
  const auto reports = verify_alphabet_bound(spec, directions, cfg.grid, tol, options_of(cfg), cfg.seed, cfg.budget);
  TextTable table({"dir", "capped", "lattice", "enlarged", "margin", "verdict"});
  bool passed = true;
  for (std::size_t d = 0; d < reports.size(); ++d) {
    const auto& r = reports[d];
    const double margin = r.enlarged_min + tol - r.capped_min;
    table.row({std::to_string(d), fmt_num(r.capped_min, 9), fmt_num(r.capped_oracle, 9), fmt_num(r.enlarged_min, 9),
               fmt_num(margin, 9), r.passed ? "PASS" : "FAIL"});
    report.add("alphabet_bound", Record{{"direction_index", d},
                                        {"direction", numbers(directions[d].weights())},
                                        {"capped_min", r.capped_min},
                                        {"capped_oracle", r.capped_oracle},
                                        {"enlarged_min", r.enlarged_min},
                                        {"capped_grid", r.capped_grid},
                                        {"enlarged_grid", r.enlarged_grid},
                                        {"evaluations", r.evaluations},
                                        {"passed", r.passed}});
    if (!r.passed && passed) {
      report.add("counterexample", counterexample("alphabet-bound", spec, r.capped_channels,
                                                  Record{{"direction", numbers(directions[d].weights())},
                                                         {"enlarged_channels", channels_to_json(r.enlarged_channels)["channels"]},
                                                         {"capped_min", r.capped_min},
                                                         {"enlarged_min", r.enlarged_min},
                                                         {"tol", tol}}));
    }
    passed = passed && r.passed;
  }
  table.print(out);
  out << "alphabet-bound: grid " << cfg.grid << ", tol " << tol << " -> " << (passed ? "PASS" : "FAIL") << '\n';
  return passed ? kExitOk : kExitFailure;
}

// --------------------------------------------------------------------------

std::size_t coordinate_of(const ProblemSpec& spec, const std::string& token) {
  const std::string where = "--sweep";
  if (token.empty()) throw InputError(InputError::Kind::Usage, where + ": empty coordinate");
  std::size_t index = 0;
  if (token[0] == 'R' || token[0] == 'D') {
    const double v = parse_number(token.substr(1), where);
    if (v < 1 || v != std::floor(v)) throw InputError(InputError::Kind::Usage, where + ": bad coordinate " + token);
    index = static_cast<std::size_t>(v) - 1 + (token[0] == 'D' ? spec.M : 0);
    if ((token[0] == 'R' && index >= spec.M) || (token[0] == 'D' && index >= spec.M + spec.L)) {
      throw InputError(InputError::Kind::Usage, where + ": coordinate " + token + " out of range");
    }
  } else {
    const double v = parse_number(token, where);
    if (v < 1 || v > static_cast<double>(spec.M + spec.L) || v != std::floor(v)) {
      throw InputError(InputError::Kind::Usage, where + ": coordinate " + token + " out of range");
    }
    index = static_cast<std::size_t>(v) - 1;
  }
  return index;
}

std::vector<Direction> sweep_directions(const ProblemSpec& spec, const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw InputError(InputError::Kind::Usage, "--sweep expects A,B:N");
  const auto axes = split(text.substr(0, colon), ",");
  if (axes.size() != 2) throw InputError(InputError::Kind::Usage, "--sweep expects two coordinates");
  const std::size_t a = coordinate_of(spec, axes[0]);
  const std::size_t b = coordinate_of(spec, axes[1]);
  if (a == b) throw InputError(InputError::Kind::Usage, "--sweep coordinates must differ");
  const double nv = parse_number(text.substr(colon + 1), "--sweep");
  if (nv < 1 || nv != std::floor(nv) || nv > 100000) throw InputError(InputError::Kind::Usage, "--sweep: bad point count");
  const auto n = static_cast<std::size_t>(nv);
  std::vector<Direction> out;
  for (std::size_t j = 0; j < n; ++j) {
    const double theta = n == 1 ? 0.0 : std::numbers::pi / 2 * static_cast<double>(j) / static_cast<double>(n - 1);
    std::vector<double> w(spec.M + spec.L, 0.0);
    w[a] = j + 1 == n && n > 1 ? 0.0 : std::cos(theta);
    w[b] = j == 0 ? 0.0 : std::sin(theta);
    try {
      out.push_back(Direction::normalized(spec, std::move(w)));
    } catch (const StructuralError& e) {
      throw InputError(InputError::Kind::Shape, "--sweep point " + std::to_string(j) + ": " + e.what());
    }
  }
  return out;
}

std::vector<Direction> file_directions(const ProblemSpec& spec, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError(InputError::Kind::Parse, path + ": cannot open file");
  std::vector<Direction> out;
  std::string line;
  std::size_t row = 0;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto cells = split(line, ", \t\r");
    if (cells.empty()) continue;
    const std::string where = path + ": direction row " + std::to_string(row) + " (line " + std::to_string(line_no) + ")";
    if (cells.size() != spec.M + spec.L) {
      throw InputError(InputError::Kind::Shape, where + ": expected " + std::to_string(spec.M + spec.L) + " weights");
    }
    std::vector<double> w;
    for (const auto& c : cells) w.push_back(parse_number(c, where));
    try {
      out.push_back(Direction::normalized(spec, std::move(w)));
    } catch (const StructuralError& e) {
      throw InputError(InputError::Kind::Shape, where + ": " + e.what());
    }
    ++row;
  }
  if (out.empty()) throw InputError(InputError::Kind::Usage, path + ": no directions given");
  return out;
}

int cmd_trace(const ProblemSpec& spec, const Config& cfg, RunReport& report, std::ostream& out) {
  if (cfg.directions.empty() == cfg.sweep.empty()) {
    throw InputError(InputError::Kind::Usage, "trace needs exactly one of --directions or --sweep");
  }
  const auto directions = cfg.sweep.empty() ? file_directions(spec, cfg.directions) : sweep_directions(spec, cfg.sweep);
  Permutation perm = Permutation::identity(spec.M);
  if (!cfg.perm.empty()) {
    std::vector<std::size_t> order;
    for (const auto& t : split(cfg.perm, ", ")) {
      const double v = parse_number(t, "--perm");
      if (v < 1 || v != std::floor(v)) throw InputError(InputError::Kind::Usage, "--perm entries are 1-based indices");
      order.push_back(static_cast<std::size_t>(v) - 1);
    }
    try {
      perm = Permutation(order);
      if (perm.size() != spec.M) throw StructuralError("size differs from M");
    } catch (const StructuralError& e) {
      throw InputError(InputError::Kind::Usage, std::string("--perm: ") + e.what());
    }
  }

  const auto points = trace_inner_bound(spec, directions, perm, options_of(cfg), cfg.seed);
  std::vector<std::string> header{"#"};
  for (std::size_t i = 0; i < spec.M + spec.L; ++i) header.push_back("a" + std::to_string(i + 1));
  for (std::size_t i = 0; i < spec.M; ++i) header.push_back("R" + std::to_string(i + 1));
  for (std::size_t l = 0; l < spec.L; ++l) header.push_back("D" + std::to_string(l + 1));
  header.push_back("objective");
  TextTable table(header);
  std::ostringstream csv;
  for (std::size_t i = 1; i < header.size(); ++i) csv << (i > 1 ? "," : "") << header[i];
  csv << '\n';
  for (std::size_t d = 0; d < points.size(); ++d) {
    const auto& p = points[d];
    std::vector<std::string> cells{std::to_string(d)};
    std::vector<double> values = p.direction.weights();
    values.insert(values.end(), p.corner.rates.begin(), p.corner.rates.end());
    values.insert(values.end(), p.corner.distortions.begin(), p.corner.distortions.end());
    values.push_back(p.result.objective);
    for (std::size_t v = 0; v < values.size(); ++v) {
      cells.push_back(fmt_num(values[v]));
      csv << (v ? "," : "") << exact_decimal(values[v]);
    }
    csv << '\n';
    table.row(std::move(cells));
    report.add("trace_point", Record{{"index", d},
                                     {"direction", numbers(p.direction.weights())},
                                     {"perm", perm_json(perm)},
                                     {"rates", numbers(p.corner.rates)},
                                     {"distortions", numbers(p.corner.distortions)},
                                     {"objective", p.result.objective},
                                     {"sweeps", p.result.sweeps_run},
                                     {"channels", channels_to_json(p.result.channels)["channels"]}});
  }
  table.print(out);
  if (!cfg.csv.empty()) {
    std::ofstream f(cfg.csv, std::ios::binary);
    if (!f) throw InputError(InputError::Kind::Usage, cfg.csv + ": cannot write table");
    f << csv.str();
  }
  out << "traced " << points.size() << " directions under perm " << perm_text(perm) << '\n';
  return kExitOk;
}

}  // namespace

int run_command(const Invocation& inv, RunReport& report, std::ostream& out) {
  const auto loaded = load_problem(inv.problem);
  const auto& spec = loaded.spec;
  for (const auto& w : loaded.warnings) {
    report.add("warning", Record{{"message", w}});
    out << "warning: " << w << '\n';
  }
  out << "problem: " << (spec.name.empty() ? inv.problem : spec.name) << " (M=" << spec.M << ", J=" << spec.J
      << ", L=" << spec.L << ")\n";

  const double tol = inv.config.tol.value_or(default_tol(inv));
  if (!(tol >= 0.0)) throw InputError(InputError::Kind::Usage, "--tol must be nonnegative");
  const std::size_t trials = inv.config.trials.value_or(default_trials(inv));

  if (inv.command == "extreme-points") return cmd_extreme_points(spec, inv.config, report, out);
  if (inv.command == "trace") return cmd_trace(spec, inv.config, report, out);
  if (inv.command == "verify") {
    if (inv.suite == "identities") return verify_identities(spec, inv.config, trials, tol, report, out);
    if (inv.suite == "noncrossing") return verify_noncrossing_suite(spec, inv.config, trials, tol, report, out);
    if (inv.suite == "decomposition") return verify_decomposition(spec, inv.config, trials, tol, report, out);
    if (inv.suite == "alphabet-bound") return verify_alphabet(spec, inv.config, trials, tol, report, out);
    throw InputError(InputError::Kind::Usage, "unknown suite '" + inv.suite + "'");
  }
  throw InputError(InputError::Kind::Usage, "unknown command '" + inv.command + "'");
}

int execute(const Invocation& inv, const std::string& out_path, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  const auto& c = inv.config;
  RunReport report;
  Record config{{"command", inv.command}};
  if (inv.command == "verify") config["suite"] = inv.suite;
  config["problem"] = inv.problem;
  config["seed"] = c.seed;
  config["tol"] = c.tol.value_or(default_tol(inv));
  config["grid"] = c.grid;
  config["sweeps"] = c.sweeps;
  config["candidates"] = c.candidates;
  config["restarts"] = c.restarts;
  config["trials"] = c.trials.value_or(default_trials(inv));
  config["budget"] = c.budget;
  if (inv.command == "extreme-points") config["channels"] = c.channels;
  if (inv.command == "trace") {
    config["directions"] = c.directions;
    config["sweep"] = c.sweep;
    config["perm"] = c.perm;
  }
  report.add("config", std::move(config));
  out << "canonical-region " << inv.command << (inv.suite.empty() ? "" : " " + inv.suite) << " (seed " << c.seed
      << ")\n";

  int code = kExitOk;
  auto fail = [&](int exit_code, const std::string& kind, const std::string& message, Record extra = Record::object()) {
    err << "error[" << kind << "]: " << message << '\n';
    Record r{{"kind", kind}, {"message", message}};
    for (auto& [key, value] : extra.items()) r[key] = value;
    report.add("error", std::move(r));
    code = exit_code;
  };
  try {
    code = run_command(inv, report, out);
  } catch (const InputError& e) {
    fail(kExitInput, e.tag(), e.what());
  } catch (const BudgetError& e) {
    fail(kExitBudget, "budget", e.what(), Record{{"estimated_cost", e.estimated_cost()}});
  } catch (const StructuralError& e) {
    fail(kExitInput, "shape", e.what());
  } catch (const std::exception& e) {
    fail(kExitFailure, "internal", e.what());
  }
  report.add("summary", Record{{"command", inv.command}, {"passed", code == kExitOk}, {"exit_code", code}});
  if (!out_path.empty()) {
    try {
      report.write(out_path);
    } catch (const std::exception& e) {
      err << "error[usage]: " << e.what() << '\n';
      if (code == kExitOk) code = kExitInput;
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out << "wall-clock: " << fmt_num(secs, 3) << " s\n";
  return code;
}

}  // namespace canreg::cli

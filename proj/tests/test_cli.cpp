#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "canreg/errors.hpp"
#include "commands.hpp"
#include "fixtures.hpp"
#include "problem_io.hpp"

using namespace canreg;
using namespace canreg::cli;

namespace {

std::string dsbs_with(const std::string& dense) {
  return R"({"M": 2, "J": 0, "L": 1, "alphabets": {"X": [2, 2], "S": 1, "V": 2, "Vhat": [2]},
  "source": {"dense": [)" +
         dense + R"(]},
  "distortion": [[[0, 1], [1, 0]]]})";
}

InputError::Kind kind_of(const std::string& text) {
  try {
    parse_problem(text);
  } catch (const InputError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "accepted: " << text;
  return InputError::Kind::Usage;
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("canreg_test_" + name);
}

struct Run {
  int code;
  std::string out, err, jsonl;
};

Run run(Invocation inv) {
  const auto path = temp_path(inv.command + inv.suite + ".jsonl");
  std::filesystem::remove(path);
  std::ostringstream out, err;
  Run r{execute(inv, path.string(), out, err), out.str(), err.str(), {}};
  std::ifstream f(path, std::ios::binary);
  std::stringstream buf;
  buf << f.rdbuf();
  r.jsonl = buf.str();
  return r;
}

Invocation verify(const std::string& suite, const std::string& problem) {
  Invocation inv;
  inv.command = "verify";
  inv.suite = suite;
  inv.problem = fixtures::problem_path(problem);
  return inv;
}

std::vector<nlohmann::json> records(const std::string& jsonl) {
  std::vector<nlohmann::json> out;
  std::istringstream in(jsonl);
  for (std::string line; std::getline(in, line);) out.push_back(nlohmann::json::parse(line));
  return out;
}

}  // namespace

TEST(ProblemIo, ParseDecimal) {
  auto d = parse_decimal("0.45");
  EXPECT_EQ(static_cast<long long>(d.numerator), 45);
  EXPECT_EQ(d.scale, 2);
  d = parse_decimal("2.5e-3");
  EXPECT_EQ(static_cast<long long>(d.numerator), 25);
  EXPECT_EQ(d.scale, 4);
  d = parse_decimal("1");
  EXPECT_EQ(static_cast<long long>(d.numerator), 1);
  EXPECT_EQ(d.scale, 0);
  d = parse_decimal(".5");
  EXPECT_EQ(static_cast<long long>(d.numerator), 5);
  EXPECT_THROW(parse_decimal("0.4.5"), InputError);
  EXPECT_THROW(parse_decimal("abc"), InputError);
  EXPECT_THROW(parse_decimal(""), InputError);
}

TEST(ProblemIo, FixturesHaveExactMass) {
  const auto dsbs = fixtures::load("dsbs.json");
  EXPECT_EQ(dsbs.source.probs()[0], 0.45);
  EXPECT_EQ(dsbs.source.probs()[3], 0.05);
  const auto helper = cli::load_problem(fixtures::problem_path("helper3.json"));
  EXPECT_TRUE(helper.warnings.empty());
  EXPECT_EQ(helper.spec.J, 1u);
}

TEST(ProblemIo, MassBands) {
  EXPECT_EQ(kind_of(dsbs_with(R"("0.4","0","0","0.05","0","0.05","0.4","0")")), InputError::Kind::Mass);
  EXPECT_EQ(kind_of(dsbs_with(R"("0.45","0","0","0.05","0","0.05","0.45","0.0x")")), InputError::Kind::Parse);
  EXPECT_EQ(kind_of(dsbs_with(R"("0.55","0","0","-0.05","0","0.05","0.45","0")")), InputError::Kind::Mass);
  // Off by 1e-10: normalized silently.
  auto quiet = parse_problem(dsbs_with(R"("0.4500000001","0","0","0.05","0","0.05","0.45","0")"));
  EXPECT_TRUE(quiet.warnings.empty());
  EXPECT_NEAR(std::accumulate(quiet.spec.source.probs().begin(), quiet.spec.source.probs().end(), 0.0), 1.0, 1e-15);
  // Off by 1e-8: normalized with a warning.
  auto loud = parse_problem(dsbs_with(R"("0.45000001","0","0","0.05","0","0.05","0.45","0")"));
  EXPECT_EQ(loud.warnings.size(), 1u);
  EXPECT_NEAR(std::accumulate(loud.spec.source.probs().begin(), loud.spec.source.probs().end(), 0.0), 1.0, 1e-15);
}

TEST(ProblemIo, ParseErrorsCarryPosition) {
  try {
    parse_problem("{\n  \"M\": 2,\n  oops\n}");
    FAIL();
  } catch (const InputError& e) {
    EXPECT_EQ(e.kind(), InputError::Kind::Parse);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(ProblemIo, ShapeErrors) {
  EXPECT_EQ(kind_of(dsbs_with(R"("0.5","0.5")")), InputError::Kind::Shape);
  std::string bad_j = dsbs_with(R"("0.45","0","0","0.05","0","0.05","0.45","0")");
  bad_j.replace(bad_j.find("\"J\": 0"), 6, "\"J\": 3");
  EXPECT_EQ(kind_of(bad_j), InputError::Kind::Shape);
  std::string bad_d = dsbs_with(R"("0.45","0","0","0.05","0","0.05","0.45","0")");
  bad_d.replace(bad_d.find("[[0, 1], [1, 0]]"), 16, "[[0, 1, 2], [1, 0, 2]]");
  EXPECT_EQ(kind_of(bad_d), InputError::Kind::Shape);
}

TEST(ProblemIo, RoundTrip) {
  for (const char* name : {"dsbs.json", "bwz.json", "helper3.json"}) {
    const auto spec = fixtures::load(name);
    const auto path = temp_path(name);
    save_problem(spec, path);
    const auto back = cli::load_problem(path);
    EXPECT_TRUE(back.warnings.empty()) << name;
    EXPECT_EQ(back.spec, spec) << name;
    EXPECT_EQ(dump_problem(back.spec), dump_problem(spec)) << name;
  }
}

TEST(ProblemIo, ExactDecimal) {
  for (double v : {0.1, 1.0 / 3.0, 0.45, 1e-300, 0.0, 1.0}) EXPECT_EQ(std::stod(exact_decimal(v)), v);
}

TEST(ProblemIo, ChannelsRoundTrip) {
  const auto spec = fixtures::load("helper3.json");
  std::mt19937_64 rng(1);
  const auto channels = random_channels(spec, rng);
  EXPECT_EQ(channels_from_json(spec, channels_to_json(channels)), channels);
  EXPECT_THROW(channels_from_json(spec, nlohmann::json{{"channels", nlohmann::json::array()}}), InputError);
}

TEST(Execute, ExitCodes) {
  auto ok = verify("decomposition", "dsbs.json");
  ok.config.trials = 5;
  EXPECT_EQ(run(ok).code, kExitOk);

  auto strict = ok;
  strict.config.tol = 0.0;
  strict.config.trials = 50;
  strict.problem = fixtures::problem_path("helper3.json");
  const auto failed = run(strict);
  EXPECT_EQ(failed.code, kExitFailure);
  bool counterexample = false;
  for (const auto& r : records(failed.jsonl)) counterexample |= r["record"] == "counterexample";
  EXPECT_TRUE(counterexample);

  auto missing = ok;
  missing.problem = fixtures::problem_path("does-not-exist.json");
  const auto input = run(missing);
  EXPECT_EQ(input.code, kExitInput);
  EXPECT_NE(input.err.find("error[parse]"), std::string::npos);

  auto budget = verify("alphabet-bound", "dsbs.json");
  budget.config.budget = 10;
  budget.config.trials = 1;
  const auto refused = run(budget);
  EXPECT_EQ(refused.code, kExitBudget);
  const auto recs = records(refused.jsonl);
  ASSERT_GE(recs.size(), 2u);
  EXPECT_EQ(recs[recs.size() - 2]["record"], "error");
  EXPECT_EQ(recs[recs.size() - 2]["kind"], "budget");
  EXPECT_GT(recs[recs.size() - 2]["estimated_cost"].get<double>(), 10.0);
}

TEST(Execute, TraceInputErrors) {
  Invocation inv;
  inv.command = "trace";
  inv.problem = fixtures::problem_path("helper3.json");
  EXPECT_EQ(run(inv).code, kExitInput);  // no directions given
  inv.config.sweep = "R1,D1:5";          // R1 is lossless here
  const auto r = run(inv);
  EXPECT_EQ(r.code, kExitInput);
  EXPECT_NE(r.err.find("error[shape]"), std::string::npos);
}

TEST(Execute, RecordsAreDeterministic) {
  auto inv = verify("identities", "helper3.json");
  inv.config.trials = 20;
  const auto a = run(inv);
  const auto b = run(inv);
  EXPECT_EQ(a.code, kExitOk);
  EXPECT_EQ(a.jsonl, b.jsonl);
  EXPECT_FALSE(a.jsonl.empty());
}

TEST(Execute, RecordFieldNames) {
  Invocation inv;
  inv.command = "extreme-points";
  inv.problem = fixtures::problem_path("helper3.json");
  const auto recs = records(run(inv).jsonl);
  ASSERT_GE(recs.size(), 9u);
  EXPECT_EQ(recs.front()["record"], "config");
  EXPECT_EQ(recs.back()["record"], "summary");
  for (const char* key : {"command", "passed", "exit_code"}) EXPECT_TRUE(recs.back().contains(key)) << key;
  std::size_t corners = 0;
  for (const auto& r : recs) {
    if (r["record"] != "corner") continue;
    ++corners;
    for (const char* key : {"perm", "rates", "sum_rate", "member", "active", "chain"}) EXPECT_TRUE(r.contains(key)) << key;
  }
  EXPECT_EQ(corners, 6u);

  Invocation trace;
  trace.command = "trace";
  trace.problem = fixtures::problem_path("bwz.json");
  trace.config.sweep = "R1,D1:3";
  trace.config.restarts = 2;
  const auto t = records(run(trace).jsonl);
  std::size_t points = 0;
  for (const auto& r : t) {
    if (r["record"] != "trace_point") continue;
    ++points;
    for (const char* key : {"index", "direction", "perm", "rates", "distortions", "objective", "sweeps", "channels"})
      EXPECT_TRUE(r.contains(key)) << key;
  }
  EXPECT_EQ(points, 3u);
}

#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "canreg/augmentation.hpp"

namespace canreg::cli {

/// Rejected input. Every kind maps to exit code 2; the kind tag tells them
/// apart in messages.
class InputError : public std::runtime_error {
 public:
  enum class Kind { Parse, Mass, Shape, Usage };

  InputError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }
  std::string tag() const;

 private:
  Kind kind_;
};

struct LoadedProblem {
  ProblemSpec spec;
  std::vector<std::string> warnings;
};

/// Exact value of a decimal literal such as "0.45", "1", ".5" or "2.5e-3",
/// as numerator / 10^scale. Throws InputError(Parse).
struct Decimal {
  __int128 numerator = 0;
  int scale = 0;
};
Decimal parse_decimal(const std::string& text);

LoadedProblem parse_problem(const std::string& text, const std::string& origin = "<input>");
LoadedProblem load_problem(const std::filesystem::path& path);

nlohmann::ordered_json problem_to_json(const ProblemSpec& spec);
std::string dump_problem(const ProblemSpec& spec);
void save_problem(const ProblemSpec& spec, const std::filesystem::path& path);

/// {"channels": [[[q(z|x) ...] per x] per k >= J]}.
nlohmann::ordered_json channels_to_json(const ChannelSet& channels);
ChannelSet channels_from_json(const ProblemSpec& spec, const nlohmann::json& doc);
ChannelSet load_channels(const ProblemSpec& spec, const std::filesystem::path& path);

/// Shortest decimal string that reads back as the same double.
std::string exact_decimal(double value);

}  // namespace canreg::cli

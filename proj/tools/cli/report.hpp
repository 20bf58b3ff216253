#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace canreg::cli {

using Record = nlohmann::ordered_json;

/// Machine-readable records (one JSON object per line, written to --out)
/// plus the human-readable text printed to stdout. Records never carry
/// timing, so identical runs give identical record files.
class RunReport {
 public:
  /// Adds {"record": kind, ...fields}.
  void add(const std::string& kind, Record fields);
  const std::vector<Record>& records() const { return records_; }

  std::string jsonl() const;
  void write(const std::filesystem::path& path) const;

 private:
  std::vector<Record> records_;
};

/// Fixed-width plain-text table.
class TextTable {
 public:
  explicit TextTable(std::vector<std::string> header) : header_(std::move(header)) {}
  void row(std::vector<std::string> cells) { rows_.push_back(std::move(cells)); }
  void print(std::ostream& os) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

std::string fmt_num(double v, int precision = 6);

}  // namespace canreg::cli

#include "problem_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "canreg/errors.hpp"

namespace canreg::cli {

namespace {

using json = nlohmann::json;

constexpr int kMaxScale = 34;

[[noreturn]] void parse_error(const std::string& origin, const std::string& what) {
  throw InputError(InputError::Kind::Parse, origin + ": " + what);
}
[[noreturn]] void shape_error(const std::string& origin, const std::string& what) {
  throw InputError(InputError::Kind::Shape, origin + ": " + what);
}

__int128 pow10(int n) {
  __int128 v = 1;
  for (int i = 0; i < n; ++i) v *= 10;
  return v;
}

const json& field(const json& obj, const char* key, const std::string& origin, const std::string& path = "") {
  if (!obj.is_object() || !obj.contains(key)) parse_error(origin, "missing field '" + path + key + "'");
  return obj.at(key);
}

std::size_t count_field(const json& v, const std::string& origin, const std::string& name, bool allow_zero) {
  if (!v.is_number_integer() || v.get<long long>() < (allow_zero ? 0 : 1)) {
    parse_error(origin, "field '" + name + "' must be " + (allow_zero ? "a nonnegative" : "a positive") + " integer");
  }
  return v.get<std::size_t>();
}

std::vector<std::size_t> size_list(const json& v, const std::string& origin, const std::string& name) {
  if (!v.is_array()) parse_error(origin, "field '" + name + "' must be an array of alphabet sizes");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(count_field(v[i], origin, name + "[" + std::to_string(i) + "]", false));
  }
  return out;
}

std::string line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t column = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

std::size_t flat_index(const std::vector<std::size_t>& shape, const std::vector<std::size_t>& coord) {
  std::size_t index = 0;
  for (std::size_t i = 0; i < shape.size(); ++i) index = index * shape[i] + coord[i];
  return index;
}

}  // namespace

std::string InputError::tag() const {
  switch (kind_) {
    case Kind::Parse: return "parse";
    case Kind::Mass: return "mass";
    case Kind::Shape: return "shape";
    case Kind::Usage: return "usage";
  }
  return "input";
}

Decimal parse_decimal(const std::string& text) {
  auto fail = [&]() -> Decimal {
    throw InputError(InputError::Kind::Parse, "'" + text + "' is not a decimal literal");
  };
  std::size_t i = 0;
  bool negative = false;
  if (i < text.size() && (text[i] == '+' || text[i] == '-')) negative = text[i++] == '-';
  Decimal d;
  int digits = 0;
  bool any = false;
  bool point = false;
  for (; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '.') {
      if (point) return fail();
      point = true;
      continue;
    }
    if (c < '0' || c > '9') break;
    any = true;
    if (d.numerator != 0 || c != '0') ++digits;
    if (digits > 36) return fail();
    d.numerator = d.numerator * 10 + (c - '0');
    if (point) ++d.scale;
  }
  if (!any) return fail();
  if (i < text.size()) {
    if (text[i] != 'e' && text[i] != 'E') return fail();
    int exponent = 0;
    const char* first = text.data() + i + 1;
    const char* last = text.data() + text.size();
    if (first < last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, exponent);
    if (ec != std::errc() || ptr != last) return fail();
    d.scale -= exponent;
  }
  if (d.scale < 0) {
    if (digits - d.scale > 36) return fail();
    d.numerator *= pow10(-d.scale);
    d.scale = 0;
  }
  if (d.scale > kMaxScale) return fail();
  if (negative) d.numerator = -d.numerator;
  return d;
}

std::string exact_decimal(double value) {
  char buf[512];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::fixed);
  if (ec != std::errc()) throw std::runtime_error("exact_decimal: formatting failed");
  return std::string(buf, ptr);
}

LoadedProblem parse_problem(const std::string& text, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    parse_error(origin, "malformed JSON at " + line_column(text, e.byte == 0 ? 0 : e.byte - 1));
  }
  if (!doc.is_object()) parse_error(origin, "top level must be an object");

  LoadedProblem out;
  ProblemSpec& spec = out.spec;
  if (doc.contains("name")) {
    if (!doc["name"].is_string()) parse_error(origin, "field 'name' must be a string");
    spec.name = doc["name"].get<std::string>();
  }
  if (doc.contains("notes")) {
    if (!doc["notes"].is_string()) parse_error(origin, "field 'notes' must be a string");
    spec.notes = doc["notes"].get<std::string>();
  }
  spec.M = count_field(field(doc, "M", origin), origin, "M", false);
  spec.J = count_field(field(doc, "J", origin), origin, "J", true);
  spec.L = count_field(field(doc, "L", origin), origin, "L", true);
  if (spec.J > spec.M) shape_error(origin, "J exceeds M");
  if (spec.M > 16) shape_error(origin, "at most 16 sources are supported");

  const json& alph = field(doc, "alphabets", origin);
  const auto xs = size_list(field(alph, "X", origin, "alphabets."), origin, "alphabets.X");
  const std::size_t s_size = count_field(field(alph, "S", origin, "alphabets."), origin, "alphabets.S", false);
  const std::size_t v_size = count_field(field(alph, "V", origin, "alphabets."), origin, "alphabets.V", false);
  const auto vhats = size_list(field(alph, "Vhat", origin, "alphabets."), origin, "alphabets.Vhat");
  if (xs.size() != spec.M) {
    shape_error(origin, "alphabets.X lists " + std::to_string(xs.size()) + " sizes but M = " + std::to_string(spec.M));
  }
  if (vhats.size() != spec.L) {
    shape_error(origin, "alphabets.Vhat lists " + std::to_string(vhats.size()) + " sizes but L = " +
                            std::to_string(spec.L));
  }
  for (std::size_t i = 0; i < xs.size(); ++i) spec.x_alphabets.push_back({"X" + std::to_string(i + 1), xs[i]});
  spec.s_alphabet = {"S", s_size};
  spec.v_alphabet = {"V", v_size};
  for (std::size_t l = 0; l < vhats.size(); ++l) spec.vhat_alphabets.push_back({"Vhat" + std::to_string(l + 1), vhats[l]});

  // Source pmf over (X_1..X_M, S, V), row-major.
  std::vector<std::size_t> shape(xs);
  shape.push_back(s_size);
  shape.push_back(v_size);
  std::size_t cells = 1;
  for (auto n : shape) {
    if (cells > (std::size_t{1} << 26) / n) shape_error(origin, "source pmf has too many cells");
    cells *= n;
  }
  std::vector<Decimal> mass(cells);
  std::vector<std::string> literal(cells, "0");
  auto read_probability = [&](const json& v, const std::string& where) {
    if (!v.is_string()) parse_error(origin, where + ": probabilities must be decimal strings");
    Decimal d;
    try {
      d = parse_decimal(v.get<std::string>());
    } catch (const InputError& e) {
      parse_error(origin, where + ": " + e.what());
    }
    if (d.numerator < 0) throw InputError(InputError::Kind::Mass, origin + ": " + where + ": negative probability");
    return d;
  };
  const json& source = field(doc, "source", origin);
  if (source.contains("dense") == source.contains("entries")) {
    parse_error(origin, "source must have exactly one of 'dense' or 'entries'");
  }
  if (source.contains("dense")) {
    const json& dense = source["dense"];
    if (!dense.is_array()) parse_error(origin, "source.dense must be an array");
    if (dense.size() != cells) {
      shape_error(origin, "source.dense has " + std::to_string(dense.size()) + " entries, expected " +
                              std::to_string(cells));
    }
    for (std::size_t c = 0; c < cells; ++c) {
      mass[c] = read_probability(dense[c], "source.dense[" + std::to_string(c) + "]");
      literal[c] = dense[c].get<std::string>();
    }
  } else {
    const json& entries = source["entries"];
    if (!entries.is_array()) parse_error(origin, "source.entries must be an array");
    std::vector<bool> seen(cells, false);
    for (std::size_t e = 0; e < entries.size(); ++e) {
      const std::string where = "source.entries[" + std::to_string(e) + "]";
      const json& entry = entries[e];
      if (!entry.is_object()) parse_error(origin, where + " must be an object");
      std::vector<std::size_t> coord;
      const json& x = field(entry, "x", origin, where + ".");
      if (!x.is_array()) parse_error(origin, where + ".x must be an array");
      if (x.size() != spec.M) shape_error(origin, where + ".x must list one symbol per source");
      for (const auto& sym : x) coord.push_back(count_field(sym, origin, where + ".x", true));
      coord.push_back(entry.contains("s") ? count_field(entry["s"], origin, where + ".s", true) : 0);
      coord.push_back(count_field(field(entry, "v", origin, where + "."), origin, where + ".v", true));
      for (std::size_t i = 0; i < shape.size(); ++i) {
        if (coord[i] >= shape[i]) shape_error(origin, where + ": symbol out of range");
      }
      const std::size_t c = flat_index(shape, coord);
      if (seen[c]) shape_error(origin, where + ": duplicate symbol tuple");
      seen[c] = true;
      mass[c] = read_probability(field(entry, "p", origin, where + "."), where + ".p");
      literal[c] = entry["p"].get<std::string>();
    }
  }

  // Exact total at a common scale.
  int scale = 0;
  for (const auto& d : mass) scale = std::max(scale, d.scale);
  const __int128 unit = pow10(scale);
  __int128 total = 0;
  for (const auto& d : mass) {
    total += d.numerator * pow10(scale - d.scale);
    if (total > unit * 2) throw InputError(InputError::Kind::Mass, origin + ": probabilities sum to more than 2");
  }
  const __int128 excess = total > unit ? total - unit : unit - total;
  const long double deviation = static_cast<long double>(excess) / static_cast<long double>(unit);
  const long double sum = static_cast<long double>(total) / static_cast<long double>(unit);
  if (deviation > 1e-6L) {
    std::ostringstream os;
    os.precision(12);
    os << origin << ": probabilities sum to " << static_cast<double>(sum) << ", not 1";
    throw InputError(InputError::Kind::Mass, os.str());
  }
  std::vector<double> probs(cells, 0.0);
  if (deviation <= 1e-12L) {
    // Already a pmf at double precision; nearest doubles of the literals.
    for (std::size_t c = 0; c < cells; ++c) probs[c] = std::strtod(literal[c].c_str(), nullptr);
  } else {
    for (std::size_t c = 0; c < cells; ++c) {
      const __int128 n = mass[c].numerator * pow10(scale - mass[c].scale);
      probs[c] = static_cast<double>(static_cast<long double>(n) / static_cast<long double>(total));
    }
    if (deviation > 1e-9L) {
      std::ostringstream os;
      os.precision(12);
      os << "probabilities sum to " << static_cast<double>(sum) << "; renormalized";
      out.warnings.push_back(os.str());
    }
  }

  try {
    spec.source = JointPmf(source_axes(spec.x_alphabets, spec.s_alphabet, spec.v_alphabet), probs);
  } catch (const StructuralError& e) {
    shape_error(origin, e.what());
  }

  const json& dist = field(doc, "distortion", origin);
  if (!dist.is_array()) parse_error(origin, "field 'distortion' must be an array of tables");
  if (dist.size() != spec.L) {
    shape_error(origin, "distortion lists " + std::to_string(dist.size()) + " tables but L = " + std::to_string(spec.L));
  }
  for (std::size_t l = 0; l < spec.L; ++l) {
    const std::string where = "distortion[" + std::to_string(l) + "]";
    const json& table = dist[l];
    if (!table.is_array()) parse_error(origin, where + " must be an array of rows");
    if (table.size() != v_size) shape_error(origin, where + " must have |V| = " + std::to_string(v_size) + " rows");
    DistortionTable d;
    d.rows = v_size;
    d.cols = vhats[l];
    for (std::size_t v = 0; v < v_size; ++v) {
      const json& row = table[v];
      if (!row.is_array()) parse_error(origin, where + " rows must be arrays");
      if (row.size() != d.cols) {
        shape_error(origin, where + " row " + std::to_string(v) + " must have |Vhat| = " + std::to_string(d.cols) +
                                " entries");
      }
      for (const auto& cell : row) {
        if (!cell.is_number()) parse_error(origin, where + " entries must be numbers");
        const double value = cell.get<double>();
        if (!(value >= 0.0) || !std::isfinite(value)) shape_error(origin, where + " entries must be finite and >= 0");
        d.values.push_back(value);
      }
    }
    spec.distortions.push_back(std::move(d));
  }

  try {
    spec.validate();
  } catch (const StructuralError& e) {
    shape_error(origin, e.what());
  }
  for (auto& w : spec.degeneracy_warnings()) out.warnings.push_back(std::move(w));
  return out;
}

LoadedProblem load_problem(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(InputError::Kind::Parse, path.string() + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_problem(buf.str(), path.string());
}

nlohmann::ordered_json problem_to_json(const ProblemSpec& spec) {
  nlohmann::ordered_json doc;
  if (!spec.name.empty()) doc["name"] = spec.name;
  if (!spec.notes.empty()) doc["notes"] = spec.notes;
  doc["M"] = spec.M;
  doc["J"] = spec.J;
  doc["L"] = spec.L;
  auto& alph = doc["alphabets"];
  alph["X"] = nlohmann::ordered_json::array();
  for (const auto& a : spec.x_alphabets) alph["X"].push_back(a.size);
  alph["S"] = spec.s_alphabet.size;
  alph["V"] = spec.v_alphabet.size;
  alph["Vhat"] = nlohmann::ordered_json::array();
  for (const auto& a : spec.vhat_alphabets) alph["Vhat"].push_back(a.size);
  auto& dense = doc["source"]["dense"];
  dense = nlohmann::ordered_json::array();
  for (double p : spec.source.probs()) dense.push_back(exact_decimal(p));
  doc["distortion"] = nlohmann::ordered_json::array();
  for (const auto& d : spec.distortions) {
    nlohmann::ordered_json table = nlohmann::ordered_json::array();
    for (std::size_t v = 0; v < d.rows; ++v) {
      nlohmann::ordered_json row = nlohmann::ordered_json::array();
      for (std::size_t vhat = 0; vhat < d.cols; ++vhat) row.push_back(d(v, vhat));
      table.push_back(std::move(row));
    }
    doc["distortion"].push_back(std::move(table));
  }
  return doc;
}

std::string dump_problem(const ProblemSpec& spec) { return problem_to_json(spec).dump(2) + "\n"; }

void save_problem(const ProblemSpec& spec, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path.string() + ": cannot write file");
  out << dump_problem(spec);
}

nlohmann::ordered_json channels_to_json(const ChannelSet& channels) {
  nlohmann::ordered_json doc;
  doc["channels"] = nlohmann::ordered_json::array();
  for (const auto& q : channels) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (std::size_t x = 0; x < q.inputs; ++x) {
      nlohmann::ordered_json row = nlohmann::ordered_json::array();
      for (std::size_t z = 0; z < q.outputs; ++z) row.push_back(q(x, z));
      rows.push_back(std::move(row));
    }
    doc["channels"].push_back(std::move(rows));
  }
  return doc;
}

ChannelSet channels_from_json(const ProblemSpec& spec, const nlohmann::json& doc) {
  const std::string origin = "channels";
  const json& list = field(doc, "channels", origin);
  if (!list.is_array()) parse_error(origin, "'channels' must be an array");
  if (list.size() != spec.M - spec.J) {
    shape_error(origin, "expected " + std::to_string(spec.M - spec.J) + " channels, one per source k > J");
  }
  ChannelSet out;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::size_t k = spec.J + i;
    const json& rows = list[i];
    if (!rows.is_array() || rows.size() != spec.x_alphabets[k].size) {
      shape_error(origin, "channel " + std::to_string(i) + " must have one row per symbol of X" + std::to_string(k + 1));
    }
    Channel q;
    q.inputs = rows.size();
    for (std::size_t x = 0; x < rows.size(); ++x) {
      if (!rows[x].is_array() || rows[x].empty()) parse_error(origin, "channel rows must be nonempty arrays");
      if (x == 0) q.outputs = rows[x].size();
      if (rows[x].size() != q.outputs) shape_error(origin, "channel " + std::to_string(i) + " rows differ in length");
      for (const auto& cell : rows[x]) {
        if (!cell.is_number()) parse_error(origin, "channel entries must be numbers");
        q.rows.push_back(cell.get<double>());
      }
    }
    try {
      q.validate();
    } catch (const StructuralError& e) {
      throw InputError(InputError::Kind::Mass, origin + ": " + e.what());
    }
    out.push_back(std::move(q));
  }
  return out;
}

ChannelSet load_channels(const ProblemSpec& spec, const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(InputError::Kind::Parse, path.string() + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  json doc;
  try {
    doc = json::parse(buf.str());
  } catch (const json::parse_error& e) {
    throw InputError(InputError::Kind::Parse,
                     path.string() + ": malformed JSON at " + line_column(buf.str(), e.byte == 0 ? 0 : e.byte - 1));
  }
  return channels_from_json(spec, doc);
}

}  // namespace canreg::cli

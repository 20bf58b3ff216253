#include "canreg/pmf.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "canreg/errors.hpp"

namespace canreg {

VarSet VarSet::of(std::initializer_list<std::size_t> axes) {
  std::uint64_t bits = 0;
  for (auto a : axes) {
    if (a >= 64) throw StructuralError("VarSet: axis position out of range");
    bits |= std::uint64_t{1} << a;
  }
  return VarSet(bits);
}

VarSet VarSet::range(std::size_t first, std::size_t last) {
  std::uint64_t bits = 0;
  for (auto a = first; a < last; ++a) bits |= std::uint64_t{1} << a;
  return VarSet(bits);
}

std::vector<std::size_t> VarSet::members() const {
  std::vector<std::size_t> out;
  out.reserve(count());
  for (auto b = bits_; b != 0; b &= b - 1) out.push_back(static_cast<std::size_t>(std::countr_zero(b)));
  return out;
}

std::string VarSet::to_string() const {
  std::ostringstream os;
  os << '{';
  bool first = true;
  for (auto m : members()) {
    if (!first) os << ',';
    os << m;
    first = false;
  }
  os << '}';
  return os.str();
}

namespace {

std::vector<std::size_t> row_major_strides(const std::vector<Axis>& axes) {
  std::vector<std::size_t> strides(axes.size(), 1);
  for (std::size_t i = axes.size(); i-- > 1;) strides[i - 1] = strides[i] * axes[i].alphabet.size;
  return strides;
}

void require_axes(const JointPmf& p, VarSet s, const char* what) {
  if (!s.subset_of(p.all())) {
    throw StructuralError(std::string(what) + ": variable set " + s.to_string() + " names axes outside rank " +
                          std::to_string(p.rank()));
  }
}

}  // namespace

JointPmf::JointPmf() : probs_{1.0} {}

JointPmf::JointPmf(std::vector<Axis> axes, std::vector<double> probs)
    : axes_(std::move(axes)), probs_(std::move(probs)) {
  if (axes_.size() > 63) throw StructuralError("JointPmf: too many axes");
  std::size_t cells = 1;
  for (std::size_t i = 0; i < axes_.size(); ++i) {
    if (axes_[i].alphabet.size == 0) throw StructuralError("JointPmf: empty alphabet on axis " + std::to_string(i));
    for (std::size_t j = 0; j < i; ++j) {
      if (axes_[j].id == axes_[i].id) throw StructuralError("JointPmf: duplicate axis id");
    }
    cells *= axes_[i].alphabet.size;
  }
  if (cells != probs_.size()) {
    throw StructuralError("JointPmf: tensor has " + std::to_string(probs_.size()) + " cells, shape needs " +
                          std::to_string(cells));
  }
  double total = 0.0;
  for (double v : probs_) {
    if (!(v >= 0.0)) throw StructuralError("JointPmf: negative or NaN cell");
    total += v;
  }
  if (std::abs(total - 1.0) > kMassTolerance) {
    throw NumericError("JointPmf: total mass " + std::to_string(total) + " is not 1");
  }
  strides_ = row_major_strides(axes_);
}

std::size_t JointPmf::position_of(int id) const {
  for (std::size_t i = 0; i < axes_.size(); ++i) {
    if (axes_[i].id == id) return i;
  }
  throw StructuralError("JointPmf: unknown axis id " + std::to_string(id));
}

VarSet JointPmf::set_of(std::initializer_list<int> ids) const {
  VarSet s;
  for (int id : ids) s = s | VarSet::single(position_of(id));
  return s;
}

double JointPmf::at(std::span<const std::size_t> index) const {
  if (index.size() != rank()) throw StructuralError("JointPmf::at: index rank mismatch");
  std::size_t cell = 0;
  for (std::size_t i = 0; i < index.size(); ++i) {
    if (index[i] >= extent(i)) throw StructuralError("JointPmf::at: index out of range");
    cell += index[i] * strides_[i];
  }
  return probs_[cell];
}

GroupedTable group_axes(const JointPmf& p, std::span<const VarSet> groups) {
  VarSet seen;
  for (auto g : groups) {
    require_axes(p, g, "group_axes");
    if (!g.disjoint(seen)) throw StructuralError("group_axes: groups overlap");
    seen = seen | g;
  }

  // Output stride contributed by each input axis (0 for summed axes).
  const std::size_t rank = p.rank();
  std::vector<std::size_t> out_stride(rank, 0);
  GroupedTable table;
  table.group_sizes.assign(groups.size(), 1);
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    for (auto pos : groups[gi].members()) table.group_sizes[gi] *= p.extent(pos);
  }
  std::size_t outer = 1;
  for (std::size_t gi = groups.size(); gi-- > 0;) {
    auto members = groups[gi].members();
    std::size_t inner = 1;
    for (std::size_t m = members.size(); m-- > 0;) {
      out_stride[members[m]] = outer * inner;
      inner *= p.extent(members[m]);
    }
    outer *= inner;
  }
  table.values.assign(outer, 0.0);

  std::vector<std::size_t> idx(rank, 0);
  std::size_t out = 0;
  const auto& probs = p.probs();
  for (std::size_t cell = 0; cell < probs.size(); ++cell) {
    table.values[out] += probs[cell];
    for (std::size_t a = rank; a-- > 0;) {
      if (++idx[a] < p.extent(a)) {
        out += out_stride[a];
        break;
      }
      out -= out_stride[a] * (p.extent(a) - 1);
      idx[a] = 0;
    }
  }
  return table;
}

JointPmf marginalize(const JointPmf& p, VarSet keep) {
  require_axes(p, keep, "marginalize");
  if (keep.empty()) return JointPmf();
  const VarSet groups[] = {keep};
  auto table = group_axes(p, groups);
  std::vector<Axis> axes;
  for (auto pos : keep.members()) axes.push_back(p.axes()[pos]);
  return JointPmf(std::move(axes), std::move(table.values));
}

double shannon_entropy(std::span<const double> dist) {
  double h = 0.0;
  for (double v : dist) {
    if (v > 0.0) h -= v * std::log2(v);
  }
  return h;
}

double joint_entropy(const JointPmf& p, VarSet vars) {
  require_axes(p, vars, "joint_entropy");
  if (vars.empty()) return 0.0;
  if (vars == p.all()) return shannon_entropy(p.probs());
  const VarSet groups[] = {vars};
  return shannon_entropy(group_axes(p, groups).values);
}

double entropy(const JointPmf& p, VarSet of, VarSet given) {
  require_axes(p, of | given, "entropy");
  if (of.empty()) throw StructuralError("entropy: target set is empty");
  if (!of.disjoint(given)) throw StructuralError("entropy: target and conditioning sets overlap");
  return joint_entropy(p, of | given) - joint_entropy(p, given);
}

double cmi(const JointPmf& p, VarSet a, VarSet b, VarSet given) {
  require_axes(p, a | b | given, "cmi");
  if (a.empty() || b.empty()) throw StructuralError("cmi: empty argument set");
  if (!a.disjoint(b) || !a.disjoint(given) || !b.disjoint(given)) {
    throw StructuralError("cmi: argument sets must be pairwise disjoint");
  }
  const double value =
      joint_entropy(p, a | given) + joint_entropy(p, b | given) - joint_entropy(p, a | b | given) - joint_entropy(p, given);
  if (value < -kCmiClamp) {
    throw NumericError("cmi: conditional mutual information " + std::to_string(value) + " is negative");
  }
  return value < 0.0 ? 0.0 : value;
}

bool is_markov(const JointPmf& p, VarSet a, VarSet mid, VarSet b, double tol) {
  return cmi(p, a, b, mid) <= tol;
}

}  // namespace canreg

#include "canreg/direction.hpp"

#include <cmath>
#include <sstream>

#include "canreg/errors.hpp"

namespace canreg {

Direction::Direction(const ProblemSpec& spec, std::vector<double> weights)
    : sources_(spec.M), weights_(std::move(weights)) {
  if (weights_.size() != spec.M + spec.L) {
    throw StructuralError("direction: expected " + std::to_string(spec.M + spec.L) + " weights, got " +
                          std::to_string(weights_.size()));
  }
  double norm2 = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    if (!(weights_[i] >= 0.0)) throw StructuralError("direction: weight " + std::to_string(i + 1) + " is negative");
    if (i < spec.J && weights_[i] != 0.0) {
      throw StructuralError("direction: weights of losslessly coded sources must be zero");
    }
    norm2 += weights_[i] * weights_[i];
  }
  if (std::abs(std::sqrt(norm2) - 1.0) > 1e-12) throw StructuralError("direction: weights must have unit norm");
}

Direction Direction::normalized(const ProblemSpec& spec, std::vector<double> raw) {
  double norm2 = 0.0;
  for (double w : raw) norm2 += w * w;
  if (!(norm2 > 0.0)) throw StructuralError("direction: all weights are zero");
  const double norm = std::sqrt(norm2);
  for (double& w : raw) w /= norm;
  return Direction(spec, std::move(raw));
}

Direction Direction::random(const ProblemSpec& spec, std::mt19937_64& rng) {
  if (spec.J == spec.M && spec.L == 0) throw StructuralError("direction: no admissible coordinates");
  std::normal_distribution<double> gauss(0.0, 1.0);
  while (true) {
    std::vector<double> raw(spec.M + spec.L, 0.0);
    double norm2 = 0.0;
    for (std::size_t i = spec.J; i < raw.size(); ++i) {
      raw[i] = std::abs(gauss(rng));
      norm2 += raw[i] * raw[i];
    }
    if (norm2 > 1e-24) return normalized(spec, std::move(raw));
  }
}

double Direction::dot(const std::vector<double>& rates, const std::vector<double>& distortions) const {
  if (rates.size() != sources_ || distortions.size() != weights_.size() - sources_) {
    throw StructuralError("direction: point has the wrong dimension");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < sources_; ++i) total += weights_[i] * rates[i];
  for (std::size_t l = 0; l < distortions.size(); ++l) total += weights_[sources_ + l] * distortions[l];
  return total;
}

std::string Direction::to_string() const {
  std::ostringstream os;
  os.precision(6);
  os << '[';
  for (std::size_t i = 0; i < weights_.size(); ++i) os << (i ? ", " : "") << weights_[i];
  os << ']';
  return os.str();
}

}  // namespace canreg

#include "oldroyd/memory.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace oldroyd {

ModelParams::ModelParams(double mu, double gamma, double delta)
    : mu_(mu), gamma_(gamma), delta_(delta) {
  if (!(mu > 0.0) || !(delta > 0.0) || !(gamma >= 0.0) || !std::isfinite(mu) ||
      !std::isfinite(gamma) || !std::isfinite(delta)) {
    throw std::invalid_argument("ModelParams: need mu > 0, gamma >= 0, delta > 0 (got mu=" +
                                std::to_string(mu) + ", gamma=" + std::to_string(gamma) +
                                ", delta=" + std::to_string(delta) + ")");
  }
}

double ModelParams::kernel(double t) const {
  if (t < 0.0) throw std::invalid_argument("kernel: negative elapsed time " + std::to_string(t));
  return gamma_ * std::exp(-delta_ * t);
}

MemoryAccumulator::MemoryAccumulator(std::size_t size, double k, double gamma, double delta)
    : value_(size, 0.0), k_(k), gamma_(gamma), decay_(std::exp(-delta * k)) {
  if (!(k > 0.0)) throw std::invalid_argument("MemoryAccumulator: time step must be positive");
}

void MemoryAccumulator::update(std::span<const double> u_new) {
  if (u_new.size() != value_.size()) {
    throw std::invalid_argument("MemoryAccumulator::update: layout mismatch (" +
                                std::to_string(u_new.size()) + " vs " +
                                std::to_string(value_.size()) + ")");
  }
  const double w = k_ * gamma_;
  for (std::size_t i = 0; i < value_.size(); ++i) value_[i] = w * u_new[i] + decay_ * value_[i];
  ++updates_;
}

Vector direct_quadrature(std::span<const Vector> history, double k, double gamma, double delta) {
  if (history.empty()) throw std::invalid_argument("direct_quadrature: empty history");
  const std::size_t n = history.size();
  Vector out(history.front().size(), 0.0);
  for (std::size_t j = 1; j <= n; ++j) {
    const Vector& phi = history[j - 1];
    if (phi.size() != out.size()) throw std::invalid_argument("direct_quadrature: ragged history");
    const double w = k * gamma * std::exp(-delta * k * static_cast<double>(n - j));
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += w * phi[i];
  }
  return out;
}

TimeProfile parse_time_profile(std::string_view name) {
  if (name == "exp") return TimeProfile::Exp;
  if (name == "cos") return TimeProfile::Cos;
  throw std::invalid_argument("unknown time profile '" + std::string(name) + "'");
}

double convolution_profile(TimeProfile profile, double gamma, double delta, double t) {
  if (t < 0.0) throw std::invalid_argument("convolution_profile: negative time");
  switch (profile) {
    case TimeProfile::Exp:
      return gamma * (std::exp(t) - std::exp(-delta * t)) / (1.0 + delta);
    case TimeProfile::Cos:
      return gamma * (delta * std::cos(t) + std::sin(t) - delta * std::exp(-delta * t)) /
             (1.0 + delta * delta);
  }
  throw std::invalid_argument("convolution_profile: unknown profile");
}

}  // namespace oldroyd

#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "oldroyd/types.hpp"

namespace oldroyd {

/// Coefficients of the model with memory kernel beta(t) = gamma exp(-delta t).
/// gamma = 0 is accepted and recovers Navier-Stokes.
class ModelParams {
 public:
  ModelParams(double mu, double gamma, double delta);

  double mu() const { return mu_; }
  double gamma() const { return gamma_; }
  double delta() const { return delta_; }
  /// Long-time effective viscosity mu + gamma/delta.
  double nu() const { return mu_ + gamma_ / delta_; }

  double kernel(double t) const;

 private:
  double mu_;
  double gamma_;
  double delta_;
};

/// Running right-rectangle memory term
///   U_beta^n = k sum_{j=1..n} gamma exp(-delta (t_n - t_j)) U^j,
/// updated by U_beta^n = k gamma U^n + exp(-delta k) U_beta^{n-1}.
class MemoryAccumulator {
 public:
  MemoryAccumulator(std::size_t size, double k, double gamma, double delta);

  void update(std::span<const double> u_new);

  const Vector& value() const { return value_; }
  double step() const { return k_; }
  /// exp(-delta k): weight of the previous accumulator in the next update.
  double decay() const { return decay_; }
  /// k gamma: weight of the newest velocity.
  double newest_weight() const { return k_ * gamma_; }
  int updates() const { return updates_; }

 private:
  Vector value_;
  double k_;
  double gamma_;
  double decay_;
  int updates_ = 0;
};

/// Direct evaluation of k sum_j beta(t_n - t_j) phi^j for history
/// phi^1..phi^n (n = history.size()).
Vector direct_quadrature(std::span<const Vector> history, double k, double gamma, double delta);

enum class TimeProfile { Exp, Cos };

TimeProfile parse_time_profile(std::string_view name);

/// Closed-form int_0^t gamma exp(-delta (t - s)) g(s) ds for g = e^s or cos s.
double convolution_profile(TimeProfile profile, double gamma, double delta, double t);

}  // namespace oldroyd

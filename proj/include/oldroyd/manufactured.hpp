#pragma once

#include <vector>

#include "oldroyd/memory.hpp"
#include "oldroyd/types.hpp"

namespace oldroyd {

/// f(x) = x^power * (c0 + c1 x + c2 x^2 + ...), with first and second
/// derivatives in closed form.
class PowerPolynomial {
 public:
  PowerPolynomial(double power, std::vector<double> coefficients);

  double value(double x) const;
  double d1(double x) const;
  double d2(double x) const;

 private:
  double poly(const std::vector<double>& c, double x) const;

  double power_;
  std::vector<double> c0_;
  std::vector<double> c1_;
  std::vector<double> c2_;
};

struct ExactValues {
  Vec2 u{};
  Mat2 grad_u{};  // grad_u[i][j] = d u_i / d x_j
  Vec2 lap_u{};
  double p = 0.0;
  Vec2 grad_p{};
};

enum class CaseId { Example1, Example2 };

/// Separable manufactured solution u = g(t) U(x, y), p = g(t) P(x, y) with
///   U = s (F(x) G(y), -G(x) F(y)),   P = 2 (x - y),
/// which is divergence free whenever F' = 2 G (holds for both cases).
class ManufacturedCase {
 public:
  ManufacturedCase(CaseId id, TimeProfile profile, double scale, PowerPolynomial f,
                   PowerPolynomial g);

  CaseId id() const { return id_; }
  TimeProfile profile() const { return profile_; }

  double time_factor(double t) const;
  double time_factor_derivative(double t) const;

  ExactValues eval(double x, double y, double t) const;
  Vec2 velocity(double x, double y, double t) const;
  double pressure(double x, double y, double t) const;

  /// f = u_t + u.grad u - mu lap u - int_0^t beta(t-s) lap u(s) ds + grad p,
  /// with the memory integral in closed form.
  Vec2 forcing(const ModelParams& params, double x, double y, double t) const;

  VectorField velocity_field() const;
  ScalarField pressure_field() const;
  VectorField forcing_field(const ModelParams& params) const;

 private:
  /// Values of the spatial factors U, P (the solution at g = 1).
  ExactValues spatial(double x, double y) const;

  CaseId id_;
  TimeProfile profile_;
  double scale_;
  PowerPolynomial f_;
  PowerPolynomial g_;
};

/// Example 1: u1 = 2 e^t x^2 (x-1)^2 y (y-1) (2y-1), p = 2 e^t (x - y).
/// Example 2: u1 = 5 x^{5/2} (x-1)^2 y^{3/2} (y-1) (9y-5) cos t, p = 2 (x - y) cos t.
ManufacturedCase make_case(CaseId id);
ManufacturedCase make_case(int example);

}  // namespace oldroyd

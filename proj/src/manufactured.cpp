#include "oldroyd/manufactured.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace oldroyd {

namespace {
std::vector<double> derivative(const std::vector<double>& c) {
  std::vector<double> d;
  for (std::size_t i = 1; i < c.size(); ++i) d.push_back(static_cast<double>(i) * c[i]);
  if (d.empty()) d.push_back(0.0);
  return d;
}

double x_pow(double x, double p) { return p == 0.0 ? 1.0 : std::pow(x, p); }
}  // namespace

PowerPolynomial::PowerPolynomial(double power, std::vector<double> coefficients)
    : power_(power), c0_(std::move(coefficients)), c1_(derivative(c0_)), c2_(derivative(c1_)) {
  if (power < 0.0) throw std::invalid_argument("PowerPolynomial: negative power");
}

double PowerPolynomial::poly(const std::vector<double>& c, double x) const {
  double v = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * x + *it;
  return v;
}

double PowerPolynomial::value(double x) const { return x_pow(x, power_) * poly(c0_, x); }

double PowerPolynomial::d1(double x) const {
  double v = x_pow(x, power_) * poly(c1_, x);
  if (power_ != 0.0) v += power_ * x_pow(x, power_ - 1.0) * poly(c0_, x);
  return v;
}

double PowerPolynomial::d2(double x) const {
  double v = x_pow(x, power_) * poly(c2_, x);
  if (power_ != 0.0) {
    v += 2.0 * power_ * x_pow(x, power_ - 1.0) * poly(c1_, x);
    if (power_ != 1.0) v += power_ * (power_ - 1.0) * x_pow(x, power_ - 2.0) * poly(c0_, x);
  }
  return v;
}

ManufacturedCase::ManufacturedCase(CaseId id, TimeProfile profile, double scale,
                                   PowerPolynomial f, PowerPolynomial g)
    : id_(id), profile_(profile), scale_(scale), f_(std::move(f)), g_(std::move(g)) {}

double ManufacturedCase::time_factor(double t) const {
  return profile_ == TimeProfile::Exp ? std::exp(t) : std::cos(t);
}

double ManufacturedCase::time_factor_derivative(double t) const {
  return profile_ == TimeProfile::Exp ? std::exp(t) : -std::sin(t);
}

ExactValues ManufacturedCase::spatial(double x, double y) const {
  const double s = scale_;
  const double fx = f_.value(x), fy = f_.value(y);
  const double gx = g_.value(x), gy = g_.value(y);
  ExactValues e;
  e.u = {s * fx * gy, -s * gx * fy};
  e.grad_u[0] = {s * f_.d1(x) * gy, s * fx * g_.d1(y)};
  e.grad_u[1] = {-s * g_.d1(x) * fy, -s * gx * f_.d1(y)};
  e.lap_u = {s * (f_.d2(x) * gy + fx * g_.d2(y)), -s * (g_.d2(x) * fy + gx * f_.d2(y))};
  e.p = 2.0 * (x - y);
  e.grad_p = {2.0, -2.0};
  return e;
}

ExactValues ManufacturedCase::eval(double x, double y, double t) const {
  const double g = time_factor(t);
  ExactValues e = spatial(x, y);
  for (int i = 0; i < 2; ++i) {
    e.u[i] *= g;
    e.lap_u[i] *= g;
    e.grad_p[i] *= g;
    e.grad_u[i][0] *= g;
    e.grad_u[i][1] *= g;
  }
  e.p *= g;
  return e;
}

Vec2 ManufacturedCase::velocity(double x, double y, double t) const {
  const double s = scale_ * time_factor(t);
  return {s * f_.value(x) * g_.value(y), -s * g_.value(x) * f_.value(y)};
}

double ManufacturedCase::pressure(double x, double y, double t) const {
  return 2.0 * time_factor(t) * (x - y);
}

Vec2 ManufacturedCase::forcing(const ModelParams& params, double x, double y, double t) const {
  const ExactValues e = spatial(x, y);
  const double g = time_factor(t);
  const double dg = time_factor_derivative(t);
  const double memory = convolution_profile(profile_, params.gamma(), params.delta(), t);
  Vec2 f{};
  for (int i = 0; i < 2; ++i) {
    const double convect = e.u[0] * e.grad_u[i][0] + e.u[1] * e.grad_u[i][1];
    f[i] = dg * e.u[i] + g * g * convect - (params.mu() * g + memory) * e.lap_u[i] +
           g * e.grad_p[i];
  }
  return f;
}

VectorField ManufacturedCase::velocity_field() const {
  return [c = *this](double x, double y, double t) { return c.velocity(x, y, t); };
}

ScalarField ManufacturedCase::pressure_field() const {
  return [c = *this](double x, double y, double t) { return c.pressure(x, y, t); };
}

VectorField ManufacturedCase::forcing_field(const ModelParams& params) const {
  return [c = *this, params](double x, double y, double t) { return c.forcing(params, x, y, t); };
}

ManufacturedCase make_case(CaseId id) {
  switch (id) {
    case CaseId::Example1:
      // F = x^2 (x-1)^2, G = x (x-1) (2x-1)
      return ManufacturedCase(id, TimeProfile::Exp, 2.0,
                              PowerPolynomial(0.0, {0.0, 0.0, 1.0, -2.0, 1.0}),
                              PowerPolynomial(0.0, {0.0, 1.0, -3.0, 2.0}));
    case CaseId::Example2:
      // F = x^{5/2} (x-1)^2, G = x^{3/2} (x-1) (9x-5)
      return ManufacturedCase(id, TimeProfile::Cos, 5.0,
                              PowerPolynomial(2.5, {1.0, -2.0, 1.0}),
                              PowerPolynomial(1.5, {5.0, -14.0, 9.0}));
  }
  throw std::invalid_argument("make_case: unknown case");
}

ManufacturedCase make_case(int example) {
  if (example == 1) return make_case(CaseId::Example1);
  if (example == 2) return make_case(CaseId::Example2);
  throw std::invalid_argument("make_case: example must be 1 or 2, got " + std::to_string(example));
}

}  // namespace oldroyd

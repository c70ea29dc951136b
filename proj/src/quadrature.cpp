#include "oldroyd/quadrature.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace oldroyd {
namespace {

// Rule builder working with weights normalized to sum 1; scaled by the
// reference area at the end.
class RuleBuilder {
 public:
  explicit RuleBuilder(int degree) { rule_.degree = degree; }

  RuleBuilder& centroid(double w) {
    add(1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, w);
    return *this;
  }

  // Orbit of (a, a, 1-2a).
  RuleBuilder& orbit3(double a, double w) {
    const double b = 1.0 - 2.0 * a;
    add(a, a, b, w);
    add(a, b, a, w);
    add(b, a, a, w);
    return *this;
  }

  // Orbit of all permutations of (a, b, 1-a-b).
  RuleBuilder& orbit6(double a, double b, double w) {
    const double c = 1.0 - a - b;
    add(a, b, c, w);
    add(a, c, b, w);
    add(b, a, c, w);
    add(b, c, a, w);
    add(c, a, b, w);
    add(c, b, a, w);
    return *this;
  }

  QuadratureRule build() {
    for (double& w : rule_.weights) w *= 0.5;
    return rule_;
  }

 private:
  void add(double l1, double l2, double l3, double w) {
    rule_.points.push_back({l1, l2, l3});
    rule_.weights.push_back(w);
  }

  QuadratureRule rule_;
};

// Dunavant orbit parameters, refined to full double precision.
std::vector<QuadratureRule> make_rules() {
  std::vector<QuadratureRule> rules;
  rules.push_back(RuleBuilder(1).centroid(1.0).build());
  rules.push_back(RuleBuilder(2).orbit3(1.0 / 6.0, 1.0 / 3.0).build());
  rules.push_back(RuleBuilder(4)
                      .orbit3(0.44594849091596488632, 0.22338158967801146570)
                      .orbit3(0.09157621350977074346, 0.10995174365532186764)
                      .build());
  rules.push_back(RuleBuilder(5)
                      .centroid(0.225)
                      .orbit3(0.47014206410511508977, 0.13239415278850618074)
                      .orbit3(0.10128650732345633880, 0.12593918054482715260)
                      .build());
  rules.push_back(RuleBuilder(6)
                      .orbit3(0.24928674517091042129, 0.11678627572637936603)
                      .orbit3(0.06308901449150222834, 0.050844906370206816921)
                      .orbit6(0.053145049844816947353, 0.31035245103378440542,
                              0.082851075618373575194)
                      .build());
  rules.push_back(RuleBuilder(8)
                      .centroid(0.14431560767778716825)
                      .orbit3(0.45929258829272315603, 0.095091634267284624794)
                      .orbit3(0.17056930775176020662, 0.10321737053471825028)
                      .orbit3(0.050547228317030975458, 0.032458497623198080311)
                      .orbit6(0.0083947774099576053372, 0.26311282963463811342,
                              0.027230314174434994265)
                      .build());
  return rules;
}

}  // namespace

const QuadratureRule& quadrature_rule(int degree) {
  static const std::vector<QuadratureRule> rules = make_rules();
  if (degree < 1 || degree > 8) {
    throw std::invalid_argument("quadrature_rule: unsupported degree " + std::to_string(degree) +
                                " (supported 1..8)");
  }
  const auto it = std::find_if(rules.begin(), rules.end(),
                               [degree](const QuadratureRule& r) { return r.degree >= degree; });
  return *it;
}

}  // namespace oldroyd

#pragma once

#include <span>
#include <vector>

namespace fsg {

enum class RuleKind { GaussLegendre, GaussLobattoLegendre };

struct LegendreValue {
  double value;
  double derivative;
};

/// L_p(x) and L_p'(x) by the three-term recurrence.
LegendreValue legendre_eval(int p, double x);

/// Roots of (1 - x^2) L_p'(x), ascending, endpoints exactly -1 and 1.
std::vector<double> gll_nodes(int p);
std::vector<double> gll_weights(int p);

class QuadratureRule {
 public:
  static QuadratureRule gauss_legendre(int n);
  static QuadratureRule gauss_lobatto(int p);

  std::span<const double> nodes() const { return nodes_; }
  std::span<const double> weights() const { return weights_; }
  RuleKind kind() const { return kind_; }
  int size() const { return static_cast<int>(nodes_.size()); }
  int exactness_degree() const;

  // Rule mapped affinely onto [a,b].
  template <class F>
  double integrate(F&& f, double a, double b) const {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double sum = 0.0;
    for (std::size_t i = 0; i < nodes_.size(); ++i)
      sum += weights_[i] * f(mid + half * nodes_[i]);
    return half * sum;
  }

 private:
  QuadratureRule(std::vector<double> nodes, std::vector<double> weights, RuleKind kind);

  std::vector<double> nodes_;
  std::vector<double> weights_;
  RuleKind kind_;
};

/// Throws InputError unless a < b and the breakpoints are strictly
/// increasing and strictly inside (a,b).
void check_breakpoints(double a, double b, std::span<const double> breakpoints);

/// Sorted, de-duplicated members of `points` lying strictly inside (a,b).
std::vector<double> interior_breakpoints(double a, double b, std::span<const double> points);

template <class F>
double integrate_split(F&& f, double a, double b, std::span<const double> breakpoints,
                       const QuadratureRule& rule) {
  check_breakpoints(a, b, breakpoints);
  double total = 0.0;
  double lo = a;
  for (double bp : breakpoints) {
    total += rule.integrate(f, lo, bp);
    lo = bp;
  }
  total += rule.integrate(f, lo, b);
  return total;
}

// Quadrature density used for everything that is not an exact polynomial
// integral (kernels, exponential solutions).
inline constexpr int kDefaultQuadPoints = 20;

}  // namespace fsg

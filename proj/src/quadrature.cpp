#include "fsg/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "fsg/errors.hpp"

namespace fsg {

namespace {

constexpr int kNewtonCap = 100;
constexpr double kNewtonTol = 1e-15;

}  // namespace

LegendreValue legendre_eval(int p, double x) {
  if (p < 0) throw InputError("legendre_eval: negative degree");
  if (p == 0) return {1.0, 0.0};
  double l_prev = 1.0, l = x;
  double d_prev = 0.0, d = 1.0;
  for (int k = 1; k < p; ++k) {
    const double l_next = ((2 * k + 1) * x * l - k * l_prev) / (k + 1);
    // L'_{k+1} = L'_{k-1} + (2k+1) L_k
    const double d_next = d_prev + (2 * k + 1) * l;
    l_prev = l;
    l = l_next;
    d_prev = d;
    d = d_next;
  }
  return {l, d};
}

std::vector<double> gll_nodes(int p) {
  if (p < 1) throw InputError("gll_nodes: degree must be >= 1");
  std::vector<double> x(p + 1);
  x[0] = -1.0;
  x[p] = 1.0;
  const double pp1 = static_cast<double>(p) * (p + 1);
  // Newton on L_p' for the nodes in the right half; mirror the rest.
  for (int i = 1; i <= (p - 1) / 2; ++i) {
    double xi = std::cos(std::numbers::pi * i / p);
    int it = 0;
    for (; it < kNewtonCap; ++it) {
      const auto [l, dl] = legendre_eval(p, xi);
      const double d2l = (2.0 * xi * dl - pp1 * l) / (1.0 - xi * xi);
      const double dx = dl / d2l;
      xi -= dx;
      if (std::abs(dx) < kNewtonTol) break;
    }
    if (it == kNewtonCap)
      throw NumericalDefect("gll_nodes: Newton did not converge for p=" + std::to_string(p));
    x[p - i] = xi;
    x[i] = -xi;
  }
  if (p % 2 == 0) x[p / 2] = 0.0;
  return x;
}

std::vector<double> gll_weights(int p) {
  const std::vector<double> x = gll_nodes(p);
  std::vector<double> w(p + 1);
  const double scale = 2.0 / (static_cast<double>(p) * (p + 1));
  for (int i = 0; i <= p; ++i) {
    const double l = legendre_eval(p, x[i]).value;
    w[i] = scale / (l * l);
  }
  return w;
}

QuadratureRule::QuadratureRule(std::vector<double> nodes, std::vector<double> weights,
                               RuleKind kind)
    : nodes_(std::move(nodes)), weights_(std::move(weights)), kind_(kind) {}

QuadratureRule QuadratureRule::gauss_legendre(int n) {
  if (n < 1) throw InputError("gauss_legendre: need at least one point");
  std::vector<double> x(n), w(n);
  for (int i = 0; i < n / 2; ++i) {
    // descending guess for the i-th largest root
    double xi = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    int it = 0;
    for (; it < kNewtonCap; ++it) {
      const double dx = legendre_eval(n, xi).value / legendre_eval(n, xi).derivative;
      xi -= dx;
      if (std::abs(dx) < kNewtonTol) break;
    }
    if (it == kNewtonCap)
      throw NumericalDefect("gauss_legendre: Newton did not converge for n=" + std::to_string(n));
    const double dl = legendre_eval(n, xi).derivative;
    const double wi = 2.0 / ((1.0 - xi * xi) * dl * dl);
    x[n - 1 - i] = xi;
    x[i] = -xi;
    w[n - 1 - i] = wi;
    w[i] = wi;
  }
  if (n % 2 == 1) {
    const double dl = legendre_eval(n, 0.0).derivative;
    x[n / 2] = 0.0;
    w[n / 2] = 2.0 / (dl * dl);
  }
  return QuadratureRule(std::move(x), std::move(w), RuleKind::GaussLegendre);
}

QuadratureRule QuadratureRule::gauss_lobatto(int p) {
  return QuadratureRule(gll_nodes(p), gll_weights(p), RuleKind::GaussLobattoLegendre);
}

int QuadratureRule::exactness_degree() const {
  const int n = size();
  return kind_ == RuleKind::GaussLegendre ? 2 * n - 1 : 2 * (n - 1) - 1;
}

void check_breakpoints(double a, double b, std::span<const double> breakpoints) {
  if (!(a < b)) throw InputError("integrate_split: need a < b");
  double prev = a;
  for (double bp : breakpoints) {
    if (!(bp > prev) || !(bp < b))
      throw InputError("integrate_split: breakpoints must be increasing and inside (a,b)");
    prev = bp;
  }
}

std::vector<double> interior_breakpoints(double a, double b, std::span<const double> points) {
  std::vector<double> out;
  out.reserve(points.size());
  for (double v : points)
    if (v > a && v < b) out.push_back(v);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace fsg

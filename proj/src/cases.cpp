#include "fsg/cases.hpp"

#include <cmath>
#include <numbers>

namespace fsg {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Function1D sine2() {
  return {[](double x) { return std::sin(kTwoPi * x); }, [](double x) { return kTwoPi * std::cos(kTwoPi * x); },
          {}};
}

}  // namespace

PoissonCase1D sin2pix() {
  PoissonCase1D c;
  c.name = "sin2pix";
  c.solution = sine2();
  c.source.value = [](double x) { return kTwoPi * kTwoPi * std::sin(kTwoPi * x); };
  c.source.derivative = [](double x) { return kTwoPi * kTwoPi * kTwoPi * std::cos(kTwoPi * x); };
  return c;
}

AdvDiffCase advdiff_const(double c, double nu) {
  AdvDiffCase a;
  a.name = "advdiff-const";
  a.problem = constant_source_problem(c, nu);
  a.solution = constant_source_solution(c, nu);
  return a;
}

PoissonCase2D sin2pixy() {
  PoissonCase2D c;
  c.name = "sin2pixy";
  c.solution.value = [](double x, double y) { return std::sin(kTwoPi * x) * std::sin(kTwoPi * y); };
  c.solution.dx = [](double x, double y) { return kTwoPi * std::cos(kTwoPi * x) * std::sin(kTwoPi * y); };
  c.solution.dy = [](double x, double y) { return kTwoPi * std::sin(kTwoPi * x) * std::cos(kTwoPi * y); };
  c.source.terms.push_back({2.0 * kTwoPi * kTwoPi, sine2(), sine2()});
  return c;
}

std::vector<std::string> case_names() { return {"sin2pix", "advdiff-const", "sin2pixy"}; }

}  // namespace fsg

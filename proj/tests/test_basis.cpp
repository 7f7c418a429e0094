#include <cmath>
#include <numbers>

#include "doctest.h"
#include "fsg/basis.hpp"
#include "fsg/errors.hpp"

using namespace fsg;
using doctest::Approx;

TEST_CASE("nodal basis is cardinal at the global nodes") {
  BasisFamily fam(Mesh1D(0, 1, 3, 4));
  const auto nodes = fam.global_nodes();
  for (int i = 0; i < fam.space_size(Space::Nodal); ++i)
    for (std::size_t k = 0; k < nodes.size(); ++k)
      CHECK(fam.nodal(i, nodes[k]) == Approx(i == static_cast<int>(k) ? 1.0 : 0.0));
}

TEST_CASE("partition of unity and its derivative") {
  BasisFamily fam(Mesh1D(0, 1, 2, 5));
  for (double x : {0.03, 0.31, 0.5, 0.77, 0.99}) {
    double s = 0, d = 0;
    for (int i = 0; i < fam.space_size(Space::Nodal); ++i) {
      s += fam.nodal(i, x);
      d += fam.nodal_deriv(i, x);
    }
    CHECK(s == Approx(1.0).epsilon(1e-13));
    CHECK(std::abs(d) < 1e-10);
  }
}

TEST_CASE("hat functions") {
  BasisFamily ref(Mesh1D(-1, 1, 1, 1));
  CHECK(ref.nodal(0, 0.5) == Approx(0.25));
  BasisFamily half(Mesh1D(0, 0.5, 1, 1));
  for (double x : {0.1, 0.25, 0.4}) CHECK(half.nodal_deriv(0, x) == Approx(-2.0));
}

TEST_CASE("derivative matches central differences") {
  BasisFamily fam(Mesh1D(0, 1, 2, 4));
  const double h = 1e-6;
  for (int i = 0; i < fam.space_size(Space::Nodal); ++i)
    for (double x : {0.13, 0.37, 0.61, 0.88}) {
      const double fd = (fam.nodal(i, x + h) - fam.nodal(i, x - h)) / (2 * h);
      CHECK(std::abs(fd - fam.nodal_deriv(i, x)) < 1e-6);
    }
}

TEST_CASE("edge functions histopolate the GLL subintervals") {
  for (int p : {1, 2, 3, 6}) {
    BasisFamily fam(Mesh1D(-1, 1, 1, p));
    const auto xi = fam.reference_nodes();
    const auto rule = QuadratureRule::gauss_legendre(p + 1);
    for (int i = 0; i < p; ++i) {
      double total = 0;
      for (int j = 0; j < p; ++j) {
        const double v = rule.integrate([&](double x) { return fam.edge(i, x); }, xi[j], xi[j + 1]);
        CHECK(v == Approx(i == j ? 1.0 : 0.0).epsilon(1e-12));
        total += v;
      }
      CHECK(total == Approx(1.0));
    }
  }
  BasisFamily p1(Mesh1D(-1, 1, 1, 1));
  for (double x : {-0.9, 0.0, 0.7}) CHECK(p1.edge(0, x) == Approx(0.5));
}

TEST_CASE("physical edge functions integrate to one over their subinterval") {
  BasisFamily fam(Mesh1D(0, 1, 3, 3));
  const auto nodes = fam.global_nodes();
  const auto rule = QuadratureRule::gauss_legendre(6);
  for (int k = 0; k < fam.space_size(Space::Edge); ++k) {
    const int e = k / 3;
    CHECK(rule.integrate([&](double x) { return fam.edge_in(e, k, x); }, nodes[k], nodes[k + 1]) == Approx(1.0));
  }
}

TEST_CASE("fields") {
  BasisFamily fam(Mesh1D(0, 1, 5, 4));
  Field one{Space::Nodal, Eigen::VectorXd::Ones(fam.space_size(Space::Nodal))};
  for (double x : {0.0, 0.21, 0.5, 1.0}) CHECK(fam.eval(one, x) == Approx(1.0));
  Field ek{Space::Nodal, Eigen::VectorXd::Zero(fam.space_size(Space::Nodal))};
  ek.coeffs[7] = 1.0;
  for (double x : {0.11, 0.33, 0.47}) CHECK(fam.eval(ek, x) == Approx(fam.nodal(7, x)));
  const auto nodes = fam.global_nodes();
  Field s{Space::Nodal, Eigen::VectorXd(nodes.size())};
  for (std::size_t k = 0; k < nodes.size(); ++k) s.coeffs[k] = std::sin(2 * std::numbers::pi * nodes[k]);
  for (std::size_t k = 0; k < nodes.size(); ++k) CHECK(fam.eval(s, nodes[k]) == Approx(s.coeffs[k]));
}

TEST_CASE("mesh validation") {
  CHECK_THROWS_AS(Mesh1D(0, 1, 0, 2), InputError);
  CHECK_THROWS_AS(Mesh1D(0, 1, 2, 0), InputError);
  CHECK_THROWS_AS(Mesh1D(1, 0, 2, 2), InputError);
  CHECK_THROWS_AS(Mesh1D(std::vector<double>{0, 0.5, 0.4, 1}, 2), InputError);
  BasisFamily fam(Mesh1D(0, 1, 2, 2));
  CHECK_THROWS_AS(fam.eval(Field{Space::Nodal, Eigen::VectorXd::Zero(3)}, 0.5), InputError);
}

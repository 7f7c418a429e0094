#include "doctest.h"
#include "fsg/dualspace.hpp"

using namespace fsg;
using doctest::Approx;

namespace {

Eigen::MatrixXd pairing(const BasisFamily& fam, const DualSet& ds) {
  const int n = ds.size();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  const auto rule = QuadratureRule::gauss_legendre(fam.degree() + 2);
  for_each_quad_point(fam.mesh(), rule, {}, [&](int e, double x, double w) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        m(i, j) += w * ds.eval_in(i, e, x) *
                   (ds.kind() == DualKind::DualNodal ? fam.edge_in(e, j, x) : fam.nodal_in(e, j, x));
  });
  return m;
}

}  // namespace

TEST_CASE("reference mass matrices") {
  BasisFamily fam(Mesh1D(-1, 1, 1, 1));
  MassMatrix m0(fam, MassKind::Nodal);
  CHECK(m0.entries()(0, 0) == Approx(2.0 / 3));
  CHECK(m0.entries()(0, 1) == Approx(1.0 / 3));
  CHECK(m0.entries()(1, 1) == Approx(2.0 / 3));
  MassMatrix m1(fam, MassKind::Edge);
  CHECK(m1.entries()(0, 0) == Approx(0.5));
}

TEST_CASE("nodal mass rows integrate the basis") {
  BasisFamily fam(Mesh1D(0, 2, 3, 3));
  MassMatrix m0(fam, MassKind::Nodal);
  CHECK(m0.entries().sum() == Approx(2.0));
  const auto rule = QuadratureRule::gauss_legendre(6);
  for (int i = 0; i < m0.size(); ++i) {
    const double v = integrate_elements(fam.mesh(), rule, {}, [&](int e, double x) { return fam.nodal_in(e, i, x); });
    CHECK(m0.entries().row(i).sum() == Approx(v));
  }
}

TEST_CASE("dual bases are biorthogonal to the paired primal family") {
  for (auto [n, p] : {std::pair{1, 1}, std::pair{2, 3}, std::pair{5, 4}}) {
    BasisFamily fam(Mesh1D(0, 1, n, p));
    for (DualKind k : {DualKind::DualNodal, DualKind::DualEdge}) {
      DualSet ds(fam, k);
      const Eigen::MatrixXd b = pairing(fam, ds);
      CHECK((b - Eigen::MatrixXd::Identity(b.rows(), b.cols())).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
}

TEST_CASE("scalar dual cases") {
  BasisFamily fam(Mesh1D(-1, 1, 1, 1));
  DualSet ds(fam, DualKind::DualNodal);
  for (double x : {-0.5, 0.0, 0.9}) CHECK(ds.eval(0, x) == Approx(1.0));
  MassMatrix m1(fam, MassKind::Edge);
  Eigen::VectorXd c(1);
  c << 3.0;
  CHECK(primal_dofs(m1, c)[0] == Approx(6.0));
  CHECK(dual_dofs(m1, c)[0] == Approx(1.5));
}

TEST_CASE("dual degrees of freedom round trip") {
  BasisFamily fam(Mesh1D(0, 1, 4, 3));
  MassMatrix m0(fam, MassKind::Nodal);
  Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(m0.size(), -1.0, 2.0).array().sin();
  CHECK((primal_dofs(m0, dual_dofs(m0, v)) - v).cwiseAbs().maxCoeff() < 1e-11);
  CHECK(dual_dofs(m0, Eigen::VectorXd::Zero(m0.size())).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("dual field evaluation checks the space tag") {
  BasisFamily fam(Mesh1D(0, 1, 2, 2));
  DualSet ds(fam, DualKind::DualEdge);
  Field wrong{Space::Nodal, Eigen::VectorXd::Zero(ds.size())};
  CHECK_THROWS(ds.eval(wrong, 0.3));
  Field ok{Space::DualEdge, Eigen::VectorXd::Unit(ds.size(), 1)};
  CHECK(ds.eval(ok, 0.3) == Approx(ds.eval(1, 0.3)));
}

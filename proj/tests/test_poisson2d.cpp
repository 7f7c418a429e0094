#include <cmath>
#include <numbers>

#include "doctest.h"
#include "fsg/cases.hpp"
#include "fsg/errors.hpp"
#include "fsg/poisson2d.hpp"

using namespace fsg;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> grid41() {
  std::vector<double> g(41);
  for (int k = 0; k <= 40; ++k) g[k] = k / 40.0;
  return g;
}

}  // namespace

TEST_CASE("mode convolution matches direct quadrature of the mode kernel") {
  Distribution d;
  d.density = [](double s) { return std::sin(3 * s) + s; };
  d.masses = {{0.3, 0.7}};
  std::vector<double> ys{0.0, 0.1, 0.3, 0.55, 1.0};
  for (double kappa : {kPi, 20 * kPi, 100 * kPi}) {
    const auto v = mode_convolve(kappa, d, ys);
    const auto rule = QuadratureRule::gauss_legendre(10);
    for (std::size_t j = 0; j < ys.size(); ++j) {
      const double y = ys[j];
      // composite rule split at the kink s = y and at the mass
      std::vector<double> cuts{0.0, 1.0, 0.3};
      if (y > 0 && y < 1) cuts.push_back(y);
      std::sort(cuts.begin(), cuts.end());
      cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
      double ref = 0.7 * mode_green(kappa, y, 0.3);
      for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
        const int n = 400;
        for (int k = 0; k < n; ++k) {
          const double a = cuts[c] + (cuts[c + 1] - cuts[c]) * k / n;
          const double b = cuts[c] + (cuts[c + 1] - cuts[c]) * (k + 1) / n;
          ref += rule.integrate([&](double s) { return mode_green(kappa, y, s) * d.density(s); }, a, b);
        }
      }
      CHECK(std::abs(v[j] - ref) < 1e-12 + 1e-9 * std::abs(ref));
    }
  }
}

TEST_CASE("2D stiffness equals the Kronecker assembly") {
  for (int p : {1, 2, 3}) {
    Mesh2D mesh(2, p);
    CHECK((stiffness_2d(mesh) - stiffness_2d_kron(mesh)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("2D mu functions") {
  for (int p : {1, 2, 3}) {
    MuSet2D mu{Mesh2D(2, p)};
    const Eigen::MatrixXd b = mu.biorthogonality();
    CHECK((b - Eigen::MatrixXd::Identity(b.rows(), b.cols())).cwiseAbs().maxCoeff() < 1e-9);
    // only the p = 1 stiffness is an M-matrix
    if (p == 1)
      for (int i = 0; i < mu.size(); ++i)
        for (int a = 1; a < 21; ++a)
          for (int c = 1; c < 21; ++c) CHECK(mu.value(i, a / 21.0, c / 21.0) >= -1e-14);
  }
  MuSet2D one{Mesh2D(2, 1)};
  REQUIRE(one.size() == 1);
  const double k11 = one.stiffness()(0, 0);
  CHECK(k11 == Approx(8.0 / 3.0));
  for (auto [x, y] : {std::pair{0.3, 0.4}, std::pair{0.5, 0.5}, std::pair{0.8, 0.1}})
    CHECK(one.value(0, x, y) == Approx(one.mesh().basis(0, x, y) / k11));
}

TEST_CASE("2D projection") {
  const PoissonCase2D pc = sin2pixy();
  MuSet2D mu{Mesh2D(2, 3)};
  const Field2D a = project_2d(mu, pc.solution);
  const Field2D b = project_2d_source(mu, [&](double x, double y) { return pc.source.value(x, y); });
  CHECK((a.coeffs - b.coeffs).cwiseAbs().maxCoeff() < 1e-7);
  CHECK(project_2d_source(mu, [](double, double) { return 0.0; }).coeffs.cwiseAbs().maxCoeff() == 0.0);

  // resolved function reproduced
  Field2D v{Eigen::VectorXd::LinSpaced(mu.size(), -1.0, 1.0)};
  const Mesh2D& m = mu.mesh();
  Function2D f;
  f.value = [&](double x, double y) { return eval(m, v, x, y); };
  const int n = m.n1();
  auto grad = [&](double x, double y, bool dx) {
    Eigen::VectorXd vx(n), vy(n);
    if (dx) {
      m.interior_derivs(x, vx);
      m.interior_values(y, vy);
    } else {
      m.interior_values(x, vx);
      m.interior_derivs(y, vy);
    }
    return vx.dot(Eigen::Map<const Eigen::MatrixXd>(v.coeffs.data(), n, n) * vy);
  };
  f.dx = [&](double x, double y) { return grad(x, y, true); };
  f.dy = [&](double x, double y) { return grad(x, y, false); };
  CHECK((project_2d(mu, f).coeffs - v.coeffs).cwiseAbs().maxCoeff() < 1e-9);

  Function2D bad = pc.solution;
  bad.value = [](double x, double) { return x; };
  CHECK_THROWS_AS(project_2d(mu, bad), InputError);
}

TEST_CASE("2D fine-scale reconstruction") {
  const PoissonCase2D pc = sin2pixy();
  const auto g = grid41();
  for (int p : {1, 3}) {
    MuSet2D mu{Mesh2D(2, p)};
    const Field2D ub = project_2d(mu, pc.solution);
    FineScale2D fs(mu);
    const Reconstruction2D r = fs.reconstruct(pc.source, ub, g, g);
    double worst = 0;
    for (int i = 0; i <= 40; ++i)
      for (int j = 0; j <= 40; ++j)
        worst = std::max(worst, std::abs(eval(mu.mesh(), ub, g[i], g[j]) + r.u_prime(i, j) - pc.solution.value(g[i], g[j])));
    CHECK(worst < 5e-3);
    CHECK(fs.annihilation().cwiseAbs().maxCoeff() < 1e-5);
  }
  MuSet2D mu{Mesh2D(2, 2)};
  FineScale2D fs(mu);
  const Reconstruction2D z = fs.reconstruct(Separable2D{}, Field2D{Eigen::VectorXd::Zero(mu.size())}, g, g);
  CHECK(z.u_prime.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("2D basis pairing against the shifted-operator identity") {
  // for b vanishing at the ends, G_kappa(-b'' + kappa^2 b) = b, so the pairing of
  // -lap B_k with G(-lap B_l) reduces to sum_n 2 S_n(b_kx) S_n(b_lx) int b_ly (-b_ky'' + (n pi)^2 b_ky)
  MuSet2D mu{Mesh2D(2, 2)};
  FineScale2DConfig cfg;
  cfg.num_terms = 30;
  FineScale2D fs(mu, cfg);
  const Mesh2D& m = mu.mesh();
  const BasisFamily& fam = m.family();
  const int n = m.n1();
  const auto rule = QuadratureRule::gauss_legendre(12);
  Eigen::MatrixXd m1(n, n), k1(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      m1(i, j) = integrate_elements(fam.mesh(), rule, {}, [&](int e, double x) {
        return fam.nodal_in(e, i + 1, x) * fam.nodal_in(e, j + 1, x);
      });
      k1(i, j) = integrate_elements(fam.mesh(), rule, {}, [&](int e, double x) {
        return fam.nodal_deriv_in(e, i + 1, x) * fam.nodal_deriv_in(e, j + 1, x);
      });
    }
  Eigen::MatrixXd want = Eigen::MatrixXd::Zero(n * n, n * n);
  for (int mode = 1; mode <= cfg.num_terms; ++mode) {
    const double kappa = mode * kPi;
    Eigen::VectorXd s(n);
    for (int i = 0; i < n; ++i) {
      double v = 0;
      for (int c = 0; c < 40; ++c)
        v += rule.integrate([&](double x) { return fam.nodal(i + 1, x) * std::sin(kappa * x); }, c / 40.0, (c + 1) / 40.0);
      s[i] = v;
    }
    for (int ly = 0; ly < n; ++ly)
      for (int lx = 0; lx < n; ++lx)
        for (int ky = 0; ky < n; ++ky)
          for (int kx = 0; kx < n; ++kx)
            want(kx + n * ky, lx + n * ly) +=
                2 * s[kx] * s[lx] * (k1(ky, ly) + kappa * kappa * m1(ky, ly));
  }
  CHECK((fs.basis_pairing() - want).cwiseAbs().maxCoeff() < 1e-8 * want.cwiseAbs().maxCoeff());
}

TEST_CASE("reconstructed fine scales are H10-orthogonal to the resolved space") {
  // int grad mu_i . grad u' by tensor quadrature of -lap mu_i against sampled u'
  const PoissonCase2D pc = sin2pixy();
  MuSet2D mu{Mesh2D(2, 3)};
  const Field2D ub = project_2d(mu, pc.solution);
  FineScale2D fs(mu);
  const Mesh2D& m = mu.mesh();
  const BasisFamily& fam = m.family();
  const int n = m.n1();
  const auto rule = QuadratureRule::gauss_legendre(12);
  // points: Gauss points of each element plus the element boundaries
  std::vector<double> pts, wts;
  for (int e = 0; e < 2; ++e)
    for (int q = 0; q < rule.size(); ++q) {
      pts.push_back(fam.mesh().to_physical(e, rule.nodes()[q]));
      wts.push_back(rule.weights()[q] * fam.mesh().jacobian(e));
    }
  std::vector<double> all = pts;
  all.insert(all.end(), {0.0, 0.5, 1.0});
  std::sort(all.begin(), all.end());
  const Reconstruction2D r = fs.reconstruct(pc.source, ub, all, all);
  auto idx = [&](double v) { return static_cast<int>(std::lower_bound(all.begin(), all.end(), v) - all.begin()); };

  // 1D pieces of -lap B_k: values, second derivatives and slope jumps of b_i
  std::vector<std::vector<double>> val(n), sec(n), jump(n);
  for (int i = 0; i < n; ++i) {
    for (double x : pts) {
      const int e = fam.mesh().locate(x);
      val[i].push_back(fam.nodal_in(e, i + 1, x));
      sec[i].push_back(fam.nodal_second_in(e, i + 1, x));
    }
    jump[i] = {fam.nodal_deriv_in(1, i + 1, 0.5) - fam.nodal_deriv_in(0, i + 1, 0.5)};
  }
  Eigen::VectorXd pb(n * n);
  for (int ky = 0; ky < n; ++ky)
    for (int kx = 0; kx < n; ++kx) {
      double s = 0;
      for (std::size_t a = 0; a < pts.size(); ++a)
        for (std::size_t b = 0; b < pts.size(); ++b) {
          const double u = r.u_prime(idx(pts[a]), idx(pts[b]));
          s -= wts[a] * wts[b] * (sec[kx][a] * val[ky][b] + val[kx][a] * sec[ky][b]) * u;
        }
      const int mid = idx(0.5);
      for (std::size_t b = 0; b < pts.size(); ++b) {
        s -= jump[kx][0] * wts[b] * val[ky][b] * r.u_prime(mid, idx(pts[b]));
        s -= jump[ky][0] * wts[b] * val[kx][b] * r.u_prime(idx(pts[b]), mid);
      }
      pb[kx + n * ky] = s;
    }
  const Eigen::VectorXd coeff = mu.coefficients().transpose() * pb;
  CHECK(coeff.cwiseAbs().maxCoeff() < 1e-5);
}

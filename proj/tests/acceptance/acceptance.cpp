// Acceptance checks.  One PASS/FAIL line per criterion; exit status 1 if any fails.
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "fsg/advdiff.hpp"
#include "fsg/cases.hpp"
#include "fsg/dualspace.hpp"
#include "fsg/finescale.hpp"
#include "fsg/poisson2d.hpp"
#include "fsg/quadrature.hpp"

using namespace fsg;

namespace {

constexpr double kPi = std::numbers::pi;
int failures = 0;

void report(int id, bool ok, const std::string& what, const std::string& detail) {
  std::printf("%s criterion %d: %s [%s]\n", ok ? "PASS" : "FAIL", id, what.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::vector<double> uniform(int n) {
  std::vector<double> g(n + 1);
  for (int k = 0; k <= n; ++k) g[k] = static_cast<double>(k) / n;
  return g;
}

FineScaleOperator poisson_op(int n, int p, Flavor fl) {
  return FineScaleOperator(GreensKernel1D::poisson(), MuSet(BasisFamily(Mesh1D(0, 1, n, p)), fl));
}

void gll() {
  double worst = 0;
  const std::vector<std::vector<double>> exact{
      {-1, 1}, {-1, 0, 1}, {-1, -1 / std::sqrt(5.0), 1 / std::sqrt(5.0), 1}};
  for (int p = 1; p <= 3; ++p) {
    const auto x = gll_nodes(p);
    for (int i = 0; i <= p; ++i) worst = std::max(worst, std::abs(x[i] - exact[p - 1][i]));
  }
  double root = 0;
  for (int p = 1; p <= 16; ++p)
    for (double x : gll_nodes(p)) root = std::max(root, std::abs((1 - x * x) * legendre_eval(p, x).derivative));
  report(1, worst < 1e-12 && root < 1e-12, "GLL nodes", "node err " + sci(worst) + ", root residual " + sci(root));
}

void dual_biorthogonality() {
  double worst = 0;
  for (auto [n, p] : {std::pair{1, 1}, std::pair{2, 3}, std::pair{5, 4}}) {
    BasisFamily fam(Mesh1D(0, 1, n, p));
    const auto rule = QuadratureRule::gauss_legendre(p + 2);
    for (DualKind k : {DualKind::DualNodal, DualKind::DualEdge}) {
      DualSet ds(fam, k);
      const int m = ds.size();
      Eigen::MatrixXd b = Eigen::MatrixXd::Zero(m, m);
      for_each_quad_point(fam.mesh(), rule, {}, [&](int e, double x, double w) {
        for (int i = 0; i < m; ++i)
          for (int j = 0; j < m; ++j)
            b(i, j) += w * ds.eval_in(i, e, x) * (k == DualKind::DualNodal ? fam.edge_in(e, j, x) : fam.nodal_in(e, j, x));
      });
      worst = std::max(worst, (b - Eigen::MatrixXd::Identity(m, m)).cwiseAbs().maxCoeff());
    }
  }
  report(2, worst < 1e-10, "dual basis biorthogonality", "max err " + sci(worst));
}

void mu_biorthogonality() {
  double w1 = 0;
  for (auto [n, p] : {std::pair{2, 1}, std::pair{3, 2}, std::pair{2, 3}, std::pair{5, 4}}) {
    BasisFamily fam(Mesh1D(0, 1, n, p));
    MuSet mu(fam, Flavor::H10);
    const auto rule = QuadratureRule::gauss_legendre(p + 1);
    for (int i = 0; i < mu.size(); ++i)
      for (int j = 1; j + 1 < fam.space_size(Space::Nodal); ++j) {
        const double v = integrate_elements(fam.mesh(), rule, {}, [&](int e, double x) {
          return mu.component_in(i, e, x, 1) * fam.nodal_deriv_in(e, j, x);
        });
        w1 = std::max(w1, std::abs(v - (j == i + 1 ? 1.0 : 0.0)));
      }
  }
  double w2 = 0;
  for (int p = 1; p <= 3; ++p) {
    MuSet2D mu{Mesh2D(2, p)};
    const Eigen::MatrixXd b = mu.biorthogonality();
    w2 = std::max(w2, (b - Eigen::MatrixXd::Identity(b.rows(), b.cols())).cwiseAbs().maxCoeff());
  }
  report(3, w1 < 1e-10 && w2 < 1e-9, "H10 mu biorthogonality", "1D " + sci(w1) + ", 2D " + sci(w2));
}

void source_shortcut() {
  const PoissonCase1D pc = sin2pix();
  double worst = 0;
  for (int p : {1, 2, 3, 4}) {
    MuSet mu(BasisFamily(Mesh1D(0, 1, 5, p)), Flavor::H10);
    worst = std::max(worst, (h10_project_from_source(mu, pc.source).coeffs - project(mu, pc.solution).coeffs)
                                .cwiseAbs()
                                .maxCoeff());
  }
  report(4, worst < 1e-9, "H10 source shortcut", "max coeff diff " + sci(worst));
}

void annihilation() {
  double worst = 0;
  for (Flavor fl : {Flavor::H10, Flavor::L2}) {
    const auto op = poisson_op(2, 2, fl);
    const int n = op.size();
    for (int i = 0; i < n; ++i) {
      // G' mu_i = G mu_i - G mu^T A^-1 (mu G mu_i)
      const Eigen::VectorXd w = op.solve(op.apply_mu_g(op.mu().functional(i)));
      for (double x : uniform(200)) {
        double v = op.green_apply(op.mu().functional(i), x, op.owning_side(x));
        for (int j = 0; j < n; ++j) v -= op.g_mu_direct(j, x, op.owning_side(x)) * w[j];
        worst = std::max(worst, std::abs(v));
      }
    }
  }
  report(5, worst < 1e-7, "fine-scale annihilation", "sup |G' mu_i| " + sci(worst));
}

void resolved_basis() {
  double wh = 0, wl = 0;
  for (int p = 1; p <= 3; ++p)
    for (Flavor fl : {Flavor::H10, Flavor::L2}) {
      const auto op = poisson_op(2, p, fl);
      const BasisFamily& fam = op.mu().family();
      for (double x : uniform(200)) {
        const Eigen::VectorXd chi = op.resolved_basis(x);
        for (int i = 0; i < op.size(); ++i) {
          if (fl == Flavor::H10)
            wh = std::max(wh, std::abs(chi[i] - fam.nodal(i + 1, x)));
          else
            wl = std::max(wl, std::abs(chi[i] - fam.edge(i, x)));
        }
      }
    }
  report(6, wh < 1e-7 && wl < 1e-6, "resolved basis reproduction", "H10 " + sci(wh) + ", L2 " + sci(wl));
}

void element_green() {
  const auto op = poisson_op(2, 1, Flavor::H10);
  double worst = 0;
  for (double x : uniform(40))
    for (double s : uniform(40)) {
      double ref = 0;
      const int ex = x < 0.5 ? 0 : 1, es = s < 0.5 ? 0 : 1;
      if (x != 0.5 && s != 0.5 && ex == es) {
        const double a = (x - 0.5 * ex) / 0.5, b = (s - 0.5 * ex) / 0.5;
        ref = 0.5 * (a <= b ? a * (1 - b) : b * (1 - a));
      }
      worst = std::max(worst, std::abs(op.eval(x, s) - ref));
    }
  report(7, worst < 1e-7, "p=1 element Green's function", "max err " + sci(worst));
}

double poisson_reconstruction_error(int n, int p, Flavor fl) {
  const PoissonCase1D pc = sin2pix();
  BasisFamily fam(Mesh1D(0, 1, n, p));
  MuSet mu(fam, fl);
  const Field ub = fl == Flavor::H10 ? h10_project_from_source(mu, pc.source) : project(mu, pc.solution);
  FineScaleOperator op(GreensKernel1D::poisson(), mu);
  const auto grid = uniform(400);
  const auto up = op.reconstruct(from_function(pc.source) + second_derivative(fam, ub), grid);
  double worst = 0;
  for (std::size_t k = 0; k < grid.size(); ++k)
    worst = std::max(worst, std::abs(fam.eval(ub, grid[k]) + up[k] - pc.solution.value(grid[k])));
  return worst;
}

void poisson_1d() {
  double worst = 0;
  for (Flavor fl : {Flavor::H10, Flavor::L2})
    for (int p : {1, 2}) worst = std::max(worst, poisson_reconstruction_error(5, p, fl));
  report(8, worst < 1e-5, "1D Poisson reconstruction", "sup err " + sci(worst));
}

void exact_gradient() {
  const AdvDiffCase ac = advdiff_const(1.0, 0.01);
  const auto grid = uniform(400);
  double worst = 0;
  for (Flavor fl : {Flavor::H10, Flavor::L2})
    for (int p : {2, 4}) {
      BasisFamily fam(Mesh1D(0, 1, 3, p));
      const auto r = exact_gradient_reconstruction(ac.problem, ac.solution, fam, fl, grid);
      for (std::size_t k = 0; k < grid.size(); ++k)
        worst = std::max(worst, std::abs(fam.eval(r.u_bar, grid[k]) + r.u_prime[k] - ac.solution.value(grid[k])));
    }
  report(9, worst < 5e-4, "advection-diffusion exact-gradient reconstruction", "sup err " + sci(worst));
}

void iterative() {
  const AdvDiffCase ac = advdiff_const(1.0, 0.01);
  bool ok = true;
  std::string detail;
  for (auto [p, n] : {std::pair{2, 3}, std::pair{4, 2}}) {
    BasisFamily fam(Mesh1D(0, 1, n, p));
    VmsSettings s;
    s.w = 0.01;
    s.eps = 1e-8;
    VmsIteration it(ac.problem, fam, s);
    const IterationState st = it.run();
    const Field direct = project(it.mu(), ac.solution);
    double eb = 0, ep = 0;
    for (double x : uniform(400)) {
      const double b = fam.eval(st.u_bar, x);
      eb = std::max(eb, std::abs(b - fam.eval(direct, x)));
      ep = std::max(ep, std::abs(st.u_prime.value(x) - (ac.solution.value(x) - b)));
    }
    const bool case_ok = st.converged && eb < 5e-4 && ep < 5e-4;
    ok = ok && case_ok;
    if (!detail.empty()) detail += "; ";
    detail += "p=" + std::to_string(p) + " N=" + std::to_string(n) + (st.converged ? " converged" : " not converged") +
              " after " + std::to_string(st.iterations) + ", last increment " +
              sci(st.history.empty() ? 0.0 : st.history.back()) + ", u_bar err " + sci(eb) + ", u' err " + sci(ep);
  }
  report(10, ok, "iterative VMS at w = 0.01", detail);
}

void poisson_2d() {
  const PoissonCase2D pc = sin2pixy();
  const auto g = uniform(40);
  double worst = 0;
  for (int p : {1, 3}) {
    MuSet2D mu{Mesh2D(2, p)};
    const Field2D ub = project_2d(mu, pc.solution);
    FineScale2DConfig cfg;
    cfg.num_terms = 100;
    FineScale2D fs(mu, cfg);
    const Reconstruction2D r = fs.reconstruct(pc.source, ub, g, g);
    for (std::size_t i = 0; i < g.size(); ++i)
      for (std::size_t j = 0; j < g.size(); ++j)
        worst = std::max(worst,
                         std::abs(eval(mu.mesh(), ub, g[i], g[j]) + r.u_prime(i, j) - pc.solution.value(g[i], g[j])));
  }
  report(11, worst < 5e-3, "2D reconstruction", "sup err " + sci(worst));
}

void split_quadrature() {
  const auto op = poisson_op(2, 3, Flavor::H10);
  double worst = 0;
  Eigen::VectorXd a(op.size()), b(op.size());
  for (double s : uniform(100)) {
    op.mu_g_rows(s, a, KinkHandling::Split);
    op.mu_g_rows(s, b, KinkHandling::Naive);
    worst = std::max(worst, (a - b).cwiseAbs().maxCoeff());
  }
  const double rec = poisson_reconstruction_error(2, 3, Flavor::H10);
  report(12, worst > 1e-3 && rec < 1e-5, "split quadrature necessity",
         "naive vs split " + sci(worst) + ", split reconstruction err " + sci(rec));
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void determinism() {
  const char* bin = std::getenv("FSG_BIN");
  if (!bin) {
    report(13, false, "determinism", "FSG_BIN not set");
    return;
  }
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / ("fsg_accept_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const std::string args = " reconstruct --case advdiff-const --projection h10 --p 2 --elements 3 --c 1 --nu 0.01";
  int rc = 0;
  for (const char* name : {"a.csv", "b.csv"}) {
    const std::string cmd = std::string(bin) + args + " -o " + (dir / name).string() + " >/dev/null 2>&1";
    const int r = std::system(cmd.c_str());
    rc |= WIFEXITED(r) ? WEXITSTATUS(r) : 1;
  }
  const std::string a = slurp(dir / "a.csv"), b = slurp(dir / "b.csv");
  fs::remove_all(dir);
  report(13, rc == 0 && !a.empty() && a == b, "determinism",
         "exit " + std::to_string(rc) + ", " + std::to_string(a.size()) + " bytes, " + (a == b ? "identical" : "different"));
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  gll();
  dual_biorthogonality();
  mu_biorthogonality();
  source_shortcut();
  annihilation();
  resolved_basis();
  element_green();
  poisson_1d();
  exact_gradient();
  iterative();
  poisson_2d();
  split_quadrature();
  determinism();
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("%d of 13 criteria failed (%.1f s)\n", failures, secs);
  return failures == 0 ? 0 : 1;
}

#include "fsg/poisson2d.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fsg/dualspace.hpp"
#include "fsg/errors.hpp"
#include "fsg/projection.hpp"
#include "fsg/quadrature.hpp"

namespace fsg {

Mesh2D::Mesh2D(int num_elements, int degree) : family_(Mesh1D(0.0, 1.0, num_elements, degree)) {
  if (n1() < 1) throw InputError("Mesh2D: need at least one interior node per direction");
}

double Mesh2D::basis(int k, double x, double y) const {
  const int ix = k % n1(), iy = k / n1();
  return family_.nodal(ix + 1, x) * family_.nodal(iy + 1, y);
}

void Mesh2D::interior_values(double x, Eigen::Ref<Eigen::VectorXd> out) const {
  for (int i = 0; i < n1(); ++i) out[i] = family_.nodal(i + 1, x);
}

void Mesh2D::interior_derivs(double x, Eigen::Ref<Eigen::VectorXd> out) const {
  for (int i = 0; i < n1(); ++i) out[i] = family_.nodal_deriv(i + 1, x);
}

double Separable2D::value(double x, double y) const {
  double s = 0.0;
  for (const auto& t : terms) s += t.scale * t.x.value(x) * t.y.value(y);
  return s;
}

double eval(const Mesh2D& mesh, const Field2D& f, double x, double y) {
  const int n = mesh.n1();
  if (f.coeffs.size() != mesh.num_interior()) throw InputError("eval: Field2D size mismatch");
  Eigen::VectorXd vx(n), vy(n);
  mesh.interior_values(x, vx);
  mesh.interior_values(y, vy);
  const Eigen::Map<const Eigen::MatrixXd> u(f.coeffs.data(), n, n);
  return vx.dot(u * vy);
}

namespace {

// Visits tensor Gauss points of every element with the local basis values
// and derivatives in both directions.
template <class V>
void for_each_tensor_point(const Mesh2D& mesh, int points, V&& visit) {
  const BasisFamily& fam = mesh.family();
  const Mesh1D& m = mesh.mesh1d();
  const int p = m.degree();
  const QuadratureRule rule = QuadratureRule::gauss_legendre(points);
  const auto xi = rule.nodes();
  const auto wi = rule.weights();
  std::vector<std::array<double, 65>> v(points), d(points);
  for (int q = 0; q < points; ++q) {
    fam.ref_nodal(xi[q], v[q]);
    fam.ref_nodal_deriv(xi[q], d[q]);
  }
  for (int ey = 0; ey < m.num_elements(); ++ey)
    for (int ex = 0; ex < m.num_elements(); ++ex) {
      const double jx = m.jacobian(ex), jy = m.jacobian(ey);
      for (int qy = 0; qy < points; ++qy)
        for (int qx = 0; qx < points; ++qx) {
          const double x = m.to_physical(ex, xi[qx]);
          const double y = m.to_physical(ey, xi[qy]);
          visit(ex, ey, x, y, wi[qx] * wi[qy] * jx * jy, v[qx], d[qx], v[qy], d[qy], 1.0 / jx, 1.0 / jy, p);
        }
    }
}

}  // namespace

Eigen::MatrixXd stiffness_2d(const Mesh2D& mesh, int points) {
  const int n = mesh.n1();
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n * n, n * n);
  for_each_tensor_point(mesh, points,
                        [&](int ex, int ey, double, double, double w, const auto& vx, const auto& dx,
                            const auto& vy, const auto& dy, double ix, double iy, int p) {
                          for (int ry = 0; ry <= p; ++ry) {
                            const int gy = ey * p + ry - 1;
                            if (gy < 0 || gy >= n) continue;
                            for (int rx = 0; rx <= p; ++rx) {
                              const int gx = ex * p + rx - 1;
                              if (gx < 0 || gx >= n) continue;
                              const double ax = dx[rx] * ix * vy[ry], ay = vx[rx] * dy[ry] * iy;
                              for (int ty = 0; ty <= p; ++ty) {
                                const int hy = ey * p + ty - 1;
                                if (hy < 0 || hy >= n) continue;
                                for (int tx = 0; tx <= p; ++tx) {
                                  const int hx = ex * p + tx - 1;
                                  if (hx < 0 || hx >= n) continue;
                                  const double bx = dx[tx] * ix * vy[ty], by = vx[tx] * dy[ty] * iy;
                                  k(gx + n * gy, hx + n * hy) += w * (ax * bx + ay * by);
                                }
                              }
                            }
                          }
                        });
  return k;
}

Eigen::MatrixXd stiffness_2d_kron(const Mesh2D& mesh) {
  const BasisFamily& fam = mesh.family();
  const int n = mesh.n1();
  const StiffnessMatrix k1(fam);
  const Eigen::MatrixXd m1 = MassMatrix(fam, MassKind::Nodal).entries().block(1, 1, n, n);
  const Eigen::MatrixXd& k = k1.entries();
  Eigen::MatrixXd out(n * n, n * n);
  // row (ix + n iy), column (jx + n jy)
  for (int iy = 0; iy < n; ++iy)
    for (int jy = 0; jy < n; ++jy)
      out.block(n * iy, n * jy, n, n) = m1(iy, jy) * k + k(iy, jy) * m1;
  return out;
}

MuSet2D::MuSet2D(Mesh2D mesh) : mesh_(std::move(mesh)) {
  k_ = stiffness_2d(mesh_);
  Eigen::LLT<Eigen::MatrixXd> llt(k_);
  if (llt.info() != Eigen::Success) throw NumericalDefect("MuSet2D: stiffness matrix not positive definite");
  c_ = llt.solve(Eigen::MatrixXd::Identity(k_.rows(), k_.cols()));
}

double MuSet2D::value(int i, double x, double y) const {
  const int n = mesh_.n1();
  Eigen::VectorXd vx(n), vy(n);
  mesh_.interior_values(x, vx);
  mesh_.interior_values(y, vy);
  const Eigen::Map<const Eigen::MatrixXd> u(c_.col(i).data(), n, n);
  return vx.dot(u * vy);
}

Eigen::MatrixXd MuSet2D::biorthogonality(int points) const {
  return c_.transpose() * stiffness_2d(mesh_, points);
}

namespace {

void check_trace(const std::function<double(double, double)>& phi) {
  double worst = 0.0;
  for (int k = 0; k <= 40; ++k) {
    const double t = k / 40.0;
    for (double v : {phi(t, 0.0), phi(t, 1.0), phi(0.0, t), phi(1.0, t)}) worst = std::max(worst, std::abs(v));
  }
  if (worst > 1e-10) throw InputError("project_2d: function does not vanish on the boundary");
}

}  // namespace

Field2D project_2d(const MuSet2D& mu, const Function2D& phi, int points) {
  if (!phi.value || !phi.dx || !phi.dy) throw InputError("project_2d: value and gradient required");
  check_trace(phi.value);
  const int n = mu.mesh().n1();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n * n);
  for_each_tensor_point(mu.mesh(), points,
                        [&](int ex, int ey, double x, double y, double w, const auto& vx, const auto& dx,
                            const auto& vy, const auto& dy, double ix, double iy, int p) {
                          const double gx = phi.dx(x, y), gy = phi.dy(x, y);
                          for (int ry = 0; ry <= p; ++ry) {
                            const int ky = ey * p + ry - 1;
                            if (ky < 0 || ky >= n) continue;
                            for (int rx = 0; rx <= p; ++rx) {
                              const int kx = ex * p + rx - 1;
                              if (kx < 0 || kx >= n) continue;
                              rhs[kx + n * ky] += w * (dx[rx] * ix * vy[ry] * gx + vx[rx] * dy[ry] * iy * gy);
                            }
                          }
                        });
  return {mu.coefficients().transpose() * rhs};
}

Field2D project_2d_source(const MuSet2D& mu, const std::function<double(double, double)>& f, int points) {
  if (!f) throw InputError("project_2d_source: missing source");
  const int n = mu.mesh().n1();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n * n);
  for_each_tensor_point(mu.mesh(), points,
                        [&](int ex, int ey, double x, double y, double w, const auto& vx, const auto&,
                            const auto& vy, const auto&, double, double, int p) {
                          const double fv = f(x, y);
                          for (int ry = 0; ry <= p; ++ry) {
                            const int ky = ey * p + ry - 1;
                            if (ky < 0 || ky >= n) continue;
                            for (int rx = 0; rx <= p; ++rx) {
                              const int kx = ex * p + rx - 1;
                              if (kx < 0 || kx >= n) continue;
                              rhs[kx + n * ky] += w * vx[rx] * vy[ry] * fv;
                            }
                          }
                        });
  return {mu.coefficients().transpose() * rhs};
}

// ---------------------------------------------------------------------------
// Mode-space convolution

namespace {

constexpr double kPointTol = 1e-13;

struct ScanGrid {
  std::vector<double> y;
  std::vector<double> s, w;
  std::vector<int> start;  // inner points of cell c: [start[c], start[c+1])

  int find(double v) const {
    auto it = std::lower_bound(y.begin(), y.end(), v - kPointTol);
    if (it == y.end() || std::abs(*it - v) > kPointTol) throw InputError("point missing from the scan grid");
    return static_cast<int>(it - y.begin());
  }
};

ScanGrid make_scan_grid(std::vector<double> pts, int q) {
  pts.push_back(0.0);
  pts.push_back(1.0);
  std::sort(pts.begin(), pts.end());
  ScanGrid g;
  for (double v : pts) {
    if (!(v >= 0.0 && v <= 1.0)) throw InputError("scan grid: point outside [0, 1]");
    if (g.y.empty() || v - g.y.back() > kPointTol) g.y.push_back(v);
  }
  const QuadratureRule rule = QuadratureRule::gauss_legendre(q);
  g.start.push_back(0);
  for (std::size_t c = 0; c + 1 < g.y.size(); ++c) {
    const double a = g.y[c], b = g.y[c + 1], h = 0.5 * (b - a);
    for (int k = 0; k < q; ++k) {
      g.s.push_back(a + h * (rule.nodes()[k] + 1.0));
      g.w.push_back(h * rule.weights()[k]);
    }
    g.start.push_back(static_cast<int>(g.s.size()));
  }
  return g;
}

struct ModeTables {
  double kappa = 0.0;
  double denom = 0.0;
  std::vector<double> ef, eb;         // per inner point
  std::vector<double> step;           // per cell
  std::vector<double> ey, e1y, e1py;  // per grid point
};

ModeTables mode_tables(const ScanGrid& g, double kappa) {
  ModeTables t;
  t.kappa = kappa;
  t.denom = 2.0 * kappa * -std::expm1(-2.0 * kappa);
  const int cells = static_cast<int>(g.y.size()) - 1;
  t.ef.resize(g.s.size());
  t.eb.resize(g.s.size());
  t.step.resize(cells);
  for (int c = 0; c < cells; ++c) {
    const double a = g.y[c], b = g.y[c + 1];
    t.step[c] = std::exp(-kappa * (b - a));
    for (int k = g.start[c]; k < g.start[c + 1]; ++k) {
      t.ef[k] = g.w[k] * std::exp(-kappa * (b - g.s[k]));
      t.eb[k] = g.w[k] * std::exp(-kappa * (g.s[k] - a));
    }
  }
  for (double y : g.y) {
    t.ey.push_back(std::exp(-kappa * y));
    t.e1y.push_back(std::exp(-kappa * (1.0 - y)));
    t.e1py.push_back(std::exp(-kappa * (1.0 + y)));
  }
  return t;
}

struct ScanScratch {
  std::vector<double> fwd, bwd, l, r, f, h;
};

// (G_kappa d)(y_i) for a density sampled at the inner points and masses
// sitting on grid points.  Every exponent is non-positive.
void convolve(const ScanGrid& g, const ModeTables& t, std::span<const double> dens, std::span<const double> mass,
              std::span<double> out, ScanScratch& sc) {
  const int m = static_cast<int>(g.y.size());
  const int cells = m - 1;
  sc.fwd.assign(cells, 0.0);
  sc.bwd.assign(cells, 0.0);
  for (int c = 0; c < cells; ++c) {
    double a = 0.0, b = 0.0;
    for (int k = g.start[c]; k < g.start[c + 1]; ++k) {
      a += t.ef[k] * dens[k];
      b += t.eb[k] * dens[k];
    }
    sc.fwd[c] = a;
    sc.bwd[c] = b;
  }
  sc.l.resize(m);
  sc.r.resize(m);
  sc.f.resize(m);
  sc.h.resize(m);
  sc.l[0] = mass[0];
  sc.f[0] = t.e1py[0] * mass[0];
  for (int c = 0; c < cells; ++c) {
    sc.l[c + 1] = t.step[c] * sc.l[c] + sc.fwd[c] + mass[c + 1];
    sc.f[c + 1] = sc.f[c] + t.e1py[c] * sc.bwd[c] + t.e1py[c + 1] * mass[c + 1];
  }
  sc.r[m - 1] = 0.0;
  sc.h[m - 1] = 0.0;
  for (int c = cells - 1; c >= 0; --c) {
    sc.r[c] = t.step[c] * (sc.r[c + 1] + mass[c + 1]) + sc.bwd[c];
    sc.h[c] = sc.h[c + 1] + t.e1y[c + 1] * (mass[c + 1] + sc.fwd[c]);
  }
  double e0 = 0.0, e1 = 0.0;
  for (int i = 0; i < m; ++i) {
    e0 += t.ey[i] * mass[i];
    e1 += t.e1y[i] * mass[i];
  }
  for (int c = 0; c < cells; ++c) {
    e0 += t.ey[c] * sc.bwd[c];
    e1 += t.e1y[c + 1] * sc.fwd[c];
  }
  for (int i = 0; i < m; ++i)
    out[i] = (sc.l[i] + sc.r[i] - t.ey[i] * e0 - t.e1y[i] * e1 + t.e1y[i] * sc.f[i] + t.e1py[i] * sc.h[i]) /
             t.denom;
}

void check_distribution(const Distribution& d, const ScanGrid& g) {
  if (!d.dipoles.empty()) throw InputError("mode convolution: dipoles are not supported");
  for (double b : d.breakpoints) g.find(b);
  for (const auto& pm : d.masses) g.find(pm.at);
}

}  // namespace

std::vector<double> mode_convolve(double kappa, const Distribution& d, std::span<const double> ys,
                                  int scan_points) {
  if (!(kappa > 0)) throw InputError("mode_convolve: kappa must be positive");
  std::vector<double> pts(ys.begin(), ys.end());
  pts.insert(pts.end(), d.breakpoints.begin(), d.breakpoints.end());
  // keep kappa times the cell width below one
  const int cells = static_cast<int>(std::ceil(kappa));
  for (int k = 1; k < cells; ++k) pts.push_back(static_cast<double>(k) / cells);
  for (const auto& pm : d.masses) pts.push_back(pm.at);
  const ScanGrid g = make_scan_grid(pts, scan_points);
  check_distribution(d, g);
  std::vector<double> dens(g.s.size()), mass(g.y.size(), 0.0);
  for (std::size_t k = 0; k < g.s.size(); ++k) dens[k] = d.density_at(g.s[k]);
  for (const auto& pm : d.masses) mass[g.find(pm.at)] += pm.weight;
  std::vector<double> all(g.y.size());
  ScanScratch sc;
  convolve(g, mode_tables(g, kappa), dens, mass, all, sc);
  std::vector<double> out;
  for (double y : ys) out.push_back(all[g.find(y)]);
  return out;
}

// ---------------------------------------------------------------------------
// FineScale2D

namespace {

// A 1D factor sampled on the outer (pairing) points and inner scan points.
struct Factor {
  std::vector<double> outer, inner;
  std::vector<double> mass_on_grid;
  std::vector<PointMass> masses;
};

struct Layout {
  std::vector<double> on, ow;  // outer nodes and weights, both directions
  std::vector<int> on_grid;    // index of each outer node in the scan grid
  ScanGrid grid;
};

Layout make_layout(const Mesh1D& mesh, const FineScale2DConfig& cfg, std::span<const double> extra) {
  Layout lay;
  const double kmax = cfg.num_terms * std::numbers::pi;
  const QuadratureRule rule = QuadratureRule::gauss_legendre(cfg.cell_points);
  std::vector<double> pts(mesh.boundaries().begin(), mesh.boundaries().end());
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const int sub = std::max(1, static_cast<int>(std::ceil(kmax * mesh.width(e) / cfg.max_phase)));
    const double h = mesh.width(e) / sub;
    for (int j = 0; j < sub; ++j) {
      const double a = mesh.left(e) + j * h;
      for (int k = 0; k < rule.size(); ++k) {
        lay.on.push_back(a + 0.5 * h * (rule.nodes()[k] + 1.0));
        lay.ow.push_back(0.5 * h * rule.weights()[k]);
      }
    }
  }
  pts.insert(pts.end(), lay.on.begin(), lay.on.end());
  pts.insert(pts.end(), extra.begin(), extra.end());
  lay.grid = make_scan_grid(std::move(pts), cfg.scan_points);
  for (double v : lay.on) lay.on_grid.push_back(lay.grid.find(v));
  return lay;
}

Factor make_factor(const Distribution& d, const Layout& lay) {
  check_distribution(d, lay.grid);
  Factor f;
  f.outer.resize(lay.on.size());
  for (std::size_t q = 0; q < lay.on.size(); ++q) f.outer[q] = d.density_at(lay.on[q]);
  f.inner.resize(lay.grid.s.size());
  for (std::size_t q = 0; q < lay.grid.s.size(); ++q) f.inner[q] = d.density_at(lay.grid.s[q]);
  f.mass_on_grid.assign(lay.grid.y.size(), 0.0);
  for (const auto& pm : d.masses) f.mass_on_grid[lay.grid.find(pm.at)] += pm.weight;
  f.masses = d.masses;
  return f;
}

Distribution factor_distribution(const Function1D& fn, const Mesh1D& mesh) {
  if (!fn.value) throw InputError("separable source: missing factor");
  for (double b : fn.breakpoints) {
    bool on_boundary = false;
    for (double x : mesh.boundaries()) on_boundary |= std::abs(x - b) <= kPointTol;
    if (!on_boundary) throw InputError("separable source: breakpoints must lie on element boundaries");
  }
  return from_function(fn);
}

}  // namespace

struct FineScale2D::Solved {
  Eigen::MatrixXd ab;
  Eigen::VectorXd bb;
  // per mode: x transforms of b_i, b_i'' and the source x factors
  std::vector<Eigen::VectorXd> sb, sbb, sf;
  // per mode: (factor, output y) values of G_kappa applied to each factor
  std::vector<Eigen::MatrixXd> gout;
};

FineScale2D::FineScale2D(const MuSet2D& mu, FineScale2DConfig cfg) : mu_(mu), cfg_(cfg) {
  if (cfg_.num_terms < 1) throw InputError("FineScale2D: num_terms must be positive");
  if (cfg_.cell_points < 1 || cfg_.scan_points < 1 || !(cfg_.max_phase > 0))
    throw InputError("FineScale2D: invalid quadrature settings");
  ab_ = evaluate(Separable2D{}, nullptr, {}).ab;
  const Eigen::MatrixXd& c = mu_.coefficients();
  a_ = c.transpose() * ab_ * c;
  lu_.compute(a_);
  if (!(lu_.rcond() > 1e-14)) throw NumericalDefect("FineScale2D: mu G mu^T is singular");
}

FineScale2D::Solved FineScale2D::evaluate(const Separable2D& f, const Field2D* u_bar,
                                          std::span<const double> ys) const {
  const Mesh2D& mesh = mu_.mesh();
  const BasisFamily& fam = mesh.family();
  const int n = mesh.n1();
  const int nt = static_cast<int>(f.terms.size());
  const Layout lay = make_layout(mesh.mesh1d(), cfg_, ys);
  const ScanGrid& g = lay.grid;
  const int m = static_cast<int>(g.y.size());

  // factors: b_0..b_{n-1}, b_0''..b_{n-1}'', then source x and y factors
  std::vector<Factor> fac;
  for (int i = 0; i < n; ++i) {
    Distribution d;
    d.density = [&fam, i](double x) { return fam.nodal(i + 1, x); };
    fac.push_back(make_factor(d, lay));
  }
  for (int i = 0; i < n; ++i) {
    Field e;
    e.space = Space::Nodal;
    e.coeffs = Eigen::VectorXd::Zero(fam.mesh().num_nodal_dofs());
    e.coeffs[i + 1] = 1.0;
    fac.push_back(make_factor(second_derivative(fam, e), lay));
  }
  std::vector<Factor> fx;
  for (const auto& t : f.terms) {
    fx.push_back(make_factor(factor_distribution(t.x, mesh.mesh1d()), lay));
    fac.push_back(make_factor(factor_distribution(t.y, mesh.mesh1d()), lay));
  }
  const int nf = static_cast<int>(fac.size());

  Eigen::MatrixXd u = Eigen::MatrixXd::Zero(n, n);
  if (u_bar) {
    if (u_bar->coeffs.size() != n * n) throw InputError("FineScale2D: u_bar size mismatch");
    u = Eigen::Map<const Eigen::MatrixXd>(u_bar->coeffs.data(), n, n);
  }
  std::vector<int> yidx;
  for (double y : ys) yidx.push_back(g.find(y));

  Solved out;
  out.ab = Eigen::MatrixXd::Zero(n * n, n * n);
  out.bb = Eigen::VectorXd::Zero(n * n);
  const int nq = static_cast<int>(lay.on.size());
  Eigen::MatrixXd gval(nf, m);
  Eigen::MatrixXd pm(nf, nf);
  std::vector<double> sn(nq);
  std::vector<double> row(m);
  ScanScratch sc;

  auto sine = [&](const Factor& fa, int mode) {
    double s = 0.0;
    for (int q = 0; q < nq; ++q) s += lay.ow[q] * fa.outer[q] * sn[q];
    for (const auto& p : fa.masses) s += p.weight * sin_pi(mode * p.at);
    return s;
  };

  for (int mode = 1; mode <= cfg_.num_terms; ++mode) {
    const double kappa = mode * std::numbers::pi;
    const ModeTables tab = mode_tables(g, kappa);
    for (int q = 0; q < nq; ++q) sn[q] = sin_pi(mode * lay.on[q]);

    for (int a = 0; a < nf; ++a) {
      convolve(g, tab, fac[a].inner, fac[a].mass_on_grid, row, sc);
      for (int i = 0; i < m; ++i) gval(a, i) = row[i];
    }
    // pm(a, b) = <F_a, G_kappa F_b>
    for (int a = 0; a < nf; ++a)
      for (int b = 0; b < nf; ++b) {
        double s = 0.0;
        for (int q = 0; q < nq; ++q) s += lay.ow[q] * fac[a].outer[q] * gval(b, lay.on_grid[q]);
        for (int i = 0; i < m; ++i)
          if (fac[a].mass_on_grid[i] != 0.0) s += fac[a].mass_on_grid[i] * gval(b, i);
        pm(a, b) = s;
      }

    Eigen::VectorXd sb(n), sbb(n), sf(nt);
    for (int i = 0; i < n; ++i) {
      sb[i] = sine(fac[i], mode);
      sbb[i] = sine(fac[n + i], mode);
    }
    for (int t = 0; t < nt; ++t) sf[t] = f.terms[t].scale * sine(fx[t], mode);

    // <-lap B_k, G(-lap B_l)>, with -lap B = -(b'' x b + b x b'')
    for (int ly = 0; ly < n; ++ly)
      for (int lx = 0; lx < n; ++lx)
        for (int ky = 0; ky < n; ++ky)
          for (int kx = 0; kx < n; ++kx)
            out.ab(kx + n * ky, lx + n * ly) +=
                2.0 * (sbb[kx] * sbb[lx] * pm(ky, ly) + sbb[kx] * sb[lx] * pm(ky, n + ly) +
                       sb[kx] * sbb[lx] * pm(n + ky, ly) + sb[kx] * sb[lx] * pm(n + ky, n + ly));

    // y weights of the mode-n part of R = f + lap u_bar
    Eigen::VectorXd wy = Eigen::VectorXd::Zero(nf);
    wy.head(n) = u.transpose() * sbb;
    wy.segment(n, n) = u.transpose() * sb;
    wy.tail(nt) = sf;
    const Eigen::VectorXd qv = pm * wy;
    for (int ky = 0; ky < n; ++ky)
      for (int kx = 0; kx < n; ++kx) out.bb[kx + n * ky] -= 2.0 * (sbb[kx] * qv[ky] + sb[kx] * qv[n + ky]);

    if (!ys.empty()) {
      Eigen::MatrixXd go(nf, ys.size());
      for (int a = 0; a < nf; ++a)
        for (std::size_t j = 0; j < ys.size(); ++j) go(a, j) = gval(a, yidx[j]);
      out.gout.push_back(std::move(go));
      out.sb.push_back(sb);
      out.sbb.push_back(sbb);
      out.sf.push_back(sf);
    }
  }
  return out;
}

Reconstruction2D FineScale2D::reconstruct(const Separable2D& f, const Field2D& u_bar, std::span<const double> xs,
                                          std::span<const double> ys) const {
  for (double x : xs)
    if (!(x >= 0.0 && x <= 1.0)) throw InputError("reconstruct: x outside [0, 1]");
  const Solved s = evaluate(f, &u_bar, ys);
  const Eigen::MatrixXd& c = mu_.coefficients();
  const int n = mu_.mesh().n1();
  const int nt = static_cast<int>(f.terms.size());

  Reconstruction2D r;
  r.xs.assign(xs.begin(), xs.end());
  r.ys.assign(ys.begin(), ys.end());
  const Eigen::MatrixXd a = c.transpose() * s.ab * c;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  if (!(lu.rcond() > 1e-14)) throw NumericalDefect("reconstruct: mu G mu^T is singular");
  r.mu_g_r = c.transpose() * s.bb;
  r.weights = lu.solve(r.mu_g_r);
  const Eigen::VectorXd z = c * r.weights;
  const Eigen::MatrixXd wfield = Eigen::Map<const Eigen::MatrixXd>(u_bar.coeffs.data(), n, n) +
                                 Eigen::Map<const Eigen::MatrixXd>(z.data(), n, n);

  r.u_prime = Eigen::MatrixXd::Zero(xs.size(), ys.size());
  if (ys.empty()) return r;
  for (int mode = 1; mode <= cfg_.num_terms; ++mode) {
    const int k = mode - 1;
    Eigen::VectorXd wy(2 * n + nt);
    wy.head(n) = wfield.transpose() * s.sbb[k];
    wy.segment(n, n) = wfield.transpose() * s.sb[k];
    wy.tail(nt) = s.sf[k];
    const Eigen::RowVectorXd line = wy.transpose() * s.gout[k];
    for (std::size_t i = 0; i < xs.size(); ++i) r.u_prime.row(i) += (2.0 * sin_pi(mode * xs[i])) * line;
  }
  return r;
}

Eigen::MatrixXd FineScale2D::annihilation() const {
  // mu G' (-lap mu_i) = A e_i - A A^-1 A e_i
  return a_ - a_ * lu_.solve(a_);
}

}  // namespace fsg

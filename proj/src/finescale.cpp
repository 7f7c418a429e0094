#include "fsg/finescale.hpp"

#include <algorithm>
#include <cmath>

#include "fsg/errors.hpp"
#include "fsg/simd.hpp"

namespace fsg {

FineScaleOperator::FineScaleOperator(GreensKernel1D kernel, MuSet mu, FineScaleConfig cfg)
    : kernel_(kernel), mu_(std::move(mu)), cfg_(cfg), rule_(QuadratureRule::gauss_legendre(cfg.quad_points)) {
  const Mesh1D& m = mesh();
  if (m.a() != 0.0 || std::abs(m.b() - kernel_.length()) > 1e-14 * kernel_.length())
    throw InputError("fine-scale operator: kernel and mesh must share the domain [0, L]");
  if (cfg_.sample_points < 2) throw InputError("fine-scale operator: need at least two samples");

  const int n = size();
  functionals_.reserve(n);
  for (int i = 0; i < n; ++i) functionals_.push_back(mu_.functional(i));

  // Sample grid: uniform points plus the element boundaries.
  std::vector<double> g(cfg_.sample_points);
  for (int k = 0; k < cfg_.sample_points; ++k)
    g[k] = m.a() + (m.b() - m.a()) * k / (cfg_.sample_points - 1);
  g.back() = m.b();
  g.insert(g.end(), m.boundaries().begin(), m.boundaries().end());
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  grid_ = std::move(g);

  const int ns = static_cast<int>(grid_.size());
  val_.resize(n, ns);
  dleft_.resize(n, ns);
  dright_.resize(n, ns);
  const auto bounds = m.boundaries();
  for (int k = 0; k < ns; ++k) {
    const double t = grid_[k];
    const bool at_interface = t > m.a() && t < m.b() && std::binary_search(bounds.begin(), bounds.end(), t);
    const Side first = (k == 0) ? Side::Right : Side::Left;
    for (int i = 0; i < n; ++i) {
      const Both b = apply_both(functionals_[i], t, first, true);
      val_(i, k) = b.value;
      dleft_(i, k) = b.dx;
      dright_(i, k) = at_interface ? apply_both(functionals_[i], t, Side::Right, true).dx : b.dx;
    }
  }

  // A_ij = <mu_i, G mu_j> in the flavor pairing.
  a_ = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd mv(n), gm(n);
  const bool h10 = pairing() == Flavor::H10;
  for_each_quad_point(m, rule_, {}, [&](int e, double x, double w) {
    if (h10) mu_.derivs_in(e, x, mv);
    else mu_.values_in(e, x, mv);
    for (int j = 0; j < n; ++j) {
      const Both b = apply_both(functionals_[j], x, Side::Left, h10);
      gm[j] = h10 ? b.dx : b.value;
    }
    a_.noalias() += w * mv * gm.transpose();
  });
  lu_.compute(a_);
  lu_t_.compute(a_.transpose());
  const double rc = lu_.rcond();
  if (!(rc > 1e-14)) throw NumericalDefect("mu G mu^T is singular to working precision");
}

Side FineScaleOperator::owning_side(double x) const {
  return x == mesh().a() ? Side::Right : Side::Left;
}

std::vector<double> FineScaleOperator::cuts_with(std::span<const double> base, double x) const {
  std::vector<double> all(base.begin(), base.end());
  all.insert(all.end(), mesh().boundaries().begin(), mesh().boundaries().end());
  all.push_back(x);
  return interior_breakpoints(mesh().a(), mesh().b(), all);
}

FineScaleOperator::Both FineScaleOperator::apply_both(const Distribution& r, double x, Side side,
                                                      bool want_dx) const {
  Both out{0.0, 0.0};
  if (r.has_density()) {
    const std::vector<double> cuts = cuts_with(r.breakpoints, x);
    double lo = mesh().a();
    for (std::size_t k = 0; k <= cuts.size(); ++k) {
      const double hi = k < cuts.size() ? cuts[k] : mesh().b();
      const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
      double sv = 0.0, sd = 0.0;
      for (int q = 0; q < rule_.size(); ++q) {
        const double s = mid + half * rule_.nodes()[q];
        const double wr = rule_.weights()[q] * r.density(s);
        sv += wr * kernel_.value(x, s);
        if (want_dx) sd += wr * kernel_.dx(x, s, side);
      }
      out.value += half * sv;
      out.dx += half * sd;
      lo = hi;
    }
  }
  for (const PointMass& pm : r.masses) {
    out.value += pm.weight * kernel_.value(x, pm.at);
    if (want_dx) out.dx += pm.weight * kernel_.dx(x, pm.at, side);
  }
  // <delta'_a, g(x,.)> = -d/ds g(x,a)
  for (const Dipole& dp : r.dipoles) {
    out.value -= dp.weight * kernel_.ds(x, dp.at, side);
    if (want_dx) out.dx -= dp.weight * kernel_.dxds(x, dp.at, side);
  }
  return out;
}

double FineScaleOperator::green_apply(const Distribution& r, double x, Side side) const {
  return apply_both(r, x, side, false).value;
}

double FineScaleOperator::green_apply_dx(const Distribution& r, double x, Side side) const {
  return apply_both(r, x, side, true).dx;
}

double FineScaleOperator::g_mu_direct(int i, double x, Side side) const {
  if (i < 0 || i >= size()) throw InputError("mu index out of range");
  return green_apply(functionals_[i], x, side);
}

double FineScaleOperator::g_mu_direct_dx(int i, double x, Side side) const {
  if (i < 0 || i >= size()) throw InputError("mu index out of range");
  return green_apply_dx(functionals_[i], x, side);
}

void FineScaleOperator::g_mu_all(double x, Eigen::Ref<Eigen::VectorXd> out) const {
  if (!(x >= mesh().a() && x <= mesh().b())) throw InputError("G mu evaluated outside the mesh");
  const int ns = static_cast<int>(grid_.size());
  int k = static_cast<int>(std::upper_bound(grid_.begin(), grid_.end(), x) - grid_.begin()) - 1;
  k = std::clamp(k, 0, ns - 2);
  const double h = grid_[k + 1] - grid_[k];
  const double t = (x - grid_[k]) / h;
  const double t2 = t * t, t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
  const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
  out = h00 * val_.col(k) + (h10 * h) * dright_.col(k) + h01 * val_.col(k + 1) + (h11 * h) * dleft_.col(k + 1);
}

double FineScaleOperator::g_mu(int i, double x) const {
  if (i < 0 || i >= size()) throw InputError("mu index out of range");
  Eigen::VectorXd all(size());
  g_mu_all(x, all);
  return all[i];
}

Eigen::VectorXd FineScaleOperator::solve(const Eigen::VectorXd& rhs) const {
  if (rhs.size() != size()) throw InputError("mu G mu^T solve: dimension mismatch");
  return lu_.solve(rhs);
}

void FineScaleOperator::mu_g_rows(double s, Eigen::Ref<Eigen::VectorXd> out, KinkHandling k) const {
  const double cut[1] = {s};
  const std::span<const double> cuts = k == KinkHandling::Split ? std::span<const double>(cut, 1)
                                                                : std::span<const double>();
  out.setZero();
  Eigen::VectorXd v(size());
  const bool h10 = pairing() == Flavor::H10;
  for_each_quad_point(mesh(), rule_, cuts, [&](int e, double x, double w) {
    if (h10) {
      mu_.derivs_in(e, x, v);
      out += (w * kernel_.dx(x, s, Side::Left)) * v;
    } else {
      mu_.values_in(e, x, v);
      out += (w * kernel_.value(x, s)) * v;
    }
  });
}

double FineScaleOperator::mu_g_row(int i, double s, KinkHandling k) const {
  if (i < 0 || i >= size()) throw InputError("mu index out of range");
  Eigen::VectorXd all(size());
  mu_g_rows(s, all, k);
  return all[i];
}

Eigen::VectorXd FineScaleOperator::apply_mu_g(const Distribution& r, KinkHandling k) const {
  const int n = size();
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd row(n);
  if (r.has_density()) {
    std::vector<double> cuts = interior_breakpoints(mesh().a(), mesh().b(), r.breakpoints);
    for_each_quad_point(mesh(), rule_, cuts, [&](int, double s, double w) {
      mu_g_rows(s, row, k);
      acc += (w * r.density(s)) * row;
    });
  }
  for (const PointMass& pm : r.masses) {
    mu_g_rows(pm.at, row, k);
    acc += pm.weight * row;
  }
  if (!r.dipoles.empty()) {
    if (pairing() == Flavor::H10)
      throw InputError("H10 pairing is undefined for residuals with dipoles (field jumps)");
    Eigen::VectorXd v(n);
    for (const Dipole& dp : r.dipoles) {
      const double cut[1] = {dp.at};
      const auto cuts = interior_breakpoints(mesh().a(), mesh().b(), cut);
      for_each_quad_point(mesh(), rule_, cuts, [&](int e, double x, double w) {
        mu_.values_in(e, x, v);
        acc -= (w * dp.weight * kernel_.ds(x, dp.at, Side::Left)) * v;
      });
    }
  }
  return acc;
}

Eigen::VectorXd FineScaleOperator::pair_with(const std::function<double(double)>& value,
                                             const std::function<double(double)>& deriv,
                                             std::span<const double> kinks) const {
  const std::vector<double> cuts = interior_breakpoints(mesh().a(), mesh().b(), kinks);
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(size());
  Eigen::VectorXd v(size());
  const bool h10 = pairing() == Flavor::H10;
  for_each_quad_point(mesh(), rule_, cuts, [&](int e, double x, double w) {
    if (h10) {
      mu_.derivs_in(e, x, v);
      acc += (w * deriv(x)) * v;
    } else {
      mu_.values_in(e, x, v);
      acc += (w * value(x)) * v;
    }
  });
  return acc;
}

double FineScaleOperator::eval(double x, double s, KinkHandling k) const {
  const double xs[1] = {x};
  return eval_column(xs, s, k)[0];
}

std::vector<double> FineScaleOperator::eval_column(std::span<const double> xs, double s,
                                                   KinkHandling k) const {
  Eigen::VectorXd row(size());
  mu_g_rows(s, row, k);
  const Eigen::VectorXd c = lu_.solve(row);
  std::vector<double> out(xs.size());
  Eigen::VectorXd gm(size());
  for (std::size_t j = 0; j < xs.size(); ++j) {
    g_mu_all(xs[j], gm);
    out[j] = kernel_.value(xs[j], s) - gm.dot(c);
  }
  return out;
}

std::vector<double> FineScaleOperator::reconstruct(const Distribution& r, std::span<const double> grid,
                                                   KinkHandling k) const {
  const Eigen::VectorXd c = lu_.solve(apply_mu_g(r, k));
  std::vector<double> out(grid.size());
  Eigen::VectorXd gm(size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double x = grid[j];
    g_mu_all(x, gm);
    out[j] = green_apply(r, x, owning_side(x)) - gm.dot(c);
  }
  return out;
}

Eigen::VectorXd FineScaleOperator::resolved_basis(double x) const {
  Eigen::VectorXd gm(size());
  g_mu_all(x, gm);
  return lu_t_.solve(gm);
}

FineGrid::FineGrid(const Mesh1D& mesh, int cells, int points_per_cell) : q_(points_per_cell) {
  if (cells < 1 || points_per_cell < 1) throw InputError("fine grid: cells and points must be positive");
  const QuadratureRule rule = QuadratureRule::gauss_legendre(points_per_cell);
  const double len = mesh.b() - mesh.a();
  nodes_.push_back(mesh.a());
  element_nodes_.push_back(0);
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const int m = std::max(1, static_cast<int>(std::lround(cells * mesh.width(e) / len)));
    for (int j = 1; j <= m; ++j) {
      const double x = j == m ? mesh.right(e) : mesh.left(e) + mesh.width(e) * j / m;
      const double lo = nodes_.back();
      const double half = 0.5 * (x - lo), mid = 0.5 * (x + lo);
      const int c = static_cast<int>(nodes_.size()) - 1;
      for (int q = 0; q < rule.size(); ++q) {
        pts_.push_back(mid + half * rule.nodes()[q]);
        wts_.push_back(half * rule.weights()[q]);
        cell_.push_back(c);
        elem_.push_back(e);
      }
      cell_elem_.push_back(e);
      nodes_.push_back(x);
    }
    element_nodes_.push_back(static_cast<int>(nodes_.size()) - 1);
  }
}

FineGridApplicator::FineGridApplicator(const FineScaleOperator& op, const FineGrid& grid)
    : op_(op), grid_(grid), n_(op.size()) {
  if (op.kernel().kind() != KernelKind::Poisson)
    throw InputError("fine-grid applicator needs the Poisson kernel");
  const auto pts = grid_.points();
  const auto wts = grid_.weights();
  const std::size_t np = pts.size();
  mtab_.assign(static_cast<std::size_t>(n_) * np, 0.0);
  Eigen::VectorXd row(n_);
  for (std::size_t q = 0; q < np; ++q) {
    op.mu_g_rows(pts[q], row);
    for (int i = 0; i < n_; ++i) mtab_[i * np + q] = row[i];
  }
  const auto nodes = grid_.nodes();
  gtab_.assign(nodes.size() * n_, 0.0);
  for (std::size_t k = 0; k < nodes.size(); ++k)
    for (int i = 0; i < n_; ++i) gtab_[k * n_ + i] = op.g_mu_direct(i, nodes[k], op.owning_side(nodes[k]));
  const double L = op.kernel().length();
  s_w_.resize(np);
  r_w_.resize(np);
  for (std::size_t q = 0; q < np; ++q) {
    s_w_[q] = wts[q] * pts[q];
    r_w_[q] = wts[q] * (L - pts[q]);
  }
}

Eigen::VectorXd FineGridApplicator::apply_mu_g(std::span<const double> density,
                                               std::span<const PointMass> masses) const {
  const auto wts = grid_.weights();
  const std::size_t np = wts.size();
  if (density.size() != np) throw InputError("fine-grid residual: wrong number of values");
  std::vector<double> rw(np);
  for (std::size_t q = 0; q < np; ++q) rw[q] = wts[q] * density[q];
  Eigen::VectorXd b(n_);
  simd::gemv(mtab_.data(), n_, np, rw.data(), b.data());
  Eigen::VectorXd row(n_);
  for (const PointMass& pm : masses) {
    op_.mu_g_rows(pm.at, row);
    b += pm.weight * row;
  }
  return b;
}

std::vector<double> FineGridApplicator::apply(std::span<const double> density,
                                              std::span<const PointMass> masses) const {
  const Eigen::VectorXd c = op_.solve(apply_mu_g(density, masses));
  const auto nodes = grid_.nodes();
  const int cells = grid_.num_cells();
  const int q = grid_.points_per_cell();
  const double L = op_.kernel().length();
  // G r(t) = (L - t)/L int_0^t s r + t/L int_t^L (L - s) r
  std::vector<double> left(cells + 1, 0.0), right(cells + 1, 0.0);
  for (int c2 = 0; c2 < cells; ++c2)
    left[c2 + 1] = left[c2] + simd::dot(s_w_.data() + c2 * q, density.data() + c2 * q, q);
  for (int c2 = cells - 1; c2 >= 0; --c2)
    right[c2] = right[c2 + 1] + simd::dot(r_w_.data() + c2 * q, density.data() + c2 * q, q);
  std::vector<double> out(nodes.size());
  simd::gemv(gtab_.data(), nodes.size(), n_, c.data(), out.data());
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const double t = nodes[k];
    double gr = ((L - t) * left[k] + t * right[k]) / L;
    for (const PointMass& pm : masses) gr += pm.weight * op_.kernel().value(t, pm.at);
    out[k] = gr - out[k];
  }
  return out;
}

namespace {

// Derivative at xs[r] of the polynomial interpolating (xs, ys).
double interp_slope(std::span<const double> xs, std::span<const double> ys, std::size_t r) {
  const std::size_t n = xs.size();
  double s = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (j == r) {
      double d = 0.0;
      for (std::size_t m = 0; m < n; ++m)
        if (m != r) d += 1.0 / (xs[r] - xs[m]);
      s += ys[r] * d;
    } else {
      double num = 1.0, den = 1.0;
      for (std::size_t m = 0; m < n; ++m) {
        if (m != j) den *= xs[j] - xs[m];
        if (m != j && m != r) num *= xs[r] - xs[m];
      }
      s += ys[j] * num / den;
    }
  }
  return s;
}

}  // namespace

PiecewiseSpline::PiecewiseSpline(std::vector<double> nodes, std::vector<double> values,
                                 std::span<const int> break_nodes)
    : x_(std::move(nodes)), y_(std::move(values)), m_(x_.size(), 0.0) {
  if (x_.size() != y_.size() || x_.size() < 2) throw InputError("spline: need matching node/value lists");
  std::vector<int> br(break_nodes.begin(), break_nodes.end());
  if (br.empty() || br.front() != 0) br.insert(br.begin(), 0);
  if (br.back() != static_cast<int>(x_.size()) - 1) br.push_back(static_cast<int>(x_.size()) - 1);
  std::vector<double> cp, dp;
  for (std::size_t sgi = 0; sgi + 1 < br.size(); ++sgi) {
    const int b0 = br[sgi], b1 = br[sgi + 1];
    const int n = b1 - b0 + 1;
    const std::span<const double> xs(x_.data() + b0, n), ys(y_.data() + b0, n);
    if (n <= 3) {
      for (int r = 0; r < n; ++r) m_[b0 + r] = interp_slope(xs, ys, r);
      continue;
    }
    m_[b0] = interp_slope(xs.subspan(0, 4), ys.subspan(0, 4), 0);
    m_[b1] = interp_slope(xs.subspan(n - 4, 4), ys.subspan(n - 4, 4), 3);
    // Thomas algorithm on the interior slopes
    const int ni = n - 2;
    cp.assign(ni, 0.0);
    dp.assign(ni, 0.0);
    for (int r = 0; r < ni; ++r) {
      const int k = b0 + r + 1;
      const double hl = x_[k] - x_[k - 1], hr = x_[k + 1] - x_[k];
      const double dl = (y_[k] - y_[k - 1]) / hl, dr = (y_[k + 1] - y_[k]) / hr;
      double lower = hr, diag = 2.0 * (hl + hr), upper = hl;
      double rhs = 3.0 * (hr * dl + hl * dr);
      if (r == 0) rhs -= lower * m_[b0], lower = 0.0;
      if (r == ni - 1) rhs -= upper * m_[b1], upper = 0.0;
      if (r > 0) {
        diag -= lower * cp[r - 1];
        rhs -= lower * dp[r - 1];
      }
      cp[r] = upper / diag;
      dp[r] = rhs / diag;
    }
    for (int r = ni - 1; r >= 0; --r) {
      m_[b0 + r + 1] = dp[r] - (r + 1 < ni ? cp[r] * m_[b0 + r + 2] : 0.0);
    }
  }
}

int PiecewiseSpline::cell_of(double x) const {
  int c = static_cast<int>(std::upper_bound(x_.begin(), x_.end(), x) - x_.begin()) - 1;
  return std::clamp(c, 0, static_cast<int>(x_.size()) - 2);
}

double PiecewiseSpline::value_in(int c, double x) const {
  const double h = x_[c + 1] - x_[c];
  const double t = (x - x_[c]) / h;
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * y_[c] + (t3 - 2 * t2 + t) * h * m_[c] + (-2 * t3 + 3 * t2) * y_[c + 1] +
         (t3 - t2) * h * m_[c + 1];
}

double PiecewiseSpline::deriv_in(int c, double x) const {
  const double h = x_[c + 1] - x_[c];
  const double t = (x - x_[c]) / h;
  const double t2 = t * t;
  return ((6 * t2 - 6 * t) * (y_[c] - y_[c + 1])) / h + (3 * t2 - 4 * t + 1) * m_[c] + (3 * t2 - 2 * t) * m_[c + 1];
}

double PiecewiseSpline::value(double x) const { return value_in(cell_of(x), x); }
double PiecewiseSpline::deriv(double x) const { return deriv_in(cell_of(x), x); }

}  // namespace fsg

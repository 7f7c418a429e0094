#include "fsg/advdiff.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "fsg/errors.hpp"

namespace fsg {

double advdiff_exact(double x, double c, double nu, double length) {
  if (c == 0.0) return x * (length - x) / (2.0 * nu);
  if (c < 0.0) return advdiff_exact(length - x, -c, nu, length);
  const double k = c / nu;
  // (e^{k(x-L)} - e^{-kL}) / (1 - e^{-kL}), all exponents non-positive
  const double ratio = (std::exp(k * (x - length)) - std::exp(-k * length)) / -std::expm1(-k * length);
  return (x - length * ratio) / c;
}

double advdiff_exact_deriv(double x, double c, double nu, double length) {
  if (c == 0.0) return (length - 2.0 * x) / (2.0 * nu);
  if (c < 0.0) return -advdiff_exact_deriv(length - x, -c, nu, length);
  const double k = c / nu;
  return (1.0 - length * k * std::exp(k * (x - length)) / -std::expm1(-k * length)) / c;
}

AdvDiffProblem constant_source_problem(double c, double nu, double length) {
  AdvDiffProblem p;
  p.c = c;
  p.nu = nu;
  p.length = length;
  p.f.value = [](double) { return 1.0; };
  p.f.derivative = [](double) { return 0.0; };
  return p;
}

Function1D constant_source_solution(double c, double nu, double length) {
  Function1D u;
  u.value = [=](double x) { return advdiff_exact(x, c, nu, length); };
  u.derivative = [=](double x) { return advdiff_exact_deriv(x, c, nu, length); };
  return u;
}

Field galerkin_solve(const AdvDiffProblem& problem, const BasisFamily& family, const QuadratureRule& rule) {
  if (!(problem.nu > 0)) throw InputError("galerkin_solve: nu must be positive");
  const Mesh1D& mesh = family.mesh();
  const int p = mesh.degree();
  const int n = mesh.num_nodal_dofs() - 2;
  if (n < 1) throw InputError("galerkin_solve: need an interior node");
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  std::vector<double> cuts = problem.f.breakpoints;
  std::sort(cuts.begin(), cuts.end());
  std::array<double, 65> v{}, d{};
  for_each_quad_point(mesh, rule, cuts, [&](int e, double x, double w) {
    const double xi = mesh.to_reference(e, x);
    const double jac = mesh.jacobian(e);
    family.ref_nodal(xi, v);
    family.ref_nodal_deriv(xi, d);
    const double fx = problem.f.value(x);
    for (int r = 0; r <= p; ++r) {
      const int gr = e * p + r - 1;
      if (gr < 0 || gr >= n) continue;
      rhs[gr] += w * fx * v[r];
      // test function r, trial function t
      for (int t = 0; t <= p; ++t) {
        const int gt = e * p + t - 1;
        if (gt < 0 || gt >= n) continue;
        a(gr, gt) += w * (problem.c * d[t] / jac * v[r] + problem.nu * d[t] * d[r] / (jac * jac));
      }
    }
  });
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  if (!(lu.rcond() > 1e-14)) throw NumericalDefect("galerkin_solve: singular system");
  Field out;
  out.space = Space::Nodal;
  out.coeffs = Eigen::VectorXd::Zero(n + 2);
  out.coeffs.segment(1, n) = lu.solve(rhs);
  return out;
}

Field galerkin_solve(const AdvDiffProblem& problem, const BasisFamily& family) {
  return galerkin_solve(problem, family, QuadratureRule::gauss_legendre(kDefaultQuadPoints));
}

namespace {

Function1D advective_source(const AdvDiffProblem& problem, const Function1D& u_exact) {
  if (!u_exact.derivative) throw InputError("exact-gradient mode needs the derivative of the solution");
  Function1D r;
  const double c = problem.c, nu = problem.nu;
  r.value = [f = problem.f.value, du = u_exact.derivative, c, nu](double x) {
    return f(x) / nu - (c / nu) * du(x);
  };
  r.breakpoints = problem.f.breakpoints;
  r.breakpoints.insert(r.breakpoints.end(), u_exact.breakpoints.begin(), u_exact.breakpoints.end());
  std::sort(r.breakpoints.begin(), r.breakpoints.end());
  return r;
}

void check_domain(const AdvDiffProblem& problem, const Mesh1D& mesh) {
  if (!(problem.nu > 0)) throw InputError("advection-diffusion: nu must be positive");
  if (mesh.a() != 0.0 || std::abs(mesh.b() - problem.length) > 1e-14 * problem.length)
    throw InputError("advection-diffusion: mesh must cover [0, L]");
}

}  // namespace

ExactGradientResult exact_gradient_reconstruction(const AdvDiffProblem& problem, const Function1D& u_exact,
                                                  const BasisFamily& family, Flavor flavor,
                                                  std::span<const double> grid, FineScaleConfig cfg) {
  check_domain(problem, family.mesh());
  const QuadratureRule rule = QuadratureRule::gauss_legendre(cfg.quad_points);
  MuSet mu(family, flavor);
  ExactGradientResult out;
  out.u_bar = project(mu, u_exact, rule);
  FineScaleOperator op(GreensKernel1D::poisson(problem.length), std::move(mu), cfg);
  const Distribution r = from_function(advective_source(problem, u_exact)) + second_derivative(family, out.u_bar);
  out.grid.assign(grid.begin(), grid.end());
  out.u_prime = op.reconstruct(r, grid);
  return out;
}

VmsIteration::VmsIteration(AdvDiffProblem problem, BasisFamily family, VmsSettings settings)
    : problem_(std::move(problem)),
      family_(std::move(family)),
      settings_(settings),
      grid_(family_.mesh(), settings.fine_cells, settings.cell_points),
      mass_(family_, MassKind::Nodal) {
  check_domain(problem_, family_.mesh());
  if (!problem_.f.value) throw InputError("advection-diffusion: missing source");
  if (settings_.eps <= 0) throw InputError("vms: eps must be positive");
  if (settings_.max_iter < 1) throw InputError("vms: max_iter must be positive");
  if (settings_.w > 1.0) throw InputError("vms: relaxation must lie in (0, 1]");
  const double alpha = std::abs(problem_.alpha());
  w_ = settings_.w > 0 ? settings_.w : (alpha > 0.5 ? 1.0 / (2.0 * alpha) : 1.0);

  op_ = std::make_unique<FineScaleOperator>(GreensKernel1D::poisson(problem_.length),
                                            MuSet(family_, Flavor::H10), settings_.fine);
  applicator_ = std::make_unique<FineGridApplicator>(*op_, grid_);
  const MuSet& mu = op_->mu();
  const int n = mu.size();
  const int ndof = family_.mesh().num_nodal_dofs();
  const double nu = problem_.nu;

  Function1D f_nu{[f = problem_.f.value, nu](double x) { return f(x) / nu; }, {}, problem_.f.breakpoints};
  source_pair_ = pair_l2(mu, f_nu, op_->rule());

  const Mesh1D& mesh = family_.mesh();
  const int p = mesh.degree();
  mu_psi_ = Eigen::MatrixXd::Zero(n, ndof);
  Eigen::VectorXd dm(n);
  std::array<double, 65> v{}, d{}, dd{};
  for_each_quad_point(mesh, QuadratureRule::gauss_legendre(p + 2), {}, [&](int e, double x, double w) {
    mu.derivs_in(e, x, dm);
    family_.ref_nodal(mesh.to_reference(e, x), v);
    for (int l = 0; l <= p; ++l) mu_psi_.col(e * p + l) += (w * v[l]) * dm;
  });

  const auto pts = grid_.points();
  const auto wts = grid_.weights();
  const auto elem = grid_.point_element();
  const int np = static_cast<int>(pts.size());
  mud_w_.resize(n, np);
  psi_d_ = Eigen::MatrixXd::Zero(np, ndof);
  psi_dd_ = Eigen::MatrixXd::Zero(np, ndof);
  f_nu_.resize(np);
  for (int q = 0; q < np; ++q) {
    const int e = elem[q];
    const double x = pts[q];
    mu.derivs_in(e, x, dm);
    mud_w_.col(q) = wts[q] * dm;
    const double xi = mesh.to_reference(e, x);
    const double jac = mesh.jacobian(e);
    family_.ref_nodal_deriv(xi, d);
    family_.ref_nodal_second(xi, dd);
    for (int l = 0; l <= p; ++l) {
      psi_d_(q, e * p + l) = d[l] / jac;
      psi_dd_(q, e * p + l) = dd[l] / (jac * jac);
    }
    f_nu_[q] = problem_.f.value(x) / nu;
  }
}

PiecewiseSpline VmsIteration::make_fine(std::vector<double> node_values) const {
  const auto nodes = grid_.nodes();
  return PiecewiseSpline(std::vector<double>(nodes.begin(), nodes.end()), std::move(node_values),
                         grid_.element_nodes());
}

Eigen::VectorXd VmsIteration::coarse_update(const Field& u_bar, const PiecewiseSpline& u_prime) const {
  const auto pts = grid_.points();
  const auto cell = grid_.point_cell();
  Eigen::VectorXd up(pts.size());
  for (std::size_t q = 0; q < pts.size(); ++q) up[q] = u_prime.value_in(cell[q], pts[q]);
  const double cn = problem_.c / problem_.nu;
  return source_pair_ + cn * (mu_psi_ * u_bar.coeffs + mud_w_ * up);
}

std::vector<double> VmsIteration::fine_update(const Field& u_bar, const PiecewiseSpline& u_prime) const {
  const auto pts = grid_.points();
  const auto cell = grid_.point_cell();
  const Eigen::VectorXd d1 = psi_d_ * u_bar.coeffs;
  const Eigen::VectorXd d2 = psi_dd_ * u_bar.coeffs;
  const double cn = problem_.c / problem_.nu;
  std::vector<double> density(pts.size());
  for (std::size_t q = 0; q < pts.size(); ++q)
    density[q] = f_nu_[q] - cn * (d1[q] + u_prime.deriv_in(cell[q], pts[q])) + d2[q];
  // slope jumps of u_bar at interior interfaces
  const Mesh1D& mesh = family_.mesh();
  std::vector<PointMass> masses;
  for (int k = 1; k < mesh.num_elements(); ++k) {
    const double x = mesh.boundaries()[k];
    const double jump = family_.eval_deriv_in(u_bar, k, x) - family_.eval_deriv_in(u_bar, k - 1, x);
    masses.push_back({x, jump});
  }
  return applicator_->apply(density, masses);
}

double VmsIteration::l2_norm(const Eigen::VectorXd& nodal_coeffs) const {
  return std::sqrt(std::max(0.0, nodal_coeffs.dot(mass_.entries() * nodal_coeffs)));
}

IterationState VmsIteration::run() const {
  IterationState s;
  s.u_bar.space = Space::Nodal;
  s.u_bar.coeffs = Eigen::VectorXd::Zero(family_.mesh().num_nodal_dofs());
  s.u_prime = make_fine(std::vector<double>(grid_.nodes().size(), 0.0));
  return run_from(std::move(s), settings_.max_iter);
}

IterationState VmsIteration::run_from(IterationState s, int extra) const {
  const int n = op_->size();
  s.converged = false;
  for (int it = 0; it < extra; ++it) {
    const Eigen::VectorXd phi_bar = coarse_update(s.u_bar, s.u_prime);
    const std::vector<double> phi_fine = fine_update(s.u_bar, s.u_prime);
    Eigen::VectorXd step = Eigen::VectorXd::Zero(s.u_bar.coeffs.size());
    step.segment(1, n) = w_ * (phi_bar - s.u_bar.coeffs.segment(1, n));
    s.u_bar.coeffs += step;
    std::vector<double> v(s.u_prime.values().begin(), s.u_prime.values().end());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] += w_ * (phi_fine[k] - v[k]);
    s.u_prime = make_fine(std::move(v));
    ++s.iterations;
    const double norm = l2_norm(step);
    s.history.push_back(norm);
    if (norm < settings_.eps) {
      s.converged = true;
      break;
    }
  }
  return s;
}

}  // namespace fsg

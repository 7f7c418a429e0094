#pragma once

namespace fsg {

// Which one-sided limit to take when the field point sits on the source
// point: Left means x -> s from below.
enum class Side { Left, Right };

enum class KernelKind { Poisson, AdvectionDiffusion };

/// Green's functions with homogeneous Dirichlet conditions on [0, L] for
///   Poisson:                -u'' = f
///   advection-diffusion:    c u' - nu u'' = f
class GreensKernel1D {
 public:
  static GreensKernel1D poisson(double length = 1.0);
  static GreensKernel1D advection_diffusion(double c, double nu, double length);

  KernelKind kind() const { return kind_; }
  double length() const { return len_; }
  double c() const { return c_; }
  double nu() const { return nu_; }
  // c L / (2 nu); zero for the Poisson kernel
  double alpha() const;
  bool symmetric() const { return kind_ == KernelKind::Poisson; }

  double value(double x, double s) const;
  double dx(double x, double s, Side side = Side::Left) const;
  double ds(double x, double s, Side side = Side::Left) const;
  double dxds(double x, double s, Side side = Side::Left) const;

 private:
  GreensKernel1D(KernelKind kind, double c, double nu, double len) : kind_(kind), c_(c), nu_(nu), len_(len) {}
  void check(double x, double s) const;
  // derivative orders (ox, os) of the c > 0 kernel
  double advdiff(double x, double s, int ox, int os, bool left) const;
  double eval(double x, double s, int ox, int os, Side side) const;

  KernelKind kind_;
  double c_;
  double nu_;
  double len_;
};

double poisson1d_green(double x, double s);
double advdiff1d_green(double x, double s, double c, double nu, double h);

/// sin(pi t), exactly zero at integer t.
double sin_pi(double t);

/// Green's function of -v'' + kappa^2 v on [0,1] with v(0) = v(1) = 0,
/// in a form free of overflow for large kappa.
double mode_green(double kappa, double y, double s);

/// Truncated sine series for the Dirichlet Laplacian on the unit square.
double poisson2d_green(double x, double y, double s1, double s2, int num_terms = 100);

inline constexpr int kDefaultSeriesTerms = 100;

}  // namespace fsg

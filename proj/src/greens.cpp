#include "fsg/greens.hpp"

#include <cmath>
#include <numbers>

#include "fsg/errors.hpp"

namespace fsg {

GreensKernel1D GreensKernel1D::poisson(double length) {
  if (!(length > 0)) throw InputError("Poisson kernel: length must be positive");
  return GreensKernel1D(KernelKind::Poisson, 0.0, 1.0, length);
}

GreensKernel1D GreensKernel1D::advection_diffusion(double c, double nu, double length) {
  if (!(nu > 0)) throw InputError("advection-diffusion kernel: nu must be positive");
  if (c == 0.0 || !std::isfinite(c)) throw InputError("advection-diffusion kernel: c must be nonzero");
  if (!(length > 0)) throw InputError("advection-diffusion kernel: length must be positive");
  return GreensKernel1D(KernelKind::AdvectionDiffusion, c, nu, length);
}

double GreensKernel1D::alpha() const { return c_ * len_ / (2.0 * nu_); }

void GreensKernel1D::check(double x, double s) const {
  if (!(x >= 0.0 && x <= len_ && s >= 0.0 && s <= len_))
    throw InputError("Green's kernel evaluated outside its domain");
}

// c > 0.  With k = c/nu every exponential below has a non-positive argument.
double GreensKernel1D::advdiff(double x, double s, int ox, int os, bool left) const {
  const double k = c_ / nu_;
  const double L = len_;
  const double den = c_ * -std::expm1(-k * L);
  if (left) {
    const double ex = std::exp(k * (x - s));
    const double a = -std::expm1(-k * x);
    const double b = -std::expm1(-k * (L - s));
    if (ox == 0 && os == 0) return a * ex * b / den;
    if (ox == 1 && os == 0) return k * ex * b / den;
    if (ox == 0 && os == 1) return -k * a * ex / den;
    return -k * k * ex / den;
  }
  const double er = std::exp(-k * (L - x));
  const double es = std::exp(-k * s);
  if (ox == 0 && os == 0) return std::expm1(-k * (L - x)) * std::expm1(-k * s) / den;
  if (ox == 1 && os == 0) return -k * er * (-std::expm1(-k * s)) / den;
  if (ox == 0 && os == 1) return k * es * (-std::expm1(-k * (L - x))) / den;
  return -k * k * er * es / den;
}

double GreensKernel1D::eval(double x, double s, int ox, int os, Side side) const {
  check(x, s);
  const bool left = x < s || (x == s && side == Side::Left);
  if (kind_ == KernelKind::Poisson) {
    const double L = len_;
    if (ox == 0 && os == 0) return left ? x * (L - s) / L : s * (L - x) / L;
    if (ox == 1 && os == 0) return left ? (L - s) / L : -s / L;
    if (ox == 0 && os == 1) return left ? -x / L : (L - x) / L;
    return -1.0 / L;
  }
  if (c_ > 0) return advdiff(x, s, ox, os, left);
  // c < 0: reflect x -> L - x, which flips the advection direction
  GreensKernel1D mirror(KernelKind::AdvectionDiffusion, -c_, nu_, len_);
  const double sign = ((ox + os) % 2 == 0) ? 1.0 : -1.0;
  return sign * mirror.advdiff(len_ - x, len_ - s, ox, os, !left);
}

double GreensKernel1D::value(double x, double s) const { return eval(x, s, 0, 0, Side::Left); }
double GreensKernel1D::dx(double x, double s, Side side) const { return eval(x, s, 1, 0, side); }
double GreensKernel1D::ds(double x, double s, Side side) const { return eval(x, s, 0, 1, side); }
double GreensKernel1D::dxds(double x, double s, Side side) const { return eval(x, s, 1, 1, side); }

double poisson1d_green(double x, double s) { return GreensKernel1D::poisson(1.0).value(x, s); }

double advdiff1d_green(double x, double s, double c, double nu, double h) {
  return GreensKernel1D::advection_diffusion(c, nu, h).value(x, s);
}

double sin_pi(double t) {
  // exact zeros at the integers
  const double r = std::fmod(t, 2.0);
  if (r == 0.0 || r == 1.0 || r == -1.0) return 0.0;
  return std::sin(std::numbers::pi * r);
}

double mode_green(double kappa, double y, double s) {
  const double d = std::abs(y - s);
  const double t = y + s;
  const double num = std::exp(-kappa * d) - std::exp(-kappa * t) - std::exp(-kappa * (2.0 - t)) +
                     std::exp(-kappa * (2.0 - d));
  return num / (2.0 * kappa * -std::expm1(-2.0 * kappa));
}

double poisson2d_green(double x, double y, double s1, double s2, int num_terms) {
  for (double v : {x, y, s1, s2})
    if (!(v >= 0.0 && v <= 1.0)) throw InputError("poisson2d_green: point outside the unit square");
  if (num_terms < 1) throw InputError("poisson2d_green: num_terms must be positive");
  double sum = 0.0;
  for (int n = 1; n <= num_terms; ++n) {
    const double k = n * std::numbers::pi;
    sum += 2.0 * sin_pi(n * x) * sin_pi(n * s1) * mode_green(k, y, s2);
  }
  return sum;
}

}  // namespace fsg

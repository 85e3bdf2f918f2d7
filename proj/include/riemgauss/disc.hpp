#pragma once

#include "riemgauss/common.hpp"

// Poincare disc helpers shared by the Toeplitz and block-Toeplitz spaces.
// Distances use the atanh convention: d(0, a) = atanh|a|.
namespace riemgauss::disc {

double distance(Complex a, Complex b);

// Isometry taking 0 to a: w -> (w + a) / (1 + conj(a) w).
Complex translate(Complex a, Complex w);
// Inverse of translate(a, .).
Complex translate_inv(Complex a, Complex w);

Complex log0(Complex w);
Complex exp0(Complex v);

// Mobius action of a 2x2 matrix.
Complex mobius(const Eigen::Matrix2cd& u, Complex w);

// The SU(1,1) element u(a) with u(a).0 = a (a = tanh(rho) e^{i theta}).
Eigen::Matrix2cd su11_from_point(Complex a);
bool is_su11(const Eigen::Matrix2cd& u, double tol = 1e-10);

// Closed form of the disc integral
//   int_0^{2pi} int_R exp(-rho^2 / 2 sigma^2) sinh(k |rho|) d rho d theta
//   = (2 pi)^{3/2} sigma exp(k^2 sigma^2 / 2) erf(k sigma / sqrt 2).
double log_radial_integral(double sigma, double k);
// d/d sigma of log_radial_integral.
double dlog_radial_integral(double sigma, double k);

// Exact draw from the density proportional to exp(-rho^2 / 2 sigma^2) sinh(k |rho|).
double sample_sinh_radius(double sigma, double k, Rng& rng);

}  // namespace riemgauss::disc

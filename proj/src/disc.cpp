#include "riemgauss/disc.hpp"

#include <cmath>

namespace riemgauss::disc {

namespace {
constexpr double kEdge = 1.0 - 1e-12;

Complex clamp_to_disc(Complex w) {
    double a = std::abs(w);
    if (!std::isfinite(a)) throw NumericalError("disc point is not finite");
    if (a >= kEdge) return w * (kEdge / a);
    return w;
}
}  // namespace

double distance(Complex a, Complex b) {
    double num = std::abs(a - b);
    double den = std::abs(1.0 - std::conj(a) * b);
    if (num == 0.0) return 0.0;
    double q = num / den;
    if (q >= 1.0) throw NumericalError("disc distance: point on or outside the unit circle");
    return std::atanh(q);
}

Complex translate(Complex a, Complex w) { return clamp_to_disc((w + a) / (1.0 + std::conj(a) * w)); }

Complex translate_inv(Complex a, Complex w) { return (w - a) / (1.0 - std::conj(a) * w); }

Complex log0(Complex w) {
    double a = std::abs(w);
    if (a == 0.0) return 0.0;
    if (a >= 1.0) throw NumericalError("disc log: point outside the unit disc");
    return w * (std::atanh(a) / a);
}

Complex exp0(Complex v) {
    double a = std::abs(v);
    if (a == 0.0) return 0.0;
    return clamp_to_disc(v * (std::tanh(a) / a));
}

Complex mobius(const Eigen::Matrix2cd& u, Complex w) {
    return clamp_to_disc((u(0, 0) * w + u(0, 1)) / (u(1, 0) * w + u(1, 1)));
}

Eigen::Matrix2cd su11_from_point(Complex a) {
    double t = std::abs(a);
    if (t >= 1.0) throw ValidationError("su11_from_point: point outside the unit disc");
    double rho = std::atanh(t);
    double theta = std::arg(a);
    Complex ph = std::polar(1.0, theta / 2.0);
    Eigen::Matrix2cd u;
    u << ph * std::cosh(rho), ph * std::sinh(rho), std::conj(ph) * std::sinh(rho), std::conj(ph) * std::cosh(rho);
    return u;
}

bool is_su11(const Eigen::Matrix2cd& u, double tol) {
    Eigen::Matrix2cd k = Eigen::Matrix2cd::Zero();
    k(0, 0) = 1.0;
    k(1, 1) = -1.0;
    double scale = std::max(1.0, u.squaredNorm());
    if (std::abs(u.determinant() - 1.0) > tol * scale) return false;
    return (u.adjoint() * k * u - k).cwiseAbs().maxCoeff() <= tol * scale;
}

double log_radial_integral(double sigma, double k) {
    return 1.5 * std::log(2.0 * M_PI) + std::log(sigma) + 0.5 * k * k * sigma * sigma +
           std::log(std::erf(k * sigma * M_SQRT1_2));
}

double dlog_radial_integral(double sigma, double k) {
    double x = k * sigma * M_SQRT1_2;
    double derf = 2.0 / std::sqrt(M_PI) * std::exp(-x * x) * k * M_SQRT1_2;
    return 1.0 / sigma + k * k * sigma + derf / std::erf(x);
}

// On rho > 0, exp(-rho^2/2s^2) sinh(k rho) is proportional to
// N(k s^2, s^2) times (1 - exp(-2 k rho)), so draw the shifted normal
// truncated to rho > 0 and accept with probability 1 - exp(-2 k rho).
double sample_sinh_radius(double sigma, double k, Rng& rng) {
    if (!(sigma > 0.0)) throw ValidationError("radius sampler: sigma must be positive");
    double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
    double mu = k * sigma * sigma;
    for (;;) {
        double rho = mu + sigma * rng.normal();
        if (rho <= 0.0) continue;
        if (rng.uniform() < -std::expm1(-2.0 * k * rho)) return sign * rho;
    }
}

}  // namespace riemgauss::disc

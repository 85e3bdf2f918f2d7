#pragma once

#include "riemgauss/matfun.hpp"
#include "riemgauss/radial.hpp"

namespace riemgauss {

struct HpdPolar {
    RVector r;  // log-eigenvalues, descending
    CMatrix u;  // unitary
};

HpdPolar hpd_polar(const HermitianPD& y);

double hpd_distance(const HermitianPD& x, const HermitianPD& y);

double hpd_log_polar_density(const RVector& r, double sigma);
McEstimate hpd_z_montecarlo(int n, double sigma, const McConfig& cfg);
// Closed form of the same radial integral, from the Weyl denominator formula:
// n! (2 pi sigma^2)^{n/2} e^{sigma^2 |rho|^2} prod_{i<j} sinh(sigma^2 (j - i) / 2) / 2,
// rho = ((n-1)/2, ..., -(n-1)/2). For n = 2 this is pi sigma^2 (e^{sigma^2} - 1).
double hpd_logZ_closed_form(int n, double sigma);

RVector hpd_sample_polar_r(int n, double sigma, Rng& rng, const MhConfig& cfg = {});
HermitianPD hpd_sample(const HermitianPD& center, double sigma, Rng& rng, const MhConfig& cfg = {});

// Draws a stream of samples from G(center, sigma), keeping one MH chain.
class HpdSampler {
public:
    HpdSampler(const HermitianPD& center, double sigma, Rng rng, const MhConfig& cfg = {});
    HermitianPD next();
    const MhDiagnostics& diagnostics() const { return radial_.diagnostics(); }

private:
    CMatrix center_sqrt_;
    Rng rng_;
    RadialSampler radial_;
};

// Congruence action g Y g^H of GL(n, C).
HermitianPD hpd_act(const CMatrix& g, const HermitianPD& y);
void validate_hpd_group_element(const CMatrix& g, int n);

// Tangent vectors at X are stored pulled back to the identity:
// H = log(X^{-1/2} Y X^{-1/2}), Exp_X(H) = X^{1/2} exp(H) X^{1/2}.
CMatrix hpd_log_map(const HermitianPD& x, const HermitianPD& y);
HermitianPD hpd_exp_map(const HermitianPD& x, const CMatrix& h);

}  // namespace riemgauss

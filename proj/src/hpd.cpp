#include "riemgauss/hpd.hpp"

#include <algorithm>
#include <cmath>

namespace riemgauss {

HpdPolar hpd_polar(const HermitianPD& y) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(y.mat());
    const int n = y.n();
    HpdPolar p{RVector(n), CMatrix(n, n)};
    for (int k = 0; k < n; ++k) {
        p.r(k) = std::log(es.eigenvalues()(n - 1 - k));
        p.u.col(k) = es.eigenvectors().col(n - 1 - k);
    }
    return p;
}

double hpd_distance(const HermitianPD& x, const HermitianPD& y) {
    if (x.n() != y.n()) throw ValidationError("hpd_distance: dimension mismatch");
    Eigen::GeneralizedSelfAdjointEigenSolver<CMatrix> es(y.mat(), x.mat(), Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericalError("hpd_distance: eigen-solver failed");
    double s = 0.0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        double l = std::log(es.eigenvalues()(i));
        s += l * l;
    }
    return std::sqrt(s);
}

double hpd_log_polar_density(const RVector& r, double sigma) { return radial_log_density(RootSystem::A, r, sigma); }

McEstimate hpd_z_montecarlo(int n, double sigma, const McConfig& cfg) {
    return radial_z_estimate(RootSystem::A, n, sigma, cfg);
}

double hpd_logZ_closed_form(int n, double sigma) {
    if (n < 1 || !(sigma > 0.0)) throw ValidationError("hpd_logZ_closed_form: bad arguments");
    double s2 = sigma * sigma;
    double rho2 = n * (double(n) * n - 1.0) / 12.0;
    double l = std::lgamma(n + 1.0) + 0.5 * n * std::log(2.0 * M_PI * s2) + s2 * rho2;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) l += log_sinh(0.5 * s2 * (j - i)) - M_LN2;
    return l;
}

RVector hpd_sample_polar_r(int n, double sigma, Rng& rng, const MhConfig& cfg) {
    RadialSampler s(RootSystem::A, n, sigma, cfg, rng.substream(rng.next_u64()));
    RVector r = s.next();
    std::sort(r.data(), r.data() + r.size(), std::greater<double>());
    return r;
}

HpdSampler::HpdSampler(const HermitianPD& center, double sigma, Rng rng, const MhConfig& cfg)
    : center_sqrt_(hpd_sqrt(center.mat())),
      rng_(rng),
      radial_(RootSystem::A, center.n(), sigma, cfg, rng.substream(0x5eed)) {}

HermitianPD HpdSampler::next() {
    const int n = static_cast<int>(center_sqrt_.rows());
    CMatrix u = sample_unitary(n, rng_);
    RVector r = radial_.next();
    std::sort(r.data(), r.data() + r.size(), std::greater<double>());
    CMatrix y = u * r.array().exp().matrix().cast<Complex>().asDiagonal() * u.adjoint();
    CMatrix out = center_sqrt_ * y * center_sqrt_;
    return HermitianPD((out + out.adjoint()) * 0.5);
}

HermitianPD hpd_sample(const HermitianPD& center, double sigma, Rng& rng, const MhConfig& cfg) {
    HpdSampler s(center, sigma, rng.substream(rng.next_u64()), cfg);
    return s.next();
}

void validate_hpd_group_element(const CMatrix& g, int n) {
    if (g.rows() != n || g.cols() != n) throw ValidationError("HPD group element: wrong shape");
    if (!g.allFinite()) throw ValidationError("HPD group element: non-finite entries");
    Eigen::JacobiSVD<CMatrix> svd(g);
    const RVector& sv = svd.singularValues();
    if (!(sv(n - 1) > 1e-10 * sv(0))) throw ValidationError("HPD group element: matrix is not invertible");
}

HermitianPD hpd_act(const CMatrix& g, const HermitianPD& y) {
    validate_hpd_group_element(g, y.n());
    CMatrix out = g * y.mat() * g.adjoint();
    return HermitianPD((out + out.adjoint()) * 0.5);
}

CMatrix hpd_log_map(const HermitianPD& x, const HermitianPD& y) {
    if (x.n() != y.n()) throw ValidationError("hpd_log_map: dimension mismatch");
    CMatrix xi = hpd_inv_sqrt(x.mat());
    CMatrix m = xi * y.mat() * xi;
    return hpd_log((m + m.adjoint()) * 0.5);
}

HermitianPD hpd_exp_map(const HermitianPD& x, const CMatrix& h) {
    if (h.rows() != x.n() || h.cols() != x.n()) throw ValidationError("hpd_exp_map: tangent shape mismatch");
    CMatrix xs = hpd_sqrt(x.mat());
    CMatrix e = herm_exp((h + h.adjoint()) * 0.5);
    CMatrix out = xs * e * xs;
    if (!out.allFinite()) throw NumericalError("hpd_exp_map: overflow");
    return HermitianPD((out + out.adjoint()) * 0.5);
}

}  // namespace riemgauss

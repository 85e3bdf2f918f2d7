#include "riemgauss/matfun.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace riemgauss {

namespace {

double scale_of(const CMatrix& y) { return std::max(1.0, y.cwiseAbs().maxCoeff()); }

}  // namespace

bool is_hermitian(const CMatrix& y, double tol) {
    if (y.rows() != y.cols()) return false;
    if (!y.allFinite()) return false;
    return (y - y.adjoint()).cwiseAbs().maxCoeff() <= tol * scale_of(y);
}

bool is_symmetric(const CMatrix& y, double tol) {
    if (y.rows() != y.cols()) return false;
    if (!y.allFinite()) return false;
    return (y - y.transpose()).cwiseAbs().maxCoeff() <= tol * scale_of(y);
}

void require_hermitian(const CMatrix& y, const char* what) {
    if (y.size() == 0) throw ValidationError(std::string(what) + ": empty matrix");
    if (!is_hermitian(y)) throw ValidationError(std::string(what) + ": matrix is not Hermitian");
}

HermitianPD::HermitianPD(CMatrix m) {
    require_hermitian(m, "HermitianPD");
    // Remove rounding asymmetry so downstream eigen-solvers see an exact Hermitian matrix.
    CMatrix h = (m + m.adjoint()) * 0.5;
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0)
        throw ValidationError("HermitianPD: matrix is not positive definite");
    mat_ = std::move(h);
}

CMatrix hpd_sqrt(const CMatrix& y) {
    return hermitian_matfun(y, [](double l) { return l > 0 ? std::sqrt(l) : NAN; });
}

CMatrix hpd_inv_sqrt(const CMatrix& y) {
    return hermitian_matfun(y, [](double l) { return l > 0 ? 1.0 / std::sqrt(l) : NAN; });
}

CMatrix hpd_log(const CMatrix& y) {
    return hermitian_matfun(y, [](double l) { return l > 0 ? std::log(l) : NAN; });
}

CMatrix herm_exp(const CMatrix& y) {
    return hermitian_matfun(y, [](double l) { return std::exp(l); });
}

// For Omega = B + iC the real symmetric matrix [[B, C], [C, -B]] has eigenpairs
// (+s, [x; y]) and (-s, [-y; x]); u = x + iy then satisfies Omega conj(u) = s u.
// Vectors of the zero block are completed by Gram-Schmidt, which is valid because
// Omega annihilates conj(w) for any w orthogonal to the nonzero Takagi vectors.
Takagi takagi(const CMatrix& omega) {
    if (!is_symmetric(omega)) throw ValidationError("takagi: matrix is not complex symmetric");
    const Eigen::Index n = omega.rows();
    CMatrix om = (omega + omega.transpose()) * 0.5;
    RMatrix m(2 * n, 2 * n);
    RMatrix b = om.real();
    RMatrix c = om.imag();
    m << b, c, c, -b;
    Eigen::SelfAdjointEigenSolver<RMatrix> es(m);
    if (es.info() != Eigen::Success) throw NumericalError("takagi: eigendecomposition failed");

    const double tol = 1e-13 * std::max(1.0, std::abs(es.eigenvalues()(2 * n - 1)));
    Takagi out;
    out.theta = CMatrix::Zero(n, n);
    out.s = RVector::Zero(n);
    Eigen::Index k = 0;
    for (Eigen::Index i = 2 * n - 1; i >= n && k < n; --i) {
        double lam = es.eigenvalues()(i);
        if (lam <= tol) break;
        RVector v = es.eigenvectors().col(i);
        CVector u(n);
        for (Eigen::Index a = 0; a < n; ++a) u(a) = Complex(v(a), v(a + n));
        u.normalize();
        out.theta.col(k) = u;
        out.s(k) = lam;
        ++k;
    }
    // Complete to a unitary basis.
    for (Eigen::Index e = 0; e < n && k < n; ++e) {
        CVector w = CVector::Unit(n, e);
        for (int pass = 0; pass < 2; ++pass)
            for (Eigen::Index j = 0; j < k; ++j) w -= out.theta.col(j) * out.theta.col(j).dot(w);
        double nw = w.norm();
        if (nw < 1e-8) continue;
        out.theta.col(k) = w / nw;
        out.s(k) = 0.0;
        ++k;
    }
    return out;
}

SiegelPolar siegel_polar(const CMatrix& omega) {
    Takagi t = takagi(omega);
    if (t.s.size() > 0 && t.s(0) >= 1.0)
        throw ValidationError("point lies outside the Siegel disc (singular value >= 1)");
    SiegelPolar p{std::move(t.theta), RVector(t.s.size())};
    for (Eigen::Index i = 0; i < t.s.size(); ++i) p.r(i) = std::atanh(t.s(i));
    return p;
}

CMatrix sample_unitary(int n, Rng& rng) {
    if (n < 1) throw ValidationError("sample_unitary: n must be >= 1");
    for (;;) {
        CMatrix z(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) z(i, j) = rng.complex_normal();
        Eigen::HouseholderQR<CMatrix> qr(z);
        CMatrix q = qr.householderQ();
        const CMatrix& r = qr.matrixQR();
        bool ok = true;
        for (int i = 0; i < n; ++i) {
            double a = std::abs(r(i, i));
            if (a < 1e-12) {
                ok = false;
                break;
            }
            q.col(i) *= r(i, i) / a;
        }
        if (ok) return q;
    }
}

CMatrix sample_special_unitary(int n, Rng& rng) {
    CMatrix u = sample_unitary(n, rng);
    double phase = std::arg(u.determinant());
    return u * std::polar(1.0, -phase / n);
}

CMatrix exchange(int n) {
    CMatrix j = CMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i) j(i, n - 1 - i) = 1.0;
    return j;
}

}  // namespace riemgauss

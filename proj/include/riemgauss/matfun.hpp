#pragma once

#include <cmath>

#include "riemgauss/common.hpp"

namespace riemgauss {

// Hermitian positive definite matrix; the constructor validates.
class HermitianPD {
public:
    HermitianPD() = default;
    explicit HermitianPD(CMatrix m);
    static HermitianPD identity(int n) { return HermitianPD(CMatrix::Identity(n, n)); }

    int n() const { return static_cast<int>(mat_.rows()); }
    const CMatrix& mat() const { return mat_; }

private:
    CMatrix mat_;
};

bool is_hermitian(const CMatrix& y, double tol = 1e-12);
bool is_symmetric(const CMatrix& y, double tol = 1e-12);
void require_hermitian(const CMatrix& y, const char* what);

// U f(L) U^H for Hermitian Y = U L U^H. Throws ValidationError if f yields
// a non-finite value anywhere on the spectrum.
template <class F>
CMatrix hermitian_matfun(const CMatrix& y, F&& f) {
    require_hermitian(y, "hermitian_matfun");
    Eigen::SelfAdjointEigenSolver<CMatrix> es(y);
    if (es.info() != Eigen::Success) throw NumericalError("hermitian_matfun: eigendecomposition failed");
    RVector fl(es.eigenvalues().size());
    for (Eigen::Index i = 0; i < fl.size(); ++i) {
        fl(i) = f(es.eigenvalues()(i));
        if (!std::isfinite(fl(i)))
            throw ValidationError("hermitian_matfun: function undefined on the spectrum");
    }
    const CMatrix& u = es.eigenvectors();
    return u * fl.cast<Complex>().asDiagonal() * u.adjoint();
}

CMatrix hpd_sqrt(const CMatrix& y);
CMatrix hpd_inv_sqrt(const CMatrix& y);
CMatrix hpd_log(const CMatrix& y);
CMatrix herm_exp(const CMatrix& y);

struct Takagi {
    CMatrix theta;  // unitary
    RVector s;      // singular values, descending
};

// Omega = Theta diag(s) Theta^T for complex symmetric Omega.
Takagi takagi(const CMatrix& omega);

// Takagi with s mapped to r = atanh(s); throws if Omega is not strictly
// inside the Siegel disc.
struct SiegelPolar {
    CMatrix theta;
    RVector r;
};
SiegelPolar siegel_polar(const CMatrix& omega);

CMatrix sample_unitary(int n, Rng& rng);
CMatrix sample_special_unitary(int n, Rng& rng);

// Exchange matrix (ones on the anti-diagonal).
CMatrix exchange(int n);

}  // namespace riemgauss

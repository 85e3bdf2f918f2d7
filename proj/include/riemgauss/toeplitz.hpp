#pragma once

#include <vector>

#include "riemgauss/common.hpp"

namespace riemgauss {

// Reflection-coefficient coordinates of an n x n HPD Toeplitz matrix.
struct ToeplitzCoords {
    double r = 1.0;
    std::vector<Complex> alphas;  // n - 1 entries, |alpha| < 1

    int n() const { return static_cast<int>(alphas.size()) + 1; }
    static ToeplitzCoords identity(int n) { return {1.0, std::vector<Complex>(n - 1, 0.0)}; }
};

void validate(const ToeplitzCoords& c);

// Hermitian Toeplitz matrix with T(i, j) = col(i - j) for i >= j.
struct ToeplitzMatrix {
    CVector col;  // r_0 (real, positive) ... r_{n-1}

    int n() const { return static_cast<int>(col.size()); }
    CMatrix dense() const;
    static ToeplitzMatrix from_dense(const CMatrix& t);
};

ToeplitzMatrix coords_to_matrix(const ToeplitzCoords& c);
ToeplitzCoords matrix_to_coords(const ToeplitzMatrix& t);

double toeplitz_distance(const ToeplitzCoords& a, const ToeplitzCoords& b);

// log Z up to an additive constant. The disc factor has radial density
// exp(-rho^2 / 2 sigma^2) sinh(2 |rho|), which is the polar volume of the
// disc metric whose distance is atanh|alpha|.
double toeplitz_logZ(int n, double sigma);
// d log Z / d eta with eta = -1 / (2 sigma^2).
double toeplitz_psi_prime(int n, double sigma);

double disc_logZ(double sigma);
double toeplitz_sample_disc_radius(double sigma, Rng& rng);

ToeplitzCoords toeplitz_sample(const ToeplitzCoords& center, double sigma, Rng& rng);

// Scale times one SU(1,1) element per disc factor.
struct ToeplitzGroupElement {
    double scale = 1.0;
    std::vector<Eigen::Matrix2cd> us;
};

void validate(const ToeplitzGroupElement& g, int n);
ToeplitzCoords toeplitz_act(const ToeplitzGroupElement& g, const ToeplitzCoords& c);
ToeplitzGroupElement random_toeplitz_group_element(int n, Rng& rng);

// Tangent data expressed at the origin frame: t is the log-r increment,
// v are disc tangents pulled back to 0.
struct ToeplitzTangent {
    double t = 0.0;
    std::vector<Complex> v;
};

ToeplitzTangent toeplitz_log(const ToeplitzCoords& x, const ToeplitzCoords& y);
ToeplitzCoords toeplitz_exp(const ToeplitzCoords& x, const ToeplitzTangent& v);
double toeplitz_tangent_norm2(const ToeplitzTangent& v);

}  // namespace riemgauss

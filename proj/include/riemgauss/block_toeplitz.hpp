#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "riemgauss/radial.hpp"
#include "riemgauss/toeplitz.hpp"

namespace riemgauss {

// ---- Siegel disc: complex symmetric N x N matrices with |Omega| < 1 ----

void validate_siegel(const CMatrix& omega);

double siegel_distance(const CMatrix& phi, const CMatrix& psi);

// Canonical transvection taking 0 to `base`: W -> (A W + B)(conj(B) W + conj(A))^{-1}
// with A = (I - base base^*)^{-1/2}, B = A base.
CMatrix siegel_translate(const CMatrix& base, const CMatrix& w);
CMatrix siegel_translate_inv(const CMatrix& base, const CMatrix& y);
// The 2N x 2N symplectic matrix of siegel_translate(base, .).
CMatrix siegel_group_from_point(const CMatrix& base);

CMatrix siegel_log0(const CMatrix& omega);
CMatrix siegel_exp0(const CMatrix& v);

bool is_siegel_group_element(const CMatrix& u, double tol = 1e-10);
CMatrix siegel_act(const CMatrix& u, const CMatrix& omega);

double siegel_logdensity_polar(const RVector& r, double sigma);
McEstimate siegel_z_montecarlo(int N, double sigma, const McConfig& cfg);

// ---- Block-Toeplitz space ----

struct BlockToeplitzCoords {
    ToeplitzCoords p;             // the N x N Toeplitz block T_0
    std::vector<CMatrix> omegas;  // n - 1 Siegel points

    int n() const { return static_cast<int>(omegas.size()) + 1; }
    int N() const { return p.n(); }
    static BlockToeplitzCoords identity(int n, int N);
};

void validate(const BlockToeplitzCoords& c);

// Hermitian PD block-Toeplitz matrix (block (i, j) = T_{i-j}, T_{-k} = T_k^H)
// via the multichannel Levinson recursion. Symmetric Omega corresponds to
// persymmetric blocks (J T_k J = T_k^T), which for N <= 2 means Toeplitz blocks.
CMatrix block_coords_to_matrix(const BlockToeplitzCoords& c);
BlockToeplitzCoords block_matrix_to_coords(const CMatrix& t, int N);

double block_toeplitz_distance(const BlockToeplitzCoords& a, const BlockToeplitzCoords& b);

// log Z_{T_N}(sigma / sqrt n) + sum_j log Z_{D_N}(sigma / sqrt(n - j)); the
// Siegel factor values come from `siegel_logZ`.
double block_toeplitz_logZ(int n, int N, double sigma, const std::function<double(double)>& siegel_logZ);

class BlockToeplitzSampler {
public:
    BlockToeplitzSampler(const BlockToeplitzCoords& center, double sigma, Rng rng, const MhConfig& cfg = {});
    BlockToeplitzCoords next();
    bool diagnostics_ok() const;
    std::vector<MhDiagnostics> diagnostics() const;

private:
    BlockToeplitzCoords center_;
    double sigma_;
    Rng rng_;
    std::vector<std::unique_ptr<RadialSampler>> chains_;
};

BlockToeplitzCoords block_toeplitz_sample(const BlockToeplitzCoords& center, double sigma, Rng& rng,
                                          const MhConfig& cfg = {});

struct BlockGroupElement {
    ToeplitzGroupElement p;
    std::vector<CMatrix> us;  // 2N x 2N symplectic matrices
};

void validate(const BlockGroupElement& g, int n, int N);
BlockToeplitzCoords block_act(const BlockGroupElement& g, const BlockToeplitzCoords& c);
BlockGroupElement random_block_group_element(int n, int N, Rng& rng);

struct BlockTangent {
    ToeplitzTangent p;
    std::vector<CMatrix> v;  // symmetric, pulled back to the origin
};

BlockTangent block_log(const BlockToeplitzCoords& x, const BlockToeplitzCoords& y);
BlockToeplitzCoords block_exp(const BlockToeplitzCoords& x, const BlockTangent& v);
double block_tangent_norm2(const BlockTangent& v);

}  // namespace riemgauss

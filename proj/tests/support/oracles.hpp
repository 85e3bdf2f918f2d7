#pragma once
// Test-side reference computations. Deliberately built from different
// numerical routes than the library (dense solves, plain SVD, brute-force
// quadrature) so that agreement is evidence rather than tautology.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

namespace oracle {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;

// Composite Gauss-Legendre on [a, b] with `panels` panels of 8 nodes.
inline double integrate(const std::function<double(double)>& f, double a, double b, int panels = 400) {
    static const double x[8] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
                                0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
    static const double w[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
                                0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};
    double h = (b - a) / panels, s = 0.0;
    for (int p = 0; p < panels; ++p) {
        double c = a + (p + 0.5) * h;
        for (int k = 0; k < 8; ++k) s += w[k] * f(c + 0.5 * h * x[k]);
    }
    return s * 0.5 * h;
}

inline double integrate2(const std::function<double(double, double)>& f, double a, double b, int panels = 120) {
    return integrate([&](double u) { return integrate([&](double v) { return f(u, v); }, a, b, panels); }, a, b, panels);
}

inline double integrate3(const std::function<double(double, double, double)>& f, double a, double b, int panels = 40) {
    return integrate(
        [&](double u) {
            return integrate([&](double v) { return integrate([&](double w) { return f(u, v, w); }, a, b, panels); },
                             a, b, panels);
        },
        a, b, panels);
}

// HPD: sum of squared logs of the eigenvalues of X^{-1} Y, from a general
// (non-Hermitian) eigensolver.
inline double hpd_distance(const CMatrix& x, const CMatrix& y) {
    CMatrix m = x.lu().solve(y);
    Eigen::ComplexEigenSolver<CMatrix> es(m);
    double s = 0.0;
    for (Eigen::Index i = 0; i < m.rows(); ++i) s += std::pow(std::log(std::abs(es.eigenvalues()(i))), 2);
    return std::sqrt(s);
}

// Verblunsky-type coefficients of a Toeplitz HPD matrix by solving, for each
// order m, the normal equations sum_{i=0}^m a_i conj(r_{k-i}) = 0 (k = 1..m)
// with a_0 = 1 directly; alpha_m is a_m.
inline std::vector<Complex> reflection_coefficients(const Eigen::VectorXcd& col) {
    const int n = static_cast<int>(col.size());
    auto r = [&](int k) { return k >= 0 ? col(k) : std::conj(col(-k)); };
    std::vector<Complex> out;
    for (int m = 1; m < n; ++m) {
        CMatrix A(m, m);
        Eigen::VectorXcd b(m);
        for (int k = 1; k <= m; ++k) {
            for (int i = 1; i <= m; ++i) A(k - 1, i - 1) = std::conj(r(k - i));
            b(k - 1) = -std::conj(r(k));
        }
        Eigen::VectorXcd a = A.fullPivLu().solve(b);
        out.push_back(a(m - 1));
    }
    return out;
}

// Distance on the Siegel disc from the singular values of the canonical
// transvection of psi to the origin, written out with explicit matrix
// square roots.
inline CMatrix herm_pow(const CMatrix& h, double p) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
    Eigen::VectorXd l = es.eigenvalues().array().pow(p);
    return es.eigenvectors() * l.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
}

inline double siegel_distance(const CMatrix& phi, const CMatrix& psi) {
    const Eigen::Index N = phi.rows();
    CMatrix I = CMatrix::Identity(N, N);
    CMatrix a = herm_pow(I - phi * phi.adjoint(), -0.5);
    CMatrix b = herm_pow(I - phi.adjoint() * phi, 0.5);
    CMatrix w = a * (psi - phi) * (I - phi.adjoint() * psi).inverse() * b;
    Eigen::JacobiSVD<CMatrix> svd(w);
    double s = 0.0;
    for (Eigen::Index i = 0; i < N; ++i) s += std::pow(std::atanh(std::min(svd.singularValues()(i), 1.0 - 1e-16)), 2);
    return std::sqrt(s);
}

inline double disc_distance(Complex a, Complex b) { return std::atanh(std::abs((a - b) / (1.0 - std::conj(a) * b))); }

// Block Toeplitz matrix from its first block column T_0..T_{n-1} (T_{-k} = T_k^H).
inline CMatrix block_toeplitz(const std::vector<CMatrix>& blocks) {
    const int n = static_cast<int>(blocks.size());
    const Eigen::Index N = blocks[0].rows();
    CMatrix t(n * N, n * N);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) t.block(i * N, j * N, N, N) = i >= j ? blocks[i - j] : CMatrix(blocks[j - i].adjoint());
    return t;
}

inline double log_abs_det(const CMatrix& m) {
    Eigen::PartialPivLU<CMatrix> lu(m);
    double s = 0.0;
    for (Eigen::Index i = 0; i < m.rows(); ++i) s += std::log(std::abs(lu.matrixLU()(i, i)));
    return s;
}

// Sample mean and its standard error from non-overlapping batch means.
inline std::pair<double, double> batch_mean_se(const std::vector<double>& xs, int batches = 100) {
    size_t per = xs.size() / batches;
    std::vector<double> m(batches, 0.0);
    for (int b = 0; b < batches; ++b) {
        for (size_t k = 0; k < per; ++k) m[b] += xs[b * per + k];
        m[b] /= double(per);
    }
    double mu = 0.0;
    for (double v : m) mu += v;
    mu /= batches;
    double var = 0.0;
    for (double v : m) var += (v - mu) * (v - mu);
    var /= (batches - 1);
    return {mu, std::sqrt(var / batches)};
}

}  // namespace oracle

#include "riemgauss/toeplitz.hpp"

#include <cmath>

#include "riemgauss/disc.hpp"
#include "riemgauss/matfun.hpp"

namespace riemgauss {

void validate(const ToeplitzCoords& c) {
    if (!(c.r > 0.0) || !std::isfinite(c.r)) throw ValidationError("Toeplitz coords: r must be positive and finite");
    for (const Complex& a : c.alphas)
        if (!(std::abs(a) < 1.0)) throw ValidationError("Toeplitz coords: reflection coefficient outside the unit disc");
}

CMatrix ToeplitzMatrix::dense() const {
    const int m = n();
    CMatrix t(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) t(i, j) = i >= j ? col(i - j) : std::conj(col(j - i));
    return t;
}

ToeplitzMatrix ToeplitzMatrix::from_dense(const CMatrix& t) {
    require_hermitian(t, "ToeplitzMatrix");
    const Eigen::Index m = t.rows();
    double tol = 1e-12 * std::max(1.0, t.cwiseAbs().maxCoeff());
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < m; ++j)
            if (std::abs(t(i, j) - (i >= j ? t(i - j, 0) : std::conj(t(j - i, 0)))) > tol)
                throw ValidationError("matrix is not Toeplitz");
    ToeplitzMatrix out{t.col(0)};
    out.col(0) = out.col(0).real();
    return out;
}

// Levinson recursion with the forward predictor a (a_0 = 1), prediction
// error delta, and alpha_m = -Delta_m / delta_{m-1},
//   Delta_m = sum_{i<m} a_i conj(r_{m-i}).
ToeplitzCoords matrix_to_coords(const ToeplitzMatrix& t) {
    const int n = t.n();
    if (n < 1) throw ValidationError("matrix_to_coords: empty matrix");
    double r0 = t.col(0).real();
    if (!(r0 > 0.0)) throw ValidationError("matrix_to_coords: matrix is not positive definite");
    ToeplitzCoords c{r0, {}};
    std::vector<Complex> a{1.0};
    double delta = r0;
    for (int m = 1; m < n; ++m) {
        Complex d = 0.0;
        for (int i = 0; i < m; ++i) d += a[i] * std::conj(t.col(m - i));
        Complex alpha = -d / delta;
        if (!(std::abs(alpha) < 1.0)) throw ValidationError("matrix_to_coords: matrix is not positive definite");
        std::vector<Complex> next(m + 1);
        for (int k = 0; k <= m; ++k) {
            Complex ak = k < m ? a[k] : 0.0;
            Complex bk = k > 0 ? std::conj(a[m - k]) : 0.0;
            next[k] = ak + alpha * bk;
        }
        a.swap(next);
        delta *= 1.0 - std::norm(alpha);
        if (!(delta > 0.0)) throw ValidationError("matrix_to_coords: matrix is not positive definite");
        c.alphas.push_back(alpha);
    }
    return c;
}

ToeplitzMatrix coords_to_matrix(const ToeplitzCoords& c) {
    validate(c);
    const int n = c.n();
    ToeplitzMatrix t{CVector::Zero(n)};
    t.col(0) = c.r;
    std::vector<Complex> a{1.0};
    double delta = c.r;
    for (int m = 1; m < n; ++m) {
        Complex alpha = c.alphas[m - 1];
        Complex d = -alpha * delta;
        Complex s = d;
        for (int i = 1; i < m; ++i) s -= a[i] * std::conj(t.col(m - i));
        t.col(m) = std::conj(s);
        std::vector<Complex> next(m + 1);
        for (int k = 0; k <= m; ++k) {
            Complex ak = k < m ? a[k] : 0.0;
            Complex bk = k > 0 ? std::conj(a[m - k]) : 0.0;
            next[k] = ak + alpha * bk;
        }
        a.swap(next);
        delta *= 1.0 - std::norm(alpha);
    }
    return t;
}

double toeplitz_distance(const ToeplitzCoords& a, const ToeplitzCoords& b) {
    if (a.n() != b.n()) throw ValidationError("toeplitz_distance: size mismatch");
    validate(a);
    validate(b);
    const int n = a.n();
    double lr = std::log(b.r) - std::log(a.r);
    double d2 = n * lr * lr;
    for (int j = 1; j < n; ++j) {
        double dj = disc::distance(a.alphas[j - 1], b.alphas[j - 1]);
        d2 += (n - j) * dj * dj;
    }
    return std::sqrt(d2);
}

double disc_logZ(double sigma) { return disc::log_radial_integral(sigma, 2.0); }

double toeplitz_logZ(int n, double sigma) {
    if (!(sigma > 0.0)) throw ValidationError("toeplitz_logZ: sigma must be positive");
    double z = std::log(sigma / std::sqrt(double(n)));
    for (int j = 1; j < n; ++j) z += disc_logZ(sigma / std::sqrt(double(n - j)));
    return z;
}

double toeplitz_psi_prime(int n, double sigma) {
    if (!(sigma > 0.0)) throw ValidationError("toeplitz_psi_prime: sigma must be positive");
    double dlog = 1.0 / sigma;
    for (int j = 1; j < n; ++j) {
        double c = std::sqrt(double(n - j));
        dlog += disc::dlog_radial_integral(sigma / c, 2.0) / c;
    }
    // d sigma / d eta = sigma^3
    return sigma * sigma * sigma * dlog;
}

double toeplitz_sample_disc_radius(double sigma, Rng& rng) { return disc::sample_sinh_radius(sigma, 2.0, rng); }

ToeplitzCoords toeplitz_sample(const ToeplitzCoords& center, double sigma, Rng& rng) {
    validate(center);
    if (!(sigma > 0.0)) throw ValidationError("toeplitz_sample: sigma must be positive");
    const int n = center.n();
    ToeplitzCoords out;
    out.r = std::exp(std::log(center.r) + sigma / std::sqrt(double(n)) * rng.normal());
    out.alphas.resize(n - 1);
    for (int j = 1; j < n; ++j) {
        double theta = 2.0 * M_PI * rng.uniform();
        double rho = toeplitz_sample_disc_radius(sigma / std::sqrt(double(n - j)), rng);
        Complex w = std::polar(std::tanh(rho), theta);
        out.alphas[j - 1] = disc::translate(center.alphas[j - 1], w);
    }
    return out;
}

void validate(const ToeplitzGroupElement& g, int n) {
    if (!(g.scale > 0.0)) throw ValidationError("Toeplitz group element: scale must be positive");
    if (static_cast<int>(g.us.size()) != n - 1) throw ValidationError("Toeplitz group element: wrong number of factors");
    for (const auto& u : g.us)
        if (!disc::is_su11(u)) throw ValidationError("Toeplitz group element: factor is not in SU(1,1)");
}

ToeplitzCoords toeplitz_act(const ToeplitzGroupElement& g, const ToeplitzCoords& c) {
    validate(c);
    validate(g, c.n());
    ToeplitzCoords out{g.scale * c.r, c.alphas};
    for (size_t j = 0; j < out.alphas.size(); ++j) out.alphas[j] = disc::mobius(g.us[j], c.alphas[j]);
    return out;
}

ToeplitzGroupElement random_toeplitz_group_element(int n, Rng& rng) {
    ToeplitzGroupElement g;
    g.scale = std::exp(rng.normal());
    for (int j = 1; j < n; ++j) {
        Complex a = std::polar(std::tanh(std::abs(rng.normal())), 2.0 * M_PI * rng.uniform());
        double phi = 2.0 * M_PI * rng.uniform();
        Eigen::Matrix2cd rot = Eigen::Matrix2cd::Zero();
        rot(0, 0) = std::polar(1.0, phi / 2.0);
        rot(1, 1) = std::polar(1.0, -phi / 2.0);
        g.us.push_back(disc::su11_from_point(a) * rot);
    }
    return g;
}

ToeplitzTangent toeplitz_log(const ToeplitzCoords& x, const ToeplitzCoords& y) {
    if (x.n() != y.n()) throw ValidationError("toeplitz_log: size mismatch");
    ToeplitzTangent v{std::log(y.r / x.r), {}};
    v.v.resize(x.alphas.size());
    for (size_t j = 0; j < x.alphas.size(); ++j) v.v[j] = disc::log0(disc::translate_inv(x.alphas[j], y.alphas[j]));
    return v;
}

ToeplitzCoords toeplitz_exp(const ToeplitzCoords& x, const ToeplitzTangent& v) {
    if (v.v.size() != x.alphas.size()) throw ValidationError("toeplitz_exp: tangent shape mismatch");
    ToeplitzCoords y{x.r * std::exp(v.t), x.alphas};
    for (size_t j = 0; j < x.alphas.size(); ++j) y.alphas[j] = disc::translate(x.alphas[j], disc::exp0(v.v[j]));
    return y;
}

double toeplitz_tangent_norm2(const ToeplitzTangent& v) {
    const int n = static_cast<int>(v.v.size()) + 1;
    double s = n * v.t * v.t;
    for (int j = 1; j < n; ++j) s += (n - j) * std::norm(v.v[j - 1]);
    return s;
}

}  // namespace riemgauss

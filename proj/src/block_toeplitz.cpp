#include "riemgauss/block_toeplitz.hpp"

#include <cmath>

#include "riemgauss/disc.hpp"
#include "riemgauss/matfun.hpp"

namespace riemgauss {

namespace {

CMatrix symmetrize(const CMatrix& m) { return (m + m.transpose()) * 0.5; }

// Omega h(Omega^H Omega) with h(x) = f(sqrt x) / sqrt x equals Theta f(S) Theta^T
// for the Takagi factorisation Omega = Theta S Theta^T and odd f.
template <class F>
CMatrix takagi_odd_function(const CMatrix& omega, F&& f) {
    CMatrix g = omega.adjoint() * omega;
    g = (g + g.adjoint()) * 0.5;
    CMatrix h = hermitian_matfun(g, [&](double x) {
        if (x <= 1e-300) return 1.0;
        double s = std::sqrt(x);
        return f(s) / s;
    });
    return symmetrize(omega * h);
}

void check_square(const CMatrix& m, Eigen::Index n, const char* what) {
    if (m.rows() != n || m.cols() != n) throw ValidationError(std::string(what) + ": shape mismatch");
}

double spectral_norm(const CMatrix& m) {
    Eigen::JacobiSVD<CMatrix> svd(m);
    return svd.singularValues()(0);
}

}  // namespace

void validate_siegel(const CMatrix& omega) {
    if (omega.rows() < 1 || omega.rows() != omega.cols()) throw ValidationError("Siegel point: matrix must be square");
    if (!is_symmetric(omega)) throw ValidationError("Siegel point: matrix is not symmetric");
    if (!(spectral_norm(omega) < 1.0)) throw ValidationError("Siegel point: spectral norm must be < 1");
}

double siegel_distance(const CMatrix& phi, const CMatrix& psi) {
    check_square(psi, phi.rows(), "siegel_distance");
    const Eigen::Index n = phi.rows();
    const CMatrix id = CMatrix::Identity(n, n);
    CMatrix d = psi - phi;
    CMatrix r = d * (id - phi.adjoint() * psi).inverse() * d.adjoint() * (id - phi * psi.adjoint()).inverse();
    Eigen::ComplexEigenSolver<CMatrix> es(r, false);
    if (es.info() != Eigen::Success) throw NumericalError("siegel_distance: eigen-solver failed");
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        double l = es.eigenvalues()(i).real();
        if (l > 1.0 + 1e-10) throw NumericalError("siegel_distance: point outside the Siegel disc");
        l = std::clamp(l, 0.0, 1.0 - 1e-14);
        double a = std::atanh(std::sqrt(l));
        s += a * a;
    }
    return std::sqrt(s);
}

CMatrix siegel_group_from_point(const CMatrix& base) {
    const Eigen::Index n = base.rows();
    CMatrix g = CMatrix::Identity(n, n) - base * base.adjoint();
    CMatrix a = hermitian_matfun((g + g.adjoint()) * 0.5, [](double x) { return x > 0 ? 1.0 / std::sqrt(x) : NAN; });
    CMatrix b = a * base;
    CMatrix u(2 * n, 2 * n);
    u << a, b, b.conjugate(), a.conjugate();
    return u;
}

CMatrix siegel_act(const CMatrix& u, const CMatrix& omega) {
    const Eigen::Index n = omega.rows();
    if (u.rows() != 2 * n || u.cols() != 2 * n) throw ValidationError("siegel_act: group element has wrong shape");
    CMatrix num = u.topLeftCorner(n, n) * omega + u.topRightCorner(n, n);
    CMatrix den = u.bottomLeftCorner(n, n) * omega + u.bottomRightCorner(n, n);
    CMatrix out = symmetrize(den.transpose().fullPivLu().solve(num.transpose()).transpose());
    if (!out.allFinite()) throw NumericalError("siegel_act: result is not finite");
    return out;
}

CMatrix siegel_translate(const CMatrix& base, const CMatrix& w) { return siegel_act(siegel_group_from_point(base), w); }

CMatrix siegel_translate_inv(const CMatrix& base, const CMatrix& y) {
    return siegel_act(siegel_group_from_point(-base), y);
}

CMatrix siegel_log0(const CMatrix& omega) {
    return takagi_odd_function(omega, [](double s) {
        if (s >= 1.0) return double(NAN);
        return std::atanh(s);
    });
}

CMatrix siegel_exp0(const CMatrix& v) {
    return takagi_odd_function(symmetrize(v), [](double s) { return std::tanh(s); });
}

bool is_siegel_group_element(const CMatrix& u, double tol) {
    const Eigen::Index n2 = u.rows();
    if (n2 % 2 != 0 || u.cols() != n2) return false;
    const Eigen::Index n = n2 / 2;
    CMatrix j = CMatrix::Zero(n2, n2);
    j.topRightCorner(n, n) = CMatrix::Identity(n, n);
    j.bottomLeftCorner(n, n) = -CMatrix::Identity(n, n);
    CMatrix k = CMatrix::Identity(n2, n2);
    k.bottomRightCorner(n, n) *= -1.0;
    double scale = std::max(1.0, u.cwiseAbs2().rowwise().sum().maxCoeff());
    return (u.transpose() * j * u - j).cwiseAbs().maxCoeff() <= tol * scale &&
           (u.adjoint() * k * u - k).cwiseAbs().maxCoeff() <= tol * scale;
}

double siegel_logdensity_polar(const RVector& r, double sigma) { return radial_log_density(RootSystem::C, r, sigma); }

McEstimate siegel_z_montecarlo(int N, double sigma, const McConfig& cfg) {
    return radial_z_estimate(RootSystem::C, N, sigma, cfg);
}

// ---- block-Toeplitz ----

BlockToeplitzCoords BlockToeplitzCoords::identity(int n, int N) {
    return {ToeplitzCoords::identity(N), std::vector<CMatrix>(n - 1, CMatrix::Zero(N, N))};
}

void validate(const BlockToeplitzCoords& c) {
    validate(c.p);
    for (const CMatrix& o : c.omegas) {
        check_square(o, c.N(), "BlockToeplitzCoords");
        validate_siegel(o);
    }
}

namespace {

struct Levinson {
    std::vector<CMatrix> a, b;  // forward / backward predictor blocks
    CMatrix vf, vb;

    explicit Levinson(const CMatrix& t0) : a{CMatrix::Identity(t0.rows(), t0.rows())}, b{a}, vf(t0), vb(t0) {}

    void update(const CMatrix& delta) {
        const size_t m = a.size();
        const Eigen::Index N = vf.rows();
        CMatrix kf = delta * vb.inverse();
        CMatrix kb = delta.adjoint() * vf.inverse();
        std::vector<CMatrix> na(m + 1), nb(m + 1);
        for (size_t k = 0; k <= m; ++k) {
            CMatrix at = k < m ? a[k] : CMatrix::Zero(N, N);
            CMatrix bt = k > 0 ? b[k - 1] : CMatrix::Zero(N, N);
            na[k] = at - kf * bt;
            nb[k] = bt - kb * at;
        }
        CMatrix nvf = vf - kf * delta.adjoint();
        CMatrix nvb = vb - kb * delta;
        vf = (nvf + nvf.adjoint()) * 0.5;
        vb = (nvb + nvb.adjoint()) * 0.5;
        a.swap(na);
        b.swap(nb);
    }
};

CMatrix assemble(const std::vector<CMatrix>& blocks) {
    const int n = static_cast<int>(blocks.size());
    const Eigen::Index N = blocks[0].rows();
    CMatrix t(n * N, n * N);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) t.block(i * N, j * N, N, N) = i >= j ? blocks[i - j] : CMatrix(blocks[j - i].adjoint());
    return t;
}

}  // namespace

CMatrix block_coords_to_matrix(const BlockToeplitzCoords& c) {
    validate(c);
    const int n = c.n();
    const int N = c.N();
    const CMatrix jx = exchange(N);
    std::vector<CMatrix> blocks{coords_to_matrix(c.p).dense()};
    Levinson lev(blocks[0]);
    for (int m = 1; m < n; ++m) {
        CMatrix delta = -hpd_sqrt(lev.vf) * c.omegas[m - 1] * jx * hpd_sqrt(lev.vb);
        CMatrix th = delta;  // T_m^H
        for (int i = 1; i < m; ++i) th -= lev.a[i] * blocks[m - i].adjoint();
        blocks.push_back(th.adjoint());
        lev.update(delta);
    }
    CMatrix t = assemble(blocks);
    return (t + t.adjoint()) * 0.5;
}

BlockToeplitzCoords block_matrix_to_coords(const CMatrix& t, int N) {
    require_hermitian(t, "block_matrix_to_coords");
    if (N < 1 || t.rows() % N != 0) throw ValidationError("block_matrix_to_coords: size is not a multiple of N");
    const int n = static_cast<int>(t.rows() / N);
    const double tol = 1e-10 * std::max(1.0, t.cwiseAbs().maxCoeff());
    std::vector<CMatrix> blocks;
    for (int k = 0; k < n; ++k) blocks.push_back(t.block(k * N, 0, N, N));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j)
            if ((t.block(i * N, j * N, N, N) - blocks[i - j]).cwiseAbs().maxCoeff() > tol)
                throw ValidationError("block_matrix_to_coords: matrix is not block-Toeplitz");

    BlockToeplitzCoords c;
    c.p = matrix_to_coords(ToeplitzMatrix::from_dense(blocks[0]));
    const CMatrix jx = exchange(N);
    Levinson lev(blocks[0]);
    for (int m = 1; m < n; ++m) {
        CMatrix delta = CMatrix::Zero(N, N);
        for (int i = 0; i < m; ++i) delta += lev.a[i] * blocks[m - i].adjoint();
        CMatrix omega = -hpd_inv_sqrt(lev.vf) * delta * hpd_inv_sqrt(lev.vb) * jx;
        double scale = std::max(1e-300, omega.cwiseAbs().maxCoeff());
        if ((omega - omega.transpose()).cwiseAbs().maxCoeff() > 1e-8 * std::max(1.0, scale))
            throw ValidationError("block_matrix_to_coords: reflection coefficient is not symmetric "
                                  "(blocks are not persymmetric)");
        omega = symmetrize(omega);
        if (!(spectral_norm(omega) < 1.0))
            throw ValidationError("block_matrix_to_coords: non-contractive reflection coefficient (matrix not PD)");
        c.omegas.push_back(omega);
        lev.update(delta);
    }
    return c;
}

double block_toeplitz_distance(const BlockToeplitzCoords& a, const BlockToeplitzCoords& b) {
    if (a.n() != b.n() || a.N() != b.N()) throw ValidationError("block_toeplitz_distance: shape mismatch");
    const int n = a.n();
    double dp = toeplitz_distance(a.p, b.p);
    double d2 = n * dp * dp;
    for (int j = 1; j < n; ++j) {
        double dj = siegel_distance(a.omegas[j - 1], b.omegas[j - 1]);
        d2 += (n - j) * dj * dj;
    }
    return std::sqrt(d2);
}

double block_toeplitz_logZ(int n, int N, double sigma, const std::function<double(double)>& siegel_logZ) {
    double z = toeplitz_logZ(N, sigma / std::sqrt(double(n)));
    for (int j = 1; j < n; ++j) z += siegel_logZ(sigma / std::sqrt(double(n - j)));
    return z;
}

BlockToeplitzSampler::BlockToeplitzSampler(const BlockToeplitzCoords& center, double sigma, Rng rng,
                                           const MhConfig& cfg)
    : center_(center), sigma_(sigma), rng_(rng) {
    validate(center);
    if (!(sigma > 0.0)) throw ValidationError("block sampler: sigma must be positive");
    const int n = center.n();
    const int N = center.N();
    if (N > 1)
        for (int j = 1; j < n; ++j)
            chains_.push_back(std::make_unique<RadialSampler>(RootSystem::C, N, sigma / std::sqrt(double(n - j)), cfg,
                                                              rng.substream(1000 + j)));
}

BlockToeplitzCoords BlockToeplitzSampler::next() {
    const int n = center_.n();
    const int N = center_.N();
    BlockToeplitzCoords out;
    out.p = toeplitz_sample(center_.p, sigma_ / std::sqrt(double(n)), rng_);
    for (int j = 1; j < n; ++j) {
        double s = sigma_ / std::sqrt(double(n - j));
        if (N == 1) {
            // Same draw sequence as the scalar Toeplitz sampler.
            double theta = 2.0 * M_PI * rng_.uniform();
            double rho = toeplitz_sample_disc_radius(s, rng_);
            CMatrix w(1, 1);
            w(0, 0) = disc::translate(center_.omegas[j - 1](0, 0), std::polar(std::tanh(rho), theta));
            out.omegas.push_back(w);
            continue;
        }
        CMatrix theta = sample_unitary(N, rng_);
        RVector r = chains_[j - 1]->next();
        // same guard as the scalar disc: keep tanh(r) strictly inside the unit interval
        RVector t = r.array().tanh().cwiseMin(1.0 - 1e-12).cwiseMax(-(1.0 - 1e-12));
        CMatrix w = theta * t.cast<Complex>().asDiagonal() * theta.transpose();
        out.omegas.push_back(siegel_translate(center_.omegas[j - 1], symmetrize(w)));
    }
    return out;
}

bool BlockToeplitzSampler::diagnostics_ok() const {
    for (const auto& c : chains_)
        if (!c->diagnostics().ok()) return false;
    return true;
}

std::vector<MhDiagnostics> BlockToeplitzSampler::diagnostics() const {
    std::vector<MhDiagnostics> d;
    for (const auto& c : chains_) d.push_back(c->diagnostics());
    return d;
}

BlockToeplitzCoords block_toeplitz_sample(const BlockToeplitzCoords& center, double sigma, Rng& rng,
                                          const MhConfig& cfg) {
    BlockToeplitzSampler s(center, sigma, rng.substream(rng.next_u64()), cfg);
    return s.next();
}

void validate(const BlockGroupElement& g, int n, int N) {
    validate(g.p, N);
    if (static_cast<int>(g.us.size()) != n - 1) throw ValidationError("block group element: wrong number of factors");
    for (const CMatrix& u : g.us)
        if (u.rows() != 2 * N || !is_siegel_group_element(u))
            throw ValidationError("block group element: factor is not a Siegel-disc isometry");
}

BlockToeplitzCoords block_act(const BlockGroupElement& g, const BlockToeplitzCoords& c) {
    validate(c);
    validate(g, c.n(), c.N());
    BlockToeplitzCoords out{toeplitz_act(g.p, c.p), {}};
    for (int j = 1; j < c.n(); ++j) out.omegas.push_back(siegel_act(g.us[j - 1], c.omegas[j - 1]));
    return out;
}

BlockGroupElement random_block_group_element(int n, int N, Rng& rng) {
    BlockGroupElement g{random_toeplitz_group_element(N, rng), {}};
    for (int j = 1; j < n; ++j) {
        CMatrix theta = sample_unitary(N, rng);
        CMatrix z(N, N);
        for (int a = 0; a < N; ++a)
            for (int b = 0; b < N; ++b) z(a, b) = rng.complex_normal();
        z = symmetrize(z);
        CMatrix omega = siegel_exp0(z);
        CMatrix rot = CMatrix::Zero(2 * N, 2 * N);
        rot.topLeftCorner(N, N) = theta;
        rot.bottomRightCorner(N, N) = theta.conjugate();
        g.us.push_back(siegel_group_from_point(omega) * rot);
    }
    return g;
}

BlockTangent block_log(const BlockToeplitzCoords& x, const BlockToeplitzCoords& y) {
    if (x.n() != y.n() || x.N() != y.N()) throw ValidationError("block_log: shape mismatch");
    BlockTangent v{toeplitz_log(x.p, y.p), {}};
    for (int j = 1; j < x.n(); ++j)
        v.v.push_back(siegel_log0(siegel_translate_inv(x.omegas[j - 1], y.omegas[j - 1])));
    return v;
}

BlockToeplitzCoords block_exp(const BlockToeplitzCoords& x, const BlockTangent& v) {
    if (static_cast<int>(v.v.size()) != x.n() - 1) throw ValidationError("block_exp: tangent shape mismatch");
    BlockToeplitzCoords y{toeplitz_exp(x.p, v.p), {}};
    for (int j = 1; j < x.n(); ++j) {
        CMatrix w = siegel_exp0(v.v[j - 1]);
        if (!(spectral_norm(w) < 1.0)) throw NumericalError("block_exp: Siegel factor left the disc");
        y.omegas.push_back(siegel_translate(x.omegas[j - 1], w));
    }
    return y;
}

double block_tangent_norm2(const BlockTangent& v) {
    const int n = static_cast<int>(v.v.size()) + 1;
    double s = n * toeplitz_tangent_norm2(v.p);
    for (int j = 1; j < n; ++j) s += (n - j) * v.v[j - 1].squaredNorm();
    return s;
}

}  // namespace riemgauss

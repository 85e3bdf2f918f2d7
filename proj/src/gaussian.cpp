#include "riemgauss/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "riemgauss/disc.hpp"

namespace riemgauss {

namespace {

double eta_of(double sigma) { return -1.0 / (2.0 * sigma * sigma); }
double sigma_of(double eta) { return std::sqrt(-1.0 / (2.0 * eta)); }

struct Segment {
    size_t i;
    double h, t;
};

}  // namespace

std::vector<double> log_spaced_grid(double lo, double hi, int count) {
    if (!(lo > 0.0) || !(hi > lo) || count < 2) throw ValidationError("sigma grid: need 0 < lo < hi and count >= 2");
    std::vector<double> g(count);
    for (int i = 0; i < count; ++i) g[i] = lo * std::pow(hi / lo, double(i) / double(count - 1));
    g.front() = lo;
    g.back() = hi;
    return g;
}

std::vector<double> default_sigma_grid() { return log_spaced_grid(0.05, 3.0, 60); }

static Segment locate(const std::vector<double>& sigma, double eta) {
    // eta is increasing with sigma
    size_t n = sigma.size();
    size_t lo = 0, hi = n - 1;
    while (hi - lo > 1) {
        size_t mid = (lo + hi) / 2;
        if (eta_of(sigma[mid]) <= eta)
            lo = mid;
        else
            hi = mid;
    }
    double e0 = eta_of(sigma[lo]);
    double h = eta_of(sigma[lo + 1]) - e0;
    return {lo, h, std::clamp((eta - e0) / h, 0.0, 1.0)};
}

static double check_sigma(const ZTable& z, double s) {
    if (!(s >= z.sigma_min() * (1.0 - 1e-12) && s <= z.sigma_max() * (1.0 + 1e-12))) {
        std::ostringstream os;
        os << "sigma " << s << " outside the Z-table range [" << z.sigma_min() << ", " << z.sigma_max() << "]";
        throw OutOfTableRange(os.str(), s);
    }
    return std::clamp(s, z.sigma_min(), z.sigma_max());
}

double ZTable::psi_at_eta(double eta) const {
    Segment g = locate(sigma, eta);
    double t = g.t, t2 = t * t, t3 = t2 * t;
    size_t i = g.i;
    return (2 * t3 - 3 * t2 + 1) * log_z[i] + (t3 - 2 * t2 + t) * g.h * psi_prime[i] + (-2 * t3 + 3 * t2) * log_z[i + 1] +
           (t3 - t2) * g.h * psi_prime[i + 1];
}

double ZTable::psi_prime_at_eta(double eta) const {
    Segment g = locate(sigma, eta);
    double t = g.t, t2 = t * t;
    size_t i = g.i;
    return ((6 * t2 - 6 * t) * log_z[i] + (-6 * t2 + 6 * t) * log_z[i + 1]) / g.h + (3 * t2 - 4 * t + 1) * psi_prime[i] +
           (3 * t2 - 2 * t) * psi_prime[i + 1];
}

double ZTable::log_z_at(double s) const { return psi_at_eta(eta_of(check_sigma(*this, s))); }

double ZTable::psi_prime_at(double s) const { return psi_prime_at_eta(eta_of(check_sigma(*this, s))); }

double ZTable::phi(double rho) const {
    if (!(rho >= rho_min() && rho <= rho_max())) {
        std::ostringstream os;
        os << "dispersion " << rho << " outside the Z-table's psi' range [" << rho_min() << ", " << rho_max() << "]";
        throw OutOfTableRange(os.str(), rho);
    }
    size_t i = std::upper_bound(psi_prime.begin(), psi_prime.end(), rho) - psi_prime.begin();
    i = std::clamp<size_t>(i, 1, psi_prime.size() - 1) - 1;
    double lo = eta_of(sigma[i]);
    double hi = eta_of(sigma[i + 1]);
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::abs(lo); ++it) {
        double mid = 0.5 * (lo + hi);
        if (psi_prime_at_eta(mid) < rho)
            lo = mid;
        else
            hi = mid;
    }
    double eta = 0.5 * (lo + hi);
    // Newton polish, kept inside the bracket.
    for (int it = 0; it < 3; ++it) {
        double f = psi_prime_at_eta(eta) - rho;
        double dh = 1e-7 * std::abs(eta);
        double d = (psi_prime_at_eta(std::min(eta + dh, eta_of(sigma[i + 1]))) -
                    psi_prime_at_eta(std::max(eta - dh, eta_of(sigma[i])))) /
                   (2 * dh);
        if (!(d > 0.0)) break;
        double next = eta - f / d;
        if (!(next >= lo - 1e-12 * std::abs(lo) && next <= hi + 1e-12 * std::abs(hi))) break;
        eta = next;
    }
    return sigma_of(eta);
}

void ZTable::check() const {
    const size_t n = sigma.size();
    if (n < 2) throw ValidationError("Z-table needs at least two grid points");
    if (log_z.size() != n || psi_prime.size() != n || stderr_log_z.size() != n || stderr_psi_prime.size() != n ||
        mc_samples.size() != n)
        throw ValidationError("Z-table columns differ in length");
    for (size_t i = 0; i < n; ++i) {
        if (!(sigma[i] > 0.0) || (i > 0 && !(sigma[i] > sigma[i - 1])))
            throw ValidationError("Z-table sigma grid must be positive and strictly increasing");
        if (!std::isfinite(log_z[i]) || !(psi_prime[i] > 0.0))
            throw NumericalError("Z-table has a non-finite log Z or non-positive psi'");
        if (i > 0 && !(psi_prime[i] > psi_prime[i - 1])) throw NumericalError("Z-table psi' is not strictly increasing");
    }
    std::vector<double> eta(n);
    for (size_t i = 0; i < n; ++i) eta[i] = eta_of(sigma[i]);
    for (size_t i = 1; i + 1 < n; ++i) {
        double h0 = eta[i] - eta[i - 1], h1 = eta[i + 1] - eta[i];
        double d = (log_z[i + 1] - log_z[i]) / h1 - (log_z[i] - log_z[i - 1]) / h0;
        double se = std::sqrt(std::pow(stderr_log_z[i + 1] / h1, 2) + std::pow(stderr_log_z[i] * (1 / h0 + 1 / h1), 2) +
                              std::pow(stderr_log_z[i - 1] / h0, 2));
        if (!(d > -3.0 * se) || (se == 0.0 && !(d > 0.0))) {
            std::ostringstream os;
            os << "Z-table log Z is not convex in eta at sigma = " << sigma[i];
            throw NumericalError(os.str());
        }
    }
    // The Hermite interpolant's second derivative is linear on each segment,
    // so positivity at both ends means psi' increases throughout.
    for (size_t i = 0; i + 1 < n; ++i) {
        double h = eta[i + 1] - eta[i];
        double dz = log_z[i + 1] - log_z[i];
        double c0 = 6 * dz - 4 * h * psi_prime[i] - 2 * h * psi_prime[i + 1];
        double c1 = -6 * dz + 2 * h * psi_prime[i] + 4 * h * psi_prime[i + 1];
        if (!(c0 > 0.0 && c1 > 0.0)) {
            std::ostringstream os;
            os << "interpolated psi' is not monotone between sigma = " << sigma[i] << " and " << sigma[i + 1]
               << "; increase the Monte Carlo sample count";
            throw NumericalError(os.str());
        }
    }
}

namespace {

struct Entry {
    double log_z, psi_prime, se_log_z, se_psi_prime;
    std::int64_t samples;
};

Entry analytic_entry(double lz, double pp) { return {lz, pp, 0.0, 0.0, 0}; }

Entry from_mc(const McEstimate& e) { return {e.log_z, e.psi_prime, e.stderr_log_z, e.stderr_psi_prime, e.samples}; }

Entry siegel_entry(int N, double s, const McConfig& mc) {
    if (N == 1) {
        // The disc factor in closed form (radial density sinh(2|r|)), identical
        // to the Toeplitz disc factor.
        return analytic_entry(disc_logZ(s), s * s * s * disc::dlog_radial_integral(s, 2.0));
    }
    return from_mc(siegel_z_montecarlo(N, s, mc));
}

}  // namespace

ZTable build_ztable(const ManifoldId& m, const std::vector<double>& grid, const McConfig& mc) {
    ZTable z;
    z.manifold = m;
    z.sigma = grid;
    z.seed = mc.seed;
    if (grid.size() < 2) throw ValidationError("build_ztable: grid needs at least two points");
    for (size_t i = 0; i < grid.size(); ++i)
        if (!(grid[i] > 0.0) || (i > 0 && !(grid[i] > grid[i - 1])))
            throw ValidationError("build_ztable: grid must be positive and strictly increasing");

    std::vector<Entry> entries;
    for (double s : grid) {
        switch (m.kind) {
            case ManifoldId::Kind::Toeplitz:
                entries.push_back(analytic_entry(toeplitz_logZ(m.n, s), toeplitz_psi_prime(m.n, s)));
                break;
            case ManifoldId::Kind::Hpd:
                if (m.n == 1)
                    entries.push_back(analytic_entry(0.5 * std::log(2 * M_PI) + std::log(s), s * s));
                else
                    entries.push_back(from_mc(hpd_z_montecarlo(m.n, s, mc)));
                break;
            case ManifoldId::Kind::SiegelDisc: entries.push_back(siegel_entry(m.N, s, mc)); break;
            case ManifoldId::Kind::BlockToeplitz: {
                const int n = m.n;
                const double sp = s / std::sqrt(double(n));
                Entry e = analytic_entry(toeplitz_logZ(m.N, sp), n * toeplitz_psi_prime(m.N, sp));
                double v_lz = 0.0, v_pp = 0.0;
                for (int k = 1; k < n; ++k) {
                    Entry f = siegel_entry(m.N, s / std::sqrt(double(k)), mc);
                    e.log_z += f.log_z;
                    e.psi_prime += k * f.psi_prime;
                    v_lz += f.se_log_z * f.se_log_z;
                    v_pp += double(k) * k * f.se_psi_prime * f.se_psi_prime;
                    e.samples = std::max(e.samples, f.samples);
                }
                e.se_log_z = std::sqrt(v_lz);
                e.se_psi_prime = std::sqrt(v_pp);
                entries.push_back(e);
                break;
            }
        }
    }
    bool any_mc = false;
    for (const Entry& e : entries) {
        z.log_z.push_back(e.log_z);
        z.psi_prime.push_back(e.psi_prime);
        z.stderr_log_z.push_back(e.se_log_z);
        z.stderr_psi_prime.push_back(e.se_psi_prime);
        z.mc_samples.push_back(e.samples);
        any_mc = any_mc || e.samples > 0;
    }
    z.method = any_mc ? "monte_carlo" : "analytic";
    z.check();
    return z;
}

double phi(double rho, const ZTable& z) { return z.phi(rho); }

double log_pdf(const ManifoldPoint& x, const GaussianParams& p, const ZTable& z) {
    if (manifold_of(p.center) != z.manifold) throw ValidationError("log_pdf: Z-table is for a different manifold");
    double d = distance(x, p.center);
    return -z.log_z_at(p.sigma) - d * d / (2.0 * p.sigma * p.sigma);
}

double entropy(double sigma, const ZTable& z) {
    double eta = eta_of(check_sigma(z, sigma));
    return eta * z.psi_prime_at_eta(eta) - z.psi_at_eta(eta);
}

FitReport mle_fit(const Dataset& data, const ZTable& z, const BarycentreConfig& cfg) {
    if (data.points.size() < 2) throw ValidationError("mle_fit: need at least two samples");
    if (data.manifold != z.manifold) throw ValidationError("mle_fit: Z-table is for a different manifold");
    std::vector<double> w(data.points.size(), 1.0 / data.points.size());
    BarycentreResult b = barycentre(data.points, w, cfg);
    double rho = 0.0;
    for (const auto& x : data.points) {
        double d = distance(b.point, x);
        rho += d * d;
    }
    rho /= data.points.size();
    if (!(rho > 0.0)) throw DegenerateFit("mle_fit: all samples coincide (zero dispersion); sigma is not identifiable");
    FitReport r;
    r.params.center = b.point;
    r.params.sigma = z.phi(rho);
    r.dispersion = rho;
    r.iterations = b.iterations;
    r.gradient_norm = b.gradient_norm;
    r.eta_solver_residual = std::abs(z.psi_prime_at(r.params.sigma) - rho);
    return r;
}

Dataset sample(const GaussianParams& p, int count, Rng& rng, const MhConfig& cfg, SampleDiagnostics* diag) {
    if (!(p.sigma > 0.0)) throw ValidationError("sample: sigma must be positive");
    if (count < 0) throw ValidationError("sample: count must be non-negative");
    Dataset d;
    d.manifold = manifold_of(p.center);
    validate_point(p.center, d.manifold);
    SampleDiagnostics local;
    auto note = [&](const MhDiagnostics& m) {
        if (m.proposals == 0) return;
        local.min_acceptance = std::min(local.min_acceptance, m.acceptance_rate());
        local.max_acceptance = std::max(local.max_acceptance, m.acceptance_rate());
        local.ok = local.ok && m.ok();
    };
    if (count > 0) {
        if (auto* c = std::get_if<HermitianPD>(&p.center)) {
            HpdSampler s(*c, p.sigma, rng.substream(rng.next_u64()), cfg);
            for (int i = 0; i < count; ++i) d.points.push_back(s.next());
            note(s.diagnostics());
        } else if (auto* c = std::get_if<ToeplitzCoords>(&p.center)) {
            for (int i = 0; i < count; ++i) d.points.push_back(toeplitz_sample(*c, p.sigma, rng));
        } else {
            BlockToeplitzSampler s(std::get<BlockToeplitzCoords>(p.center), p.sigma, rng.substream(rng.next_u64()), cfg);
            for (int i = 0; i < count; ++i) d.points.push_back(s.next());
            for (const auto& m : s.diagnostics()) note(m);
        }
    }
    if (diag) *diag = local;
    return d;
}

std::pair<double, double> batch_means(const std::vector<double>& xs, int batches) {
    if (xs.empty()) return {0.0, 0.0};
    const size_t per = xs.size() / batches;
    if (per == 0) throw ValidationError("batch_means: fewer values than batches");
    std::vector<double> means(batches, 0.0);
    for (int b = 0; b < batches; ++b) {
        for (size_t k = 0; k < per; ++k) means[b] += xs[b * per + k];
        means[b] /= per;
    }
    double mu = 0.0;
    for (double m : means) mu += m;
    mu /= batches;
    double v = 0.0;
    for (double m : means) v += (m - mu) * (m - mu);
    v /= (batches - 1);
    return {mu, std::sqrt(v / batches)};
}

}  // namespace riemgauss

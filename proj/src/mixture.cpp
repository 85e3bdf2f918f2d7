#include "riemgauss/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "riemgauss/parallel.hpp"

namespace riemgauss {

namespace {

constexpr int kRowChunk = 128;

double log_sum_exp(const Eigen::Ref<const RVector>& v) {
    double m = v.maxCoeff();
    if (!std::isfinite(m)) return m;
    return m + std::log((v.array() - m).exp().sum());
}

// Keeps sigma inside the table; reports whether clamping was needed.
double sigma_from_dispersion(double rho, const ZTable& z, bool& degenerate) {
    degenerate = false;
    if (rho < z.rho_min()) {
        degenerate = true;
        return z.sigma_min();
    }
    if (rho > z.rho_max()) {
        degenerate = true;
        return z.sigma_max();
    }
    return z.phi(rho);
}

}  // namespace

void validate(const MixtureModel& m) {
    if (m.weights.empty() || m.weights.size() != m.components.size())
        throw ValidationError("mixture: weights and components must be non-empty and equal in number");
    double s = 0.0;
    for (double w : m.weights) {
        if (!(w >= 0.0)) throw ValidationError("mixture: negative weight");
        s += w;
    }
    if (std::abs(s - 1.0) > 1e-9) throw ValidationError("mixture: weights do not sum to one");
    for (const auto& c : m.components) {
        validate_point(c.center, m.manifold);
        if (!(c.sigma > 0.0)) throw ValidationError("mixture: sigma must be positive");
    }
}

Responsibilities e_step(const Dataset& data, const MixtureModel& m, const ZTable& z, double* loglik, int threads) {
    if (data.manifold != m.manifold || z.manifold != m.manifold)
        throw ValidationError("e_step: data, model and Z-table must share a manifold");
    const int n = static_cast<int>(data.points.size());
    const int K = m.K();
    std::vector<double> logz(K), logw(K);
    for (int k = 0; k < K; ++k) {
        logz[k] = z.log_z_at(m.components[k].sigma);
        logw[k] = std::log(m.weights[k]);
    }
    Responsibilities resp(n, K);
    RVector row_lse(n);
    const int chunks = (n + kRowChunk - 1) / kRowChunk;
    parallel_for(chunks, threads, [&](int c) {
        RVector l(K);
        for (int i = c * kRowChunk; i < std::min(n, (c + 1) * kRowChunk); ++i) {
            for (int k = 0; k < K; ++k) {
                double d = distance(data.points[i], m.components[k].center);
                if (!std::isfinite(d)) throw NumericalError("e_step: non-finite distance");
                double s = m.components[k].sigma;
                l(k) = logw[k] - logz[k] - d * d / (2 * s * s);
            }
            double lse = log_sum_exp(l);
            row_lse(i) = lse;
            resp.row(i) = (l.array() - lse).exp().matrix().transpose();
        }
    });
    if (loglik) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += row_lse(i);
        *loglik = s;
    }
    return resp;
}

double log_likelihood(const Dataset& data, const MixtureModel& m, const ZTable& z, int threads) {
    double l = 0.0;
    e_step(data, m, z, &l, threads);
    return l;
}

MixtureModel m_step(const Dataset& data, const Responsibilities& resp, const ZTable& z, const MixtureModel& previous,
                    const EmConfig& cfg, MStepInfo* info) {
    const int n = static_cast<int>(data.points.size());
    const int K = static_cast<int>(resp.cols());
    if (resp.rows() != n || previous.K() != K) throw ValidationError("m_step: responsibilities have the wrong shape");
    MixtureModel out{data.manifold, std::vector<double>(K), std::vector<GaussianParams>(K)};
    MStepInfo local{std::vector<bool>(K, false), std::vector<bool>(K, false)};

    for (int k = 0; k < K; ++k) {
        double nk = resp.col(k).sum();
        if (nk < 1e-8 * n) {
            // Reseed at the datum the current mixture explains worst.
            local.reseeded[k] = true;
            int worst = 0;
            double worst_l = std::numeric_limits<double>::infinity();
            for (int i = 0; i < n; ++i) {
                RVector l(K);
                for (int j = 0; j < K; ++j) l(j) = std::log(previous.weights[j]) + log_pdf(data.points[i], previous.components[j], z);
                double v = log_sum_exp(l);
                if (v < worst_l) {
                    worst_l = v;
                    worst = i;
                }
            }
            out.components[k] = {data.points[worst], previous.components[k].sigma};
            out.weights[k] = 1.0 / n;
            continue;
        }
        std::vector<double> w(resp.col(k).data(), resp.col(k).data() + n);
        BarycentreResult b = barycentre(data.points, w, cfg.barycentre, previous.components[k].center);
        double e = 0.0;
        for (int i = 0; i < n; ++i) {
            if (w[i] == 0.0) continue;
            double d = distance(b.point, data.points[i]);
            e += w[i] * d * d;
        }
        e /= nk;
        bool deg = false;
        double s = sigma_from_dispersion(e, z, deg);
        local.degenerate[k] = deg;
        out.components[k] = {b.point, s};
        out.weights[k] = nk / n;
    }
    double ws = 0.0;
    for (double w : out.weights) ws += w;
    for (double& w : out.weights) w /= ws;
    if (info) *info = local;
    return out;
}

namespace {

MixtureModel kmeanspp_init(const Dataset& data, int K, const ZTable& z, Rng& rng) {
    const int n = static_cast<int>(data.points.size());
    std::vector<int> seeds{static_cast<int>(rng.uniform() * n) % n};
    std::vector<double> d2(n, std::numeric_limits<double>::infinity());
    std::vector<int> nearest(n, 0);
    for (int k = 1; k <= K; ++k) {
        const ManifoldPoint& c = data.points[seeds.back()];
        for (int i = 0; i < n; ++i) {
            double d = distance(data.points[i], c);
            if (d * d < d2[i]) {
                d2[i] = d * d;
                nearest[i] = k - 1;
            }
        }
        if (k == K) break;
        double total = 0.0;
        for (double v : d2) total += v;
        int pick = 0;
        if (total > 0.0) {
            double u = rng.uniform() * total;
            double acc = 0.0;
            pick = n - 1;
            for (int i = 0; i < n; ++i) {
                acc += d2[i];
                if (acc > u) {
                    pick = i;
                    break;
                }
            }
        } else {
            pick = static_cast<int>(rng.uniform() * n) % n;
        }
        seeds.push_back(pick);
    }
    MixtureModel m{data.manifold, std::vector<double>(K, 0.0), std::vector<GaussianParams>(K)};
    std::vector<double> disp(K, 0.0);
    double all = 0.0;
    for (int i = 0; i < n; ++i) {
        m.weights[nearest[i]] += 1.0;
        disp[nearest[i]] += d2[i];
        all += d2[i];
    }
    for (int k = 0; k < K; ++k) {
        double rho = m.weights[k] > 1.0 ? disp[k] / (m.weights[k] - 1.0) : all / n;
        if (!(rho > 0.0)) rho = all / n;
        bool deg = false;
        m.components[k] = {data.points[seeds[k]], rho > 0.0 ? sigma_from_dispersion(rho, z, deg) : z.sigma_min()};
        m.weights[k] = std::max(m.weights[k], 1.0) / n;
    }
    double ws = 0.0;
    for (double w : m.weights) ws += w;
    for (double& w : m.weights) w /= ws;
    return m;
}

EmResult run_em(const Dataset& data, MixtureModel model, const ZTable& z, const EmConfig& cfg) {
    EmResult r;
    double l = 0.0;
    Responsibilities resp = e_step(data, model, z, &l, cfg.threads);
    r.trace.push_back(l);
    MStepInfo info{std::vector<bool>(model.K(), false), {}};
    for (int it = 0; it < cfg.max_iter; ++it) {
        MixtureModel next = m_step(data, resp, z, model, cfg, &info);
        double l2 = 0.0;
        Responsibilities resp2 = e_step(data, next, z, &l2, cfg.threads);
        bool reseeded = std::find(info.reseeded.begin(), info.reseeded.end(), true) != info.reseeded.end();
        if (!reseeded && l2 < l - 1e-9 * std::max(1.0, std::abs(l))) {
            std::ostringstream os;
            os << "EM log-likelihood decreased from " << l << " to " << l2;
            throw NumericalError(os.str());
        }
        model = std::move(next);
        resp = std::move(resp2);
        r.trace.push_back(l2);
        r.iterations = it + 1;
        double gain = l2 - l;
        l = l2;
        if (!reseeded && gain <= cfg.tol * std::abs(l)) break;
    }
    r.model = std::move(model);
    r.loglik = l;
    r.degenerate = info.degenerate;
    return r;
}

}  // namespace

EmResult em_fit(const Dataset& data, int K, const ZTable& z, const EmConfig& cfg) {
    const int n = static_cast<int>(data.points.size());
    if (K < 1 || n < K) throw ValidationError("em_fit: need N >= K >= 1");
    if (data.manifold != z.manifold) throw ValidationError("em_fit: Z-table is for a different manifold");
    if (cfg.restarts < 1) throw ValidationError("em_fit: restarts must be >= 1");
    EmResult best;
    bool have = false;
    const Rng base(cfg.seed);
    for (int r = 0; r < cfg.restarts; ++r) {
        Rng rng = base.substream(static_cast<std::uint64_t>(r));
        EmResult res = run_em(data, kmeanspp_init(data, K, z, rng), z, cfg);
        res.best_restart = r;
        if (!have || res.loglik > best.loglik) {
            best = std::move(res);
            have = true;
        }
    }
    return best;
}

int degrees_of_freedom(int K, const ManifoldId& m) { return K * (2 + m.dimension()) - 1; }

double bic(const Dataset& data, const MixtureModel& m, const ZTable& z) {
    double l = log_likelihood(data, m, z);
    return l - 0.5 * degrees_of_freedom(m.K(), m.manifold) * std::log(double(data.points.size()));
}

BicSelection select_by_bic(const Dataset& data, int k_max, const ZTable& z, const EmConfig& cfg) {
    if (k_max < 1) throw ValidationError("select_by_bic: k_max must be >= 1");
    BicSelection sel;
    const double logn = std::log(double(data.points.size()));
    for (int K = 1; K <= std::min<int>(k_max, static_cast<int>(data.points.size())); ++K) {
        EmResult r = em_fit(data, K, z, cfg);
        int df = degrees_of_freedom(K, data.manifold);
        sel.rows.push_back({K, r.loglik, df, r.loglik - 0.5 * df * logn});
        sel.fits.push_back(std::move(r));
    }
    size_t best = 0;
    for (size_t i = 1; i < sel.rows.size(); ++i)
        if (sel.rows[i].bic > sel.rows[best].bic) best = i;
    sel.best_k = sel.rows[best].K;
    return sel;
}

int classify(const ManifoldPoint& x, const MixtureModel& m, const ZTable& z) {
    int best = 0;
    double best_v = std::numeric_limits<double>::infinity();
    for (int k = 0; k < m.K(); ++k) {
        double s = m.components[k].sigma;
        double d = distance(x, m.components[k].center);
        double v = -std::log(m.weights[k]) + z.log_z_at(s) + d * d / (2 * s * s);
        if (v < best_v) {
            best_v = v;
            best = k;
        }
    }
    return best;
}

}  // namespace riemgauss

#include "riemgauss/radial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "riemgauss/disc.hpp"
#include "riemgauss/parallel.hpp"

namespace riemgauss {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::int64_t kChunk = 8192;

double log_add(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    double m = std::max(a, b);
    return m + std::log1p(std::exp(-std::abs(a - b)));
}

// Shift direction: gradient of the large-|r| asymptote of the log root product.
RVector bulk_direction(RootSystem rs, int dim) {
    RVector a(dim);
    for (int k = 0; k < dim; ++k) a(k) = rs == RootSystem::A ? double(dim - 1 - 2 * k) : double(2 * (dim - k));
    return a;
}

double log_weyl_order(RootSystem rs, int dim) {
    double l = std::lgamma(dim + 1.0);
    if (rs == RootSystem::C) l += dim * M_LN2;
    return l;
}

void fold_into_chamber(RootSystem rs, RVector& r) {
    if (rs == RootSystem::C) r = r.cwiseAbs();
    std::sort(r.data(), r.data() + r.size(), std::greater<double>());
}

bool in_chamber(RootSystem rs, const RVector& r) {
    for (Eigen::Index k = 0; k + 1 < r.size(); ++k)
        if (!(r(k) > r(k + 1))) return false;
    if (rs == RootSystem::C && r.size() > 0 && !(r(r.size() - 1) > 0.0)) return false;
    return true;
}

// Log-domain sums of one chunk, all relative to `shift`.
struct Partial {
    double shift = kNegInf;
    double s_w = 0.0;    // sum w
    double s_ww = 0.0;   // sum w^2
    double s_wx = 0.0;   // sum w x
    double s_wwx = 0.0;  // sum w^2 x
    double s_wwxx = 0.0; // sum w^2 x^2

    void rescale(double new_shift) {
        if (shift == kNegInf) {
            shift = new_shift;
            return;
        }
        double f = std::exp(shift - new_shift);
        double f2 = f * f;
        s_w *= f;
        s_wx *= f;
        s_ww *= f2;
        s_wwx *= f2;
        s_wwxx *= f2;
        shift = new_shift;
    }
    void merge(Partial o) {
        if (o.shift == kNegInf) return;
        double m = std::max(shift, o.shift);
        rescale(m);
        o.rescale(m);
        s_w += o.s_w;
        s_ww += o.s_ww;
        s_wx += o.s_wx;
        s_wwx += o.s_wwx;
        s_wwxx += o.s_wwxx;
    }
};

}  // namespace

double radial_log_density(RootSystem rs, const RVector& r, double sigma) {
    const Eigen::Index n = r.size();
    double l = -r.squaredNorm() / (2.0 * sigma * sigma);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            if (rs == RootSystem::A) {
                l += 2.0 * log_sinh(0.5 * (r(i) - r(j)));
            } else {
                l += log_sinh(r(i) - r(j)) + log_sinh(r(i) + r(j));
            }
        }
        if (rs == RootSystem::C) l += log_sinh(2.0 * r(i));
    }
    return std::isnan(l) ? kNegInf : l;
}

McEstimate radial_z_estimate(RootSystem rs, int dim, double sigma, const McConfig& cfg) {
    if (dim < 1) throw ValidationError("radial_z_estimate: dimension must be >= 1");
    if (!(sigma > 0.0)) throw ValidationError("radial_z_estimate: sigma must be positive");
    if (cfg.samples < 1000) throw ValidationError("radial_z_estimate: at least 1000 samples required");

    const RVector shift = sigma * sigma * bulk_direction(rs, dim);
    const double log_w_order = log_weyl_order(rs, dim);
    const double log_norm = -0.5 * dim * std::log(2.0 * M_PI * sigma * sigma);
    const double inv2s2 = 1.0 / (2.0 * sigma * sigma);
    const int chunks = static_cast<int>((cfg.samples + kChunk - 1) / kChunk);
    std::vector<Partial> parts(chunks);
    const Rng base(cfg.seed);

    parallel_for(chunks, cfg.threads, [&](int c) {
        Rng rng = base.substream(static_cast<std::uint64_t>(c));
        std::int64_t begin = std::int64_t(c) * kChunk;
        std::int64_t count = std::min<std::int64_t>(kChunk, cfg.samples - begin);
        std::vector<double> lw(count);
        std::vector<double> xs(count);
        RVector z(dim);
        for (std::int64_t k = 0; k < count; ++k) {
            bool shifted = rng.uniform() < 0.5;
            for (int i = 0; i < dim; ++i) z(i) = rng.normal();
            RVector r = sigma * z;
            if (shifted) {
                r += shift;
                if (!in_chamber(rs, r)) {
                    lw[k] = kNegInf;
                    xs[k] = 0.0;
                    continue;
                }
            } else {
                fold_into_chamber(rs, r);
            }
            // Proposal density on the chamber: half the folded centred normal
            // plus half the shifted normal restricted to the chamber.
            double lq0 = log_w_order + log_norm - r.squaredNorm() * inv2s2;
            double lq1 = log_norm - (r - shift).squaredNorm() * inv2s2;
            double lq = log_add(lq0, lq1) - M_LN2;
            double lt = radial_log_density(rs, r, sigma);
            lw[k] = lt == kNegInf ? kNegInf : log_w_order + lt - lq;
            xs[k] = r.squaredNorm();
        }
        Partial p;
        double m = *std::max_element(lw.begin(), lw.end());
        if (m == kNegInf) {
            parts[c] = p;
            return;
        }
        p.shift = m;
        for (std::int64_t k = 0; k < count; ++k) {
            if (lw[k] == kNegInf) continue;
            double w = std::exp(lw[k] - m);
            double x = xs[k];
            p.s_w += w;
            p.s_ww += w * w;
            p.s_wx += w * x;
            p.s_wwx += w * w * x;
            p.s_wwxx += w * w * x * x;
        }
        parts[c] = p;
    });

    Partial total;
    for (const Partial& p : parts) total.merge(p);
    if (total.shift == kNegInf || !(total.s_w > 0.0))
        throw NumericalError("radial_z_estimate: all importance weights vanished");

    const double m = static_cast<double>(cfg.samples);
    McEstimate est;
    est.samples = cfg.samples;
    double mean_w = total.s_w / m;
    est.log_z = total.shift + std::log(mean_w);
    double var_w = std::max(0.0, total.s_ww / m - mean_w * mean_w);
    est.stderr_log_z = std::sqrt(var_w / m) / mean_w;
    double mu = total.s_wx / total.s_w;
    est.psi_prime = mu;
    double num = total.s_wwxx - 2.0 * mu * total.s_wwx + mu * mu * total.s_ww;
    est.stderr_psi_prime = std::sqrt(std::max(0.0, num)) / total.s_w;
    if (!std::isfinite(est.log_z) || est.stderr_log_z > 0.1)
        throw NumericalError("radial_z_estimate: relative standard error above 10%; increase samples");
    return est;
}

RadialSampler::RadialSampler(RootSystem rs, int dim, double sigma, const MhConfig& cfg, Rng rng)
    : rs_(rs), dim_(dim), sigma_(sigma), cfg_(cfg), rng_(std::move(rng)) {
    if (dim < 1) throw ValidationError("RadialSampler: dimension must be >= 1");
    if (!(sigma > 0.0)) throw ValidationError("RadialSampler: sigma must be positive");
    if (cfg.thin < 1 || cfg.burn_in < 0 || !(cfg.step > 0.0)) throw ValidationError("RadialSampler: bad MH configuration");
    exact_ = dim == 1;
    if (exact_) return;

    // Start near the bulk of the density, strictly inside the chamber.
    state_ = sigma * sigma * bulk_direction(rs, dim);
    for (int k = 0; k < dim; ++k) state_(k) += sigma * 0.5 * double(dim - k) / dim;
    logp_ = radial_log_density(rs, state_, sigma);
    step_ = cfg.step * sigma;

    // Adapt the step during burn-in only, in windows of 50 proposals.
    int window_acc = 0;
    for (int i = 1; i <= cfg.burn_in; ++i) {
        if (step_once()) ++window_acc;
        if (i % 50 == 0) {
            double rate = window_acc / 50.0;
            step_ *= std::exp(rate - cfg.target_acceptance);
            window_acc = 0;
        }
    }
    diag_ = MhDiagnostics{};
    diag_.step = step_;
}

bool RadialSampler::step_once() {
    RVector prop = state_;
    for (int k = 0; k < dim_; ++k) prop(k) += step_ * rng_.normal();
    double lp = radial_log_density(rs_, prop, sigma_);
    double u = rng_.uniform();
    ++diag_.proposals;
    if (lp != kNegInf && std::log(u) < lp - logp_) {
        state_ = std::move(prop);
        logp_ = lp;
        ++diag_.accepted;
        return true;
    }
    return false;
}

RVector RadialSampler::next() {
    if (exact_) {
        RVector r(1);
        r(0) = rs_ == RootSystem::A ? sigma_ * rng_.normal() : disc::sample_sinh_radius(sigma_, 2.0, rng_);
        return r;
    }
    for (int i = 0; i < cfg_.thin; ++i) step_once();
    return state_;
}

}  // namespace riemgauss

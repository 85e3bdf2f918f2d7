#include "riemgauss/manifold.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "riemgauss/parallel.hpp"

namespace riemgauss {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

[[noreturn]] void mismatch(const char* what) { throw ValidationError(std::string(what) + ": manifold mismatch"); }

void toeplitz_axpy(ToeplitzTangent& a, double w, const ToeplitzTangent& b) {
    if (a.v.size() != b.v.size()) mismatch("tangent_axpy");
    a.t += w * b.t;
    for (size_t j = 0; j < a.v.size(); ++j) a.v[j] += w * b.v[j];
}

}  // namespace

std::string ManifoldId::to_string() const {
    switch (kind) {
        case Kind::Hpd: return "hpd:" + std::to_string(n);
        case Kind::Toeplitz: return "toeplitz:" + std::to_string(n);
        case Kind::BlockToeplitz: return "block:" + std::to_string(n) + "x" + std::to_string(N);
        case Kind::SiegelDisc: return "siegel:" + std::to_string(N);
    }
    return {};
}

ManifoldId ManifoldId::parse(const std::string& s) {
    auto colon = s.find(':');
    if (colon == std::string::npos) throw ValidationError("bad manifold spec '" + s + "' (expected e.g. hpd:2, toeplitz:4, block:3x2, siegel:2)");
    std::string kind = s.substr(0, colon);
    std::string rest = s.substr(colon + 1);
    auto to_int = [&](const std::string& t) {
        size_t pos = 0;
        int v = 0;
        try {
            v = std::stoi(t, &pos);
        } catch (...) {
            pos = 0;
        }
        if (pos != t.size() || t.empty() || v < 1) throw ValidationError("bad manifold size in '" + s + "'");
        return v;
    };
    if (kind == "hpd") return hpd(to_int(rest));
    if (kind == "toeplitz") return toeplitz(to_int(rest));
    if (kind == "siegel") return siegel(to_int(rest));
    if (kind == "block") {
        auto x = rest.find('x');
        if (x == std::string::npos) throw ValidationError("bad block manifold spec '" + s + "' (expected block:<n>x<N>)");
        return block_toeplitz(to_int(rest.substr(0, x)), to_int(rest.substr(x + 1)));
    }
    throw ValidationError("unknown manifold kind '" + kind + "'");
}

int ManifoldId::dimension() const {
    switch (kind) {
        case Kind::Hpd: return n * n;
        case Kind::Toeplitz: return 2 * n - 1;
        case Kind::BlockToeplitz: return 2 * N - 1 + (n - 1) * (N * N + N);
        case Kind::SiegelDisc: return N * N + N;
    }
    return 0;
}

ManifoldId manifold_of(const ManifoldPoint& x) {
    return std::visit(overloaded{[](const HermitianPD& p) { return ManifoldId::hpd(p.n()); },
                                 [](const ToeplitzCoords& p) { return ManifoldId::toeplitz(p.n()); },
                                 [](const BlockToeplitzCoords& p) { return ManifoldId::block_toeplitz(p.n(), p.N()); }},
                      x);
}

void validate_point(const ManifoldPoint& x, const ManifoldId& m) {
    if (manifold_of(x) != m) throw ValidationError("point does not belong to manifold " + m.to_string());
    std::visit(overloaded{[](const HermitianPD&) {}, [](const ToeplitzCoords& p) { validate(p); },
                          [](const BlockToeplitzCoords& p) { validate(p); }},
               x);
}

ManifoldPoint origin(const ManifoldId& m) {
    switch (m.kind) {
        case ManifoldId::Kind::Hpd: return HermitianPD::identity(m.n);
        case ManifoldId::Kind::Toeplitz: return ToeplitzCoords::identity(m.n);
        case ManifoldId::Kind::BlockToeplitz: return BlockToeplitzCoords::identity(m.n, m.N);
        case ManifoldId::Kind::SiegelDisc: break;
    }
    throw ValidationError("origin: Siegel-disc tables have no point type");
}

double distance(const ManifoldPoint& x, const ManifoldPoint& y) {
    if (x.index() != y.index()) mismatch("distance");
    return std::visit(
        overloaded{[&](const HermitianPD& a) { return hpd_distance(a, std::get<HermitianPD>(y)); },
                   [&](const ToeplitzCoords& a) { return toeplitz_distance(a, std::get<ToeplitzCoords>(y)); },
                   [&](const BlockToeplitzCoords& a) {
                       return block_toeplitz_distance(a, std::get<BlockToeplitzCoords>(y));
                   }},
        x);
}

TangentVector log_map(const ManifoldPoint& x, const ManifoldPoint& y) {
    if (x.index() != y.index()) mismatch("log_map");
    return std::visit(
        overloaded{[&](const HermitianPD& a) -> TangentVector { return hpd_log_map(a, std::get<HermitianPD>(y)); },
                   [&](const ToeplitzCoords& a) -> TangentVector { return toeplitz_log(a, std::get<ToeplitzCoords>(y)); },
                   [&](const BlockToeplitzCoords& a) -> TangentVector {
                       return block_log(a, std::get<BlockToeplitzCoords>(y));
                   }},
        x);
}

ManifoldPoint exp_map(const ManifoldPoint& x, const TangentVector& v) {
    if (x.index() != v.index()) mismatch("exp_map");
    return std::visit(
        overloaded{[&](const HermitianPD& a) -> ManifoldPoint { return hpd_exp_map(a, std::get<CMatrix>(v)); },
                   [&](const ToeplitzCoords& a) -> ManifoldPoint { return toeplitz_exp(a, std::get<ToeplitzTangent>(v)); },
                   [&](const BlockToeplitzCoords& a) -> ManifoldPoint {
                       return block_exp(a, std::get<BlockTangent>(v));
                   }},
        x);
}

double tangent_norm(const TangentVector& v) {
    return std::sqrt(std::visit(overloaded{[](const CMatrix& h) { return h.squaredNorm(); },
                                           [](const ToeplitzTangent& t) { return toeplitz_tangent_norm2(t); },
                                           [](const BlockTangent& t) { return block_tangent_norm2(t); }},
                                v));
}

TangentVector tangent_zero(const ManifoldPoint& x) {
    return std::visit(
        overloaded{[](const HermitianPD& a) -> TangentVector { return CMatrix(CMatrix::Zero(a.n(), a.n())); },
                   [](const ToeplitzCoords& a) -> TangentVector {
                       return ToeplitzTangent{0.0, std::vector<Complex>(a.alphas.size(), 0.0)};
                   },
                   [](const BlockToeplitzCoords& a) -> TangentVector {
                       BlockTangent t{ToeplitzTangent{0.0, std::vector<Complex>(a.p.alphas.size(), 0.0)}, {}};
                       t.v.assign(a.omegas.size(), CMatrix::Zero(a.N(), a.N()));
                       return t;
                   }},
        x);
}

void tangent_axpy(TangentVector& a, double w, const TangentVector& b) {
    if (a.index() != b.index()) mismatch("tangent_axpy");
    std::visit(overloaded{[&](CMatrix& h) {
                              const CMatrix& o = std::get<CMatrix>(b);
                              if (o.rows() != h.rows()) mismatch("tangent_axpy");
                              h += w * o;
                          },
                          [&](ToeplitzTangent& t) { toeplitz_axpy(t, w, std::get<ToeplitzTangent>(b)); },
                          [&](BlockTangent& t) {
                              const BlockTangent& o = std::get<BlockTangent>(b);
                              if (o.v.size() != t.v.size()) mismatch("tangent_axpy");
                              toeplitz_axpy(t.p, w, o.p);
                              for (size_t j = 0; j < t.v.size(); ++j) t.v[j] += w * o.v[j];
                          }},
               a);
}

TangentVector tangent_scale(const TangentVector& v, double s) {
    TangentVector out = v;
    tangent_axpy(out, s - 1.0, v);
    return out;
}

ManifoldPoint group_action(const GroupElement& g, const ManifoldPoint& x) {
    if (g.index() != x.index()) mismatch("group_action");
    return std::visit(
        overloaded{[&](const HermitianPD& a) -> ManifoldPoint { return hpd_act(std::get<CMatrix>(g), a); },
                   [&](const ToeplitzCoords& a) -> ManifoldPoint {
                       return toeplitz_act(std::get<ToeplitzGroupElement>(g), a);
                   },
                   [&](const BlockToeplitzCoords& a) -> ManifoldPoint {
                       return block_act(std::get<BlockGroupElement>(g), a);
                   }},
        x);
}

GroupElement random_group_element(const ManifoldId& m, Rng& rng) {
    switch (m.kind) {
        case ManifoldId::Kind::Hpd: {
            CMatrix g(m.n, m.n);
            for (int i = 0; i < m.n; ++i)
                for (int j = 0; j < m.n; ++j) g(i, j) = rng.complex_normal();
            return g;
        }
        case ManifoldId::Kind::Toeplitz: return random_toeplitz_group_element(m.n, rng);
        case ManifoldId::Kind::BlockToeplitz: return random_block_group_element(m.n, m.N, rng);
        case ManifoldId::Kind::SiegelDisc: break;
    }
    throw ValidationError("random_group_element: unsupported manifold");
}

namespace {

constexpr int kChunk = 256;

// Weighted sum of Log_x(x_n) and of w_n d^2(x, x_n), reduced in chunk order.
std::pair<TangentVector, double> weighted_log_sum(const ManifoldPoint& x, const std::vector<ManifoldPoint>& pts,
                                                  const std::vector<double>& w, int threads) {
    const int n = static_cast<int>(pts.size());
    const int chunks = (n + kChunk - 1) / kChunk;
    std::vector<TangentVector> part(chunks, tangent_zero(x));
    std::vector<double> var(chunks, 0.0);
    parallel_for(chunks, threads, [&](int c) {
        for (int i = c * kChunk; i < std::min(n, (c + 1) * kChunk); ++i) {
            if (w[i] == 0.0) continue;
            TangentVector l = log_map(x, pts[i]);
            double nl = tangent_norm(l);
            tangent_axpy(part[c], w[i], l);
            var[c] += w[i] * nl * nl;
        }
    });
    TangentVector g = tangent_zero(x);
    double e = 0.0;
    for (int c = 0; c < chunks; ++c) {
        tangent_axpy(g, 1.0, part[c]);
        e += var[c];
    }
    return {g, e};
}

}  // namespace

BarycentreResult barycentre(const std::vector<ManifoldPoint>& points, const std::vector<double>& weights,
                            const BarycentreConfig& cfg, const std::optional<ManifoldPoint>& init) {
    if (points.empty()) throw ValidationError("barycentre: no points");
    if (weights.size() != points.size()) throw ValidationError("barycentre: weights and points differ in length");
    double wsum = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) throw ValidationError("barycentre: weights must be non-negative");
        wsum += w;
    }
    if (!(wsum > 0.0)) throw ValidationError("barycentre: weights sum to zero");
    std::vector<double> w(weights);
    for (double& v : w) v /= wsum;
    for (const auto& p : points)
        if (p.index() != points[0].index()) mismatch("barycentre");

    ManifoldPoint x = points[0];
    if (init) {
        if (manifold_of(*init) != manifold_of(points[0])) mismatch("barycentre");
        x = *init;
    } else {
        const int n = static_cast<int>(points.size());
        std::vector<double> cost(n, std::numeric_limits<double>::infinity());
        parallel_for(n, cfg.threads, [&](int m) {
            if (w[m] == 0.0) return;
            double s = 0.0;
            for (int i = 0; i < n; ++i) {
                if (w[i] == 0.0 || i == m) continue;
                double d = distance(points[m], points[i]);
                s += w[i] * d * d;
            }
            cost[m] = s;
        });
        int best = 0;
        for (int m = 1; m < n; ++m)
            if (cost[m] < cost[best]) best = m;
        x = points[best];
    }

    double tau = cfg.step;
    auto [grad, energy] = weighted_log_sum(x, points, w, cfg.threads);
    double gn = tangent_norm(grad);
    for (int it = 0; it < cfg.max_iter; ++it) {
        if (gn < cfg.tol) return {x, it, gn};
        // Step, halving tau whenever the variance would increase.
        for (;;) {
            ManifoldPoint cand = exp_map(x, tangent_scale(grad, tau));
            auto [g2, e2] = weighted_log_sum(cand, points, w, cfg.threads);
            if (e2 <= energy * (1.0 + 1e-12) + 1e-300 || tau < 1e-6) {
                x = std::move(cand);
                grad = std::move(g2);
                energy = e2;
                break;
            }
            tau *= 0.5;
        }
        gn = tangent_norm(grad);
    }
    if (gn < cfg.tol) return {x, cfg.max_iter, gn};
    std::ostringstream os;
    os << "barycentre did not converge in " << cfg.max_iter << " iterations (gradient norm " << gn << ")";
    throw NonConvergence(os.str(), gn);
}

}  // namespace riemgauss

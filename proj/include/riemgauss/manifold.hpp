#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "riemgauss/block_toeplitz.hpp"
#include "riemgauss/hpd.hpp"
#include "riemgauss/toeplitz.hpp"

namespace riemgauss {

struct ManifoldId {
    // SiegelDisc only appears as the key of a Z-table for the Siegel factor.
    enum class Kind { Hpd, Toeplitz, BlockToeplitz, SiegelDisc };
    Kind kind = Kind::Hpd;
    int n = 1;
    int N = 1;

    static ManifoldId hpd(int n) { return {Kind::Hpd, n, 1}; }
    static ManifoldId toeplitz(int n) { return {Kind::Toeplitz, n, 1}; }
    static ManifoldId block_toeplitz(int n, int N) { return {Kind::BlockToeplitz, n, N}; }
    static ManifoldId siegel(int N) { return {Kind::SiegelDisc, 1, N}; }

    // "hpd:3", "toeplitz:4", "block:3x2", "siegel:2"
    std::string to_string() const;
    static ManifoldId parse(const std::string& s);
    int dimension() const;

    bool operator==(const ManifoldId& o) const { return kind == o.kind && n == o.n && N == o.N; }
    bool operator!=(const ManifoldId& o) const { return !(*this == o); }
};

using ManifoldPoint = std::variant<HermitianPD, ToeplitzCoords, BlockToeplitzCoords>;
using TangentVector = std::variant<CMatrix, ToeplitzTangent, BlockTangent>;
using GroupElement = std::variant<CMatrix, ToeplitzGroupElement, BlockGroupElement>;

ManifoldId manifold_of(const ManifoldPoint& x);
void validate_point(const ManifoldPoint& x, const ManifoldId& m);
ManifoldPoint origin(const ManifoldId& m);

double distance(const ManifoldPoint& x, const ManifoldPoint& y);
TangentVector log_map(const ManifoldPoint& x, const ManifoldPoint& y);
ManifoldPoint exp_map(const ManifoldPoint& x, const TangentVector& v);
double tangent_norm(const TangentVector& v);

TangentVector tangent_zero(const ManifoldPoint& x);
// a += w * b, componentwise on matching shapes.
void tangent_axpy(TangentVector& a, double w, const TangentVector& b);
TangentVector tangent_scale(const TangentVector& v, double s);

ManifoldPoint group_action(const GroupElement& g, const ManifoldPoint& x);
GroupElement random_group_element(const ManifoldId& m, Rng& rng);

struct BarycentreConfig {
    double tol = 1e-9;
    int max_iter = 200;
    double step = 1.0;
    int threads = 1;
};

struct BarycentreResult {
    ManifoldPoint point;
    int iterations = 0;
    double gradient_norm = 0.0;
};

// Weighted Riemannian barycentre by gradient descent
// x <- Exp_x(tau sum_n w_n Log_x(x_n)). Without `init`, starts at the input
// minimising the weighted sum of squared distances.
BarycentreResult barycentre(const std::vector<ManifoldPoint>& points, const std::vector<double>& weights,
                            const BarycentreConfig& cfg = {}, const std::optional<ManifoldPoint>& init = std::nullopt);

}  // namespace riemgauss

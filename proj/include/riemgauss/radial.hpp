#pragma once

#include <cstdint>
#include <functional>

#include "riemgauss/common.hpp"

// Radial (polar) densities of the HPD and Siegel-disc factors, the Monte
// Carlo estimator of their normalising integrals, and a random-walk
// Metropolis sampler for them.
namespace riemgauss {

// A: eigenvalue densities of H_n (roots r_i - r_j, doubled).
// C: Siegel disc densities (roots r_i - r_j and r_i + r_j, i <= j).
enum class RootSystem { A, C };

double radial_log_density(RootSystem rs, const RVector& r, double sigma);

struct McConfig {
    std::int64_t samples = 200000;
    std::uint64_t seed = 1;
    int threads = 1;
};

struct McEstimate {
    double log_z = 0.0;
    double stderr_log_z = 0.0;
    // E[|r|^2] under the normalised radial density, i.e. d psi / d eta.
    double psi_prime = 0.0;
    double stderr_psi_prime = 0.0;
    std::int64_t samples = 0;
};

// Importance sampling over the Weyl chamber with a two-component proposal
// (centred normal, folded into the chamber, and a normal shifted towards
// the bulk of the radial density). Draws are split into fixed chunks with
// their own substreams, so the estimate does not depend on thread count.
// The same seed gives common random numbers across sigma values.
McEstimate radial_z_estimate(RootSystem rs, int dim, double sigma, const McConfig& cfg);

struct MhConfig {
    double step = 0.5;  // proposal stddev in units of sigma
    int burn_in = 1000;
    int thin = 10;
    double target_acceptance = 0.35;
};

struct MhDiagnostics {
    std::int64_t proposals = 0;
    std::int64_t accepted = 0;
    double step = 0.0;
    double acceptance_rate() const { return proposals ? double(accepted) / double(proposals) : 1.0; }
    bool ok() const { return proposals == 0 || (acceptance_rate() >= 0.1 && acceptance_rate() <= 0.7); }
};

// Stateful chain over one radial factor. One-dimensional factors are drawn
// exactly (normal for A, the sinh(2|r|) radius sampler for C).
class RadialSampler {
public:
    RadialSampler(RootSystem rs, int dim, double sigma, const MhConfig& cfg, Rng rng);
    RVector next();
    const MhDiagnostics& diagnostics() const { return diag_; }
    Rng& rng() { return rng_; }

private:
    bool step_once();

    RootSystem rs_;
    int dim_;
    double sigma_;
    MhConfig cfg_;
    Rng rng_;
    RVector state_;
    double logp_ = 0.0;
    double step_ = 0.0;
    bool exact_ = false;
    MhDiagnostics diag_;
};

}  // namespace riemgauss

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "riemgauss/manifold.hpp"
#include "riemgauss/radial.hpp"

namespace riemgauss {

struct GaussianParams {
    ManifoldPoint center;
    double sigma = 1.0;
};

struct Dataset {
    ManifoldId manifold;
    std::vector<ManifoldPoint> points;
    std::optional<std::vector<int>> labels;
};

// Tabulated log Z(sigma) and psi'(eta) = d log Z / d eta, eta = -1 / (2 sigma^2).
// log Z carries no manifold-wide additive constants (constant_dropped).
// Between nodes log Z is the cubic Hermite interpolant in eta with node
// slopes psi'; psi' is its exact derivative, so the pair stays consistent.
struct ZTable {
    ManifoldId manifold;
    std::vector<double> sigma;
    std::vector<double> log_z;
    std::vector<double> psi_prime;
    std::vector<double> stderr_log_z;
    std::vector<double> stderr_psi_prime;
    std::vector<std::int64_t> mc_samples;  // 0 marks an analytic entry
    std::string method;                    // "analytic" or "monte_carlo"
    std::uint64_t seed = 0;
    bool constant_dropped = true;

    double sigma_min() const { return sigma.front(); }
    double sigma_max() const { return sigma.back(); }
    double rho_min() const { return psi_prime.front(); }
    double rho_max() const { return psi_prime.back(); }

    double log_z_at(double s) const;
    double psi_prime_at(double s) const;
    double psi_at_eta(double eta) const;
    double psi_prime_at_eta(double eta) const;
    // Inverse of psi': the sigma whose expected squared distance is rho.
    double phi(double rho) const;

    // Checks grid order, positivity/monotonicity of psi', convexity of log Z
    // in eta (beyond three standard errors for MC entries) and monotonicity
    // of the interpolated psi'. Throws NumericalError on failure.
    void check() const;
};

std::vector<double> default_sigma_grid();
std::vector<double> log_spaced_grid(double lo, double hi, int count);

ZTable build_ztable(const ManifoldId& m, const std::vector<double>& grid, const McConfig& mc);

double log_pdf(const ManifoldPoint& x, const GaussianParams& p, const ZTable& z);
double entropy(double sigma, const ZTable& z);
double phi(double rho, const ZTable& z);

struct FitReport {
    GaussianParams params;
    double dispersion = 0.0;  // mean squared distance to the barycentre
    int iterations = 0;
    double gradient_norm = 0.0;
    double eta_solver_residual = 0.0;
};

FitReport mle_fit(const Dataset& data, const ZTable& z, const BarycentreConfig& cfg = {});

struct SampleDiagnostics {
    bool ok = true;
    double min_acceptance = 1.0;
    double max_acceptance = 0.0;
};

Dataset sample(const GaussianParams& p, int count, Rng& rng, const MhConfig& cfg = {},
               SampleDiagnostics* diag = nullptr);

// Mean and batch-means standard error of a (possibly autocorrelated) series.
std::pair<double, double> batch_means(const std::vector<double>& xs, int batches = 50);

}  // namespace riemgauss

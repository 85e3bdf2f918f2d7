#pragma once

#include <cstdint>
#include <vector>

#include "riemgauss/gaussian.hpp"

namespace riemgauss {

struct MixtureModel {
    ManifoldId manifold;
    std::vector<double> weights;
    std::vector<GaussianParams> components;

    int K() const { return static_cast<int>(weights.size()); }
};

void validate(const MixtureModel& m);

// N x K matrix of posterior component probabilities.
using Responsibilities = RMatrix;

// Also returns the observed-data log-likelihood through `loglik`.
Responsibilities e_step(const Dataset& data, const MixtureModel& m, const ZTable& z, double* loglik = nullptr,
                        int threads = 1);

struct EmConfig {
    int restarts = 5;
    double tol = 1e-7;
    int max_iter = 300;
    std::uint64_t seed = 1;
    int threads = 1;
    BarycentreConfig barycentre;
};

struct MStepInfo {
    std::vector<bool> degenerate;  // sigma clamped to the table range
    std::vector<bool> reseeded;    // empty component moved to a poorly fitted datum
};

// `previous` supplies warm starts for the barycentres and the reseeding rule.
MixtureModel m_step(const Dataset& data, const Responsibilities& resp, const ZTable& z, const MixtureModel& previous,
                    const EmConfig& cfg = {}, MStepInfo* info = nullptr);

double log_likelihood(const Dataset& data, const MixtureModel& m, const ZTable& z, int threads = 1);

struct EmResult {
    MixtureModel model;
    std::vector<double> trace;  // log-likelihood per iteration of the best restart
    double loglik = 0.0;
    int iterations = 0;
    int best_restart = 0;
    std::vector<bool> degenerate;
};

EmResult em_fit(const Dataset& data, int K, const ZTable& z, const EmConfig& cfg = {});

int degrees_of_freedom(int K, const ManifoldId& m);
double bic(const Dataset& data, const MixtureModel& m, const ZTable& z);

struct BicRow {
    int K;
    double loglik;
    int df;
    double bic;
};

struct BicSelection {
    std::vector<BicRow> rows;
    std::vector<EmResult> fits;
    int best_k = 1;
};

BicSelection select_by_bic(const Dataset& data, int k_max, const ZTable& z, const EmConfig& cfg = {});

int classify(const ManifoldPoint& x, const MixtureModel& m, const ZTable& z);

}  // namespace riemgauss

#include <doctest.h>

#include "../support/gen.hpp"
#include "../support/oracles.hpp"
#include "riemgauss/hpd.hpp"

using namespace riemgauss;

namespace {
double a_density(const std::vector<double>& r, double s) {
    double l = 0.0, p = 1.0;
    for (size_t i = 0; i < r.size(); ++i) {
        l -= r[i] * r[i] / (2 * s * s);
        for (size_t j = i + 1; j < r.size(); ++j) p *= std::pow(std::sinh(0.5 * (r[i] - r[j])), 2);
    }
    return std::exp(l) * p;
}
}  // namespace

TEST_CASE("distance matches the generalised-eigenvalue oracle and is congruence invariant") {
    Rng rng(1);
    for (int t = 0; t < 60; ++t) {
        int n = 1 + t % 5;
        HermitianPD x = gen::hpd(n, rng), y = gen::hpd(n, rng);
        double d = hpd_distance(x, y);
        CHECK(d == doctest::Approx(oracle::hpd_distance(x.mat(), y.mat())).epsilon(1e-10));
        CMatrix g = gen::complex_gaussian(n, n, rng) + CMatrix::Identity(n, n) * 2.0;
        CHECK(hpd_distance(hpd_act(g, x), hpd_act(g, y)) == doctest::Approx(d).epsilon(1e-9));
        CMatrix v = hpd_log_map(x, y);
        CHECK(hpd_distance(hpd_exp_map(x, v), y) < 1e-9);
        CHECK(v.norm() == doctest::Approx(d).epsilon(1e-10));
    }
    CHECK_THROWS_AS(hpd_act(CMatrix::Zero(2, 2), HermitianPD::identity(2)), ValidationError);
}

TEST_CASE("closed form for n = 2 and quadrature for n = 2, 3") {
    for (double s : {0.3, 0.5, 1.0, 1.5}) {
        CHECK(std::exp(hpd_logZ_closed_form(2, s)) ==
              doctest::Approx(M_PI * s * s * std::expm1(s * s)).epsilon(1e-12));
        double L = 10 * s + s * s;
        double q2 = oracle::integrate2([&](double a, double b) { return a_density({a, b}, s); }, -L, L);
        CHECK(std::log(q2) == doctest::Approx(hpd_logZ_closed_form(2, s)).epsilon(1e-8));
    }
    for (double s : {0.5, 1.0}) {
        double L = 9 * s + 2 * s * s;
        double q3 = oracle::integrate3([&](double a, double b, double c) { return a_density({a, b, c}, s); }, -L, L);
        CHECK(std::log(q3) == doctest::Approx(hpd_logZ_closed_form(3, s)).epsilon(1e-6));
    }
}

TEST_CASE("Monte Carlo normalising factor agrees with the closed form within its error bars") {
    for (int n : {2, 3, 4}) {
        for (double s : {0.3, 1.0}) {
            McEstimate e = hpd_z_montecarlo(n, s, McConfig{200000, 7, 1});
            CHECK(std::abs(e.log_z - hpd_logZ_closed_form(n, s)) < 4 * e.stderr_log_z + 1e-12);
            double h = 1e-4 * s;
            double pp = s * s * s * (hpd_logZ_closed_form(n, s + h) - hpd_logZ_closed_form(n, s - h)) / (2 * h);
            CHECK(std::abs(e.psi_prime - pp) < 4 * e.stderr_psi_prime);
        }
    }
}

TEST_CASE("Monte Carlo estimate does not depend on the thread count") {
    McEstimate a = hpd_z_montecarlo(3, 0.6, McConfig{50000, 3, 1});
    McEstimate b = hpd_z_montecarlo(3, 0.6, McConfig{50000, 3, 4});
    CHECK(a.log_z == b.log_z);
    CHECK(a.psi_prime == b.psi_prime);
}

TEST_CASE("sampler: polar radii have the target second moment") {
    Rng rng(12);
    HermitianPD c = gen::hpd(3, rng);
    const double s = 0.6;
    HpdSampler smp(c, s, Rng(99));
    std::vector<double> d2;
    for (int i = 0; i < 30000; ++i) d2.push_back(std::pow(hpd_distance(c, smp.next()), 2));
    CHECK(smp.diagnostics().ok());
    auto [mu, se] = oracle::batch_mean_se(d2);
    double h = 1e-4;
    double pp = s * s * s * (hpd_logZ_closed_form(3, s + h) - hpd_logZ_closed_form(3, s - h)) / (2 * h);
    CHECK(std::abs(mu - pp) < 4 * se);
}

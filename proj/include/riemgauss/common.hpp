#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace riemgauss {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

// Error categories map onto CLI exit codes (validation 2, numerical 3, io 4).
enum class ErrorKind { Validation, Numerical, Io };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

struct ValidationError : Error {
    explicit ValidationError(const std::string& w) : Error(ErrorKind::Validation, w) {}
};

struct NumericalError : Error {
    explicit NumericalError(const std::string& w) : Error(ErrorKind::Numerical, w) {}
};

struct IoError : Error {
    explicit IoError(const std::string& w) : Error(ErrorKind::Io, w) {}
};

// Barycentre solver gave up; carries the last gradient norm.
struct NonConvergence : NumericalError {
    NonConvergence(const std::string& w, double grad) : NumericalError(w), gradient_norm(grad) {}
    double gradient_norm;
};

// sigma or rho outside what a Z-table covers.
struct OutOfTableRange : ValidationError {
    OutOfTableRange(const std::string& w, double v) : ValidationError(w), value(v) {}
    double value;
};

// All samples identical: dispersion is zero and sigma cannot be estimated.
struct DegenerateFit : NumericalError {
    explicit DegenerateFit(const std::string& w) : NumericalError(w) {}
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Seeded random stream. Substreams are derived deterministically so that
// parallel work splits reproduce the serial result bit for bit.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : seed_(seed), eng_(splitmix64(seed)) {}

    Rng substream(std::uint64_t index) const {
        return Rng(splitmix64(seed_ ^ splitmix64(index + 0x632be59bd9b4e019ULL)));
    }

    double normal() { return std::normal_distribution<double>(0.0, 1.0)(eng_); }
    double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(eng_); }
    // Standard complex normal: E|z|^2 = 1.
    Complex complex_normal() {
        double a = normal();
        double b = normal();
        return {a * M_SQRT1_2, b * M_SQRT1_2};
    }
    std::uint64_t next_u64() { return eng_(); }
    std::mt19937_64& engine() { return eng_; }

private:
    std::uint64_t seed_;
    std::mt19937_64 eng_;
};

inline double log_sinh(double x) {
    x = std::abs(x);
    if (x > 20.0) return x - M_LN2 + std::log1p(-std::exp(-2.0 * x));
    return std::log(std::sinh(x));
}

}  // namespace riemgauss

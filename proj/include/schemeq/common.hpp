#pragma once

#include <complex>
#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace schemeq {

using Index = std::ptrdiff_t;
using cplx = std::complex<double>;

using IntMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;
using RealMatrix = Eigen::MatrixXd;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using ComplexVector = Eigen::VectorXcd;

/// Failure raised by any library operation. `code` is a short kebab-case tag
/// (e.g. "axiom-4", "non-transitive") and `witness` the offending indices or
/// values, if there are any.
class Error : public std::runtime_error {
public:
  Error(std::string code, const std::string& message, std::vector<double> witness = {})
      : std::runtime_error(message), code_(std::move(code)), witness_(std::move(witness)) {}

  const std::string& code() const noexcept { return code_; }
  const std::vector<double>& witness() const noexcept { return witness_; }

private:
  std::string code_;
  std::vector<double> witness_;
};

/// Raised when a size cap would be exceeded.
class ResourceError : public Error {
public:
  using Error::Error;
};

/// Numerical thresholds shared by the floating-point modules.
struct Tolerances {
  double eig = 1e-8;   // eigenvalue clustering, multiplied by n at the use site
  double zero = 1e-9;  // positivity and zero tests
  double num = 1e-8;   // reconstruction residuals
  double gs = 1e-10;   // Gram-Schmidt rank cutoff, relative to the largest norm
};

inline constexpr std::uint64_t kDefaultSeed = 0x5eed5c4e3e0001ULL;
inline constexpr Index kDefaultVertexCap = 10000;

/// Vertex cap, overridable with SCHEMEQ_CAP_VERTICES.
inline Index vertex_cap() {
  if (const char* env = std::getenv("SCHEMEQ_CAP_VERTICES")) {
    char* end = nullptr;
    long long v = std::strtoll(env, &end, 10);
    if (end != env && v > 0) return static_cast<Index>(v);
  }
  return kDefaultVertexCap;
}

inline void require_vertex_cap(Index n, const char* what) {
  if (n > vertex_cap())
    throw ResourceError("cap-exceeded",
                        std::string(what) + ": " + std::to_string(n) + " vertices exceeds cap " +
                            std::to_string(vertex_cap()),
                        {static_cast<double>(n), static_cast<double>(vertex_cap())});
}

template <class Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

/// Uniform double in [0,1) built from raw 64-bit output, so the sequence does
/// not depend on the standard library's distribution implementation.
template <class Rng>
double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace schemeq

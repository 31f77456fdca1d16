#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace bhs {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using Complex = std::complex<double>;
using SpMat = Eigen::SparseMatrix<double>;
using SpCMat = Eigen::SparseMatrix<Complex>;

// Error taxonomy. Argument/domain problems are recoverable validation
// failures (CLI exit 2); numeric errors carry solver state (CLI exit 1).
struct ArgumentError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

struct GeometryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct AssemblyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& what, double residual = 0.0)
      : std::runtime_error(what), last_residual(residual) {}
  double last_residual;
};

struct NormalizationError : NumericError {
  using NumericError::NumericError;
};

struct ConsistencyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ResolutionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Number of worker threads: BLOCH_HS_THREADS caps it, default is the
// hardware count clamped to 8.
int worker_thread_count();

// Index-parallel loop. Each task writes its own slot, so results are
// deterministic regardless of scheduling.
void parallel_for(int n, const std::function<void(int)>& body);

// FNV-1a over a byte string; used for config hashes in output files.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);

}  // namespace bhs

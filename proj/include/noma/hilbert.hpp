#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <vector>

namespace noma {

using IntMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;
using IntVector = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;

struct HilbertOptions {
  std::int64_t coordinate_cap = 50;
  std::size_t element_cap = 100'000;
};

/// Minimal nonnegative integer solutions of A x = 0 (the Hilbert basis of the solution
/// monoid), by Contejean-Devie completion. Sorted lexicographically.
/// Throws ResourceLimitError when a coordinate or the frontier exceeds the caps.
std::vector<IntVector> hilbert_basis(const IntMatrix& A, const HilbertOptions& options = {});

/// True iff a <= b componentwise.
bool dominated_by(const IntVector& a, const IntVector& b);

}  // namespace noma

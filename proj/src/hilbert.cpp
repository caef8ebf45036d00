#include "noma/hilbert.hpp"

#include "noma/core.hpp"

#include <algorithm>
#include <set>

namespace noma {

namespace {

struct LexLess {
  bool operator()(const IntVector& a, const IntVector& b) const {
    return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
  }
};

}  // namespace

bool dominated_by(const IntVector& a, const IntVector& b) { return (a.array() <= b.array()).all(); }

std::vector<IntVector> hilbert_basis(const IntMatrix& A, const HilbertOptions& options) {
  const Eigen::Index q = A.cols();
  if (q == 0) return {};
  std::vector<IntVector> basis;
  std::vector<IntVector> frontier;
  for (Eigen::Index j = 0; j < q; ++j) frontier.push_back(IntVector::Unit(q, j));

  auto reducible = [&](const IntVector& v) {
    return std::any_of(basis.begin(), basis.end(), [&](const IntVector& b) { return dominated_by(b, v); });
  };

  while (!frontier.empty()) {
    std::vector<IntVector> open;
    for (auto& v : frontier) {
      if ((A * v).isZero()) {
        basis.push_back(v);
      } else {
        open.push_back(std::move(v));
      }
    }
    // Extend p by e_j only in directions that decrease ||A p|| (A p . A e_j < 0).
    std::set<IntVector, LexLess> next;
    for (const auto& p : open) {
      const IntVector ap = A * p;
      for (Eigen::Index j = 0; j < q; ++j) {
        if (ap.dot(A.col(j)) >= 0) continue;
        IntVector cand = p;
        cand(j) += 1;
        if (cand(j) > options.coordinate_cap) {
          throw ResourceLimitError("Hilbert basis coordinate exceeds cap " + std::to_string(options.coordinate_cap));
        }
        if (reducible(cand)) continue;
        next.insert(std::move(cand));
        if (next.size() > options.element_cap) {
          throw ResourceLimitError("Hilbert basis frontier exceeds " + std::to_string(options.element_cap) +
                                   " elements");
        }
      }
    }
    frontier.assign(next.begin(), next.end());
    if (basis.size() > options.element_cap) {
      throw ResourceLimitError("Hilbert basis exceeds " + std::to_string(options.element_cap) + " elements");
    }
  }
  std::sort(basis.begin(), basis.end(), LexLess{});
  return basis;
}

}  // namespace noma

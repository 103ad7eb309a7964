#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mmsonline/core.hpp"

namespace mmsonline {

struct MmsOptions {
  /// Largest number of positively valued items solved exactly.
  int maxItems = 24;
  int maxBundles = 8;
  /// Search nodes before giving up on exactness.
  std::uint64_t maxNodes = 50'000'000;
  /// Over the cap: return the [LPT, v(M)/n] bracket with exact = false
  /// instead of throwing CapacityError.
  bool boundOnlyOnCapacity = false;
};

/// Exact maximin share by branch-and-bound over item-to-bundle assignments.
///
/// Items are explored in non-increasing value order (ties by index); at each
/// node only bundles with pairwise distinct loads are tried, which removes the
/// bundle-relabeling symmetry. The incumbent starts at the LPT greedy split and
/// the search stops as soon as it meets the floor(v(M)/n) upper bound. A node is
/// cut when the remaining value cannot lift every bundle past the incumbent.
MmsResult mmsExact(std::span<const Rational> valuation, int nBundles,
                   const MmsOptions& options = {});

/// Exhaustive enumeration of every assignment of items to n labeled bundles
/// (the first item pinned to bundle 0). Independent oracle for mmsExact;
/// requires m <= 12 and n <= 5.
MmsResult mmsBruteForce(std::span<const Rational> valuation, int nBundles);

/// Longest-processing-time greedy split; its minimum bundle value is a lower
/// bound on the MMS.
std::vector<Bundle> lptPartition(std::span<const Rational> valuation, int nBundles);

/// A partition whose bundles are each worth at least alpha * MMS. The exact
/// witness partition satisfies every alpha <= 1, so that is what is returned.
std::vector<Bundle> alphaMmsPartition(std::span<const Rational> valuation, int nBundles,
                                      const Rational& alpha, const MmsOptions& options = {});

/// mmsExact wrapped as an MmsSolver for normalize().
MmsSolver exactSolver(MmsOptions options = {});

}  // namespace mmsonline

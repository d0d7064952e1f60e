#pragma once

#include <span>
#include <vector>

namespace gazelearn {

/// Largest-remainder apportionment of `total` seats over `weights`.
///
/// Entries with eligible[k] == false get 0 seats. Quotas are
/// total * w_k / sum(w) over eligible entries; each entry receives the floor
/// of its quota and leftover seats go to the largest fractional remainders,
/// ties to the lower index. Quotas are quantized to 1e-9 seat so that equal
/// weights tie exactly despite rounding. If every eligible weight is zero the
/// seats are apportioned uniformly over eligible entries.
///
/// Throws Error(invalid_argument) on negative weights, mismatched spans,
/// or no eligible entry.
std::vector<int> largest_remainder(std::span<const double> weights, const std::vector<bool>& eligible,
                                   int total);

std::vector<int> largest_remainder(std::span<const double> weights, int total);

}  // namespace gazelearn

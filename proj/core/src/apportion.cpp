#include "gazelearn/apportion.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "gazelearn/errors.hpp"

namespace gazelearn {
namespace {

constexpr std::int64_t kQuantum = 1'000'000'000;  // 1e-9 seat

}  // namespace

std::vector<int> largest_remainder(std::span<const double> weights, const std::vector<bool>& eligible,
                                   int total) {
  if (weights.size() != eligible.size()) {
    throw Error(ErrorCode::invalid_argument, "weights and eligibility differ in length");
  }
  if (total < 0) {
    throw Error(ErrorCode::invalid_argument, "total must be non-negative");
  }
  const std::size_t n = weights.size();
  std::vector<double> w(n, 0.0);
  std::size_t eligible_count = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (!eligible[k]) continue;
    if (!(weights[k] >= 0.0) || !std::isfinite(weights[k])) {
      throw Error(ErrorCode::invalid_argument, "weights must be finite and non-negative");
    }
    w[k] = weights[k];
    ++eligible_count;
  }
  if (eligible_count == 0) {
    throw Error(ErrorCode::invalid_argument, "no eligible entry to apportion over");
  }
  double sum = std::accumulate(w.begin(), w.end(), 0.0);
  if (sum == 0.0) {
    for (std::size_t k = 0; k < n; ++k) w[k] = eligible[k] ? 1.0 : 0.0;
    sum = static_cast<double>(eligible_count);
  }

  std::vector<int> seats(n, 0);
  std::vector<std::int64_t> remainder(n, -1);
  int assigned = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (!eligible[k]) continue;
    const double quota = static_cast<double>(total) * w[k] / sum;
    const auto quantized = static_cast<std::int64_t>(std::llround(quota * static_cast<double>(kQuantum)));
    seats[k] = static_cast<int>(quantized / kQuantum);
    remainder[k] = quantized % kQuantum;
    assigned += seats[k];
  }

  std::vector<std::size_t> order;
  for (std::size_t k = 0; k < n; ++k) {
    if (eligible[k]) order.push_back(k);
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (remainder[a] != remainder[b]) return remainder[a] > remainder[b];
    return a < b;
  });
  // Leftover seats never exceed the number of nonzero remainders.
  for (std::size_t i = 0; assigned < total; i = (i + 1) % order.size()) {
    ++seats[order[i]];
    ++assigned;
  }
  return seats;
}

std::vector<int> largest_remainder(std::span<const double> weights, int total) {
  return largest_remainder(weights, std::vector<bool>(weights.size(), true), total);
}

}  // namespace gazelearn

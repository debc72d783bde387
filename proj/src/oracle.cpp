// SPDX-License-Identifier: Apache-2.0
#include "beampred/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace beampred {

PowerVector::PowerVector(std::vector<double> powers) : powers_(std::move(powers)) {
  for (double p : powers_) {
    if (!(p >= 0.0) || !std::isfinite(p))
      throw std::invalid_argument("power entries must be finite and nonnegative");
  }
}

BeamLabel optimal_beam(const PowerVector& pv) {
  if (pv.size() == 0) throw std::invalid_argument("empty power vector");
  const auto powers = pv.powers();
  // max_element returns the first maximum.
  const auto best = std::max_element(powers.begin(), powers.end());
  return {static_cast<std::size_t>(best - powers.begin()), pv.size()};
}

PowerVector downsample_power(const PowerVector& pv, std::size_t factor) {
  if (factor == 0 || pv.size() == 0 || pv.size() % factor != 0)
    throw std::invalid_argument("power vector length is not divisible by the downsampling factor");
  std::vector<double> kept;
  kept.reserve(pv.size() / factor);
  for (std::size_t i = 0; i < pv.size(); i += factor) kept.push_back(pv[i]);
  return PowerVector(std::move(kept));
}

std::vector<std::size_t> topk_indices(std::span<const double> scores, std::size_t k) {
  if (k < 1 || k > scores.size()) throw std::invalid_argument("k must lie in [1, Q]");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto before = [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b] || (scores[a] == scores[b] && a < b);
  };
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                    before);
  order.resize(k);
  return order;
}

std::vector<BeamLabel> topk_beams(const PowerVector& pv, std::size_t k) {
  std::vector<BeamLabel> labels;
  for (std::size_t index : topk_indices(pv.powers(), k)) labels.push_back({index, pv.size()});
  return labels;
}

}  // namespace beampred

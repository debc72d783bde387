// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace beampred {

/// Received power per beam, one training sweep. All entries nonnegative.
class PowerVector {
 public:
  PowerVector() = default;
  explicit PowerVector(std::vector<double> powers);

  std::span<const double> powers() const { return powers_; }
  std::size_t size() const { return powers_.size(); }
  double operator[](std::size_t i) const { return powers_[i]; }

 private:
  std::vector<double> powers_;
};

struct BeamLabel {
  std::size_t index = 0;
  std::size_t codebook_size = 0;

  friend bool operator==(const BeamLabel&, const BeamLabel&) = default;
};

/// Lowest index attaining the maximum power.
BeamLabel optimal_beam(const PowerVector& pv);

/// Keeps entries 0, factor, 2*factor, ...
PowerVector downsample_power(const PowerVector& pv, std::size_t factor = 2);

/// The k largest powers in non-increasing order, ties by ascending index.
std::vector<BeamLabel> topk_beams(const PowerVector& pv, std::size_t k);

/// Index form of topk_beams for arbitrary scores (powers or probabilities).
std::vector<std::size_t> topk_indices(std::span<const double> scores, std::size_t k);

}  // namespace beampred

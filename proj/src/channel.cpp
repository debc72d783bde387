// SPDX-License-Identifier: Apache-2.0
#include "beampred/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace beampred {

double direction_sine(const LinkGeometry& link, const ArrayGeometry& array) {
  const Vec3 offset = link.drone_position - link.bs_position;
  const double distance = offset.norm();
  if (!(distance > 0.0)) throw std::invalid_argument("basestation and drone positions coincide");
  // Clamp guards the last ulp; |unit . axis| <= 1 analytically.
  const double sine = offset.dot(array.array_axis) / distance;
  return std::clamp(sine, -1.0, 1.0);
}

ChannelRealization los_channel(const LinkGeometry& link, const ArrayGeometry& array, Rng& rng,
                               std::size_t num_subcarriers) {
  if (num_subcarriers < 1) throw std::invalid_argument("need at least one subcarrier");
  array.validate();
  const double distance = (link.drone_position - link.bs_position).norm();
  const double sine = direction_sine(link, array);
  constexpr double reference_distance = 1.0;
  const double phase = 2.0 * std::numbers::pi * rng.uniform();

  ChannelRealization realization;
  realization.num_subcarriers = num_subcarriers;
  realization.path_gain = std::polar(reference_distance / distance, phase);
  realization.direction_sine = sine;
  // Unit-modulus array response: the beam weights carry the 1/sqrt(M) normalization.
  const double array_scale = std::sqrt(static_cast<double>(array.num_elements));
  realization.h =
      (realization.path_gain * array_scale) * steering_vector(array, sine).weights.conjugate();
  return realization;
}

std::vector<double> received_power_vector(const ChannelRealization& channel,
                                          const BeamCodebook& codebook, const NoiseModel& noise,
                                          Rng& rng) {
  if (static_cast<std::size_t>(channel.h.size()) != codebook.num_elements())
    throw std::invalid_argument("channel and codebook disagree on the number of elements");
  if (!std::isfinite(noise.snr_db)) throw std::invalid_argument("snr_db must be finite");
  if (channel.num_subcarriers < 1) throw std::invalid_argument("need at least one subcarrier");

  const double snr = std::pow(10.0, noise.snr_db / 10.0);
  const double amplitude = std::sqrt(snr);
  const double noise_std = std::sqrt(0.5);  // per real dimension of CN(0, 1)
  const auto k_count = static_cast<double>(channel.num_subcarriers);

  std::vector<double> powers;
  powers.reserve(codebook.size());
  for (const auto& beam : codebook.beams()) {
    const std::complex<double> response = (channel.h.array() * beam.weights.array()).sum();
    if (!noise.enabled) {
      powers.push_back(snr * std::norm(response));
      continue;
    }
    double accumulated = 0.0;
    for (std::size_t k = 0; k < channel.num_subcarriers; ++k) {
      const double re = rng.normal(0.0, noise_std);
      const double im = rng.normal(0.0, noise_std);
      accumulated += std::norm(amplitude * response + std::complex<double>(re, im));
    }
    powers.push_back(accumulated / k_count);
  }
  return powers;
}

}  // namespace beampred

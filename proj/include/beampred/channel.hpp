// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <beampred/codebook.hpp>
#include <beampred/rng.hpp>

#include <complex>
#include <cstddef>
#include <vector>

namespace beampred {

/// Basestation and drone positions in the local ENU frame, meters.
struct LinkGeometry {
  Vec3 bs_position = Vec3::Zero();
  Vec3 drone_position = Vec3::UnitZ();
  double carrier_wavelength = 0.005;
};

/// Single-path LOS channel, flat across all subcarriers.
struct ChannelRealization {
  ComplexVector h;
  std::size_t num_subcarriers = 1;
  std::complex<double> path_gain{1.0, 0.0};
  /// Direction sine along the array axis that generated h.
  double direction_sine = 0.0;
};

/// Receive noise. snr_db is the transmit SNR P / sigma^2.
/// With `enabled == false` the power vector is the noiseless SNR * |h^T f|^2.
struct NoiseModel {
  double snr_db = 25.0;
  bool enabled = true;
};

/// Projection of the unit bs->drone direction onto the array axis.
double direction_sine(const LinkGeometry& link, const ArrayGeometry& array);

/// h = path_gain * conj(a(s)) with a(s) the unit-modulus array response (|h_m| = |path_gain|),
/// |path_gain| = 1 m / distance, phase uniform in [0, 2pi). A matched beam sees |h^T f|^2 = M |path_gain|^2.
ChannelRealization los_channel(const LinkGeometry& link, const ArrayGeometry& array, Rng& rng,
                               std::size_t num_subcarriers = 1);

/// Entry q = (1/K) sum_k |sqrt(SNR) h^T f_q + v_k|^2 with v_k ~ CN(0, 1).
std::vector<double> received_power_vector(const ChannelRealization& channel,
                                          const BeamCodebook& codebook, const NoiseModel& noise,
                                          Rng& rng);

}  // namespace beampred

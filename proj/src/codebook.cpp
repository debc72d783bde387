// SPDX-License-Identifier: Apache-2.0
#include "beampred/codebook.hpp"

#include <beampred/error.hpp>

#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace beampred {

void ArrayGeometry::validate() const {
  if (num_elements < 1) throw std::invalid_argument("array needs at least one element");
  if (!(element_spacing > 0.0)) throw std::invalid_argument("element spacing must be positive");
  if (std::abs(boresight.norm() - 1.0) > 1e-9 || std::abs(array_axis.norm() - 1.0) > 1e-9)
    throw std::invalid_argument("boresight and array axis must be unit vectors");
  if (std::abs(boresight.dot(array_axis)) > 1e-9)
    throw std::invalid_argument("array axis must be orthogonal to boresight");
}

BeamCodebook::BeamCodebook(ArrayGeometry geometry, std::vector<BeamVector> beams,
                           double fov_sine_half_width)
    : geometry_(std::move(geometry)), beams_(std::move(beams)), fov_(fov_sine_half_width) {
  geometry_.validate();
  if (beams_.size() < 2) throw std::invalid_argument("codebook needs at least two beams");
  if (!(fov_ > 0.0 && fov_ <= 1.0))
    throw std::invalid_argument("field-of-view sine half width must be in (0, 1]");
  for (std::size_t q = 0; q < beams_.size(); ++q) {
    if (static_cast<std::size_t>(beams_[q].weights.size()) != geometry_.num_elements)
      throw std::invalid_argument("beam length does not match array size");
    if (q > 0 && !(beams_[q].steering_sine > beams_[q - 1].steering_sine))
      throw std::invalid_argument("steering sines must be strictly increasing");
  }
}

std::size_t BeamCodebook::nearest_beam(double sine) const {
  const double position = (sine + fov_) / sine_step();
  // ceil(x - 0.5) rounds half-way cases down.
  const double rounded = std::ceil(position - 0.5);
  if (rounded <= 0.0) return 0;
  const auto last = static_cast<double>(beams_.size() - 1);
  return static_cast<std::size_t>(rounded >= last ? last : rounded);
}

BeamVector steering_vector(const ArrayGeometry& geometry, double sine_angle) {
  if (!(std::abs(sine_angle) <= 1.0))
    throw std::invalid_argument("steering sine must lie in [-1, 1]");
  if (geometry.num_elements < 1) throw std::invalid_argument("array needs at least one element");
  const auto m_count = static_cast<Eigen::Index>(geometry.num_elements);
  const double scale = 1.0 / std::sqrt(static_cast<double>(m_count));
  BeamVector beam;
  beam.steering_sine = sine_angle;
  beam.weights.resize(m_count);
  for (Eigen::Index m = 0; m < m_count; ++m) {
    const double phase = 2.0 * std::numbers::pi * geometry.element_spacing *
                         static_cast<double>(m) * sine_angle;
    beam.weights[m] = std::polar(scale, phase);
  }
  return beam;
}

BeamCodebook build_codebook(const ArrayGeometry& geometry, std::size_t num_beams,
                            double fov_sine_half_width) {
  if (num_beams < 2) throw std::invalid_argument("codebook needs at least two beams");
  if (!(fov_sine_half_width > 0.0 && fov_sine_half_width <= 1.0))
    throw std::invalid_argument("field-of-view sine half width must be in (0, 1]");
  const double step = 2.0 * fov_sine_half_width / static_cast<double>(num_beams - 1);
  std::vector<BeamVector> beams;
  beams.reserve(num_beams);
  for (std::size_t q = 0; q < num_beams; ++q) {
    double sine = -fov_sine_half_width + static_cast<double>(q) * step;
    if (q == num_beams - 1) sine = fov_sine_half_width;
    beams.push_back(steering_vector(geometry, sine));
  }
  return BeamCodebook(geometry, std::move(beams), fov_sine_half_width);
}

double beam_gain(const BeamVector& beam, const ComplexVector& channel) {
  if (beam.weights.size() != channel.size())
    throw std::invalid_argument("channel length does not match beam length");
  const std::complex<double> response = (channel.array() * beam.weights.array()).sum();
  return std::norm(response);
}

std::vector<double> beam_gains(const BeamCodebook& codebook, const ComplexVector& channel) {
  std::vector<double> gains;
  gains.reserve(codebook.size());
  for (const auto& beam : codebook.beams()) gains.push_back(beam_gain(beam, channel));
  return gains;
}

void write_codebook(std::ostream& out, const BeamCodebook& codebook) {
  const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
  out << codebook.num_elements() << ' ' << codebook.size() << ' '
      << codebook.fov_sine_half_width() << '\n';
  for (const auto& beam : codebook.beams()) {
    for (Eigen::Index m = 0; m < beam.weights.size(); ++m) {
      if (m > 0) out << ' ';
      out << beam.weights[m].real() << ' ' << beam.weights[m].imag();
    }
    out << '\n';
  }
  out.precision(old_precision);
}

BeamCodebook read_codebook(std::istream& in, ArrayGeometry geometry) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("codebook file: missing header line");
  std::istringstream header(line);
  std::size_t m_count = 0;
  std::size_t q_count = 0;
  double fov = 0.0;
  if (!(header >> m_count >> q_count >> fov) || m_count == 0 || q_count < 2)
    throw DataError("codebook file: header must be 'M Q fov'");
  geometry.num_elements = m_count;
  const double step = 2.0 * fov / static_cast<double>(q_count - 1);
  std::vector<BeamVector> beams;
  beams.reserve(q_count);
  for (std::size_t q = 0; q < q_count; ++q) {
    if (!std::getline(in, line))
      throw DataError("codebook file: expected " + std::to_string(q_count) + " beam rows");
    std::istringstream row(line);
    BeamVector beam;
    beam.steering_sine = (q == q_count - 1) ? fov : -fov + static_cast<double>(q) * step;
    beam.weights.resize(static_cast<Eigen::Index>(m_count));
    for (std::size_t m = 0; m < m_count; ++m) {
      double re = 0.0;
      double im = 0.0;
      if (!(row >> re >> im))
        throw DataError("codebook file: beam row " + std::to_string(q + 1) + " is too short");
      beam.weights[static_cast<Eigen::Index>(m)] = {re, im};
    }
    beams.push_back(std::move(beam));
  }
  return BeamCodebook(std::move(geometry), std::move(beams), fov);
}

}  // namespace beampred

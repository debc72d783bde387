// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <vector>

namespace beampred {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using ComplexVector = Eigen::VectorXcd;

/// Uniform linear array. Spacing is in carrier wavelengths.
struct ArrayGeometry {
  std::size_t num_elements = 16;
  double element_spacing = 0.5;
  Vec3 boresight = Vec3::UnitZ();
  Vec3 array_axis = Vec3::UnitX();

  /// Throws std::invalid_argument when an invariant is violated.
  void validate() const;
};

/// Analog beamforming vector: unit-modulus phases scaled by 1/sqrt(M).
struct BeamVector {
  ComplexVector weights;
  double steering_sine = 0.0;
};

/// Ordered set of beams on a uniform grid in sine space.
class BeamCodebook {
 public:
  BeamCodebook(ArrayGeometry geometry, std::vector<BeamVector> beams, double fov_sine_half_width);

  const std::vector<BeamVector>& beams() const { return beams_; }
  const BeamVector& beam(std::size_t q) const { return beams_.at(q); }
  const ArrayGeometry& geometry() const { return geometry_; }
  double fov_sine_half_width() const { return fov_; }
  std::size_t size() const { return beams_.size(); }
  std::size_t num_elements() const { return geometry_.num_elements; }

  /// Spacing between adjacent steering sines.
  double sine_step() const { return 2.0 * fov_ / static_cast<double>(beams_.size() - 1); }

  /// Grid index closest to `sine`, clamped to the codebook; ties go to the lower index.
  std::size_t nearest_beam(double sine) const;

 private:
  ArrayGeometry geometry_;
  std::vector<BeamVector> beams_;
  double fov_;
};

/// Array response toward a direction with the given sine relative to boresight.
/// Element m carries phase 2*pi*spacing*m*sine.
BeamVector steering_vector(const ArrayGeometry& geometry, double sine_angle);

/// Beam q steers to -fov + q * 2 * fov / (num_beams - 1).
BeamCodebook build_codebook(const ArrayGeometry& geometry, std::size_t num_beams,
                            double fov_sine_half_width);

/// |h^T f|^2, unconjugated transpose product.
double beam_gain(const BeamVector& beam, const ComplexVector& channel);

/// beam_gain for every beam of the codebook, in beam order.
std::vector<double> beam_gains(const BeamCodebook& codebook, const ComplexVector& channel);

/// Text export: header "M Q fov", then one beam per row as interleaved re/im values.
void write_codebook(std::ostream& out, const BeamCodebook& codebook);

/// Reads the text export. Geometry fields other than M come from `geometry`.
BeamCodebook read_codebook(std::istream& in, ArrayGeometry geometry = {});

}  // namespace beampred

#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "tetrafill/su2.hpp"

namespace tetrafill {

using SpinQuad = std::array<Spin, 4>;

[[nodiscard]] inline SpinQuad equal_spins(Spin j) { return {j, j, j, j}; }

/// Normalized four-party pure state in the magnetic product basis.
///
/// Amplitudes are stored row-major over (slot1, slot2, slot3, slot4), each slot
/// running over m = j, j-1, ..., -j.
class FourSpinState {
 public:
  /// Normalizes `amplitudes`; throws std::invalid_argument on a size mismatch or zero norm.
  FourSpinState(const SpinQuad& spins, Eigen::VectorXcd amplitudes);

  /// Tensor product of four single-slot vectors (each normalized first).
  static FourSpinState product(const SpinQuad& spins,
                               const std::array<Eigen::VectorXcd, 4>& factors);

  [[nodiscard]] const SpinQuad& spins() const noexcept { return spins_; }
  [[nodiscard]] std::array<int, 4> dims() const noexcept;
  [[nodiscard]] const Eigen::VectorXcd& amplitudes() const noexcept { return amplitudes_; }
  [[nodiscard]] Complex at(int i1, int i2, int i3, int i4) const;

  /// Slot `s` of the result holds slot `perm[s]` of this state.
  [[nodiscard]] FourSpinState permuted(const std::array<int, 4>& perm) const;
  /// Applies op_1 (x) op_2 (x) op_3 (x) op_4 and renormalizes.
  [[nodiscard]] FourSpinState transformed(const std::array<Eigen::MatrixXcd, 4>& ops) const;

  [[nodiscard]] Complex inner(const FourSpinState& other) const {
    return amplitudes_.dot(other.amplitudes_);
  }

 private:
  SpinQuad spins_;
  Eigen::VectorXcd amplitudes_;
};

/// |<a|b>|
[[nodiscard]] double overlap_modulus(const FourSpinState& a, const FourSpinState& b);

/// Orthonormal channel basis of Inv(j1, j2, j3, j4): (j1 j2) -> k, (j3 j4) -> k, coupled to zero.
///
/// Basis tensors are real and stored densely; the object is immutable after construction.
class InvariantBasis {
 public:
  explicit InvariantBasis(const SpinQuad& spins);

  [[nodiscard]] const SpinQuad& spins() const noexcept { return spins_; }
  [[nodiscard]] std::size_t size() const noexcept { return labels_.size(); }
  [[nodiscard]] bool empty() const noexcept { return labels_.empty(); }
  [[nodiscard]] const std::vector<Spin>& channel_labels() const noexcept { return labels_; }
  [[nodiscard]] std::span<const double> tensor(std::size_t k) const { return tensors_.at(k); }
  [[nodiscard]] FourSpinState basis_state(std::size_t k) const;
  [[nodiscard]] std::size_t tensor_size() const noexcept { return tensor_size_; }

 private:
  SpinQuad spins_;
  std::size_t tensor_size_ = 0;
  std::vector<Spin> labels_;
  std::vector<std::vector<double>> tensors_;
};

using BasisPtr = std::shared_ptr<const InvariantBasis>;

[[nodiscard]] BasisPtr build_basis(const SpinQuad& spins);

/// Normalized coefficient vector over a channel basis.
struct InvariantState {
  BasisPtr basis;
  Eigen::VectorXcd coefficients;
};

struct Projection {
  Eigen::VectorXcd coefficients;  // <I_k | tensor>, not renormalized
  double norm = 0.0;
};

/// Four unit normals.
struct VectorConfiguration {
  std::array<SphericalDirection, 4> directions;

  [[nodiscard]] std::array<Eigen::Vector3d, 4> unit_vectors() const;
  static VectorConfiguration from_vectors(const std::array<Eigen::Vector3d, 4>& vectors);
  /// Every normal rotated by the same rotation.
  [[nodiscard]] VectorConfiguration rotated(const Eigen::Matrix3d& rotation) const;
};

/// Threshold on the projection norm below which a configuration has no invariant part.
inline constexpr double kZeroProjectionThreshold = 1e-10;

[[nodiscard]] FourSpinState embed(const InvariantState& state);
[[nodiscard]] Projection project(const FourSpinState& tensor, const InvariantBasis& basis);

/// Normalized projection of the product of coherent states onto Inv.
/// Throws ZeroProjection when the projection norm is below kZeroProjectionThreshold.
[[nodiscard]] InvariantState coherent_intertwiner(const BasisPtr& basis,
                                                  const VectorConfiguration& config);
[[nodiscard]] InvariantState coherent_intertwiner(const SpinQuad& spins,
                                                  const VectorConfiguration& config);

/// Product of the four coherent states, before projection.
[[nodiscard]] FourSpinState coherent_product(const SpinQuad& spins,
                                             const VectorConfiguration& config);

/// Group average over SU(2) by product quadrature in z-y-z Euler angles (uniform in alpha,
/// gamma; Gauss-Legendre in cos beta). Intended as an independent check of the projection.
[[nodiscard]] FourSpinState group_average_quadrature(const SpinQuad& spins,
                                                     const VectorConfiguration& config, int order);

/// || sum_i j_i n_i ||
[[nodiscard]] double closure_defect(const SpinQuad& spins, const VectorConfiguration& config);

}  // namespace tetrafill

#pragma once

#include <array>
#include <initializer_list>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tetrafill/intertwiner.hpp"

namespace tetrafill {

/// One of the seven inequivalent cuts of four parties. Slots are 0-based.
///
/// Two-slot cuts are canonicalized to the side containing slot 0, e.g. {2,3} -> {0,1}.
class Bipartition {
 public:
  /// Canonicalizes `slots` (one or two distinct slots in 0..3, or their complement).
  static Bipartition of(std::initializer_list<int> slots);
  static Bipartition single(int slot) { return of({slot}); }
  /// The {0, partner} cut, partner in 1..3.
  static Bipartition with_first(int partner) { return of({0, partner}); }
  static const std::array<Bipartition, 7>& all();

  [[nodiscard]] const std::vector<int>& kept_slots() const noexcept { return kept_; }
  [[nodiscard]] std::string label() const;  // "1", "12", ... (1-based, as in E_12)

  friend bool operator==(const Bipartition&, const Bipartition&) = default;

 private:
  explicit Bipartition(std::vector<int> kept) : kept_(std::move(kept)) {}
  std::vector<int> kept_;
};

struct BipartitionEntropies {
  std::array<double, 4> one_to_other{};      // E_1..E_4 normalized by log2 d_i
  std::array<double, 3> two_to_two{};        // E_12, E_13, E_14 normalized by log2(d_1 d_k)
  std::array<double, 4> raw_one_to_other{};  // bits
  std::array<double, 3> raw_two_to_two{};    // bits

  [[nodiscard]] bool all_below(double eps) const;
};

/// Tolerance on negative eigenvalues clipped to zero before the entropy sum.
inline constexpr double kEigenClipTolerance = 1e-10;
/// Beyond this an eigenvalue or trace defect is an error.
inline constexpr double kDensityErrorTolerance = 1e-8;

/// Partial trace over the complement of `part`, as M M^dagger with M the (kept, traced) reshape.
[[nodiscard]] Eigen::MatrixXcd reduced_density(const FourSpinState& state, const Bipartition& part);

/// -sum lambda log2 lambda. Throws InvalidDensity on a negative eigenvalue below -1e-8 or a
/// trace defect above 1e-8.
[[nodiscard]] double von_neumann_entropy(const Eigen::MatrixXcd& rho);

[[nodiscard]] BipartitionEntropies bipartition_entropies(const FourSpinState& state);

}  // namespace tetrafill

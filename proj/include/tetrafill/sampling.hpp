#pragma once

#include <array>
#include <string>
#include <string_view>

#include "tetrafill/intertwiner.hpp"
#include "tetrafill/random.hpp"

namespace tetrafill {

enum class EnsembleKind { Arbitrary, Invariant, CoherentOpen, CoherentClosed };

inline constexpr std::array<EnsembleKind, 4> kAllEnsembles{
    EnsembleKind::Arbitrary, EnsembleKind::Invariant, EnsembleKind::CoherentOpen,
    EnsembleKind::CoherentClosed};

[[nodiscard]] std::string to_string(EnsembleKind kind);
/// Accepts the tag names case-insensitively, with or without '-' / '_'.
[[nodiscard]] EnsembleKind parse_ensemble(std::string_view text);

/// Closed four-tuples modulo rotations: angle between n1 and n2, and position of n3 on its circle.
struct ClosedConfigParams {
  double theta = 0.0;  // (0, pi)
  double phi = 0.0;    // [0, 2 pi)
};

/// Distance from 0 or pi below which the circle frame is ill-defined.
inline constexpr double kDegenerateTheta = 1e-9;

/// n1 = y, n2 = (sin theta, cos theta, 0), n3 on the circle of unit vectors at unit distance
/// from -(n1 + n2), framed by z and (n1 + n2)/|n1 + n2| x z; n4 = -(n1 + n2 + n3).
/// Throws DegenerateConfig within 1e-9 of theta = 0 or pi.
[[nodiscard]] VectorConfiguration closed_config_vectors(const ClosedConfigParams& params);

/// Uniform unit vector (cos theta uniform on [-1, 1], phi uniform on [0, 2 pi)).
[[nodiscard]] SphericalDirection sample_direction(RngStream& rng);

/// Normalized i.i.d. standard complex Gaussian amplitudes (Fubini-Study uniform).
[[nodiscard]] FourSpinState sample_arbitrary(Spin j, RngStream& rng);

[[nodiscard]] InvariantState sample_invariant(const BasisPtr& basis, RngStream& rng);

/// Redraws on ZeroProjection are counted in `retries`.
inline constexpr int kMaxZeroProjectionRetries = 1000;

struct CoherentSample {
  InvariantState state;
  VectorConfiguration config;
  int retries = 0;
};

struct ClosedCoherentSample {
  InvariantState state;
  VectorConfiguration config;
  ClosedConfigParams params;
  int retries = 0;
};

[[nodiscard]] CoherentSample sample_coherent_open(const BasisPtr& basis, RngStream& rng);

/// theta = 2 arccos(1 - u), u uniform on (0, 1) (density sin(theta/2)/2); phi uniform.
[[nodiscard]] ClosedCoherentSample sample_coherent_closed(const BasisPtr& basis, RngStream& rng);

}  // namespace tetrafill

#include "tetrafill/sampling.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "tetrafill/errors.hpp"

namespace tetrafill {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

std::string to_string(EnsembleKind kind) {
  switch (kind) {
    case EnsembleKind::Arbitrary: return "arbitrary";
    case EnsembleKind::Invariant: return "invariant";
    case EnsembleKind::CoherentOpen: return "coherent-open";
    case EnsembleKind::CoherentClosed: return "coherent-closed";
  }
  throw std::logic_error("unknown ensemble");
}

EnsembleKind parse_ensemble(std::string_view text) {
  std::string key;
  for (char c : text)
    if (c != '-' && c != '_') key += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (key == "arbitrary") return EnsembleKind::Arbitrary;
  if (key == "invariant") return EnsembleKind::Invariant;
  if (key == "coherentopen") return EnsembleKind::CoherentOpen;
  if (key == "coherentclosed") return EnsembleKind::CoherentClosed;
  throw std::invalid_argument("unknown ensemble: " + std::string(text));
}

VectorConfiguration closed_config_vectors(const ClosedConfigParams& params) {
  if (params.theta < kDegenerateTheta || params.theta > std::numbers::pi - kDegenerateTheta)
    throw DegenerateConfig("closed configuration needs theta strictly inside (0, pi)");
  const Eigen::Vector3d n1(0.0, 1.0, 0.0);
  const Eigen::Vector3d n2(std::sin(params.theta), std::cos(params.theta), 0.0);
  const Eigen::Vector3d sum = n1 + n2;
  const double len = sum.norm();
  const Eigen::Vector3d center = -0.5 * sum;
  const double radius = std::sqrt(std::max(0.0, 1.0 - 0.25 * len * len));
  const Eigen::Vector3d e1 = Eigen::Vector3d::UnitZ();
  const Eigen::Vector3d e2 = (sum / len).cross(e1);
  const Eigen::Vector3d n3 =
      center + radius * (std::cos(params.phi) * e1 + std::sin(params.phi) * e2);
  const Eigen::Vector3d n4 = -sum - n3;
  return VectorConfiguration::from_vectors({n1, n2, n3, n4});
}

SphericalDirection sample_direction(RngStream& rng) {
  const double cos_theta = 2.0 * rng.uniform() - 1.0;
  const double phi = kTwoPi * rng.uniform();
  return {std::acos(cos_theta), phi};
}

FourSpinState sample_arbitrary(Spin j, RngStream& rng) {
  const auto spins = equal_spins(j);
  const Eigen::Index n = static_cast<Eigen::Index>(j.dim()) * j.dim() * j.dim() * j.dim();
  Eigen::VectorXcd amps(n);
  for (Eigen::Index i = 0; i < n; ++i) amps[i] = rng.complex_gaussian();
  return FourSpinState(spins, std::move(amps));
}

InvariantState sample_invariant(const BasisPtr& basis, RngStream& rng) {
  if (basis->empty()) throw std::invalid_argument("empty invariant basis");
  Eigen::VectorXcd c(static_cast<Eigen::Index>(basis->size()));
  for (Eigen::Index k = 0; k < c.size(); ++k) c[k] = rng.complex_gaussian();
  c.normalize();
  return {basis, std::move(c)};
}

CoherentSample sample_coherent_open(const BasisPtr& basis, RngStream& rng) {
  for (int retries = 0; retries <= kMaxZeroProjectionRetries; ++retries) {
    VectorConfiguration config;
    for (auto& d : config.directions) d = sample_direction(rng);
    try {
      return {coherent_intertwiner(basis, config), config, retries};
    } catch (const ZeroProjection&) {
    }
  }
  throw ZeroProjection(0.0);
}

ClosedCoherentSample sample_coherent_closed(const BasisPtr& basis, RngStream& rng) {
  for (int retries = 0; retries <= kMaxZeroProjectionRetries; ++retries) {
    ClosedConfigParams params;
    params.theta = 2.0 * std::acos(1.0 - rng.uniform_open());
    params.phi = kTwoPi * rng.uniform();
    try {
      const VectorConfiguration config = closed_config_vectors(params);
      return {coherent_intertwiner(basis, config), config, params, retries};
    } catch (const ZeroProjection&) {
    } catch (const DegenerateConfig&) {
    }
  }
  throw ZeroProjection(0.0);
}

}  // namespace tetrafill

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tetrafill/entanglement.hpp"
#include "tetrafill/fill.hpp"
#include "tetrafill/sampling.hpp"

namespace tetrafill {

enum class Campaign { Distribution, MeansVsJ, ConfigGrid, MeansGivenTheta, BasePerturbation };
enum class BaseConfig { Regular, Disphenoid };

[[nodiscard]] std::string to_string(Campaign campaign);
[[nodiscard]] Campaign parse_campaign(std::string_view text);
[[nodiscard]] std::string to_string(BaseConfig base);
[[nodiscard]] BaseConfig parse_base(std::string_view text);

struct CampaignConfig {
  Campaign campaign = Campaign::Distribution;
  Spin j{1};  // j_max for means-vs-j
  EnsembleKind ensemble = EnsembleKind::Arbitrary;
  std::int64_t samples = 1000;
  int bins = 1000;
  std::uint64_t seed = 1;
  int grid_a = 300;  // theta (or cos theta1) resolution
  int grid_b = 300;  // phi (or phi1) resolution
  BaseConfig base = BaseConfig::Regular;
  double tolerance = 1e-10;
  int max_restarts = 32;
  std::filesystem::path output_dir = ".";
  int workers = 1;

  /// Throws std::invalid_argument on out-of-range values.
  void validate() const;
  [[nodiscard]] SolverOptions solver() const;
};

/// One evaluated state. Optional fields are absent where they do not apply.
struct SampleRecord {
  std::int64_t index = 0;
  bool failed = false;
  std::string failure;
  double fill = 0.0;
  double residual = 0.0;
  int restarts = 0;
  std::optional<BipartitionEntropies> entropies;
  std::optional<double> theta;
  std::optional<double> phi;
  std::optional<double> closure_defect;
  int zero_projection_retries = 0;
};

struct CampaignReport {
  std::size_t rows = 0;
  std::size_t failures = 0;
  bool excess_failures = false;  // more than 0.1% of solves failed
  std::vector<std::filesystem::path> files;
};

/// Allowed failure fraction before a sampling campaign reports an error.
inline constexpr double kMaxFailureFraction = 1e-3;

/// Draws and evaluates sample `index`. All randomness comes from streams keyed by (seed, index).
[[nodiscard]] SampleRecord evaluate_sample(EnsembleKind ensemble, Spin j, const BasisPtr& basis,
                                           std::uint64_t seed, std::int64_t index,
                                           const SolverOptions& options);

/// Evaluates the coherent intertwiner of a state that has already been built.
[[nodiscard]] SampleRecord evaluate_state(const FourSpinState& state, const SolverOptions& options,
                                          RngStream& solver_rng);

/// theta_i = (i + 1/2) pi / count: interior nodes, half a step away from 0 and pi.
[[nodiscard]] std::vector<double> interior_theta_grid(int count);
/// phi_k = 2 pi k / count.
[[nodiscard]] std::vector<double> periodic_phi_grid(int count);

/// Fixed normals n1..n4 of a base configuration.
[[nodiscard]] VectorConfiguration base_configuration(BaseConfig base);

/// Scan grid for n1 in the base-perturbation campaign: uniform midpoint cells in cos theta1
/// over [-1, 1] and phi1 over [-pi, pi), shifted by less than half a cell so that the closure
/// position of n1 is a node.
struct PerturbationGrid {
  std::vector<double> cos_theta;
  std::vector<double> phi;
  std::size_t closure_cos_index = 0;
  std::size_t closure_phi_index = 0;
};
[[nodiscard]] PerturbationGrid perturbation_grid(BaseConfig base, int cos_count, int phi_count);

[[nodiscard]] CampaignReport run_distribution(const CampaignConfig& config);
[[nodiscard]] CampaignReport run_means_vs_j(const CampaignConfig& config);
[[nodiscard]] CampaignReport run_config_grid(const CampaignConfig& config);
[[nodiscard]] CampaignReport run_means_given_theta(const CampaignConfig& config);
[[nodiscard]] CampaignReport run_base_perturbation(const CampaignConfig& config);
[[nodiscard]] CampaignReport run_campaign(const CampaignConfig& config);

/// Doubles as written to every CSV: 17 significant digits, "nan" for missing values.
[[nodiscard]] std::string format_real(double value);

}  // namespace tetrafill

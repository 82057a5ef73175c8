#include "tetrafill/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <thread>

#include <fmt/format.h>

namespace tetrafill {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kLogFillFloor = 1e-16;
constexpr std::uint64_t kSolverLane = 1;

std::string normalized_key(std::string_view text) {
  std::string key;
  for (char c : text)
    if (c != '-' && c != '_') key += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return key;
}

// Runs body(i) for i in [0, n) on `workers` threads. The first exception is rethrown.
template <class Body>
void parallel_for(std::size_t n, int workers, Body&& body) {
  const std::size_t threads = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::max(workers, 1)), 1, std::max<std::size_t>(n, 1));
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = n;
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
}

std::ofstream open_csv(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return out;
}

std::string optional_real(const std::optional<double>& v) { return v ? format_real(*v) : ""; }

double log_distance(double fill) { return std::log10(std::max(1.0 - fill, kLogFillFloor)); }

struct Moments {
  std::size_t count = 0;
  double mean = 0.0;
  double stderr_ = std::numeric_limits<double>::quiet_NaN();
};

Moments moments(const std::vector<double>& values) {
  Moments m;
  m.count = values.size();
  if (values.empty()) {
    m.mean = std::numeric_limits<double>::quiet_NaN();
    return m;
  }
  double sum = 0.0;
  for (double v : values) sum += v;
  m.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - m.mean) * (v - m.mean);
    const double sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
    m.stderr_ = sd / std::sqrt(static_cast<double>(values.size()));
  }
  return m;
}

bool excess(std::size_t failures, std::size_t rows) {
  return static_cast<double>(failures) > kMaxFailureFraction * static_cast<double>(rows);
}

std::vector<SampleRecord> draw_samples(EnsembleKind ensemble, Spin j, std::uint64_t seed,
                                       std::int64_t count, const SolverOptions& options,
                                       int workers) {
  BasisPtr basis;
  if (ensemble != EnsembleKind::Arbitrary) basis = build_basis(equal_spins(j));
  std::vector<SampleRecord> records(static_cast<std::size_t>(count));
  parallel_for(records.size(), workers, [&](std::size_t i) {
    records[i] = evaluate_sample(ensemble, j, basis, seed, static_cast<std::int64_t>(i), options);
  });
  return records;
}

std::uint64_t ensemble_seed(std::uint64_t seed, Spin j, EnsembleKind ensemble) {
  const auto tag = static_cast<std::uint64_t>(j.twice()) * 8 + static_cast<std::uint64_t>(ensemble);
  return mix64(seed ^ mix64(tag + 1));
}

// Closed-configuration grid node, shared by config-grid and means-given-theta.
struct GridNode {
  double theta = 0.0;
  double phi = 0.0;
  SampleRecord record;
};

std::vector<GridNode> evaluate_closed_grid(const CampaignConfig& config) {
  const BasisPtr basis = build_basis(equal_spins(config.j));
  const auto thetas = interior_theta_grid(config.grid_a);
  const auto phis = periodic_phi_grid(config.grid_b);
  const SolverOptions options = config.solver();
  std::vector<GridNode> nodes(thetas.size() * phis.size());
  parallel_for(nodes.size(), config.workers, [&](std::size_t n) {
    GridNode& node = nodes[n];
    node.theta = thetas[n / phis.size()];
    node.phi = phis[n % phis.size()];
    RngStream solver_rng = RngStream(config.seed, n).lane(kSolverLane);
    try {
      const auto configuration = closed_config_vectors({node.theta, node.phi});
      const auto state = coherent_intertwiner(basis, configuration);
      node.record = evaluate_state(embed(state), options, solver_rng);
    } catch (const Error& e) {
      node.record.failed = true;
      node.record.failure = e.what();
      node.record.fill = std::numeric_limits<double>::quiet_NaN();
      node.record.residual = std::numeric_limits<double>::quiet_NaN();
    }
    node.record.index = static_cast<std::int64_t>(n);
    node.record.theta = node.theta;
    node.record.phi = node.phi;
  });
  return nodes;
}

double cut_entropy(const SampleRecord& r, int cut) {
  return r.entropies ? r.entropies->two_to_two[cut] : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

std::string format_real(double value) {
  if (std::isnan(value)) return "nan";
  return fmt::format("{:.17g}", value);
}

std::string to_string(Campaign campaign) {
  switch (campaign) {
    case Campaign::Distribution: return "distribution";
    case Campaign::MeansVsJ: return "means-vs-j";
    case Campaign::ConfigGrid: return "config-grid";
    case Campaign::MeansGivenTheta: return "means-given-theta";
    case Campaign::BasePerturbation: return "base-perturbation";
  }
  throw std::logic_error("unknown campaign");
}

Campaign parse_campaign(std::string_view text) {
  const std::string key = normalized_key(text);
  if (key == "distribution") return Campaign::Distribution;
  if (key == "meansvsj") return Campaign::MeansVsJ;
  if (key == "configgrid") return Campaign::ConfigGrid;
  if (key == "meansgiventheta") return Campaign::MeansGivenTheta;
  if (key == "baseperturbation") return Campaign::BasePerturbation;
  throw std::invalid_argument("unknown campaign: " + std::string(text));
}

std::string to_string(BaseConfig base) {
  return base == BaseConfig::Regular ? "regular" : "disphenoid";
}

BaseConfig parse_base(std::string_view text) {
  const std::string key = normalized_key(text);
  if (key == "regular") return BaseConfig::Regular;
  if (key == "disphenoid") return BaseConfig::Disphenoid;
  throw std::invalid_argument("unknown base configuration: " + std::string(text));
}

void CampaignConfig::validate() const {
  if (samples < 1) throw std::invalid_argument("samples must be at least 1");
  if (bins < 1) throw std::invalid_argument("bins must be at least 1");
  if (grid_a < 2 || grid_b < 2) throw std::invalid_argument("grid resolutions must be at least 2");
  if (!(tolerance > 0.0)) throw std::invalid_argument("tolerance must be positive");
  if (max_restarts < 0) throw std::invalid_argument("max-restarts must be non-negative");
  if (workers < 1) throw std::invalid_argument("workers must be at least 1");
  if (j.twice() < 1) throw std::invalid_argument("spin must be at least 1/2");
}

SolverOptions CampaignConfig::solver() const {
  SolverOptions options;
  options.tolerance = tolerance;
  options.max_restarts = max_restarts;
  return options;
}

SampleRecord evaluate_state(const FourSpinState& state, const SolverOptions& options,
                            RngStream& solver_rng) {
  SampleRecord rec;
  try {
    rec.entropies = bipartition_entropies(state);
    const FillResult result = entropic_fill(*rec.entropies, options, solver_rng);
    rec.fill = result.fill;
    rec.residual = result.residual;
    rec.restarts = result.restarts_used;
  } catch (const NoConvergence& e) {
    rec.failed = true;
    rec.failure = e.what();
    rec.fill = std::numeric_limits<double>::quiet_NaN();
    rec.residual = e.best().residual;
    rec.restarts = e.best().restarts_used;
  } catch (const Error& e) {
    rec.failed = true;
    rec.failure = e.what();
    rec.fill = std::numeric_limits<double>::quiet_NaN();
    rec.residual = std::numeric_limits<double>::quiet_NaN();
  }
  return rec;
}

SampleRecord evaluate_sample(EnsembleKind ensemble, Spin j, const BasisPtr& basis,
                             std::uint64_t seed, std::int64_t index, const SolverOptions& options) {
  RngStream rng(seed, static_cast<std::uint64_t>(index));
  RngStream solver_rng = rng.lane(kSolverLane);
  const auto spins = equal_spins(j);
  SampleRecord rec;
  try {
    switch (ensemble) {
      case EnsembleKind::Arbitrary:
        rec = evaluate_state(sample_arbitrary(j, rng), options, solver_rng);
        break;
      case EnsembleKind::Invariant:
        rec = evaluate_state(embed(sample_invariant(basis, rng)), options, solver_rng);
        break;
      case EnsembleKind::CoherentOpen: {
        const auto s = sample_coherent_open(basis, rng);
        rec = evaluate_state(embed(s.state), options, solver_rng);
        const auto v = s.config.unit_vectors();
        rec.theta = std::acos(std::clamp(v[0].dot(v[1]), -1.0, 1.0));
        rec.closure_defect = closure_defect(spins, s.config);
        rec.zero_projection_retries = s.retries;
        break;
      }
      case EnsembleKind::CoherentClosed: {
        const auto s = sample_coherent_closed(basis, rng);
        rec = evaluate_state(embed(s.state), options, solver_rng);
        rec.theta = s.params.theta;
        rec.phi = s.params.phi;
        rec.closure_defect = closure_defect(spins, s.config);
        rec.zero_projection_retries = s.retries;
        break;
      }
    }
  } catch (const ZeroProjection& e) {
    rec.failed = true;
    rec.failure = e.what();
    rec.fill = std::numeric_limits<double>::quiet_NaN();
    rec.residual = std::numeric_limits<double>::quiet_NaN();
    rec.zero_projection_retries = kMaxZeroProjectionRetries;
  }
  rec.index = index;
  return rec;
}

std::vector<double> interior_theta_grid(int count) {
  std::vector<double> g(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) g[i] = (i + 0.5) * kPi / count;
  return g;
}

std::vector<double> periodic_phi_grid(int count) {
  std::vector<double> g(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) g[k] = 2.0 * kPi * k / count;
  return g;
}

VectorConfiguration base_configuration(BaseConfig base) {
  VectorConfiguration c;
  if (base == BaseConfig::Regular) {
    const double inv_sqrt3 = 1.0 / std::sqrt(3.0);
    const std::array<double, 4> cos_theta{-inv_sqrt3, inv_sqrt3, inv_sqrt3, -inv_sqrt3};
    const std::array<double, 4> phi{-kPi / 4, -3 * kPi / 4, kPi / 4, 3 * kPi / 4};
    for (int s = 0; s < 4; ++s) c.directions[s] = {std::acos(cos_theta[s]), phi[s]};
  } else {
    const std::array<double, 4> theta{kPi / 4, kPi / 2, 3 * kPi / 4, kPi / 2};
    const std::array<double, 4> phi{-kPi / 2, 3 * kPi / 4, -kPi / 2, kPi / 4};
    for (int s = 0; s < 4; ++s) c.directions[s] = {theta[s], phi[s]};
  }
  return c;
}

PerturbationGrid perturbation_grid(BaseConfig base, int cos_count, int phi_count) {
  const auto v = base_configuration(base).unit_vectors();
  const Eigen::Vector3d closing = -(v[1] + v[2] + v[3]);
  const double cos_c = std::clamp(closing.z() / closing.norm(), -1.0, 1.0);
  const double phi_c = std::atan2(closing.y(), closing.x());

  PerturbationGrid g;
  const double dc = 2.0 / cos_count;
  g.closure_cos_index = static_cast<std::size_t>(
      std::clamp<long>(std::lround((cos_c + 1.0) / dc - 0.5), 0, cos_count - 1));
  const double shift_c = cos_c - (-1.0 + (g.closure_cos_index + 0.5) * dc);
  for (int i = 0; i < cos_count; ++i)
    g.cos_theta.push_back(std::clamp(-1.0 + (i + 0.5) * dc + shift_c, -1.0, 1.0));
  g.cos_theta[g.closure_cos_index] = cos_c;

  const double dp = 2.0 * kPi / phi_count;
  g.closure_phi_index = static_cast<std::size_t>(
      std::clamp<long>(std::lround((phi_c + kPi) / dp - 0.5), 0, phi_count - 1));
  const double shift_p = phi_c - (-kPi + (g.closure_phi_index + 0.5) * dp);
  for (int k = 0; k < phi_count; ++k) g.phi.push_back(-kPi + (k + 0.5) * dp + shift_p);
  g.phi[g.closure_phi_index] = phi_c;
  return g;
}

CampaignReport run_distribution(const CampaignConfig& config) {
  config.validate();
  std::filesystem::create_directories(config.output_dir);
  const auto records = draw_samples(config.ensemble, config.j, config.seed, config.samples,
                                    config.solver(), config.workers);
  CampaignReport report;
  report.rows = records.size();

  const auto samples_path = config.output_dir / "samples.csv";
  {
    auto out = open_csv(samples_path);
    out << "index,F4,E1,E2,E3,E4,E12,E13,E14,raw_E1,raw_E2,raw_E3,raw_E4,raw_E12,raw_E13,"
           "raw_E14,residual,restarts,theta,phi,closure_defect,zero_projection_retries,failed\n";
    for (const auto& r : records) {
      out << r.index << ',' << format_real(r.fill);
      for (int k = 0; k < 4; ++k)
        out << ',' << (r.entropies ? format_real(r.entropies->one_to_other[k]) : "nan");
      for (int k = 0; k < 3; ++k)
        out << ',' << (r.entropies ? format_real(r.entropies->two_to_two[k]) : "nan");
      for (int k = 0; k < 4; ++k)
        out << ',' << (r.entropies ? format_real(r.entropies->raw_one_to_other[k]) : "nan");
      for (int k = 0; k < 3; ++k)
        out << ',' << (r.entropies ? format_real(r.entropies->raw_two_to_two[k]) : "nan");
      out << ',' << format_real(r.residual) << ',' << r.restarts << ',' << optional_real(r.theta)
          << ',' << optional_real(r.phi) << ',' << optional_real(r.closure_defect) << ','
          << r.zero_projection_retries << ',' << (r.failed ? 1 : 0) << '\n';
    }
  }

  std::vector<double> fills;
  std::vector<std::int64_t> counts(static_cast<std::size_t>(config.bins), 0);
  int retries = 0;
  for (const auto& r : records) {
    retries += r.zero_projection_retries;
    if (r.failed) {
      ++report.failures;
      continue;
    }
    fills.push_back(r.fill);
    const auto bin = static_cast<std::size_t>(
        std::clamp(std::floor(r.fill * config.bins), 0.0, static_cast<double>(config.bins - 1)));
    ++counts[bin];
  }

  const auto histogram_path = config.output_dir / "histogram.csv";
  {
    auto out = open_csv(histogram_path);
    out << "bin_left,bin_right,count\n";
    for (int b = 0; b < config.bins; ++b)
      out << format_real(static_cast<double>(b) / config.bins) << ','
          << format_real(static_cast<double>(b + 1) / config.bins) << ',' << counts[b] << '\n';
  }

  const auto summary_path = config.output_dir / "summary.csv";
  {
    const Moments m = moments(fills);
    auto out = open_csv(summary_path);
    out << "ensemble,j,samples,successful,failures,mean_F4,stderr,zero_projection_retries\n";
    out << to_string(config.ensemble) << ',' << format_real(config.j.value()) << ','
        << records.size() << ',' << fills.size() << ',' << report.failures << ','
        << format_real(m.mean) << ',' << format_real(m.stderr_) << ',' << retries << '\n';
  }
  report.files = {samples_path, histogram_path, summary_path};
  report.excess_failures = excess(report.failures, report.rows);
  return report;
}

CampaignReport run_means_vs_j(const CampaignConfig& config) {
  config.validate();
  std::filesystem::create_directories(config.output_dir);
  CampaignReport report;
  const auto path = config.output_dir / "means.csv";
  auto out = open_csv(path);
  out << "j,ensemble,mean_F4,stderr,mean_one_minus_F4\n";
  for (int twice = 1; twice <= config.j.twice(); ++twice) {
    const Spin j(twice);
    for (EnsembleKind ensemble : kAllEnsembles) {
      const auto records = draw_samples(ensemble, j, ensemble_seed(config.seed, j, ensemble),
                                        config.samples, config.solver(), config.workers);
      std::vector<double> fills, gaps;
      for (const auto& r : records) {
        ++report.rows;
        if (r.failed) {
          ++report.failures;
          continue;
        }
        fills.push_back(r.fill);
        gaps.push_back(1.0 - r.fill);
      }
      const Moments m = moments(fills);
      out << format_real(j.value()) << ',' << to_string(ensemble) << ',' << format_real(m.mean)
          << ',' << format_real(m.stderr_) << ',' << format_real(moments(gaps).mean) << '\n';
    }
  }
  report.files = {path};
  report.excess_failures = excess(report.failures, report.rows);
  return report;
}

CampaignReport run_config_grid(const CampaignConfig& config) {
  config.validate();
  std::filesystem::create_directories(config.output_dir);
  const auto nodes = evaluate_closed_grid(config);
  CampaignReport report;
  report.rows = nodes.size();
  const auto path = config.output_dir / "grid.csv";
  auto out = open_csv(path);
  out << "theta,phi,E12,E13,E14,F4,log10_one_minus_F4,residual\n";
  for (const auto& node : nodes) {
    const auto& r = node.record;
    if (r.failed) ++report.failures;
    const double log_fill =
        r.failed ? std::numeric_limits<double>::quiet_NaN() : log_distance(r.fill);
    out << format_real(node.theta) << ',' << format_real(node.phi) << ','
        << format_real(cut_entropy(r, 0)) << ',' << format_real(cut_entropy(r, 1)) << ','
        << format_real(cut_entropy(r, 2)) << ',' << format_real(r.fill) << ','
        << format_real(log_fill) << ',' << format_real(r.residual) << '\n';
  }
  report.files = {path};
  return report;
}

CampaignReport run_means_given_theta(const CampaignConfig& config) {
  config.validate();
  std::filesystem::create_directories(config.output_dir);
  const auto nodes = evaluate_closed_grid(config);
  CampaignReport report;
  report.rows = nodes.size();
  const auto path = config.output_dir / "theta_means.csv";
  auto out = open_csv(path);
  out << "theta,mean_E12,mean_E13,mean_E14,mean_F4\n";
  const auto per_theta = static_cast<std::size_t>(config.grid_b);
  for (std::size_t i = 0; i < nodes.size(); i += per_theta) {
    std::array<std::vector<double>, 4> columns;
    for (std::size_t k = i; k < i + per_theta; ++k) {
      const auto& r = nodes[k].record;
      if (r.failed) {
        ++report.failures;
        continue;
      }
      for (int c = 0; c < 3; ++c) columns[c].push_back(cut_entropy(r, c));
      columns[3].push_back(r.fill);
    }
    out << format_real(nodes[i].theta);
    for (const auto& col : columns) out << ',' << format_real(moments(col).mean);
    out << '\n';
  }
  report.files = {path};
  report.excess_failures = excess(report.failures, report.rows);
  return report;
}

CampaignReport run_base_perturbation(const CampaignConfig& config) {
  config.validate();
  std::filesystem::create_directories(config.output_dir);
  const auto spins = equal_spins(config.j);
  const BasisPtr basis = build_basis(spins);
  const VectorConfiguration base = base_configuration(config.base);
  const PerturbationGrid grid = perturbation_grid(config.base, config.grid_a, config.grid_b);
  const SolverOptions options = config.solver();

  const std::size_t nphi = grid.phi.size();
  std::vector<SampleRecord> records(grid.cos_theta.size() * nphi);
  parallel_for(records.size(), config.workers, [&](std::size_t n) {
    VectorConfiguration c = base;
    c.directions[0] = {std::acos(grid.cos_theta[n / nphi]), grid.phi[n % nphi]};
    RngStream solver_rng = RngStream(config.seed, n).lane(kSolverLane);
    SampleRecord rec;
    try {
      rec = evaluate_state(embed(coherent_intertwiner(basis, c)), options, solver_rng);
    } catch (const ZeroProjection& e) {
      rec.failed = true;
      rec.failure = e.what();
      rec.fill = std::numeric_limits<double>::quiet_NaN();
      rec.residual = std::numeric_limits<double>::quiet_NaN();
    }
    rec.index = static_cast<std::int64_t>(n);
    rec.closure_defect = closure_defect(spins, c);
    records[n] = std::move(rec);
  });

  CampaignReport report;
  report.rows = records.size();
  const auto path = config.output_dir / "perturbation.csv";
  auto out = open_csv(path);
  out << "cos_theta1,phi1,F4,log10_one_minus_F4,closure_defect,residual\n";
  for (std::size_t n = 0; n < records.size(); ++n) {
    const auto& r = records[n];
    if (r.failed) ++report.failures;
    const double log_fill =
        r.failed ? std::numeric_limits<double>::quiet_NaN() : log_distance(r.fill);
    out << format_real(grid.cos_theta[n / nphi]) << ',' << format_real(grid.phi[n % nphi]) << ','
        << format_real(r.fill) << ',' << format_real(log_fill) << ','
        << format_real(*r.closure_defect) << ',' << format_real(r.residual) << '\n';
  }
  report.files = {path};
  return report;
}

CampaignReport run_campaign(const CampaignConfig& config) {
  switch (config.campaign) {
    case Campaign::Distribution: return run_distribution(config);
    case Campaign::MeansVsJ: return run_means_vs_j(config);
    case Campaign::ConfigGrid: return run_config_grid(config);
    case Campaign::MeansGivenTheta: return run_means_given_theta(config);
    case Campaign::BasePerturbation: return run_base_perturbation(config);
  }
  throw std::logic_error("unknown campaign");
}

}  // namespace tetrafill

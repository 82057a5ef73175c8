// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <fmt/format.h>

#include "tetrafill/experiments.hpp"

using namespace tetrafill;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  [[nodiscard]] std::size_t col(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw std::out_of_range("no column " + name);
    return static_cast<std::size_t>(it - header.begin());
  }
  [[nodiscard]] double num(std::size_t row, const std::string& name) const {
    return std::stod(rows[row][col(name)]);
  }
};

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

Csv read_csv(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("missing " + path.string());
  Csv csv;
  std::string line;
  std::getline(in, line);
  csv.header = split(line);
  while (std::getline(in, line)) csv.rows.push_back(split(line));
  return csv;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

const fs::path& work_dir() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / "tetrafill-acceptance";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int default_workers() {
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

CampaignConfig campaign(Campaign kind, Spin j, const std::string& sub) {
  CampaignConfig c;
  c.campaign = kind;
  c.j = j;
  c.output_dir = work_dir() / sub;
  c.workers = default_workers();
  return c;
}

FourSpinState ghz() {
  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(16);
  amps[0] = amps[15] = 1.0;
  return FourSpinState(equal_spins(Spin(1)), amps);
}

FourSpinState singlet_pair() {
  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(16);
  amps[0b0101] = 0.5;
  amps[0b0110] = -0.5;
  amps[0b1001] = -0.5;
  amps[0b1010] = 0.5;
  return FourSpinState(equal_spins(Spin(1)), amps);
}

Outcome intertwiner_maximal_entropies() {
  double worst = 0.0;
  for (int twice : {1, 2, 3, 6}) {
    const auto basis = build_basis(equal_spins(Spin(twice)));
    for (int i = 0; i < 1000; ++i) {
      RngStream rng(101, static_cast<std::uint64_t>(twice) * 1000 + i);
      const auto e = bipartition_entropies(embed(sample_invariant(basis, rng)));
      for (double v : e.one_to_other) worst = std::max(worst, std::abs(v - 1.0));
    }
  }
  return {worst <= 1e-9, fmt::format("max |E_i - 1| = {:.3g} over 4000 states", worst)};
}

Outcome regular_tetrahedron_fill() {
  const auto config = closed_config_vectors({std::acos(-1.0 / 3.0), 0.0});
  bool pass = true;
  std::string detail;
  for (int twice : {1, 3}) {
    const auto r = entropic_fill(embed(coherent_intertwiner(equal_spins(Spin(twice)), config)));
    const auto& t = r.entropies.two_to_two;
    const double spread =
        *std::max_element(t.begin(), t.end()) - *std::min_element(t.begin(), t.end());
    pass = pass && spread <= 1e-9 && std::abs(r.fill - 1.0) <= 1e-6;
    detail += fmt::format("j={}: spread {:.2g}, |F4-1| {:.2g}; ", Spin(twice).to_string(), spread,
                          std::abs(r.fill - 1.0));
  }
  return {pass, detail};
}

Outcome closed_form_oracles() {
  const double ghz_fill = entropic_fill(ghz()).fill;
  double product_max = 0.0;
  for (int twice : {1, 2, 3}) {
    for (int i = 0; i < 20; ++i) {
      RngStream rng(103, static_cast<std::uint64_t>(twice) * 100 + i);
      std::array<Eigen::VectorXcd, 4> f;
      for (auto& v : f) {
        v.resize(twice + 1);
        for (auto& x : v) x = rng.complex_gaussian();
      }
      product_max = std::max(
          product_max, entropic_fill(FourSpinState::product(equal_spins(Spin(twice)), f)).fill);
    }
  }
  const auto pair = entropic_fill(singlet_pair());
  const std::array<double, 6> expected{0.5, 0.25, 0.25, 0.25, 0.25, 0.5};
  double sigma_err = std::abs(pair.sigmas.lambda - 0.5);
  for (int k = 0; k < 6; ++k)
    sigma_err = std::max(sigma_err, std::abs(pair.sigmas.sigma[k] - expected[k]));
  const bool pass = std::abs(ghz_fill - 1.0) <= 1e-6 && product_max == 0.0 &&
                    std::abs(pair.fill) <= 1e-6 && sigma_err <= 1e-8;
  return {pass, fmt::format("GHZ |F4-1| {:.2g}; products max F4 {}; singlet pair F4 {:.2g}, "
                            "sigma/lambda err {:.2g}",
                            std::abs(ghz_fill - 1.0), product_max, pair.fill, sigma_err)};
}

Outcome solver_precision() {
  SolverOptions options;
  options.max_restarts = 32;
  bool pass = true;
  std::string detail;
  for (int twice : {1, 2}) {
    const int n = 10000;
    std::vector<SampleRecord> records(n);
    std::atomic<int> next{0};
    std::vector<std::jthread> pool;
    for (int w = 0; w < default_workers(); ++w)
      pool.emplace_back([&] {
        for (int i = next++; i < n; i = next++)
          records[i] =
              evaluate_sample(EnsembleKind::Arbitrary, Spin(twice), nullptr, 107, i, options);
      });
    pool.clear();
    int failures = 0, precise = 0, restarts = 0;
    double worst = 0.0;
    for (const auto& r : records) {
      if (r.failed) {
        ++failures;
        continue;
      }
      if (r.residual <= 1e-10) ++precise;
      worst = std::max(worst, r.residual);
      restarts += r.restarts;
    }
    const double fraction = static_cast<double>(precise) / n;
    pass = pass && failures == 0 && fraction >= 0.999;
    detail += fmt::format("j={}: {} failures, {:.4f} within 1e-10 (max {:.2g}, {} restarts); ",
                          Spin(twice).to_string(), failures, fraction, worst, restarts);
  }
  return {pass, detail};
}

Outcome projection_vs_quadrature() {
  double worst = 1.0;
  for (int twice : {1, 2}) {
    const auto spins = equal_spins(Spin(twice));
    const auto basis = build_basis(spins);
    for (int i = 0; i < 50; ++i) {
      RngStream rng(109, static_cast<std::uint64_t>(twice) * 100 + i);
      const auto s = sample_coherent_closed(basis, rng);
      const double overlap =
          overlap_modulus(embed(s.state), group_average_quadrature(spins, s.config, 8 + 8 * twice));
      worst = std::min(worst, overlap);
    }
  }
  return {worst >= 1.0 - 1e-6, fmt::format("min overlap {:.15f} over 100 configurations", worst)};
}

template <class Cdf>
double chi_square(const std::vector<double>& xs, int bins, double hi, Cdf cdf) {
  std::vector<double> counts(bins, 0.0);
  for (double x : xs) counts[std::min(bins - 1, static_cast<int>(x / hi * bins))] += 1.0;
  double chi2 = 0.0;
  for (int b = 0; b < bins; ++b) {
    const double expected = xs.size() * (cdf(hi * (b + 1) / bins) - cdf(hi * b / bins));
    chi2 += (counts[b] - expected) * (counts[b] - expected) / expected;
  }
  return chi2;
}

Outcome sampling_measures() {
  const int n = 100000, bins = 50;
  const auto basis = build_basis(equal_spins(Spin(1)));
  std::vector<double> closed, open;
  for (int i = 0; i < n; ++i) {
    RngStream a(113, i), b(127, i);
    closed.push_back(sample_coherent_closed(basis, a).params.theta);
    const auto v = sample_coherent_open(basis, b).config.unit_vectors();
    open.push_back(std::acos(std::clamp(v[0].dot(v[1]), -1.0, 1.0)));
  }
  const double critical =
      boost::math::quantile(boost::math::complement(boost::math::chi_squared(bins - 1), 1e-3));
  const double c2_closed =
      chi_square(closed, bins, kPi, [](double t) { return 1.0 - std::cos(t / 2); });
  const double c2_open =
      chi_square(open, bins, kPi, [](double t) { return (1.0 - std::cos(t)) / 2; });
  return {c2_closed < critical && c2_open < critical,
          fmt::format("chi2 closed {:.2f}, open {:.2f}, critical {:.2f} (49 dof, 1e-3)", c2_closed,
                      c2_open, critical)};
}

struct MeanStat {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t failures = 0;
};

MeanStat distribution_mean(EnsembleKind ensemble, Spin j, std::uint64_t seed) {
  auto c = campaign(Campaign::Distribution, j,
                    fmt::format("mean-{}-{}", to_string(ensemble), j.twice()));
  c.ensemble = ensemble;
  c.samples = 10000;
  c.seed = seed;
  const auto report = run_campaign(c);
  const auto summary = read_csv(c.output_dir / "summary.csv");
  return {summary.num(0, "mean_F4"), summary.num(0, "stderr"), report.failures};
}

Outcome mean_ordering() {
  const auto closed_half = distribution_mean(EnsembleKind::CoherentClosed, Spin(1), 131);
  const auto open_half = distribution_mean(EnsembleKind::CoherentOpen, Spin(1), 137);
  const auto invariant_three = distribution_mean(EnsembleKind::Invariant, Spin(6), 139);
  const auto closed_three = distribution_mean(EnsembleKind::CoherentClosed, Spin(6), 149);
  const double gap1 = closed_half.mean - open_half.mean;
  const double se1 = std::hypot(closed_half.stderr_, open_half.stderr_);
  const double gap2 = invariant_three.mean - closed_three.mean;
  const double se2 = std::hypot(invariant_three.stderr_, closed_three.stderr_);
  const std::size_t failures =
      closed_half.failures + open_half.failures + invariant_three.failures + closed_three.failures;
  return {gap1 > 3 * se1 && gap2 > 3 * se2,
          fmt::format("j=1/2 closed {:.5f} - open {:.5f} = {:.2f} SE; j=3 invariant {:.5f} - "
                      "closed {:.5f} = {:.2f} SE; {} failed rows",
                      closed_half.mean, open_half.mean, gap1 / se1, invariant_three.mean,
                      closed_three.mean, gap2 / se2, failures)};
}

Outcome config_grid_symmetries() {
  auto c = campaign(Campaign::ConfigGrid, Spin(1), "config-grid");
  c.grid_a = 60;
  c.grid_b = 60;
  (void)run_campaign(c);
  const auto grid = read_csv(c.output_dir / "grid.csv");
  const std::size_t na = 60, nb = 60;
  double sym = 0.0;
  std::size_t argmax = 0;
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t k = 0; k < nb; ++k) {
      const std::size_t r = i * nb + k;
      sym =
          std::max(sym, std::abs(grid.num(r, "E13") - grid.num(i * nb + (k + nb / 2) % nb, "E14")));
      if (grid.num(r, "F4") > grid.num(argmax, "F4")) argmax = r;
    }
  const double target = std::acos(-1.0 / 3.0);
  std::size_t row = 0;
  for (std::size_t i = 0; i < na; ++i)
    if (std::abs(grid.num(i * nb, "theta") - target) <
        std::abs(grid.num(row * nb, "theta") - target))
      row = i;
  const std::size_t at0 = row * nb, atpi = row * nb + nb / 2;  // phi = 0 and pi are nodes
  const double best = grid.num(argmax, "F4");
  const double island = std::max(grid.num(at0, "F4"), grid.num(atpi, "F4"));
  return {sym <= 1e-9 && island >= best,
          fmt::format("max |E13(phi) - E14(phi+pi)| {:.2g}; grid max F4 {:.12f} at (theta {:.4f}, "
                      "phi {:.4f}); island node F4 {:.12f}",
                      sym, best, grid.num(argmax, "theta"), grid.num(argmax, "phi"), island)};
}

Outcome theta_means() {
  auto c = campaign(Campaign::MeansGivenTheta, Spin(1), "theta-means");
  c.grid_a = 60;
  c.grid_b = 100;
  (void)run_campaign(c);
  const auto csv = read_csv(c.output_dir / "theta_means.csv");
  double diff = 0.0;
  std::size_t argmax = 0;
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    diff = std::max(diff, std::abs(csv.num(r, "mean_E13") - csv.num(r, "mean_E14")));
    if (csv.num(r, "mean_E12") > csv.num(argmax, "mean_E12")) argmax = r;
  }
  const double peak = csv.num(argmax, "theta");
  return {
      diff <= 1e-9 && std::abs(peak - kPi / 2) <= 0.2,
      fmt::format("max |mean_E13 - mean_E14| {:.2g}; argmax mean_E12 at theta {:.4f}", diff, peak)};
}

Outcome base_perturbation() {
  auto c = campaign(Campaign::BasePerturbation, Spin(1), "base-perturbation");
  c.base = BaseConfig::Regular;
  c.grid_a = 60;
  c.grid_b = 60;
  (void)run_campaign(c);
  const auto csv = read_csv(c.output_dir / "perturbation.csv");
  const auto g = perturbation_grid(BaseConfig::Regular, 60, 60);
  const std::size_t node = g.closure_cos_index * 60 + g.closure_phi_index;
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    const double f = csv.num(r, "F4");
    if (std::isnan(f)) continue;
    sum += f;
    ++count;
  }
  const double mean = sum / static_cast<double>(count);
  const double at_node = csv.num(node, "F4");
  return {std::abs(at_node - 1.0) <= 1e-6 && at_node > mean,
          fmt::format("closure node (cos {:.6f}, phi {:.6f}) F4 {:.12f}, closure defect {:.2g}; "
                      "grid mean {:.5f} over {} nodes",
                      csv.num(node, "cos_theta1"), csv.num(node, "phi1"), at_node,
                      csv.num(node, "closure_defect"), mean, count)};
}

Outcome determinism() {
  std::vector<CampaignConfig> configs;
  {
    auto c = campaign(Campaign::Distribution, Spin(1), "");
    c.ensemble = EnsembleKind::CoherentClosed;
    c.samples = 2000;
    configs.push_back(c);
    c.ensemble = EnsembleKind::Arbitrary;
    c.j = Spin(2);
    configs.push_back(c);
  }
  {
    auto c = campaign(Campaign::MeansVsJ, Spin(2), "");
    c.samples = 200;
    configs.push_back(c);
  }
  for (Campaign kind :
       {Campaign::ConfigGrid, Campaign::MeansGivenTheta, Campaign::BasePerturbation}) {
    auto c = campaign(kind, Spin(1), "");
    c.grid_a = 12;
    c.grid_b = 12;
    c.base = BaseConfig::Disphenoid;
    configs.push_back(c);
  }
  std::size_t compared = 0;
  std::vector<std::string> mismatches;
  for (std::size_t n = 0; n < configs.size(); ++n) {
    std::vector<std::string> reference;
    for (int workers : {1, 2, 8}) {
      auto c = configs[n];
      c.workers = workers;
      c.output_dir = work_dir() / fmt::format("determinism-{}-{}", n, workers);
      const auto report = run_campaign(c);
      for (std::size_t f = 0; f < report.files.size(); ++f) {
        const std::string bytes = slurp(report.files[f]);
        if (workers == 1) {
          reference.push_back(bytes);
        } else {
          ++compared;
          if (bytes != reference[f])
            mismatches.push_back(
                fmt::format("{} with {} workers", report.files[f].filename().string(), workers));
        }
      }
    }
  }
  std::string detail = fmt::format("{} CSVs compared across 1/2/8 workers", compared);
  for (const auto& m : mismatches) detail += "; differs: " + m;
  return {mismatches.empty() && compared > 0, detail};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"intertwiner one-to-other entropies maximal", intertwiner_maximal_entropies},
      {"regular tetrahedron maximal fill", regular_tetrahedron_fill},
      {"closed-form fill oracles", closed_form_oracles},
      {"solver precision", solver_precision},
      {"projection vs quadrature", projection_vs_quadrature},
      {"sampling measures", sampling_measures},
      {"mean ordering", mean_ordering},
      {"configuration-space symmetries", config_grid_symmetries},
      {"theta-conditioned means", theta_means},
      {"base-perturbation scan", base_perturbation},
      {"determinism across worker counts", determinism},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!outcome.pass) ++failed;
    std::printf("%s  %-40s %7.1fs  %s\n", outcome.pass ? "PASS" : "FAIL", name.c_str(), seconds,
                outcome.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu criteria, %d failed\n", criteria.size(), failed);
  fs::remove_all(work_dir());
  return failed == 0 ? 0 : 1;
}

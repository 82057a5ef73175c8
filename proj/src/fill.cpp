#include "tetrafill/fill.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Cholesky>

namespace tetrafill {

namespace {

using Vec7 = Eigen::Matrix<double, 7, 1>;
using Mat7 = Eigen::Matrix<double, 7, 7>;

// sigma indices touching each face
constexpr std::array<std::array<int, 3>, 4> kFaceEdges{
    {{0, 1, 2}, {0, 3, 4}, {1, 3, 5}, {2, 4, 5}}};

constexpr double kInitialFloor = 1e-6;
constexpr double kDegenerate = 1e-12;
constexpr double kEquifacialSpread = 1e-13;
constexpr double kGeometryTolerance = 1e-9;

struct Targets {
  std::array<double, 4> face;
  std::array<double, 3> cut;
};

Targets targets_of(const BipartitionEntropies& e) { return {e.one_to_other, e.two_to_two}; }

// Unknowns: x = (t12, t13, t14, t23, t24, t34, l), sigma = t^2, lambda = l^2, t >= 0.
Vec7 residual(const Vec7& x, const Targets& e, Mat7* jac) {
  Vec7 r;
  for (int f = 0; f < 4; ++f) {
    const auto& edges = kFaceEdges[f];
    r[f] = x[edges[0]] * x[edges[0]] + x[edges[1]] * x[edges[1]] + x[edges[2]] * x[edges[2]] -
           e.face[f];
  }
  const double p = x[0] * x[5];  // sqrt(s12 s34)
  const double q = x[1] * x[4];  // sqrt(s13 s24)
  const double s = x[2] * x[3];  // sqrt(s14 s23)
  const double l2 = x[6] * x[6];
  r[4] = -p + q + s - l2 * e.cut[0];
  r[5] = p - q + s - l2 * e.cut[1];
  r[6] = p + q - s - l2 * e.cut[2];

  if (jac != nullptr) {
    Mat7& J = *jac;
    J.setZero();
    for (int f = 0; f < 4; ++f)
      for (int k : kFaceEdges[f]) J(f, k) = 2.0 * x[k];
    const std::array<double, 3> sp{-1.0, 1.0, 1.0}, sq{1.0, -1.0, 1.0}, ss{1.0, 1.0, -1.0};
    for (int c = 0; c < 3; ++c) {
      J(4 + c, 0) = sp[c] * x[5];
      J(4 + c, 5) = sp[c] * x[0];
      J(4 + c, 1) = sq[c] * x[4];
      J(4 + c, 4) = sq[c] * x[1];
      J(4 + c, 2) = ss[c] * x[3];
      J(4 + c, 3) = ss[c] * x[2];
      J(4 + c, 6) = -2.0 * x[6] * e.cut[c];
    }
  }
  return r;
}

// Damped Gauss-Newton (Levenberg-Marquardt, Nielsen's damping update) from x.
Vec7 levenberg_marquardt(Vec7 x, const Targets& e, int max_iterations) {
  Mat7 J;
  Vec7 r = residual(x, e, &J);
  double cost = 0.5 * r.squaredNorm();
  double mu = 1e-3 * (J.transpose() * J).diagonal().maxCoeff();
  double nu = 2.0;

  for (int iter = 0; iter < max_iterations; ++iter) {
    if (std::sqrt(2.0 * cost) < 1e-15) break;
    const Mat7 A = J.transpose() * J;
    const Vec7 g = J.transpose() * r;
    if (g.lpNorm<Eigen::Infinity>() < 1e-300) break;

    const Vec7 delta = (A + mu * Mat7::Identity()).ldlt().solve(-g);
    if (!delta.allFinite()) {
      mu *= nu;
      nu *= 2.0;
      continue;
    }
    // Reflecting t and l leaves the residual unchanged, so sigma, lambda >= 0 for free.
    Vec7 trial = (x + delta).cwiseAbs();
    Mat7 J_trial;
    const Vec7 r_trial = residual(trial, e, &J_trial);
    const double trial_cost = 0.5 * r_trial.squaredNorm();
    const double predicted = 0.5 * delta.dot(mu * delta - g);
    const double rho = predicted > 0.0 ? (cost - trial_cost) / predicted : -1.0;

    if (rho > 0.0 && trial_cost < cost) {
      const bool small_step = delta.norm() <= 1e-15 * (x.norm() + 1e-15);
      x = trial;
      r = r_trial;
      J = J_trial;
      cost = trial_cost;
      mu *= std::max(1.0 / 3.0, 1.0 - std::pow(2.0 * rho - 1.0, 3));
      nu = 2.0;
      if (small_step) break;
    } else {
      mu *= nu;
      nu *= 2.0;
      if (mu > 1e30) break;
    }
  }
  return x;
}

SigmaSet to_sigmas(const Vec7& x) {
  SigmaSet s;
  for (int k = 0; k < 6; ++k) s.sigma[k] = x[k] * x[k];
  s.lambda = x[6] * x[6];
  return s;
}

double rss(const std::array<double, 7>& defects) {
  double acc = 0.0;
  for (double d : defects) acc += d * d;
  return std::sqrt(acc);
}

// lambda minimizing the cut-equation defects for fixed sigma
double least_squares_lambda(const SigmaSet& s, const Targets& e) {
  const auto a = face_terms(s);
  double num = 0.0, den = 0.0;
  for (int c = 0; c < 3; ++c) {
    num += a[c + 1] * e.cut[c];
    den += e.cut[c] * e.cut[c];
  }
  return den > 0.0 ? std::max(num / den, kInitialFloor) : 1.0;
}

}  // namespace

int sigma_index(int a, int b) {
  if (a > b) std::swap(a, b);
  if (a < 0 || b > 3 || a == b) throw std::invalid_argument("sigma_index needs two distinct slots");
  static constexpr int kTable[4][4] = {{-1, 0, 1, 2}, {0, -1, 3, 4}, {1, 3, -1, 5}, {2, 4, 5, -1}};
  return kTable[a][b];
}

NoConvergence::NoConvergence(SigmaSolution best)
    : Error("entropic tetrahedron equations did not converge (best residual " +
            std::to_string(best.residual) + ")"),
      best_(best) {}

std::array<double, 7> equation_defects(const BipartitionEntropies& entropies, const SigmaSet& s) {
  std::array<double, 7> d{};
  for (int f = 0; f < 4; ++f) {
    const auto& edges = kFaceEdges[f];
    d[f] = s.sigma[edges[0]] + s.sigma[edges[1]] + s.sigma[edges[2]] - entropies.one_to_other[f];
  }
  const auto a = face_terms(s);
  for (int c = 0; c < 3; ++c) d[4 + c] = a[c + 1] - s.lambda * entropies.two_to_two[c];
  return d;
}

std::array<double, 4> face_terms(const SigmaSet& s) {
  const double p = std::sqrt(s.sigma[0] * s.sigma[5]);
  const double q = std::sqrt(s.sigma[1] * s.sigma[4]);
  const double r = std::sqrt(s.sigma[2] * s.sigma[3]);
  return {p + q + r, -p + q + r, p - q + r, p + q - r};
}

SigmaSolution solve_sigmas(const BipartitionEntropies& entropies, const SolverOptions& options,
                           RngStream& rng) {
  if (!(options.tolerance > 0.0)) throw std::invalid_argument("solver tolerance must be positive");
  const Targets e = targets_of(entropies);

  const bool all_zero =
      std::all_of(e.face.begin(), e.face.end(), [](double v) { return v < kDegenerate; }) &&
      std::all_of(e.cut.begin(), e.cut.end(), [](double v) { return v < kDegenerate; });
  if (all_zero) return {SigmaSet{}, rss(equation_defects(entropies, SigmaSet{})), 0};

  const auto [face_lo, face_hi] = std::minmax_element(e.face.begin(), e.face.end());
  const auto [cut_lo, cut_hi] = std::minmax_element(e.cut.begin(), e.cut.end());
  if (*face_hi - *face_lo < kEquifacialSpread && *cut_hi - *cut_lo < kEquifacialSpread &&
      *cut_lo > kDegenerate) {
    SigmaSet s;
    const double face = (e.face[0] + e.face[1] + e.face[2] + e.face[3]) / 4.0;
    const double cut = (e.cut[0] + e.cut[1] + e.cut[2]) / 3.0;
    s.sigma.fill(face / 3.0);
    s.lambda = (face / 3.0) / cut;
    const double res = rss(equation_defects(entropies, s));
    if (res <= options.tolerance) return {s, res, 0};
  }

  Vec7 start;
  for (int a = 0; a < 4; ++a)
    for (int b = a + 1; b < 4; ++b)
      start[sigma_index(a, b)] = std::sqrt(std::max((e.face[a] + e.face[b]) / 6.0, kInitialFloor));
  start[6] = std::sqrt(least_squares_lambda(to_sigmas(start), e));

  SigmaSolution best{SigmaSet{}, std::numeric_limits<double>::infinity(), 0};
  for (int attempt = 0; attempt <= options.max_restarts; ++attempt) {
    Vec7 x0 = start;
    if (attempt > 0) {
      for (int k = 0; k < 6; ++k) x0[k] *= std::exp(2.0 * rng.uniform() - 1.0);
      x0[6] = std::sqrt(least_squares_lambda(to_sigmas(x0), e));
    }
    const SigmaSet s = to_sigmas(levenberg_marquardt(x0, e, options.max_iterations));
    const double res = rss(equation_defects(entropies, s));
    if (res < best.residual) best = {s, res, attempt};
    if (best.residual <= options.tolerance) return best;
  }
  best.restarts_used = options.max_restarts;
  throw NoConvergence(best);
}

double tetrahedron_volume(const SigmaSet& sigmas) {
  double sum = 0.0;
  for (double s : sigmas.sigma) {
    if (s < 0.0) throw InvalidGeometry("negative sigma");
    sum += s;
  }
  auto a = face_terms(sigmas);
  double product = 1.0;
  for (double& term : a) {
    if (term < -kGeometryTolerance)
      throw InvalidGeometry("inscribed-sphere term negative: " + std::to_string(term));
    product *= std::max(term, 0.0);
  }
  return std::sqrt(2.0) / 3.0 * std::sqrt(2.0 * sum) * std::pow(product, 0.25);
}

double fill_from_volume(double volume) {
  return std::pow(3.0, 7.0 / 6.0) / 2.0 * std::pow(volume, 2.0 / 3.0);
}

FillResult entropic_fill(const BipartitionEntropies& entropies, const SolverOptions& options,
                         RngStream& rng) {
  FillResult out;
  out.entropies = entropies;
  const SigmaSolution sol = solve_sigmas(entropies, options, rng);
  out.sigmas = sol.sigmas;
  out.residual = sol.residual;
  out.restarts_used = sol.restarts_used;
  out.volume = tetrahedron_volume(sol.sigmas);
  out.fill = fill_from_volume(out.volume);
  return out;
}

FillResult entropic_fill(const FourSpinState& state, const SolverOptions& options, RngStream& rng) {
  return entropic_fill(bipartition_entropies(state), options, rng);
}

FillResult entropic_fill(const FourSpinState& state, double tolerance) {
  RngStream rng(0, 0);
  SolverOptions options;
  options.tolerance = tolerance;
  return entropic_fill(state, options, rng);
}

}  // namespace tetrafill

#include "tetrafill/su2.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace tetrafill {

namespace {

constexpr int kFactorialTableSize = 1024;

const std::vector<double>& log_factorial_table() {
  static const std::vector<double> table = [] {
    std::vector<double> t(kFactorialTableSize);
    long double acc = 0.0L;
    t[0] = 0.0;
    for (int k = 1; k < kFactorialTableSize; ++k) {
      acc += std::log(static_cast<long double>(k));
      t[k] = static_cast<double>(acc);
    }
    return t;
  }();
  return table;
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  return std::round(std::exp(log_factorial(n) - log_factorial(k) - log_factorial(n - k)));
}

std::vector<Complex> powers(Complex z, int n) {
  std::vector<Complex> p(n + 1);
  p[0] = 1.0;
  for (int i = 1; i <= n; ++i) p[i] = p[i - 1] * z;
  return p;
}

}  // namespace

Spin::Spin(int twice_j) : twice_j_(twice_j) {
  if (twice_j < 0) throw std::invalid_argument("spin must be non-negative");
}

Spin Spin::parse(std::string_view text) {
  const std::string s(text);
  if (s.empty()) throw std::invalid_argument("empty spin");
  std::size_t used = 0;
  if (const auto slash = s.find('/'); slash != std::string::npos) {
    const int num = std::stoi(s.substr(0, slash), &used);
    if (used != slash || s.substr(slash + 1) != "2")
      throw std::invalid_argument("spin fraction must be n/2: " + s);
    return Spin(num);
  }
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("not a spin: " + s);
  const double twice = 2.0 * v;
  if (std::abs(twice - std::round(twice)) > 1e-9 || twice < 0)
    throw std::invalid_argument("spin must be a non-negative half-integer: " + s);
  return Spin(static_cast<int>(std::lround(twice)));
}

std::string Spin::to_string() const {
  if (twice_j_ % 2 == 0) return std::to_string(twice_j_ / 2);
  return std::to_string(twice_j_) + "/2";
}

bool MagneticIndex::valid_for(Spin j) const noexcept {
  return std::abs(twice_m) <= j.twice() && ((j.twice() - twice_m) % 2 == 0);
}

Eigen::Vector3d SphericalDirection::unit_vector() const {
  const double st = std::sin(theta);
  return {st * std::cos(phi), st * std::sin(phi), std::cos(theta)};
}

SphericalDirection SphericalDirection::from_vector(const Eigen::Vector3d& v) {
  const double rho = std::hypot(v.x(), v.y());
  double phi = std::atan2(v.y(), v.x());
  if (phi < 0) phi += 2.0 * std::numbers::pi;
  if (phi >= 2.0 * std::numbers::pi) phi = 0.0;
  return {std::atan2(rho, v.z()), phi};
}

double log_factorial(int k) {
  if (k < 0) throw std::invalid_argument("log_factorial of negative argument");
  if (k < kFactorialTableSize) return log_factorial_table()[k];
  return std::lgamma(static_cast<double>(k) + 1.0);
}

bool triangle_ok(Spin a, Spin b, Spin c) noexcept {
  const int ta = a.twice(), tb = b.twice(), tc = c.twice();
  return tc >= std::abs(ta - tb) && tc <= ta + tb && ((ta + tb + tc) % 2 == 0);
}

double clebsch_gordan_twice(int tj1, int tm1, int tj2, int tm2, int tJ, int tM) {
  if (tm1 + tm2 != tM) return 0.0;
  if (std::abs(tm1) > tj1 || std::abs(tm2) > tj2 || std::abs(tM) > tJ) return 0.0;
  if ((tj1 - tm1) % 2 || (tj2 - tm2) % 2 || (tJ - tM) % 2) return 0.0;
  if (tJ < std::abs(tj1 - tj2) || tJ > tj1 + tj2 || (tj1 + tj2 + tJ) % 2) return 0.0;

  // Integer arguments of the Racah sum.
  const int a = (tj1 + tj2 - tJ) / 2;
  const int b = (tj1 - tm1) / 2;
  const int c = (tj2 + tm2) / 2;
  const int d = (tJ - tj2 + tm1) / 2;
  const int e = (tJ - tj1 - tm2) / 2;

  const double log_pref = 0.5 * (std::log(tJ + 1.0) + log_factorial((tJ + tj1 - tj2) / 2) +
                                 log_factorial((tJ - tj1 + tj2) / 2) + log_factorial(a) -
                                 log_factorial((tj1 + tj2 + tJ) / 2 + 1) +
                                 log_factorial((tJ + tM) / 2) + log_factorial((tJ - tM) / 2) +
                                 log_factorial((tj1 - tm1) / 2) + log_factorial((tj1 + tm1) / 2) +
                                 log_factorial((tj2 - tm2) / 2) + log_factorial((tj2 + tm2) / 2));

  const int k_min = std::max({0, -d, -e});
  const int k_max = std::min({a, b, c});
  double positive = 0.0;
  double negative = 0.0;
  for (int k = k_min; k <= k_max; ++k) {
    const double term =
        std::exp(log_pref - log_factorial(k) - log_factorial(a - k) - log_factorial(b - k) -
                 log_factorial(c - k) - log_factorial(d + k) - log_factorial(e + k));
    (k % 2 == 0 ? positive : negative) += term;
  }
  return positive - negative;
}

double clebsch_gordan(Spin j1, MagneticIndex m1, Spin j2, MagneticIndex m2, Spin J,
                      MagneticIndex M) {
  return clebsch_gordan_twice(j1.twice(), m1.twice_m, j2.twice(), m2.twice_m, J.twice(), M.twice_m);
}

CoherentSpinState coherent_state(Spin j, const SphericalDirection& dir) {
  const int n = j.twice();
  CoherentSpinState out{j, Eigen::VectorXcd::Zero(n + 1)};
  if (dir.theta == std::numbers::pi) {
    out.amplitudes[n] = std::polar(1.0, -n * dir.phi);
    return out;
  }
  // xi^(j-m) / (1+|xi|^2)^j = exp(-i(j-m)phi) sin^(j-m)(theta/2) cos^(j+m)(theta/2)
  const double c = std::cos(0.5 * dir.theta);
  const double s = std::sin(0.5 * dir.theta);
  for (int slot = 0; slot <= n; ++slot) {
    const double mag = std::sqrt(binomial(n, slot)) * std::pow(c, n - slot) * std::pow(s, slot);
    out.amplitudes[slot] = std::polar(mag, -slot * dir.phi);
  }
  out.amplitudes.normalize();
  return out;
}

Eigen::Matrix2cd su2_matrix(const Eigen::AngleAxisd& rotation) {
  const Eigen::Vector3d& n = rotation.axis();
  const double half = 0.5 * rotation.angle();
  const double c = std::cos(half);
  const double s = std::sin(half);
  const Complex i(0.0, 1.0);
  Eigen::Matrix2cd u;
  u(0, 0) = c - i * s * n.z();
  u(0, 1) = -i * s * Complex(n.x(), -n.y());
  u(1, 0) = -i * s * Complex(n.x(), n.y());
  u(1, 1) = c + i * s * n.z();
  return u;
}

Eigen::Matrix2cd su2_matrix(const Eigen::Quaterniond& q) {
  const Complex i(0.0, 1.0);
  Eigen::Matrix2cd u;
  u(0, 0) = q.w() - i * q.z();
  u(0, 1) = -i * Complex(q.x(), -q.y());
  u(1, 0) = -i * Complex(q.x(), q.y());
  u(1, 1) = q.w() + i * q.z();
  return u;
}

Eigen::Matrix2cd su2_matrix_euler(double alpha, double beta, double gamma) {
  const double c = std::cos(0.5 * beta);
  const double s = std::sin(0.5 * beta);
  Eigen::Matrix2cd u;
  u(0, 0) = std::polar(c, -0.5 * (alpha + gamma));
  u(0, 1) = std::polar(-s, -0.5 * (alpha - gamma));
  u(1, 0) = std::polar(s, 0.5 * (alpha - gamma));
  u(1, 1) = std::polar(c, 0.5 * (alpha + gamma));
  return u;
}

Eigen::MatrixXcd wigner_matrix(Spin j, const Eigen::Matrix2cd& u) {
  // |j,m> ~ x^(j+m) y^(j-m) / sqrt((j+m)!(j-m)!), with x -> a x + c y, y -> b x + d y.
  const int n = j.twice();
  const auto pa = powers(u(0, 0), n);
  const auto pb = powers(u(0, 1), n);
  const auto pc = powers(u(1, 0), n);
  const auto pd = powers(u(1, 1), n);

  Eigen::MatrixXcd D(n + 1, n + 1);
  for (int p = 0; p <= n; ++p) {  // p = j + m (column)
    const int q = n - p;
    for (int pp = 0; pp <= n; ++pp) {  // pp = j + m' (row)
      const double norm = std::exp(
          0.5 * (log_factorial(pp) + log_factorial(n - pp) - log_factorial(p) - log_factorial(q)));
      Complex sum = 0.0;
      const int k_lo = std::max(0, pp - q);
      const int k_hi = std::min(p, pp);
      for (int k = k_lo; k <= k_hi; ++k) {
        sum +=
            binomial(p, k) * binomial(q, pp - k) * pa[k] * pc[p - k] * pb[pp - k] * pd[q - pp + k];
      }
      D(n - pp, n - p) = norm * sum;
    }
  }
  return D;
}

Eigen::MatrixXcd wigner_rotation(Spin j, const Eigen::AngleAxisd& rotation) {
  return wigner_matrix(j, su2_matrix(rotation));
}

Eigen::AngleAxisd coherent_rotation(const SphericalDirection& dir) {
  return Eigen::AngleAxisd(dir.theta, Eigen::Vector3d(-std::sin(dir.phi), std::cos(dir.phi), 0.0));
}

}  // namespace tetrafill

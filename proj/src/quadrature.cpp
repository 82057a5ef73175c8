#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include "tetrafill/errors.hpp"
#include "tetrafill/intertwiner.hpp"

namespace tetrafill {

namespace {

// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on P_n.
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n) {
  std::vector<double> x(n), w(n);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  return {x, w};
}

}  // namespace

FourSpinState group_average_quadrature(const SpinQuad& spins, const VectorConfiguration& config,
                                       int order) {
  if (order < 8) throw std::invalid_argument("quadrature order must be at least 8");
  std::array<Eigen::VectorXcd, 4> psi;
  std::array<int, 4> d{};
  for (int s = 0; s < 4; ++s) {
    psi[s] = coherent_state(spins[s], config.directions[s]).amplitudes;
    d[s] = spins[s].dim();
  }
  const auto [nodes, weights] = gauss_legendre(order);
  const double step = 2.0 * std::numbers::pi / order;
  const double norm_weight = 1.0 / (2.0 * order * order);

  Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(d[0] * d[1] * d[2] * d[3]);
  std::array<Eigen::VectorXcd, 4> v;
  for (int b = 0; b < order; ++b) {
    const double beta = std::acos(nodes[b]);
    const double wb = weights[b] * norm_weight;
    for (int a = 0; a < order; ++a) {
      for (int c = 0; c < order; ++c) {
        const Eigen::Matrix2cd u = su2_matrix_euler(a * step, beta, c * step);
        for (int s = 0; s < 4; ++s) v[s] = wigner_matrix(spins[s], u) * psi[s];
        Eigen::Index idx = 0;
        for (int i = 0; i < d[0]; ++i)
          for (int j = 0; j < d[1]; ++j) {
            const Complex ij = wb * v[0][i] * v[1][j];
            for (int k = 0; k < d[2]; ++k) {
              const Complex ijk = ij * v[2][k];
              for (int l = 0; l < d[3]; ++l) acc[idx++] += ijk * v[3][l];
            }
          }
      }
    }
  }
  const double norm = acc.norm();
  if (norm < kZeroProjectionThreshold) throw ZeroProjection(norm);
  return FourSpinState(spins, std::move(acc));
}

}  // namespace tetrafill

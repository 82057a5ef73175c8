#include "tetrafill/intertwiner.hpp"

#include <cmath>
#include <stdexcept>

#include "tetrafill/errors.hpp"

namespace tetrafill {

namespace {

std::array<int, 4> dims_of(const SpinQuad& spins) {
  return {spins[0].dim(), spins[1].dim(), spins[2].dim(), spins[3].dim()};
}

std::size_t volume(const std::array<int, 4>& d) {
  return static_cast<std::size_t>(d[0]) * d[1] * d[2] * d[3];
}

// new[pre, a, post] = sum_b op(a, b) old[pre, b, post]
Eigen::VectorXcd apply_on_slot(const Eigen::VectorXcd& in, const std::array<int, 4>& d, int slot,
                               const Eigen::MatrixXcd& op) {
  std::size_t pre = 1, post = 1;
  for (int s = 0; s < slot; ++s) pre *= d[s];
  for (int s = slot + 1; s < 4; ++s) post *= d[s];
  const int ds = d[slot];
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(in.size());
  for (std::size_t p = 0; p < pre; ++p) {
    for (int a = 0; a < ds; ++a) {
      for (int b = 0; b < ds; ++b) {
        const Complex w = op(a, b);
        if (w == Complex(0.0)) continue;
        const std::size_t src = (p * ds + b) * post;
        const std::size_t dst = (p * ds + a) * post;
        for (std::size_t q = 0; q < post; ++q) out[dst + q] += w * in[src + q];
      }
    }
  }
  return out;
}

}  // namespace

FourSpinState::FourSpinState(const SpinQuad& spins, Eigen::VectorXcd amplitudes)
    : spins_(spins), amplitudes_(std::move(amplitudes)) {
  if (static_cast<std::size_t>(amplitudes_.size()) != volume(dims_of(spins_)))
    throw std::invalid_argument("amplitude count does not match the spin dimensions");
  const double n = amplitudes_.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw std::invalid_argument("state has zero norm");
  amplitudes_ /= n;
}

FourSpinState FourSpinState::product(const SpinQuad& spins,
                                     const std::array<Eigen::VectorXcd, 4>& factors) {
  const auto d = dims_of(spins);
  for (int s = 0; s < 4; ++s)
    if (factors[s].size() != d[s]) throw std::invalid_argument("factor size mismatch");
  Eigen::VectorXcd amps(static_cast<Eigen::Index>(volume(d)));
  Eigen::Index idx = 0;
  for (int a = 0; a < d[0]; ++a)
    for (int b = 0; b < d[1]; ++b) {
      const Complex ab = factors[0][a] * factors[1][b];
      for (int c = 0; c < d[2]; ++c) {
        const Complex abc = ab * factors[2][c];
        for (int e = 0; e < d[3]; ++e) amps[idx++] = abc * factors[3][e];
      }
    }
  return FourSpinState(spins, std::move(amps));
}

std::array<int, 4> FourSpinState::dims() const noexcept { return dims_of(spins_); }

Complex FourSpinState::at(int i1, int i2, int i3, int i4) const {
  const auto d = dims();
  return amplitudes_[((static_cast<Eigen::Index>(i1) * d[1] + i2) * d[2] + i3) * d[3] + i4];
}

FourSpinState FourSpinState::permuted(const std::array<int, 4>& perm) const {
  const auto d = dims();
  SpinQuad new_spins;
  std::array<int, 4> nd{};
  for (int s = 0; s < 4; ++s) {
    new_spins[s] = spins_[perm[s]];
    nd[s] = d[perm[s]];
  }
  // stride of each source slot inside the new layout
  std::array<std::size_t, 4> new_stride{};
  {
    std::array<std::size_t, 4> stride_by_new_slot{};
    stride_by_new_slot[3] = 1;
    for (int s = 2; s >= 0; --s) stride_by_new_slot[s] = stride_by_new_slot[s + 1] * nd[s + 1];
    for (int s = 0; s < 4; ++s) new_stride[perm[s]] = stride_by_new_slot[s];
  }
  Eigen::VectorXcd out(amplitudes_.size());
  Eigen::Index src = 0;
  for (int a = 0; a < d[0]; ++a)
    for (int b = 0; b < d[1]; ++b)
      for (int c = 0; c < d[2]; ++c)
        for (int e = 0; e < d[3]; ++e) {
          out[static_cast<Eigen::Index>(a * new_stride[0] + b * new_stride[1] + c * new_stride[2] +
                                        e * new_stride[3])] = amplitudes_[src++];
        }
  return FourSpinState(new_spins, std::move(out));
}

FourSpinState FourSpinState::transformed(const std::array<Eigen::MatrixXcd, 4>& ops) const {
  const auto d = dims();
  Eigen::VectorXcd v = amplitudes_;
  for (int s = 0; s < 4; ++s) {
    if (ops[s].rows() != d[s] || ops[s].cols() != d[s])
      throw std::invalid_argument("local operator has the wrong dimension");
    v = apply_on_slot(v, d, s, ops[s]);
  }
  return FourSpinState(spins_, std::move(v));
}

double overlap_modulus(const FourSpinState& a, const FourSpinState& b) {
  return std::abs(a.inner(b));
}

InvariantBasis::InvariantBasis(const SpinQuad& spins) : spins_(spins) {
  const auto d = dims_of(spins);
  tensor_size_ = volume(d);
  const int t1 = spins[0].twice(), t2 = spins[1].twice();
  const int t3 = spins[2].twice(), t4 = spins[3].twice();
  if ((t1 + t2 - t3 - t4) % 2 != 0) return;

  const int k_lo = std::max(std::abs(t1 - t2), std::abs(t3 - t4));
  const int k_hi = std::min(t1 + t2, t3 + t4);
  for (int tk = k_lo; tk <= k_hi; tk += 2) {
    labels_.emplace_back(tk);
    std::vector<double> tensor(tensor_size_, 0.0);
    const double singlet = 1.0 / std::sqrt(tk + 1.0);
    for (int a = 0; a < d[0]; ++a) {
      const int m1 = t1 - 2 * a;
      for (int b = 0; b < d[1]; ++b) {
        const int m2 = t2 - 2 * b;
        const int mu = m1 + m2;
        if (std::abs(mu) > tk) continue;
        const double left = clebsch_gordan_twice(t1, m1, t2, m2, tk, mu);
        if (left == 0.0) continue;
        // <k mu; k -mu | 0 0> = (-1)^(k - mu) / sqrt(2k + 1)
        const double sign = (((tk - mu) / 2) % 2 == 0) ? 1.0 : -1.0;
        for (int c = 0; c < d[2]; ++c) {
          const int m3 = t3 - 2 * c;
          const int m4 = -mu - m3;
          if (std::abs(m4) > t4) continue;
          const int e = (t4 - m4) / 2;
          const double right = clebsch_gordan_twice(t3, m3, t4, m4, tk, -mu);
          tensor[((static_cast<std::size_t>(a) * d[1] + b) * d[2] + c) * d[3] + e] =
              sign * singlet * left * right;
        }
      }
    }
    tensors_.push_back(std::move(tensor));
  }
}

FourSpinState InvariantBasis::basis_state(std::size_t k) const {
  const auto& t = tensors_.at(k);
  Eigen::VectorXcd amps(static_cast<Eigen::Index>(t.size()));
  for (std::size_t i = 0; i < t.size(); ++i) amps[static_cast<Eigen::Index>(i)] = t[i];
  return FourSpinState(spins_, std::move(amps));
}

BasisPtr build_basis(const SpinQuad& spins) {
  return std::make_shared<const InvariantBasis>(spins);
}

std::array<Eigen::Vector3d, 4> VectorConfiguration::unit_vectors() const {
  return {directions[0].unit_vector(), directions[1].unit_vector(), directions[2].unit_vector(),
          directions[3].unit_vector()};
}

VectorConfiguration VectorConfiguration::from_vectors(const std::array<Eigen::Vector3d, 4>& v) {
  return {{SphericalDirection::from_vector(v[0]), SphericalDirection::from_vector(v[1]),
           SphericalDirection::from_vector(v[2]), SphericalDirection::from_vector(v[3])}};
}

VectorConfiguration VectorConfiguration::rotated(const Eigen::Matrix3d& rotation) const {
  auto v = unit_vectors();
  for (auto& n : v) n = rotation * n;
  return from_vectors(v);
}

FourSpinState embed(const InvariantState& state) {
  const InvariantBasis& basis = *state.basis;
  if (static_cast<std::size_t>(state.coefficients.size()) != basis.size() || basis.empty())
    throw std::invalid_argument("coefficient count does not match the basis");
  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis.tensor_size()));
  for (std::size_t k = 0; k < basis.size(); ++k) {
    const Complex c = state.coefficients[static_cast<Eigen::Index>(k)];
    const auto t = basis.tensor(k);
    for (std::size_t i = 0; i < t.size(); ++i)
      if (t[i] != 0.0) amps[static_cast<Eigen::Index>(i)] += c * t[i];
  }
  return FourSpinState(basis.spins(), std::move(amps));
}

Projection project(const FourSpinState& tensor, const InvariantBasis& basis) {
  if (tensor.spins() != basis.spins()) throw std::invalid_argument("spins do not match the basis");
  Projection out;
  out.coefficients.resize(static_cast<Eigen::Index>(basis.size()));
  const auto& amps = tensor.amplitudes();
  for (std::size_t k = 0; k < basis.size(); ++k) {
    const auto t = basis.tensor(k);
    Complex acc = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i)
      if (t[i] != 0.0) acc += t[i] * amps[static_cast<Eigen::Index>(i)];
    out.coefficients[static_cast<Eigen::Index>(k)] = acc;
  }
  out.norm = out.coefficients.norm();
  return out;
}

FourSpinState coherent_product(const SpinQuad& spins, const VectorConfiguration& config) {
  std::array<Eigen::VectorXcd, 4> factors;
  for (int s = 0; s < 4; ++s)
    factors[s] = coherent_state(spins[s], config.directions[s]).amplitudes;
  return FourSpinState::product(spins, factors);
}

InvariantState coherent_intertwiner(const BasisPtr& basis, const VectorConfiguration& config) {
  if (basis->empty()) throw ZeroProjection(0.0);
  auto proj = project(coherent_product(basis->spins(), config), *basis);
  if (proj.norm < kZeroProjectionThreshold) throw ZeroProjection(proj.norm);
  return {basis, proj.coefficients / proj.norm};
}

InvariantState coherent_intertwiner(const SpinQuad& spins, const VectorConfiguration& config) {
  return coherent_intertwiner(build_basis(spins), config);
}

double closure_defect(const SpinQuad& spins, const VectorConfiguration& config) {
  Eigen::Vector3d sum = Eigen::Vector3d::Zero();
  const auto v = config.unit_vectors();
  for (int s = 0; s < 4; ++s) sum += spins[s].value() * v[s];
  return sum.norm();
}

}  // namespace tetrafill

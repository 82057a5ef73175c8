#include "tetrafill/entanglement.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tetrafill/errors.hpp"

namespace tetrafill {

Bipartition Bipartition::of(std::initializer_list<int> slots) {
  std::vector<int> kept(slots);
  std::sort(kept.begin(), kept.end());
  if (kept.empty() || kept.size() > 3 ||
      std::adjacent_find(kept.begin(), kept.end()) != kept.end() || kept.front() < 0 ||
      kept.back() > 3)
    throw std::invalid_argument("bipartition needs 1 to 3 distinct slots in 0..3");
  if (kept.size() == 3 || (kept.size() == 2 && kept.front() != 0)) {
    std::vector<int> complement;
    for (int s = 0; s < 4; ++s)
      if (!std::binary_search(kept.begin(), kept.end(), s)) complement.push_back(s);
    kept = std::move(complement);
  }
  return Bipartition(std::move(kept));
}

const std::array<Bipartition, 7>& Bipartition::all() {
  static const std::array<Bipartition, 7> cuts{
      single(0), single(1), single(2), single(3), with_first(1), with_first(2), with_first(3)};
  return cuts;
}

std::string Bipartition::label() const {
  std::string s;
  for (int k : kept_) s += static_cast<char>('1' + k);
  return s;
}

bool BipartitionEntropies::all_below(double eps) const {
  return std::all_of(raw_one_to_other.begin(), raw_one_to_other.end(),
                     [eps](double e) { return e < eps; }) &&
         std::all_of(raw_two_to_two.begin(), raw_two_to_two.end(),
                     [eps](double e) { return e < eps; });
}

Eigen::MatrixXcd reduced_density(const FourSpinState& state, const Bipartition& part) {
  const auto& kept = part.kept_slots();
  std::array<int, 4> perm{};
  std::size_t n = 0;
  for (int s : kept) perm[n++] = s;
  for (int s = 0; s < 4; ++s)
    if (std::find(kept.begin(), kept.end(), s) == kept.end()) perm[n++] = s;

  const FourSpinState arranged = state.permuted(perm);
  const auto d = arranged.dims();
  Eigen::Index rows = 1;
  for (std::size_t s = 0; s < kept.size(); ++s) rows *= d[s];
  const Eigen::Index cols = arranged.amplitudes().size() / rows;
  // Row-major (kept, traced) layout == column-major (traced, kept).
  const Eigen::Map<const Eigen::MatrixXcd> mt(arranged.amplitudes().data(), cols, rows);
  // rho_{ab} = sum_t psi[a,t] conj(psi[b,t])
  return mt.transpose() * mt.conjugate();
}

double von_neumann_entropy(const Eigen::MatrixXcd& rho) {
  const double trace = rho.trace().real();
  if (std::abs(trace - 1.0) > kDensityErrorTolerance)
    throw InvalidDensity("density matrix trace deviates from 1: " + std::to_string(trace));
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(rho, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw InvalidDensity("eigenvalue decomposition failed");
  double entropy = 0.0;
  for (const double raw : solver.eigenvalues()) {
    if (raw < -kDensityErrorTolerance)
      throw InvalidDensity("negative eigenvalue " + std::to_string(raw));
    const double lambda = std::clamp(raw, 0.0, 1.0);
    if (lambda > 0.0) entropy -= lambda * std::log2(lambda);
  }
  return std::max(entropy, 0.0);
}

BipartitionEntropies bipartition_entropies(const FourSpinState& state) {
  BipartitionEntropies out;
  const auto d = state.dims();
  const auto normalized = [](double bits, double dim) {
    return dim > 1.0 ? bits / std::log2(dim) : 0.0;
  };
  for (int s = 0; s < 4; ++s) {
    out.raw_one_to_other[s] = von_neumann_entropy(reduced_density(state, Bipartition::single(s)));
    out.one_to_other[s] = normalized(out.raw_one_to_other[s], d[s]);
  }
  for (int k = 1; k <= 3; ++k) {
    out.raw_two_to_two[k - 1] =
        von_neumann_entropy(reduced_density(state, Bipartition::with_first(k)));
    out.two_to_two[k - 1] = normalized(out.raw_two_to_two[k - 1], double(d[0]) * d[k]);
  }
  return out;
}

}  // namespace tetrafill

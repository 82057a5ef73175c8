#pragma once

#include <array>

#include "tetrafill/entanglement.hpp"
#include "tetrafill/errors.hpp"
#include "tetrafill/intertwiner.hpp"
#include "tetrafill/random.hpp"

namespace tetrafill {

/// Inscribed-sphere triangle areas of the entropic tetrahedron plus the scale variable lambda.
struct SigmaSet {
  std::array<double, 6> sigma{};  // s12, s13, s14, s23, s24, s34
  double lambda = 0.0;
};

/// Index of sigma_{ab} in SigmaSet::sigma, for 0-based slots a != b.
[[nodiscard]] int sigma_index(int a, int b);

struct SolverOptions {
  double tolerance = 1e-10;  // on the root-sum-square of the seven equation defects
  int max_restarts = 32;
  int max_iterations = 400;  // per start
};

struct SigmaSolution {
  SigmaSet sigmas;
  double residual = 0.0;
  int restarts_used = 0;
};

class NoConvergence : public Error {
 public:
  explicit NoConvergence(SigmaSolution best);
  [[nodiscard]] const SigmaSolution& best() const noexcept { return best_; }

 private:
  SigmaSolution best_;
};

/// The seven defects: four face equations sum_k sigma_ik - E_i, then the three
/// A_k - lambda E_(1k)(..) equations, in the order (12)(34), (13)(24), (14)(23).
[[nodiscard]] std::array<double, 7> equation_defects(const BipartitionEntropies& entropies,
                                                     const SigmaSet& sigmas);

/// Solves the entropic-tetrahedron equations for the normalized entropies.
///
/// Levenberg-Marquardt on sigma = t^2, lambda = l^2 with an analytic Jacobian.
/// Restarts perturb the initial t by exp(u), u ~ U[-1, 1], drawn from `rng`.
/// Throws NoConvergence carrying the best attempt.
[[nodiscard]] SigmaSolution solve_sigmas(const BipartitionEntropies& entropies,
                                         const SolverOptions& options, RngStream& rng);

/// A_0..A_3 of the volume formula.
[[nodiscard]] std::array<double, 4> face_terms(const SigmaSet& sigmas);

/// V = (sqrt2 / 3) sqrt(S) (A0 A1 A2 A3)^(1/4), S = 2 sum sigma.
/// A_i in [-1e-9, 0) are clipped to zero; anything more negative throws InvalidGeometry.
[[nodiscard]] double tetrahedron_volume(const SigmaSet& sigmas);

/// F4 = (3^(7/6) / 2) V^(2/3)
[[nodiscard]] double fill_from_volume(double volume);

struct FillResult {
  BipartitionEntropies entropies;
  SigmaSet sigmas;
  double volume = 0.0;
  double fill = 0.0;
  double residual = 0.0;
  int restarts_used = 0;
};

[[nodiscard]] FillResult entropic_fill(const BipartitionEntropies& entropies,
                                       const SolverOptions& options, RngStream& rng);
[[nodiscard]] FillResult entropic_fill(const FourSpinState& state, const SolverOptions& options,
                                       RngStream& rng);
/// Convenience overload with a fixed restart stream.
[[nodiscard]] FillResult entropic_fill(const FourSpinState& state, double tolerance = 1e-10);

}  // namespace tetrafill

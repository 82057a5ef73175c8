#pragma once

#include <complex>
#include <string>
#include <string_view>

#include <Eigen/Dense>
#include <Eigen/Geometry>

namespace tetrafill {

using Complex = std::complex<double>;

/// Half-integer spin stored exactly as 2j.
class Spin {
 public:
  constexpr Spin() = default;
  explicit Spin(int twice_j);

  /// Parses "3/2", "1.5" or "2".
  static Spin parse(std::string_view text);

  [[nodiscard]] constexpr int twice() const noexcept { return twice_j_; }
  [[nodiscard]] constexpr int dim() const noexcept { return twice_j_ + 1; }
  [[nodiscard]] constexpr double value() const noexcept { return 0.5 * twice_j_; }
  [[nodiscard]] std::string to_string() const;

  friend constexpr bool operator==(Spin, Spin) = default;
  friend constexpr auto operator<=>(Spin, Spin) = default;

 private:
  int twice_j_ = 0;
};

/// Magnetic quantum number stored as 2m.
struct MagneticIndex {
  int twice_m = 0;

  [[nodiscard]] bool valid_for(Spin j) const noexcept;
  /// Position in the descending basis m = j, j-1, ..., -j.
  [[nodiscard]] int slot(Spin j) const noexcept { return (j.twice() - twice_m) / 2; }
  static MagneticIndex at_slot(Spin j, int slot) { return {j.twice() - 2 * slot}; }
};

/// Unit direction in polar coordinates.
struct SphericalDirection {
  double theta = 0.0;
  double phi = 0.0;

  [[nodiscard]] Eigen::Vector3d unit_vector() const;
  /// Normalizes `v`; phi is reported in [0, 2pi).
  static SphericalDirection from_vector(const Eigen::Vector3d& v);
};

struct CoherentSpinState {
  Spin spin;
  Eigen::VectorXcd amplitudes;  // indexed by m = j, j-1, ..., -j
};

/// ln(k!). Tabulated once for small k, lgamma beyond the table.
[[nodiscard]] double log_factorial(int k);

/// Condon-Shortley <j1 m1; j2 m2 | J M>. Zero for any forbidden coupling.
[[nodiscard]] double clebsch_gordan(Spin j1, MagneticIndex m1, Spin j2, MagneticIndex m2, Spin J,
                                    MagneticIndex M);

/// Same as above on raw twice-integers, for hot loops.
[[nodiscard]] double clebsch_gordan_twice(int tj1, int tm1, int tj2, int tm2, int tJ, int tM);

/// True if (a, b, c) satisfy the triangle rule with matching parity.
[[nodiscard]] bool triangle_ok(Spin a, Spin b, Spin c) noexcept;

/// Coherent spin state |j, n>, with components
///   sqrt((2j)! / ((j-m)!(j+m)!)) xi^(j-m) / (1 + |xi|^2)^j,  xi = exp(-i phi) tan(theta/2).
/// At theta = pi the lowest-weight state exp(-i 2j phi)|j,-j> is emitted directly.
[[nodiscard]] CoherentSpinState coherent_state(Spin j, const SphericalDirection& dir);

/// SU(2) element U = cos(a/2) - i sin(a/2) n.sigma for rotation by angle a about unit axis n.
[[nodiscard]] Eigen::Matrix2cd su2_matrix(const Eigen::AngleAxisd& rotation);
/// Unit quaternion (w, x, y, z) -> w - i (x sigma_x + y sigma_y + z sigma_z).
[[nodiscard]] Eigen::Matrix2cd su2_matrix(const Eigen::Quaterniond& q);
/// Rotation with z-y-z Euler angles, U = Rz(alpha) Ry(beta) Rz(gamma).
[[nodiscard]] Eigen::Matrix2cd su2_matrix_euler(double alpha, double beta, double gamma);

/// Spin-j representation of an SU(2) matrix, rows/columns ordered m = j..-j.
/// Built from the symmetric-power expansion, so no Euler-angle singularities.
[[nodiscard]] Eigen::MatrixXcd wigner_matrix(Spin j, const Eigen::Matrix2cd& u);

/// D^(j) for a rotation given as unit axis and angle.
[[nodiscard]] Eigen::MatrixXcd wigner_rotation(Spin j, const Eigen::AngleAxisd& rotation);

/// The rotation g(n) = exp(theta m.tau), m = (-sin phi, cos phi, 0), tau_k = -(i/2) sigma_k.
[[nodiscard]] Eigen::AngleAxisd coherent_rotation(const SphericalDirection& dir);

}  // namespace tetrafill

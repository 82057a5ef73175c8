#pragma once

#include <stdexcept>
#include <string>

namespace tetrafill {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The product state has no component in the invariant subspace.
class ZeroProjection : public Error {
 public:
  explicit ZeroProjection(double norm)
      : Error("projection onto the invariant subspace vanishes (norm " + std::to_string(norm) +
              ")"),
        norm_(norm) {}
  [[nodiscard]] double norm() const noexcept { return norm_; }

 private:
  double norm_;
};

class InvalidDensity : public Error {
 public:
  using Error::Error;
};

class InvalidGeometry : public Error {
 public:
  using Error::Error;
};

class DegenerateConfig : public Error {
 public:
  using Error::Error;
};

}  // namespace tetrafill

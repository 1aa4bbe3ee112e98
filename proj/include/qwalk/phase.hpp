#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>

namespace qwalk {

using cplx = std::complex<double>;

// Phase shift angle together with its unit-modulus factor e^{i*angle}.
//
// Multiples of pi/4 carry exactly rounded factors, so that pi/2 maps to the
// exact imaginary unit rather than (6.1e-17, 1). Angles built from radians
// snap to the exact table when they are bit-identical to k*pi/4.
class Phase {
 public:
  Phase() = default;

  static Phase radians(double angle) {
    for (int k = -8; k <= 8; ++k) {
      if (angle == k * std::numbers::pi / 4.0) return quarter_pi(k);
    }
    return Phase(angle, std::polar(1.0, angle), std::nullopt);
  }

  // k * pi/4.
  static Phase quarter_pi(int k) {
    const int reduced = ((k % 8) + 8) % 8;
    constexpr double h = std::numbers::sqrt2 / 2.0;
    static constexpr std::array<cplx, 8> table{
        cplx{1.0, 0.0},  cplx{h, h},   cplx{0.0, 1.0},  cplx{-h, h},
        cplx{-1.0, 0.0}, cplx{-h, -h}, cplx{0.0, -1.0}, cplx{h, -h}};
    return Phase(k * std::numbers::pi / 4.0, table[reduced], reduced);
  }

  static Phase zero() { return quarter_pi(0); }
  static Phase half_pi() { return quarter_pi(2); }
  static Phase pi() { return quarter_pi(4); }

  double angle() const { return angle_; }
  cplx factor() const { return factor_; }

  // e^{2i*angle}: the factor picked up on reflection back into a marked edge.
  cplx factor_squared() const {
    if (eighths_) return quarter_pi(2 * *eighths_).factor();
    return std::polar(1.0, 2.0 * angle_);
  }

  // Exact multiples of pi/4 only; pi/2 computed from arbitrary radians that
  // are not bit-identical to pi/2 do not count.
  bool is_half_pi() const { return eighths_ && *eighths_ == 2; }

 private:
  Phase(double angle, cplx factor, std::optional<int> eighths)
      : angle_(angle), factor_(factor), eighths_(eighths) {}

  double angle_ = 0.0;
  cplx factor_{1.0, 0.0};
  std::optional<int> eighths_ = 0;  // angle / (pi/4) mod 8 when exact
};

}  // namespace qwalk

#pragma once

#include <complex>

namespace indefsl
{

/// Axis-aligned rectangle in the complex plane.
struct Rectangle
{
  double re_min = 0.0;
  double re_max = 0.0;
  double im_min = 0.0;
  double im_max = 0.0;

  [[nodiscard]] bool contains(std::complex<double> z, double slack = 0.0) const
  {
    return z.real() >= re_min - slack && z.real() <= re_max + slack &&
           z.imag() >= im_min - slack && z.imag() <= im_max + slack;
  }
  [[nodiscard]] double width() const { return re_max - re_min; }
  [[nodiscard]] double height() const { return im_max - im_min; }
  [[nodiscard]] std::complex<double> center() const
  {
    return {0.5 * (re_min + re_max), 0.5 * (im_min + im_max)};
  }
  bool operator==(const Rectangle &) const = default;
};

}  // namespace indefsl

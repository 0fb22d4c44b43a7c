#pragma once

// Independent reference computations for the tests. Nothing here calls the library's solvers.

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

namespace oracle
{

using cplx = std::complex<double>;

/// Root with positive real and imaginary parts for Im z > 0, via std::sqrt (principal branch
/// of the standard library, cut on the negative axis).
inline cplx root(cplx z) { return std::sqrt(z); }

struct Step
{
  double a, b, v;
};

inline double step_value(const std::vector<Step> &steps, double x)
{
  for (const auto &s : steps)
  {
    if (s.a <= x && x < s.b)
    {
      return s.v;
    }
  }
  return 0.0;
}

struct State
{
  cplx f, fp;
};

// Exact propagator of f'' = c f over a signed length h (valid for either root of c).
inline State transfer(State s, cplx c, double h)
{
  const cplx r = std::sqrt(c);
  const cplx ch = std::cosh(r * h);
  const cplx sh_over = std::abs(r * h) < 1e-8 ? cplx(h) : std::sinh(r * h) / r;
  return {ch * s.f + sh_over * s.fp, c * sh_over * s.f + ch * s.fp};
}

inline std::vector<double> cuts(const std::vector<Step> &steps, double L)
{
  std::vector<double> c{-L, 0.0, L};
  for (const auto &s : steps)
  {
    c.push_back(s.a);
    c.push_back(s.b);
  }
  std::sort(c.begin(), c.end());
  c.erase(std::unique(c.begin(), c.end()), c.end());
  return c;
}

/// Recessive solution from +infinity, f(L) = e^{i k L}, carried to x = 0 by exact propagators.
inline State right_at_zero(cplx lambda, const std::vector<Step> &steps, double L)
{
  const cplx k = root(lambda);
  State s{std::exp(cplx(0, 1) * k * L), cplx(0, 1) * k * std::exp(cplx(0, 1) * k * L)};
  auto c = cuts(steps, L);
  for (auto i = c.size() - 1; i > 0; i--)
  {
    const double x1 = c[i], x0 = c[i - 1];
    if (x0 < 0.0)
    {
      break;
    }
    s = transfer(s, step_value(steps, 0.5 * (x0 + x1)) - lambda, x0 - x1);
  }
  return s;
}

/// Recessive solution from -infinity, f(-L) = e^{-k L}.
inline State left_at_zero(cplx lambda, const std::vector<Step> &steps, double L)
{
  const cplx k = root(lambda);
  State s{std::exp(-k * L), k * std::exp(-k * L)};
  auto c = cuts(steps, L);
  for (std::size_t i = 0; i + 1 < c.size(); i++)
  {
    const double x0 = c[i], x1 = c[i + 1];
    if (x1 > 0.0)
    {
      break;
    }
    s = transfer(s, step_value(steps, 0.5 * (x0 + x1)) + lambda, x1 - x0);
  }
  return s;
}

inline cplx matching(cplx lambda, const std::vector<Step> &steps, double L)
{
  const State r = right_at_zero(lambda, steps, L);
  const State l = left_at_zero(lambda, steps, L);
  return r.f * l.fp - l.f * r.fp;
}

/// Closed-form row integrals of |C| and |D| for the free kernel at spectral root k.
struct RowIntegrals
{
  double c_abs;  // int_R |C(x, y)| dx
  double d_abs;  // int over the half-line of y of |D(x, y)| dx
};

inline RowIntegrals row_integrals(cplx lambda, double y)
{
  const cplx k = root(lambda);
  const double a = std::abs(lambda);
  const double s = std::sqrt(a);
  RowIntegrals r{};
  if (y >= 0.0)
  {
    r.c_abs = std::exp(-k.imag() * y) * (1.0 / k.imag() + std::sqrt(2.0) / k.real()) / (2.0 * s);
    r.d_abs = (2.0 - std::exp(-k.imag() * y)) / (2.0 * s * k.imag());
  }
  else
  {
    r.c_abs = std::exp(k.real() * y) * (std::sqrt(2.0) / k.imag() + 1.0 / k.real()) / (2.0 * s);
    r.d_abs = (2.0 - std::exp(k.real() * y)) / (2.0 * s * k.real());
  }
  return r;
}

struct Rng
{
  std::mt19937_64 gen;
  explicit Rng(unsigned long long seed) : gen(seed) {}
  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(gen); }
  int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(gen); }
};

/// Non-real eigenvalues (upper half-plane) from a 40-digit transfer-matrix root finder.
struct Frozen
{
  const char *name;
  std::vector<Step> steps;
  std::vector<cplx> eigenvalues;
};

inline std::vector<Frozen> frozen_eigenvalues()
{
  return {
      {"well depth 1", {{-1, 1, -1}}, {{0.0, 0.64300266590505855}}},
      {"well depth 2", {{-1, 1, -2}}, {{0.0, 1.1610307024002816}}},
      {"well depth 5",
       {{-1, 1, -5}},
       {{-2.0910808944737596, 1.099436900882475}, {2.0910808944737596, 1.099436900882475}}},
      {"well depth 10",
       {{-1, 1, -10}},
       {{-5.0570129324562999, 2.4901949462949526}, {5.0570129324562999, 2.4901949462949526}}},
      {"well depth 20",
       {{-1, 1, -20}},
       {{-14.624731235491607, 1.704783375502705},
        {0.0, 6.889706540753606},
        {14.624731235491607, 1.704783375502705}}},
      {"sgn step", {{-1, 0, -1}, {0, 1, 1}}, {{0.075742086472107929, 0.030693755176327593}}},
      {"two bump",
       {{-2, -1, -5}, {1, 2, -5}},
       {{-2.534032101005405, 0.080524093299341733}, {2.534032101005405, 0.080524093299341733}}},
  };
}

}  // namespace oracle

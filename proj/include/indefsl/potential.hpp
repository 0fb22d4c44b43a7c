#pragma once

#include <optional>
#include <string>
#include <vector>

namespace indefsl
{

enum class PotentialKind
{
  StepSum,
  PiecewisePolynomial,
  TruncatedAnalytic
};

std::string to_string(PotentialKind kind);
PotentialKind potential_kind_from_string(const std::string &name);

/// q(x) = sum_k coefficients[k] * (x - a)^k on [a, b). A step piece has one coefficient.
struct PolynomialPiece
{
  double a = 0.0;
  double b = 0.0;
  std::vector<double> coefficients;

  bool operator==(const PolynomialPiece &) const = default;
};

enum class Formula
{
  Gaussian,     // amplitude * exp(-((x - center) / width)^2)
  Sech2,        // amplitude * sech^2((x - center) / width)
  Exponential,  // amplitude * exp(-|x - center| / width)
};

std::string to_string(Formula formula);
Formula formula_from_string(const std::string &name);

struct AnalyticTerm
{
  Formula formula = Formula::Gaussian;
  double amplitude = 0.0;
  double center = 0.0;
  double width = 1.0;

  [[nodiscard]] double operator()(double x) const;

  /// Closed-form integral of |term| over |x| > radius.
  [[nodiscard]] double tail_integral(double radius) const;

  bool operator==(const AnalyticTerm &) const = default;
};

struct L1Norms
{
  double total = 0.0;     // ||q||_1
  double positive = 0.0;  // ||q_+||_1
  double negative = 0.0;  // ||q_-||_1
  double error = 0.0;     // absolute error estimate, 0 for closed forms
  bool closed_form = true;
};

/// Real integrable potential. Immutable after construction; all queries are pure.
class Potential
{
public:
  /// q = 0.
  Potential();

  /// Steps given as (interval, value) pairs.
  static Potential step_sum(std::vector<PolynomialPiece> steps);
  static Potential piecewise_polynomial(std::vector<PolynomialPiece> pieces);

  /// Sum of analytic terms, cut to zero outside [-radius, radius]. Throws std::invalid_argument
  /// when the certified tail integral exceeds tail_tolerance.
  static Potential truncated_analytic(std::vector<AnalyticTerm> terms, double radius,
                                      double tail_tolerance);

  [[nodiscard]] PotentialKind kind() const { return kind_; }
  [[nodiscard]] const std::vector<PolynomialPiece> &pieces() const { return pieces_; }
  [[nodiscard]] const std::vector<AnalyticTerm> &terms() const { return terms_; }
  [[nodiscard]] double radius() const { return radius_; }
  [[nodiscard]] double tail_tolerance() const { return tail_tolerance_; }

  /// Certified bound on the integral of |q| discarded by truncation (0 for piecewise kinds).
  [[nodiscard]] double tail_bound() const;

  /// q(x), right-limit at jumps, 0 outside the support.
  [[nodiscard]] double eval(double x) const;
  [[nodiscard]] double operator()(double x) const { return eval(x); }

  /// Value at x of the smooth branch of q that is active at `inside`. Used by integrators
  /// whose stages touch a segment end where eval() would already report the next piece.
  [[nodiscard]] double eval_branch(double x, double inside) const;

  [[nodiscard]] L1Norms l1_norms() const;

  /// Smallest L with q = 0 outside [-L, L].
  [[nodiscard]] double support_radius() const;

  /// Smallest R <= support_radius() outside of which at most a fraction rel of the total
  /// mass of the terms lies. Equals support_radius() for piecewise kinds.
  [[nodiscard]] double effective_radius(double rel = 1e-6) const;

  /// Sorted points where q or its derivatives may jump (piece ends, truncation edges, kinks).
  [[nodiscard]] std::vector<double> breakpoints() const;

  [[nodiscard]] bool is_zero() const;

  [[nodiscard]] Potential scaled(double c) const;
  friend Potential operator+(const Potential &lhs, const Potential &rhs);
  friend Potential operator*(double c, const Potential &q) { return q.scaled(c); }

  bool operator==(const Potential &) const = default;

private:
  PotentialKind kind_ = PotentialKind::StepSum;
  std::vector<PolynomialPiece> pieces_;
  std::vector<AnalyticTerm> terms_;
  double radius_ = 0.0;
  double tail_tolerance_ = 0.0;
};

}  // namespace indefsl

#include "indefsl/potential.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "indefsl/quadrature.hpp"

namespace indefsl
{

std::string to_string(PotentialKind kind)
{
  switch (kind)
  {
    case PotentialKind::StepSum:
      return "step-sum";
    case PotentialKind::PiecewisePolynomial:
      return "piecewise-polynomial";
    case PotentialKind::TruncatedAnalytic:
      return "truncated-analytic";
  }
  return "unknown";
}

PotentialKind potential_kind_from_string(const std::string &name)
{
  if (name == "step-sum")
  {
    return PotentialKind::StepSum;
  }
  if (name == "piecewise-polynomial")
  {
    return PotentialKind::PiecewisePolynomial;
  }
  if (name == "truncated-analytic")
  {
    return PotentialKind::TruncatedAnalytic;
  }
  throw std::invalid_argument("unknown potential kind '" + name + "'");
}

std::string to_string(Formula formula)
{
  switch (formula)
  {
    case Formula::Gaussian:
      return "gaussian";
    case Formula::Sech2:
      return "sech2";
    case Formula::Exponential:
      return "exponential";
  }
  return "unknown";
}

Formula formula_from_string(const std::string &name)
{
  if (name == "gaussian")
  {
    return Formula::Gaussian;
  }
  if (name == "sech2")
  {
    return Formula::Sech2;
  }
  if (name == "exponential")
  {
    return Formula::Exponential;
  }
  throw std::invalid_argument("unknown analytic formula '" + name + "'");
}

double AnalyticTerm::operator()(double x) const
{
  const double s = (x - center) / width;
  switch (formula)
  {
    case Formula::Gaussian:
      return amplitude * std::exp(-s * s);
    case Formula::Sech2:
    {
      const double c = std::cosh(s);
      return std::isfinite(c) ? amplitude / (c * c) : 0.0;
    }
    case Formula::Exponential:
      return amplitude * std::exp(-std::abs(s));
  }
  return 0.0;
}

double AnalyticTerm::tail_integral(double radius) const
{
  const double amp = std::abs(amplitude);
  // One-sided integral of the unit-amplitude profile over [d, inf) in units of distance d
  // from the center (d may be negative).
  auto one_side = [this](double d) {
    const double z = d / width;
    switch (formula)
    {
      case Formula::Gaussian:
        return 0.5 * width * std::sqrt(std::numbers::pi) * std::erfc(z);
      case Formula::Sech2:
        // 1 - tanh(z) = 2 / (1 + e^{2z})
        return width * 2.0 / (1.0 + std::exp(2.0 * z));
      case Formula::Exponential:
        return z >= 0.0 ? width * std::exp(-z) : width * (2.0 - std::exp(z));
    }
    return 0.0;
  };
  return amp * (one_side(radius - center) + one_side(radius + center));
}

namespace
{

double horner(const std::vector<double> &c, double t)
{
  double s = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it)
  {
    s = s * t + *it;
  }
  return s;
}

double antiderivative(const std::vector<double> &c, double t)
{
  double s = 0.0;
  for (std::size_t k = c.size(); k-- > 0;)
  {
    s = s * t + c[k] / static_cast<double>(k + 1);
  }
  return s * t;
}

std::vector<double> derivative(const std::vector<double> &c)
{
  std::vector<double> d;
  for (std::size_t k = 1; k < c.size(); k++)
  {
    d.push_back(static_cast<double>(k) * c[k]);
  }
  return d;
}

// Real roots of the polynomial strictly inside (0, len).
std::vector<double> interior_roots(std::vector<double> c, double len)
{
  while (!c.empty() && c.back() == 0.0)
  {
    c.pop_back();
  }
  std::vector<double> roots;
  if (c.size() < 2)
  {
    return roots;
  }
  const auto deg = static_cast<Eigen::Index>(c.size() - 1);
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(deg, deg);
  for (Eigen::Index i = 1; i < deg; i++)
  {
    companion(i, i - 1) = 1.0;
  }
  for (Eigen::Index i = 0; i < deg; i++)
  {
    companion(i, deg - 1) = -c[static_cast<std::size_t>(i)] / c.back();
  }
  const Eigen::VectorXcd eig = companion.eigenvalues();
  const auto dc = derivative(c);
  for (const auto &z : eig)
  {
    if (std::abs(z.imag()) > 1e-6 * (1.0 + std::abs(z)))
    {
      continue;
    }
    double t = z.real();
    for (int it = 0; it < 8; it++)
    {
      const double d = horner(dc, t);
      if (d == 0.0)
      {
        break;
      }
      t -= horner(c, t) / d;
    }
    if (t > 0.0 && t < len)
    {
      roots.push_back(t);
    }
  }
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end(),
                          [len](double x, double y) { return std::abs(x - y) < 1e-14 * len; }),
              roots.end());
  return roots;
}

// Coefficients of p(x) = sum c_k (x - a)^k re-expanded in powers of (x - a_new).
std::vector<double> shift(const std::vector<double> &c, double a, double a_new)
{
  const double d = a_new - a;
  std::vector<double> out(c);
  // Repeated synthetic division (Taylor shift).
  const std::size_t n = out.size();
  for (std::size_t i = 0; i < n; i++)
  {
    for (std::size_t k = n - 1; k > i; k--)
    {
      out[k - 1] += d * out[k];
    }
  }
  return out;
}

void validate_pieces(std::vector<PolynomialPiece> &pieces)
{
  for (const auto &p : pieces)
  {
    if (!std::isfinite(p.a) || !std::isfinite(p.b) || !(p.a < p.b))
    {
      throw std::invalid_argument("potential piece needs finite a < b");
    }
    if (p.coefficients.empty())
    {
      throw std::invalid_argument("potential piece without coefficients");
    }
    for (double c : p.coefficients)
    {
      if (!std::isfinite(c))
      {
        throw std::invalid_argument("potential coefficient not finite");
      }
    }
  }
  std::sort(pieces.begin(), pieces.end(),
            [](const PolynomialPiece &l, const PolynomialPiece &r) { return l.a < r.a; });
  for (std::size_t i = 1; i < pieces.size(); i++)
  {
    if (pieces[i].a < pieces[i - 1].b)
    {
      throw std::invalid_argument("potential pieces overlap");
    }
  }
}

}  // namespace

Potential::Potential() = default;

Potential Potential::step_sum(std::vector<PolynomialPiece> steps)
{
  for (const auto &s : steps)
  {
    if (s.coefficients.size() != 1)
    {
      throw std::invalid_argument("step piece must carry exactly one value");
    }
  }
  validate_pieces(steps);
  Potential q;
  q.kind_ = PotentialKind::StepSum;
  q.pieces_ = std::move(steps);
  return q;
}

Potential Potential::piecewise_polynomial(std::vector<PolynomialPiece> pieces)
{
  validate_pieces(pieces);
  Potential q;
  q.kind_ = PotentialKind::PiecewisePolynomial;
  q.pieces_ = std::move(pieces);
  return q;
}

Potential Potential::truncated_analytic(std::vector<AnalyticTerm> terms, double radius,
                                        double tail_tolerance)
{
  if (!(radius > 0.0) || !std::isfinite(radius))
  {
    throw std::invalid_argument("truncation radius must be positive");
  }
  if (!(tail_tolerance >= 0.0))
  {
    throw std::invalid_argument("tail tolerance must be nonnegative");
  }
  for (const auto &t : terms)
  {
    if (!(t.width > 0.0) || !std::isfinite(t.amplitude) || !std::isfinite(t.center))
    {
      throw std::invalid_argument("analytic term needs finite amplitude/center and width > 0");
    }
  }
  Potential q;
  q.kind_ = PotentialKind::TruncatedAnalytic;
  q.terms_ = std::move(terms);
  q.radius_ = radius;
  q.tail_tolerance_ = tail_tolerance;
  const double tail = q.tail_bound();
  if (tail > tail_tolerance)
  {
    throw std::invalid_argument("certified tail " + std::to_string(tail) +
                                " exceeds tail tolerance at radius " + std::to_string(radius));
  }
  return q;
}

double Potential::tail_bound() const
{
  double tail = 0.0;
  for (const auto &t : terms_)
  {
    tail += t.tail_integral(radius_);
  }
  return tail;
}

double Potential::eval(double x) const
{
  if (kind_ == PotentialKind::TruncatedAnalytic)
  {
    // Right-limit convention: q(-R) is inside, q(R) is outside.
    if (x < -radius_ || x >= radius_)
    {
      return 0.0;
    }
    double s = 0.0;
    for (const auto &t : terms_)
    {
      s += t(x);
    }
    return s;
  }
  auto it = std::upper_bound(pieces_.begin(), pieces_.end(), x,
                             [](double v, const PolynomialPiece &p) { return v < p.a; });
  if (it == pieces_.begin())
  {
    return 0.0;
  }
  --it;
  if (x >= it->b)
  {
    return 0.0;
  }
  return horner(it->coefficients, x - it->a);
}

double Potential::eval_branch(double x, double inside) const
{
  if (kind_ == PotentialKind::TruncatedAnalytic)
  {
    if (inside < -radius_ || inside >= radius_)
    {
      return 0.0;
    }
    double s = 0.0;
    for (const auto &t : terms_)
    {
      s += t(x);
    }
    return s;
  }
  auto it = std::upper_bound(pieces_.begin(), pieces_.end(), inside,
                             [](double v, const PolynomialPiece &p) { return v < p.a; });
  if (it == pieces_.begin())
  {
    return 0.0;
  }
  --it;
  if (inside >= it->b)
  {
    return 0.0;
  }
  return horner(it->coefficients, x - it->a);
}

L1Norms Potential::l1_norms() const
{
  L1Norms n;
  if (kind_ != PotentialKind::TruncatedAnalytic)
  {
    for (const auto &p : pieces_)
    {
      const double len = p.b - p.a;
      std::vector<double> cuts{0.0};
      for (double r : interior_roots(p.coefficients, len))
      {
        cuts.push_back(r);
      }
      cuts.push_back(len);
      for (std::size_t i = 0; i + 1 < cuts.size(); i++)
      {
        const double area =
            antiderivative(p.coefficients, cuts[i + 1]) - antiderivative(p.coefficients, cuts[i]);
        if (area >= 0.0)
        {
          n.positive += area;
        }
        else
        {
          n.negative -= area;
        }
      }
    }
    n.total = n.positive + n.negative;
    return n;
  }

  IntegrateOptions opts;
  opts.tol = 2.5e-11;
  for (const auto &t : terms_)
  {
    opts.breakpoints.push_back(t.center);
  }
  const auto pos = integrate([this](double x) { return std::max(0.0, eval(x)); }, -radius_,
                             radius_, opts);
  const auto neg = integrate([this](double x) { return std::max(0.0, -eval(x)); }, -radius_,
                             radius_, opts);
  if (!pos.converged || !neg.converged)
  {
    throw std::runtime_error("l1_norms: quadrature did not converge within panel budget");
  }
  n.positive = pos.value;
  n.negative = neg.value;
  n.total = n.positive + n.negative;
  n.error = pos.error_estimate + neg.error_estimate;
  n.closed_form = false;
  return n;
}

double Potential::effective_radius(double rel) const
{
  if (kind_ != PotentialKind::TruncatedAnalytic || terms_.empty())
  {
    return support_radius();
  }
  auto tail = [this](double r) {
    double t = 0.0;
    for (const auto &term : terms_)
    {
      t += term.tail_integral(r);
    }
    return t;
  };
  const double target = rel * tail(0.0);
  double lo = 0.0, hi = radius_;
  if (tail(hi) > target)
  {
    return radius_;
  }
  for (int i = 0; i < 60; i++)
  {
    const double mid = 0.5 * (lo + hi);
    (tail(mid) > target ? lo : hi) = mid;
  }
  return std::max(hi, 1e-3 * radius_);
}

double Potential::support_radius() const
{
  if (kind_ == PotentialKind::TruncatedAnalytic)
  {
    return radius_;
  }
  double r = 0.0;
  for (const auto &p : pieces_)
  {
    r = std::max({r, std::abs(p.a), std::abs(p.b)});
  }
  return r;
}

std::vector<double> Potential::breakpoints() const
{
  std::vector<double> bp;
  if (kind_ == PotentialKind::TruncatedAnalytic)
  {
    bp = {-radius_, radius_};
    for (const auto &t : terms_)
    {
      if (t.formula == Formula::Exponential && std::abs(t.center) < radius_)
      {
        bp.push_back(t.center);
      }
    }
  }
  else
  {
    for (const auto &p : pieces_)
    {
      bp.push_back(p.a);
      bp.push_back(p.b);
    }
  }
  std::sort(bp.begin(), bp.end());
  bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
  return bp;
}

bool Potential::is_zero() const
{
  if (kind_ == PotentialKind::TruncatedAnalytic)
  {
    return std::all_of(terms_.begin(), terms_.end(),
                       [](const AnalyticTerm &t) { return t.amplitude == 0.0; });
  }
  return std::all_of(pieces_.begin(), pieces_.end(), [](const PolynomialPiece &p) {
    return std::all_of(p.coefficients.begin(), p.coefficients.end(),
                       [](double c) { return c == 0.0; });
  });
}

Potential Potential::scaled(double c) const
{
  Potential q = *this;
  for (auto &p : q.pieces_)
  {
    for (auto &v : p.coefficients)
    {
      v *= c;
    }
  }
  for (auto &t : q.terms_)
  {
    t.amplitude *= c;
  }
  q.tail_tolerance_ *= std::abs(c);
  return q;
}

Potential operator+(const Potential &lhs, const Potential &rhs)
{
  const bool l_analytic = lhs.kind_ == PotentialKind::TruncatedAnalytic;
  const bool r_analytic = rhs.kind_ == PotentialKind::TruncatedAnalytic;
  if (l_analytic != r_analytic)
  {
    if (lhs.is_zero() && lhs.pieces_.empty() && !l_analytic)
    {
      return rhs;
    }
    if (rhs.is_zero() && rhs.pieces_.empty() && !r_analytic)
    {
      return lhs;
    }
    throw std::invalid_argument("cannot add a truncated-analytic and a piecewise potential");
  }
  if (l_analytic)
  {
    auto terms = lhs.terms_;
    terms.insert(terms.end(), rhs.terms_.begin(), rhs.terms_.end());
    const double radius = std::max(lhs.radius_, rhs.radius_);
    return Potential::truncated_analytic(std::move(terms), radius,
                                         lhs.tail_tolerance_ + rhs.tail_tolerance_);
  }

  std::vector<double> edges;
  for (const auto *q : {&lhs, &rhs})
  {
    for (const auto &p : q->pieces_)
    {
      edges.push_back(p.a);
      edges.push_back(p.b);
    }
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  std::vector<PolynomialPiece> merged;
  for (std::size_t i = 0; i + 1 < edges.size(); i++)
  {
    const double a = edges[i], b = edges[i + 1], mid = 0.5 * (a + b);
    std::vector<double> coeffs;
    bool active = false;
    for (const auto *q : {&lhs, &rhs})
    {
      for (const auto &p : q->pieces_)
      {
        if (p.a <= mid && mid < p.b)
        {
          active = true;
          auto c = shift(p.coefficients, p.a, a);
          if (c.size() > coeffs.size())
          {
            coeffs.resize(c.size(), 0.0);
          }
          for (std::size_t k = 0; k < c.size(); k++)
          {
            coeffs[k] += c[k];
          }
        }
      }
    }
    if (active)
    {
      merged.push_back({a, b, std::move(coeffs)});
    }
  }
  if (lhs.kind_ == PotentialKind::StepSum && rhs.kind_ == PotentialKind::StepSum)
  {
    return Potential::step_sum(std::move(merged));
  }
  return Potential::piecewise_polynomial(std::move(merged));
}

}  // namespace indefsl

#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

namespace indefsl
{

/// Gauss–Legendre rule on the reference interval [-1, 1].
struct PanelRule
{
  int order = 0;
  std::vector<double> nodes;    // strictly increasing, symmetric about 0
  std::vector<double> weights;  // positive, summing to 2

  /// Integrals of the Lagrange basis polynomials over [-1, nodes[i]]:
  /// entry (i, k) = integral of L_k from -1 to nodes[i], row-major.
  std::vector<double> cumulative;
};

/// Returns the n-point rule, 1 <= n <= 64. Throws std::invalid_argument otherwise.
PanelRule gauss_legendre(int n);

/// Evaluates every Lagrange basis polynomial of the rule's nodes at t (barycentric form).
void lagrange_basis(const PanelRule &rule, double t, std::span<double> out);

struct Panel
{
  double a = 0.0;
  double b = 0.0;
  std::size_t first = 0;  // index of the panel's first node in the flattened grid
};

/// Composite Gauss–Legendre grid on [a, b] with prescribed breakpoints.
class CompositeGrid
{
public:
  CompositeGrid() = default;

  /// Panels never straddle a breakpoint; each breakpoint segment is split into equal panels
  /// of width at most max_spacing * order.
  CompositeGrid(std::vector<double> breakpoints, double max_spacing, int order);

  /// One panel per consecutive pair of (sorted, deduplicated) breakpoints.
  static CompositeGrid from_panels(std::vector<double> breakpoints, int order);

  [[nodiscard]] const PanelRule &rule() const { return rule_; }
  [[nodiscard]] const std::vector<Panel> &panels() const { return panels_; }
  [[nodiscard]] const std::vector<double> &nodes() const { return nodes_; }
  [[nodiscard]] const std::vector<double> &weights() const { return weights_; }
  [[nodiscard]] std::size_t size() const { return nodes_.size(); }
  [[nodiscard]] double lower() const { return panels_.front().a; }
  [[nodiscard]] double upper() const { return panels_.back().b; }
  [[nodiscard]] bool has_breakpoint(double x) const;

  /// Panel index owning node j.
  [[nodiscard]] std::size_t panel_of(std::size_t j) const
  {
    return j / static_cast<std::size_t>(rule_.order);
  }

  /// Panel index containing x (x on a shared edge maps to the right panel); throws if outside.
  [[nodiscard]] std::size_t locate(double x) const;

private:
  void build(const std::vector<double> &edges);

  PanelRule rule_;
  std::vector<Panel> panels_;
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

template <typename T>
struct Integral
{
  T value{};
  double error_estimate = 0.0;
  bool converged = false;
  int panels = 0;
};

struct IntegrateOptions
{
  double tol = 1e-10;
  int max_panels = 20000;
  std::vector<double> breakpoints;  // jump points inside (a, b)
};

/// Adaptive panel bisection: each panel compares a 10-point rule against the same rule on its
/// two halves; panels with the largest discrepancy are split until the total falls below tol.
Integral<double> integrate(const std::function<double(double)> &f, double a, double b,
                           const IntegrateOptions &opts = {});
Integral<std::complex<double>> integrate_complex(
    const std::function<std::complex<double>(double)> &f, double a, double b,
    const IntegrateOptions &opts = {});

}  // namespace indefsl

#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "indefsl/free_resolvent.hpp"
#include "indefsl/potential.hpp"
#include "indefsl/quadrature.hpp"
#include "indefsl/rectangle.hpp"

namespace indefsl
{

/// Sub-panel quadrature for the row whose collocation node sits inside a panel. The kernel has
/// a derivative kink at y = x, so the panel is split at the node and the density is
/// interpolated from the panel nodes.
struct KinkCorrection
{
  int order = 0;
  // For local node i: 2 * order reference points s, weights and the panel's Lagrange basis
  // at each point (row-major, 2 * order x order).
  std::vector<std::vector<double>> points;
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> basis;

  static KinkCorrection build(const PanelRule &rule);
};

/// Collocation data for phi = -q T_lambda(sgn phi) on the potential's support.
struct NystromSystem
{
  CompositeGrid grid;
  std::vector<double> q_values;
  std::vector<double> sign_values;
  KinkCorrection correction;
  // q at the split-panel points of each node, 2 * order per node.
  std::vector<double> q_split;

  [[nodiscard]] std::size_t dim() const { return grid.size(); }
};

/// Node spacing used for a given |lambda|: min(0.1, 0.25 / sqrt|lambda|) / density_factor.
double nystrom_spacing(double abs_lambda, double density_factor = 1.0);

/// Grid over [-L, L] (L = support radius, or 1 for q = 0) with breakpoints at 0, at +-L and at
/// every potential breakpoint.
NystromSystem make_system(const Potential &q, double spacing, int order = 10);

/// Builds a system on a caller-supplied grid. Throws std::domain_error when the grid misses the
/// support of q or lacks a breakpoint at 0.
NystromSystem make_system(const Potential &q, CompositeGrid grid);

/// M(lambda) with M_jk ~ q(x_j) K(x_j, x_k) sgn(x_k) w_k. The panel containing x_j uses the
/// split-panel correction in place of the plain weights.
Eigen::MatrixXcd assemble(const SpectralParameter &sp, const NystromSystem &sys);

struct CharacteristicValue
{
  cplx lambda;
  cplx det_value;            // det(I + M) exp(correction)
  double log_abs_det = 0.0;  // accumulated from the LU diagonal plus Re correction
  double phase = 0.0;        // arg det_value in (-pi, pi]
  cplx nystrom_det;          // plain det(I + M)
  cplx correction;           // trace correction added to log det
  std::optional<double> smallest_singular_value;
  bool singular = false;
};

/// Trace correction for log det(I + M). The eigenvalues of q T sgn decay like 1/j^2, so any
/// N-point determinant misses a tail of order 1/N. Writing det = det_3 exp(tr K - tr K^2 / 2),
/// the Nystrom matrix supplies det_3 while tr K and tr K^2 come from quadratures that resolve the
/// diagonal kink: (tr K - tr M) - (tr K^2 - tr M^2) / 2. Off-panel parts of both traces
/// coincide and cancel, so only the own-panel blocks enter.
cplx trace_correction(const SpectralParameter &sp, const NystromSystem &sys,
                      const Eigen::MatrixXcd &M);

/// det(I + M(lambda)) exp(trace_correction) via partial-pivot LU with log-magnitude and phase
/// accumulated separately. The correction is analytic and zero-free, so zeros are unchanged;
/// it lifts the convergence of the value from O(h) to O(h^5).
CharacteristicValue char_det(const SpectralParameter &sp, const NystromSystem &sys,
                             bool with_singular_value = false);

struct BirmanSchwingerOptions
{
  int panel_order = 10;
  double density_factor = 1.0;
  /// When set, one grid sized for this |lambda| is used everywhere. Otherwise the grid is
  /// chosen per evaluation from a dyadic ladder of spacings.
  std::optional<double> fixed_lambda_max;
};

/// lambda -> det(I + M(lambda)) as a callable. Grids are built lazily and cached per spacing
/// level; concurrent calls are safe.
class BirmanSchwingerFunction
{
public:
  BirmanSchwingerFunction(Potential q, BirmanSchwingerOptions opts = {});

  cplx operator()(cplx lambda) const;
  [[nodiscard]] CharacteristicValue evaluate(cplx lambda, bool with_singular_value = false) const;

  /// Spacing-ladder level for |lambda|; level k uses spacing 0.1 * 2^{-k} / density.
  [[nodiscard]] int level(double abs_lambda) const;
  [[nodiscard]] std::shared_ptr<const NystromSystem> system_for(double abs_lambda) const;

private:
  Potential q_;
  BirmanSchwingerOptions opts_;
  mutable std::mutex mutex_;
  mutable std::map<int, std::shared_ptr<const NystromSystem>> systems_;
};

struct ScanSample
{
  cplx lambda;
  double abs_det = 0.0;
  double arg_det = 0.0;
};

/// det(I + M) on a density_re x density_im lattice spanning the closed rectangle (row-major in
/// Im, then Re).
std::vector<ScanSample> candidate_scan(const Potential &q, const Rectangle &region,
                                       int density_re, int density_im,
                                       const BirmanSchwingerOptions &opts = {});

/// Lattice points of a scan, shared with the shooting scan so CSV rows align.
std::vector<cplx> scan_lattice(const Rectangle &region, int density_re, int density_im);

}  // namespace indefsl

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "indefsl/bounds_report.hpp"
#include "indefsl/config.hpp"
#include "indefsl/eigensearch.hpp"

namespace indefsl
{

enum ExitCode : int
{
  kExitOk = 0,
  kExitConfig = 2,
  kExitIncomplete = 3,
  kExitBoundViolation = 4,
};

struct CrossPair
{
  cplx shooting;
  cplx birman_schwinger;
  double distance = 0.0;
  double tolerance = 0.0;  // cross * (1 + |lambda|)
  bool matched = false;
};

struct CrossValidation
{
  std::vector<CrossPair> pairs;
  std::vector<cplx> unmatched_shooting;
  std::vector<cplx> unmatched_birman_schwinger;
};

/// Mutual nearest neighbours within cross * (1 + |lambda|). Every zero of either list lands in
/// exactly one pair or in its unmatched list.
CrossValidation cross_validate(const std::vector<ZeroCertificate> &shooting,
                               const std::vector<ZeroCertificate> &birman_schwinger,
                               double cross_tol);

struct EigenpairSummary
{
  cplx lambda;
  bool spurious = false;
  double derivative_mismatch = 0.0;
  std::optional<EigenfunctionDiagnostics> diagnostics;
  std::string error;
};

struct RunReport
{
  json config_echo;
  L1Norms norms;
  SearchRegion region;
  std::optional<Rectangle> search_rect;  // region actually searched
  std::optional<LocateResult> shooting;
  std::optional<LocateResult> birman_schwinger;
  std::optional<CrossValidation> cross;
  std::vector<cplx> confirmed;  // upper half-plane, ordered by (Re, Im)
  std::vector<EigenpairSummary> eigenpairs;
  std::vector<BoundReport> bound_reports;
  std::vector<cplx> mirrored;
  std::vector<std::string> notes;
  bool verdict = true;
  int exit_code = kExitOk;
  double wall_seconds = 0.0;
};

RunReport cmd_solve(const RunConfig &config);

/// Report document. Timing lives under the single key "timing".
json report_to_json(const RunReport &r, bool include_timing = true);
/// One row per confirmed eigenvalue.
std::string report_to_csv(const RunReport &r);

/// Columns re, im, abs_D, arg_D, abs_det, arg_det; density_re * density_im rows, Im-major.
std::string cmd_scan(const RunConfig &config);

/// Columns x, y, re_K, im_K, abs_K, re_C, im_C, re_D, im_D.
std::string cmd_kernel(const RunConfig &config);

json bounds_to_json(const RunConfig &config);
std::string cmd_bounds(const RunConfig &config);

}  // namespace indefsl

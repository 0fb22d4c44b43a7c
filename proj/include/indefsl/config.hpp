#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "indefsl/free_resolvent.hpp"
#include "indefsl/potential.hpp"
#include "indefsl/rectangle.hpp"

namespace indefsl
{

using json = nlohmann::ordered_json;

class ConfigError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

enum class MethodSelection
{
  Shooting,
  BirmanSchwinger,
  Both
};

std::string to_string(MethodSelection m);
MethodSelection method_from_string(const std::string &name);

struct Tolerances
{
  double match = 1e-8;       // |F(lambda)| relative to the contour median
  double newton = 1e-11;     // relative Newton step
  double quadrature = 1e-10; // local error tolerance of the shooting integrator
  double cross = 1e-6;       // agreement between methods, scaled by 1 + |lambda|

  bool operator==(const Tolerances &) const = default;
};

struct GridConfig
{
  int panel_order = 10;
  double density_factor = 1.0;

  bool operator==(const GridConfig &) const = default;
};

struct SearchConfig
{
  int samples_per_side = 16;
  int max_boxes = 20000;
  double eigenfunction_pad = 1.0;
  double root_step = 0.25;  // contour resolution in sqrt(lambda), divided by the support radius

  bool operator==(const SearchConfig &) const = default;
};

struct ScanConfig
{
  std::optional<Rectangle> rectangle;  // defaults to the search region
  int density_re = 41;
  int density_im = 21;

  bool operator==(const ScanConfig &) const = default;
};

struct KernelConfig
{
  cplx lambda{0.0, 1.0};
  double x_min = -5.0, x_max = 5.0;
  double y_min = -5.0, y_max = 5.0;
  int nx = 51, ny = 51;

  bool operator==(const KernelConfig &) const = default;
};

struct OutputConfig
{
  std::string report;           // empty: standard output
  std::string format = "json";  // json | csv

  bool operator==(const OutputConfig &) const = default;
};

struct RunConfig
{
  Potential potential;
  MethodSelection method = MethodSelection::Both;
  std::optional<double> eps_floor;
  Tolerances tolerances;
  GridConfig grid;
  std::optional<Rectangle> region;
  SearchConfig search;
  ScanConfig scan;
  KernelConfig kernel;
  OutputConfig output;

  bool operator==(const RunConfig &) const = default;
};

Potential potential_from_json(const json &j);
json potential_to_json(const Potential &q);

/// Parses and validates; every failure is a ConfigError naming the offending key.
RunConfig config_from_json(const json &j);
json config_to_json(const RunConfig &c);

RunConfig load_config(const std::string &path, const std::vector<std::string> &overrides = {});

/// Applies "a.b.c=value" to a document. The value is read as JSON when it parses, otherwise
/// as a string. Missing intermediate objects are created.
void apply_override(json &doc, const std::string &assignment);

/// 17 significant digits; used for every number written to CSV or text.
std::string format_number(double v);

}  // namespace indefsl

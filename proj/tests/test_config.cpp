#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "indefsl/config.hpp"

using namespace indefsl;

namespace
{

json parse(const char *text) { return json::parse(text); }

std::string write_temp(const json &j, const char *name)
{
  const std::string path = std::string("/tmp/indefsl_test_") + name + ".json";
  std::ofstream(path) << j.dump(2);
  return path;
}

}  // namespace

TEST_CASE("minimal config gets the documented defaults")
{
  const RunConfig c = config_from_json(parse(R"({"potential": {"kind": "zero"}})"));
  CHECK(c.method == MethodSelection::Both);
  CHECK_FALSE(c.eps_floor.has_value());
  CHECK(c.tolerances.match == 1e-8);
  CHECK(c.tolerances.cross == 1e-6);
  CHECK(c.grid.panel_order == 10);
  CHECK(c.search.samples_per_side == 16);
  CHECK(c.kernel.lambda == cplx(0.0, 1.0));
  CHECK(c.output.format == "json");
  CHECK(c.potential == Potential());
}

TEST_CASE("configs round-trip through JSON")
{
  const json j = parse(R"({
    "potential": {"kind": "piecewise-polynomial",
                  "pieces": [{"interval": [-1, 0.5], "coefficients": [1, -2, 0.25]},
                             {"interval": [0.5, 2], "coefficients": [-3]}]},
    "method": "shooting",
    "eps_floor": 0.02,
    "tolerances": {"match": 1e-7, "newton": 1e-12, "quadrature": 1e-11, "cross": 1e-5},
    "grid": {"panel_order": 12, "density_factor": 1.5},
    "region": {"re_min": -3, "re_max": 3, "im_min": 0.1, "im_max": 2},
    "search": {"samples_per_side": 24, "max_boxes": 100, "eigenfunction_pad": 2, "root_step": 0.1},
    "scan": {"rectangle": {"re_min": -1, "re_max": 1, "im_min": 0.5, "im_max": 1},
             "density_re": 5, "density_im": 3},
    "kernel": {"lambda": [1, 2], "x_min": -1, "x_max": 1, "y_min": -2, "y_max": 2, "nx": 3, "ny": 4},
    "output": {"report": "out.json", "format": "csv"}
  })");
  const RunConfig c = config_from_json(j);
  CHECK(c.method == MethodSelection::Shooting);
  CHECK(*c.eps_floor == 0.02);
  CHECK(c.region->im_min == 0.1);
  CHECK(c.kernel.lambda == cplx(1.0, 2.0));
  const RunConfig back = config_from_json(config_to_json(c));
  CHECK(back == c);
  CHECK(config_to_json(back) == config_to_json(c));
}

TEST_CASE("every potential kind round-trips")
{
  for (const char *text : {
           R"({"kind": "zero"})",
           R"({"kind": "step-sum", "pieces": [{"interval": [-1, 1], "value": -2}]})",
           R"({"kind": "truncated-analytic", "radius": 8,
               "terms": [{"formula": "gaussian", "amplitude": -4, "center": 0.5, "width": 1}]})",
           R"({"kind": "sum", "parts": [{"kind": "step-sum",
                                         "pieces": [{"interval": [-1, 0], "value": -1}]},
                                        {"kind": "step-sum",
                                         "pieces": [{"interval": [0, 1], "value": 1}]}]})",
       })
  {
    const Potential q = potential_from_json(parse(text));
    CHECK(potential_from_json(potential_to_json(q)) == q);
  }
}

TEST_CASE("scale multiplies the potential")
{
  const Potential a = potential_from_json(
      parse(R"({"kind": "step-sum", "pieces": [{"interval": [-1, 1], "value": -2}], "scale": 3})"));
  const Potential b = potential_from_json(
      parse(R"({"kind": "step-sum", "pieces": [{"interval": [-1, 1], "value": -6}]})"));
  CHECK(a.l1_norms().total == doctest::Approx(b.l1_norms().total));
  CHECK(a(0.3) == b(0.3));
}

TEST_CASE("invalid configs are rejected")
{
  for (const char *text : {
           R"({})",
           R"({"potential": {"kind": "zero"}, "bogus": 1})",
           R"({"potential": {"kind": "nonsense"}})",
           R"({"potential": {"kind": "step-sum", "pieces": [{"interval": [1, -1], "value": 1}]}})",
           R"({"potential": {"kind": "zero"}, "method": "magic"})",
           R"({"potential": {"kind": "zero"}, "grid": {"panel_order": 1}})",
           R"({"potential": {"kind": "zero"}, "tolerances": {"match": -1}})",
           R"({"potential": {"kind": "zero"},
               "region": {"re_min": -1, "re_max": 1, "im_min": 0, "im_max": 1}})",
           R"({"potential": {"kind": "zero"}, "eps_floor": 0})",
           R"({"potential": {"kind": "zero"}, "tolerances": {"typo": 1}})",
       })
  {
    CHECK_THROWS_AS_MESSAGE(config_from_json(parse(text)), ConfigError, text);
  }
}

TEST_CASE("overrides set nested keys and array entries")
{
  json doc = parse(R"({"potential": {"kind": "step-sum",
                                     "pieces": [{"interval": [-1, 1], "value": -2}]}})");
  apply_override(doc, "method=shooting");
  apply_override(doc, "tolerances.match=1e-6");
  apply_override(doc, "potential.pieces.0.value=-5");
  apply_override(doc, "region={\"re_min\": -2, \"re_max\": 2, \"im_min\": 0.5, \"im_max\": 1}");
  const RunConfig c = config_from_json(doc);
  CHECK(c.method == MethodSelection::Shooting);
  CHECK(c.tolerances.match == 1e-6);
  CHECK(c.potential(0.0) == -5.0);
  CHECK(c.region->re_max == 2.0);
  CHECK_THROWS_AS(apply_override(doc, "no_equals_sign"), ConfigError);
}

TEST_CASE("load_config reads files and applies overrides")
{
  const std::string path = write_temp(parse(R"({"potential": {"kind": "zero"}})"), "load");
  const RunConfig c = load_config(path, {"eps_floor=0.5"});
  CHECK(*c.eps_floor == 0.5);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
  std::ofstream("/tmp/indefsl_test_broken.json") << "{ not json";
  CHECK_THROWS_AS(load_config("/tmp/indefsl_test_broken.json"), ConfigError);
  std::remove(path.c_str());
  std::remove("/tmp/indefsl_test_broken.json");
}

TEST_CASE("method names")
{
  for (auto m : {MethodSelection::Shooting, MethodSelection::BirmanSchwinger, MethodSelection::Both})
  {
    CHECK(method_from_string(to_string(m)) == m);
  }
  CHECK_THROWS_AS(method_from_string("bs"), ConfigError);
}

TEST_CASE("numbers print with 17 significant digits")
{
  CHECK(format_number(0.1) == "0.10000000000000001");
  CHECK(format_number(16.0) == "16");
  CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);
}

#include "indefsl/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace indefsl
{

namespace
{

[[noreturn]] void fail(const std::string &key, const std::string &what)
{
  throw ConfigError(key + ": " + what);
}

void check_keys(const json &obj, const std::string &where, const std::set<std::string> &allowed)
{
  if (!obj.is_object())
  {
    fail(where, "expected an object");
  }
  for (const auto &[key, value] : obj.items())
  {
    if (!allowed.count(key))
    {
      fail(where.empty() ? key : where + "." + key, "unknown key");
    }
  }
}

double get_number(const json &obj, const std::string &key, const std::string &where, double dflt)
{
  if (!obj.contains(key) || obj.at(key).is_null())
  {
    return dflt;
  }
  const auto &v = obj.at(key);
  if (!v.is_number())
  {
    fail(where + "." + key, "expected a number");
  }
  const double d = v.get<double>();
  if (!std::isfinite(d))
  {
    fail(where + "." + key, "must be finite");
  }
  return d;
}

int get_int(const json &obj, const std::string &key, const std::string &where, int dflt)
{
  if (!obj.contains(key) || obj.at(key).is_null())
  {
    return dflt;
  }
  const auto &v = obj.at(key);
  if (!v.is_number_integer())
  {
    fail(where + "." + key, "expected an integer");
  }
  return v.get<int>();
}

double positive(double v, const std::string &key)
{
  if (!(v > 0.0))
  {
    fail(key, "must be positive");
  }
  return v;
}

std::pair<double, double> interval(const json &piece, const std::string &where)
{
  if (!piece.contains("interval") || !piece.at("interval").is_array() ||
      piece.at("interval").size() != 2 || !piece.at("interval")[0].is_number() ||
      !piece.at("interval")[1].is_number())
  {
    fail(where + ".interval", "expected [a, b]");
  }
  return {piece.at("interval")[0].get<double>(), piece.at("interval")[1].get<double>()};
}

Rectangle rectangle_from_json(const json &j, const std::string &where)
{
  check_keys(j, where, {"re_min", "re_max", "im_min", "im_max"});
  for (const char *k : {"re_min", "re_max", "im_min", "im_max"})
  {
    if (!j.contains(k))
    {
      fail(where + "." + k, "missing");
    }
  }
  Rectangle r{get_number(j, "re_min", where, 0.0), get_number(j, "re_max", where, 0.0),
              get_number(j, "im_min", where, 0.0), get_number(j, "im_max", where, 0.0)};
  if (!(r.re_min < r.re_max) || !(r.im_min < r.im_max))
  {
    fail(where, "needs re_min < re_max and im_min < im_max");
  }
  if (!(r.im_min > 0.0))
  {
    fail(where + ".im_min", "must be positive (upper half-plane only)");
  }
  return r;
}

json rectangle_to_json(const Rectangle &r)
{
  return json{{"re_min", r.re_min}, {"re_max", r.re_max}, {"im_min", r.im_min},
              {"im_max", r.im_max}};
}

Potential single_potential(const json &j, const std::string &where)
{
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
  {
    fail(where + ".kind", "missing potential kind");
  }
  const std::string kind = j.at("kind").get<std::string>();
  try
  {
    if (kind == "zero")
    {
      check_keys(j, where, {"kind"});
      return Potential();
    }
    if (kind == "sum")
    {
      check_keys(j, where, {"kind", "parts", "scale"});
      if (!j.contains("parts") || !j.at("parts").is_array() || j.at("parts").empty())
      {
        fail(where + ".parts", "expected a non-empty array");
      }
      Potential total = single_potential(j.at("parts")[0], where + ".parts[0]");
      for (std::size_t i = 1; i < j.at("parts").size(); i++)
      {
        total = total + single_potential(j.at("parts")[i],
                                         where + ".parts[" + std::to_string(i) + "]");
      }
      return get_number(j, "scale", where, 1.0) * total;
    }
    const PotentialKind pk = potential_kind_from_string(kind);
    Potential q;
    if (pk == PotentialKind::TruncatedAnalytic)
    {
      check_keys(j, where, {"kind", "terms", "radius", "tail_tolerance", "scale"});
      if (!j.contains("terms") || !j.at("terms").is_array())
      {
        fail(where + ".terms", "expected an array");
      }
      std::vector<AnalyticTerm> terms;
      for (std::size_t i = 0; i < j.at("terms").size(); i++)
      {
        const auto &t = j.at("terms")[i];
        const std::string tw = where + ".terms[" + std::to_string(i) + "]";
        check_keys(t, tw, {"formula", "amplitude", "center", "width"});
        if (!t.contains("formula") || !t.at("formula").is_string())
        {
          fail(tw + ".formula", "missing");
        }
        AnalyticTerm term;
        term.formula = formula_from_string(t.at("formula").get<std::string>());
        term.amplitude = get_number(t, "amplitude", tw, 0.0);
        term.center = get_number(t, "center", tw, 0.0);
        term.width = get_number(t, "width", tw, 1.0);
        terms.push_back(term);
      }
      if (!j.contains("radius"))
      {
        fail(where + ".radius", "missing");
      }
      q = Potential::truncated_analytic(terms, get_number(j, "radius", where, 0.0),
                                        get_number(j, "tail_tolerance", where, 1e-12));
    }
    else
    {
      check_keys(j, where, {"kind", "pieces", "scale"});
      if (!j.contains("pieces") || !j.at("pieces").is_array())
      {
        fail(where + ".pieces", "expected an array");
      }
      std::vector<PolynomialPiece> pieces;
      for (std::size_t i = 0; i < j.at("pieces").size(); i++)
      {
        const auto &p = j.at("pieces")[i];
        const std::string pw = where + ".pieces[" + std::to_string(i) + "]";
        PolynomialPiece piece;
        std::tie(piece.a, piece.b) = interval(p, pw);
        if (pk == PotentialKind::StepSum)
        {
          check_keys(p, pw, {"interval", "value"});
          if (!p.contains("value"))
          {
            fail(pw + ".value", "missing");
          }
          piece.coefficients = {get_number(p, "value", pw, 0.0)};
        }
        else
        {
          check_keys(p, pw, {"interval", "coefficients"});
          if (!p.contains("coefficients") || !p.at("coefficients").is_array())
          {
            fail(pw + ".coefficients", "expected an array");
          }
          for (const auto &c : p.at("coefficients"))
          {
            if (!c.is_number())
            {
              fail(pw + ".coefficients", "expected numbers");
            }
            piece.coefficients.push_back(c.get<double>());
          }
        }
        pieces.push_back(piece);
      }
      q = pk == PotentialKind::StepSum ? Potential::step_sum(pieces)
                                       : Potential::piecewise_polynomial(pieces);
    }
    return get_number(j, "scale", where, 1.0) * q;
  }
  catch (const ConfigError &)
  {
    throw;
  }
  catch (const std::exception &e)
  {
    fail(where, e.what());
  }
}

}  // namespace

std::string to_string(MethodSelection m)
{
  switch (m)
  {
    case MethodSelection::Shooting:
      return "shooting";
    case MethodSelection::BirmanSchwinger:
      return "birman_schwinger";
    case MethodSelection::Both:
      return "both";
  }
  return "both";
}

MethodSelection method_from_string(const std::string &name)
{
  if (name == "shooting")
  {
    return MethodSelection::Shooting;
  }
  if (name == "birman_schwinger")
  {
    return MethodSelection::BirmanSchwinger;
  }
  if (name == "both")
  {
    return MethodSelection::Both;
  }
  throw ConfigError("method: unknown method '" + name + "'");
}

Potential potential_from_json(const json &j) { return single_potential(j, "potential"); }

json potential_to_json(const Potential &q)
{
  if (q.is_zero() && q.kind() != PotentialKind::TruncatedAnalytic)
  {
    return json{{"kind", "zero"}};
  }
  json j;
  j["kind"] = to_string(q.kind());
  if (q.kind() == PotentialKind::TruncatedAnalytic)
  {
    json terms = json::array();
    for (const auto &t : q.terms())
    {
      terms.push_back(json{{"formula", to_string(t.formula)},
                           {"amplitude", t.amplitude},
                           {"center", t.center},
                           {"width", t.width}});
    }
    j["terms"] = terms;
    j["radius"] = q.radius();
    j["tail_tolerance"] = q.tail_tolerance();
    return j;
  }
  json pieces = json::array();
  for (const auto &p : q.pieces())
  {
    json pj{{"interval", {p.a, p.b}}};
    if (q.kind() == PotentialKind::StepSum)
    {
      pj["value"] = p.coefficients.at(0);
    }
    else
    {
      pj["coefficients"] = p.coefficients;
    }
    pieces.push_back(pj);
  }
  j["pieces"] = pieces;
  return j;
}

RunConfig config_from_json(const json &j)
{
  check_keys(j, "", {"potential", "method", "eps_floor", "tolerances", "grid", "region", "search",
                     "scan", "kernel", "output"});
  RunConfig c;
  if (!j.contains("potential"))
  {
    fail("potential", "missing");
  }
  c.potential = potential_from_json(j.at("potential"));

  if (j.contains("method"))
  {
    if (!j.at("method").is_string())
    {
      fail("method", "expected a string");
    }
    c.method = method_from_string(j.at("method").get<std::string>());
  }
  if (j.contains("eps_floor") && !j.at("eps_floor").is_null())
  {
    c.eps_floor = positive(get_number(j, "eps_floor", "", 0.0), "eps_floor");
  }

  if (j.contains("tolerances"))
  {
    const auto &t = j.at("tolerances");
    check_keys(t, "tolerances", {"match", "newton", "quadrature", "cross"});
    c.tolerances.match = positive(get_number(t, "match", "tolerances", c.tolerances.match),
                                  "tolerances.match");
    c.tolerances.newton = positive(get_number(t, "newton", "tolerances", c.tolerances.newton),
                                   "tolerances.newton");
    c.tolerances.quadrature = positive(
        get_number(t, "quadrature", "tolerances", c.tolerances.quadrature),
        "tolerances.quadrature");
    c.tolerances.cross = positive(get_number(t, "cross", "tolerances", c.tolerances.cross),
                                  "tolerances.cross");
  }

  if (j.contains("grid"))
  {
    const auto &g = j.at("grid");
    check_keys(g, "grid", {"panel_order", "density_factor"});
    c.grid.panel_order = get_int(g, "panel_order", "grid", c.grid.panel_order);
    if (c.grid.panel_order < 2 || c.grid.panel_order > 64)
    {
      fail("grid.panel_order", "must lie in [2, 64]");
    }
    c.grid.density_factor = positive(
        get_number(g, "density_factor", "grid", c.grid.density_factor), "grid.density_factor");
  }

  if (j.contains("region") && !j.at("region").is_null())
  {
    c.region = rectangle_from_json(j.at("region"), "region");
  }

  if (j.contains("search"))
  {
    const auto &s = j.at("search");
    check_keys(s, "search", {"samples_per_side", "max_boxes", "eigenfunction_pad", "root_step"});
    c.search.samples_per_side = get_int(s, "samples_per_side", "search",
                                        c.search.samples_per_side);
    c.search.max_boxes = get_int(s, "max_boxes", "search", c.search.max_boxes);
    c.search.eigenfunction_pad = get_number(s, "eigenfunction_pad", "search",
                                            c.search.eigenfunction_pad);
    c.search.root_step = positive(get_number(s, "root_step", "search", c.search.root_step),
                                  "search.root_step");
    if (c.search.samples_per_side < 2)
    {
      fail("search.samples_per_side", "must be at least 2");
    }
    if (c.search.max_boxes < 1)
    {
      fail("search.max_boxes", "must be positive");
    }
    if (c.search.eigenfunction_pad < 0.0)
    {
      fail("search.eigenfunction_pad", "must be nonnegative");
    }
  }

  if (j.contains("scan"))
  {
    const auto &s = j.at("scan");
    check_keys(s, "scan", {"rectangle", "density_re", "density_im"});
    if (s.contains("rectangle") && !s.at("rectangle").is_null())
    {
      c.scan.rectangle = rectangle_from_json(s.at("rectangle"), "scan.rectangle");
    }
    c.scan.density_re = get_int(s, "density_re", "scan", c.scan.density_re);
    c.scan.density_im = get_int(s, "density_im", "scan", c.scan.density_im);
    if (c.scan.density_re < 1 || c.scan.density_im < 1)
    {
      fail("scan", "densities must be positive");
    }
  }

  if (j.contains("kernel"))
  {
    const auto &k = j.at("kernel");
    check_keys(k, "kernel", {"lambda", "x_min", "x_max", "y_min", "y_max", "nx", "ny"});
    if (k.contains("lambda"))
    {
      const auto &l = k.at("lambda");
      if (!l.is_array() || l.size() != 2 || !l[0].is_number() || !l[1].is_number())
      {
        fail("kernel.lambda", "expected [re, im]");
      }
      c.kernel.lambda = {l[0].get<double>(), l[1].get<double>()};
      if (!(c.kernel.lambda.imag() > 0.0))
      {
        fail("kernel.lambda", "imaginary part must be positive");
      }
    }
    c.kernel.x_min = get_number(k, "x_min", "kernel", c.kernel.x_min);
    c.kernel.x_max = get_number(k, "x_max", "kernel", c.kernel.x_max);
    c.kernel.y_min = get_number(k, "y_min", "kernel", c.kernel.y_min);
    c.kernel.y_max = get_number(k, "y_max", "kernel", c.kernel.y_max);
    c.kernel.nx = get_int(k, "nx", "kernel", c.kernel.nx);
    c.kernel.ny = get_int(k, "ny", "kernel", c.kernel.ny);
    if (c.kernel.nx < 1 || c.kernel.ny < 1)
    {
      fail("kernel", "nx and ny must be positive");
    }
  }

  if (j.contains("output"))
  {
    const auto &o = j.at("output");
    check_keys(o, "output", {"report", "format"});
    if (o.contains("report"))
    {
      if (!o.at("report").is_string())
      {
        fail("output.report", "expected a string");
      }
      c.output.report = o.at("report").get<std::string>();
    }
    if (o.contains("format"))
    {
      if (!o.at("format").is_string())
      {
        fail("output.format", "expected a string");
      }
      c.output.format = o.at("format").get<std::string>();
    }
    if (c.output.format != "json" && c.output.format != "csv")
    {
      fail("output.format", "must be json or csv");
    }
  }
  return c;
}

json config_to_json(const RunConfig &c)
{
  json j;
  j["potential"] = potential_to_json(c.potential);
  j["method"] = to_string(c.method);
  j["eps_floor"] = c.eps_floor ? json(*c.eps_floor) : json(nullptr);
  j["tolerances"] = json{{"match", c.tolerances.match},
                         {"newton", c.tolerances.newton},
                         {"quadrature", c.tolerances.quadrature},
                         {"cross", c.tolerances.cross}};
  j["grid"] = json{{"panel_order", c.grid.panel_order},
                   {"density_factor", c.grid.density_factor}};
  j["region"] = c.region ? rectangle_to_json(*c.region) : json(nullptr);
  j["search"] = json{{"samples_per_side", c.search.samples_per_side},
                     {"max_boxes", c.search.max_boxes},
                     {"eigenfunction_pad", c.search.eigenfunction_pad},
                     {"root_step", c.search.root_step}};
  j["scan"] = json{
      {"rectangle", c.scan.rectangle ? rectangle_to_json(*c.scan.rectangle) : json(nullptr)},
      {"density_re", c.scan.density_re},
      {"density_im", c.scan.density_im}};
  j["kernel"] = json{{"lambda", {c.kernel.lambda.real(), c.kernel.lambda.imag()}},
                     {"x_min", c.kernel.x_min},
                     {"x_max", c.kernel.x_max},
                     {"y_min", c.kernel.y_min},
                     {"y_max", c.kernel.y_max},
                     {"nx", c.kernel.nx},
                     {"ny", c.kernel.ny}};
  j["output"] = json{{"report", c.output.report}, {"format", c.output.format}};
  return j;
}

void apply_override(json &doc, const std::string &assignment)
{
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
  {
    throw ConfigError("--set expects KEY=VALUE, got '" + assignment + "'");
  }
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded())
  {
    value = text;
  }
  json *node = &doc;
  std::stringstream ss(path);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, '.'))
  {
    if (part.empty())
    {
      throw ConfigError("--set: empty component in '" + path + "'");
    }
    parts.push_back(part);
  }
  for (std::size_t i = 0; i + 1 < parts.size(); i++)
  {
    if (node->is_array())
    {
      std::size_t idx = 0;
      try
      {
        idx = std::stoul(parts[i]);
      }
      catch (const std::exception &)
      {
        throw ConfigError("--set: '" + parts[i] + "' is not an array index in '" + path + "'");
      }
      if (idx >= node->size())
      {
        throw ConfigError("--set: index out of range in '" + path + "'");
      }
      node = &(*node)[idx];
      continue;
    }
    if (node->is_null())
    {
      *node = json::object();
    }
    if (!node->is_object())
    {
      throw ConfigError("--set: '" + parts[i] + "' is not an object in '" + path + "'");
    }
    node = &(*node)[parts[i]];
  }
  if (node->is_array())
  {
    std::size_t idx = 0;
    try
    {
      idx = std::stoul(parts.back());
    }
    catch (const std::exception &)
    {
      throw ConfigError("--set: '" + parts.back() + "' is not an array index");
    }
    if (idx >= node->size())
    {
      throw ConfigError("--set: index out of range in '" + path + "'");
    }
    (*node)[idx] = value;
    return;
  }
  if (node->is_null())
  {
    *node = json::object();
  }
  if (!node->is_object())
  {
    throw ConfigError("--set: parent of '" + parts.back() + "' is not an object");
  }
  (*node)[parts.back()] = value;
}

RunConfig load_config(const std::string &path, const std::vector<std::string> &overrides)
{
  std::ifstream in(path);
  if (!in)
  {
    throw ConfigError("cannot open config file '" + path + "'");
  }
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded())
  {
    throw ConfigError("config file '" + path + "' is not valid JSON");
  }
  for (const auto &o : overrides)
  {
    apply_override(doc, o);
  }
  return config_from_json(doc);
}

std::string format_number(double v)
{
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace indefsl

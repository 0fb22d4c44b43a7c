#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "indefsl/config.hpp"
#include "indefsl/pipeline.hpp"

namespace
{

void emit(const std::string &text, const std::string &path)
{
  if (path.empty())
  {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out)
  {
    throw indefsl::ConfigError("cannot write '" + path + "'");
  }
  out << text;
}

}  // namespace

int main(int argc, char **argv)
{
  CLI::App app{"Non-real eigenvalues of sgn(x)(-f'' + q f)"};
  app.require_subcommand(1);

  std::string config_path, out_path, format;
  std::vector<std::string> overrides;
  auto add_common = [&](CLI::App *cmd) {
    cmd->add_option("--config", config_path, "configuration file (JSON)")->required();
    cmd->add_option("--set", overrides, "override a key, e.g. --set grid.panel_order=12");
    cmd->add_option("--out", out_path, "write output to this file instead of stdout");
    cmd->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  };
  auto *solve = app.add_subcommand("solve", "locate, cross-validate and check eigenvalues");
  auto *scan = app.add_subcommand("scan", "tabulate |D| and |det(I+M)| on a lambda grid (CSV)");
  auto *bounds = app.add_subcommand("bounds", "print norms, bounds and the search region");
  auto *kernel = app.add_subcommand("kernel", "tabulate the free resolvent kernel (CSV)");
  for (auto *c : {solve, scan, bounds, kernel})
  {
    add_common(c);
  }

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::ParseError &e)
  {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : indefsl::kExitConfig;
  }

  try
  {
    indefsl::RunConfig config = indefsl::load_config(config_path, overrides);
    if (!format.empty())
    {
      config.output.format = format;
    }
    if (!out_path.empty())
    {
      config.output.report = out_path;
    }
    const std::string &dest = config.output.report;

    if (solve->parsed())
    {
      const indefsl::RunReport r = indefsl::cmd_solve(config);
      if (config.output.format == "csv")
      {
        emit(indefsl::report_to_csv(r), dest);
      }
      else
      {
        emit(indefsl::report_to_json(r).dump(2) + "\n", dest);
      }
      if (!dest.empty())
      {
        std::cerr << "verdict: " << (r.verdict ? "pass" : "fail") << ", "
                  << r.confirmed.size() << " eigenvalue(s) in the upper half-plane\n";
      }
      return r.exit_code;
    }
    if (scan->parsed())
    {
      emit(indefsl::cmd_scan(config), dest);
    }
    else if (kernel->parsed())
    {
      emit(indefsl::cmd_kernel(config), dest);
    }
    else if (bounds->parsed())
    {
      if (format == "json")
      {
        emit(indefsl::bounds_to_json(config).dump(2) + "\n", dest);
      }
      else
      {
        emit(indefsl::cmd_bounds(config), dest);
      }
    }
    return indefsl::kExitOk;
  }
  catch (const indefsl::ConfigError &e)
  {
    std::cerr << "config error: " << e.what() << '\n';
    return indefsl::kExitConfig;
  }
  catch (const std::exception &e)
  {
    std::cerr << "error: " << e.what() << '\n';
    return indefsl::kExitIncomplete;
  }
}

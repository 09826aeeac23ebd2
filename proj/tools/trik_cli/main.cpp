// SPDX-License-Identifier: Apache-2.0

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "config.hpp"

namespace
{

std::string read_file(const std::string &path)
{
  std::ifstream is(path);
  if (!is)
  {
    trik_cli::input_error("cannot read config '" + path + "'");
  }
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char **argv)
{
  CLI::App app{"Matrix-valued translation- and rotation-invariant kernels: spectral analysis, "
               "Hodge decomposition, interpolation and landmark dynamics"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(trik_version()));

  std::string config_path, out_dir = ".";
  std::uint64_t seed = 0;
  bool print_effective = false;
  app.add_option("--config", config_path, "JSON experiment specification")->required();
  app.add_option("--out", out_dir, "Output directory (created if missing)");
  app.add_option("--seed", seed, "Seed for randomised self-checks");
  app.add_flag("--print-effective-config", print_effective,
               "Print the specification with all defaults filled in, then exit");

  const std::map<std::string, std::pair<const char *, std::function<int(const trik_cli::Context &)>>>
      commands = {
          {"certify", {"Certify positive definiteness from the spectral coefficients",
                       trik_cli::cmd_certify}},
          {"spectrum", {"Tabulate the spectral coefficients", trik_cli::cmd_spectrum}},
          {"field", {"Evaluate a landmark vector field on a grid", trik_cli::cmd_field}},
          {"shoot", {"Integrate Hamilton's equations and optionally a flow grid",
                     trik_cli::cmd_shoot}},
          {"expmap", {"Exponential-map fan over a family of initial momenta",
                      trik_cli::cmd_expmap}},
          {"hodge", {"Split a kernel into curl-free and divergence-free parts",
                     trik_cli::cmd_hodge}},
      };
  for (const auto &[name, entry] : commands)
  {
    app.add_subcommand(name, entry.first);
  }

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::ParseError &e)
  {
    const int rc = app.exit(e);
    return rc == 0 ? trik_cli::kExitOk : trik_cli::kExitInput;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try
  {
    trik_cli::Context ctx;
    ctx.root = trik_cli::parse_document(read_file(config_path), config_path);
    trik_cli::require_object(ctx.root, "");
    ctx.out_dir = out_dir;
    ctx.seed = seed;
    ctx.print_effective = print_effective;
    ctx.out = &std::cout;
    if (!print_effective)
    {
      std::error_code ec;
      std::filesystem::create_directories(ctx.out_dir, ec);
      if (ec)
      {
        trik_cli::input_error("cannot create output directory '" + out_dir + "': " +
                              ec.message());
      }
    }
    return commands.at(name).second(ctx);
  }
  catch (const trik_cli::CliError &e)
  {
    std::cerr << "trik " << name << ": " << e.what() << "\n";
    return e.code();
  }
  catch (const std::ios_base::failure &e)
  {
    std::cerr << "trik " << name << ": " << e.what() << "\n";
    return trik_cli::kExitInput;
  }
  catch (const std::exception &e)
  {
    std::cerr << "trik " << name << ": internal error: " << e.what() << "\n";
    return trik_cli::kExitNumerical;
  }
}

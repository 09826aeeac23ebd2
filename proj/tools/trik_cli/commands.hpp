// SPDX-License-Identifier: Apache-2.0

#ifndef TRIK_CLI_COMMANDS_HPP
#define TRIK_CLI_COMMANDS_HPP

#include <cstdint>
#include <filesystem>
#include <ostream>

#include "config.hpp"

namespace trik_cli
{

struct Context
{
  json root;
  std::filesystem::path out_dir = ".";
  std::uint64_t seed = 0;
  bool print_effective = false;
  std::ostream *out = nullptr;
};

int cmd_certify(const Context &ctx);
int cmd_spectrum(const Context &ctx);
int cmd_field(const Context &ctx);
int cmd_shoot(const Context &ctx);
int cmd_expmap(const Context &ctx);
int cmd_hodge(const Context &ctx);

}  // namespace trik_cli

#endif  // TRIK_CLI_COMMANDS_HPP

// SPDX-License-Identifier: Apache-2.0

#ifndef TRIK_CLI_CONFIG_HPP
#define TRIK_CLI_CONFIG_HPP

#include <initializer_list>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "trik/trik.h"

namespace trik_cli
{

using json = nlohmann::ordered_json;

enum ExitCode
{
  kExitOk = 0,
  kExitNegative = 1,
  kExitInput = 2,
  kExitNumerical = 3,
};

// Error carrying the process exit code.
class CliError : public std::runtime_error
{
public:
  CliError(int code, const std::string &msg) : std::runtime_error(msg), code_(code) {}
  int code() const noexcept { return code_; }

private:
  int code_;
};

[[noreturn]] void input_error(const std::string &msg);

// Throws CliError with the exit code matching the status.
void check(trik_status s, const char *what);

// Parses JSON text, reporting line and column on failure.
json parse_document(const std::string &text, const std::string &source);

// Field access with dotted-path diagnostics.
void require_object(const json &j, const std::string &path);
void allow_keys(const json &j, const std::string &path, std::initializer_list<const char *> keys);
const json &member(const json &j, const std::string &path, const char *key);
double number(const json &j, const std::string &path, const char *key);
std::optional<double> optional_number(const json &j, const std::string &path, const char *key);
int integer(const json &j, const std::string &path, const char *key);
std::optional<int> optional_integer(const json &j, const std::string &path, const char *key);
std::optional<std::string> optional_string(const json &j, const std::string &path,
                                           const char *key);
std::vector<double> number_list(const json &j, const std::string &path, const char *key);
// Rows of equal length `cols`; flattened row-major.
std::vector<double> point_list(const json &j, const std::string &path, const char *key, int cols,
                               std::size_t *rows);

struct KernelHandle
{
  std::unique_ptr<trik_kernel, void (*)(trik_kernel *)> ptr{nullptr, trik_kernel_destroy};
  json block;
  int dim = 0;
  trik_kernel *get() const { return ptr.get(); }
};

KernelHandle load_kernel(const json &root);

struct IntegratorBlock
{
  trik_integrator cfg = trik_integrator_default();
  json effective() const;
};

IntegratorBlock load_integrator(const json &root);

struct GridBlock
{
  std::vector<double> lower, upper;
  std::vector<int> counts;
  json effective() const;
};

// {"lower", "upper"} plus exactly one of "counts" or "spacing".
GridBlock load_grid(const json &j, const std::string &path, int dim);

struct OutputBlock
{
  std::string format = "both";  // csv | svg | both
  std::string path;             // file prefix inside the output directory
  std::optional<double> arrow_scale;
  bool csv() const { return format != "svg"; }
  bool svg() const { return format != "csv"; }
  json effective() const;
};

OutputBlock load_output(const json &root, const std::string &default_prefix);

std::string format_double(double v);

}  // namespace trik_cli

#endif  // TRIK_CLI_CONFIG_HPP

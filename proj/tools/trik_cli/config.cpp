// SPDX-License-Identifier: Apache-2.0

#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

namespace trik_cli
{

void input_error(const std::string &msg)
{
  throw CliError(kExitInput, msg);
}

void check(trik_status s, const char *what)
{
  if (s == TRIK_OK)
  {
    return;
  }
  const std::string msg = std::string(what) + ": " + trik_status_name(s) + ": " + trik_last_error();
  switch (s)
  {
    case TRIK_ERR_INVALID_ARGUMENT:
    case TRIK_ERR_DIMENSION_MISMATCH:
    case TRIK_ERR_IO:
      throw CliError(kExitInput, msg);
    default:
      throw CliError(kExitNumerical, msg);
  }
}

json parse_document(const std::string &text, const std::string &source)
{
  try
  {
    return json::parse(text);
  }
  catch (const json::parse_error &e)
  {
    std::size_t line = 1, col = 1;
    const std::size_t end = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    for (std::size_t i = 0; i < end; ++i)
    {
      if (text[i] == '\n')
      {
        ++line;
        col = 1;
      }
      else
      {
        ++col;
      }
    }
    input_error(source + ":" + std::to_string(line) + ":" + std::to_string(col) +
                ": JSON parse error: " + e.what());
  }
}

namespace
{

std::string join(const std::string &path, const char *key)
{
  return path.empty() ? std::string(key) : path + "." + key;
}

}  // namespace

void require_object(const json &j, const std::string &path)
{
  if (!j.is_object())
  {
    input_error("config: '" + (path.empty() ? std::string("<root>") : path) +
                "' must be an object");
  }
}

void allow_keys(const json &j, const std::string &path, std::initializer_list<const char *> keys)
{
  require_object(j, path);
  for (const auto &item : j.items())
  {
    const bool ok = std::any_of(keys.begin(), keys.end(),
                                [&](const char *k) { return item.key() == k; });
    if (!ok)
    {
      std::string allowed;
      for (const char *k : keys)
      {
        allowed += allowed.empty() ? k : std::string(", ") + k;
      }
      input_error("config: unknown field '" + join(path, item.key().c_str()) + "' (allowed: " +
                  allowed + ")");
    }
  }
}

const json &member(const json &j, const std::string &path, const char *key)
{
  require_object(j, path);
  auto it = j.find(key);
  if (it == j.end())
  {
    input_error("config: missing field '" + join(path, key) + "'");
  }
  return *it;
}

double number(const json &j, const std::string &path, const char *key)
{
  const json &v = member(j, path, key);
  if (!v.is_number() || !std::isfinite(v.get<double>()))
  {
    input_error("config: '" + join(path, key) + "' must be a finite number");
  }
  return v.get<double>();
}

std::optional<double> optional_number(const json &j, const std::string &path, const char *key)
{
  if (!j.contains(key))
  {
    return std::nullopt;
  }
  return number(j, path, key);
}

int integer(const json &j, const std::string &path, const char *key)
{
  const json &v = member(j, path, key);
  if (!v.is_number_integer())
  {
    input_error("config: '" + join(path, key) + "' must be an integer");
  }
  return v.get<int>();
}

std::optional<int> optional_integer(const json &j, const std::string &path, const char *key)
{
  if (!j.contains(key))
  {
    return std::nullopt;
  }
  return integer(j, path, key);
}

std::optional<std::string> optional_string(const json &j, const std::string &path,
                                           const char *key)
{
  if (!j.contains(key))
  {
    return std::nullopt;
  }
  const json &v = j.at(key);
  if (!v.is_string())
  {
    input_error("config: '" + join(path, key) + "' must be a string");
  }
  return v.get<std::string>();
}

std::vector<double> number_list(const json &j, const std::string &path, const char *key)
{
  const json &v = member(j, path, key);
  if (!v.is_array())
  {
    input_error("config: '" + join(path, key) + "' must be an array of numbers");
  }
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i)
  {
    if (!v[i].is_number() || !std::isfinite(v[i].get<double>()))
    {
      input_error("config: '" + join(path, key) + "[" + std::to_string(i) +
                  "]' must be a finite number");
    }
    out.push_back(v[i].get<double>());
  }
  return out;
}

std::vector<double> point_list(const json &j, const std::string &path, const char *key, int cols,
                               std::size_t *rows)
{
  const json &v = member(j, path, key);
  if (!v.is_array() || v.empty())
  {
    input_error("config: '" + join(path, key) + "' must be a non-empty array of points");
  }
  std::vector<double> out;
  for (std::size_t a = 0; a < v.size(); ++a)
  {
    const std::string item = join(path, key) + "[" + std::to_string(a) + "]";
    if (!v[a].is_array() || static_cast<int>(v[a].size()) != cols)
    {
      input_error("config: '" + item + "' must have " + std::to_string(cols) +
                  " coordinates (kernel dimension)");
    }
    for (const auto &x : v[a])
    {
      if (!x.is_number() || !std::isfinite(x.get<double>()))
      {
        input_error("config: '" + item + "' has a non-numeric coordinate");
      }
      out.push_back(x.get<double>());
    }
  }
  *rows = v.size();
  return out;
}

KernelHandle load_kernel(const json &root)
{
  KernelHandle h;
  h.block = member(root, "", "kernel");
  require_object(h.block, "kernel");
  trik_kernel *k = nullptr;
  const trik_status s = trik_kernel_from_json(h.block.dump().c_str(), &k);
  if (s != TRIK_OK)
  {
    input_error(std::string("config: kernel: ") + trik_last_error());
  }
  h.ptr.reset(k);
  h.dim = trik_kernel_dim(k);
  return h;
}

json IntegratorBlock::effective() const
{
  return {{"scheme", cfg.scheme == TRIK_SCHEME_RK4 ? "rk4" : "euler"},
          {"step", cfg.step},
          {"record_every", cfg.record_every}};
}

IntegratorBlock load_integrator(const json &root)
{
  IntegratorBlock out;
  if (!root.contains("integrator"))
  {
    return out;
  }
  const json &j = root.at("integrator");
  allow_keys(j, "integrator", {"scheme", "step", "record_every"});
  if (auto s = optional_string(j, "integrator", "scheme"))
  {
    if (*s == "rk4")
    {
      out.cfg.scheme = TRIK_SCHEME_RK4;
    }
    else if (*s == "euler")
    {
      out.cfg.scheme = TRIK_SCHEME_EULER;
    }
    else
    {
      input_error("config: 'integrator.scheme' must be \"rk4\" or \"euler\"");
    }
  }
  if (auto v = optional_number(j, "integrator", "step"))
  {
    if (!(*v > 0.0 && *v <= 0.1))
    {
      input_error("config: 'integrator.step' must lie in (0, 0.1]");
    }
    out.cfg.step = *v;
  }
  if (auto v = optional_integer(j, "integrator", "record_every"))
  {
    if (*v < 1)
    {
      input_error("config: 'integrator.record_every' must be >= 1");
    }
    out.cfg.record_every = *v;
  }
  return out;
}

json GridBlock::effective() const
{
  return {{"lower", lower}, {"upper", upper}, {"counts", counts}};
}

GridBlock load_grid(const json &j, const std::string &path, int dim)
{
  allow_keys(j, path, {"lower", "upper", "counts", "spacing"});
  GridBlock g;
  g.lower = number_list(j, path, "lower");
  g.upper = number_list(j, path, "upper");
  if (static_cast<int>(g.lower.size()) != dim || static_cast<int>(g.upper.size()) != dim)
  {
    input_error("config: '" + path + ".lower/upper' must have " + std::to_string(dim) +
                " entries (kernel dimension)");
  }
  for (int i = 0; i < dim; ++i)
  {
    if (!(g.upper[i] > g.lower[i]))
    {
      input_error("config: '" + path + "' needs upper > lower on every axis");
    }
  }
  const bool has_counts = j.contains("counts"), has_spacing = j.contains("spacing");
  if (has_counts == has_spacing)
  {
    input_error("config: '" + path + "' needs exactly one of 'counts' or 'spacing'");
  }
  if (has_counts)
  {
    const auto c = number_list(j, path, "counts");
    if (static_cast<int>(c.size()) != dim)
    {
      input_error("config: '" + path + ".counts' must have " + std::to_string(dim) + " entries");
    }
    for (double v : c)
    {
      if (v < 2 || v != std::floor(v) || v > 1e5)
      {
        input_error("config: '" + path + ".counts' entries must be integers in [2, 1e5]");
      }
      g.counts.push_back(static_cast<int>(v));
    }
  }
  else
  {
    const double h = number(j, path, "spacing");
    if (!(h > 0.0))
    {
      input_error("config: '" + path + ".spacing' must be > 0");
    }
    for (int i = 0; i < dim; ++i)
    {
      const double n = std::round((g.upper[i] - g.lower[i]) / h) + 1.0;
      if (n > 1e5)
      {
        input_error("config: '" + path + ".spacing' gives too many points");
      }
      g.counts.push_back(std::max(2, static_cast<int>(n)));
    }
  }
  return g;
}

json OutputBlock::effective() const
{
  json j = {{"format", format}, {"path", path}};
  if (arrow_scale)
  {
    j["arrow_scale"] = *arrow_scale;
  }
  return j;
}

OutputBlock load_output(const json &root, const std::string &default_prefix)
{
  OutputBlock out;
  out.path = default_prefix;
  if (!root.contains("output"))
  {
    return out;
  }
  const json &j = root.at("output");
  allow_keys(j, "output", {"format", "path", "arrow_scale"});
  if (auto f = optional_string(j, "output", "format"))
  {
    if (*f != "csv" && *f != "svg" && *f != "both")
    {
      input_error("config: 'output.format' must be \"csv\", \"svg\" or \"both\"");
    }
    out.format = *f;
  }
  if (auto p = optional_string(j, "output", "path"))
  {
    if (p->empty() || p->find('/') != std::string::npos)
    {
      input_error("config: 'output.path' must be a plain file prefix (use --out for the directory)");
    }
    out.path = *p;
  }
  if (auto a = optional_number(j, "output", "arrow_scale"))
  {
    if (!(*a > 0.0))
    {
      input_error("config: 'output.arrow_scale' must be > 0");
    }
    out.arrow_scale = *a;
  }
  return out;
}

std::string format_double(double v)
{
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace trik_cli

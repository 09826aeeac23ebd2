// SPDX-License-Identifier: Apache-2.0

#include "trik/families.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <vector>

#include <json.hpp>

#include "trik/error.hpp"

namespace trik
{

namespace
{

void require_positive(double v, const char *name, const char *who)
{
  if (!(v > 0.0) || !std::isfinite(v))
  {
    throw Error(ErrorKind::InvalidArgument,
                std::string(who) + ": parameter '" + name + "' must be positive");
  }
}

ProfileHint gaussian_hint(double c)
{
  return {DecayClass::Gaussian, 1.0 / std::sqrt(c), std::numeric_limits<double>::infinity()};
}

}  // namespace

ScalarProfile gaussian_profile(double amplitude, double c)
{
  require_positive(c, "c", "gaussian_profile");
  ScalarProfile p;
  p.value = [amplitude, c](double r) { return amplitude * std::exp(-c * r * r); };
  p.d1 = [amplitude, c](double r) { return -2.0 * c * r * amplitude * std::exp(-c * r * r); };
  p.d2 = [amplitude, c](double r) {
    return (4.0 * c * c * r * r - 2.0 * c) * amplitude * std::exp(-c * r * r);
  };
  p.d3 = [amplitude, c](double r) {
    return (12.0 * c * c * r - 8.0 * c * c * c * r * r * r) * amplitude * std::exp(-c * r * r);
  };
  p.taylor_c2 = -amplitude * c;
  p.taylor_c4 = 0.5 * amplitude * c * c;
  p.hint = gaussian_hint(c);
  return p;
}

double bessel_green_constant(double sigma, int dim, double ell)
{
  require_positive(sigma, "sigma", "bessel_green_constant");
  require_positive(ell, "ell", "bessel_green_constant");
  return 1.0 / (std::pow(2.0, ell + 0.5 * dim - 1.0) * std::pow(std::numbers::pi, 0.5 * dim) *
                std::tgamma(ell) * std::pow(sigma, dim));
}

ScalarProfile bessel_profile(double c0, double sigma, double nu)
{
  require_positive(sigma, "sigma", "bessel_profile");
  if (!(nu > 0.0))
  {
    throw Error(ErrorKind::InvalidArgument, "bessel_profile: order must be > 0 (finite at 0)");
  }
  ScalarProfile p;
  const double at_zero = c0 * std::pow(2.0, nu - 1.0) * std::tgamma(nu);
  auto f = [c0, sigma, nu, at_zero](double r) {
    if (!(r > 0.0))
    {
      return at_zero;
    }
    const double z = r / sigma;
    return c0 * std::pow(z, nu) * bessel_k(nu, z);
  };
  // f'(r) = -(1/σ) (r/σ)^ν K_{ν-1}(r/σ) times C0.
  auto f1 = [c0, sigma, nu](double r) {
    if (!(r > 0.0))
    {
      return 0.0;
    }
    const double z = r / sigma;
    return -c0 / sigma * std::pow(z, nu) * bessel_k(nu - 1.0, z);
  };
  // f'' = f/σ² + (2ν-1) f'/r.
  auto f2 = [f, f1, sigma, nu](double r) {
    return f(r) / (sigma * sigma) + (2.0 * nu - 1.0) * f1(r) / r;
  };
  auto f3 = [f1, f2, sigma, nu](double r) {
    const double d1 = f1(r);
    return d1 / (sigma * sigma) + (2.0 * nu - 1.0) * (f2(r) / r - d1 / (r * r));
  };
  p.value = f;
  p.d1 = f1;
  p.d2 = f2;
  p.d3 = f3;
  // Regular part of z^ν K_ν(z): 2^{ν-1} Σ (-1)^k Γ(ν-k)/k! (z/2)^{2k}; the z^{2ν} term
  // dominates z^4 unless ν > 2.
  p.taylor_c2 = nu > 1.0 ? -c0 * std::pow(2.0, nu - 3.0) * std::tgamma(nu - 1.0) / (sigma * sigma)
                         : std::nan("");
  p.taylor_c4 = nu > 2.0 ? c0 * std::pow(2.0, nu - 6.0) * std::tgamma(nu - 2.0) /
                               std::pow(sigma, 4)
                         : std::nan("");
  p.hint = {DecayClass::Exponential, sigma, std::numeric_limits<double>::infinity()};
  return p;
}

TriKernel scalar_kernel(const ScalarProfile &profile, int dim, std::string tag)
{
  return make_tri_kernel(dim, profile.value, profile.value, profile.value(0.0), 0.0, profile.hint,
                         std::move(tag), profile.d1, profile.d1,
                         [](double) { return 0.0; });
}

TriKernel zero_kernel(int dim)
{
  auto zero = [](double) { return 0.0; };
  return make_tri_kernel(dim, zero, zero, 0.0, 0.0, {}, "zero", zero, zero, zero);
}

TriKernel gaussian_kernel(double b, double c, int dim)
{
  return scalar_kernel(gaussian_profile(b, c), dim, "gaussian");
}

TriKernel gaussian_kernel_sigma(double sigma, int dim)
{
  require_positive(sigma, "sigma", "gaussian_kernel_sigma");
  return scalar_kernel(gaussian_profile(1.0, 0.5 / (sigma * sigma)), dim, "gaussian");
}

TriKernel cauchy_kernel(double sigma, int dim)
{
  require_positive(sigma, "sigma", "cauchy_kernel");
  ScalarProfile p;
  const double s2 = sigma * sigma;
  p.value = [s2](double r) { return 1.0 / (1.0 + r * r / s2); };
  p.d1 = [s2](double r) {
    const double q = 1.0 + r * r / s2;
    return -2.0 * r / (s2 * q * q);
  };
  p.d2 = [s2](double r) {
    const double q = 1.0 + r * r / s2;
    return (-2.0 / s2 + 6.0 * r * r / (s2 * s2)) / (q * q * q);
  };
  p.taylor_c2 = -1.0 / s2;
  p.taylor_c4 = 1.0 / (s2 * s2);
  p.hint = {DecayClass::Algebraic, sigma, std::numeric_limits<double>::infinity()};
  return scalar_kernel(p, dim, "cauchy");
}

TriKernel bessel_kernel(double sigma, double ell, int dim)
{
  const double nu = ell - 0.5 * dim;
  return scalar_kernel(bessel_profile(bessel_green_constant(sigma, dim, ell), sigma, nu), dim,
                       "bessel");
}

TriKernel family_example1(double a, double b, double c, int dim)
{
  require_positive(c, "c", "family_example1");
  auto e = [c](double r) { return std::exp(-c * r * r); };
  return make_tri_kernel(
      dim, [b, e](double r) { return b * e(r); },
      [a, b, e](double r) { return (b - a * r * r) * e(r); }, b, a, gaussian_hint(c), "example1",
      [b, c, e](double r) { return -2.0 * b * c * r * e(r); },
      [a, b, c, e](double r) { return -2.0 * r * (a + c * (b - a * r * r)) * e(r); },
      [a, e](double r) { return a * e(r); });
}

TriKernel family_example2(double a, double b, double c, int dim)
{
  require_positive(c, "c", "family_example2");
  auto e = [c](double r) { return std::exp(-c * r * r); };
  return make_tri_kernel(
      dim, [a, b, e](double r) { return (b - a * r * r) * e(r); },
      [b, e](double r) { return b * e(r); }, b, -a, gaussian_hint(c), "example2",
      [a, b, c, e](double r) { return -2.0 * r * (a + c * (b - a * r * r)) * e(r); },
      [b, c, e](double r) { return -2.0 * b * c * r * e(r); },
      [a, e](double r) { return -a * e(r); });
}

bool in_D1(double a, double b, double c, int dim)
{
  return a >= 0.0 && b >= (dim - 1.0) * a / (2.0 * c);
}

bool in_D2(double a, double b, double c)
{
  return a >= 0.0 && b >= a / (2.0 * c);
}

TriKernel curl_free_gaussian(double b, double c, int dim)
{
  TriKernel k = make_curl_free(gaussian_profile(b / (2.0 * c), c), dim);
  k.family_tag = "curl_free_gaussian";
  return k;
}

TriKernel div_free_gaussian(double b, double c, int dim)
{
  TriKernel k = make_div_free(gaussian_profile(b / (2.0 * c * (dim - 1.0)), c), dim);
  k.family_tag = "div_free_gaussian";
  return k;
}

TriKernel curl_free_bessel(double sigma, double ell, int dim)
{
  const double nu = ell - 0.5 * dim;
  if (!(nu > 1.0))
  {
    throw Error(ErrorKind::InvalidArgument,
                "curl_free_bessel: needs ell - d/2 > 1 for a finite value at the origin");
  }
  TriKernel k =
      make_curl_free(bessel_profile(bessel_green_constant(sigma, dim, ell), sigma, nu), dim);
  k.family_tag = "curl_free_bessel";
  return k;
}

TriKernel div_free_bessel(double sigma, double ell, int dim)
{
  const double nu = ell - 0.5 * dim;
  if (!(nu > 1.0))
  {
    throw Error(ErrorKind::InvalidArgument,
                "div_free_bessel: needs ell - d/2 > 1 for a finite value at the origin");
  }
  TriKernel k =
      make_div_free(bessel_profile(bessel_green_constant(sigma, dim, ell), sigma, nu), dim);
  k.family_tag = "div_free_bessel";
  return k;
}

TriKernel mixed_gaussian_kernel(double c1, double c2, int dim)
{
  require_positive(c1, "c1", "mixed_gaussian_kernel");
  require_positive(c2, "c2", "mixed_gaussian_kernel");
  return make_tri_kernel(
      dim, [c1](double r) { return std::exp(-c1 * r * r); },
      [c2](double r) { return std::exp(-c2 * r * r); }, 1.0, c2 - c1,
      gaussian_hint(std::min(c1, c2)), "mixed_gaussian",
      [c1](double r) { return -2.0 * c1 * r * std::exp(-c1 * r * r); },
      [c2](double r) { return -2.0 * c2 * r * std::exp(-c2 * r * r); },
      [c1, c2](double r) {
        return std::exp(-c2 * r * r) * std::expm1(-(c1 - c2) * r * r) / (r * r);
      });
}

std::pair<TriKernel, TriKernel> gaussian_hodge_pair(double c, int dim)
{
  require_positive(c, "c", "gaussian_hodge_pair");
  const double s = 0.5 * dim;  // mu + 1
  const double d = dim;
  auto k = [c](double r) { return std::exp(-c * r * r); };
  auto dk = [c](double r) { return -2.0 * c * r * std::exp(-c * r * r); };
  // k1⊥(r) = γ(s, c r²) / (2 c^s r^{2s}); power series in x = c r² near 0.
  auto k1_perp = [c, s](double r) {
    const double x = c * r * r;
    if (x < 0.25)
    {
      double term = 1.0, sum = 1.0 / s;
      for (int n = 1; n < 30; ++n)
      {
        term *= -x / n;
        sum += term / (s + n);
      }
      return 0.5 * sum;
    }
    return lower_gamma(s, x) / (2.0 * std::pow(c, s) * std::pow(r, 2.0 * s));
  };
  // (k - d k1⊥)/r², the k̃ of the curl-free component; series c Σ_{n≥1} (-x)^{n-1}/((n-1)!(s+n)).
  auto kt1 = [c, s, d, k, k1_perp](double r) {
    const double x = c * r * r;
    if (x < 0.25)
    {
      double term = 1.0, sum = -1.0 / (s + 1.0);
      for (int n = 2; n < 30; ++n)
      {
        term *= -x / (n - 1);
        sum -= term / (s + n);
      }
      return c * sum;
    }
    return (k(r) - d * k1_perp(r)) / (r * r);
  };
  // dk1⊥/dr = (k - d k1⊥)/r = r k̃1.
  auto dk1_perp = [kt1](double r) { return r * kt1(r); };

  TriKernel curl = make_tri_kernel(
      dim, [k, k1_perp, d](double r) { return k(r) - (d - 1.0) * k1_perp(r); }, k1_perp, 1.0 / d,
      -c / (s + 1.0), gaussian_hint(c), "gaussian_hodge_curl",
      [dk, dk1_perp, d](double r) { return dk(r) - (d - 1.0) * dk1_perp(r); }, dk1_perp, kt1);
  curl.hint.decay = DecayClass::Algebraic;
  TriKernel div = make_tri_kernel(
      dim, [k1_perp, d](double r) { return (d - 1.0) * k1_perp(r); },
      [k, k1_perp](double r) { return k(r) - k1_perp(r); }, (d - 1.0) / d, c / (s + 1.0),
      gaussian_hint(c), "gaussian_hodge_div",
      [dk1_perp, d](double r) { return (d - 1.0) * dk1_perp(r); },
      [dk, dk1_perp](double r) { return dk(r) - dk1_perp(r); },
      [kt1](double r) { return -kt1(r); });
  div.hint.decay = DecayClass::Algebraic;
  return {std::move(curl), std::move(div)};
}

namespace
{

struct FamilyInfo
{
  std::vector<std::string> required;
  std::vector<std::string> optional;
  std::function<TriKernel(const std::map<std::string, double> &, int)> build;
};

const std::map<std::string, FamilyInfo> &family_table()
{
  static const std::map<std::string, FamilyInfo> table = {
      {"gaussian",
       {{"b"}, {"c", "sigma"}, [](const auto &p, int d) {
          const bool has_c = p.count("c") > 0, has_sigma = p.count("sigma") > 0;
          if (has_c == has_sigma)
          {
            throw Error(ErrorKind::InvalidArgument,
                        "kernel 'gaussian': give exactly one of 'c' or 'sigma'");
          }
          const double c = has_c ? p.at("c") : 0.5 / (p.at("sigma") * p.at("sigma"));
          return gaussian_kernel(p.at("b"), c, d);
        }}},
      {"cauchy", {{"sigma"}, {}, [](const auto &p, int d) { return cauchy_kernel(p.at("sigma"), d); }}},
      {"bessel",
       {{"sigma", "ell"}, {}, [](const auto &p, int d) {
          return bessel_kernel(p.at("sigma"), p.at("ell"), d);
        }}},
      {"example1",
       {{"a", "b", "c"}, {}, [](const auto &p, int d) {
          return family_example1(p.at("a"), p.at("b"), p.at("c"), d);
        }}},
      {"example2",
       {{"a", "b", "c"}, {}, [](const auto &p, int d) {
          return family_example2(p.at("a"), p.at("b"), p.at("c"), d);
        }}},
      {"curl_free_gaussian",
       {{"b", "c"}, {}, [](const auto &p, int d) {
          return curl_free_gaussian(p.at("b"), p.at("c"), d);
        }}},
      {"div_free_gaussian",
       {{"b", "c"}, {}, [](const auto &p, int d) {
          return div_free_gaussian(p.at("b"), p.at("c"), d);
        }}},
      {"curl_free_bessel",
       {{"sigma", "ell"}, {}, [](const auto &p, int d) {
          return curl_free_bessel(p.at("sigma"), p.at("ell"), d);
        }}},
      {"div_free_bessel",
       {{"sigma", "ell"}, {}, [](const auto &p, int d) {
          return div_free_bessel(p.at("sigma"), p.at("ell"), d);
        }}},
      {"mixed_gaussian",
       {{"c1", "c2"}, {}, [](const auto &p, int d) {
          return mixed_gaussian_kernel(p.at("c1"), p.at("c2"), d);
        }}},
      {"gaussian_hodge_curl",
       {{"c"}, {}, [](const auto &p, int d) { return gaussian_hodge_pair(p.at("c"), d).first; }}},
      {"gaussian_hodge_div",
       {{"c"}, {}, [](const auto &p, int d) { return gaussian_hodge_pair(p.at("c"), d).second; }}},
      {"zero", {{}, {}, [](const auto &, int d) { return zero_kernel(d); }}},
  };
  return table;
}

}  // namespace

TriKernel build_kernel(const KernelSpec &spec)
{
  const auto &table = family_table();
  auto it = table.find(spec.family);
  if (it == table.end())
  {
    throw Error(ErrorKind::InvalidArgument, "unknown kernel family '" + spec.family + "'");
  }
  if (spec.dim < 2)
  {
    throw Error(ErrorKind::InvalidArgument, "kernel 'dim' must be an integer >= 2");
  }
  const FamilyInfo &info = it->second;
  for (const auto &name : info.required)
  {
    if (!spec.params.count(name))
    {
      throw Error(ErrorKind::InvalidArgument,
                  "kernel '" + spec.family + "': missing parameter '" + name + "'");
    }
  }
  for (const auto &[name, value] : spec.params)
  {
    const bool known = std::find(info.required.begin(), info.required.end(), name) !=
                           info.required.end() ||
                       std::find(info.optional.begin(), info.optional.end(), name) !=
                           info.optional.end();
    if (!known)
    {
      throw Error(ErrorKind::InvalidArgument,
                  "kernel '" + spec.family + "': unknown parameter '" + name + "'");
    }
    if (!std::isfinite(value))
    {
      throw Error(ErrorKind::InvalidArgument,
                  "kernel '" + spec.family + "': parameter '" + name + "' is not finite");
    }
  }
  return info.build(spec.params, spec.dim);
}

KernelSpec parse_kernel_spec(std::string_view json_text)
{
  nlohmann::json doc;
  try
  {
    doc = nlohmann::json::parse(json_text);
  }
  catch (const nlohmann::json::parse_error &e)
  {
    throw Error(ErrorKind::InvalidArgument, std::string("kernel spec: ") + e.what());
  }
  if (!doc.is_object())
  {
    throw Error(ErrorKind::InvalidArgument, "kernel spec: expected an object");
  }
  KernelSpec spec;
  for (const auto &[key, value] : doc.items())
  {
    if (key == "family")
    {
      if (!value.is_string())
      {
        throw Error(ErrorKind::InvalidArgument, "kernel spec: 'family' must be a string");
      }
      spec.family = value.get<std::string>();
    }
    else if (key == "dim")
    {
      if (!value.is_number_integer())
      {
        throw Error(ErrorKind::InvalidArgument, "kernel spec: 'dim' must be an integer");
      }
      spec.dim = value.get<int>();
    }
    else if (key == "name")
    {
      continue;
    }
    else
    {
      if (!value.is_number())
      {
        throw Error(ErrorKind::InvalidArgument,
                    "kernel spec: field '" + key + "' must be a number");
      }
      spec.params[key] = value.get<double>();
    }
  }
  if (spec.family.empty())
  {
    throw Error(ErrorKind::InvalidArgument, "kernel spec: missing 'family'");
  }
  if (!doc.contains("dim"))
  {
    throw Error(ErrorKind::InvalidArgument, "kernel spec: missing 'dim'");
  }
  return spec;
}

std::string kernel_spec_to_json(const KernelSpec &spec)
{
  nlohmann::json doc;
  doc["family"] = spec.family;
  doc["dim"] = spec.dim;
  for (const auto &[k, v] : spec.params)
  {
    doc[k] = v;
  }
  return doc.dump();
}

}  // namespace trik

// SPDX-License-Identifier: Apache-2.0

#include "trik/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

#include "trik/csv.hpp"
#include "trik/error.hpp"
#include "trik/spline.hpp"

namespace trik
{

namespace
{

constexpr double kPi = std::numbers::pi;

double mu_of(int dim)
{
  return 0.5 * dim - 1.0;
}

// Spline of an even function sampled on x (x[0] may be 0). Knots mirrored across 0 give the
// spline a zero slope there.
std::shared_ptr<CubicSpline> even_spline(const std::vector<double> &x, const std::vector<double> &y)
{
  std::vector<double> xs, ys;
  if (!x.empty() && x.front() == 0.0)
  {
    const std::size_t m = std::min<std::size_t>(8, x.size() - 1);
    for (std::size_t j = m; j >= 1; --j)
    {
      xs.push_back(-x[j]);
      ys.push_back(y[j]);
    }
  }
  xs.insert(xs.end(), x.begin(), x.end());
  ys.insert(ys.end(), y.begin(), y.end());
  return std::make_shared<CubicSpline>(std::move(xs), std::move(ys));
}

// y ≈ A r^-p beyond the last knot, fitted on the last two samples; zero when they disagree in
// sign or vanish.
struct PowerTail
{
  double r_end = 0.0, y_end = 0.0, p = 0.0;
  bool active = false;

  PowerTail() = default;
  PowerTail(const std::vector<double> &r, const std::vector<double> &y)
  {
    const std::size_t n = r.size();
    r_end = r[n - 1];
    y_end = y[n - 1];
    const double y0 = y[n - 2];
    if (y0 != 0.0 && y_end != 0.0 && (y0 > 0.0) == (y_end > 0.0))
    {
      p = std::log(y0 / y_end) / std::log(r_end / r[n - 2]);
      active = p > 0.0;
    }
  }
  double value(double r) const { return active ? y_end * std::pow(r / r_end, -p) : 0.0; }
  double derivative(double r) const { return active ? -p * value(r) / r : 0.0; }
};

// Tabulated even profile on [0, r_max] with a power-law tail.
struct TabulatedProfile
{
  std::shared_ptr<CubicSpline> spline;
  PowerTail tail;

  TabulatedProfile(const std::vector<double> &r, const std::vector<double> &y)
      : spline(even_spline(r, y)), tail(r, y)
  {
  }
  RadialFn value() const
  {
    return [s = spline, t = tail](double r) { return r <= t.r_end ? (*s)(r) : t.value(r); };
  }
  RadialFn derivative() const
  {
    return [s = spline, t = tail](double r) {
      return r <= t.r_end ? s->derivative(r) : t.derivative(r);
    };
  }
};

// Both directions of the map share this evaluation: given (f∥, f⊥) and Δ = f∥ - f⊥ on one
// side, returns the pair on the other side at `x` > 0.
std::pair<double, double> apply_map(const RadialFn &f_par, const RadialFn &f_perp,
                                    const RadialFn &delta, const ProfileHint &hint, int dim,
                                    double x, const HankelQuadConfig &cfg)
{
  const double mu = mu_of(dim);
  const double w = 2.0 * kPi * x;
  const double i_par = hankel_integral(f_par, hint, mu + 1.0, mu, w, cfg);
  const double i_perp = hankel_integral(f_perp, hint, mu + 1.0, mu, w, cfg);
  const double i_delta = hankel_integral(delta, hint, mu, mu + 1.0, w, cfg);
  const double xm = std::pow(x, mu), xm1 = xm * x;
  return {2.0 * kPi / xm * i_par - (2.0 * mu + 1.0) / xm1 * i_delta,
          2.0 * kPi / xm * i_perp + i_delta / xm1};
}

// The same map at x = 0, from the small-argument form of the Bessel factors.
std::pair<double, double> apply_map_at_zero(const RadialFn &f_par, const RadialFn &f_perp,
                                            const RadialFn &delta, const ProfileHint &hint,
                                            int dim, const HankelQuadConfig &cfg)
{
  const double mu = mu_of(dim);
  const double m_par = radial_moment(f_par, hint, 2.0 * mu + 1.0, cfg);
  const double m_perp = radial_moment(f_perp, hint, 2.0 * mu + 1.0, cfg);
  const double m_delta = radial_moment(delta, hint, 2.0 * mu + 1.0, cfg);
  const double a = 2.0 * std::pow(kPi, mu + 1.0) / std::tgamma(mu + 1.0);
  const double b = std::pow(kPi, mu + 1.0) / std::tgamma(mu + 2.0);
  return {a * m_par - (2.0 * mu + 1.0) * b * m_delta, a * m_perp + b * m_delta};
}

Spectrum from_functions(int dim, RadialFn par, RadialFn perp, ProfileHint hint)
{
  Spectrum s;
  s.dim = dim;
  s.h_par = std::move(par);
  s.h_perp = std::move(perp);
  s.hint = hint;
  s.provenance = Provenance::ClosedForm;
  return s;
}

void check_grid(const std::vector<double> &grid, const char *who)
{
  if (grid.empty())
  {
    throw Error(ErrorKind::InvalidArgument, std::string(who) + ": empty grid");
  }
  for (std::size_t i = 0; i < grid.size(); ++i)
  {
    if (!(grid[i] >= 0.0) || !std::isfinite(grid[i]) || (i > 0 && !(grid[i] > grid[i - 1])))
    {
      throw Error(ErrorKind::InvalidArgument,
                  std::string(who) + ": grid must be finite, nonnegative and increasing");
    }
  }
}

std::vector<double> log_grid(double lo, double hi, std::size_t n)
{
  std::vector<double> g(n);
  const double step = n > 1 ? std::log(hi / lo) / (n - 1.0) : 0.0;
  for (std::size_t i = 0; i < n; ++i)
  {
    g[i] = lo * std::exp(step * i);
  }
  return g;
}

double scale_of(const TriKernel &k)
{
  return k.hint.scale > 0.0 ? k.hint.scale : 1.0;
}

}  // namespace

ProfileHint spectral_hint(const ProfileHint &spatial)
{
  const double s = spatial.scale > 0.0 ? spatial.scale : 1.0;
  ProfileHint h;
  switch (spatial.decay)
  {
    case DecayClass::Gaussian:
      h.decay = DecayClass::Gaussian;
      h.scale = 1.0 / (kPi * s);
      break;
    case DecayClass::Exponential:
      h.decay = DecayClass::Algebraic;
      h.scale = 1.0 / (2.0 * kPi * s);
      break;
    case DecayClass::Algebraic:
      h.decay = DecayClass::Exponential;
      h.scale = 1.0 / (2.0 * kPi * s);
      break;
    case DecayClass::Compact:
      h.decay = DecayClass::Algebraic;
      h.scale = 1.0 / (2.0 * kPi * s);
      break;
  }
  return h;
}

std::vector<double> default_rho_grid(const TriKernel &k, std::size_t n)
{
  const double s = scale_of(k);
  return log_grid(1e-3 / s, 20.0 / s, n);
}

std::vector<double> dense_rho_grid(const TriKernel &k, std::size_t n)
{
  const ProfileHint h = spectral_hint(k.hint);
  double rho_max = h.truncation_radius();
  if (h.decay == DecayClass::Algebraic)
  {
    rho_max = 20.0 / scale_of(k);
  }
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i)
  {
    g[i] = rho_max * (i + 1.0) / static_cast<double>(n);
  }
  return g;
}

std::vector<double> default_r_grid(const TriKernel &k, std::size_t n)
{
  const double s = scale_of(k);
  return log_grid(1e-3 * s, 50.0 * s, n);
}

Spectrum forward_map(const TriKernel &k, const std::vector<double> &rho_grid,
                     const HankelQuadConfig &cfg)
{
  check_grid(rho_grid, "forward_map");
  cfg.validate();
  const RadialFn delta = [&k](double r) { return r * r * ktilde(k, r); };
  Spectrum s;
  s.dim = k.dim;
  s.provenance = Provenance::Tabulated;
  for (double rho : rho_grid)
  {
    std::pair<double, double> h;
    if (rho == 0.0)
    {
      // h(0) can be infinite for slowly decaying kernels; such grids simply omit the origin.
      if (k.hint.decay == DecayClass::Algebraic)
      {
        continue;
      }
      h = apply_map_at_zero(k.k_par, k.k_perp, delta, k.hint, k.dim, cfg);
    }
    else
    {
      h = apply_map(k.k_par, k.k_perp, delta, k.hint, k.dim, rho, cfg);
    }
    s.rho.push_back(rho);
    s.par_values.push_back(h.first);
    s.perp_values.push_back(h.second);
  }
  ProfileHint hint = spectral_hint(k.hint);
  hint.decay = DecayClass::Compact;
  hint.support = s.rho.back();
  s.hint = hint;
  if (s.rho.size() >= 2)
  {
    auto sp = even_spline(s.rho, s.par_values);
    auto ss = even_spline(s.rho, s.perp_values);
    const double lo = s.rho.front(), hi = s.rho.back();
    const double p0 = s.par_values.front(), q0 = s.perp_values.front();
    s.h_par = [sp, lo, hi, p0](double rho) {
      return rho > hi ? 0.0 : rho < lo ? p0 : (*sp)(rho);
    };
    s.h_perp = [ss, lo, hi, q0](double rho) {
      return rho > hi ? 0.0 : rho < lo ? q0 : (*ss)(rho);
    };
  }
  else
  {
    const double p = s.par_values.front(), q = s.perp_values.front();
    s.h_par = [p](double) { return p; };
    s.h_perp = [q](double) { return q; };
  }
  return s;
}

std::pair<std::vector<double>, std::vector<double>> inverse_map(const Spectrum &s,
                                                                const std::vector<double> &r_grid,
                                                                const HankelQuadConfig &cfg)
{
  check_grid(r_grid, "inverse_map");
  cfg.validate();
  const RadialFn delta = [&s](double rho) { return s.h_par(rho) - s.h_perp(rho); };
  const double small = 1e-8 / (s.hint.scale > 0.0 ? s.hint.scale : 1.0);
  std::vector<double> par, perp;
  par.reserve(r_grid.size());
  perp.reserve(r_grid.size());
  for (double r : r_grid)
  {
    const auto k = r < small ? apply_map_at_zero(s.h_par, s.h_perp, delta, s.hint, s.dim, cfg)
                             : apply_map(s.h_par, s.h_perp, delta, s.hint, s.dim, r, cfg);
    par.push_back(k.first);
    perp.push_back(k.second);
  }
  return {std::move(par), std::move(perp)};
}

std::vector<double> inverse_ktilde(const Spectrum &s, const std::vector<double> &r_grid,
                                   const HankelQuadConfig &cfg)
{
  check_grid(r_grid, "inverse_ktilde");
  const double mu = mu_of(s.dim);
  const RadialFn delta = [&s](double rho) { return s.h_par(rho) - s.h_perp(rho); };
  const double small = 1e-8 / (s.hint.scale > 0.0 ? s.hint.scale : 1.0);
  std::vector<double> out;
  out.reserve(r_grid.size());
  for (double r : r_grid)
  {
    if (r < small)
    {
      const double m = radial_moment(delta, s.hint, 2.0 * mu + 3.0, cfg);
      out.push_back(-2.0 * std::pow(kPi, mu + 3.0) / std::tgamma(mu + 3.0) * m);
    }
    else
    {
      const double i = hankel_integral(delta, s.hint, mu + 1.0, mu + 2.0, 2.0 * kPi * r, cfg);
      out.push_back(-2.0 * kPi / std::pow(r, mu + 2.0) * i);
    }
  }
  return out;
}

PdVerdict certify_spectrum(const Spectrum &s, double tol)
{
  if (s.rho.empty())
  {
    throw Error(ErrorKind::InvalidArgument, "certify_spectrum: spectrum has no samples");
  }
  PdVerdict v;
  v.tolerance = tol;
  v.grid_min = s.rho.front();
  v.grid_max = s.rho.back();
  v.grid_points = s.rho.size();
  v.min_h_par = std::numeric_limits<double>::infinity();
  v.min_h_perp = std::numeric_limits<double>::infinity();
  double rho_par = 0.0, rho_perp = 0.0, max_h = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < s.rho.size(); ++i)
  {
    if (s.par_values[i] < v.min_h_par)
    {
      v.min_h_par = s.par_values[i];
      rho_par = s.rho[i];
    }
    if (s.perp_values[i] < v.min_h_perp)
    {
      v.min_h_perp = s.perp_values[i];
      rho_perp = s.rho[i];
    }
    max_h = std::max({max_h, s.par_values[i], s.perp_values[i]});
  }
  v.witness_rho = v.min_h_par <= v.min_h_perp ? rho_par : rho_perp;
  v.positive = v.min_h_par >= -tol && v.min_h_perp >= -tol;
  v.strictly = v.positive && max_h > tol;
  return v;
}

PdVerdict certify_pd(const TriKernel &k, const std::vector<double> &rho_grid, double tol,
                     const HankelQuadConfig &cfg)
{
  if (!(tol >= 0.0))
  {
    throw Error(ErrorKind::InvalidArgument, "certify_pd: tolerance must be >= 0");
  }
  std::vector<double> grid = rho_grid;
  if (!grid.empty() && grid.front() > 0.0)
  {
    grid.insert(grid.begin(), 0.0);
  }
  return certify_spectrum(forward_map(k, grid, cfg), tol);
}

Spectrum gaussian_spectrum(double b, double c, int dim)
{
  const double mu = mu_of(dim);
  const double amp = b * std::pow(kPi / c, mu + 1.0);
  auto h = [amp, c](double rho) { return amp * std::exp(-kPi * kPi * rho * rho / c); };
  return from_functions(dim, h, h, {DecayClass::Gaussian, std::sqrt(c) / kPi});
}

Spectrum cauchy_spectrum(double sigma, int dim)
{
  const double mu = mu_of(dim);
  auto h = [sigma, mu](double rho) {
    return 2.0 * kPi * sigma * sigma * std::pow(sigma / rho, mu) *
           bessel_k(mu, 2.0 * kPi * sigma * rho);
  };
  return from_functions(dim, h, h, {DecayClass::Exponential, 1.0 / (2.0 * kPi * sigma)});
}

Spectrum bessel_spectrum(double sigma, double ell, int dim)
{
  auto h = [sigma, ell](double rho) {
    return std::pow(1.0 + 4.0 * sigma * sigma * kPi * kPi * rho * rho, -ell);
  };
  return from_functions(dim, h, h, {DecayClass::Algebraic, 1.0 / (2.0 * kPi * sigma)});
}

Spectrum example1_spectrum(double a, double b, double c, int dim)
{
  const double mu = mu_of(dim);
  const double amp = std::pow(kPi / c, mu + 1.0);
  const double base = b - (2.0 * mu + 1.0) * a / (2.0 * c);
  auto e = [c](double rho) { return std::exp(-kPi * kPi * rho * rho / c); };
  return from_functions(
      dim, [=](double rho) { return amp * base * e(rho); },
      [=](double rho) { return amp * (base + a * kPi * kPi * rho * rho / (c * c)) * e(rho); },
      {DecayClass::Gaussian, std::sqrt(c) / kPi});
}

Spectrum example2_spectrum(double a, double b, double c, int dim)
{
  const double mu = mu_of(dim);
  const double amp = std::pow(kPi / c, mu + 1.0);
  const double base = b - a / (2.0 * c);
  auto e = [c](double rho) { return std::exp(-kPi * kPi * rho * rho / c); };
  return from_functions(
      dim, [=](double rho) { return amp * (base + a * kPi * kPi * rho * rho / (c * c)) * e(rho); },
      [=](double rho) { return amp * base * e(rho); }, {DecayClass::Gaussian, std::sqrt(c) / kPi});
}

Spectrum mixed_gaussian_spectrum(double c1, double c2, int dim)
{
  if (!(c1 > 0.0) || !(c2 > 0.0))
  {
    throw Error(ErrorKind::InvalidArgument, "mixed_gaussian_spectrum: c1, c2 must be positive");
  }
  const double mu = mu_of(dim);
  const double s = mu + 1.0;
  // {Γ(s, x2) - Γ(s, x1)} / ρ^{2s}, taken from whichever incomplete gamma avoids cancellation.
  auto gamma_term = [c1, c2, s](double rho) {
    if (rho == 0.0)
    {
      return std::pow(kPi, 2.0 * s) * (std::pow(c1, -s) - std::pow(c2, -s)) / s;
    }
    const double x1 = kPi * kPi * rho * rho / c1, x2 = kPi * kPi * rho * rho / c2;
    const double diff = std::min(x1, x2) < 1.0 ? lower_gamma(s, x1) - lower_gamma(s, x2)
                                               : upper_gamma(s, x2) - upper_gamma(s, x1);
    return diff / std::pow(rho, 2.0 * s);
  };
  const double pre = 1.0 / (2.0 * std::pow(kPi, s));
  return from_functions(
      dim,
      [=](double rho) {
        return std::pow(kPi / c1, s) * std::exp(-kPi * kPi * rho * rho / c1) -
               (2.0 * mu + 1.0) * pre * gamma_term(rho);
      },
      [=](double rho) {
        return std::pow(kPi / c2, s) * std::exp(-kPi * kPi * rho * rho / c2) +
               pre * gamma_term(rho);
      },
      {DecayClass::Gaussian, std::sqrt(std::max(c1, c2)) / kPi});
}

std::optional<Spectrum> closed_form_spectrum(const KernelSpec &spec)
{
  const auto &p = spec.params;
  auto get = [&p](const char *name) { return p.at(name); };
  const int d = spec.dim;
  const std::string &f = spec.family;
  if (f == "gaussian")
  {
    const double c = p.count("c") ? get("c") : 0.5 / (get("sigma") * get("sigma"));
    return gaussian_spectrum(get("b"), c, d);
  }
  if (f == "cauchy")
  {
    return cauchy_spectrum(get("sigma"), d);
  }
  if (f == "bessel")
  {
    return bessel_spectrum(get("sigma"), get("ell"), d);
  }
  if (f == "example1")
  {
    return example1_spectrum(get("a"), get("b"), get("c"), d);
  }
  if (f == "example2")
  {
    return example2_spectrum(get("a"), get("b"), get("c"), d);
  }
  if (f == "curl_free_gaussian")
  {
    return example2_spectrum(2.0 * get("b") * get("c"), get("b"), get("c"), d);
  }
  if (f == "div_free_gaussian")
  {
    return example1_spectrum(2.0 * get("b") * get("c") / (d - 1.0), get("b"), get("c"), d);
  }
  if (f == "mixed_gaussian")
  {
    return mixed_gaussian_spectrum(get("c1"), get("c2"), d);
  }
  if (f == "zero")
  {
    auto z = [](double) { return 0.0; };
    return from_functions(d, z, z, {});
  }
  return std::nullopt;
}

Spectrum sample_spectrum(const Spectrum &s, const std::vector<double> &rho_grid)
{
  check_grid(rho_grid, "sample_spectrum");
  Spectrum out = s;
  out.rho.clear();
  out.par_values.clear();
  out.perp_values.clear();
  for (double rho : rho_grid)
  {
    const double hp = s.h_par(rho), hq = s.h_perp(rho);
    if (!std::isfinite(hp) || !std::isfinite(hq))
    {
      continue;
    }
    out.rho.push_back(rho);
    out.par_values.push_back(hp);
    out.perp_values.push_back(hq);
  }
  return out;
}

namespace
{

TriKernel tabulated_kernel(int dim, const std::vector<double> &r, const std::vector<double> &par,
                           const std::vector<double> &perp, const std::vector<double> &kt,
                           ProfileHint hint, std::string tag)
{
  const TabulatedProfile p(r, par), q(r, perp), t(r, kt);
  hint.decay = DecayClass::Algebraic;
  return make_tri_kernel(dim, p.value(), q.value(), par.front(), kt.front(), hint, std::move(tag),
                         p.derivative(), q.derivative(), t.value());
}

}  // namespace

HodgeResult hodge_split(const TriKernel &k, const HodgeGrids &grids, const HankelQuadConfig &cfg)
{
  std::vector<double> rho = grids.rho.empty() ? dense_rho_grid(k) : grids.rho;
  if (rho.front() > 0.0 && k.hint.decay != DecayClass::Algebraic)
  {
    rho.insert(rho.begin(), 0.0);
  }
  const Spectrum s = forward_map(k, rho, cfg);

  Spectrum curl_spec = s, div_spec = s;
  curl_spec.h_perp = [](double) { return 0.0; };
  div_spec.h_par = [](double) { return 0.0; };

  HodgeResult out;
  out.r = grids.r.empty() ? default_r_grid(k) : grids.r;
  if (out.r.size() < 3)
  {
    throw Error(ErrorKind::InvalidArgument, "hodge_split: need at least 3 r points");
  }
  if (out.r.front() > 0.0)
  {
    out.r.insert(out.r.begin(), 0.0);
  }
  std::tie(out.k1_par, out.k1_perp) = inverse_map(curl_spec, out.r, cfg);
  std::tie(out.k2_par, out.k2_perp) = inverse_map(div_spec, out.r, cfg);
  const std::vector<double> kt1 = inverse_ktilde(curl_spec, out.r, cfg);
  const std::vector<double> kt2 = inverse_ktilde(div_spec, out.r, cfg);

  out.curl_free =
      tabulated_kernel(k.dim, out.r, out.k1_par, out.k1_perp, kt1, k.hint, "hodge_curl_free");
  out.div_free =
      tabulated_kernel(k.dim, out.r, out.k2_par, out.k2_perp, kt2, k.hint, "hodge_div_free");

  const double r_max = out.r.back();
  const double tail = std::abs(out.k1_perp.back()) * r_max * r_max;
  if (tail > 1e-3 * std::abs(k.k0))
  {
    out.heavy_tail = true;
    out.warning = "components decay slowly: |k1_perp(r_max)| r_max^2 = " + format_double(tail) +
                  " at r_max = " + format_double(r_max) +
                  "; values beyond r_max use a power-law extrapolation";
  }
  return out;
}

double l2_inner_product(const TriKernel &k1, const TriKernel &k2, double radius)
{
  if (k1.dim != k2.dim)
  {
    throw Error(ErrorKind::DimensionMismatch, "l2_inner_product: kernel dimensions differ");
  }
  if (!(radius > 0.0))
  {
    throw Error(ErrorKind::InvalidArgument, "l2_inner_product: radius must be positive");
  }
  const int d = k1.dim;
  const double sphere = 2.0 * std::pow(kPi, 0.5 * d) / std::tgamma(0.5 * d);
  auto g = [&](double r) {
    const double a = k1.k_par(r) * k2.k_par(r) + (d - 1.0) * k1.k_perp(r) * k2.k_perp(r);
    return std::pow(r, d - 1.0) * a / d;
  };
  const GaussLegendre gl(32);
  const double width = std::min(k1.hint.scale, k2.hint.scale);
  double sum = 0.0, a = 0.0;
  while (a < radius)
  {
    const double w = a < 10.0 * width ? width : 0.25 * a;
    const double b = std::min(a + w, radius);
    sum += gl.integrate(g, a, b);
    a = b;
  }
  return sphere * sum;
}

void write_spectrum_csv(std::ostream &os, const Spectrum &s)
{
  write_csv_header(os, {"rho", "h_par", "h_perp"});
  for (std::size_t i = 0; i < s.rho.size(); ++i)
  {
    const double row[3] = {s.rho[i], s.par_values[i], s.perp_values[i]};
    write_csv_row(os, row);
  }
}

}  // namespace trik

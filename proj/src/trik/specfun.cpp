// SPDX-License-Identifier: Apache-2.0

#include "trik/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "trik/error.hpp"

namespace trik
{

namespace
{

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Noise floor for stopping decisions: contributions below this are lost in the rounding of the
// largest panel anyway.
double noise_floor(double peak)
{
  return 64.0 * kEps * peak;
}

void require_finite(double x, const char *what)
{
  if (!std::isfinite(x))
  {
    throw Error(ErrorKind::Domain, std::string(what) + ": non-finite argument");
  }
}

}  // namespace

double ProfileHint::truncation_radius() const
{
  switch (decay)
  {
    case DecayClass::Gaussian:
      return 7.0 * scale;
    case DecayClass::Exponential:
      return 50.0 * scale;
    case DecayClass::Algebraic:
      return 4.0 * scale;
    case DecayClass::Compact:
      return support;
  }
  return 7.0 * scale;
}

void HankelQuadConfig::validate() const
{
  if (!(segment_tol > 0.0) || max_segments < 8 || nodes_per_segment < 8)
  {
    throw Error(ErrorKind::InvalidArgument,
                "HankelQuadConfig requires segment_tol > 0, max_segments >= 8 and "
                "nodes_per_segment >= 8");
  }
}

double bessel_j(double nu, double x)
{
  require_finite(x, "bessel_j");
  if (x < 0.0)
  {
    throw Error(ErrorKind::Domain, "bessel_j: x must be >= 0");
  }
  if (!(nu >= -0.5))
  {
    throw Error(ErrorKind::Domain, "bessel_j: order must be >= -1/2");
  }
  if (x == 0.0)
  {
    if (nu == 0.0)
    {
      return 1.0;
    }
    return nu > 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return boost::math::cyl_bessel_j(nu, x);
}

double bessel_k(double nu, double x)
{
  require_finite(x, "bessel_k");
  if (!(x > 0.0))
  {
    throw Error(ErrorKind::Domain, "bessel_k: x must be > 0");
  }
  try
  {
    return boost::math::cyl_bessel_k(std::abs(nu), x);
  }
  catch (const std::overflow_error &)
  {
    return std::numeric_limits<double>::infinity();
  }
}

double lower_gamma(double nu, double x)
{
  if (!(nu > 0.0) || !(x >= 0.0))
  {
    throw Error(ErrorKind::Domain, "lower_gamma: requires nu > 0 and x >= 0");
  }
  if (x == 0.0)
  {
    return 0.0;
  }
  if (std::isinf(x))
  {
    return std::tgamma(nu);
  }
  return boost::math::tgamma_lower(nu, x);
}

double upper_gamma(double nu, double x)
{
  if (!(nu > 0.0) || !(x >= 0.0))
  {
    throw Error(ErrorKind::Domain, "upper_gamma: requires nu > 0 and x >= 0");
  }
  if (std::isinf(x))
  {
    return 0.0;
  }
  return boost::math::tgamma(nu, x);
}

double bessel_j_zero(double nu, int s)
{
  const double beta = (s + 0.5 * nu - 0.25) * std::numbers::pi;
  const double m = 4.0 * nu * nu;
  const double b8 = 8.0 * beta;
  const double b8_3 = b8 * b8 * b8;
  return beta - (m - 1.0) / b8 - 4.0 * (m - 1.0) * (7.0 * m - 31.0) / (3.0 * b8_3) -
         32.0 * (m - 1.0) * (83.0 * m * m - 982.0 * m + 3779.0) / (15.0 * b8_3 * b8 * b8);
}

GaussLegendre::GaussLegendre(int n) : nodes(n), weights(n)
{
  // Newton iteration on P_n from the Chebyshev-like initial guesses; nodes are symmetric.
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i)
  {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it)
    {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k)
      {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16)
      {
        break;
      }
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k)
    {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    weights[i] = w;
    weights[n - 1 - i] = w;
  }
}

double wynn_epsilon(std::span<const double> partial_sums)
{
  const std::size_t n = partial_sums.size();
  if (n == 0)
  {
    return 0.0;
  }
  if (n < 3)
  {
    return partial_sums.back();
  }
  // prev holds column k-1, cur column k; entry j of column k is epsilon_k^(j).
  std::vector<double> prev(n + 1, 0.0), cur(partial_sums.begin(), partial_sums.end());
  double best = partial_sums.back();
  for (std::size_t k = 1; k < n; ++k)
  {
    std::vector<double> next(n - k);
    for (std::size_t j = 0; j + k < n; ++j)
    {
      const double diff = cur[j + 1] - cur[j];
      if (diff == 0.0)
      {
        // Sequence already stationary at this level.
        return (k % 2 == 1) ? cur[j + 1] : best;
      }
      next[j] = prev[j + 1] + 1.0 / diff;
      if (!std::isfinite(next[j]))
      {
        return best;
      }
    }
    prev = std::move(cur);
    cur = std::move(next);
    if (k % 2 == 0)
    {
      best = cur.back();
    }
  }
  return best;
}

namespace
{

// Shared segment walker. Breakpoints are the zeros of J_nu(rho r) when `oscillatory`, and each
// zero-to-zero segment is split into panels no wider than the profile scale.
template <typename Integrand>
double integrate_segments(Integrand &&g, const ProfileHint &hint, const HankelQuadConfig &cfg,
                          bool oscillatory, double nu, double rho, const char *who)
{
  cfg.validate();
  const GaussLegendre gl(cfg.nodes_per_segment);
  const bool algebraic = hint.decay == DecayClass::Algebraic;
  const double upper = hint.decay == DecayClass::Compact ? hint.support
                                                         : std::numeric_limits<double>::infinity();
  const double stop_radius = std::min(hint.truncation_radius(), upper);
  const double panel_width = hint.scale > 0.0 ? hint.scale : 1.0;
  const long max_panels = 64L * cfg.max_segments + 100000L;

  int zero_index = 1;
  double next_break = oscillatory ? bessel_j_zero(nu, 1) / rho
                                  : std::numeric_limits<double>::infinity();
  if (!algebraic && !oscillatory)
  {
    next_break = std::numeric_limits<double>::infinity();
  }
  // Non-oscillatory algebraic tails are summed over geometrically growing blocks.
  double block_end = (algebraic && !oscillatory) ? stop_radius : next_break;

  double a = 0.0, accum = 0.0, seg = 0.0, peak = 0.0;
  // Segments before stop_radius are mandatory; only those after it count against the budget.
  int tail_segments = 0, quiet_panels = 0;
  long panels = 0;
  std::vector<double> sums;         // partial sums at breakpoints past stop_radius
  double last_estimate = std::nan(""), prev_change = std::numeric_limits<double>::infinity();

  while (true)
  {
    const double width = algebraic && a > stop_radius ? std::max(panel_width, 0.25 * a)
                                                       : panel_width;
    const double b = std::min({a + width, oscillatory ? next_break : block_end, upper});
    const double v = gl.integrate(g, a, b);
    seg += v;
    peak = std::max(peak, std::abs(v));
    a = b;
    if (++panels > max_panels)
    {
      throw Error(ErrorKind::NonConvergence, std::string(who) + ": panel budget exhausted");
    }
    if (a >= upper)
    {
      return accum + seg;
    }

    const bool at_break = oscillatory ? (a == next_break) : (algebraic && a == block_end);
    if (at_break)
    {
      accum += seg;
      const double seg_value = seg;
      seg = 0.0;
      if (oscillatory)
      {
        double z = bessel_j_zero(nu, ++zero_index) / rho;
        if (!(z > a))
        {
          z = a + std::numbers::pi / rho;
        }
        next_break = z;
      }
      else
      {
        block_end = 2.0 * a;
      }
      if (a >= stop_radius)
      {
        const double floor = noise_floor(peak);
        if (!algebraic && std::abs(seg_value) <= std::max(cfg.segment_tol * std::abs(accum), floor))
        {
          return accum;
        }
        if (algebraic)
        {
          sums.push_back(accum);
          if (std::abs(seg_value) <= std::max(cfg.segment_tol * std::abs(accum), floor))
          {
            return accum;
          }
          if (sums.size() >= 6)
          {
            const std::size_t window = std::min<std::size_t>(sums.size(), 40);
            const double est =
                wynn_epsilon(std::span<const double>(sums).subspan(sums.size() - window));
            const double change = std::abs(est - last_estimate);
            const double bound = std::max(cfg.segment_tol * std::abs(est), floor);
            if (change <= bound && prev_change <= bound)
            {
              return est;
            }
            prev_change = change;
            last_estimate = est;
          }
        }
      }
      if (a >= stop_radius && ++tail_segments > cfg.max_segments)
      {
        throw Error(ErrorKind::NonConvergence,
                    std::string(who) + ": max_segments exhausted before tolerance was met");
      }
    }
    else if (!algebraic && a >= stop_radius)
    {
      // Long segments (small rho): stop inside the segment once panels go quiet.
      const double total = accum + seg;
      if (std::abs(v) <= std::max(cfg.segment_tol * std::abs(total), noise_floor(peak)))
      {
        if (++quiet_panels >= 2)
        {
          return total;
        }
      }
      else
      {
        quiet_panels = 0;
      }
    }
  }
}

}  // namespace

double hankel_integral(const RadialFn &f, const ProfileHint &hint, double weight_power, double nu,
                       double rho, const HankelQuadConfig &cfg)
{
  if (!(rho > 0.0) || !std::isfinite(rho))
  {
    throw Error(ErrorKind::Domain, "hankel_integral: rho must be a positive finite number");
  }
  if (!(nu >= -0.5))
  {
    throw Error(ErrorKind::Domain, "hankel_integral: order must be >= -1/2");
  }
  auto g = [&](double r) {
    const double fr = f(r);
    if (fr == 0.0)
    {
      return 0.0;
    }
    return std::pow(r, weight_power) * fr * boost::math::cyl_bessel_j(nu, rho * r);
  };
  return integrate_segments(g, hint, cfg, true, nu, rho, "hankel_integral");
}

double radial_moment(const RadialFn &f, const ProfileHint &hint, double power,
                     const HankelQuadConfig &cfg)
{
  auto g = [&](double r) {
    const double fr = f(r);
    return fr == 0.0 ? 0.0 : std::pow(r, power) * fr;
  };
  return integrate_segments(g, hint, cfg, false, 0.0, 1.0, "radial_moment");
}

}  // namespace trik

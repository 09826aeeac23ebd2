// SPDX-License-Identifier: Apache-2.0

#ifndef TRIK_SPECFUN_HPP
#define TRIK_SPECFUN_HPP

#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace trik
{

using RadialFn = std::function<double(double)>;

// How a radial profile behaves for large r. Used only to choose panel widths and the radius
// before which the quadrature is not allowed to stop.
enum class DecayClass
{
  Gaussian,     // ~ poly(r) exp(-(r/scale)^2)
  Exponential,  // ~ poly(r) exp(-r/scale)
  Algebraic,    // ~ r^-p; tails are summed with Wynn's epsilon extrapolation
  Compact,      // identically zero beyond `support`
};

struct ProfileHint
{
  DecayClass decay = DecayClass::Gaussian;
  double scale = 1.0;
  double support = std::numeric_limits<double>::infinity();

  // Radius beyond which the profile is negligible at double precision (before oscillation
  // cancellation is taken into account).
  double truncation_radius() const;
};

struct HankelQuadConfig
{
  double segment_tol = 1e-10;
  int max_segments = 400;
  int nodes_per_segment = 32;

  void validate() const;
};

double bessel_j(double nu, double x);
double bessel_k(double nu, double x);
double lower_gamma(double nu, double x);
double upper_gamma(double nu, double x);

// s-th positive zero of J_nu (s >= 1), McMahon's large-zero expansion.
double bessel_j_zero(double nu, int s);

// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendre
{
  std::vector<double> nodes;
  std::vector<double> weights;

  explicit GaussLegendre(int n);

  template <typename F>
  double integrate(F &&f, double a, double b) const
  {
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    double sum = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i)
    {
      sum += weights[i] * f(mid + half * nodes[i]);
    }
    return half * sum;
  }
};

// ∫₀^∞ r^weight_power f(r) J_nu(rho r) dr, summed segment by segment between consecutive zeros
// of r ↦ J_nu(rho r).
double hankel_integral(const RadialFn &f, const ProfileHint &hint, double weight_power,
                       double nu, double rho, const HankelQuadConfig &cfg = {});

// ∫₀^∞ r^power f(r) dr (non-oscillatory), with the same panel/stopping policy.
double radial_moment(const RadialFn &f, const ProfileHint &hint, double power,
                     const HankelQuadConfig &cfg = {});

// Wynn's epsilon extrapolation of a sequence of partial sums; returns the best estimate from
// the last even column.
double wynn_epsilon(std::span<const double> partial_sums);

}  // namespace trik

#endif  // TRIK_SPECFUN_HPP

// SPDX-License-Identifier: Apache-2.0

#include "trik/kernel.hpp"

#include <cmath>

#include "trik/error.hpp"

namespace trik
{

namespace
{

RadialFn central_difference(RadialFn f)
{
  return [f = std::move(f)](double r) {
    const double h = 1e-5 * std::max(1.0, r);
    return (8.0 * (f(r + h) - f(r - h)) - (f(r + 2.0 * h) - f(r - 2.0 * h))) / (12.0 * h);
  };
}

double norm(std::span<const double> x)
{
  double s = 0.0;
  for (double v : x)
  {
    s += v * v;
  }
  return std::sqrt(s);
}

double dot(std::span<const double> a, std::span<const double> b)
{
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
  {
    s += a[i] * b[i];
  }
  return s;
}

void check_dim(const TriKernel &k, std::size_t n, const char *who)
{
  if (static_cast<int>(n) != k.dim)
  {
    throw Error(ErrorKind::DimensionMismatch,
                std::string(who) + ": vector dimension does not match kernel dimension");
  }
}

// Below this fraction of the kernel scale, constructed kernels switch to Taylor forms for the
// quantities that otherwise cancel.
constexpr double kTaylorFraction = 1e-5;

}  // namespace

TriKernel make_tri_kernel(int dim, RadialFn k_par, RadialFn k_perp, double k0,
                          double small_r_ktilde, ProfileHint hint, std::string family_tag,
                          RadialFn dk_par, RadialFn dk_perp, RadialFn ktilde_fn)
{
  if (dim < 2)
  {
    throw Error(ErrorKind::InvalidArgument, "TriKernel: dimension must be >= 2");
  }
  TriKernel k;
  k.dim = dim;
  k.dk_par = dk_par ? std::move(dk_par) : central_difference(k_par);
  k.dk_perp = dk_perp ? std::move(dk_perp) : central_difference(k_perp);
  k.k_par = std::move(k_par);
  k.k_perp = std::move(k_perp);
  k.ktilde_fn = std::move(ktilde_fn);
  k.k0 = k0;
  k.small_r_ktilde = small_r_ktilde;
  k.hint = hint;
  k.family_tag = std::move(family_tag);
  return k;
}

TriKernel with_certification(TriKernel k, Certification c)
{
  k.certification = c;
  return k;
}

ProjectorPair::ProjectorPair(const Eigen::VectorXd &x)
{
  const double r = x.norm();
  if (!(r > kZeroThreshold))
  {
    throw Error(ErrorKind::Singular, "ProjectorPair: projectors are undefined at the origin");
  }
  const Eigen::VectorXd u = x / r;
  par = u * u.transpose();
  perp = Eigen::MatrixXd::Identity(x.size(), x.size()) - par;
}

Eigen::MatrixXd eval_matrix(const TriKernel &k, const Eigen::VectorXd &x)
{
  check_dim(k, static_cast<std::size_t>(x.size()), "eval_matrix");
  const double r = x.norm();
  if (!(r > kZeroThreshold))
  {
    return k.k0 * Eigen::MatrixXd::Identity(k.dim, k.dim);
  }
  const ProjectorPair pr(x);
  return k.k_par(r) * pr.par + k.k_perp(r) * pr.perp;
}

void apply_kernel(const TriKernel &k, std::span<const double> x, std::span<const double> alpha,
                  std::span<double> out)
{
  const double r = norm(x);
  if (!(r > kZeroThreshold))
  {
    for (std::size_t i = 0; i < out.size(); ++i)
    {
      out[i] += k.k0 * alpha[i];
    }
    return;
  }
  const double kp = k.k_perp(r);
  const double g = (k.k_par(r) - kp) * dot(x, alpha) / (r * r);
  for (std::size_t i = 0; i < out.size(); ++i)
  {
    out[i] += kp * alpha[i] + g * x[i];
  }
}

double ktilde(const TriKernel &k, double r)
{
  if (!(r > kZeroThreshold))
  {
    return k.small_r_ktilde;
  }
  if (k.ktilde_fn)
  {
    return k.ktilde_fn(r);
  }
  return (k.k_par(r) - k.k_perp(r)) / (r * r);
}

Eigen::MatrixXd partial_matrix(const TriKernel &k, const Eigen::VectorXd &x, int axis)
{
  check_dim(k, static_cast<std::size_t>(x.size()), "partial_matrix");
  if (axis < 0 || axis >= k.dim)
  {
    throw Error(ErrorKind::InvalidArgument, "partial_matrix: axis out of range");
  }
  const double r = x.norm();
  if (!(r > kZeroThreshold))
  {
    throw Error(ErrorKind::Singular,
                "partial_matrix: undefined at the origin (the derivative of an even kernel "
                "vanishes there)");
  }
  const ProjectorPair pr(x);
  const double xi = x[axis];
  Eigen::MatrixXd sym = Eigen::MatrixXd::Zero(k.dim, k.dim);
  sym.row(axis) += x.transpose();
  sym.col(axis) += x;
  return (xi / r) * (k.dk_par(r) * pr.par + k.dk_perp(r) * pr.perp) +
         ktilde(k, r) * (sym - 2.0 * xi * pr.par);
}

void contract_gradient(const TriKernel &k, std::span<const double> x, std::span<const double> pa,
                       std::span<const double> pb, std::span<double> out)
{
  const double r = norm(x);
  if (!(r > kZeroThreshold))
  {
    throw Error(ErrorKind::Singular, "contract_gradient: undefined at the origin");
  }
  const double xa = dot(x, pa), xb = dot(x, pb);
  const double ua_ub = xa * xb / (r * r);
  const double ab = dot(pa, pb);
  const double dpar = k.dk_par(r), dperp = k.dk_perp(r), kt = ktilde(k, r);
  const double radial = (dpar * ua_ub + dperp * (ab - ua_ub)) / r;
  for (std::size_t i = 0; i < out.size(); ++i)
  {
    out[i] = x[i] * radial + kt * (pa[i] * xb + xa * pb[i] - 2.0 * x[i] * ua_ub);
  }
}

TriKernel make_curl_free(const ScalarProfile &kH, int dim)
{
  const double c2 = kH.taylor_c2, c4 = kH.taylor_c4;
  const double small = kTaylorFraction * kH.hint.scale;
  const bool taylor = std::isfinite(c4);
  RadialFn k_par = [f = kH.d2](double r) { return -f(r); };
  RadialFn k_perp = [f = kH.d1, c2](double r) { return r > 0.0 ? -f(r) / r : -2.0 * c2; };
  RadialFn dk_par;
  if (kH.d3)
  {
    dk_par = [f = kH.d3](double r) { return -f(r); };
  }
  RadialFn dk_perp = [d1 = kH.d1, d2 = kH.d2, c4, small, taylor](double r) {
    if (taylor && r < small)
    {
      return -8.0 * c4 * r;
    }
    return (-d2(r) + d1(r) / r) / r;
  };
  RadialFn kt = [d1 = kH.d1, d2 = kH.d2, c4, small, taylor](double r) {
    if (taylor && r < small)
    {
      return -8.0 * c4;
    }
    return (-d2(r) + d1(r) / r) / (r * r);
  };
  return make_tri_kernel(dim, std::move(k_par), std::move(k_perp), -2.0 * c2,
                         taylor ? -8.0 * c4 : std::nan(""), kH.hint, "curl_free",
                         std::move(dk_par), std::move(dk_perp), std::move(kt));
}

TriKernel make_div_free(const ScalarProfile &kW0, int dim)
{
  const double c2 = kW0.taylor_c2, c4 = kW0.taylor_c4;
  const double small = kTaylorFraction * kW0.hint.scale;
  const bool taylor = std::isfinite(c4);
  const double dm1 = dim - 1.0, dm2 = dim - 2.0;
  RadialFn k_par = [f = kW0.d1, dm1, c2](double r) {
    return r > 0.0 ? -dm1 * f(r) / r : -2.0 * dm1 * c2;
  };
  RadialFn k_perp = [d1 = kW0.d1, d2 = kW0.d2, dm1, dm2, c2](double r) {
    return r > 0.0 ? -dm2 * d1(r) / r - d2(r) : -2.0 * dm1 * c2;
  };
  // d/dr (kW0'/r) = (kW0'' - kW0'/r)/r, which is 8 c4 r near the origin.
  auto ratio_derivative = [d1 = kW0.d1, d2 = kW0.d2, c4, small, taylor](double r) {
    if (taylor && r < small)
    {
      return 8.0 * c4 * r;
    }
    return (d2(r) - d1(r) / r) / r;
  };
  RadialFn dk_par = [ratio_derivative, dm1](double r) { return -dm1 * ratio_derivative(r); };
  RadialFn dk_perp;
  if (kW0.d3)
  {
    dk_perp = [ratio_derivative, d3 = kW0.d3, dm2](double r) {
      return -dm2 * ratio_derivative(r) - d3(r);
    };
  }
  RadialFn kt = [d1 = kW0.d1, d2 = kW0.d2, c4, small, taylor](double r) {
    if (taylor && r < small)
    {
      return 8.0 * c4;
    }
    return (d2(r) - d1(r) / r) / (r * r);
  };
  return make_tri_kernel(dim, std::move(k_par), std::move(k_perp), -2.0 * dm1 * c2,
                         taylor ? 8.0 * c4 : std::nan(""), kW0.hint, "div_free",
                         std::move(dk_par), std::move(dk_perp), std::move(kt));
}

double curl_free_residual(const TriKernel &k, double r)
{
  return r * ktilde(k, r) - k.dk_perp(r);
}

double div_free_residual(const TriKernel &k, double r)
{
  return (k.dim - 1.0) * r * ktilde(k, r) + k.dk_par(r);
}

}  // namespace trik

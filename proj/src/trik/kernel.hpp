// SPDX-License-Identifier: Apache-2.0

#ifndef TRIK_KERNEL_HPP
#define TRIK_KERNEL_HPP

#include <span>
#include <string>

#include <Eigen/Dense>

#include "trik/specfun.hpp"

namespace trik
{

// Below this norm a point is treated as the origin: k(x) = k0 I and k̃ takes its limit.
inline constexpr double kZeroThreshold = 1e-12;

enum class Certification
{
  Unknown,
  Positive,  // h_par, h_perp >= -tol on the certification grid
  Strict,    // positive, and some sample exceeds +tol
  Negative,
};

// Radial profile of a scalar kernel k(‖x‖) with derivatives. `taylor_c2`/`taylor_c4` are the
// coefficients of r^2 and r^4 in the even expansion at 0 (c4 may be non-finite when the
// profile is only C^3 at the origin). `d3` is optional.
struct ScalarProfile
{
  RadialFn value, d1, d2, d3;
  double taylor_c2 = 0.0;
  double taylor_c4 = 0.0;
  ProfileHint hint;
};

// A translation- and rotation-invariant matrix kernel k(x) = k∥(‖x‖) Pr∥ + k⊥(‖x‖) Pr⊥.
// Immutable after construction; all evaluation is const and thread-safe.
struct TriKernel
{
  int dim = 2;
  RadialFn k_par, k_perp, dk_par, dk_perp;
  RadialFn ktilde_fn;  // optional closed form of (k∥ - k⊥)/r²
  double k0 = 0.0;
  double small_r_ktilde = 0.0;
  std::string family_tag;
  ProfileHint hint;
  Certification certification = Certification::Unknown;
};

// Builds a kernel from coefficient profiles. Missing derivatives fall back to 4th-order central
// differences with step 1e-5·max(1, r).
TriKernel make_tri_kernel(int dim, RadialFn k_par, RadialFn k_perp, double k0,
                          double small_r_ktilde, ProfileHint hint, std::string family_tag,
                          RadialFn dk_par = {}, RadialFn dk_perp = {}, RadialFn ktilde_fn = {});

TriKernel with_certification(TriKernel k, Certification c);

struct ProjectorPair
{
  Eigen::MatrixXd par;
  Eigen::MatrixXd perp;

  explicit ProjectorPair(const Eigen::VectorXd &x);
};

Eigen::MatrixXd eval_matrix(const TriKernel &k, const Eigen::VectorXd &x);

// out += k(x) alpha, without forming the matrix.
void apply_kernel(const TriKernel &k, std::span<const double> x, std::span<const double> alpha,
                  std::span<double> out);

double ktilde(const TriKernel &k, double r);

// ∂k/∂x^axis at x (axis is 0-based). Throws Singular below the zero threshold.
Eigen::MatrixXd partial_matrix(const TriKernel &k, const Eigen::VectorXd &x, int axis);

// out[i] = pa · ∂k/∂x^i(x) pb for every axis i; same formula as partial_matrix.
void contract_gradient(const TriKernel &k, std::span<const double> x, std::span<const double> pa,
                       std::span<const double> pb, std::span<double> out);

// Kernel of the gradient space of a scalar kernel kH: k∥ = -kH'', k⊥ = -kH'/r.
TriKernel make_curl_free(const ScalarProfile &kH, int dim);

// Kernel of curl^C curl^R applied to a scalar kernel kW0:
// k∥ = -(d-1) kW0'/r, k⊥ = -(d-2) kW0'/r - kW0''.
TriKernel make_div_free(const ScalarProfile &kW0, int dim);

// Residuals of the curl-free condition (k∥-k⊥)/r - dk⊥/dr and the divergence-free condition
// (d-1)(k∥-k⊥)/r + dk∥/dr.
double curl_free_residual(const TriKernel &k, double r);
double div_free_residual(const TriKernel &k, double r);

}  // namespace trik

#endif  // TRIK_KERNEL_HPP

// SPDX-License-Identifier: Apache-2.0

#ifndef TRIK_FAMILIES_HPP
#define TRIK_FAMILIES_HPP

#include <map>
#include <string>
#include <string_view>
#include <utility>

#include "trik/kernel.hpp"

namespace trik
{

// Scalar profiles.
ScalarProfile gaussian_profile(double amplitude, double c);           // A exp(-c r²)
ScalarProfile bessel_profile(double c0, double sigma, double nu);     // C0 (r/σ)^ν K_ν(r/σ)
double bessel_green_constant(double sigma, int dim, double ell);      // C(σ, d, ℓ)

TriKernel scalar_kernel(const ScalarProfile &profile, int dim, std::string tag = "scalar");
TriKernel zero_kernel(int dim);

TriKernel gaussian_kernel(double b, double c, int dim);       // b exp(-c r²) I
TriKernel gaussian_kernel_sigma(double sigma, int dim);       // exp(-r²/(2σ²)) I
TriKernel cauchy_kernel(double sigma, int dim);               // I / (1 + r²/σ²)
TriKernel bessel_kernel(double sigma, double ell, int dim);   // Green's function of (1-σ²Δ)^ℓ

// k∥ = b e^{-cr²}, k⊥ = (b - a r²) e^{-cr²}.
TriKernel family_example1(double a, double b, double c, int dim);
// k∥ = (b - a r²) e^{-cr²}, k⊥ = b e^{-cr²}.
TriKernel family_example2(double a, double b, double c, int dim);

bool in_D1(double a, double b, double c, int dim);
bool in_D2(double a, double b, double c);

TriKernel curl_free_gaussian(double b, double c, int dim);   // make_curl_free of (b/2c) e^{-cr²}
TriKernel div_free_gaussian(double b, double c, int dim);    // make_div_free of b/(2c(d-1)) e^{-cr²}
TriKernel curl_free_bessel(double sigma, double ell, int dim);
TriKernel div_free_bessel(double sigma, double ell, int dim);

// k∥ = e^{-c1 r²}, k⊥ = e^{-c2 r²}; positive definite only when c1 = c2.
TriKernel mixed_gaussian_kernel(double c1, double c2, int dim);

// Closed-form curl-free and divergence-free components of the scalar Gaussian e^{-cr²}.
std::pair<TriKernel, TriKernel> gaussian_hodge_pair(double c, int dim);

// {family, parameters, dim}; see README for the accepted families and parameter names.
struct KernelSpec
{
  std::string family;
  int dim = 2;
  std::map<std::string, double> params;
};

TriKernel build_kernel(const KernelSpec &spec);
KernelSpec parse_kernel_spec(std::string_view json_text);
std::string kernel_spec_to_json(const KernelSpec &spec);

}  // namespace trik

#endif  // TRIK_FAMILIES_HPP

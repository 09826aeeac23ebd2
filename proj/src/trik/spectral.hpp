// SPDX-License-Identifier: Apache-2.0

#ifndef TRIK_SPECTRAL_HPP
#define TRIK_SPECTRAL_HPP

#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "trik/families.hpp"
#include "trik/kernel.hpp"

namespace trik
{

enum class Provenance
{
  ClosedForm,
  Tabulated,
};

// Fourier-side coefficients: k̂(ξ) = h∥(‖ξ‖) Pr∥_ξ + h⊥(‖ξ‖) Pr⊥_ξ, with the 2π-in-exponent
// convention. Tabulated spectra keep their samples; `rho` may start at 0.
struct Spectrum
{
  int dim = 2;
  RadialFn h_par, h_perp;
  ProfileHint hint;
  Provenance provenance = Provenance::ClosedForm;
  std::vector<double> rho, par_values, perp_values;
};

struct PdVerdict
{
  bool positive = false;
  bool strictly = false;
  double min_h_par = 0.0;
  double min_h_perp = 0.0;
  double witness_rho = 0.0;  // where the smaller of the two minima occurs
  double tolerance = 0.0;
  double grid_min = 0.0, grid_max = 0.0;
  std::size_t grid_points = 0;
};

// Spectrum length scale implied by a kernel's spatial hint, and the matching decay class.
ProfileHint spectral_hint(const ProfileHint &spatial);

// 256 log-spaced points on [1e-3, 20] divided by the kernel scale.
std::vector<double> default_rho_grid(const TriKernel &k, std::size_t n = 256);
// Uniform grid on (0, rho_max], rho_max where the spectrum is negligible.
std::vector<double> dense_rho_grid(const TriKernel &k, std::size_t n = 2048);
// Log-spaced r grid on [1e-3, 50] times the kernel scale.
std::vector<double> default_r_grid(const TriKernel &k, std::size_t n = 512);

// Forward map at each grid point (ρ = 0 allowed; it uses the moment limit). The result is
// tabulated, interpolated by a cubic spline and zero beyond the last grid point.
Spectrum forward_map(const TriKernel &k, const std::vector<double> &rho_grid,
                     const HankelQuadConfig &cfg = {});

// The same map applied to (h∥, h⊥); returns (k∥, k⊥) samples on r_grid (r = 0 allowed).
std::pair<std::vector<double>, std::vector<double>> inverse_map(const Spectrum &s,
                                                                const std::vector<double> &r_grid,
                                                                const HankelQuadConfig &cfg = {});

// (k∥ - k⊥)/r² recovered from a spectrum without subtracting the two coefficients.
std::vector<double> inverse_ktilde(const Spectrum &s, const std::vector<double> &r_grid,
                                   const HankelQuadConfig &cfg = {});

PdVerdict certify_pd(const TriKernel &k, const std::vector<double> &rho_grid, double tol = 1e-8,
                     const HankelQuadConfig &cfg = {});
PdVerdict certify_spectrum(const Spectrum &s, double tol = 1e-8);

// Closed-form spectra.
Spectrum gaussian_spectrum(double b, double c, int dim);
Spectrum cauchy_spectrum(double sigma, int dim);
Spectrum bessel_spectrum(double sigma, double ell, int dim);
Spectrum example1_spectrum(double a, double b, double c, int dim);
Spectrum example2_spectrum(double a, double b, double c, int dim);
Spectrum mixed_gaussian_spectrum(double c1, double c2, int dim);
// Closed form for the families that have one.
std::optional<Spectrum> closed_form_spectrum(const KernelSpec &spec);

// Samples a spectrum on a grid (used for closed forms and CSV export).
Spectrum sample_spectrum(const Spectrum &s, const std::vector<double> &rho_grid);

struct HodgeGrids
{
  std::vector<double> rho;  // forward-map grid; empty selects dense_rho_grid
  std::vector<double> r;    // tabulation grid; empty selects default_r_grid
};

struct HodgeResult
{
  TriKernel curl_free;
  TriKernel div_free;
  std::vector<double> r;  // starts at 0
  std::vector<double> k1_par, k1_perp, k2_par, k2_perp;
  bool heavy_tail = false;
  std::string warning;
};

// Curl-free part has spectrum (h∥, 0), divergence-free part (0, h⊥). Components are splines on
// the r grid with power-law extrapolation beyond it.
HodgeResult hodge_split(const TriKernel &k, const HodgeGrids &grids = {},
                        const HankelQuadConfig &cfg = {});

// ∫_{‖x‖<R} (k1(x)α)·(k2(x)α) dx for ‖α‖ = 1 (the integral depends only on ‖α‖).
double l2_inner_product(const TriKernel &k1, const TriKernel &k2, double radius);

// rho,h_par,h_perp table.
void write_spectrum_csv(std::ostream &os, const Spectrum &s);

}  // namespace trik

#endif  // TRIK_SPECTRAL_HPP

// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numbers>
#include <vector>

#include <doctest.h>

#include "oracles.hpp"
#include "trik/error.hpp"
#include "trik/specfun.hpp"
#include "trik/spline.hpp"

using namespace trik;
using std::numbers::pi;

namespace
{

double rel(double a, double b)
{
  return std::fabs(a - b) / std::max(std::fabs(b), 1e-300);
}

}  // namespace

TEST_CASE("bessel_j trivial values and domain")
{
  CHECK(bessel_j(0.0, 0.0) == 1.0);
  CHECK(bessel_j(1.0, 0.0) == 0.0);
  CHECK(bessel_j(2.5, 0.0) == 0.0);
  CHECK_THROWS_AS(bessel_j(0.0, -1.0), Error);
  CHECK_THROWS_AS(bessel_j(-0.75, 1.0), Error);
  CHECK_THROWS_AS(bessel_j(0.0, std::nan("")), Error);
}

TEST_CASE("bessel_j half-integer order matches the elementary form")
{
  CHECK(std::fabs(bessel_j(0.5, 1.0) - std::sqrt(2.0 / pi) * std::sin(1.0)) < 1e-12);
  for (double x : {0.3, 2.0, 7.5, 25.0, 60.0})
  {
    const double j12 = std::sqrt(2.0 / (pi * x)) * std::sin(x);
    const double j32 = std::sqrt(2.0 / (pi * x)) * (std::sin(x) / x - std::cos(x));
    const double jm12 = std::sqrt(2.0 / (pi * x)) * std::cos(x);
    CHECK(std::fabs(bessel_j(0.5, x) - j12) < 1e-12);
    CHECK(std::fabs(bessel_j(1.5, x) - j32) < 1e-12);
    CHECK(std::fabs(bessel_j(-0.5, x) - jm12) < 1e-12);
  }
}

TEST_CASE("bessel_j agrees with a long-double power series")
{
  for (double nu : {0.0, 0.5, 1.0, 1.5, 2.0, 3.7, 10.0})
  {
    for (double x : {0.01, 0.5, 1.0, 3.0, 6.0, 9.5, 12.0})
    {
      const double ref = oracle::bessel_j_series(nu, x);
      CHECK(std::fabs(bessel_j(nu, x) - ref) < 1e-11 * (1.0 + std::fabs(ref)));
    }
  }
}

TEST_CASE("bessel_k examples")
{
  CHECK(rel(bessel_k(0.5, 1.0), std::sqrt(pi / 2.0) * std::exp(-1.0)) < 1e-12);
  // Large-argument series with mu = 4nu^2 = 9; it terminates after the 1/z term.
  const double mu = 9.0, z = 10.0;
  const double series = std::sqrt(pi / (2.0 * z)) * std::exp(-z) *
                        (1.0 + (mu - 1.0) / (8.0 * z) +
                         (mu - 1.0) * (mu - 9.0) / (2.0 * 64.0 * z * z));
  CHECK(rel(bessel_k(1.5, 10.0), series) < 0.02);
  CHECK(rel(bessel_k(1.5, 10.0), series) < 1e-12);
  CHECK_THROWS_AS(bessel_k(1.0, 0.0), Error);
  CHECK_THROWS_AS(bessel_k(1.0, -2.0), Error);
}

TEST_CASE("bessel_k large-argument expansion leading term within 2 percent")
{
  // Relative size of the first correction is (4ν²-1)/(8x), below 2% for these pairs.
  for (auto [nu, x] : {std::pair{1.5, 60.0}, std::pair{0.0, 10.0}, std::pair{1.0, 20.0}})
  {
    const double lead = std::sqrt(pi / (2.0 * x)) * std::exp(-x);
    CHECK(rel(bessel_k(nu, x), lead) < 0.02);
  }
}

TEST_CASE("bessel_k is even in the order")
{
  for (double nu : {0.3, 1.0, 1.5, 2.25, 4.0})
  {
    for (double x : {0.05, 0.7, 3.0, 15.0})
    {
      CHECK(rel(bessel_k(nu, x), bessel_k(-nu, x)) < 1e-13);
    }
  }
}

TEST_CASE("bessel_k agrees with its integral representation")
{
  for (double nu : {0.0, 0.25, 0.5, 1.0, 1.5, 2.0, 3.3})
  {
    for (double x : {0.1, 0.5, 1.0, 2.5, 6.0, 12.0, 30.0})
    {
      const double ref = oracle::bessel_k_integral(nu, x);
      CHECK(bessel_k(nu, x) > 0.0);
      CHECK(rel(bessel_k(nu, x), ref) < 1e-10);
    }
  }
}

TEST_CASE("incomplete gamma")
{
  for (double x : {0.0, 0.1, 1.0, 4.0, 30.0})
  {
    CHECK(std::fabs(lower_gamma(1.0, x) - (1.0 - std::exp(-x))) < 1e-14);
  }
  CHECK(std::fabs(upper_gamma(1.0, 0.0) - 1.0) < 1e-15);
  CHECK(lower_gamma(2.5, 0.0) == 0.0);
  for (double nu : {0.3, 1.0, 1.5, 2.0, 5.5, 12.0})
  {
    for (double x : {0.0, 0.01, 0.7, 3.0, 10.0, 40.0})
    {
      CHECK(rel(lower_gamma(nu, x) + upper_gamma(nu, x), std::tgamma(nu)) < 1e-12);
    }
  }
  // γ(3/2, 2) = ∫₀^√2 2u² e^{-u²} du after t = u².
  const double ref = oracle::adaptive_simpson([](double u) { return 2.0 * u * u * std::exp(-u * u); },
                                              0.0, std::sqrt(2.0), 1e-15);
  CHECK(rel(lower_gamma(1.5, 2.0), ref) < 1e-12);
  CHECK_THROWS_AS(lower_gamma(0.0, 1.0), Error);
  CHECK_THROWS_AS(upper_gamma(-1.0, 1.0), Error);
  CHECK_THROWS_AS(lower_gamma(1.0, -1.0), Error);
}

TEST_CASE("Bessel recurrence residuals on [0.1, 50]")
{
  for (double nu : {0.0, 0.5, 1.0, 1.5, 2.0})
  {
    for (int i = 0; i <= 1000; ++i)
    {
      const double x = 0.1 + (50.0 - 0.1) * i / 1000.0;
      // J_{-1} = -J_1 for the integer case, below the supported order range.
      const double jm = nu == 0.0 ? -bessel_j(1.0, x) : bessel_j(nu - 1.0, x);
      const double j = bessel_j(nu, x), jp = bessel_j(nu + 1.0, x);
      CHECK(std::fabs(jm + jp - 2.0 * nu / x * j) <= 1e-10 * (1.0 + std::fabs(j)));
    }
  }
}

TEST_CASE("Bessel derivative identities against central differences")
{
  const double h = 1e-6;
  for (double nu : {0.0, 0.5, 1.0, 1.5, 2.0})
  {
    for (double x = 0.2; x < 50.0; x += 0.37)
    {
      const double fd = (bessel_j(nu, x + h) - bessel_j(nu, x - h)) / (2.0 * h);
      const double jm = nu == 0.0 ? -bessel_j(1.0, x) : bessel_j(nu - 1.0, x);
      const double j = bessel_j(nu, x), jp = bessel_j(nu + 1.0, x);
      CHECK(std::fabs(fd - (jm - nu / x * j)) < 1e-6);
      CHECK(std::fabs(fd - (nu / x * j - jp)) < 1e-6);
    }
  }
}

TEST_CASE("derivative of (r/s)^nu K_nu(r/s)")
{
  for (double sigma : {0.5, 1.0, 2.0})
  {
    for (double nu : {0.5, 1.0, 1.5, 2.0, 3.0})
    {
      auto f = [&](double r) { return std::pow(r / sigma, nu) * bessel_k(nu, r / sigma); };
      for (int i = 0; i <= 60; ++i)
      {
        const double r = sigma * (0.2 + 4.8 * i / 60.0);
        const double h = 1e-6 * sigma;
        const double fd = (f(r + h) - f(r - h)) / (2.0 * h);
        const double exact = -std::pow(r / sigma, nu) * bessel_k(nu - 1.0, r / sigma) / sigma;
        CHECK(rel(fd, exact) < 1e-6);
      }
    }
  }
}

TEST_CASE("bessel_j_zero")
{
  CHECK(std::fabs(bessel_j_zero(0.5, 1) - pi) < 1e-6);
  CHECK(std::fabs(bessel_j_zero(0.5, 7) - 7.0 * pi) < 1e-6);
  for (double nu : {0.0, 1.0, 2.0})
  {
    for (int s : {1, 2, 5, 20})
    {
      const double z = bessel_j_zero(nu, s);
      CHECK(std::fabs(bessel_j(nu, z)) < 1e-3);
    }
  }
}

TEST_CASE("hankel_integral closed forms for Gaussian profiles")
{
  for (double c : {0.5, 1.0, 3.0})
  {
    const ProfileHint hint{DecayClass::Gaussian, 1.0 / std::sqrt(c)};
    auto g = [c](double r) { return std::exp(-c * r * r); };
    for (double nu : {0.0, 0.5, 1.0, 2.0})
    {
      for (double rho : {0.05, 0.5, 1.0, 2.5, 6.0})
      {
        const double ref =
            std::pow(rho, nu) / std::pow(2.0 * c, nu + 1.0) * std::exp(-rho * rho / (4.0 * c));
        CHECK(std::fabs(hankel_integral(g, hint, nu + 1.0, nu, rho) - ref) <
              1e-9 * (1e-6 + std::fabs(ref)));
      }
    }
    for (double nu : {0.5, 1.0, 1.5, 2.0})
    {
      for (double rho : {0.05, 0.5, 1.0, 2.5, 6.0})
      {
        const double ref = std::pow(2.0, nu - 1.0) / std::pow(rho, nu) *
                           oracle::adaptive_simpson(
                               [nu](double u)
                               { return 2.0 * std::pow(u, 2.0 * nu - 1.0) * std::exp(-u * u); },
                               0.0, rho / (2.0 * std::sqrt(c)), 1e-17);
        CHECK(rel(hankel_integral(g, hint, nu - 1.0, nu, rho), ref) < 1e-8);
      }
    }
  }
  const ProfileHint hint{DecayClass::Gaussian, 1.0};
  CHECK(hankel_integral([](double) { return 0.0; }, hint, 1.0, 0.0, 1.0) == 0.0);
}

TEST_CASE("hankel_integral rejects bad input")
{
  const ProfileHint hint{DecayClass::Gaussian, 1.0};
  auto g = [](double r) { return std::exp(-r * r); };
  CHECK_THROWS_AS(hankel_integral(g, hint, 1.0, 0.0, 0.0), Error);
  CHECK_THROWS_AS(hankel_integral(g, hint, 1.0, 0.0, -1.0), Error);
  HankelQuadConfig bad;
  bad.segment_tol = 0.0;
  CHECK_THROWS_AS(hankel_integral(g, hint, 1.0, 0.0, 1.0, bad), Error);
}

TEST_CASE("hankel_integral reports non-convergence")
{
  // A growing profile never produces a small segment past the truncation radius.
  const ProfileHint hint{DecayClass::Gaussian, 1.0};
  HankelQuadConfig cfg;
  cfg.max_segments = 8;
  try
  {
    hankel_integral([](double r) { return r * r; }, hint, 1.0, 0.0, 1.0, cfg);
    FAIL("expected non-convergence");
  }
  catch (const Error &e)
  {
    CHECK(e.kind() == ErrorKind::NonConvergence);
  }
}

TEST_CASE("segment budget applies beyond the truncation radius")
{
  // ∫ r e^{-r} J₀(ρr) dr = (1 + ρ²)^{-3/2}; at ρ = 125 reaching r = 50 takes ~2000 segments.
  const ProfileHint hint{DecayClass::Exponential, 1.0};
  for (double rho : {1.0, 30.0, 125.0})
  {
    const double v = hankel_integral([](double r) { return std::exp(-r); }, hint, 1.0, 0.0, rho);
    CHECK(rel(v, std::pow(1.0 + rho * rho, -1.5)) < 1e-8);
  }
}

TEST_CASE("Hankel transform applied twice returns the profile")
{
  // ∫₀^∞ ρ F(ρ) J_ν(ρ r) dρ with F(ρ) = ∫₀^∞ r f(r) J_ν(ρ r) dr recovers f.
  for (double nu : {0.0, 1.0})
  {
    auto f = [](double r) { return std::exp(-r * r); };
    const ProfileHint inner{DecayClass::Gaussian, 1.0};
    auto big_f = [&](double rho) { return hankel_integral(f, inner, 1.0, nu, rho); };
    const ProfileHint outer{DecayClass::Gaussian, 2.0};
    for (double r : {0.3, 1.0, 2.0})
    {
      // For ν > 0 the profile is r^ν e^{-r²} to keep the transform pair smooth.
      if (nu == 0.0)
      {
        CHECK(std::fabs(hankel_integral(big_f, outer, 1.0, nu, r) - f(r)) < 1e-8);
      }
      else
      {
        auto g = [](double s) { return s * std::exp(-s * s); };
        auto big_g = [&](double rho) { return hankel_integral(g, inner, 1.0, nu, rho); };
        CHECK(std::fabs(hankel_integral(big_g, outer, 1.0, nu, r) - g(r)) < 1e-8);
      }
    }
  }
}

TEST_CASE("radial_moment")
{
  const ProfileHint hint{DecayClass::Gaussian, 1.0};
  // ∫ r^3 e^{-r²} dr = 1/2, ∫ e^{-r²} dr = √π/2.
  CHECK(rel(radial_moment([](double r) { return std::exp(-r * r); }, hint, 3.0), 0.5) < 1e-12);
  CHECK(rel(radial_moment([](double r) { return std::exp(-r * r); }, hint, 0.0),
            0.5 * std::sqrt(pi)) < 1e-12);
  // ∫ r/(1+r²)^2 dr = 1/2 with an algebraic tail.
  const ProfileHint alg{DecayClass::Algebraic, 1.0};
  CHECK(rel(radial_moment([](double r) { return 1.0 / ((1.0 + r * r) * (1.0 + r * r)); }, alg,
                          1.0),
            0.5) < 1e-8);
}

TEST_CASE("wynn_epsilon accelerates an alternating series")
{
  // Partial sums of ln 2 = 1 - 1/2 + 1/3 - ...
  std::vector<double> partial;
  double s = 0.0;
  for (int n = 1; n <= 15; ++n)
  {
    s += (n % 2 ? 1.0 : -1.0) / n;
    partial.push_back(s);
  }
  CHECK(std::fabs(wynn_epsilon(partial) - std::log(2.0)) < 1e-10);
  CHECK(std::fabs(partial.back() - std::log(2.0)) > 1e-2);
}

TEST_CASE("GaussLegendre integrates polynomials exactly")
{
  const GaussLegendre gl(8);
  // Degree 15 is the exactness limit for 8 nodes.
  CHECK(std::fabs(gl.integrate([](double x) { return std::pow(x, 14); }, -1.0, 1.0) - 2.0 / 15.0) <
        1e-14);
  CHECK(std::fabs(gl.integrate([](double x) { return x * x; }, 0.0, 3.0) - 9.0) < 1e-13);
}

TEST_CASE("CubicSpline interpolates and differentiates")
{
  std::vector<double> x, y;
  for (int i = 0; i <= 200; ++i)
  {
    x.push_back(i * 0.05);
    y.push_back(std::sin(x.back()));
  }
  const CubicSpline s(x, y);
  for (double t : {0.5, 1.234, 5.0, 8.0})
  {
    CHECK(std::fabs(s(t) - std::sin(t)) < 1e-6);
    CHECK(std::fabs(s.derivative(t) - std::cos(t)) < 1e-4);
  }
  CHECK(s(x[17]) == doctest::Approx(y[17]).epsilon(1e-15));
  CHECK_THROWS_AS(CubicSpline({0.0, 1.0, 1.0}, {0.0, 1.0, 2.0}), Error);
}

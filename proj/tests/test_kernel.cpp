// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <doctest.h>

#include "oracles.hpp"
#include "trik/error.hpp"
#include "trik/families.hpp"
#include "trik/kernel.hpp"

using namespace trik;
using std::numbers::pi;

namespace
{

std::vector<TriKernel> sample_kernels(int d)
{
  std::vector<TriKernel> ks;
  ks.push_back(gaussian_kernel(1.0, 1.0, d));
  ks.push_back(cauchy_kernel(0.8, d));
  ks.push_back(bessel_kernel(1.0, 0.5 * d + 2.5, d));
  ks.push_back(family_example1(1.5, 1.0, 1.0, d));
  ks.push_back(family_example2(1.5, 1.0, 1.0, d));
  ks.push_back(curl_free_gaussian(1.0, 2.0, d));
  ks.push_back(div_free_gaussian(1.0, 2.0, d));
  ks.push_back(curl_free_bessel(0.7, 0.5 * d + 2.5, d));
  ks.push_back(div_free_bessel(0.7, 0.5 * d + 2.5, d));
  ks.push_back(mixed_gaussian_kernel(1.0, 2.0, d));
  ks.push_back(gaussian_hodge_pair(1.0, d).first);
  ks.push_back(gaussian_hodge_pair(1.0, d).second);
  return ks;
}

std::vector<double> log_grid(double lo, double hi, int n)
{
  std::vector<double> r;
  for (int i = 0; i < n; ++i)
  {
    r.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
  }
  return r;
}

Eigen::VectorXd at_radius(int d, double r, std::mt19937_64 &rng)
{
  Eigen::VectorXd x = oracle::random_vector(d, rng);
  return r * x / x.norm();
}

}  // namespace

TEST_CASE("Example 1 at the origin is the identity")
{
  const TriKernel k = family_example1(1.5, 1.0, 1.0, 2);
  CHECK(k.k0 == doctest::Approx(1.0));
  CHECK(k.k_par(0.0) == doctest::Approx(1.0));
  CHECK(k.k_perp(0.0) == doctest::Approx(1.0));
  const Eigen::MatrixXd m = eval_matrix(k, Eigen::Vector2d::Zero());
  CHECK((m - Eigen::Matrix2d::Identity()).norm() < 1e-15);
  // Below the zero threshold the value is k0 I exactly.
  const Eigen::MatrixXd tiny = eval_matrix(k, Eigen::Vector2d(1e-13, -2e-13));
  CHECK((tiny - Eigen::Matrix2d::Identity()).norm() == 0.0);
}

TEST_CASE("eval_matrix matches the projector form")
{
  std::mt19937_64 rng(11);
  for (int d : {2, 3, 4})
  {
    for (const TriKernel &k : sample_kernels(d))
    {
      for (int t = 0; t < 10; ++t)
      {
        const Eigen::VectorXd x = oracle::random_vector(d, rng, -3.0, 3.0);
        const double r = x.norm();
        const Eigen::MatrixXd ref = oracle::tri_matrix(k.k_par(r), k.k_perp(r), x);
        CHECK((eval_matrix(k, x) - ref).norm() < 1e-14 * (1.0 + ref.norm()));
      }
    }
  }
}

TEST_CASE("rotation equivariance over 100 random rotations")
{
  std::mt19937_64 rng(7);
  for (int d : {2, 3})
  {
    for (const TriKernel &k : sample_kernels(d))
    {
      for (int t = 0; t < 100; ++t)
      {
        const Eigen::MatrixXd rot = oracle::random_rotation(d, rng);
        const Eigen::VectorXd x = oracle::random_vector(d, rng, -2.5, 2.5);
        const Eigen::MatrixXd lhs = eval_matrix(k, rot * x);
        const Eigen::MatrixXd rhs = rot * eval_matrix(k, x) * rot.transpose();
        CHECK((lhs - rhs).norm() <= 1e-12);
      }
    }
  }
}

TEST_CASE("eigenstructure is k_par once and k_perp d-1 times")
{
  std::mt19937_64 rng(3);
  for (int d : {2, 3, 5})
  {
    for (const TriKernel &k : sample_kernels(d))
    {
      for (double r : {0.1, 0.6, 1.7, 4.0})
      {
        const Eigen::VectorXd x = at_radius(d, r, rng);
        const Eigen::MatrixXd m = eval_matrix(k, x);
        CHECK((m - m.transpose()).norm() == 0.0);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
        std::vector<double> got(es.eigenvalues().data(), es.eigenvalues().data() + d);
        std::vector<double> want(d - 1, k.k_perp(r));
        want.push_back(k.k_par(r));
        std::sort(want.begin(), want.end());
        for (int i = 0; i < d; ++i)
        {
          CHECK(std::fabs(got[i] - want[i]) <= 1e-10);
        }
        // The eigenvector of k_par is x itself.
        CHECK((m * x - k.k_par(r) * x).norm() <= 1e-12 * (1.0 + r));
      }
    }
  }
}

TEST_CASE("apply_kernel agrees with the matrix")
{
  std::mt19937_64 rng(5);
  for (const TriKernel &k : sample_kernels(3))
  {
    const Eigen::VectorXd x = oracle::random_vector(3, rng, -2.0, 2.0);
    const Eigen::VectorXd a = oracle::random_vector(3, rng);
    Eigen::VectorXd out = Eigen::VectorXd::Constant(3, 0.25);
    apply_kernel(k, {x.data(), 3}, {a.data(), 3}, {out.data(), 3});
    const Eigen::VectorXd ref = eval_matrix(k, x) * a + Eigen::VectorXd::Constant(3, 0.25);
    CHECK((out - ref).norm() < 1e-14);
  }
}

TEST_CASE("partial_matrix matches central differences and is odd")
{
  std::mt19937_64 rng(13);
  for (int d : {2, 3})
  {
    for (const TriKernel &k : sample_kernels(d))
    {
      for (double r : {0.1, 0.35, 1.0, 2.2, 5.0})
      {
        const Eigen::VectorXd x = at_radius(d, r, rng);
        for (int axis = 0; axis < d; ++axis)
        {
          const double h = 1e-5;
          Eigen::VectorXd xp = x, xm = x;
          xp(axis) += h;
          xm(axis) -= h;
          const Eigen::MatrixXd fd = (eval_matrix(k, xp) - eval_matrix(k, xm)) / (2.0 * h);
          const Eigen::MatrixXd an = partial_matrix(k, x, axis);
          CHECK((an - fd).cwiseAbs().maxCoeff() <= 1e-6);
          CHECK((partial_matrix(k, -x, axis) + an).norm() <= 1e-13 * (1.0 + an.norm()));
        }
        const Eigen::VectorXd pa = oracle::random_vector(d, rng);
        const Eigen::VectorXd pb = oracle::random_vector(d, rng);
        std::vector<double> g(d);
        contract_gradient(k, {x.data(), static_cast<std::size_t>(d)},
                          {pa.data(), static_cast<std::size_t>(d)},
                          {pb.data(), static_cast<std::size_t>(d)}, g);
        for (int axis = 0; axis < d; ++axis)
        {
          const double ref = pa.dot(partial_matrix(k, x, axis) * pb);
          CHECK(std::fabs(g[axis] - ref) <= 1e-13 * (1.0 + std::fabs(ref)));
        }
      }
    }
  }
  const TriKernel g = gaussian_kernel(1.0, 1.0, 2);
  CHECK_THROWS_AS(partial_matrix(g, Eigen::Vector2d::Zero(), 0), Error);
  CHECK_THROWS_AS(partial_matrix(g, Eigen::Vector2d(1.0, 0.0), 2), Error);
}

TEST_CASE("ktilde closed forms and small-r limits")
{
  const double a = 1.5, b = 1.0, c = 1.3;
  const TriKernel e1 = family_example1(a, b, c, 2);
  const TriKernel e2 = family_example2(a, b, c, 3);
  for (double r : {1e-13, 1e-4, 0.3, 1.0, 2.5})
  {
    const double g = std::exp(-c * r * r);
    CHECK(ktilde(e1, r) == doctest::Approx(a * g).epsilon(1e-12));
    CHECK(ktilde(e2, r) == doctest::Approx(-a * g).epsilon(1e-12));
  }
  CHECK(ktilde(e1, 0.0) == doctest::Approx(a));
  CHECK(ktilde(gaussian_kernel(2.0, 1.0, 2), 0.7) == 0.0);
  // A kernel without a closed-form k̃ falls back to the difference quotient.
  const TriKernel m = mixed_gaussian_kernel(1.0, 2.0, 2);
  for (double r : {0.5, 1.0, 2.0})
  {
    CHECK(ktilde(m, r) ==
          doctest::Approx((std::exp(-r * r) - std::exp(-2.0 * r * r)) / (r * r)).epsilon(1e-10));
  }
}

TEST_CASE("Example families on the construction boundaries")
{
  const double b = 0.8, c = 1.7;
  for (int d : {2, 3, 4})
  {
    const TriKernel div_free = family_example1(2.0 * b * c / (d - 1), b, c, d);
    const TriKernel curl_free = family_example2(2.0 * b * c, b, c, d);
    for (double r : log_grid(0.05, 5.0, 80))
    {
      const double sd = std::max(std::fabs(div_free.k_par(r)), std::fabs(div_free.k_perp(r)));
      const double sc = std::max(std::fabs(curl_free.k_par(r)), std::fabs(curl_free.k_perp(r)));
      CHECK(std::fabs(div_free_residual(div_free, r)) <= 1e-10 * std::max(sd, 1e-300));
      CHECK(std::fabs(curl_free_residual(curl_free, r)) <= 1e-10 * std::max(sc, 1e-300));
    }
    // Off the boundary the residual is visibly non-zero.
    const TriKernel off = family_example1(0.5 * b * c, b, c, d);
    CHECK(std::fabs(div_free_residual(off, 0.7)) > 1e-3);
  }
}

TEST_CASE("curl-free and divergence-free constructions")
{
  for (int d : {2, 3})
  {
    const std::vector<TriKernel> curl = {curl_free_gaussian(1.0, 1.0, d),
                                         curl_free_bessel(0.8, 0.5 * d + 2.5, d),
                                         make_curl_free(gaussian_profile(0.3, 2.0), d),
                                         gaussian_hodge_pair(1.5, d).first};
    const std::vector<TriKernel> div = {div_free_gaussian(1.0, 1.0, d),
                                        div_free_bessel(0.8, 0.5 * d + 2.5, d),
                                        make_div_free(gaussian_profile(0.3, 2.0), d),
                                        gaussian_hodge_pair(1.5, d).second};
    for (double r : log_grid(0.05, 5.0, 60))
    {
      for (const TriKernel &k : curl)
      {
        const double s = std::max(std::fabs(k.k_par(r)), std::fabs(k.k_perp(r)));
        CHECK(std::fabs(curl_free_residual(k, r)) <= 1e-10 * s);
      }
      for (const TriKernel &k : div)
      {
        const double s = std::max(std::fabs(k.k_par(r)), std::fabs(k.k_perp(r)));
        CHECK(std::fabs(div_free_residual(k, r)) <= 1e-10 * s);
      }
    }
  }
}

TEST_CASE("construction from a scalar profile")
{
  // kH = A e^{-cr²}: -kH'' = A(2c - 4c²r²)e^{-cr²}, -kH'/r = 2Ac e^{-cr²}.
  const double amp = 0.3, c = 2.0;
  const TriKernel cf = make_curl_free(gaussian_profile(amp, c), 3);
  const TriKernel df = make_div_free(gaussian_profile(amp, c), 3);
  for (double r : {0.0, 0.2, 0.9, 1.6})
  {
    const double g = std::exp(-c * r * r);
    CHECK(cf.k_par(r) == doctest::Approx(amp * (2.0 * c - 4.0 * c * c * r * r) * g));
    CHECK(cf.k_perp(r) == doctest::Approx(2.0 * amp * c * g));
    CHECK(df.k_par(r) == doctest::Approx(2.0 * 2.0 * amp * c * g));
    CHECK(df.k_perp(r) ==
          doctest::Approx(2.0 * amp * c * g + amp * (2.0 * c - 4.0 * c * c * r * r) * g));
  }
  CHECK(cf.k0 == doctest::Approx(2.0 * amp * c));
  CHECK(df.k0 == doctest::Approx(4.0 * amp * c));
  // The Gaussian families are the Example-2 and Example-1 boundaries.
  const TriKernel cg = curl_free_gaussian(0.5, 1.5, 2);
  const TriKernel e2 = family_example2(2.0 * 0.5 * 1.5, 0.5, 1.5, 2);
  const TriKernel dg = div_free_gaussian(0.5, 1.5, 3);
  const TriKernel e1 = family_example1(0.5 * 1.5, 0.5, 1.5, 3);
  for (double r : {0.1, 0.8, 2.0})
  {
    CHECK(cg.k_par(r) == doctest::Approx(e2.k_par(r)).epsilon(1e-13));
    CHECK(cg.k_perp(r) == doctest::Approx(e2.k_perp(r)).epsilon(1e-13));
    CHECK(dg.k_par(r) == doctest::Approx(e1.k_par(r)).epsilon(1e-13));
    CHECK(dg.k_perp(r) == doctest::Approx(e1.k_perp(r)).epsilon(1e-13));
  }
}

TEST_CASE("Bessel kernels against independent Bessel evaluations")
{
  for (int d : {2, 3})
  {
    const double sigma = 0.7, ell = 3.0, nu = ell - 0.5 * d;
    const double c0 =
        1.0 / (std::pow(2.0, ell + 0.5 * d - 1.0) * std::pow(pi, 0.5 * d) * std::tgamma(ell) *
               std::pow(sigma, d));
    CHECK(bessel_green_constant(sigma, d, ell) == doctest::Approx(c0).epsilon(1e-14));
    const TriKernel kh = bessel_kernel(sigma, ell, d);
    const TriKernel cf = curl_free_bessel(sigma, ell, d);
    const TriKernel df = div_free_bessel(sigma, ell, d);
    for (double r : {0.05, 0.3, 1.0, 2.0, 4.5})
    {
      const double z = r / sigma;
      const double kn = oracle::bessel_k_integral(nu, z);
      const double knm = oracle::bessel_k_integral(nu - 1.0, z);
      const double pre = c0 / (sigma * sigma) * std::pow(z, nu - 1.0);
      CHECK(kh.k_par(r) == doctest::Approx(c0 * std::pow(z, nu) * kn).epsilon(1e-10));
      CHECK(kh.k_perp(r) == doctest::Approx(c0 * std::pow(z, nu) * kn).epsilon(1e-10));
      CHECK(cf.k_par(r) ==
            doctest::Approx(pre * ((2.0 * nu - 1.0) * knm - z * kn)).epsilon(1e-9));
      CHECK(cf.k_perp(r) == doctest::Approx(pre * knm).epsilon(1e-10));
      CHECK(df.k_par(r) == doctest::Approx(pre * (d - 1.0) * knm).epsilon(1e-10));
      CHECK(df.k_perp(r) ==
            doctest::Approx(pre * ((2.0 * nu + d - 3.0) * knm - z * kn)).epsilon(1e-9));
    }
    // Coefficients are continuous at the origin and equal there.
    CHECK(cf.k_par(1e-7) == doctest::Approx(cf.k0).epsilon(1e-5));
    CHECK(cf.k_perp(1e-7) == doctest::Approx(cf.k0).epsilon(1e-5));
    CHECK(df.k_par(1e-7) == doctest::Approx(df.k0).epsilon(1e-5));
    CHECK(df.k_perp(1e-7) == doctest::Approx(df.k0).epsilon(1e-5));
  }
}

TEST_CASE("domains of the example families")
{
  CHECK(in_D1(1.5, 1.0, 1.0, 2));
  CHECK_FALSE(in_D1(3.0, 1.0, 1.0, 2));
  CHECK(in_D2(0.0, 0.4, 2.0));
  CHECK(in_D2(2.0, 1.0, 1.0));
  CHECK_FALSE(in_D2(2.1, 1.0, 1.0));
  CHECK_FALSE(in_D1(-0.1, 1.0, 1.0, 2));
  CHECK_FALSE(in_D2(-0.1, 1.0, 1.0));
  // The dimension enters D1 through (d-1).
  CHECK(in_D1(1.0, 1.0, 1.0, 3));
  CHECK_FALSE(in_D1(1.01, 1.0, 1.0, 3));
}

TEST_CASE("Gaussian Hodge pair")
{
  const auto [k1, k2] = gaussian_hodge_pair(1.0, 2);
  CHECK(k1.k_perp(1.0) == doctest::Approx((1.0 - std::exp(-1.0)) / 2.0).epsilon(1e-14));
  CHECK(k1.k_perp(1.0) == doctest::Approx(0.3161).epsilon(1e-4));
  for (int d : {2, 3, 4})
  {
    for (double c : {0.5, 1.0, 16.0})
    {
      const auto [a, b] = gaussian_hodge_pair(c, d);
      const double s = 0.5 * d;
      for (double r : {0.0, 1e-6, 0.01, 0.3, 1.0, 2.0, 5.0})
      {
        const double g = std::exp(-c * r * r);
        CHECK(std::fabs(a.k_par(r) + b.k_par(r) - g) <= 1e-12);
        CHECK(std::fabs(a.k_perp(r) + b.k_perp(r) - g) <= 1e-12);
        if (r > 0.01)
        {
          // k1⊥ = γ(s, cr²)/(2 c^s r^{2s}) with an independent quadrature of γ.
          const double gam = oracle::adaptive_simpson(
              [s](double u) { return 2.0 * std::pow(u, 2.0 * s - 1.0) * std::exp(-u * u); }, 0.0,
              std::sqrt(c) * r, 1e-16);
          CHECK(a.k_perp(r) ==
                doctest::Approx(gam / (2.0 * std::pow(c, s) * std::pow(r, 2.0 * s)))
                    .epsilon(1e-10));
          CHECK(b.k_par(r) == doctest::Approx((d - 1.0) * a.k_perp(r)).epsilon(1e-12));
        }
      }
      // Both components equal 1/d and (d-1)/d of the Gaussian at the origin.
      CHECK(a.k0 == doctest::Approx(1.0 / d));
      CHECK(b.k0 == doctest::Approx((d - 1.0) / d));
      CHECK(ktilde(a, 0.0) == doctest::Approx(-c / (s + 1.0)));
      CHECK(ktilde(a, 1e-5) == doctest::Approx(-c / (s + 1.0)).epsilon(1e-6));
      for (double r : {0.2, 1.0, 3.0})
      {
        CHECK(ktilde(a, r) ==
              doctest::Approx((a.k_par(r) - a.k_perp(r)) / (r * r)).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("coefficients are bounded by k0 for positive definite families")
{
  for (int d : {2, 3})
  {
    const std::vector<TriKernel> pd = {
        gaussian_kernel(1.0, 1.0, d),          cauchy_kernel(1.0, d),
        bessel_kernel(1.0, 0.5 * d + 1.5, d),  family_example1(0.5, 1.0, 1.0, d),
        family_example2(1.5, 1.0, 1.0, d),     curl_free_gaussian(1.0, 1.0, d),
        div_free_gaussian(1.0, 1.0, d),        curl_free_bessel(1.0, 0.5 * d + 2.5, d),
        div_free_bessel(1.0, 0.5 * d + 2.5, d), gaussian_hodge_pair(1.0, d).first,
        gaussian_hodge_pair(1.0, d).second};
    for (const TriKernel &k : pd)
    {
      CHECK(k.k0 >= 0.0);
      for (double r : log_grid(1e-3, 50.0, 200))
      {
        CHECK(std::fabs(k.k_par(r)) <= k.k0 * (1.0 + 1e-12));
        CHECK(std::fabs(k.k_perp(r)) <= k.k0 * (1.0 + 1e-12));
      }
    }
  }
}

TEST_CASE("kernel specs: parse, build and errors")
{
  const KernelSpec s = parse_kernel_spec(R"({"family": "example1", "a": 1.5, "b": 1, "c": 1, "dim": 2})");
  CHECK(s.family == "example1");
  CHECK(s.dim == 2);
  CHECK(s.params.at("a") == 1.5);
  const TriKernel k = build_kernel(s);
  CHECK(k.k_perp(1.0) == doctest::Approx(-0.5 * std::exp(-1.0)));
  const KernelSpec back = parse_kernel_spec(kernel_spec_to_json(s));
  CHECK(back.family == s.family);
  CHECK(back.params == s.params);

  const TriKernel gs = build_kernel(parse_kernel_spec(R"({"family":"gaussian","b":1,"sigma":2,"dim":3})"));
  CHECK(gs.k_par(2.0) == doctest::Approx(std::exp(-0.5)));

  CHECK_THROWS_AS(parse_kernel_spec("{"), Error);
  CHECK_THROWS_AS(parse_kernel_spec("[]"), Error);
  CHECK_THROWS_AS(parse_kernel_spec(R"({"dim": 2})"), Error);
  CHECK_THROWS_AS(parse_kernel_spec(R"({"family": "gaussian"})"), Error);
  CHECK_THROWS_AS(parse_kernel_spec(R"({"family": "gaussian", "dim": 2.5})"), Error);
  CHECK_THROWS_AS(parse_kernel_spec(R"({"family": "gaussian", "dim": 2, "b": "x"})"), Error);
  CHECK_THROWS_AS(build_kernel({"nope", 2, {}}), Error);
  CHECK_THROWS_AS(build_kernel({"gaussian", 2, {{"b", 1.0}}}), Error);
  CHECK_THROWS_AS(build_kernel({"gaussian", 2, {{"b", 1.0}, {"c", 1.0}, {"sigma", 1.0}}}), Error);
  CHECK_THROWS_AS(build_kernel({"gaussian", 2, {{"b", 1.0}, {"c", 1.0}, {"q", 1.0}}}), Error);
  CHECK_THROWS_AS(build_kernel({"gaussian", 1, {{"b", 1.0}, {"c", 1.0}}}), Error);
  CHECK_THROWS_AS(build_kernel({"gaussian", 2, {{"b", 1.0}, {"c", -1.0}}}), Error);
  try
  {
    build_kernel({"example1", 2, {{"a", 1.0}, {"b", 1.0}}});
    FAIL("expected an error");
  }
  catch (const Error &e)
  {
    CHECK(e.kind() == ErrorKind::InvalidArgument);
    CHECK(std::string(e.what()).find("'c'") != std::string::npos);
  }
}

// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <memory>
#include <random>
#include <sstream>
#include <vector>

#include <doctest.h>

#include "oracles.hpp"
#include "trik/error.hpp"
#include "trik/families.hpp"
#include "trik/fields.hpp"

using namespace trik;

namespace
{

Eigen::MatrixXd random_points(int n, int d, std::mt19937_64 &rng, double spread = 1.5)
{
  Eigen::MatrixXd p(n, d);
  for (int a = 0; a < n; ++a)
  {
    p.row(a) = oracle::random_vector(d, rng, -spread, spread).transpose();
  }
  return p;
}

// Fourth-order central difference of y ↦ field(y) along `axis`.
Eigen::VectorXd fd4(const KernelField &f, const Eigen::VectorXd &y, int axis, double h)
{
  auto at = [&](double s) {
    Eigen::VectorXd z = y;
    z(axis) += s;
    return f(z);
  };
  return (-at(2.0 * h) + 8.0 * at(h) - 8.0 * at(-h) + at(-2.0 * h)) / (12.0 * h);
}

// Gram matrix built entry by entry from the projector form.
Eigen::MatrixXd direct_gram(const TriKernel &k, const Eigen::MatrixXd &pts)
{
  const int n = static_cast<int>(pts.rows()), d = static_cast<int>(pts.cols());
  Eigen::MatrixXd g(n * d, n * d);
  for (int a = 0; a < n; ++a)
  {
    for (int b = 0; b < n; ++b)
    {
      const Eigen::VectorXd x = (pts.row(a) - pts.row(b)).transpose();
      g.block(a * d, b * d, d, d) =
          a == b ? Eigen::MatrixXd(k.k0 * Eigen::MatrixXd::Identity(d, d))
                 : oracle::tri_matrix(k.k_par(x.norm()), k.k_perp(x.norm()), x);
    }
  }
  return g;
}

}  // namespace

TEST_CASE("landmark configurations reject coincident points")
{
  Eigen::MatrixXd p(3, 2);
  p << 0.0, 0.0, 1.0, 0.0, 0.0, 1e-10;
  CHECK_THROWS_AS(LandmarkConfig{p}, Error);
  p(2, 1) = 1e-3;
  const LandmarkConfig cfg(p);
  CHECK(cfg.size() == 3);
  CHECK(cfg.dim() == 2);
  Eigen::MatrixXd bad = p;
  bad(1, 0) = std::nan("");
  CHECK_THROWS_AS(LandmarkConfig{bad}, Error);
}

TEST_CASE("block kernel matrix")
{
  std::mt19937_64 rng(29);
  for (int d : {2, 3})
  {
    for (const TriKernel &k : {gaussian_kernel(1.0, 1.0, d), family_example1(1.5, 1.0, 1.0, d),
                               div_free_gaussian(1.0, 2.0, d)})
    {
      const Eigen::MatrixXd pts = random_points(5, d, rng);
      const BlockKernelMatrix m = assemble_block_matrix(k, LandmarkConfig(pts));
      CHECK(m.n_landmarks == 5);
      CHECK(m.dim == d);
      CHECK((m.matrix - m.matrix.transpose()).norm() == 0.0);
      CHECK((m.matrix - direct_gram(k, pts)).norm() < 1e-14);
      // Reproducing consistency of the quadratic form.
      const Eigen::VectorXd alpha = oracle::random_vector(5 * d, rng);
      double blockwise = 0.0;
      for (int a = 0; a < 5; ++a)
      {
        for (int b = 0; b < 5; ++b)
        {
          const Eigen::VectorXd x = (pts.row(a) - pts.row(b)).transpose();
          blockwise += alpha.segment(a * d, d).dot(eval_matrix(k, x) * alpha.segment(b * d, d));
        }
      }
      CHECK(std::fabs(alpha.dot(m.matrix * alpha) - blockwise) <= 1e-12 * (1.0 + std::fabs(blockwise)));
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.matrix);
      CHECK(es.eigenvalues().minCoeff() > 0.0);
    }
  }
}

TEST_CASE("field evaluation is the sum of kernel columns")
{
  std::mt19937_64 rng(31);
  const TriKernel k = family_example2(1.0, 1.0, 1.0, 3);
  const Eigen::MatrixXd centers = random_points(4, 3, rng);
  const Eigen::MatrixXd momenta = random_points(4, 3, rng);
  const KernelField f = snapshot_field(k, LandmarkConfig(centers), momenta);
  for (int t = 0; t < 10; ++t)
  {
    const Eigen::VectorXd y = oracle::random_vector(3, rng, -2.0, 2.0);
    Eigen::VectorXd ref = Eigen::VectorXd::Zero(3);
    for (int b = 0; b < 4; ++b)
    {
      ref += eval_matrix(k, y - centers.row(b).transpose()) * momenta.row(b).transpose();
    }
    CHECK((f(y) - ref).norm() < 1e-14);
  }
  CHECK((f(centers.row(0).transpose()) - f(centers.row(0).transpose())).norm() == 0.0);
  CHECK_THROWS_AS(f(Eigen::VectorXd::Zero(2)), Error);
  CHECK_THROWS_AS(snapshot_field(k, LandmarkConfig(centers), Eigen::MatrixXd::Zero(3, 3)), Error);
}

TEST_CASE("interpolation solves the constraints and has minimal norm")
{
  std::mt19937_64 rng(37);
  std::uniform_int_distribution<int> count(1, 6);
  for (int d : {2, 3})
  {
    for (const TriKernel &k : {gaussian_kernel(1.0, 1.0, d), family_example1(0.5, 1.0, 1.0, d)})
    {
      for (int trial = 0; trial < 10; ++trial)
      {
        const int n = count(rng);
        const Eigen::MatrixXd pts = random_points(n, d, rng);
        const Eigen::MatrixXd beta = random_points(n, d, rng, 1.0);
        const LandmarkConfig cfg(pts);
        const InterpolationResult res = interpolate(k, cfg, beta);
        for (int a = 0; a < n; ++a)
        {
          const Eigen::VectorXd v = res.field(pts.row(a).transpose());
          CHECK((v - beta.row(a).transpose()).norm() <= 1e-10);
        }
        Eigen::MatrixXd beta_rm = beta.transpose();
        const Eigen::Map<const Eigen::VectorXd> bflat(beta_rm.data(), n * d);
        Eigen::MatrixXd mom_rm = res.momenta.transpose();
        const Eigen::Map<const Eigen::VectorXd> aflat(mom_rm.data(), n * d);
        CHECK(res.norm_sq == doctest::Approx(aflat.dot(bflat)).epsilon(1e-10));
        CHECK(res.norm_sq == doctest::Approx(aflat.dot(direct_gram(k, pts) * aflat)).epsilon(1e-10));
        CHECK_FALSE(res.jitter_applied);

        // Any other kernel field through the same values, supported on extra centres too, has a
        // norm at least as large.
        for (int aug = 0; aug < 20; ++aug)
        {
          const int m = 1 + aug % 4;
          Eigen::MatrixXd all(n + m, d);
          all.topRows(n) = pts;
          all.bottomRows(m) = random_points(m, d, rng, 2.0);
          const Eigen::MatrixXd g = direct_gram(k, all);
          const Eigen::VectorXd gy = oracle::random_vector(m * d, rng);
          const Eigen::VectorXd rhs = bflat - g.topRightCorner(n * d, m * d) * gy;
          const Eigen::VectorXd gx = g.topLeftCorner(n * d, n * d).ldlt().solve(rhs);
          Eigen::VectorXd gamma(n * d + m * d);
          gamma << gx, gy;
          CHECK((g.topRows(n * d) * gamma - bflat).norm() <= 1e-8);
          CHECK(gamma.dot(g * gamma) >= res.norm_sq * (1.0 - 1e-10));
        }
      }
    }
  }
}

TEST_CASE("interpolation failure modes")
{
  Eigen::MatrixXd pts(2, 2);
  pts << 0.0, 0.0, 1.0, 0.0;
  const LandmarkConfig cfg(pts);
  const Eigen::MatrixXd beta = Eigen::MatrixXd::Ones(2, 2);
  CHECK_THROWS_AS(interpolate(zero_kernel(2), cfg, beta), Error);
  try
  {
    interpolate(zero_kernel(2), cfg, beta);
  }
  catch (const Error &e)
  {
    CHECK(e.kind() == ErrorKind::Singular);
  }
  const TriKernel neg =
      with_certification(family_example1(3.0, 1.0, 1.0, 2), Certification::Negative);
  CHECK_THROWS_AS(interpolate(neg, cfg, beta), Error);
  CHECK_THROWS_AS(interpolate(gaussian_kernel(1.0, 1.0, 2), cfg, Eigen::MatrixXd::Ones(3, 2)),
                  Error);
  CHECK_THROWS_AS(interpolate(gaussian_kernel(1.0, 1.0, 3), cfg, beta), Error);
}

TEST_CASE("divergence and curl match fourth-order differences")
{
  std::mt19937_64 rng(41);
  for (int d : {2, 3})
  {
    for (const TriKernel &k :
         {gaussian_kernel(1.0, 1.0, d), cauchy_kernel(1.0, d), family_example1(1.5, 1.0, 1.0, d),
          family_example2(1.5, 1.0, 1.0, d), curl_free_gaussian(1.0, 1.0, d),
          div_free_gaussian(1.0, 1.0, d), bessel_kernel(1.0, 0.5 * d + 2.5, d)})
    {
      auto shared = std::make_shared<const TriKernel>(k);
      for (int t = 0; t < 20; ++t)
      {
        const Eigen::VectorXd alpha = oracle::random_vector(d, rng);
        Eigen::VectorXd x = oracle::random_vector(d, rng, -2.0, 2.0);
        if (x.norm() < 0.1)
        {
          x *= 0.5 / x.norm();
        }
        const KernelField f(shared, Eigen::MatrixXd::Zero(1, d), alpha.transpose());
        Eigen::MatrixXd jac(d, d);  // jac(i, j) = ∂v_i/∂x_j
        for (int j = 0; j < d; ++j)
        {
          jac.col(j) = fd4(f, x, j, 1e-3);
        }
        CHECK(std::fabs(divergence_at(k, x, alpha) - jac.trace()) <= 1e-6);
        if (d == 2)
        {
          const double curl = jac(1, 0) - jac(0, 1);
          CHECK(std::fabs(curl_2d(k, x, alpha) - curl) <= 1e-6);
          CHECK(std::fabs(std::fabs(curl_magnitude_at(k, x, alpha)) - std::fabs(curl)) <= 1e-6);
        }
        else
        {
          const Eigen::Vector3d curl(jac(2, 1) - jac(1, 2), jac(0, 2) - jac(2, 0),
                                     jac(1, 0) - jac(0, 1));
          CHECK((curl_3d(k, x, alpha) - curl).norm() <= 1e-6);
          CHECK(std::fabs(std::fabs(curl_magnitude_at(k, x, alpha)) - curl.norm()) <= 1e-6);
        }
      }
    }
  }
}

TEST_CASE("constructed kernels generate divergence-free or curl-free fields")
{
  std::mt19937_64 rng(43);
  for (int d : {2, 3})
  {
    const std::vector<TriKernel> df = {div_free_gaussian(1.0, 1.0, d),
                                       div_free_bessel(0.8, 0.5 * d + 2.5, d),
                                       family_example1(2.0 / (d - 1.0), 1.0, 1.0, d)};
    const std::vector<TriKernel> cf = {curl_free_gaussian(1.0, 1.0, d),
                                       curl_free_bessel(0.8, 0.5 * d + 2.5, d),
                                       family_example2(2.0, 1.0, 1.0, d)};
    for (int t = 0; t < 30; ++t)
    {
      const Eigen::VectorXd x = oracle::random_vector(d, rng, -2.5, 2.5);
      const Eigen::VectorXd alpha = oracle::random_vector(d, rng);
      for (const TriKernel &k : df)
      {
        CHECK(std::fabs(divergence_at(k, x, alpha)) <= 1e-10);
      }
      for (const TriKernel &k : cf)
      {
        CHECK(std::fabs(curl_magnitude_at(k, x, alpha)) <= 1e-10);
      }
    }
  }
  const TriKernel g = gaussian_kernel(1.0, 1.0, 2);
  CHECK_THROWS_AS(divergence_at(g, Eigen::Vector2d::Zero(), Eigen::Vector2d(1.0, 0.0)), Error);
  CHECK_THROWS_AS(curl_2d(gaussian_kernel(1.0, 1.0, 3), Eigen::Vector3d(1.0, 0.0, 0.0),
                          Eigen::Vector3d(1.0, 0.0, 0.0)),
                  Error);
  CHECK_THROWS_AS(curl_3d(g, Eigen::Vector2d(1.0, 0.0), Eigen::Vector2d(1.0, 0.0)), Error);
}

TEST_CASE("Example 1 single-landmark field vanishes at (0, ±sqrt(b/a))")
{
  const double a = 2.0, b = 1.0, c = 1.0;
  const TriKernel k = family_example1(a, b, c, 2);
  Eigen::MatrixXd centre = Eigen::MatrixXd::Zero(1, 2);
  Eigen::MatrixXd alpha(1, 2);
  alpha << 1.0, 0.0;
  const KernelField f = snapshot_field(k, LandmarkConfig(centre), alpha);
  for (double sign : {1.0, -1.0})
  {
    const Eigen::Vector2d z(0.0, sign * std::sqrt(b / a));
    CHECK(f(z).norm() < 1e-15);
    // Field circulates around the zero: nonzero curl there.
    CHECK(std::fabs(curl_2d(k, z, alpha.row(0).transpose())) > 0.1);
  }
  CHECK(f(Eigen::Vector2d(0.0, 0.5)).norm() > 0.1);
}

TEST_CASE("grid specs and field CSV")
{
  GridSpec g;
  g.lower = Eigen::Vector2d(-1.0, 0.0);
  g.upper = Eigen::Vector2d(1.0, 2.0);
  g.counts = {3, 5};
  g.validate(2);
  CHECK(g.size() == 15);
  CHECK(g.point(0).isApprox(Eigen::Vector2d(-1.0, 0.0)));
  CHECK(g.point(1).isApprox(Eigen::Vector2d(-1.0, 0.5)));
  CHECK(g.point(5).isApprox(Eigen::Vector2d(0.0, 0.0)));
  CHECK(g.point(14).isApprox(Eigen::Vector2d(1.0, 2.0)));
  CHECK_THROWS_AS(g.validate(3), Error);
  GridSpec bad = g;
  bad.counts = {1, 5};
  CHECK_THROWS_AS(bad.validate(2), Error);
  bad = g;
  bad.upper(0) = -2.0;
  CHECK_THROWS_AS(bad.validate(2), Error);

  const TriKernel k = gaussian_kernel(1.0, 1.0, 2);
  Eigen::MatrixXd centre(1, 2), alpha(1, 2);
  centre << 0.0, 1.0;
  alpha << 1.0, -1.0;
  const KernelField f = snapshot_field(k, LandmarkConfig(centre), alpha);
  std::ostringstream os;
  write_field_csv(os, f, g);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "x1,x2,v1,v2");
  int rows = 0;
  while (std::getline(is, line))
  {
    ++rows;
  }
  CHECK(rows == 15);
}

// SPDX-License-Identifier: Apache-2.0

#include "trik/fields.hpp"

#include <cmath>
#include <sstream>

#include "trik/csv.hpp"
#include "trik/error.hpp"

namespace trik
{

LandmarkConfig::LandmarkConfig(Eigen::MatrixXd pts) : points(std::move(pts))
{
  if (points.cols() < 1)
  {
    throw Error(ErrorKind::InvalidArgument, "LandmarkConfig: points need at least one coordinate");
  }
  if (!points.allFinite())
  {
    throw Error(ErrorKind::InvalidArgument, "LandmarkConfig: non-finite coordinates");
  }
  for (int a = 0; a < points.rows(); ++a)
  {
    for (int b = a + 1; b < points.rows(); ++b)
    {
      if ((points.row(a) - points.row(b)).norm() <= kMinLandmarkSeparation)
      {
        throw Error(ErrorKind::InvalidArgument, "LandmarkConfig: landmarks " + std::to_string(a) +
                                                    " and " + std::to_string(b) +
                                                    " coincide");
      }
    }
  }
}

BlockKernelMatrix assemble_block_matrix(const TriKernel &k, const LandmarkConfig &cfg)
{
  if (cfg.dim() != k.dim)
  {
    throw Error(ErrorKind::DimensionMismatch,
                "assemble_block_matrix: landmark dimension does not match kernel dimension");
  }
  const int n = cfg.size(), d = k.dim;
  BlockKernelMatrix out;
  out.n_landmarks = n;
  out.dim = d;
  out.matrix.resize(n * d, n * d);
  for (int a = 0; a < n; ++a)
  {
    out.matrix.block(a * d, a * d, d, d) = k.k0 * Eigen::MatrixXd::Identity(d, d);
    for (int b = a + 1; b < n; ++b)
    {
      const Eigen::VectorXd x = (cfg.points.row(a) - cfg.points.row(b)).transpose();
      const Eigen::MatrixXd m = eval_matrix(k, x);
      out.matrix.block(a * d, b * d, d, d) = m;
      out.matrix.block(b * d, a * d, d, d) = m;
    }
  }
  return out;
}

KernelField::KernelField(std::shared_ptr<const TriKernel> k, Eigen::MatrixXd centers,
                         MomentaSet momenta)
    : kernel_(std::move(k)), centers_(std::move(centers)), momenta_(std::move(momenta))
{
  if (centers_.rows() != momenta_.rows() || centers_.cols() != momenta_.cols() ||
      centers_.cols() != kernel_->dim)
  {
    throw Error(ErrorKind::DimensionMismatch, "KernelField: centers, momenta and kernel disagree");
  }
}

Eigen::VectorXd KernelField::operator()(const Eigen::VectorXd &y) const
{
  const int d = kernel_->dim;
  if (y.size() != d)
  {
    throw Error(ErrorKind::DimensionMismatch, "KernelField: point has the wrong dimension");
  }
  Eigen::VectorXd out = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd x(d), alpha(d);
  for (int b = 0; b < centers_.rows(); ++b)
  {
    x = y - centers_.row(b).transpose();
    alpha = momenta_.row(b).transpose();
    apply_kernel(*kernel_, {x.data(), static_cast<std::size_t>(d)},
                 {alpha.data(), static_cast<std::size_t>(d)},
                 {out.data(), static_cast<std::size_t>(d)});
  }
  return out;
}

KernelField snapshot_field(const TriKernel &k, const LandmarkConfig &cfg, const MomentaSet &momenta)
{
  if (momenta.rows() != cfg.size() || momenta.cols() != cfg.dim())
  {
    throw Error(ErrorKind::DimensionMismatch,
                "snapshot_field: momenta do not match the landmark configuration");
  }
  return KernelField(std::make_shared<const TriKernel>(k), cfg.points, momenta);
}

InterpolationResult interpolate(const TriKernel &k, const LandmarkConfig &cfg,
                                const MomentaSet &targets)
{
  if (k.certification == Certification::Negative)
  {
    throw Error(ErrorKind::InvalidArgument, "interpolate: kernel is certified not positive definite");
  }
  if (targets.rows() != cfg.size() || targets.cols() != cfg.dim())
  {
    throw Error(ErrorKind::DimensionMismatch,
                "interpolate: targets do not match the landmark configuration");
  }
  const BlockKernelMatrix km = assemble_block_matrix(k, cfg);
  const int n = cfg.size(), d = cfg.dim();
  // Row-major flattening: entry a*d + i is component i of landmark a.
  Eigen::VectorXd beta(n * d);
  for (int a = 0; a < n; ++a)
  {
    beta.segment(a * d, d) = targets.row(a).transpose();
  }

  bool jitter_applied = false;
  double jitter = 0.0;
  Eigen::LLT<Eigen::MatrixXd> llt(km.matrix);
  if (llt.info() != Eigen::Success)
  {
    jitter = 1e-12 * km.matrix.trace() / (n * d);
    jitter_applied = true;
    llt.compute(km.matrix + jitter * Eigen::MatrixXd::Identity(n * d, n * d));
    if (llt.info() != Eigen::Success)
    {
      const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(km.matrix, Eigen::EigenvaluesOnly);
      const auto &ev = es.eigenvalues();
      std::ostringstream msg;
      msg << "interpolate: kernel matrix is not numerically positive definite (eigenvalues in ["
          << ev.minCoeff() << ", " << ev.maxCoeff() << "], condition estimate "
          << std::abs(ev.maxCoeff() / ev.minCoeff())
          << "); landmarks may be coalescing or the kernel is not strictly positive definite";
      throw Error(ErrorKind::Singular, msg.str());
    }
  }
  const Eigen::VectorXd alpha = llt.solve(beta);
  MomentaSet momenta(n, d);
  for (int a = 0; a < n; ++a)
  {
    momenta.row(a) = alpha.segment(a * d, d).transpose();
  }
  InterpolationResult res{momenta, snapshot_field(k, cfg, momenta), alpha.dot(beta),
                          jitter_applied, jitter};
  return res;
}

namespace
{

void check_point(const TriKernel &k, const Eigen::VectorXd &x, const Eigen::VectorXd &alpha,
                 const char *who)
{
  if (x.size() != k.dim || alpha.size() != k.dim)
  {
    throw Error(ErrorKind::DimensionMismatch, std::string(who) + ": wrong vector dimension");
  }
  if (!(x.norm() > kZeroThreshold))
  {
    throw Error(ErrorKind::Singular, std::string(who) + ": undefined at the origin");
  }
}

// (k∥-k⊥)/r - dk⊥/dr.
double curl_factor(const TriKernel &k, double r)
{
  return r * ktilde(k, r) - k.dk_perp(r);
}

}  // namespace

double divergence_at(const TriKernel &k, const Eigen::VectorXd &x, const Eigen::VectorXd &alpha)
{
  check_point(k, x, alpha, "divergence_at");
  const double r = x.norm();
  return alpha.dot(x) / r * ((k.dim - 1.0) * r * ktilde(k, r) + k.dk_par(r));
}

double curl_magnitude_at(const TriKernel &k, const Eigen::VectorXd &x,
                         const Eigen::VectorXd &alpha)
{
  check_point(k, x, alpha, "curl_magnitude_at");
  const double r = x.norm();
  // ‖α∧x‖² = ‖α‖²‖x‖² - (α·x)².
  const double ax = alpha.dot(x);
  const double wedge = std::sqrt(std::max(0.0, alpha.squaredNorm() * x.squaredNorm() - ax * ax));
  return curl_factor(k, r) * wedge / r;
}

double curl_2d(const TriKernel &k, const Eigen::VectorXd &x, const Eigen::VectorXd &alpha)
{
  check_point(k, x, alpha, "curl_2d");
  if (k.dim != 2)
  {
    throw Error(ErrorKind::DimensionMismatch, "curl_2d: kernel must be two-dimensional");
  }
  const double r = x.norm();
  return (alpha[0] * x[1] - alpha[1] * x[0]) / r * curl_factor(k, r);
}

Eigen::Vector3d curl_3d(const TriKernel &k, const Eigen::VectorXd &x,
                        const Eigen::VectorXd &alpha)
{
  check_point(k, x, alpha, "curl_3d");
  if (k.dim != 3)
  {
    throw Error(ErrorKind::DimensionMismatch, "curl_3d: kernel must be three-dimensional");
  }
  const double r = x.norm();
  const Eigen::Vector3d a = alpha.head<3>(), y = x.head<3>();
  return a.cross(y) * (curl_factor(k, r) / r);
}

void GridSpec::validate(int dim) const
{
  if (lower.size() != dim || upper.size() != dim || static_cast<int>(counts.size()) != dim)
  {
    throw Error(ErrorKind::DimensionMismatch, "grid: box and counts must match the dimension");
  }
  for (int i = 0; i < dim; ++i)
  {
    if (counts[i] < 2 || !(upper[i] > lower[i]))
    {
      throw Error(ErrorKind::InvalidArgument,
                  "grid: each axis needs >= 2 points and upper > lower");
    }
  }
}

std::size_t GridSpec::size() const
{
  std::size_t n = 1;
  for (int c : counts)
  {
    n *= static_cast<std::size_t>(c);
  }
  return n;
}

Eigen::VectorXd GridSpec::point(std::size_t flat_index) const
{
  const int d = static_cast<int>(counts.size());
  Eigen::VectorXd p(d);
  for (int i = d - 1; i >= 0; --i)
  {
    const std::size_t j = flat_index % counts[i];
    flat_index /= counts[i];
    p[i] = lower[i] + (upper[i] - lower[i]) * static_cast<double>(j) / (counts[i] - 1.0);
  }
  return p;
}

void write_field_csv(std::ostream &os, const KernelField &field, const GridSpec &grid)
{
  const int d = field.dim();
  grid.validate(d);
  std::vector<std::string> header;
  for (int i = 1; i <= d; ++i)
  {
    header.push_back("x" + std::to_string(i));
  }
  for (int i = 1; i <= d; ++i)
  {
    header.push_back("v" + std::to_string(i));
  }
  write_csv_header(os, header);
  std::vector<double> row(2 * d);
  for (std::size_t n = 0; n < grid.size(); ++n)
  {
    const Eigen::VectorXd p = grid.point(n);
    const Eigen::VectorXd v = field(p);
    for (int i = 0; i < d; ++i)
    {
      row[i] = p[i];
      row[d + i] = v[i];
    }
    write_csv_row(os, row);
  }
}

}  // namespace trik

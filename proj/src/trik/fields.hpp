// SPDX-License-Identifier: Apache-2.0

#ifndef TRIK_FIELDS_HPP
#define TRIK_FIELDS_HPP

#include <memory>
#include <ostream>
#include <vector>

#include <Eigen/Dense>

#include "trik/kernel.hpp"

namespace trik
{

inline constexpr double kMinLandmarkSeparation = 1e-9;

// N pairwise-distinct points in R^d, stored as rows.
struct LandmarkConfig
{
  Eigen::MatrixXd points;

  LandmarkConfig() = default;
  // Throws InvalidArgument when two points are closer than kMinLandmarkSeparation.
  explicit LandmarkConfig(Eigen::MatrixXd pts);

  int dim() const { return static_cast<int>(points.cols()); }
  int size() const { return static_cast<int>(points.rows()); }
};

// Momenta: one row per landmark.
using MomentaSet = Eigen::MatrixXd;

struct BlockKernelMatrix
{
  int n_landmarks = 0;
  int dim = 0;
  Eigen::MatrixXd matrix;  // (N d) x (N d), block (a, b) = k(x_a - x_b)
};

BlockKernelMatrix assemble_block_matrix(const TriKernel &k, const LandmarkConfig &cfg);

// y ↦ Σ_b k(y - x_b) α_b. Holds immutable shared data; copies are cheap.
class KernelField
{
public:
  KernelField(std::shared_ptr<const TriKernel> k, Eigen::MatrixXd centers, MomentaSet momenta);

  Eigen::VectorXd operator()(const Eigen::VectorXd &y) const;
  int dim() const { return kernel_->dim; }
  const TriKernel &kernel() const { return *kernel_; }
  const Eigen::MatrixXd &centers() const { return centers_; }
  const MomentaSet &momenta() const { return momenta_; }

private:
  std::shared_ptr<const TriKernel> kernel_;
  Eigen::MatrixXd centers_;
  MomentaSet momenta_;
};

KernelField snapshot_field(const TriKernel &k, const LandmarkConfig &cfg, const MomentaSet &momenta);

struct InterpolationResult
{
  MomentaSet momenta;
  KernelField field;
  double norm_sq = 0.0;
  bool jitter_applied = false;
  double jitter = 0.0;
};

// Solves K(x) α = β by Cholesky; one retry with diagonal jitter 1e-12 trace/(N d). Throws
// Singular (with a condition estimate in the message) if both attempts fail.
InterpolationResult interpolate(const TriKernel &k, const LandmarkConfig &cfg,
                                const MomentaSet &targets);

// div(k(·)α) at x.
double divergence_at(const TriKernel &k, const Eigen::VectorXd &x, const Eigen::VectorXd &alpha);
// [(k∥-k⊥)/r - dk⊥/dr] ‖α∧x‖/r.
double curl_magnitude_at(const TriKernel &k, const Eigen::VectorXd &x,
                         const Eigen::VectorXd &alpha);
// ∂1 v2 - ∂2 v1 of v = k(·)α (d = 2).
double curl_2d(const TriKernel &k, const Eigen::VectorXd &x, const Eigen::VectorXd &alpha);
// ∇ × (k(·)α) (d = 3).
Eigen::Vector3d curl_3d(const TriKernel &k, const Eigen::VectorXd &x,
                        const Eigen::VectorXd &alpha);

// Regular lattice over a box: counts[i] points from lower[i] to upper[i] inclusive.
struct GridSpec
{
  Eigen::VectorXd lower, upper;
  std::vector<int> counts;

  void validate(int dim) const;
  std::size_t size() const;
  Eigen::VectorXd point(std::size_t flat_index) const;  // last axis varies fastest
};

// Rows x_1..x_d, v_1..v_d.
void write_field_csv(std::ostream &os, const KernelField &field, const GridSpec &grid);

}  // namespace trik

#endif  // TRIK_FIELDS_HPP

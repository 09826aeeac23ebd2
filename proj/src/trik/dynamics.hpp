// SPDX-License-Identifier: Apache-2.0

#ifndef TRIK_DYNAMICS_HPP
#define TRIK_DYNAMICS_HPP

#include <istream>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "trik/fields.hpp"
#include "trik/kernel.hpp"

namespace trik
{

inline constexpr double kCoalescenceDistance = 1e-6;

// Positions and momenta, one landmark per row.
struct PhaseState
{
  Eigen::MatrixXd q, p;
  double t = 0.0;
};

struct Trajectory
{
  std::vector<PhaseState> states;
  double step = 0.0;
  std::vector<double> hamiltonian_series;
};

enum class Scheme
{
  RK4,
  Euler,
};

struct IntegratorConfig
{
  Scheme scheme = Scheme::RK4;
  double step = 1e-3;
  int record_every = 1;

  void validate() const;
};

double hamiltonian(const TriKernel &k, const PhaseState &s);

// (dq, dp) of Hamilton's equations. Throws Coalescence when two landmarks are closer than
// kCoalescenceDistance.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> hamilton_rhs(const TriKernel &k, const PhaseState &s);

// Integrates from t = 0 to 1 with ceil(1/step) equal steps.
Trajectory shoot(const TriKernel &k, const LandmarkConfig &q0, const MomentaSet &p0,
                 const IntegratorConfig &cfg = {});

// Trapezoid rule for ∫₀¹ p·K(q) p dt over the recorded samples.
double path_energy(const TriKernel &k, const Trajectory &traj);

struct FlowGrid
{
  GridSpec spec;
  Eigen::MatrixXd original;     // one lattice point per row
  Eigen::MatrixXd transported;  // same order
  std::vector<double> jacobian_det;  // differences over lattice neighbours
  std::vector<double> tangent_det;   // det of the integrated tangent map Dφ

  double max_det_deviation() const;  // max |det - 1| over jacobian_det
  double max_tangent_deviation() const;
};

// Advects the lattice with the time-dependent field of the trajectory, together with the tangent
// map dJ/dt = Dv J at each lattice point.
FlowGrid flow_grid(const TriKernel &k, const Trajectory &traj, const GridSpec &grid,
                   const IntegratorConfig &cfg = {});

struct FanResult
{
  std::vector<double> params;
  std::vector<Trajectory> trajectories;  // empty states where the shoot failed
  std::vector<std::string> errors;       // empty string on success
};

// One shoot per momentum sample; failures are recorded and the fan continues.
FanResult exp_map_fan(const TriKernel &k, const LandmarkConfig &q0,
                      const std::vector<double> &params, const std::vector<MomentaSet> &momenta,
                      const IntegratorConfig &cfg = {});

// Columns t, q{a}_{i}, p{a}_{i}, H with 1-based landmark and axis indices.
void write_trajectory_csv(std::ostream &os, const Trajectory &traj);
Trajectory read_trajectory_csv(std::istream &is);

// Columns x{i}, y{i} (original and transported coordinates), det, tangent_det.
void write_flow_grid_csv(std::ostream &os, const FlowGrid &grid);

}  // namespace trik

#endif  // TRIK_DYNAMICS_HPP

// SPDX-License-Identifier: Apache-2.0

#include "trik/dynamics.hpp"

#include <cmath>
#include <sstream>

#include "trik/csv.hpp"
#include "trik/error.hpp"

namespace trik
{

namespace
{

std::span<const double> row_span(const Eigen::VectorXd &v)
{
  return {v.data(), static_cast<std::size_t>(v.size())};
}

void check_state(const TriKernel &k, const PhaseState &s)
{
  if (s.q.cols() != k.dim || s.p.cols() != k.dim || s.q.rows() != s.p.rows())
  {
    throw Error(ErrorKind::DimensionMismatch, "phase state does not match the kernel dimension");
  }
}

// Index of the first landmark pair closer than the coalescence distance, or (-1, -1).
std::pair<int, int> closest_violation(const Eigen::MatrixXd &q)
{
  for (int a = 0; a < q.rows(); ++a)
  {
    for (int b = a + 1; b < q.rows(); ++b)
    {
      if ((q.row(a) - q.row(b)).norm() < kCoalescenceDistance)
      {
        return {a, b};
      }
    }
  }
  return {-1, -1};
}

PhaseState axpy(const PhaseState &s, double h, const Eigen::MatrixXd &dq, const Eigen::MatrixXd &dp)
{
  return {s.q + h * dq, s.p + h * dp, s.t + h};
}

PhaseState step_once(const TriKernel &k, const PhaseState &s, double h, Scheme scheme)
{
  const auto [q1, p1] = hamilton_rhs(k, s);
  if (scheme == Scheme::Euler)
  {
    return axpy(s, h, q1, p1);
  }
  const auto [q2, p2] = hamilton_rhs(k, axpy(s, 0.5 * h, q1, p1));
  const auto [q3, p3] = hamilton_rhs(k, axpy(s, 0.5 * h, q2, p2));
  const auto [q4, p4] = hamilton_rhs(k, axpy(s, h, q3, p3));
  PhaseState out;
  out.q = s.q + h / 6.0 * (q1 + 2.0 * q2 + 2.0 * q3 + q4);
  out.p = s.p + h / 6.0 * (p1 + 2.0 * p2 + 2.0 * p3 + p4);
  out.t = s.t + h;
  return out;
}

int step_count(double step)
{
  return static_cast<int>(std::ceil(1.0 / step - 1e-9));
}

// (q, p) at time t, linear between recorded samples.
PhaseState interpolate_state(const Trajectory &traj, double t)
{
  const auto &st = traj.states;
  if (t <= st.front().t)
  {
    return st.front();
  }
  if (t >= st.back().t)
  {
    return st.back();
  }
  std::size_t lo = 0, hi = st.size() - 1;
  while (hi - lo > 1)
  {
    const std::size_t mid = (lo + hi) / 2;
    (st[mid].t <= t ? lo : hi) = mid;
  }
  const double w = (t - st[lo].t) / (st[hi].t - st[lo].t);
  return {(1.0 - w) * st[lo].q + w * st[hi].q, (1.0 - w) * st[lo].p + w * st[hi].p, t};
}

}  // namespace

void IntegratorConfig::validate() const
{
  if (!(step > 0.0) || step > 0.1)
  {
    throw Error(ErrorKind::InvalidArgument, "integrator: step must lie in (0, 0.1]");
  }
  if (record_every < 1)
  {
    throw Error(ErrorKind::InvalidArgument, "integrator: record_every must be >= 1");
  }
}

double hamiltonian(const TriKernel &k, const PhaseState &s)
{
  check_state(k, s);
  const int n = static_cast<int>(s.q.rows()), d = k.dim;
  double h = 0.0;
  Eigen::VectorXd x(d), pb(d), pa(d), kp(d);
  for (int a = 0; a < n; ++a)
  {
    pa = s.p.row(a).transpose();
    h += 0.5 * k.k0 * pa.squaredNorm();
    for (int b = a + 1; b < n; ++b)
    {
      x = (s.q.row(a) - s.q.row(b)).transpose();
      pb = s.p.row(b).transpose();
      kp.setZero();
      apply_kernel(k, row_span(x), row_span(pb), {kp.data(), static_cast<std::size_t>(d)});
      h += pa.dot(kp);  // both (a, b) and (b, a) terms
    }
  }
  return h;
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> hamilton_rhs(const TriKernel &k, const PhaseState &s)
{
  check_state(k, s);
  const int n = static_cast<int>(s.q.rows()), d = k.dim;
  if (const auto [a, b] = closest_violation(s.q); a >= 0)
  {
    std::ostringstream msg;
    msg << "landmarks " << a + 1 << " and " << b + 1 << " coalesced at t = " << s.t;
    throw Error(ErrorKind::Coalescence, msg.str());
  }
  Eigen::MatrixXd dq = k.k0 * s.p;
  Eigen::MatrixXd dp = Eigen::MatrixXd::Zero(n, d);
  Eigen::VectorXd x(d), pa(d), pb(d), kp(d), g(d);
  const auto span_of = [d](Eigen::VectorXd &v) {
    return std::span<double>(v.data(), static_cast<std::size_t>(d));
  };
  for (int a = 0; a < n; ++a)
  {
    pa = s.p.row(a).transpose();
    for (int b = a + 1; b < n; ++b)
    {
      x = (s.q.row(a) - s.q.row(b)).transpose();
      pb = s.p.row(b).transpose();
      // k(x) is symmetric and even, so the (b, a) term is k(x) p_a.
      kp.setZero();
      apply_kernel(k, row_span(x), row_span(pb), span_of(kp));
      dq.row(a) += kp.transpose();
      kp.setZero();
      apply_kernel(k, row_span(x), row_span(pa), span_of(kp));
      dq.row(b) += kp.transpose();
      // p_a·∂k(x)p_b = p_b·∂k(x)p_a, and ∂k(-x) = -∂k(x).
      contract_gradient(k, row_span(x), row_span(pa), row_span(pb), span_of(g));
      dp.row(a) -= g.transpose();
      dp.row(b) += g.transpose();
    }
  }
  return {std::move(dq), std::move(dp)};
}

Trajectory shoot(const TriKernel &k, const LandmarkConfig &q0, const MomentaSet &p0,
                 const IntegratorConfig &cfg)
{
  cfg.validate();
  if (q0.dim() != k.dim || p0.rows() != q0.size() || p0.cols() != k.dim)
  {
    throw Error(ErrorKind::DimensionMismatch, "shoot: landmarks, momenta and kernel disagree");
  }
  const int n = step_count(cfg.step);
  const double h = 1.0 / n;
  Trajectory traj;
  traj.step = h;
  PhaseState s{q0.points, p0, 0.0};
  traj.states.push_back(s);
  traj.hamiltonian_series.push_back(hamiltonian(k, s));
  for (int i = 1; i <= n; ++i)
  {
    s = step_once(k, s, h, cfg.scheme);
    s.t = i * h;
    if (i % cfg.record_every == 0 || i == n)
    {
      traj.states.push_back(s);
      traj.hamiltonian_series.push_back(hamiltonian(k, s));
    }
  }
  return traj;
}

double path_energy(const TriKernel &k, const Trajectory &traj)
{
  if (traj.states.empty())
  {
    return 0.0;
  }
  auto integrand = [&k](const PhaseState &s) {
    const BlockKernelMatrix km = assemble_block_matrix(k, LandmarkConfig(s.q));
    const Eigen::MatrixXd pt = s.p.transpose();
    const Eigen::Map<const Eigen::VectorXd> p(pt.data(), pt.size());
    return p.dot(km.matrix * p);
  };
  double sum = 0.0;
  double prev = integrand(traj.states.front());
  for (std::size_t i = 1; i < traj.states.size(); ++i)
  {
    const double cur = integrand(traj.states[i]);
    sum += 0.5 * (prev + cur) * (traj.states[i].t - traj.states[i - 1].t);
    prev = cur;
  }
  return sum;
}

double FlowGrid::max_det_deviation() const
{
  double m = 0.0;
  for (double v : jacobian_det)
  {
    m = std::max(m, std::abs(v - 1.0));
  }
  return m;
}

double FlowGrid::max_tangent_deviation() const
{
  double m = 0.0;
  for (double v : tangent_det)
  {
    m = std::max(m, std::abs(v - 1.0));
  }
  return m;
}

namespace
{

// Stack-allocated small vectors and matrices when the dimension is bounded by MaxD.
template <int MaxD>
using SmallVec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, MaxD, 1>;
template <int MaxD>
using SmallMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, MaxD, MaxD>;

// v(y) and Dv(y) for the field of state s.
template <int MaxD>
void velocity_and_gradient(const TriKernel &k, const PhaseState &s, const SmallVec<MaxD> &y,
                           SmallVec<MaxD> &v, SmallMat<MaxD> &dv)
{
  const int d = k.dim;
  v.setZero(d);
  dv.setZero(d, d);
  SmallVec<MaxD> x(d), p(d), u(d);
  for (int b = 0; b < s.q.rows(); ++b)
  {
    x = y - s.q.row(b).transpose();
    p = s.p.row(b).transpose();
    const double r = x.norm();
    if (!(r > kZeroThreshold))
    {
      v += k.k0 * p;
      continue;
    }
    u = x / r;
    const double kperp = k.k_perp(r), kt = ktilde(k, r);
    const double dpar = k.dk_par(r), dperp = k.dk_perp(r);
    const double up = u.dot(p);
    v += kperp * p + kt * r * r * up * u;
    // ∂_j v_i = k⊥' p_i u_j + [(k∥' - k⊥') - 2 r k̃] (u·p) u_i u_j + r k̃ (u_i p_j + (u·p) δ_ij).
    dv.noalias() += dperp * p * u.transpose();
    dv.noalias() += ((dpar - dperp) - 2.0 * r * kt) * up * u * u.transpose();
    dv.noalias() += r * kt * u * p.transpose();
    dv.diagonal().array() += r * kt * up;
  }
}

// RK4 (or Euler) advection of every row of `pos` with its tangent map; returns det of the
// tangent maps.
template <int MaxD>
std::vector<double> advect(const TriKernel &k, const Trajectory &traj, Eigen::MatrixXd &pos,
                           int n, Scheme scheme)
{
  const int d = k.dim;
  const std::size_t m = static_cast<std::size_t>(pos.rows());
  const double h = 1.0 / n;
  std::vector<SmallMat<MaxD>> tangent(m, SmallMat<MaxD>::Identity(d, d));
  SmallVec<MaxD> y(d), v1(d), v2(d), v3(d), v4(d);
  SmallMat<MaxD> g1(d, d), g2(d, d), g3(d, d), g4(d, d), j1(d, d), j2(d, d), j3(d, d), j4(d, d);
  for (int s = 0; s < n; ++s)
  {
    const double t = s * h;
    const PhaseState a = interpolate_state(traj, t);
    const PhaseState b = interpolate_state(traj, t + 0.5 * h);
    const PhaseState c = interpolate_state(traj, t + h);
    for (std::size_t i = 0; i < m; ++i)
    {
      const auto row = static_cast<Eigen::Index>(i);
      y = pos.row(row).transpose();
      SmallMat<MaxD> &J = tangent[i];
      velocity_and_gradient<MaxD>(k, a, y, v1, g1);
      if (scheme == Scheme::Euler)
      {
        pos.row(row) += h * v1.transpose();
        j1.noalias() = g1 * J;
        J += h * j1;
        continue;
      }
      j1.noalias() = g1 * J;
      velocity_and_gradient<MaxD>(k, b, y + 0.5 * h * v1, v2, g2);
      j2.noalias() = g2 * (J + 0.5 * h * j1);
      velocity_and_gradient<MaxD>(k, b, y + 0.5 * h * v2, v3, g3);
      j3.noalias() = g3 * (J + 0.5 * h * j2);
      velocity_and_gradient<MaxD>(k, c, y + h * v3, v4, g4);
      j4.noalias() = g4 * (J + h * j3);
      pos.row(row) += (h / 6.0 * (v1 + 2.0 * v2 + 2.0 * v3 + v4)).transpose();
      J += h / 6.0 * (j1 + 2.0 * j2 + 2.0 * j3 + j4);
    }
  }
  std::vector<double> dets(m);
  for (std::size_t i = 0; i < m; ++i)
  {
    dets[i] = tangent[i].determinant();
  }
  return dets;
}

}  // namespace

FlowGrid flow_grid(const TriKernel &k, const Trajectory &traj, const GridSpec &grid,
                   const IntegratorConfig &cfg)
{
  cfg.validate();
  grid.validate(k.dim);
  if (traj.states.size() < 2)
  {
    throw Error(ErrorKind::InvalidArgument, "flow_grid: trajectory needs at least two samples");
  }
  if (traj.states.front().q.cols() != k.dim)
  {
    throw Error(ErrorKind::DimensionMismatch, "flow_grid: trajectory dimension differs from kernel");
  }
  const int d = k.dim;
  const std::size_t m = grid.size();
  FlowGrid out;
  out.spec = grid;
  out.original.resize(static_cast<Eigen::Index>(m), d);
  for (std::size_t i = 0; i < m; ++i)
  {
    out.original.row(static_cast<Eigen::Index>(i)) = grid.point(i).transpose();
  }
  out.transported = out.original;
  const int n = step_count(cfg.step);
  out.tangent_det = d <= 3 ? advect<3>(k, traj, out.transported, n, cfg.scheme)
                           : advect<Eigen::Dynamic>(k, traj, out.transported, n, cfg.scheme);

  // Differences over lattice neighbours: central inside, second-order one-sided at the edges.
  // Strides follow GridSpec::point (last axis fastest).
  std::vector<std::size_t> stride(d, 1);
  for (int ax = d - 2; ax >= 0; --ax)
  {
    stride[ax] = stride[ax + 1] * static_cast<std::size_t>(grid.counts[ax + 1]);
  }
  out.jacobian_det.resize(m);
  Eigen::MatrixXd jac(d, d);
  auto pos = [&out](std::size_t i) {
    return Eigen::VectorXd(out.transported.row(static_cast<Eigen::Index>(i)).transpose());
  };
  for (std::size_t i = 0; i < m; ++i)
  {
    for (int ax = 0; ax < d; ++ax)
    {
      const std::size_t j = (i / stride[ax]) % static_cast<std::size_t>(grid.counts[ax]);
      const std::size_t last = static_cast<std::size_t>(grid.counts[ax]) - 1;
      const double spacing = (grid.upper[ax] - grid.lower[ax]) / static_cast<double>(last);
      const std::size_t st = stride[ax];
      if (j > 0 && j < last)
      {
        jac.col(ax) = (pos(i + st) - pos(i - st)) / (2.0 * spacing);
      }
      else if (last < 2)
      {
        jac.col(ax) = (j == 0 ? pos(i + st) - pos(i) : pos(i) - pos(i - st)) / spacing;
      }
      else if (j == 0)
      {
        jac.col(ax) = (-3.0 * pos(i) + 4.0 * pos(i + st) - pos(i + 2 * st)) / (2.0 * spacing);
      }
      else
      {
        jac.col(ax) = (3.0 * pos(i) - 4.0 * pos(i - st) + pos(i - 2 * st)) / (2.0 * spacing);
      }
    }
    out.jacobian_det[i] = jac.determinant();
  }
  return out;
}

FanResult exp_map_fan(const TriKernel &k, const LandmarkConfig &q0,
                      const std::vector<double> &params, const std::vector<MomentaSet> &momenta,
                      const IntegratorConfig &cfg)
{
  if (params.size() != momenta.size())
  {
    throw Error(ErrorKind::DimensionMismatch, "exp_map_fan: one parameter per momentum sample");
  }
  FanResult out;
  out.params = params;
  for (const auto &p : momenta)
  {
    try
    {
      out.trajectories.push_back(shoot(k, q0, p, cfg));
      out.errors.emplace_back();
    }
    catch (const Error &e)
    {
      if (e.kind() != ErrorKind::Coalescence && e.kind() != ErrorKind::Singular)
      {
        throw;
      }
      out.trajectories.emplace_back();
      out.errors.emplace_back(e.what());
    }
  }
  return out;
}

void write_trajectory_csv(std::ostream &os, const Trajectory &traj)
{
  if (traj.states.empty())
  {
    throw Error(ErrorKind::InvalidArgument, "write_trajectory_csv: empty trajectory");
  }
  const int n = static_cast<int>(traj.states.front().q.rows());
  const int d = static_cast<int>(traj.states.front().q.cols());
  std::vector<std::string> header{"t"};
  for (const char *name : {"q", "p"})
  {
    for (int a = 1; a <= n; ++a)
    {
      for (int i = 1; i <= d; ++i)
      {
        header.push_back(std::string(name) + std::to_string(a) + "_" + std::to_string(i));
      }
    }
  }
  header.emplace_back("H");
  write_csv_header(os, header);
  std::vector<double> row;
  for (std::size_t s = 0; s < traj.states.size(); ++s)
  {
    const PhaseState &st = traj.states[s];
    row.assign(1, st.t);
    for (const Eigen::MatrixXd *m : {&st.q, &st.p})
    {
      for (int a = 0; a < n; ++a)
      {
        for (int i = 0; i < d; ++i)
        {
          row.push_back((*m)(a, i));
        }
      }
    }
    row.push_back(traj.hamiltonian_series[s]);
    write_csv_row(os, row);
  }
}

Trajectory read_trajectory_csv(std::istream &is)
{
  const CsvTable table = read_csv(is);
  const auto &h = table.header;
  if (h.size() < 4 || h.front() != "t" || h.back() != "H")
  {
    throw Error(ErrorKind::InvalidArgument, "trajectory csv: expected columns t, q.., p.., H");
  }
  const std::size_t coords = (h.size() - 2) / 2;
  // Dimension from the q1_* columns.
  int d = 0;
  while (static_cast<std::size_t>(d) < coords && h[1 + d].rfind("q1_", 0) == 0)
  {
    ++d;
  }
  if (d == 0 || coords % d != 0 || (h.size() - 2) % 2 != 0)
  {
    throw Error(ErrorKind::InvalidArgument, "trajectory csv: malformed header");
  }
  const int n = static_cast<int>(coords) / d;
  Trajectory traj;
  for (const auto &row : table.rows)
  {
    PhaseState s;
    s.t = row[0];
    s.q.resize(n, d);
    s.p.resize(n, d);
    for (int a = 0; a < n; ++a)
    {
      for (int i = 0; i < d; ++i)
      {
        s.q(a, i) = row[1 + a * d + i];
        s.p(a, i) = row[1 + coords + a * d + i];
      }
    }
    traj.states.push_back(std::move(s));
    traj.hamiltonian_series.push_back(row.back());
  }
  if (traj.states.size() >= 2)
  {
    traj.step = traj.states[1].t - traj.states[0].t;
  }
  return traj;
}

void write_flow_grid_csv(std::ostream &os, const FlowGrid &grid)
{
  const int d = static_cast<int>(grid.original.cols());
  std::vector<std::string> header;
  for (int i = 1; i <= d; ++i)
  {
    header.push_back("x" + std::to_string(i));
  }
  for (int i = 1; i <= d; ++i)
  {
    header.push_back("y" + std::to_string(i));
  }
  header.emplace_back("det");
  header.emplace_back("tangent_det");
  write_csv_header(os, header);
  std::vector<double> row(2 * d + 2);
  for (Eigen::Index r = 0; r < grid.original.rows(); ++r)
  {
    for (int i = 0; i < d; ++i)
    {
      row[i] = grid.original(r, i);
      row[d + i] = grid.transported(r, i);
    }
    row[2 * d] = grid.jacobian_det[static_cast<std::size_t>(r)];
    row[2 * d + 1] = grid.tangent_det[static_cast<std::size_t>(r)];
    write_csv_row(os, row);
  }
}

}  // namespace trik

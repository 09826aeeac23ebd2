// SPDX-License-Identifier: Apache-2.0

#include "commands.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "svg.hpp"

namespace trik_cli
{

namespace
{

using Points = std::vector<double>;

constexpr const char *kColors[] = {"#000000", "#c0392b", "#1f5fbf", "#2e8b57", "#8e44ad",
                                   "#d35400"};

const char *color_of(std::size_t i)
{
  return kColors[i % (sizeof(kColors) / sizeof(kColors[0]))];
}

// Owning wrapper for C handles filled through an out-parameter.
template <typename T, void (*Destroy)(T *)>
struct Owned
{
  std::unique_ptr<T, void (*)(T *)> ptr{nullptr, Destroy};
  T *raw = nullptr;

  T *get() const { return ptr.get(); }
  T **out() { return &raw; }
  void adopt()
  {
    ptr.reset(raw);
    raw = nullptr;
  }
};

using Trajectory = Owned<trik_trajectory, trik_trajectory_destroy>;
using FlowGrid = Owned<trik_flow_grid, trik_flow_grid_destroy>;
using Fan = Owned<trik_fan, trik_fan_destroy>;
using Hodge = Owned<trik_hodge, trik_hodge_destroy>;
using Kernel = Owned<trik_kernel, trik_kernel_destroy>;

std::filesystem::path artifact(const Context &ctx, const std::string &prefix,
                               const std::string &suffix)
{
  return ctx.out_dir / (prefix + suffix);
}

void note_written(const Context &ctx, const std::filesystem::path &p)
{
  *ctx.out << "wrote " << p.string() << "\n";
}

int print_effective(const Context &ctx, const json &eff)
{
  *ctx.out << eff.dump(2) << "\n";
  return kExitOk;
}

std::vector<double> grid_points(const GridBlock &g)
{
  const int d = static_cast<int>(g.counts.size());
  std::size_t total = 1;
  for (int c : g.counts)
  {
    total *= static_cast<std::size_t>(c);
  }
  std::vector<double> pts(total * d);
  for (std::size_t n = 0; n < total; ++n)
  {
    std::size_t idx = n;
    for (int i = d - 1; i >= 0; --i)
    {
      const std::size_t j = idx % g.counts[i];
      idx /= g.counts[i];
      pts[n * d + i] =
          g.lower[i] + (g.upper[i] - g.lower[i]) * static_cast<double>(j) / (g.counts[i] - 1.0);
    }
  }
  return pts;
}

std::vector<double> spaced(double lo, double hi, int n, bool log_spacing)
{
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i)
  {
    const double t = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
    g[i] = log_spacing ? lo * std::pow(hi / lo, t) : lo + (hi - lo) * t;
  }
  return g;
}

void write_columns(const std::filesystem::path &path, const std::vector<std::string> &header,
                   const std::vector<const std::vector<double> *> &cols)
{
  std::ofstream os(path);
  if (!os)
  {
    input_error("cannot open '" + path.string() + "' for writing");
  }
  for (std::size_t i = 0; i < header.size(); ++i)
  {
    os << (i ? "," : "") << header[i];
  }
  os << "\n";
  const std::size_t n = cols.empty() ? 0 : cols.front()->size();
  for (std::size_t r = 0; r < n; ++r)
  {
    for (std::size_t c = 0; c < cols.size(); ++c)
    {
      os << (c ? "," : "") << format_double((*cols[c])[r]);
    }
    os << "\n";
  }
  if (!os)
  {
    input_error("write failed: " + path.string());
  }
}

// Line chart of named series over a shared abscissa.
void save_series_svg(const std::filesystem::path &path, const std::string &title,
                     const std::vector<double> &x,
                     const std::vector<std::pair<std::string, const std::vector<double> *>> &ys)
{
  double lo = 0.0, hi = 0.0;
  for (const auto &[name, y] : ys)
  {
    for (double v : *y)
    {
      if (std::isfinite(v))
      {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
  }
  if (!(hi > lo))
  {
    hi = lo + 1.0;
  }
  const double pad = 0.05 * (hi - lo);
  Svg svg(x.front(), x.back(), lo - pad, hi + pad, 800);
  svg.title(title);
  svg.frame();
  svg.line(x.front(), 0.0, x.back(), 0.0, "#999", 0.8);
  for (std::size_t s = 0; s < ys.size(); ++s)
  {
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < x.size(); ++i)
    {
      pts.emplace_back(x[i], (*ys[s].second)[i]);
    }
    svg.polyline(pts, color_of(s + 1), 1.5);
    svg.label(x.front() + 0.75 * (x.back() - x.front()), hi - (s + 1) * 0.07 * (hi - lo),
              ys[s].first, color_of(s + 1));
  }
  svg.metadata("x_range", format_double(x.front()) + " " + format_double(x.back()));
  svg.metadata("y_range", format_double(lo) + " " + format_double(hi));
  svg.save(path.string());
}

// Quiver plot of a planar field sampled on a lattice.
void save_quiver_svg(const std::filesystem::path &path, const std::string &title,
                     const GridBlock &g, const std::vector<double> &pts,
                     const std::vector<double> &vals, const std::vector<double> &centers,
                     std::optional<double> arrow_scale, const std::string &kernel_json)
{
  double vmax = 0.0;
  for (std::size_t i = 0; i + 1 < vals.size(); i += 2)
  {
    vmax = std::max(vmax, std::hypot(vals[i], vals[i + 1]));
  }
  const double cell = std::min((g.upper[0] - g.lower[0]) / (g.counts[0] - 1.0),
                               (g.upper[1] - g.lower[1]) / (g.counts[1] - 1.0));
  const double scale = arrow_scale ? *arrow_scale : (vmax > 0.0 ? 0.9 * cell / vmax : 1.0);
  Svg svg(g.lower[0], g.upper[0], g.lower[1], g.upper[1], 800);
  svg.title(title);
  svg.frame();
  for (std::size_t i = 0; i + 1 < pts.size(); i += 2)
  {
    svg.arrow(pts[i], pts[i + 1], scale * vals[i], scale * vals[i + 1], "#1f5fbf");
  }
  for (std::size_t i = 0; i + 1 < centers.size(); i += 2)
  {
    svg.circle(centers[i], centers[i + 1], 3.5, "#c0392b");
  }
  svg.metadata("arrow_scale", format_double(scale));
  svg.metadata("max_speed", format_double(vmax));
  svg.metadata("kernel", kernel_json);
  svg.save(path.string());
}

struct TrajectoryData
{
  std::size_t samples = 0, landmarks = 0;
  int dim = 0;
  std::vector<double> t, h;
  std::vector<std::vector<double>> q, p;  // per sample, n x d
};

TrajectoryData read_trajectory(const trik_trajectory *traj)
{
  TrajectoryData d;
  d.samples = trik_trajectory_samples(traj);
  d.landmarks = trik_trajectory_landmarks(traj);
  d.dim = trik_trajectory_dim(traj);
  for (std::size_t i = 0; i < d.samples; ++i)
  {
    double t = 0.0, h = 0.0;
    std::vector<double> q(d.landmarks * d.dim), p(d.landmarks * d.dim);
    check(trik_trajectory_state(traj, i, &t, q.data(), p.data(), &h), "trajectory");
    d.t.push_back(t);
    d.h.push_back(h);
    d.q.push_back(std::move(q));
    d.p.push_back(std::move(p));
  }
  return d;
}

// Box around the given planar points, padded by 10 %.
std::array<double, 4> bounding_box(const std::vector<std::pair<double, double>> &pts)
{
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto &[x, y] : pts)
  {
    if (std::isfinite(x) && std::isfinite(y))
    {
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    }
  }
  if (!(x1 > x0))
  {
    x0 -= 1.0;
    x1 += 1.0;
  }
  if (!(y1 > y0))
  {
    y0 -= 1.0;
    y1 += 1.0;
  }
  const double px = 0.1 * (x1 - x0), py = 0.1 * (y1 - y0);
  return {x0 - px, x1 + px, y0 - py, y1 + py};
}

std::string certification_line(const trik_pd_verdict &v)
{
  if (!v.positive)
  {
    return "PD: no";
  }
  return v.strictly ? "PD: yes (strict)" : "PD: yes, strict: no";
}

std::vector<double> rho_grid(const KernelHandle &k, const json &block, const std::string &path,
                             int default_points, json &eff)
{
  const int n = optional_integer(block, path, "points").value_or(default_points);
  if (n < 2 || n > 1000000)
  {
    input_error("config: '" + path + ".points' must lie in [2, 1e6]");
  }
  const auto lo = optional_number(block, path, "rho_min");
  const auto hi = optional_number(block, path, "rho_max");
  const std::string spacing = optional_string(block, path, "spacing").value_or("log");
  if (spacing != "log" && spacing != "linear")
  {
    input_error("config: '" + path + ".spacing' must be \"log\" or \"linear\"");
  }
  std::vector<double> g(n);
  if (lo || hi)
  {
    if (!lo || !hi || !(*hi > *lo) || !(*lo > 0.0 || (*lo == 0.0 && spacing == "linear")))
    {
      input_error("config: '" + path +
                  "' needs 0 < rho_min < rho_max (rho_min = 0 allowed with linear spacing)");
    }
    g = spaced(*lo, *hi, n, spacing == "log");
  }
  else
  {
    check(trik_default_rho_grid(k.get(), static_cast<size_t>(n), g.data()), "rho grid");
    if (spacing == "linear")
    {
      g = spaced(g.front(), g.back(), n, false);
    }
  }
  eff["points"] = n;
  eff["rho_min"] = g.front();
  eff["rho_max"] = g.back();
  eff["spacing"] = spacing;
  return g;
}

}  // namespace

int cmd_certify(const Context &ctx)
{
  const json &root = ctx.root;
  allow_keys(root, "", {"kernel", "certify", "output"});
  KernelHandle k = load_kernel(root);
  const json block = root.contains("certify") ? root.at("certify") : json::object();
  allow_keys(block, "certify", {"tol", "points", "rho_min", "rho_max", "spacing", "self_check"});
  json eff_cert = json::object();
  const double tol = optional_number(block, "certify", "tol").value_or(1e-8);
  if (!(tol >= 0.0))
  {
    input_error("config: 'certify.tol' must be >= 0");
  }
  const std::vector<double> rho = rho_grid(k, block, "certify", 256, eff_cert);
  eff_cert["tol"] = tol;
  bool self_check = true;
  if (block.contains("self_check"))
  {
    if (!block.at("self_check").is_boolean())
    {
      input_error("config: 'certify.self_check' must be a boolean");
    }
    self_check = block.at("self_check").get<bool>();
  }
  eff_cert["self_check"] = self_check;
  const bool want_output = root.contains("output");
  const OutputBlock out = load_output(root, "certify");
  if (ctx.print_effective)
  {
    json eff = {{"kernel", k.block}, {"certify", eff_cert}, {"seed", ctx.seed}};
    if (want_output)
    {
      eff["output"] = out.effective();
    }
    return print_effective(ctx, eff);
  }

  trik_pd_verdict v{};
  check(trik_certify(k.get(), rho.data(), rho.size(), tol, &v), "certify");
  *ctx.out << "kernel: " << k.block.dump() << "\n"
           << certification_line(v) << "\n"
           << "min h_par: " << format_double(v.min_h_par) << "\n"
           << "min h_perp: " << format_double(v.min_h_perp) << "\n"
           << "witness rho: " << format_double(v.witness_rho) << "\n"
           << "tolerance: " << format_double(v.tolerance) << "\n"
           << "grid: " << v.grid_points << " points on [" << format_double(v.grid_min) << ", "
           << format_double(v.grid_max) << "]\n";

  bool self_ok = true;
  if (self_check && v.positive)
  {
    // Quadratic form over random points and momenta (fixed seed).
    const int d = k.dim, n = 5, trials = 20;
    std::mt19937_64 rng(ctx.seed);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    double worst = std::numeric_limits<double>::infinity();
    for (int trial = 0; trial < trials; ++trial)
    {
      std::vector<double> x(n * d), a(n * d), m(n * d * n * d);
      for (auto &e : x)
      {
        e = u(rng);
      }
      for (auto &e : a)
      {
        e = u(rng);
      }
      check(trik_block_matrix(k.get(), n, x.data(), m.data()), "self-check");
      double form = 0.0;
      for (int i = 0; i < n * d; ++i)
      {
        for (int j = 0; j < n * d; ++j)
        {
          form += a[i] * m[i * n * d + j] * a[j];
        }
      }
      worst = std::min(worst, form);
    }
    self_ok = worst >= -1e-9;
    *ctx.out << "self-check (quadratic form, " << trials << " random configurations): min "
             << format_double(worst) << (self_ok ? " ok" : " FAILED") << "\n";
  }

  if (want_output)
  {
    if (out.csv())
    {
      const auto p = artifact(ctx, out.path, ".csv");
      check(trik_write_spectrum_csv(k.get(), rho.data(), rho.size(), p.c_str()), "spectrum csv");
      note_written(ctx, p);
    }
    if (out.svg())
    {
      std::vector<double> hp(rho.size()), hq(rho.size());
      check(trik_forward_map(k.get(), rho.data(), rho.size(), hp.data(), hq.data()), "spectrum");
      const auto p = artifact(ctx, out.path, ".svg");
      save_series_svg(p, "spectral coefficients", rho, {{"h_par", &hp}, {"h_perp", &hq}});
      note_written(ctx, p);
    }
  }
  return v.positive && v.strictly && self_ok ? kExitOk : kExitNegative;
}

int cmd_spectrum(const Context &ctx)
{
  const json &root = ctx.root;
  allow_keys(root, "", {"kernel", "spectrum", "output"});
  KernelHandle k = load_kernel(root);
  const json block = root.contains("spectrum") ? root.at("spectrum") : json::object();
  allow_keys(block, "spectrum", {"points", "rho_min", "rho_max", "spacing"});
  json eff_spec = json::object();
  const std::vector<double> rho = rho_grid(k, block, "spectrum", 256, eff_spec);
  const OutputBlock out = load_output(root, "spectrum");
  if (ctx.print_effective)
  {
    return print_effective(
        ctx, {{"kernel", k.block}, {"spectrum", eff_spec}, {"output", out.effective()}});
  }

  std::vector<double> hp(rho.size()), hq(rho.size());
  check(trik_forward_map(k.get(), rho.data(), rho.size(), hp.data(), hq.data()), "forward map");
  std::vector<double> cp(rho.size()), cq(rho.size());
  int available = 0;
  check(trik_closed_form_spectrum(k.get(), rho.data(), rho.size(), cp.data(), cq.data(),
                                  &available),
        "closed form");
  *ctx.out << "kernel: " << k.block.dump() << "\n"
           << "grid: " << rho.size() << " points on [" << format_double(rho.front()) << ", "
           << format_double(rho.back()) << "]\n";
  if (available)
  {
    double peak = 0.0, err = 0.0;
    for (std::size_t i = 0; i < rho.size(); ++i)
    {
      peak = std::max({peak, std::abs(cp[i]), std::abs(cq[i])});
      err = std::max({err, std::abs(hp[i] - cp[i]), std::abs(hq[i] - cq[i])});
    }
    *ctx.out << "closed form: max |quadrature - closed form| = " << format_double(err)
             << " (peak " << format_double(peak) << ")\n";
  }
  else
  {
    *ctx.out << "closed form: not available for this family\n";
  }
  if (out.csv())
  {
    const auto p = artifact(ctx, out.path, ".csv");
    if (available)
    {
      write_columns(p, {"rho", "h_par", "h_perp", "h_par_closed", "h_perp_closed"},
                    {&rho, &hp, &hq, &cp, &cq});
    }
    else
    {
      write_columns(p, {"rho", "h_par", "h_perp"}, {&rho, &hp, &hq});
    }
    note_written(ctx, p);
    const auto pp = artifact(ctx, out.path, "_h_par.csv");
    write_columns(pp, {"rho", "h_par"}, {&rho, &hp});
    note_written(ctx, pp);
    const auto pq = artifact(ctx, out.path, "_h_perp.csv");
    write_columns(pq, {"rho", "h_perp"}, {&rho, &hq});
    note_written(ctx, pq);
  }
  if (out.svg())
  {
    const auto p = artifact(ctx, out.path, ".svg");
    save_series_svg(p, "spectral coefficients", rho, {{"h_par", &hp}, {"h_perp", &hq}});
    note_written(ctx, p);
  }
  return kExitOk;
}

int cmd_field(const Context &ctx)
{
  const json &root = ctx.root;
  allow_keys(root, "", {"kernel", "landmarks", "momenta", "grid", "output"});
  KernelHandle k = load_kernel(root);
  const int d = k.dim;
  std::size_t n = 0, n_p = 0;
  const Points centers = point_list(root, "", "landmarks", d, &n);
  const Points momenta = point_list(root, "", "momenta", d, &n_p);
  if (n != n_p)
  {
    input_error("config: 'momenta' must have one entry per landmark");
  }
  const GridBlock grid = load_grid(member(root, "", "grid"), "grid", d);
  const OutputBlock out = load_output(root, "field");
  if (ctx.print_effective)
  {
    return print_effective(ctx, {{"kernel", k.block},
                                 {"landmarks", root.at("landmarks")},
                                 {"momenta", root.at("momenta")},
                                 {"grid", grid.effective()},
                                 {"output", out.effective()}});
  }

  const Points pts = grid_points(grid);
  const std::size_t m = pts.size() / d;
  Points vals(pts.size());
  check(trik_field_eval(k.get(), n, centers.data(), momenta.data(), m, pts.data(), vals.data()),
        "field");

  // Divergence and curl are linear in the field: sum the single-centre terms.
  double max_speed = 0.0, max_div = 0.0, max_curl = 0.0;
  std::vector<double> x(d), a(d), c3(3);
  for (std::size_t i = 0; i < m; ++i)
  {
    double speed = 0.0, div = 0.0, curl2 = 0.0, curl_bound = 0.0;
    std::array<double, 3> curl3{0.0, 0.0, 0.0};
    bool at_center = false;
    for (int j = 0; j < d; ++j)
    {
      speed += vals[i * d + j] * vals[i * d + j];
    }
    for (std::size_t b = 0; b < n; ++b)
    {
      double r2 = 0.0;
      for (int j = 0; j < d; ++j)
      {
        x[j] = pts[i * d + j] - centers[b * d + j];
        a[j] = momenta[b * d + j];
        r2 += x[j] * x[j];
      }
      if (r2 < 1e-20)
      {
        at_center = true;
        break;
      }
      double dv = 0.0, cm = 0.0;
      check(trik_divergence(k.get(), x.data(), a.data(), &dv), "divergence");
      div += dv;
      if (d == 2)
      {
        check(trik_curl(k.get(), x.data(), a.data(), &dv), "curl");
        curl2 += dv;
      }
      else if (d == 3)
      {
        check(trik_curl(k.get(), x.data(), a.data(), c3.data()), "curl");
        for (int j = 0; j < 3; ++j)
        {
          curl3[j] += c3[j];
        }
      }
      else
      {
        check(trik_curl_magnitude(k.get(), x.data(), a.data(), &cm), "curl");
        curl_bound += std::abs(cm);
      }
    }
    if (at_center)
    {
      continue;
    }
    max_speed = std::max(max_speed, std::sqrt(speed));
    max_div = std::max(max_div, std::abs(div));
    const double curl = d == 2   ? std::abs(curl2)
                        : d == 3 ? std::hypot(curl3[0], curl3[1], curl3[2])
                                 : curl_bound;
    max_curl = std::max(max_curl, curl);
  }

  if (out.csv())
  {
    const auto p = artifact(ctx, out.path, ".csv");
    check(trik_write_field_csv(k.get(), n, centers.data(), momenta.data(), grid.lower.data(),
                               grid.upper.data(), grid.counts.data(), p.c_str()),
          "field csv");
    note_written(ctx, p);
  }
  if (out.svg())
  {
    if (d == 2)
    {
      const auto p = artifact(ctx, out.path, ".svg");
      save_quiver_svg(p, "v(x) = sum k(x - q_a) alpha_a", grid, pts, vals, centers,
                      out.arrow_scale, k.block.dump());
      note_written(ctx, p);
    }
    else
    {
      *ctx.out << "svg skipped: quiver plots need a two-dimensional kernel\n";
    }
  }
  *ctx.out << "grid points: " << m << "\n"
           << "max |v|: " << format_double(max_speed) << "\n"
           << "max |div v|: " << format_double(max_div) << "\n"
           << "max |curl v|" << (d > 3 ? " (sum of term magnitudes)" : "") << ": "
           << format_double(max_curl) << "\n";
  return kExitOk;
}

int cmd_shoot(const Context &ctx)
{
  const json &root = ctx.root;
  allow_keys(root, "",
             {"kernel", "landmarks", "momenta", "integrator", "flow_grid", "output", "checks"});
  KernelHandle k = load_kernel(root);
  const int d = k.dim;
  std::size_t n = 0, n_p = 0;
  const Points q0 = point_list(root, "", "landmarks", d, &n);
  const Points p0 = point_list(root, "", "momenta", d, &n_p);
  if (n != n_p)
  {
    input_error("config: 'momenta' must have one entry per landmark");
  }
  const IntegratorBlock integ = load_integrator(root);
  std::optional<GridBlock> grid;
  if (root.contains("flow_grid"))
  {
    grid = load_grid(root.at("flow_grid"), "flow_grid", d);
  }
  const json checks = root.contains("checks") ? root.at("checks") : json::object();
  allow_keys(checks, "checks", {"drift_tol"});
  const double drift_tol = optional_number(checks, "checks", "drift_tol").value_or(1e-6);
  const OutputBlock out = load_output(root, "shoot");
  if (ctx.print_effective)
  {
    json eff = {{"kernel", k.block},
                {"landmarks", root.at("landmarks")},
                {"momenta", root.at("momenta")},
                {"integrator", integ.effective()}};
    if (grid)
    {
      eff["flow_grid"] = grid->effective();
    }
    eff["checks"] = {{"drift_tol", drift_tol}};
    eff["output"] = out.effective();
    return print_effective(ctx, eff);
  }

  Trajectory traj;
  check(trik_shoot(k.get(), n, q0.data(), p0.data(), &integ.cfg, traj.out()), "shoot");
  traj.adopt();
  const TrajectoryData data = read_trajectory(traj.get());
  const double h0 = data.h.front();
  const double drift = trik_trajectory_max_drift(traj.get());
  const double rel = drift / std::max(1.0, std::abs(h0));
  double energy = 0.0;
  check(trik_path_energy(k.get(), traj.get(), &energy), "path energy");
  *ctx.out << "kernel: " << k.block.dump() << "\n"
           << "samples: " << data.samples << ", step " << format_double(integ.cfg.step) << "\n"
           << "H(0): " << format_double(h0) << "\n"
           << "max |H(t) - H(0)|: " << format_double(drift) << " (relative "
           << format_double(rel) << ")\n"
           << "path energy: " << format_double(energy) << " (2 H(0) = " << format_double(2 * h0)
           << ")\n";
  const std::vector<double> &qend = data.q.back();
  for (std::size_t a = 0; a < n; ++a)
  {
    *ctx.out << "q" << a + 1 << "(1): (";
    for (int i = 0; i < d; ++i)
    {
      *ctx.out << (i ? ", " : "") << format_double(qend[a * d + i]);
    }
    *ctx.out << ")\n";
  }

  // Antisymmetry under (q, p) -> (-q, -p) with reversed landmark labels.
  double init_defect = 0.0;
  for (std::size_t a = 0; a < n; ++a)
  {
    for (int i = 0; i < d; ++i)
    {
      init_defect = std::max({init_defect, std::abs(q0[a * d + i] + q0[(n - 1 - a) * d + i]),
                              std::abs(p0[a * d + i] + p0[(n - 1 - a) * d + i])});
    }
  }
  if (n >= 2 && init_defect < 1e-12)
  {
    double defect = 0.0;
    for (std::size_t s = 0; s < data.samples; ++s)
    {
      for (std::size_t a = 0; a < n; ++a)
      {
        for (int i = 0; i < d; ++i)
        {
          defect = std::max(
              {defect, std::abs(data.q[s][a * d + i] + data.q[s][(n - 1 - a) * d + i]),
               std::abs(data.p[s][a * d + i] + data.p[s][(n - 1 - a) * d + i])});
        }
      }
    }
    *ctx.out << "antisymmetry defect max |q_a + q_(N+1-a)|, |p_a + p_(N+1-a)|: "
             << format_double(defect) << "\n";
  }

  FlowGrid fg;
  if (grid)
  {
    check(trik_flow_grid_compute(k.get(), traj.get(), grid->lower.data(), grid->upper.data(),
                                 grid->counts.data(), &integ.cfg, fg.out()),
          "flow grid");
    fg.adopt();
    *ctx.out << "flow grid: " << trik_flow_grid_size(fg.get()) << " points\n"
             << "max |det - 1| (lattice differences): "
             << format_double(trik_flow_grid_max_det_deviation(fg.get())) << "\n"
             << "max |det - 1| (integrated tangent map): "
             << format_double(trik_flow_grid_max_tangent_deviation(fg.get())) << "\n";
  }

  if (out.csv())
  {
    const auto p = artifact(ctx, out.path, ".csv");
    check(trik_trajectory_write_csv(traj.get(), p.c_str()), "trajectory csv");
    note_written(ctx, p);
    if (grid)
    {
      const auto pg = artifact(ctx, out.path, "_grid.csv");
      check(trik_flow_grid_write_csv(fg.get(), pg.c_str()), "flow grid csv");
      note_written(ctx, pg);
    }
  }
  if (out.svg())
  {
    if (d == 2)
    {
      std::vector<std::pair<double, double>> all;
      for (const auto &q : data.q)
      {
        for (std::size_t a = 0; a < n; ++a)
        {
          all.emplace_back(q[a * 2], q[a * 2 + 1]);
        }
      }
      std::vector<double> orig, moved;
      if (grid)
      {
        const std::size_t m = trik_flow_grid_size(fg.get());
        orig.resize(2 * m);
        moved.resize(2 * m);
        for (std::size_t i = 0; i < m; ++i)
        {
          check(trik_flow_grid_point(fg.get(), i, &orig[2 * i], &moved[2 * i], nullptr, nullptr),
                "flow grid");
        }
        all.emplace_back(grid->lower[0], grid->lower[1]);
        all.emplace_back(grid->upper[0], grid->upper[1]);
      }
      const auto box = bounding_box(all);
      Svg svg(box[0], box[1], box[2], box[3], 800);
      svg.title("landmark geodesics and deformed grid");
      svg.frame();
      if (grid)
      {
        // Draw every few lattice lines of the transported grid.
        const int nx = grid->counts[0], ny = grid->counts[1];
        const int stride = std::max(1, std::max(nx, ny) / 40);
        const auto at = [&](int i, int j) {
          const std::size_t idx = static_cast<std::size_t>(i) * ny + j;
          return std::pair<double, double>{moved[2 * idx], moved[2 * idx + 1]};
        };
        for (int i = 0; i < nx; i += stride)
        {
          std::vector<std::pair<double, double>> line;
          for (int j = 0; j < ny; ++j)
          {
            line.push_back(at(i, j));
          }
          svg.polyline(line, "#7f8c8d", 0.6);
        }
        for (int j = 0; j < ny; j += stride)
        {
          std::vector<std::pair<double, double>> line;
          for (int i = 0; i < nx; ++i)
          {
            line.push_back(at(i, j));
          }
          svg.polyline(line, "#7f8c8d", 0.6);
        }
        svg.metadata("grid_line_stride", std::to_string(stride));
      }
      for (std::size_t a = 0; a < n; ++a)
      {
        std::vector<std::pair<double, double>> path;
        for (const auto &q : data.q)
        {
          path.emplace_back(q[a * 2], q[a * 2 + 1]);
        }
        svg.polyline(path, color_of(a), 2.0);
        svg.circle(path.front().first, path.front().second, 3.0, color_of(a));
      }
      svg.metadata("kernel", k.block.dump());
      svg.metadata("step", format_double(integ.cfg.step));
      const auto p = artifact(ctx, out.path, ".svg");
      svg.save(p.string());
      note_written(ctx, p);
    }
    else
    {
      *ctx.out << "svg skipped: path plots need a two-dimensional kernel\n";
    }
  }
  if (!(rel <= drift_tol))
  {
    *ctx.out << "check FAILED: relative H drift exceeds " << format_double(drift_tol) << "\n";
    return kExitNegative;
  }
  return kExitOk;
}

int cmd_expmap(const Context &ctx)
{
  const json &root = ctx.root;
  allow_keys(root, "", {"kernel", "landmarks", "fan", "integrator", "output"});
  KernelHandle k = load_kernel(root);
  const int d = k.dim;
  std::size_t n = 0, n_cos = 0, n_sin = 0;
  const Points q0 = point_list(root, "", "landmarks", d, &n);
  const json &fan_block = member(root, "", "fan");
  allow_keys(fan_block, "fan", {"theta_min", "theta_max", "samples", "cos", "sin"});
  const double th0 = number(fan_block, "fan", "theta_min");
  const double th1 = number(fan_block, "fan", "theta_max");
  const int samples = integer(fan_block, "fan", "samples");
  if (samples < 1 || samples > 100000 || (samples > 1 && !(th1 > th0)))
  {
    input_error("config: 'fan' needs samples in [1, 1e5] and theta_max > theta_min");
  }
  const Points cos_part = point_list(fan_block, "fan", "cos", d, &n_cos);
  const Points sin_part = point_list(fan_block, "fan", "sin", d, &n_sin);
  if (n_cos != n || n_sin != n)
  {
    input_error("config: 'fan.cos' and 'fan.sin' need one entry per landmark");
  }
  const IntegratorBlock integ = load_integrator(root);
  const OutputBlock out = load_output(root, "expmap");
  if (ctx.print_effective)
  {
    return print_effective(ctx, {{"kernel", k.block},
                                 {"landmarks", root.at("landmarks")},
                                 {"fan", fan_block},
                                 {"integrator", integ.effective()},
                                 {"output", out.effective()}});
  }

  const std::vector<double> theta = spaced(th0, th1, samples, false);
  std::vector<double> momenta;
  for (double th : theta)
  {
    for (std::size_t j = 0; j < n * d; ++j)
    {
      momenta.push_back(cos_part[j] * std::cos(th) + sin_part[j] * std::sin(th));
    }
  }
  Fan fan;
  check(trik_exp_map_fan(k.get(), n, q0.data(), theta.size(), theta.data(), momenta.data(),
                         &integ.cfg, fan.out()),
        "exp map fan");
  fan.adopt();
  std::vector<TrajectoryData> trajs;
  std::size_t failed = 0;
  for (std::size_t j = 0; j < theta.size(); ++j)
  {
    const trik_trajectory *t = trik_fan_trajectory(fan.get(), j);
    if (t == nullptr)
    {
      ++failed;
      *ctx.out << "theta = " << format_double(theta[j]) << ": failed: "
               << trik_fan_error(fan.get(), j) << "\n";
      trajs.emplace_back();
      continue;
    }
    trajs.push_back(read_trajectory(t));
  }
  *ctx.out << "kernel: " << k.block.dump() << "\n"
           << "fan: " << theta.size() << " shoots, " << failed << " failed\n";

  if (out.csv())
  {
    const auto p = artifact(ctx, out.path, ".csv");
    std::ofstream os(p);
    if (!os)
    {
      input_error("cannot open '" + p.string() + "' for writing");
    }
    os << "theta,t";
    for (std::size_t a = 1; a <= n; ++a)
    {
      for (int i = 1; i <= d; ++i)
      {
        os << ",q" << a << "_" << i;
      }
    }
    os << ",H\n";
    for (std::size_t j = 0; j < theta.size(); ++j)
    {
      const auto &t = trajs[j];
      for (std::size_t s = 0; s < t.samples; ++s)
      {
        os << format_double(theta[j]) << "," << format_double(t.t[s]);
        for (double v : t.q[s])
        {
          os << "," << format_double(v);
        }
        os << "," << format_double(t.h[s]) << "\n";
      }
    }
    if (!os)
    {
      input_error("write failed: " + p.string());
    }
    note_written(ctx, p);
  }
  if (out.svg())
  {
    if (d == 2)
    {
      std::vector<std::pair<double, double>> all;
      for (const auto &t : trajs)
      {
        for (const auto &q : t.q)
        {
          for (std::size_t a = 0; a < n; ++a)
          {
            all.emplace_back(q[a * 2], q[a * 2 + 1]);
          }
        }
      }
      const auto box = bounding_box(all);
      Svg svg(box[0], box[1], box[2], box[3], 800);
      svg.title("exponential map fan");
      svg.frame();
      for (std::size_t a = 0; a < n; ++a)
      {
        // Geodesics t -> q_a(t; theta) and iso-time curves theta -> q_a(t; theta).
        for (const auto &t : trajs)
        {
          std::vector<std::pair<double, double>> path;
          for (const auto &q : t.q)
          {
            path.emplace_back(q[a * 2], q[a * 2 + 1]);
          }
          svg.polyline(path, color_of(a), 0.7, 0.8);
        }
        for (double frac : {0.25, 0.5, 0.75, 1.0})
        {
          std::vector<std::pair<double, double>> iso;
          for (const auto &t : trajs)
          {
            if (t.samples == 0)
            {
              continue;
            }
            const auto s = static_cast<std::size_t>(std::lround(frac * (t.samples - 1)));
            iso.emplace_back(t.q[s][a * 2], t.q[s][a * 2 + 1]);
          }
          svg.polyline(iso, color_of(a), 1.6);
        }
      }
      svg.metadata("kernel", k.block.dump());
      svg.metadata("theta_range", format_double(th0) + " " + format_double(th1));
      svg.metadata("samples", std::to_string(samples));
      const auto p = artifact(ctx, out.path, ".svg");
      svg.save(p.string());
      note_written(ctx, p);
    }
    else
    {
      *ctx.out << "svg skipped: fan plots need a two-dimensional kernel\n";
    }
  }
  return failed == 0 ? kExitOk : kExitNegative;
}

int cmd_hodge(const Context &ctx)
{
  const json &root = ctx.root;
  allow_keys(root, "", {"kernel", "hodge", "output"});
  KernelHandle k = load_kernel(root);
  const int d = k.dim;
  const json block = root.contains("hodge") ? root.at("hodge") : json::object();
  allow_keys(block, "hodge", {"r_points", "l2_radius", "quiver", "tolerance"});
  const int r_points = optional_integer(block, "hodge", "r_points").value_or(512);
  if (r_points < 16 || r_points > 100000)
  {
    input_error("config: 'hodge.r_points' must lie in [16, 1e5]");
  }
  const double radius = optional_number(block, "hodge", "l2_radius").value_or(400.0);
  if (!(radius > 0.0))
  {
    input_error("config: 'hodge.l2_radius' must be > 0");
  }
  const double tol = optional_number(block, "hodge", "tolerance").value_or(1e-6);
  GridBlock quiver;
  if (block.contains("quiver"))
  {
    quiver = load_grid(block.at("quiver"), "hodge.quiver", d);
  }
  else if (d == 2)
  {
    quiver = GridBlock{{-3.0, -3.0}, {3.0, 3.0}, {25, 25}};
  }
  const OutputBlock out = load_output(root, "hodge");
  if (ctx.print_effective)
  {
    json eff_h = {{"r_points", r_points}, {"l2_radius", radius}, {"tolerance", tol}};
    if (!quiver.counts.empty())
    {
      eff_h["quiver"] = quiver.effective();
    }
    return print_effective(
        ctx, {{"kernel", k.block}, {"hodge", eff_h}, {"output", out.effective()}});
  }

  std::vector<double> rgrid(r_points);
  check(trik_default_r_grid(k.get(), rgrid.size(), rgrid.data()), "r grid");
  Hodge h;
  check(trik_hodge_split(k.get(), nullptr, 0, rgrid.data(), rgrid.size(), h.out()), "hodge split");
  h.adopt();
  const std::size_t m = trik_hodge_size(h.get());
  std::vector<double> r(m), k1p(m), k1q(m), k2p(m), k2q(m);
  trik_hodge_table(h.get(), r.data(), k1p.data(), k1q.data(), k2p.data(), k2q.data());
  Kernel k1, k2;
  check(trik_hodge_component(h.get(), 0, k1.out()), "hodge component");
  k1.adopt();
  check(trik_hodge_component(h.get(), 1, k2.out()), "hodge component");
  k2.adopt();

  *ctx.out << "kernel: " << k.block.dump() << "\n"
           << "table: " << m << " radii on [" << format_double(r.front()) << ", "
           << format_double(r.back()) << "]\n";
  if (trik_hodge_heavy_tail(h.get()))
  {
    *ctx.out << "warning: " << trik_hodge_warning(h.get()) << "\n";
  }

  bool ok = true;
  double sum_err = 0.0, max_k1 = 0.0, max_k2 = 0.0;
  for (std::size_t i = 0; i < m; ++i)
  {
    double kp = 0.0, kq = 0.0;
    check(trik_kernel_coefficients(k.get(), r[i], &kp, &kq, nullptr), "coefficients");
    sum_err = std::max({sum_err, std::abs(k1p[i] + k2p[i] - kp), std::abs(k1q[i] + k2q[i] - kq)});
    max_k1 = std::max({max_k1, std::abs(k1p[i]), std::abs(k1q[i])});
    max_k2 = std::max({max_k2, std::abs(k2p[i]), std::abs(k2q[i])});
  }
  *ctx.out << "max |k1 + k2 - k|: " << format_double(sum_err) << "\n"
           << "max |curl-free component|: " << format_double(max_k1) << "\n"
           << "max |divergence-free component|: " << format_double(max_k2) << "\n";
  ok = ok && sum_err <= tol;

  // Closed-form cross-check for the scalar Gaussian.
  std::vector<double> closed;
  if (k.block.value("family", "") == "gaussian")
  {
    const double b = k.block.at("b").get<double>();
    const double c = k.block.contains("c") ? k.block.at("c").get<double>()
                                           : 0.5 / std::pow(k.block.at("sigma").get<double>(), 2);
    const char *names[] = {"c"};
    const double values[] = {c};
    Kernel ref;
    check(trik_kernel_create("gaussian_hodge_curl", d, names, values, 1, ref.out()),
          "closed form");
    ref.adopt();
    double err = 0.0;
    closed.resize(m);
    for (std::size_t i = 0; i < m; ++i)
    {
      double v = 0.0;
      check(trik_kernel_coefficients(ref.get(), r[i], nullptr, &v, nullptr), "closed form");
      closed[i] = b * v;
      err = std::max(err, std::abs(k1q[i] - closed[i]));
    }
    *ctx.out << "closed form k1_perp: max deviation " << format_double(err) << "\n";
    ok = ok && err <= tol;
  }

  double ip = 0.0, n1 = 0.0, n2 = 0.0;
  check(trik_l2_inner_product(k1.get(), k2.get(), radius, &ip), "L2 inner product");
  check(trik_l2_inner_product(k1.get(), k1.get(), radius, &n1), "L2 inner product");
  check(trik_l2_inner_product(k2.get(), k2.get(), radius, &n2), "L2 inner product");
  // Floor the normalisation so that a vanishing component does not inflate the ratio.
  const double denom = std::max(std::sqrt(std::max(0.0, n1) * std::max(0.0, n2)),
                                1e-8 * std::max({n1, n2, 0.0}));
  const double rel = denom > 0.0 ? std::abs(ip) / denom : 0.0;
  *ctx.out << "L2 inner product <k1 e1, k2 e1> on the ball of radius " << format_double(radius)
           << ": " << format_double(ip) << " (relative " << format_double(rel) << ")\n";
  ok = ok && rel <= 1e-4;

  if (out.csv())
  {
    const auto p = artifact(ctx, out.path, ".csv");
    if (closed.empty())
    {
      write_columns(p, {"r", "k1_par", "k1_perp", "k2_par", "k2_perp"},
                    {&r, &k1p, &k1q, &k2p, &k2q});
    }
    else
    {
      write_columns(p, {"r", "k1_par", "k1_perp", "k2_par", "k2_perp", "k1_perp_closed"},
                    {&r, &k1p, &k1q, &k2p, &k2q, &closed});
    }
    note_written(ctx, p);
  }
  if (out.svg())
  {
    if (d == 2)
    {
      const Points pts = grid_points(quiver);
      const std::size_t npts = pts.size() / 2;
      const Points origin = {0.0, 0.0}, e1 = {1.0, 0.0};
      const std::pair<const char *, trik_kernel *> parts[] = {{"_curl_free", k1.get()},
                                                              {"_div_free", k2.get()}};
      for (const auto &[suffix, kk] : parts)
      {
        Points vals(pts.size());
        check(trik_field_eval(kk, 1, origin.data(), e1.data(), npts, pts.data(), vals.data()),
              "component field");
        const auto p = artifact(ctx, out.path, std::string(suffix) + ".svg");
        save_quiver_svg(p, std::string("component") + suffix + " of x -> k(x) e1", quiver, pts,
                        vals, origin, out.arrow_scale, k.block.dump());
        note_written(ctx, p);
      }
    }
    else
    {
      *ctx.out << "svg skipped: quiver plots need a two-dimensional kernel\n";
    }
  }
  if (!ok)
  {
    *ctx.out << "check FAILED: tolerance " << format_double(tol) << "\n";
  }
  return ok ? kExitOk : kExitNegative;
}

}  // namespace trik_cli

// SPDX-License-Identifier: Apache-2.0

#include "trik/trik.h"

#include <cmath>
#include <exception>
#include <fstream>
#include <ios>
#include <memory>
#include <new>
#include <optional>
#include <string>
#include <vector>

#include "trik/dynamics.hpp"
#include "trik/error.hpp"
#include "trik/families.hpp"
#include "trik/fields.hpp"
#include "trik/kernel.hpp"
#include "trik/spectral.hpp"

struct trik_kernel
{
  std::shared_ptr<const trik::TriKernel> kernel;
  std::optional<trik::KernelSpec> spec;
  std::string spec_json;
  trik::Certification certification = trik::Certification::Unknown;
};

struct trik_hodge
{
  trik::HodgeResult result;
};

struct trik_trajectory
{
  trik::Trajectory traj;
};

struct trik_flow_grid
{
  trik::FlowGrid grid;
};

struct trik_fan
{
  std::vector<double> params;
  std::vector<std::unique_ptr<trik_trajectory>> trajectories;
  std::vector<std::string> errors;
};

namespace
{

thread_local std::string g_last_error;

trik_status status_of(trik::ErrorKind kind)
{
  switch (kind)
  {
    case trik::ErrorKind::InvalidArgument:
      return TRIK_ERR_INVALID_ARGUMENT;
    case trik::ErrorKind::Domain:
      return TRIK_ERR_DOMAIN;
    case trik::ErrorKind::NonConvergence:
      return TRIK_ERR_NONCONVERGENCE;
    case trik::ErrorKind::Singular:
      return TRIK_ERR_SINGULAR;
    case trik::ErrorKind::Coalescence:
      return TRIK_ERR_COALESCENCE;
    case trik::ErrorKind::DimensionMismatch:
      return TRIK_ERR_DIMENSION_MISMATCH;
  }
  return TRIK_ERR_INTERNAL;
}

trik_status fail(trik_status s, const std::string &msg)
{
  g_last_error = msg;
  return s;
}

// Runs fn, translating exceptions into status codes.
template <typename Fn>
trik_status guarded(Fn &&fn)
{
  try
  {
    g_last_error.clear();
    return fn();
  }
  catch (const trik::Error &e)
  {
    return fail(status_of(e.kind()), e.what());
  }
  catch (const std::ios_base::failure &e)
  {
    return fail(TRIK_ERR_IO, e.what());
  }
  catch (const std::bad_alloc &)
  {
    return fail(TRIK_ERR_INTERNAL, "out of memory");
  }
  catch (const std::exception &e)
  {
    return fail(TRIK_ERR_INTERNAL, e.what());
  }
  catch (...)
  {
    return fail(TRIK_ERR_INTERNAL, "unknown error");
  }
}

void require(bool cond, const char *msg)
{
  if (!cond)
  {
    throw trik::Error(trik::ErrorKind::InvalidArgument, msg);
  }
}

const trik::TriKernel &kernel_of(const trik_kernel *k)
{
  require(k != nullptr && k->kernel != nullptr, "null kernel handle");
  return *k->kernel;
}

Eigen::MatrixXd read_rows(const double *data, std::size_t n, int d)
{
  require(data != nullptr || n == 0, "null matrix pointer");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(n), d);
  for (std::size_t a = 0; a < n; ++a)
  {
    for (int i = 0; i < d; ++i)
    {
      m(static_cast<Eigen::Index>(a), i) = data[a * d + i];
    }
  }
  return m;
}

void write_rows(const Eigen::MatrixXd &m, double *out)
{
  for (Eigen::Index a = 0; a < m.rows(); ++a)
  {
    for (Eigen::Index i = 0; i < m.cols(); ++i)
    {
      out[a * m.cols() + i] = m(a, i);
    }
  }
}

Eigen::VectorXd read_vector(const double *data, int d)
{
  require(data != nullptr, "null vector pointer");
  return Eigen::Map<const Eigen::VectorXd>(data, d);
}

std::vector<double> grid_or(const double *data, std::size_t n, std::vector<double> fallback)
{
  if (n == 0)
  {
    return fallback;
  }
  require(data != nullptr, "null grid pointer");
  return {data, data + n};
}

trik::IntegratorConfig integrator_of(const trik_integrator *cfg)
{
  trik::IntegratorConfig out;
  if (cfg != nullptr)
  {
    require(cfg->scheme == TRIK_SCHEME_RK4 || cfg->scheme == TRIK_SCHEME_EULER,
            "integrator: unknown scheme");
    out.scheme = cfg->scheme == TRIK_SCHEME_RK4 ? trik::Scheme::RK4 : trik::Scheme::Euler;
    out.step = cfg->step;
    out.record_every = cfg->record_every;
  }
  out.validate();
  return out;
}

trik::GridSpec grid_spec_of(int d, const double *lower, const double *upper, const int *counts)
{
  require(lower != nullptr && upper != nullptr && counts != nullptr, "null grid specification");
  trik::GridSpec g;
  g.lower = read_vector(lower, d);
  g.upper = read_vector(upper, d);
  g.counts.assign(counts, counts + d);
  g.validate(d);
  return g;
}

trik::PhaseState state_of(const trik::TriKernel &k, std::size_t n, const double *q, const double *p)
{
  trik::PhaseState s;
  s.q = read_rows(q, n, k.dim);
  s.p = read_rows(p, n, k.dim);
  return s;
}

std::ofstream open_out(const char *path)
{
  require(path != nullptr, "null path");
  std::ofstream os(path);
  if (!os)
  {
    throw std::ios_base::failure(std::string("cannot open '") + path + "' for writing");
  }
  return os;
}

trik_kernel *wrap(trik::TriKernel k, std::optional<trik::KernelSpec> spec)
{
  auto *h = new trik_kernel;
  h->certification = k.certification;
  h->kernel = std::make_shared<const trik::TriKernel>(std::move(k));
  if (spec)
  {
    h->spec_json = trik::kernel_spec_to_json(*spec);
  }
  h->spec = std::move(spec);
  return h;
}

}  // namespace

extern "C"
{

  const char *trik_last_error(void)
  {
    return g_last_error.c_str();
  }

  const char *trik_status_name(trik_status status)
  {
    switch (status)
    {
      case TRIK_OK:
        return "ok";
      case TRIK_ERR_INVALID_ARGUMENT:
        return "invalid argument";
      case TRIK_ERR_DOMAIN:
        return "domain error";
      case TRIK_ERR_NONCONVERGENCE:
        return "non-convergence";
      case TRIK_ERR_SINGULAR:
        return "singular";
      case TRIK_ERR_COALESCENCE:
        return "coalescence";
      case TRIK_ERR_DIMENSION_MISMATCH:
        return "dimension mismatch";
      case TRIK_ERR_IO:
        return "i/o error";
      case TRIK_ERR_INTERNAL:
        return "internal error";
    }
    return "unknown status";
  }

  const char *trik_version(void)
  {
    return "1.0.0";
  }

  trik_integrator trik_integrator_default(void)
  {
    const trik::IntegratorConfig c;
    return {TRIK_SCHEME_RK4, c.step, c.record_every};
  }

  trik_status trik_kernel_from_json(const char *json, trik_kernel **out)
  {
    return guarded([&] {
      require(json != nullptr && out != nullptr, "null argument");
      const trik::KernelSpec spec = trik::parse_kernel_spec(json);
      *out = wrap(trik::build_kernel(spec), spec);
      return TRIK_OK;
    });
  }

  trik_status trik_kernel_create(const char *family, int dim, const char *const *names,
                                 const double *values, size_t n_params, trik_kernel **out)
  {
    return guarded([&] {
      require(family != nullptr && out != nullptr, "null argument");
      require(n_params == 0 || (names != nullptr && values != nullptr), "null parameter arrays");
      trik::KernelSpec spec{family, dim, {}};
      for (std::size_t i = 0; i < n_params; ++i)
      {
        require(names[i] != nullptr, "null parameter name");
        require(spec.params.emplace(names[i], values[i]).second, "duplicate parameter name");
      }
      *out = wrap(trik::build_kernel(spec), spec);
      return TRIK_OK;
    });
  }

  void trik_kernel_destroy(trik_kernel *k)
  {
    delete k;
  }

  int trik_kernel_dim(const trik_kernel *k)
  {
    return k != nullptr ? k->kernel->dim : 0;
  }

  const char *trik_kernel_family(const trik_kernel *k)
  {
    return k != nullptr ? k->kernel->family_tag.c_str() : "";
  }

  double trik_kernel_k0(const trik_kernel *k)
  {
    return k != nullptr ? k->kernel->k0 : std::nan("");
  }

  trik_certification trik_kernel_certification(const trik_kernel *k)
  {
    if (k == nullptr)
    {
      return TRIK_CERT_UNKNOWN;
    }
    switch (k->certification)
    {
      case trik::Certification::Positive:
        return TRIK_CERT_POSITIVE;
      case trik::Certification::Strict:
        return TRIK_CERT_STRICT;
      case trik::Certification::Negative:
        return TRIK_CERT_NEGATIVE;
      case trik::Certification::Unknown:
        break;
    }
    return TRIK_CERT_UNKNOWN;
  }

  const char *trik_kernel_spec_json(const trik_kernel *k)
  {
    return k != nullptr ? k->spec_json.c_str() : "";
  }

  trik_status trik_kernel_coefficients(const trik_kernel *k, double r, double *k_par,
                                       double *k_perp, double *ktilde)
  {
    return guarded([&] {
      const auto &kk = kernel_of(k);
      require(r >= 0.0 && std::isfinite(r), "radius must be finite and >= 0");
      const bool zero = !(r > trik::kZeroThreshold);
      if (k_par)
      {
        *k_par = zero ? kk.k0 : kk.k_par(r);
      }
      if (k_perp)
      {
        *k_perp = zero ? kk.k0 : kk.k_perp(r);
      }
      if (ktilde)
      {
        *ktilde = trik::ktilde(kk, r);
      }
      return TRIK_OK;
    });
  }

  trik_status trik_kernel_derivatives(const trik_kernel *k, double r, double *dk_par,
                                      double *dk_perp)
  {
    return guarded([&] {
      const auto &kk = kernel_of(k);
      require(r > 0.0 && std::isfinite(r), "radius must be finite and > 0");
      if (dk_par)
      {
        *dk_par = kk.dk_par(r);
      }
      if (dk_perp)
      {
        *dk_perp = kk.dk_perp(r);
      }
      return TRIK_OK;
    });
  }

  trik_status trik_kernel_residuals(const trik_kernel *k, double r, double *curl_free,
                                    double *div_free)
  {
    return guarded([&] {
      const auto &kk = kernel_of(k);
      require(r > 0.0 && std::isfinite(r), "radius must be finite and > 0");
      if (curl_free)
      {
        *curl_free = trik::curl_free_residual(kk, r);
      }
      if (div_free)
      {
        *div_free = trik::div_free_residual(kk, r);
      }
      return TRIK_OK;
    });
  }

  trik_status trik_kernel_eval(const trik_kernel *k, const double *x, double *out)
  {
    return guarded([&] {
      const auto &kk = kernel_of(k);
      require(out != nullptr, "null output");
      write_rows(trik::eval_matrix(kk, read_vector(x, kk.dim)), out);
      return TRIK_OK;
    });
  }

  trik_status trik_kernel_partial(const trik_kernel *k, const double *x, int axis, double *out)
  {
    return guarded([&] {
      const auto &kk = kernel_of(k);
      require(out != nullptr, "null output");
      require(axis >= 0 && axis < kk.dim, "axis out of range");
      write_rows(trik::partial_matrix(kk, read_vector(x, kk.dim), axis), out);
      return TRIK_OK;
    });
  }

  trik_status trik_default_rho_grid(const trik_kernel *k, size_t n, double *out)
  {
    return guarded([&] {
      require(out != nullptr && n >= 2, "grid needs an output buffer and n >= 2");
      const auto g = trik::default_rho_grid(kernel_of(k), n);
      std::copy(g.begin(), g.end(), out);
      return TRIK_OK;
    });
  }

  trik_status trik_default_r_grid(const trik_kernel *k, size_t n, double *out)
  {
    return guarded([&] {
      require(out != nullptr && n >= 2, "grid needs an output buffer and n >= 2");
      const auto g = trik::default_r_grid(kernel_of(k), n);
      std::copy(g.begin(), g.end(), out);
      return TRIK_OK;
    });
  }

  trik_status trik_forward_map(const trik_kernel *k, const double *rho, size_t n, double *h_par,
                               double *h_perp)
  {
    return guarded([&] {
      const auto &kk = kernel_of(k);
      require(rho != nullptr && n > 0, "empty grid");
      const trik::Spectrum s = trik::forward_map(kk, {rho, rho + n});
      if (h_par)
      {
        std::copy(s.par_values.begin(), s.par_values.end(), h_par);
      }
      if (h_perp)
      {
        std::copy(s.perp_values.begin(), s.perp_values.end(), h_perp);
      }
      return TRIK_OK;
    });
  }

  trik_status trik_closed_form_spectrum(const trik_kernel *k, const double *rho, size_t n,
                                        double *h_par, double *h_perp, int *available)
  {
    return guarded([&] {
      kernel_of(k);
      require(available != nullptr, "null output");
      require(rho != nullptr || n == 0, "null grid");
      *available = 0;
      if (!k->spec)
      {
        return TRIK_OK;
      }
      const auto s = trik::closed_form_spectrum(*k->spec);
      if (!s)
      {
        return TRIK_OK;
      }
      *available = 1;
      for (std::size_t i = 0; i < n; ++i)
      {
        if (h_par)
        {
          h_par[i] = s->h_par(rho[i]);
        }
        if (h_perp)
        {
          h_perp[i] = s->h_perp(rho[i]);
        }
      }
      return TRIK_OK;
    });
  }

  trik_status trik_round_trip(const trik_kernel *k, const double *rho, size_t n_rho,
                              const double *r, size_t n_r, double *k_par, double *k_perp)
  {
    return guarded([&] {
      const auto &kk = kernel_of(k);
      require(r != nullptr && n_r > 0, "empty r grid");
      const trik::Spectrum s =
          trik::forward_map(kk, grid_or(rho, n_rho, trik::dense_rho_grid(kk)));
      const auto [par, perp] = trik::inverse_map(s, {r, r + n_r});
      if (k_par)
      {
        std::copy(par.begin(), par.end(), k_par);
      }
      if (k_perp)
      {
        std::copy(perp.begin(), perp.end(), k_perp);
      }
      return TRIK_OK;
    });
  }

  trik_status trik_certify(trik_kernel *k, const double *rho, size_t n, double tol,
                           trik_pd_verdict *out)
  {
    return guarded([&] {
      const auto &kk = kernel_of(k);
      require(out != nullptr, "null output");
      require(tol >= 0.0 && std::isfinite(tol), "tolerance must be finite and >= 0");
      const trik::PdVerdict v =
          trik::certify_pd(kk, grid_or(rho, n, trik::default_rho_grid(kk)), tol);
      *out = {v.positive ? 1 : 0, v.strictly ? 1 : 0, v.min_h_par,   v.min_h_perp, v.witness_rho,
              v.tolerance,       v.grid_min,         v.grid_max,    v.grid_points};
      k->certification = !v.positive  ? trik::Certification::Negative
                         : v.strictly ? trik::Certification::Strict
                                      : trik::Certification::Positive;
      k->kernel = std::make_shared<const trik::TriKernel>(
          trik::with_certification(*k->kernel, k->certification));
      return TRIK_OK;
    });
  }

  trik_status trik_write_spectrum_csv(const trik_kernel *k, const double *rho, size_t n,
                                      const char *path)
  {
    return guarded([&] {
      const auto &kk = kernel_of(k);
      const trik::Spectrum s = trik::forward_map(kk, grid_or(rho, n, trik::default_rho_grid(kk)));
      std::ofstream os = open_out(path);
      trik::write_spectrum_csv(os, s);
      if (!os)
      {
        return fail(TRIK_ERR_IO, std::string("write failed: ") + path);
      }
      return TRIK_OK;
    });
  }

  trik_status trik_hodge_split(const trik_kernel *k, const double *rho, size_t n_rho,
                               const double *r, size_t n_r, trik_hodge **out)
  {
    return guarded([&] {
      const auto &kk = kernel_of(k);
      require(out != nullptr, "null output");
      trik::HodgeGrids grids;
      grids.rho = grid_or(rho, n_rho, {});
      grids.r = grid_or(r, n_r, {});
      *out = new trik_hodge{trik::hodge_split(kk, grids)};
      return TRIK_OK;
    });
  }

  void trik_hodge_destroy(trik_hodge *h)
  {
    delete h;
  }

  size_t trik_hodge_size(const trik_hodge *h)
  {
    return h != nullptr ? h->result.r.size() : 0;
  }

  void trik_hodge_table(const trik_hodge *h, double *r, double *k1_par, double *k1_perp,
                        double *k2_par, double *k2_perp)
  {
    if (h == nullptr)
    {
      return;
    }
    const auto copy = [](const std::vector<double> &v, double *dst) {
      if (dst)
      {
        std::copy(v.begin(), v.end(), dst);
      }
    };
    copy(h->result.r, r);
    copy(h->result.k1_par, k1_par);
    copy(h->result.k1_perp, k1_perp);
    copy(h->result.k2_par, k2_par);
    copy(h->result.k2_perp, k2_perp);
  }

  int trik_hodge_heavy_tail(const trik_hodge *h)
  {
    return h != nullptr && h->result.heavy_tail ? 1 : 0;
  }

  const char *trik_hodge_warning(const trik_hodge *h)
  {
    return h != nullptr ? h->result.warning.c_str() : "";
  }

  trik_status trik_hodge_component(const trik_hodge *h, int which, trik_kernel **out)
  {
    return guarded([&] {
      require(h != nullptr && out != nullptr, "null argument");
      require(which == 0 || which == 1, "component index must be 0 or 1");
      *out = wrap(which == 0 ? h->result.curl_free : h->result.div_free, std::nullopt);
      return TRIK_OK;
    });
  }

  trik_status trik_l2_inner_product(const trik_kernel *k1, const trik_kernel *k2, double radius,
                                    double *out)
  {
    return guarded([&] {
      require(out != nullptr, "null output");
      *out = trik::l2_inner_product(kernel_of(k1), kernel_of(k2), radius);
      return TRIK_OK;
    });
  }

  trik_status trik_field_eval(const trik_kernel *k, size_t n, const double *centers,
                              const double *momenta, size_t n_points, const double *points,
                              double *out)
  {
    return guarded([&] {
      const auto &kk = kernel_of(k);
      require(out != nullptr || n_points == 0, "null output");
      const trik::KernelField field(k->kernel, read_rows(centers, n, kk.dim),
                                    read_rows(momenta, n, kk.dim));
      const Eigen::MatrixXd pts = read_rows(points, n_points, kk.dim);
      for (std::size_t i = 0; i < n_points; ++i)
      {
        const Eigen::VectorXd v = field(pts.row(static_cast<Eigen::Index>(i)).transpose());
        std::copy(v.data(), v.data() + kk.dim, out + i * kk.dim);
      }
      return TRIK_OK;
    });
  }

  trik_status trik_divergence(const trik_kernel *k, const double *x, const double *alpha,
                              double *out)
  {
    return guarded([&] {
      const auto &kk = kernel_of(k);
      require(out != nullptr, "null output");
      *out = trik::divergence_at(kk, read_vector(x, kk.dim), read_vector(alpha, kk.dim));
      return TRIK_OK;
    });
  }

  trik_status trik_curl_magnitude(const trik_kernel *k, const double *x, const double *alpha,
                                  double *out)
  {
    return guarded([&] {
      const auto &kk = kernel_of(k);
      require(out != nullptr, "null output");
      *out = trik::curl_magnitude_at(kk, read_vector(x, kk.dim), read_vector(alpha, kk.dim));
      return TRIK_OK;
    });
  }

  trik_status trik_curl(const trik_kernel *k, const double *x, const double *alpha, double *out)
  {
    return guarded([&] {
      const auto &kk = kernel_of(k);
      require(out != nullptr, "null output");
      const Eigen::VectorXd xv = read_vector(x, kk.dim), av = read_vector(alpha, kk.dim);
      if (kk.dim == 2)
      {
        *out = trik::curl_2d(kk, xv, av);
      }
      else
      {
        const Eigen::Vector3d c = trik::curl_3d(kk, xv, av);
        std::copy(c.data(), c.data() + 3, out);
      }
      return TRIK_OK;
    });
  }

  trik_status trik_block_matrix(const trik_kernel *k, size_t n, const double *points, double *out)
  {
    return guarded([&] {
      const auto &kk = kernel_of(k);
      require(out != nullptr, "null output");
      const trik::LandmarkConfig cfg(read_rows(points, n, kk.dim));
      write_rows(trik::assemble_block_matrix(kk, cfg).matrix, out);
      return TRIK_OK;
    });
  }

  trik_status trik_interpolate(const trik_kernel *k, size_t n, const double *points,
                               const double *targets, double *momenta_out,
                               trik_interpolation *info)
  {
    return guarded([&] {
      const auto &kk = kernel_of(k);
      require(momenta_out != nullptr, "null output");
      const trik::LandmarkConfig cfg(read_rows(points, n, kk.dim));
      const auto res = trik::interpolate(kk, cfg, read_rows(targets, n, kk.dim));
      write_rows(res.momenta, momenta_out);
      if (info)
      {
        *info = {res.norm_sq, res.jitter_applied ? 1 : 0, res.jitter};
      }
      return TRIK_OK;
    });
  }

  trik_status trik_write_field_csv(const trik_kernel *k, size_t n, const double *centers,
                                   const double *momenta, const double *lower,
                                   const double *upper, const int *counts, const char *path)
  {
    return guarded([&] {
      const auto &kk = kernel_of(k);
      const trik::KernelField field(k->kernel, read_rows(centers, n, kk.dim),
                                    read_rows(momenta, n, kk.dim));
      const trik::GridSpec grid = grid_spec_of(kk.dim, lower, upper, counts);
      std::ofstream os = open_out(path);
      trik::write_field_csv(os, field, grid);
      if (!os)
      {
        return fail(TRIK_ERR_IO, std::string("write failed: ") + path);
      }
      return TRIK_OK;
    });
  }

  trik_status trik_hamiltonian(const trik_kernel *k, size_t n, const double *q, const double *p,
                               double *out)
  {
    return guarded([&] {
      const auto &kk = kernel_of(k);
      require(out != nullptr, "null output");
      *out = trik::hamiltonian(kk, state_of(kk, n, q, p));
      return TRIK_OK;
    });
  }

  trik_status trik_hamilton_rhs(const trik_kernel *k, size_t n, const double *q, const double *p,
                                double *dq, double *dp)
  {
    return guarded([&] {
      const auto &kk = kernel_of(k);
      require(dq != nullptr && dp != nullptr, "null output");
      const auto [a, b] = trik::hamilton_rhs(kk, state_of(kk, n, q, p));
      write_rows(a, dq);
      write_rows(b, dp);
      return TRIK_OK;
    });
  }

  trik_status trik_shoot(const trik_kernel *k, size_t n, const double *q0, const double *p0,
                         const trik_integrator *cfg, trik_trajectory **out)
  {
    return guarded([&] {
      const auto &kk = kernel_of(k);
      require(out != nullptr, "null output");
      const trik::LandmarkConfig q(read_rows(q0, n, kk.dim));
      *out = new trik_trajectory{trik::shoot(kk, q, read_rows(p0, n, kk.dim), integrator_of(cfg))};
      return TRIK_OK;
    });
  }

  void trik_trajectory_destroy(trik_trajectory *traj)
  {
    delete traj;
  }

  size_t trik_trajectory_samples(const trik_trajectory *traj)
  {
    return traj != nullptr ? traj->traj.states.size() : 0;
  }

  size_t trik_trajectory_landmarks(const trik_trajectory *traj)
  {
    return traj != nullptr && !traj->traj.states.empty()
               ? static_cast<size_t>(traj->traj.states.front().q.rows())
               : 0;
  }

  int trik_trajectory_dim(const trik_trajectory *traj)
  {
    return traj != nullptr && !traj->traj.states.empty()
               ? static_cast<int>(traj->traj.states.front().q.cols())
               : 0;
  }

  trik_status trik_trajectory_state(const trik_trajectory *traj, size_t index, double *t,
                                    double *q, double *p, double *hamiltonian)
  {
    return guarded([&] {
      require(traj != nullptr, "null trajectory");
      require(index < traj->traj.states.size(), "sample index out of range");
      const trik::PhaseState &s = traj->traj.states[index];
      if (t)
      {
        *t = s.t;
      }
      if (q)
      {
        write_rows(s.q, q);
      }
      if (p)
      {
        write_rows(s.p, p);
      }
      if (hamiltonian)
      {
        *hamiltonian = index < traj->traj.hamiltonian_series.size()
                           ? traj->traj.hamiltonian_series[index]
                           : std::nan("");
      }
      return TRIK_OK;
    });
  }

  double trik_trajectory_max_drift(const trik_trajectory *traj)
  {
    if (traj == nullptr || traj->traj.hamiltonian_series.empty())
    {
      return 0.0;
    }
    const auto &h = traj->traj.hamiltonian_series;
    double m = 0.0;
    for (double v : h)
    {
      m = std::max(m, std::abs(v - h.front()));
    }
    return m;
  }

  trik_status trik_path_energy(const trik_kernel *k, const trik_trajectory *traj, double *out)
  {
    return guarded([&] {
      require(traj != nullptr && out != nullptr, "null argument");
      *out = trik::path_energy(kernel_of(k), traj->traj);
      return TRIK_OK;
    });
  }

  trik_status trik_trajectory_write_csv(const trik_trajectory *traj, const char *path)
  {
    return guarded([&] {
      require(traj != nullptr, "null trajectory");
      std::ofstream os = open_out(path);
      trik::write_trajectory_csv(os, traj->traj);
      if (!os)
      {
        return fail(TRIK_ERR_IO, std::string("write failed: ") + path);
      }
      return TRIK_OK;
    });
  }

  trik_status trik_trajectory_read_csv(const char *path, trik_trajectory **out)
  {
    return guarded([&] {
      require(path != nullptr && out != nullptr, "null argument");
      std::ifstream is(path);
      if (!is)
      {
        return fail(TRIK_ERR_IO, std::string("cannot open '") + path + "'");
      }
      *out = new trik_trajectory{trik::read_trajectory_csv(is)};
      return TRIK_OK;
    });
  }

  trik_status trik_flow_grid_compute(const trik_kernel *k, const trik_trajectory *traj,
                                     const double *lower, const double *upper, const int *counts,
                                     const trik_integrator *cfg, trik_flow_grid **out)
  {
    return guarded([&] {
      const auto &kk = kernel_of(k);
      require(traj != nullptr && out != nullptr, "null argument");
      const trik::GridSpec grid = grid_spec_of(kk.dim, lower, upper, counts);
      *out = new trik_flow_grid{trik::flow_grid(kk, traj->traj, grid, integrator_of(cfg))};
      return TRIK_OK;
    });
  }

  void trik_flow_grid_destroy(trik_flow_grid *g)
  {
    delete g;
  }

  size_t trik_flow_grid_size(const trik_flow_grid *g)
  {
    return g != nullptr ? static_cast<size_t>(g->grid.original.rows()) : 0;
  }

  trik_status trik_flow_grid_point(const trik_flow_grid *g, size_t index, double *original,
                                   double *transported, double *det, double *tangent_det)
  {
    return guarded([&] {
      require(g != nullptr, "null flow grid");
      require(index < static_cast<std::size_t>(g->grid.original.rows()), "index out of range");
      const auto row = static_cast<Eigen::Index>(index);
      const auto d = g->grid.original.cols();
      for (Eigen::Index i = 0; i < d; ++i)
      {
        if (original)
        {
          original[i] = g->grid.original(row, i);
        }
        if (transported)
        {
          transported[i] = g->grid.transported(row, i);
        }
      }
      if (det)
      {
        *det = g->grid.jacobian_det[index];
      }
      if (tangent_det)
      {
        *tangent_det = g->grid.tangent_det[index];
      }
      return TRIK_OK;
    });
  }

  double trik_flow_grid_max_det_deviation(const trik_flow_grid *g)
  {
    return g != nullptr ? g->grid.max_det_deviation() : std::nan("");
  }

  double trik_flow_grid_max_tangent_deviation(const trik_flow_grid *g)
  {
    return g != nullptr ? g->grid.max_tangent_deviation() : std::nan("");
  }

  trik_status trik_flow_grid_write_csv(const trik_flow_grid *g, const char *path)
  {
    return guarded([&] {
      require(g != nullptr, "null flow grid");
      std::ofstream os = open_out(path);
      trik::write_flow_grid_csv(os, g->grid);
      if (!os)
      {
        return fail(TRIK_ERR_IO, std::string("write failed: ") + path);
      }
      return TRIK_OK;
    });
  }

  trik_status trik_exp_map_fan(const trik_kernel *k, size_t n, const double *q0, size_t n_params,
                               const double *params, const double *momenta,
                               const trik_integrator *cfg, trik_fan **out)
  {
    return guarded([&] {
      const auto &kk = kernel_of(k);
      require(out != nullptr, "null output");
      require(n_params == 0 || (params != nullptr && momenta != nullptr), "null fan arrays");
      const trik::LandmarkConfig q(read_rows(q0, n, kk.dim));
      std::vector<trik::MomentaSet> ps;
      for (std::size_t j = 0; j < n_params; ++j)
      {
        ps.push_back(read_rows(momenta + j * n * kk.dim, n, kk.dim));
      }
      const trik::FanResult fan =
          trik::exp_map_fan(kk, q, {params, params + n_params}, ps, integrator_of(cfg));
      auto res = std::make_unique<trik_fan>();
      res->params = fan.params;
      res->errors = fan.errors;
      for (const auto &t : fan.trajectories)
      {
        res->trajectories.push_back(t.states.empty() ? nullptr
                                                     : std::make_unique<trik_trajectory>(
                                                           trik_trajectory{t}));
      }
      *out = res.release();
      return TRIK_OK;
    });
  }

  void trik_fan_destroy(trik_fan *fan)
  {
    delete fan;
  }

  size_t trik_fan_size(const trik_fan *fan)
  {
    return fan != nullptr ? fan->params.size() : 0;
  }

  double trik_fan_param(const trik_fan *fan, size_t index)
  {
    return fan != nullptr && index < fan->params.size() ? fan->params[index] : std::nan("");
  }

  const trik_trajectory *trik_fan_trajectory(const trik_fan *fan, size_t index)
  {
    return fan != nullptr && index < fan->trajectories.size() ? fan->trajectories[index].get()
                                                              : nullptr;
  }

  const char *trik_fan_error(const trik_fan *fan, size_t index)
  {
    return fan != nullptr && index < fan->errors.size() ? fan->errors[index].c_str() : "";
  }

}  // extern "C"

// SPDX-License-Identifier: Apache-2.0

#include "trik/spline.hpp"

#include <algorithm>

#include "trik/error.hpp"

namespace trik
{

CubicSpline::CubicSpline(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)), m_(x_.size(), 0.0)
{
  const std::size_t n = x_.size();
  if (n < 2 || y_.size() != n)
  {
    throw Error(ErrorKind::InvalidArgument, "CubicSpline: need >= 2 matching samples");
  }
  for (std::size_t i = 1; i < n; ++i)
  {
    if (!(x_[i] > x_[i - 1]))
    {
      throw Error(ErrorKind::InvalidArgument, "CubicSpline: abscissae must increase strictly");
    }
  }
  if (n == 2)
  {
    return;
  }
  // Tridiagonal solve (Thomas) for interior second derivatives; natural ends.
  std::vector<double> c(n, 0.0), d(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i)
  {
    const double h0 = x_[i] - x_[i - 1], h1 = x_[i + 1] - x_[i];
    const double diag = 2.0 * (h0 + h1);
    const double rhs = 6.0 * ((y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0);
    const double denom = diag - h0 * c[i - 1];
    c[i] = h1 / denom;
    d[i] = (rhs - h0 * d[i - 1]) / denom;
  }
  for (std::size_t i = n - 2; i >= 1; --i)
  {
    m_[i] = d[i] - c[i] * m_[i + 1];
  }
}

std::size_t CubicSpline::locate(double t) const
{
  auto it = std::upper_bound(x_.begin(), x_.end(), t);
  std::size_t i = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
  return std::min(i, x_.size() - 2);
}

double CubicSpline::operator()(double t) const
{
  const std::size_t i = locate(t);
  const double h = x_[i + 1] - x_[i];
  const double a = (x_[i + 1] - t) / h, b = (t - x_[i]) / h;
  return a * y_[i] + b * y_[i + 1] +
         ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
}

double CubicSpline::derivative(double t) const
{
  const std::size_t i = locate(t);
  const double h = x_[i + 1] - x_[i];
  const double a = (x_[i + 1] - t) / h, b = (t - x_[i]) / h;
  return (y_[i + 1] - y_[i]) / h +
         ((1.0 - 3.0 * a * a) * m_[i] + (3.0 * b * b - 1.0) * m_[i + 1]) * h / 6.0;
}

}  // namespace trik

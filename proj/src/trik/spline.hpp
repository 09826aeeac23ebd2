// SPDX-License-Identifier: Apache-2.0

#ifndef TRIK_SPLINE_HPP
#define TRIK_SPLINE_HPP

#include <vector>

namespace trik
{

// Natural cubic spline through (x_i, y_i), x strictly increasing. Outside [x_0, x_n] the
// spline is not extended; callers decide what happens there.
class CubicSpline
{
public:
  CubicSpline() = default;
  CubicSpline(std::vector<double> x, std::vector<double> y);

  double operator()(double t) const;
  double derivative(double t) const;

  double front() const { return x_.front(); }
  double back() const { return x_.back(); }
  bool empty() const { return x_.empty(); }

private:
  std::size_t locate(double t) const;

  std::vector<double> x_, y_, m_;  // m_: second derivatives at knots
};

}  // namespace trik

#endif  // TRIK_SPLINE_HPP

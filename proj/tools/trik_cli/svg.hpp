// SPDX-License-Identifier: Apache-2.0

#ifndef TRIK_CLI_SVG_HPP
#define TRIK_CLI_SVG_HPP

#include <string>
#include <utility>
#include <vector>

namespace trik_cli
{

// Self-contained SVG canvas over a world-coordinate box (y axis pointing up).
class Svg
{
public:
  Svg(double xmin, double xmax, double ymin, double ymax, int width_px = 800);

  void metadata(const std::string &key, const std::string &value);
  void title(const std::string &text);
  void frame();
  void line(double x0, double y0, double x1, double y1, const std::string &color,
            double width_px = 1.0, double opacity = 1.0);
  void polyline(const std::vector<std::pair<double, double>> &pts, const std::string &color,
                double width_px = 1.0, double opacity = 1.0);
  void circle(double x, double y, double radius_px, const std::string &color);
  // Arrow from (x, y) to (x + dx, y + dy) in world units.
  void arrow(double x, double y, double dx, double dy, const std::string &color);
  void label(double x, double y, const std::string &text, const std::string &color = "#000");

  std::string str() const;
  void save(const std::string &path) const;

private:
  double px(double x) const;
  double py(double y) const;

  double xmin_, xmax_, ymin_, ymax_;
  int width_, height_;
  double margin_ = 30.0;
  std::string title_;
  std::vector<std::pair<std::string, std::string>> meta_;
  std::string body_;
};

}  // namespace trik_cli

#endif  // TRIK_CLI_SVG_HPP

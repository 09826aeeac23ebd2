// SPDX-License-Identifier: Apache-2.0

#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <fmt/format.h>

namespace trik_cli
{

namespace
{

std::string escape(const std::string &s)
{
  std::string out;
  for (char c : s)
  {
    switch (c)
    {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

}  // namespace

Svg::Svg(double xmin, double xmax, double ymin, double ymax, int width_px)
    : xmin_(xmin), xmax_(xmax), ymin_(ymin), ymax_(ymax), width_(width_px)
{
  if (!(xmax > xmin) || !(ymax > ymin))
  {
    throw std::invalid_argument("svg: empty world box");
  }
  const double inner = width_ - 2.0 * margin_;
  height_ = static_cast<int>(std::lround(inner * (ymax - ymin) / (xmax - xmin) + 2.0 * margin_));
}

double Svg::px(double x) const
{
  return margin_ + (x - xmin_) / (xmax_ - xmin_) * (width_ - 2.0 * margin_);
}

double Svg::py(double y) const
{
  return height_ - margin_ - (y - ymin_) / (ymax_ - ymin_) * (height_ - 2.0 * margin_);
}

void Svg::metadata(const std::string &key, const std::string &value)
{
  meta_.emplace_back(key, value);
}

void Svg::title(const std::string &text)
{
  title_ = text;
}

void Svg::frame()
{
  body_ += fmt::format(
      "<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"none\" "
      "stroke=\"#888\" stroke-width=\"0.8\"/>\n",
      px(xmin_), py(ymax_), px(xmax_) - px(xmin_), py(ymin_) - py(ymax_));
}

void Svg::line(double x0, double y0, double x1, double y1, const std::string &color,
               double width_px, double opacity)
{
  body_ += fmt::format(
      "<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"{}\" "
      "stroke-width=\"{:.2f}\" stroke-opacity=\"{:.2f}\"/>\n",
      px(x0), py(y0), px(x1), py(y1), color, width_px, opacity);
}

void Svg::polyline(const std::vector<std::pair<double, double>> &pts, const std::string &color,
                   double width_px, double opacity)
{
  if (pts.size() < 2)
  {
    return;
  }
  std::string coords;
  for (const auto &[x, y] : pts)
  {
    if (!std::isfinite(x) || !std::isfinite(y))
    {
      continue;
    }
    coords += fmt::format("{:.2f},{:.2f} ", px(x), py(y));
  }
  body_ += fmt::format(
      "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"{:.2f}\" "
      "stroke-opacity=\"{:.2f}\"/>\n",
      coords, color, width_px, opacity);
}

void Svg::circle(double x, double y, double radius_px, const std::string &color)
{
  body_ += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"{:.2f}\" fill=\"{}\"/>\n", px(x),
                       py(y), radius_px, color);
}

void Svg::arrow(double x, double y, double dx, double dy, const std::string &color)
{
  const double x0 = px(x), y0 = py(y), x1 = px(x + dx), y1 = py(y + dy);
  const double len = std::hypot(x1 - x0, y1 - y0);
  if (!(len > 0.3))
  {
    return;
  }
  const double ux = (x1 - x0) / len, uy = (y1 - y0) / len;
  const double head = std::min(5.0, 0.4 * len);
  const double hx = x1 - head * ux, hy = y1 - head * uy;
  body_ += fmt::format(
      "<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"{}\" "
      "stroke-width=\"1\"/>\n"
      "<polygon points=\"{:.2f},{:.2f} {:.2f},{:.2f} {:.2f},{:.2f}\" fill=\"{}\"/>\n",
      x0, y0, x1, y1, color, x1, y1, hx - 0.5 * head * uy, hy + 0.5 * head * ux,
      hx + 0.5 * head * uy, hy - 0.5 * head * ux, color);
}

void Svg::label(double x, double y, const std::string &text, const std::string &color)
{
  body_ += fmt::format(
      "<text x=\"{:.2f}\" y=\"{:.2f}\" font-family=\"sans-serif\" font-size=\"12\" "
      "fill=\"{}\">{}</text>\n",
      px(x), py(y), color, escape(text));
}

std::string Svg::str() const
{
  std::string out = fmt::format(
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" "
      "viewBox=\"0 0 {} {}\">\n",
      width_, height_, width_, height_);
  out += "<metadata>\n";
  for (const auto &[k, v] : meta_)
  {
    out += fmt::format("  <entry key=\"{}\">{}</entry>\n", escape(k), escape(v));
  }
  out += "</metadata>\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"#fff\"/>\n";
  if (!title_.empty())
  {
    out += fmt::format(
        "<text x=\"{:.2f}\" y=\"18\" font-family=\"sans-serif\" font-size=\"14\" "
        "text-anchor=\"middle\">{}</text>\n",
        width_ / 2.0, escape(title_));
  }
  out += body_;
  out += "</svg>\n";
  return out;
}

void Svg::save(const std::string &path) const
{
  std::ofstream os(path);
  if (!os)
  {
    throw std::ios_base::failure("cannot open '" + path + "' for writing");
  }
  os << str();
  if (!os)
  {
    throw std::ios_base::failure("write failed: " + path);
  }
}

}  // namespace trik_cli

#include "avln/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace avln {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

std::string render_svg(const PlotInput& in, double ppm) {
  if (!in.scene) throw InvalidArgument("plot needs a scene");
  if (!(ppm > 0.0)) throw InvalidArgument("plot scale must be positive");
  const Scene& scene = *in.scene;
  const Bounds& b = scene.bounds();
  const double w = (b.max.x - b.min.x) * ppm;
  const double h = (b.max.y - b.min.y) * ppm;
  // World y grows upward on the page.
  auto sx = [&](double x) { return (x - b.min.x) * ppm; };
  auto sy = [&](double y) { return (b.max.y - y) * ppm; };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(w) << "\" height=\"" << fmt(h)
    << "\" viewBox=\"0 0 " << fmt(w) << ' ' << fmt(h) << "\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  if (!in.title.empty()) o << "<title>" << in.title << "</title>\n";

  const VoxelDims& d = scene.dims();
  const double v = scene.voxel_size();
  for (std::uint32_t iy = 0; iy < d.ny; ++iy)
    for (std::uint32_t ix = 0; ix < d.nx; ++ix) {
      std::uint32_t top = 0;
      for (std::uint32_t iz = d.nz; iz-- > 1;)
        if (scene.voxel(ix, iy, iz)) {
          top = iz;
          break;
        }
      if (top == 0) continue;
      const int shade = 200 - static_cast<int>(150.0 * top / d.nz);
      o << "<rect x=\"" << fmt(sx(b.min.x + ix * v)) << "\" y=\"" << fmt(sy(b.min.y + (iy + 1) * v))
        << "\" width=\"" << fmt(v * ppm) << "\" height=\"" << fmt(v * ppm) << "\" fill=\"rgb("
        << shade << ',' << shade << ',' << shade << ")\"/>\n";
    }

  if (in.bev) {
    double peak = 0.0;
    std::vector<double> norms;
    for (const auto& [cell, state] : in.bev->cells) {
      double s = 0.0;
      for (double x : state) s += x * x;
      norms.push_back(std::sqrt(s));
      peak = std::max(peak, norms.back());
    }
    std::size_t k = 0;
    const double cs = in.bev->cell_size;
    for (const auto& [cell, state] : in.bev->cells) {
      const double cx = in.bev->origin.x + cell.u * cs;
      const double cy = in.bev->origin.y + cell.v * cs;
      const double alpha = peak > 0.0 ? 0.15 + 0.5 * norms[k] / peak : 0.15;
      o << "<rect x=\"" << fmt(sx(cx - cs / 2)) << "\" y=\"" << fmt(sy(cy + cs / 2))
        << "\" width=\"" << fmt(cs * ppm) << "\" height=\"" << fmt(cs * ppm)
        << "\" fill=\"#ff9900\" fill-opacity=\"" << fmt(alpha) << "\"/>\n";
      ++k;
    }
  }

  auto polyline = [&](const std::vector<Vec3>& pts, const char* color) {
    if (pts.empty()) return;
    o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (const Vec3& p : pts) o << fmt(sx(p.x)) << ',' << fmt(sy(p.y)) << ' ';
    o << "\"/>\n";
  };
  if (in.gt) {
    polyline(in.gt->points(), "#1a9850");
    const Vec3 g = in.gt->back();
    o << "<circle cx=\"" << fmt(sx(g.x)) << "\" cy=\"" << fmt(sy(g.y)) << "\" r=\""
      << fmt(in.success_radius * ppm) << "\" fill=\"none\" stroke=\"#1a9850\" stroke-dasharray=\"4 3\"/>\n";
  }
  polyline(in.executed, "#2166ac");
  if (!in.executed.empty()) {
    const Vec3 e = in.executed.back();
    o << "<circle cx=\"" << fmt(sx(e.x)) << "\" cy=\"" << fmt(sy(e.y))
      << "\" r=\"4\" fill=\"#d73027\"/>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace avln

#include "tap/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace tap {

namespace {

constexpr double kScale = 24.0;
constexpr double kMargin = 16.0;
constexpr double kIsoCos = 0.8660254037844386;
constexpr double kIsoSin = 0.5;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

struct Rgb {
  int r, g, b;
};

Rgb hsv_to_rgb(double h, double s, double v) {
  const double c = v * s;
  const double hp = h / 60.0;
  const double x = c * (1.0 - std::fabs(std::fmod(hp, 2.0) - 1.0));
  double r = 0, g = 0, b = 0;
  if (hp < 1) { r = c; g = x; }
  else if (hp < 2) { r = x; g = c; }
  else if (hp < 3) { g = c; b = x; }
  else if (hp < 4) { g = x; b = c; }
  else if (hp < 5) { r = x; b = c; }
  else { r = c; b = x; }
  const double m = v - c;
  auto ch = [&](double t) {
    return std::clamp(static_cast<int>(std::lround((t + m) * 255.0)), 0, 255);
  };
  return Rgb{ch(r), ch(g), ch(b)};
}

Rgb id_rgb(int id) {
  const double h = std::fmod(static_cast<double>(id) * 137.50776405003785,
                             360.0);
  return hsv_to_rgb(h, 0.62, 0.88);
}

std::string hex(const Rgb& c) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", c.r, c.g, c.b);
  return buf;
}

Rgb shade(const Rgb& c, double f) {
  auto ch = [&](int t) {
    return std::clamp(static_cast<int>(std::lround(t * f)), 0, 255);
  };
  return Rgb{ch(c.r), ch(c.g), ch(c.b)};
}

Rgb lighten(const Rgb& c, double f) {
  auto ch = [&](int t) {
    return std::clamp(
        static_cast<int>(std::lround(t + (255.0 - t) * f)), 0, 255);
  };
  return Rgb{ch(c.r), ch(c.g), ch(c.b)};
}

struct PlacedView {
  int id;
  int x, y, z;
  Extents e;
};

std::string svg_open(double w, double h) {
  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"";
  out += fmt(w) + "\" height=\"" + fmt(h) + "\" viewBox=\"0 0 " + fmt(w) +
         " " + fmt(h) + "\">\n";
  out += "<rect x=\"0\" y=\"0\" width=\"" + fmt(w) + "\" height=\"" + fmt(h) +
         "\" fill=\"#ffffff\"/>\n";
  return out;
}

// Flat elevation: x right, y up, one container per horizontal band.
std::string render_flat(const std::vector<PlacedView>& boxes,
                        const std::vector<int>& widths, int height_cells) {
  int total_w = 0;
  for (std::size_t i = 0; i < widths.size(); ++i)
    total_w += widths[i] + (i + 1 < widths.size() ? 2 : 0);
  const double w = total_w * kScale + 2 * kMargin;
  const double h = height_cells * kScale + 2 * kMargin;
  std::string out = svg_open(w, h);

  int off = 0;
  for (std::size_t c = 0; c < widths.size(); ++c) {
    const double x0 = kMargin + off * kScale;
    out += "<rect class=\"container\" x=\"" + fmt(x0) + "\" y=\"" +
           fmt(kMargin) + "\" width=\"" + fmt(widths[c] * kScale) +
           "\" height=\"" + fmt(height_cells * kScale) +
           "\" fill=\"#f7f7f7\" stroke=\"#888888\" stroke-width=\"1\"/>\n";
    off += widths[c] + 2;
  }

  std::vector<int> starts(widths.size(), 0);
  {
    int acc = 0;
    for (std::size_t c = 0; c < widths.size(); ++c) {
      starts[c] = acc;
      acc += widths[c] + 2;
    }
  }

  for (const auto& b : boxes) {
    const double x = kMargin + (starts[static_cast<std::size_t>(b.z)] + b.x) *
                                   kScale;
    const double y = kMargin + (height_cells - b.y - b.e.h) * kScale;
    const double bw = b.e.w * kScale;
    const double bh = b.e.h * kScale;
    out += "<rect class=\"box\" x=\"" + fmt(x) + "\" y=\"" + fmt(y) +
           "\" width=\"" + fmt(bw) + "\" height=\"" + fmt(bh) + "\" fill=\"" +
           hex(id_rgb(b.id)) +
           "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
    out += "<text x=\"" + fmt(x + bw / 2) + "\" y=\"" + fmt(y + bh / 2) +
           "\" font-family=\"monospace\" font-size=\"10\" fill=\"#222222\" "
           "text-anchor=\"middle\" dominant-baseline=\"central\">" +
           std::to_string(b.id) + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

struct Iso {
  double u, v;
};

Iso project(double x, double y, double z) {
  return Iso{(x - z) * kIsoCos, (x + z) * kIsoSin - y};
}

std::string polygon(const std::vector<Iso>& pts, const Rgb& fill,
                    const char* cls) {
  std::string out = "<polygon class=\"";
  out += cls;
  out += "\" points=\"";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i) out += " ";
    out += fmt(pts[i].u) + "," + fmt(pts[i].v);
  }
  out += "\" fill=\"" + hex(fill) +
         "\" stroke=\"#333333\" stroke-width=\"0.75\"/>\n";
  return out;
}

// Isometric projection: the top, the +z face, and the +x face are visible.
// Painter order: far to near by min-corner (x + z), bottom up on ties.
std::string render_iso(const std::vector<PlacedView>& boxes,
                       const std::vector<int>& widths, int depth_cells,
                       int height_cells) {
  std::vector<int> starts(widths.size(), 0);
  {
    int acc = 0;
    for (std::size_t c = 0; c < widths.size(); ++c) {
      starts[c] = acc;
      acc += widths[c] + 2;
    }
  }

  const std::vector<PlacedView>& world = boxes;

  double min_u = 0, max_u = 0, min_v = 0, max_v = 0;
  bool first = true;
  auto grow = [&](const Iso& p) {
    if (first) {
      min_u = max_u = p.u;
      min_v = max_v = p.v;
      first = false;
    } else {
      min_u = std::min(min_u, p.u);
      max_u = std::max(max_u, p.u);
      min_v = std::min(min_v, p.v);
      max_v = std::max(max_v, p.v);
    }
  };

  for (std::size_t c = 0; c < widths.size(); ++c) {
    const double x0 = starts[c], x1 = starts[c] + widths[c];
    grow(project(x0, 0, 0));
    grow(project(x1, 0, 0));
    grow(project(x0, 0, depth_cells));
    grow(project(x1, 0, depth_cells));
    grow(project(x0, height_cells, 0));
    grow(project(x1, height_cells, depth_cells));
  }
  for (const auto& b : world) {
    grow(project(b.x, b.y, b.z));
    grow(project(b.x + b.e.w, b.y + b.e.h, b.z + b.e.d));
    grow(project(b.x + b.e.w, b.y, b.z));
    grow(project(b.x, b.y + b.e.h, b.z + b.e.d));
  }

  const double du = kMargin - min_u * kScale;
  const double dv = kMargin - min_v * kScale;
  auto at = [&](double x, double y, double z) {
    const Iso p = project(x, y, z);
    return Iso{p.u * kScale + du, p.v * kScale + dv};
  };

  const double w = (max_u - min_u) * kScale + 2 * kMargin;
  const double h = (max_v - min_v) * kScale + 2 * kMargin;
  std::string out = svg_open(w, h);

  for (std::size_t c = 0; c < widths.size(); ++c) {
    const double x0 = starts[c], x1 = starts[c] + widths[c];
    out += polygon({at(x0, 0, 0), at(x1, 0, 0), at(x1, 0, depth_cells),
                    at(x0, 0, depth_cells)},
                   Rgb{240, 240, 240}, "container");
  }

  std::vector<PlacedView> order = world;
  std::sort(order.begin(), order.end(),
            [](const PlacedView& a, const PlacedView& b) {
              if (a.x + a.z != b.x + b.z) return a.x + a.z < b.x + b.z;
              if (a.y != b.y) return a.y < b.y;
              if (a.x != b.x) return a.x < b.x;
              return a.id < b.id;
            });

  for (const auto& b : order) {
    const Rgb base = id_rgb(b.id);
    const double x0 = b.x, x1 = b.x + b.e.w;
    const double y0 = b.y, y1 = b.y + b.e.h;
    const double z0 = b.z, z1 = b.z + b.e.d;
    out += polygon({at(x0, y1, z0), at(x1, y1, z0), at(x1, y1, z1),
                    at(x0, y1, z1)},
                   lighten(base, 0.35), "box");
    out += polygon({at(x0, y0, z1), at(x1, y0, z1), at(x1, y1, z1),
                    at(x0, y1, z1)},
                   base, "box");
    out += polygon({at(x1, y0, z0), at(x1, y0, z1), at(x1, y1, z1),
                    at(x1, y1, z0)},
                   shade(base, 0.72), "box");
  }
  out += "</svg>\n";
  return out;
}

int content_height(const std::vector<PlacedView>& boxes) {
  int top = 0;
  for (const auto& b : boxes) top = std::max(top, b.y + b.e.h);
  return std::max(top, 3);
}

}  // namespace

std::string box_color(int id) { return hex(id_rgb(id)); }

std::string render_pile_svg(const ProblemInstance& inst) {
  std::vector<PlacedView> boxes;
  for (const auto& pb : inst.initial_placements) {
    const Extents e = placed_extents(inst, pb);
    boxes.push_back(PlacedView{pb.box_id, pb.x, pb.y, pb.z, e});
  }
  if (inst.dims_mode == 2) {
    std::vector<PlacedView> flat = boxes;
    for (auto& b : flat) b.z = 0;  // single band
    return render_flat(flat, {inst.init_width}, content_height(boxes));
  }
  return render_iso(boxes, {inst.init_width}, inst.init_depth,
                    content_height(boxes));
}

std::vector<std::string> render_solution_svg(
    const ProblemInstance& inst, const std::vector<PlacedBox>& steps) {
  std::vector<PlacedView> all;
  for (const auto& pb : steps) {
    const Extents e = placed_extents(inst, pb);
    all.push_back(PlacedView{pb.box_id, pb.x, pb.y, pb.z, e});
  }
  const int height_cells = content_height(all);
  const std::vector<int> widths(
      static_cast<std::size_t>(inst.container_count), inst.target_width);

  std::vector<int> starts(widths.size(), 0);
  {
    int acc = 0;
    for (std::size_t c = 0; c < widths.size(); ++c) {
      starts[c] = acc;
      acc += widths[c] + 2;
    }
  }

  std::vector<std::string> frames;
  for (std::size_t t = 0; t <= steps.size(); ++t) {
    std::vector<PlacedView> shown;
    for (std::size_t i = 0; i < t; ++i) {
      PlacedView v = all[i];
      const int ci = steps[i].container_idx;
      if (inst.dims_mode == 2) {
        v.z = ci;  // band index for the flat layout
      } else {
        v.x += starts[static_cast<std::size_t>(ci)];
      }
      shown.push_back(v);
    }
    if (inst.dims_mode == 2) {
      frames.push_back(render_flat(shown, widths, height_cells));
    } else {
      frames.push_back(render_iso(shown, widths, inst.target_depth,
                                  height_cells));
    }
  }
  return frames;
}

}  // namespace tap

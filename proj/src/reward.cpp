#include "tap/reward.hpp"

#include <Eigen/Dense>
#include <algorithm>

namespace tap {

namespace {

// Monotone chain over integer points, counter-clockwise, no duplicates.
std::vector<std::array<long long, 2>> convex_hull(
    std::vector<std::array<long long, 2>> pts) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  const std::size_t n = pts.size();
  if (n < 3) return pts;
  auto cross = [](const std::array<long long, 2>& o,
                  const std::array<long long, 2>& a,
                  const std::array<long long, 2>& b) {
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
  };
  std::vector<std::array<long long, 2>> hull(2 * n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = n - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

bool strictly_inside(const std::vector<std::array<long long, 2>>& hull,
                     long long px, long long py) {
  if (hull.size() < 3) return false;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const auto& a = hull[i];
    const auto& b = hull[(i + 1) % hull.size()];
    const long long c =
        (b[0] - a[0]) * (py - a[1]) - (b[1] - a[1]) * (px - a[0]);
    if (c <= 0) return false;
  }
  return true;
}

}  // namespace

bool is_stable(const ResolvedBox& b, const std::vector<ResolvedBox>& placed) {
  if (b.pb.y == 0) return true;

  // Support cells: columns of the bottom face where a box directly below
  // touches it. Doubled coordinates keep the center integral.
  std::vector<std::array<long long, 2>> corners;
  for (const auto& s : placed) {
    if (s.pb.box_id == b.pb.box_id && s.pb.container_idx == b.pb.container_idx &&
        s.pb.x == b.pb.x && s.pb.y == b.pb.y && s.pb.z == b.pb.z)
      continue;
    if (s.pb.container_idx != b.pb.container_idx) continue;
    if (s.pb.y + s.e.h != b.pb.y) continue;
    const int x0 = std::max(b.pb.x, s.pb.x);
    const int x1 = std::min(b.pb.x + b.e.w, s.pb.x + s.e.w);
    const int z0 = std::max(b.pb.z, s.pb.z);
    const int z1 = std::min(b.pb.z + b.e.d, s.pb.z + s.e.d);
    if (x0 >= x1 || z0 >= z1) continue;
    corners.push_back({2LL * x0, 2LL * z0});
    corners.push_back({2LL * x1, 2LL * z0});
    corners.push_back({2LL * x0, 2LL * z1});
    corners.push_back({2LL * x1, 2LL * z1});
  }
  if (corners.empty())
    throw ContractError("floating box: " + std::to_string(b.pb.box_id));

  const auto hull = convex_hull(std::move(corners));
  const long long cx = 2LL * b.pb.x + b.e.w;
  const long long cz = 2LL * b.pb.z + b.e.d;
  return strictly_inside(hull, cx, cz);
}

ContainerTotals container_totals(const std::vector<ResolvedBox>& placed,
                                 int width, int depth) {
  if (width < 1 || depth < 1) throw ContractError("container extent<1");
  ContainerTotals t;
  Eigen::ArrayXXi proj = Eigen::ArrayXXi::Zero(width, depth);
  int max_top = 0;
  for (const auto& rb : placed) {
    if (rb.pb.x < 0 || rb.pb.z < 0 || rb.pb.y < 0 ||
        rb.pb.x + rb.e.w > width || rb.pb.z + rb.e.d > depth)
      throw ContractError("placement out of bounds: " +
                          std::to_string(rb.pb.box_id));
    t.a_packed += rb.e.volume();
    const int top = rb.pb.y + rb.e.h;
    max_top = std::max(max_top, top);
    proj.block(rb.pb.x, rb.pb.z, rb.e.w, rb.e.d) =
        proj.block(rb.pb.x, rb.pb.z, rb.e.w, rb.e.d).max(top);
  }
  t.a_rect = static_cast<long long>(width) * depth * max_top;
  t.a_proj = proj.cast<long long>().sum();
  t.n_packed = static_cast<int>(placed.size());
  for (const auto& rb : placed)
    if (is_stable(rb, placed)) ++t.n_stable;
  return t;
}

RewardBreakdown reward(const std::vector<std::vector<ResolvedBox>>& containers,
                       int width, int depth) {
  RewardBreakdown out;
  for (const auto& c : containers) {
    out.per_container.push_back(container_totals(c, width, depth));
    const auto& t = out.per_container.back();
    out.a_packed += t.a_packed;
    out.a_rect += t.a_rect;
    out.a_proj += t.a_proj;
    out.n_stable += t.n_stable;
    out.n_packed += t.n_packed;
  }
  if (out.n_packed == 0) {
    out.vacuous = true;
    out.c = out.p = out.s = out.r = 1.0;
    return out;
  }
  out.c = static_cast<double>(out.a_packed) / static_cast<double>(out.a_rect);
  out.p = static_cast<double>(out.a_packed) / static_cast<double>(out.a_proj);
  out.s = static_cast<double>(out.n_stable) / static_cast<double>(out.n_packed);
  out.r = (out.c + out.p + out.s) / 3.0;
  return out;
}

RewardBreakdown reward(const std::vector<ResolvedBox>& placed, int width,
                       int depth) {
  return reward(std::vector<std::vector<ResolvedBox>>{placed}, width, depth);
}

double compactness(const RewardBreakdown& b) { return b.c; }
double pyramidality(const RewardBreakdown& b) { return b.p; }
double stability(const RewardBreakdown& b) { return b.s; }

}  // namespace tap

#include "tap/container.hpp"

#include <algorithm>
#include <set>

namespace tap {

namespace {

void check_footprint(const HeightMap& hm, int x, int z, const Extents& e) {
  if (e.w < 1 || e.h < 1 || e.d < 1) throw ContractError("extent<1");
  if (x < 0 || z < 0 || x + e.w > hm.width() || z + e.d > hm.depth())
    throw ContractError("footprint out of bounds");
}

}  // namespace

int drop(const HeightMap& hm, int x, int z, const Extents& e) {
  check_footprint(hm, x, z, e);
  return hm.h.block(x, z, e.w, e.d).maxCoeff();
}

HeightMap place(const HeightMap& hm, int x, int z, const Extents& e) {
  const int top = drop(hm, x, z, e) + e.h;
  HeightMap out = hm;
  out.h.block(x, z, e.w, e.d).setConstant(top);
  return out;
}

std::vector<EmptyRect> compute_ems(const HeightMap& hm, int ceiling) {
  if (ceiling < hm.max_height()) throw ContractError("ceiling below skyline");
  const int w = hm.width();
  const int d = hm.depth();

  std::set<int> levels(hm.h.data(), hm.h.data() + hm.h.size());
  std::vector<EmptyRect> out;

  // For each candidate bottom level v, find the maximal footprints whose
  // columns all sit at or below v; the space bottom is the tallest column
  // inside the footprint, so identical cuboids found at several levels
  // collapse in the dedup pass.
  for (int v : levels) {
    for (int x0 = 0; x0 < w; ++x0) {
      for (int x1 = x0 + 1; x1 <= w; ++x1) {
        // z-runs where every column in [x0,x1) is at or below v.
        int z0 = -1;
        for (int z = 0; z <= d; ++z) {
          const bool ok =
              z < d && (hm.h.block(x0, z, x1 - x0, 1).maxCoeff() <= v);
          if (ok && z0 < 0) z0 = z;
          if (!ok && z0 >= 0) {
            const int z1 = z;
            const int bottom =
                hm.h.block(x0, z0, x1 - x0, z1 - z0).maxCoeff();
            // Horizontal maximality along x at this bottom level.
            const bool left_blocked =
                x0 == 0 ||
                (hm.h.block(x0 - 1, z0, 1, z1 - z0).array() > bottom).any();
            const bool right_blocked =
                x1 == w ||
                (hm.h.block(x1, z0, 1, z1 - z0).array() > bottom).any();
            // z-maximality: the run above stopped at columns > v, but the
            // cuboid bottom may be lower than v, so recheck against bottom.
            const bool front_blocked =
                z0 == 0 ||
                (hm.h.block(x0, z0 - 1, x1 - x0, 1).array() > bottom).any();
            const bool back_blocked =
                z1 == d ||
                (hm.h.block(x0, z1, x1 - x0, 1).array() > bottom).any();
            if (left_blocked && right_blocked && front_blocked &&
                back_blocked && bottom < ceiling) {
              out.push_back(EmptyRect{x0, z0, bottom, x1 - x0, z1 - z0,
                                      ceiling - bottom});
            }
            z0 = -1;
          }
        }
      }
    }
  }

  std::sort(out.begin(), out.end(), [](const EmptyRect& a, const EmptyRect& b) {
    return std::tie(a.x, a.z, a.y, a.w, a.d) < std::tie(b.x, b.z, b.y, b.w, b.d);
  });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

HeightMode height_mode_from_string(const std::string& s) {
  if (s == "raw") return HeightMode::kRaw;
  if (s == "zero-min") return HeightMode::kZeroMin;
  if (s == "gradient") return HeightMode::kGradient;
  throw ValidationError("unknown height mode: " + s);
}

std::string to_string(HeightMode m) {
  switch (m) {
    case HeightMode::kRaw: return "raw";
    case HeightMode::kZeroMin: return "zero-min";
    case HeightMode::kGradient: return "gradient";
  }
  throw ContractError("bad height mode");
}

Eigen::VectorXd represent(const HeightMap& hm, HeightMode mode) {
  const int w = hm.width();
  const int d = hm.depth();
  const Eigen::ArrayXXd hd = hm.h.cast<double>();
  switch (mode) {
    case HeightMode::kRaw: {
      Eigen::VectorXd out(w * d);
      Eigen::Map<Eigen::ArrayXXd>(out.data(), w, d) = hd;
      return out;
    }
    case HeightMode::kZeroMin: {
      Eigen::VectorXd out(w * d);
      Eigen::Map<Eigen::ArrayXXd>(out.data(), w, d) = hd - hd.minCoeff();
      return out;
    }
    case HeightMode::kGradient: {
      if (d == 1) {
        Eigen::VectorXd out = Eigen::VectorXd::Zero(w);
        for (int x = 1; x < w; ++x) out[x] = hd(x, 0) - hd(x - 1, 0);
        return out;
      }
      Eigen::VectorXd out = Eigen::VectorXd::Zero(2 * w * d);
      Eigen::Map<Eigen::ArrayXXd> gx(out.data(), w, d);
      Eigen::Map<Eigen::ArrayXXd> gz(out.data() + w * d, w, d);
      for (int z = 0; z < d; ++z)
        for (int x = 1; x < w; ++x) gx(x, z) = hd(x, z) - hd(x - 1, z);
      for (int z = 1; z < d; ++z)
        for (int x = 0; x < w; ++x) gz(x, z) = hd(x, z) - hd(x, z - 1);
      return out;
    }
  }
  throw ContractError("bad height mode");
}

}  // namespace tap

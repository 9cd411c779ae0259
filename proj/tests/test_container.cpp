#include <doctest.h>

#include <algorithm>
#include <vector>

#include "helpers.hpp"
#include "tap/container.hpp"
#include "tap/rng.hpp"

using namespace tap;

namespace {

HeightMap map_of(const std::vector<int>& cols) {
  HeightMap hm(static_cast<int>(cols.size()), 1);
  for (std::size_t i = 0; i < cols.size(); ++i)
    hm.h(static_cast<int>(i), 0) = cols[i];
  return hm;
}

// Independent maximal-empty-cuboid enumeration straight from the definition:
// walk every axis-aligned cell region, keep those fully above the skyline
// and below the ceiling, then drop any region contained in a larger one.
std::vector<EmptyRect> brute_force_ems(const HeightMap& hm, int ceiling) {
  const int w = hm.width(), d = hm.depth();
  auto free_cell = [&](int x, int z, int y) {
    return y >= hm.h(x, z) && y < ceiling;
  };
  std::vector<EmptyRect> all;
  for (int x0 = 0; x0 < w; ++x0)
    for (int x1 = x0 + 1; x1 <= w; ++x1)
      for (int z0 = 0; z0 < d; ++z0)
        for (int z1 = z0 + 1; z1 <= d; ++z1)
          for (int y0 = 0; y0 < ceiling; ++y0)
            for (int y1 = y0 + 1; y1 <= ceiling; ++y1) {
              bool empty = true;
              for (int x = x0; x < x1 && empty; ++x)
                for (int z = z0; z < z1 && empty; ++z)
                  for (int y = y0; y < y1 && empty; ++y)
                    empty = free_cell(x, z, y);
              if (empty)
                all.push_back({x0, z0, y0, x1 - x0, z1 - z0, y1 - y0});
            }
  auto contains = [](const EmptyRect& a, const EmptyRect& b) {
    return a.x <= b.x && a.z <= b.z && a.y <= b.y && a.x + a.w >= b.x + b.w &&
           a.z + a.d >= b.z + b.d && a.y + a.h >= b.y + b.h;
  };
  std::vector<EmptyRect> maximal;
  for (const auto& r : all) {
    bool dominated = false;
    for (const auto& o : all)
      if (!(o == r) && contains(o, r)) {
        dominated = true;
        break;
      }
    if (!dominated) maximal.push_back(r);
  }
  std::sort(maximal.begin(), maximal.end(), [](const auto& a, const auto& b) {
    return std::tie(a.x, a.z, a.y, a.w, a.d) <
           std::tie(b.x, b.z, b.y, b.w, b.d);
  });
  return maximal;
}

}  // namespace

TEST_CASE("drop rests on the highest column under the footprint") {
  const HeightMap hm = map_of({2, 2, 0, 0, 0});
  CHECK(drop(hm, 1, 0, {2, 1, 1}) == 2);
  CHECK(drop(hm, 2, 0, {3, 1, 1}) == 0);
  CHECK(drop(map_of({0, 0, 0, 0, 0}), 0, 0, {5, 1, 1}) == 0);
}

TEST_CASE("drop rejects footprints outside the container") {
  const HeightMap hm = map_of({0, 0, 0});
  CHECK_THROWS_AS(drop(hm, 2, 0, {2, 1, 1}), ContractError);
  CHECK_THROWS_AS(drop(hm, -1, 0, {2, 1, 1}), ContractError);
}

TEST_CASE("place raises exactly the footprint") {
  const HeightMap hm = place(map_of({2, 2, 0, 0, 0}), 2, 0, {2, 1, 1});
  CHECK(hm == map_of({2, 2, 1, 1, 0}));
  const HeightMap full = place(map_of({2, 2, 0, 0, 0}), 0, 0, {5, 3, 1});
  CHECK(full == map_of({5, 5, 5, 5, 5}));
}

TEST_CASE("3D place touches only the covered cells") {
  HeightMap hm(2, 2);
  const HeightMap out = place(hm, 0, 0, {1, 4, 1});
  CHECK(out.h(0, 0) == 4);
  CHECK(out.h(1, 0) == 0);
  CHECK(out.h(0, 1) == 0);
  CHECK(out.h(1, 1) == 0);
}

TEST_CASE("place then drop lands on the new top") {
  Rng rng(41);
  for (int it = 0; it < 200; ++it) {
    const int w = rng.uniform_int(2, 8);
    HeightMap hm(w, 1);
    for (int x = 0; x < w; ++x) hm.h(x, 0) = rng.uniform_int(0, 5);
    const Extents e{rng.uniform_int(1, w), rng.uniform_int(1, 3), 1};
    const int x = rng.uniform_int(0, w - e.w);
    const int y = drop(hm, x, 0, e);
    const HeightMap after = place(hm, x, 0, e);
    CHECK(drop(after, x, 0, e) == y + e.h);
  }
}

TEST_CASE("empty spaces of the stair fixture") {
  const auto ems = compute_ems(map_of({2, 2, 0, 0, 0}), 4);
  REQUIRE(ems.size() == 2);
  CHECK(ems[0] == EmptyRect{0, 0, 2, 5, 1, 2});
  CHECK(ems[1] == EmptyRect{2, 0, 0, 3, 1, 4});
}

TEST_CASE("empty spaces of the valley fixture") {
  const auto ems = compute_ems(map_of({1, 0, 1}), 2);
  REQUIRE(ems.size() == 2);
  CHECK(ems[0] == EmptyRect{0, 0, 1, 3, 1, 1});
  CHECK(ems[1] == EmptyRect{1, 0, 0, 1, 1, 2});
}

TEST_CASE("flat map yields the single full space") {
  const auto ems = compute_ems(map_of({0, 0, 0, 0}), 3);
  REQUIRE(ems.size() == 1);
  CHECK(ems[0] == EmptyRect{0, 0, 0, 4, 1, 3});
}

TEST_CASE("ceiling below the skyline is a contract violation") {
  CHECK_THROWS_AS(compute_ems(map_of({3, 0}), 2), ContractError);
}

TEST_CASE("every empty space reaches the ceiling") {
  Rng rng(42);
  for (int it = 0; it < 300; ++it) {
    const int w = rng.uniform_int(1, 8);
    HeightMap hm(w, 1);
    for (int x = 0; x < w; ++x) hm.h(x, 0) = rng.uniform_int(0, 6);
    const int hc = hm.max_height() + rng.uniform_int(0, 3);
    if (hc == 0) continue;
    for (const auto& r : compute_ems(hm, hc)) CHECK(r.y + r.h == hc);
  }
}

TEST_CASE("2D empty spaces match the brute-force enumeration") {
  Rng rng(43);
  for (int it = 0; it < 400; ++it) {
    const int w = rng.uniform_int(1, 8);
    HeightMap hm(w, 1);
    for (int x = 0; x < w; ++x) hm.h(x, 0) = rng.uniform_int(0, 7);
    const int hc = std::max(hm.max_height(), rng.uniform_int(1, 8));
    CHECK(compute_ems(hm, hc) == brute_force_ems(hm, hc));
  }
}

TEST_CASE("3D empty spaces match the brute-force enumeration") {
  Rng rng(44);
  for (int it = 0; it < 100; ++it) {
    const int w = rng.uniform_int(1, 4);
    const int d = rng.uniform_int(1, 4);
    HeightMap hm(w, d);
    for (int x = 0; x < w; ++x)
      for (int z = 0; z < d; ++z) hm.h(x, z) = rng.uniform_int(0, 4);
    const int hc = std::max(hm.max_height(), rng.uniform_int(1, 5));
    CHECK(compute_ems(hm, hc) == brute_force_ems(hm, hc));
  }
}

TEST_CASE("height representations") {
  const HeightMap hm = map_of({1, 3, 3, 0, 2});
  const Eigen::VectorXd raw = represent(hm, HeightMode::kRaw);
  const Eigen::VectorXd zm = represent(hm, HeightMode::kZeroMin);
  const Eigen::VectorXd gr = represent(hm, HeightMode::kGradient);
  REQUIRE(raw.size() == 5);
  CHECK(raw(0) == 1.0);
  CHECK(raw(4) == 2.0);
  for (int i = 0; i < 5; ++i) CHECK(zm(i) == raw(i));
  CHECK(gr(0) == 0.0);
  CHECK(gr(1) == 2.0);
  CHECK(gr(2) == 0.0);
  CHECK(gr(3) == -3.0);
  CHECK(gr(4) == 2.0);

  const Eigen::VectorXd flat = represent(map_of({5, 5, 5}), HeightMode::kZeroMin);
  CHECK(flat.maxCoeff() == 0.0);
  CHECK(flat.minCoeff() == 0.0);
}

TEST_CASE("3D gradient stacks both axis differences") {
  HeightMap hm(2, 2);
  hm.h << 1, 2, 4, 8;
  const Eigen::VectorXd g = represent(hm, HeightMode::kGradient);
  REQUIRE(g.size() == 8);
  const Eigen::VectorXd raw = represent(hm, HeightMode::kRaw);
  REQUIRE(raw.size() == 4);
}

TEST_CASE("height mode strings round-trip") {
  for (auto m : {HeightMode::kRaw, HeightMode::kZeroMin, HeightMode::kGradient})
    CHECK(height_mode_from_string(to_string(m)) == m);
  CHECK_THROWS_AS(height_mode_from_string("nope"), ValidationError);
}

#include <doctest.h>

#include <cmath>
#include <set>

#include "helpers.hpp"
#include "tap/datasets.hpp"
#include "tap/json_io.hpp"
#include "tap/solvers.hpp"

using namespace tap;

TEST_CASE("same config generates identical instances") {
  GenConfig cfg;
  cfg.n = 8;
  cfg.seed = 12;
  cfg.count = 5;
  for (int i = 0; i < cfg.count; ++i) {
    const auto a = gen_instance(cfg, i);
    const auto b = gen_instance(cfg, i);
    CHECK(dump_canonical(to_json(a.instance)) ==
          dump_canonical(to_json(b.instance)));
  }
}

TEST_CASE("items draw from independent streams") {
  GenConfig cfg;
  cfg.seed = 12;
  CHECK(dump_canonical(to_json(gen_instance(cfg, 0).instance)) !=
        dump_canonical(to_json(gen_instance(cfg, 1).instance)));
}

TEST_CASE("every sampled dimension stays in range") {
  GenConfig cfg;
  cfg.n = 10;
  cfg.seed = 13;
  for (int dims : {2, 3}) {
    cfg.dims_mode = dims;
    for (int i = 0; i < 200; ++i) {
      const auto inst = gen_instance(cfg, i).instance;
      CHECK(validate_instance(inst).empty());
      for (const auto& b : inst.boxes) {
        CHECK(b.dims.w >= cfg.size_min);
        CHECK(b.dims.w <= cfg.size_max);
        CHECK(b.dims.h >= cfg.size_min);
        CHECK(b.dims.h <= cfg.size_max);
        if (dims == 3) {
          CHECK(b.dims.d >= cfg.size_min);
          CHECK(b.dims.d <= cfg.size_max);
        } else {
          CHECK(b.dims.d == 1);
        }
      }
    }
  }
}

TEST_CASE("closed-form mean of the rounded clamped gaussian") {
  // Degenerate spread collapses onto the mean; a huge spread splits evenly
  // between the clamp ends.
  CHECK(clamped_round_gauss_mean(3.0, 1e-9, 1, 5) == doctest::Approx(3.0));
  CHECK(clamped_round_gauss_mean(3.0, 1e9, 1, 5) ==
        doctest::Approx(3.0).epsilon(1e-3));
  CHECK(clamped_round_gauss_mean(0.0, 1e-9, 1, 5) == doctest::Approx(1.0));
  // Monte-Carlo cross-check of the analytic form.
  Rng rng(7);
  GenConfig cfg;
  double sum = 0.0;
  const int trials = 200000;
  for (int i = 0; i < trials; ++i) sum += sample_dim(rng, cfg);
  CHECK(sum / trials ==
        doctest::Approx(clamped_round_gauss_mean(3.0, 1.5, 1, 5))
            .epsilon(0.01));
}

TEST_CASE("mean box area tracks the analytic expectation") {
  GenConfig cfg;
  cfg.n = 10;
  cfg.seed = 14;
  double area = 0.0;
  long long boxes = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto inst = gen_instance(cfg, i).instance;
    for (const auto& b : inst.boxes) {
      area += static_cast<double>(b.dims.w) * b.dims.h;
      ++boxes;
    }
  }
  const double e = clamped_round_gauss_mean(3.0, 1.5, 1, 5);
  CHECK(area / static_cast<double>(boxes) ==
        doctest::Approx(e * e).epsilon(0.10));
}

TEST_CASE("guillotine blocks tile the sheet exactly") {
  Rng rng(15);
  for (int it = 0; it < 200; ++it) {
    const int n = rng.uniform_int(1, 12);
    const int h = std::max(3, n);
    const auto blocks = guillotine_split(5, 1, h, n, rng);
    REQUIRE(static_cast<int>(blocks.size()) == n);
    long long area = 0;
    for (const auto& b : blocks) {
      CHECK(b.e.w >= 1);
      CHECK(b.e.h >= 1);
      CHECK(b.x >= 0);
      CHECK(b.x + b.e.w <= 5);
      CHECK(b.y >= 0);
      CHECK(b.y + b.e.h <= h);
      area += b.e.volume();
    }
    CHECK(area == 5LL * h);
    for (std::size_t i = 0; i < blocks.size(); ++i)
      for (std::size_t j = i + 1; j < blocks.size(); ++j) {
        const auto& a = blocks[i];
        const auto& b = blocks[j];
        const bool apart = a.x + a.e.w <= b.x || b.x + b.e.w <= a.x ||
                           a.y + a.e.h <= b.y || b.y + b.e.h <= a.y;
        CHECK(apart);
      }
  }
}

TEST_CASE("single-block split returns the whole sheet") {
  Rng rng(16);
  const auto blocks = guillotine_split(5, 1, 4, 1, rng);
  REQUIRE(blocks.size() == 1);
  CHECK(blocks[0].e == Extents{5, 4, 1});
}

TEST_CASE("perfectly packed instances carry a perfect witness") {
  GenConfig cfg;
  cfg.mode = "ppsg";
  cfg.n = 10;
  cfg.init_width = 7;
  cfg.target_width = 5;
  cfg.seed = 17;
  for (int i = 0; i < 60; ++i) {
    const DatasetItem item = gen_instance(cfg, i);
    REQUIRE(item.witness.size() == item.instance.boxes.size());
    CHECK(validate_instance(item.instance).empty());
    const RewardBreakdown r = replay_solution(item.instance, item.witness);
    CHECK(r.c == 1.0);
    CHECK(r.p == 1.0);
    CHECK(r.s == 1.0);
    CHECK(r.r == 1.0);
  }
}

TEST_CASE("3D perfect packing works the same way") {
  GenConfig cfg;
  cfg.mode = "ppsg";
  cfg.dims_mode = 3;
  cfg.n = 8;
  cfg.init_width = 5;
  cfg.init_depth = 5;
  cfg.target_width = 4;
  cfg.target_depth = 4;
  cfg.seed = 18;
  for (int i = 0; i < 15; ++i) {
    const DatasetItem item = gen_instance(cfg, i);
    const RewardBreakdown r = replay_solution(item.instance, item.witness);
    CHECK(r.r == 1.0);
  }
}

TEST_CASE("flat layout mode spreads boxes with clearance") {
  GenConfig cfg;
  cfg.spread = true;
  cfg.n = 5;
  cfg.seed = 19;
  const auto inst = gen_instance(cfg, 0).instance;
  for (const auto& pb : inst.initial_placements) CHECK(pb.y == 0);
  const auto g = extract_precedence(inst);
  for (int id : g.box_ids) {
    CHECK(g.sets(id).tb.empty());
    const bool left_free = g.sets(id).lab.empty();
    const bool right_free = g.sets(id).rab.empty();
    CHECK((left_free || right_free));
  }
}

TEST_CASE("invalid configs are rejected") {
  GenConfig cfg;
  cfg.n = 0;
  CHECK_THROWS_AS(gen_instance(cfg, 0), ValidationError);
  cfg = GenConfig{};
  cfg.size_min = 4;
  cfg.size_max = 2;
  CHECK_THROWS_AS(gen_instance(cfg, 0), ValidationError);
  cfg = GenConfig{};
  cfg.mode = "other";
  CHECK_THROWS_AS(gen_instance(cfg, 0), ValidationError);
  cfg = GenConfig{};
  cfg.size_max = 9;
  cfg.init_width = 7;
  CHECK_THROWS_AS(gen_instance(cfg, 0), ValidationError);
  cfg = GenConfig{};
  cfg.mode = "ppsg";
  cfg.containers = 2;
  CHECK_THROWS_AS(gen_instance(cfg, 0), ValidationError);
}

TEST_CASE("datasets round-trip through the filesystem") {
  test::TempDir dir("ds");
  GenConfig cfg;
  cfg.n = 6;
  cfg.count = 4;
  cfg.seed = 20;
  const DatasetManifest m = write_dataset(cfg, dir.str());
  const Dataset ds = load_dataset(dir.str());
  CHECK(ds.checksum == m.checksum);
  REQUIRE(ds.items.size() == 4);
  for (int i = 0; i < 4; ++i) {
    const auto direct = gen_instance(cfg, i);
    CHECK(dump_canonical(to_json(ds.items[static_cast<std::size_t>(i)]
                                     .instance)) ==
          dump_canonical(to_json(direct.instance)));
  }
}

TEST_CASE("witnesses survive the round-trip") {
  test::TempDir dir("dsw");
  GenConfig cfg;
  cfg.mode = "ppsg";
  cfg.n = 6;
  cfg.count = 3;
  cfg.seed = 21;
  write_dataset(cfg, dir.str());
  const Dataset ds = load_dataset(dir.str());
  for (const auto& item : ds.items) {
    REQUIRE(!item.witness.empty());
    CHECK(replay_solution(item.instance, item.witness).r == 1.0);
  }
}

TEST_CASE("tampered files fail the checksum") {
  test::TempDir dir("dst");
  GenConfig cfg;
  cfg.n = 5;
  cfg.count = 2;
  cfg.seed = 22;
  write_dataset(cfg, dir.str());
  const std::string path = dir.file(item_filename(1));
  std::string text = read_file(path);
  text[text.find("\"x\"")] = 'y';
  write_file_atomic(path, text);
  CHECK_THROWS_AS(load_dataset(dir.str()), ValidationError);
}

TEST_CASE("an item list persists as a loadable dataset") {
  test::TempDir dir("dsi");
  GenConfig cfg;
  cfg.n = 5;
  cfg.count = 3;
  cfg.seed = 23;
  std::vector<DatasetItem> items;
  for (int i = 0; i < 5; ++i) items.push_back(gen_instance(cfg, i));
  const DatasetManifest m = write_items(cfg, items, dir.str());
  CHECK(m.config.count == 5);
  const Dataset ds = load_dataset(dir.str());
  CHECK(ds.items.size() == 5);
}

TEST_CASE("an empty dataset is a valid dataset") {
  test::TempDir dir("ds0");
  GenConfig cfg;
  cfg.count = 0;
  write_dataset(cfg, dir.str());
  CHECK(load_dataset(dir.str()).items.empty());
}

TEST_CASE("config round-trips through the manifest") {
  test::TempDir dir("dsc");
  GenConfig cfg;
  cfg.mode = "ppsg";
  cfg.dims_mode = 2;
  cfg.n = 7;
  cfg.count = 1;
  cfg.seed = 24;
  cfg.spread = false;
  write_dataset(cfg, dir.str());
  const Dataset ds = load_dataset(dir.str());
  CHECK(ds.config.mode == "ppsg");
  CHECK(ds.config.n == 7);
  CHECK(ds.config.seed == 24);
}

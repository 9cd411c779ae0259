#include "tap/json_io.hpp"

#include <filesystem>
#include <fstream>

namespace tap {

namespace {

constexpr const char* kInstanceFormat = "tap-instance/1";
constexpr const char* kSolutionFormat = "tap-solution/1";

[[noreturn]] void bad(const std::string& what) {
  throw ValidationError("malformed json: " + what);
}

int get_int(const Json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number_integer()) bad(key);
  return j[key].get<int>();
}

}  // namespace

Json to_json(const PlacedBox& pb) {
  return Json{{"box", pb.box_id},      {"orientation", pb.orientation},
              {"x", pb.x},             {"y", pb.y},
              {"z", pb.z},             {"container", pb.container_idx}};
}

PlacedBox placed_box_from_json(const Json& j) {
  PlacedBox pb;
  pb.box_id = get_int(j, "box");
  pb.orientation = get_int(j, "orientation");
  pb.x = get_int(j, "x");
  pb.y = get_int(j, "y");
  pb.z = get_int(j, "z");
  pb.container_idx = get_int(j, "container");
  return pb;
}

Json to_json(const ProblemInstance& inst) {
  Json boxes = Json::array();
  for (const auto& b : inst.boxes) {
    Json dims = inst.dims_mode == 2 ? Json::array({b.dims.w, b.dims.h})
                                    : Json::array({b.dims.w, b.dims.h, b.dims.d});
    boxes.push_back(Json{{"id", b.id}, {"dims", dims}, {"target", b.target_idx}});
  }
  Json pile = Json::array();
  for (const auto& pb : inst.initial_placements) pile.push_back(to_json(pb));
  return Json{{"format", kInstanceFormat},
              {"dims_mode", inst.dims_mode},
              {"init", Json{{"width", inst.init_width}, {"depth", inst.init_depth}}},
              {"target", Json{{"width", inst.target_width},
                              {"depth", inst.target_depth},
                              {"count", inst.container_count}}},
              {"boxes", boxes},
              {"pile", pile}};
}

ProblemInstance instance_from_json(const Json& j) {
  if (!j.is_object() || j.value("format", "") != kInstanceFormat)
    bad("format");
  ProblemInstance inst;
  inst.dims_mode = get_int(j, "dims_mode");
  if (!j.contains("init") || !j.contains("target")) bad("containers");
  inst.init_width = get_int(j["init"], "width");
  inst.init_depth = get_int(j["init"], "depth");
  inst.target_width = get_int(j["target"], "width");
  inst.target_depth = get_int(j["target"], "depth");
  inst.container_count = get_int(j["target"], "count");
  if (!j.contains("boxes") || !j["boxes"].is_array()) bad("boxes");
  for (const auto& bj : j["boxes"]) {
    BoxSpec b;
    b.id = get_int(bj, "id");
    if (!bj.contains("dims") || !bj["dims"].is_array()) bad("dims");
    const auto& d = bj["dims"];
    if (d.size() != 2 && d.size() != 3) bad("dims size");
    b.dims.w = d[0].get<int>();
    b.dims.h = d[1].get<int>();
    b.dims.d = d.size() == 3 ? d[2].get<int>() : 1;
    b.target_idx = get_int(bj, "target");
    inst.boxes.push_back(b);
  }
  if (!j.contains("pile") || !j["pile"].is_array()) bad("pile");
  for (const auto& pj : j["pile"])
    inst.initial_placements.push_back(placed_box_from_json(pj));
  return inst;
}

Json to_json(const RewardBreakdown& r) {
  Json pc = Json::array();
  for (const auto& t : r.per_container)
    pc.push_back(Json{{"a_packed", t.a_packed},
                      {"a_rect", t.a_rect},
                      {"a_proj", t.a_proj},
                      {"n_stable", t.n_stable},
                      {"n_packed", t.n_packed}});
  return Json{{"C", r.c},
              {"P", r.p},
              {"S", r.s},
              {"R", r.r},
              {"a_packed", r.a_packed},
              {"a_rect", r.a_rect},
              {"a_proj", r.a_proj},
              {"n_stable", r.n_stable},
              {"n_packed", r.n_packed},
              {"vacuous", r.vacuous},
              {"per_container", pc}};
}

RewardBreakdown reward_from_json(const Json& j) {
  RewardBreakdown r;
  r.c = j.at("C").get<double>();
  r.p = j.at("P").get<double>();
  r.s = j.at("S").get<double>();
  r.r = j.at("R").get<double>();
  r.a_packed = j.at("a_packed").get<long long>();
  r.a_rect = j.at("a_rect").get<long long>();
  r.a_proj = j.at("a_proj").get<long long>();
  r.n_stable = j.at("n_stable").get<int>();
  r.n_packed = j.at("n_packed").get<int>();
  r.vacuous = j.at("vacuous").get<bool>();
  for (const auto& tj : j.at("per_container")) {
    ContainerTotals t;
    t.a_packed = tj.at("a_packed").get<long long>();
    t.a_rect = tj.at("a_rect").get<long long>();
    t.a_proj = tj.at("a_proj").get<long long>();
    t.n_stable = tj.at("n_stable").get<int>();
    t.n_packed = tj.at("n_packed").get<int>();
    r.per_container.push_back(t);
  }
  return r;
}

Json to_json(const Solution& s) {
  Json steps = Json::array();
  for (const auto& pb : s.steps) steps.push_back(to_json(pb));
  return Json{{"format", kSolutionFormat},
              {"steps", steps},
              {"reward", to_json(s.reward)}};
}

Solution solution_from_json(const Json& j) {
  if (!j.is_object() || j.value("format", "") != kSolutionFormat)
    bad("format");
  Solution s;
  if (!j.contains("steps") || !j["steps"].is_array()) bad("steps");
  for (const auto& pj : j["steps"]) s.steps.push_back(placed_box_from_json(pj));
  s.reward = reward_from_json(j.at("reward"));
  return s;
}

std::string dump_canonical(const Json& j) { return j.dump(2) + "\n"; }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read: " + path);
  std::string out((std::istreambuf_iterator<char>(in)),
                  std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed: " + path);
  return out;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path dir = target.parent_path().empty() ? fs::path(".")
                                                    : target.parent_path();
  std::error_code ec;
  fs::create_directories(dir, ec);
  const fs::path tmp = dir / (target.filename().string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write: " + path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      fs::remove(tmp, ec);
      throw IoError("write failed: " + path);
    }
  }
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("rename failed: " + path);
  }
}

Json load_json(const std::string& path) {
  const std::string text = read_file(path);
  Json j = Json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ValidationError("malformed json: " + path);
  return j;
}

void save_json(const std::string& path, const Json& j) {
  write_file_atomic(path, dump_canonical(j));
}

ProblemInstance load_instance(const std::string& path) {
  return instance_from_json(load_json(path));
}

void save_instance(const std::string& path, const ProblemInstance& inst) {
  save_json(path, to_json(inst));
}

Solution load_solution(const std::string& path) {
  return solution_from_json(load_json(path));
}

void save_solution(const std::string& path, const Solution& s) {
  save_json(path, to_json(s));
}

std::uint64_t fnv1a64(const std::string& bytes, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[static_cast<std::size_t>(i)] = digits[v & 0xf];
    v >>= 4;
  }
  return s;
}

}  // namespace tap

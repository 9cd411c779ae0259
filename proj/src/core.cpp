#include "tap/core.hpp"

#include <algorithm>
#include <set>

namespace tap {

namespace {

// Permutation table for 3D orientations: entry k lists which source axis
// (0=w, 1=h, 2=d) lands on each output slot.
constexpr std::array<std::array<int, 3>, 6> kPerm3 = {{
    {0, 1, 2},  // identity
    {2, 1, 0},  // rotation about the vertical axis
    {1, 0, 2},  // tipped: w <-> h
    {0, 2, 1},  // tipped: h <-> d
    {1, 2, 0},  // tipped: cyclic
    {2, 0, 1},  // tipped: cyclic
}};
constexpr std::array<int, 6> kInverse3 = {0, 1, 2, 3, 5, 4};

void check_mode(int dims_mode) {
  if (dims_mode != 2 && dims_mode != 3)
    throw ContractError("dims_mode must be 2 or 3");
}

}  // namespace

int orientation_count(int dims_mode) {
  check_mode(dims_mode);
  return dims_mode == 2 ? 2 : 6;
}

Extents oriented(const Extents& e, int orientation, int dims_mode) {
  check_mode(dims_mode);
  if (orientation < 0 || orientation >= orientation_count(dims_mode))
    throw ContractError("orientation out of range");
  if (dims_mode == 2)
    return orientation == 0 ? e : Extents{e.h, e.w, e.d};
  const auto src = std::array<int, 3>{e.w, e.h, e.d};
  const auto& p = kPerm3[static_cast<std::size_t>(orientation)];
  return Extents{src[static_cast<std::size_t>(p[0])],
                 src[static_cast<std::size_t>(p[1])],
                 src[static_cast<std::size_t>(p[2])]};
}

int inverse_orientation(int orientation, int dims_mode) {
  check_mode(dims_mode);
  if (orientation < 0 || orientation >= orientation_count(dims_mode))
    throw ContractError("orientation out of range");
  if (dims_mode == 2) return orientation;
  return kInverse3[static_cast<std::size_t>(orientation)];
}

bool orientation_needs_side(int orientation, int dims_mode) {
  check_mode(dims_mode);
  if (orientation < 0 || orientation >= orientation_count(dims_mode))
    throw ContractError("orientation out of range");
  return dims_mode == 2 ? orientation == 1 : orientation >= 2;
}

int compose_orientations(int outer, int inner, int dims_mode) {
  check_mode(dims_mode);
  const int cnt = orientation_count(dims_mode);
  if (outer < 0 || outer >= cnt || inner < 0 || inner >= cnt)
    throw ContractError("orientation out of range");
  if (dims_mode == 2) return outer ^ inner;
  const auto& pi = kPerm3[static_cast<std::size_t>(inner)];
  const auto& po = kPerm3[static_cast<std::size_t>(outer)];
  std::array<int, 3> composed{};
  for (int i = 0; i < 3; ++i)
    composed[static_cast<std::size_t>(i)] =
        pi[static_cast<std::size_t>(po[static_cast<std::size_t>(i)])];
  for (int c = 0; c < 6; ++c)
    if (kPerm3[static_cast<std::size_t>(c)] == composed) return c;
  throw ContractError("orientation composition failed");
}

const BoxSpec& ProblemInstance::box(int id) const {
  for (const auto& b : boxes)
    if (b.id == id) return b;
  throw ContractError("unknown box id: " + std::to_string(id));
}

Extents placed_extents(const ProblemInstance& inst, const PlacedBox& pb) {
  return oriented(inst.box(pb.box_id).dims, pb.orientation, inst.dims_mode);
}

bool overlap_interval(int a0, int a1, int b0, int b1) {
  if (a0 >= a1 || b0 >= b1) throw ContractError("degenerate interval");
  return a0 < b1 && b0 < a1;
}

bool boxes_overlap(const PlacedBox& a, const Extents& ea, const PlacedBox& b,
                   const Extents& eb) {
  return overlap_interval(a.x, a.x + ea.w, b.x, b.x + eb.w) &&
         overlap_interval(a.y, a.y + ea.h, b.y, b.y + eb.h) &&
         overlap_interval(a.z, a.z + ea.d, b.z, b.z + eb.d);
}

std::vector<std::string> validate_instance(const ProblemInstance& inst) {
  std::vector<std::string> out;
  if (inst.dims_mode != 2 && inst.dims_mode != 3) {
    out.push_back("bad dims_mode");
    return out;
  }
  if (inst.init_width < 1 || inst.target_width < 1 || inst.init_depth < 1 ||
      inst.target_depth < 1)
    out.push_back("container extent<1");
  if (inst.dims_mode == 2 && (inst.init_depth != 1 || inst.target_depth != 1))
    out.push_back("2d container depth must be 1");
  if (inst.container_count < 1) out.push_back("container_count<1");

  std::set<int> ids;
  for (const auto& b : inst.boxes) {
    if (b.dims.w < 1 || b.dims.h < 1 || b.dims.d < 1)
      out.push_back("extent<1: " + std::to_string(b.id));
    if (inst.dims_mode == 2 && b.dims.d != 1)
      out.push_back("2d box depth must be 1: " + std::to_string(b.id));
    if (!ids.insert(b.id).second)
      out.push_back("duplicate id: " + std::to_string(b.id));
    if (b.target_idx < 0 || b.target_idx >= inst.container_count)
      out.push_back("target_idx out of range: " + std::to_string(b.id));
  }

  std::set<int> placed;
  for (const auto& pb : inst.initial_placements) {
    if (!ids.count(pb.box_id)) {
      out.push_back("unknown box in placement: " + std::to_string(pb.box_id));
      continue;
    }
    if (!placed.insert(pb.box_id).second) {
      out.push_back("duplicate placement: " + std::to_string(pb.box_id));
      continue;
    }
    if (pb.orientation < 0 ||
        pb.orientation >= orientation_count(inst.dims_mode)) {
      out.push_back("bad orientation: " + std::to_string(pb.box_id));
      continue;
    }
    const Extents e = placed_extents(inst, pb);
    if (pb.x < 0 || pb.y < 0 || pb.z < 0 || pb.x + e.w > inst.init_width ||
        pb.z + e.d > inst.init_depth)
      out.push_back("out of bounds: " + std::to_string(pb.box_id));
  }
  for (int id : ids)
    if (!placed.count(id)) out.push_back("missing placement: " + std::to_string(id));

  // Pairwise overlap over placements that survived the basic checks.
  for (std::size_t i = 0; i < inst.initial_placements.size(); ++i) {
    const auto& a = inst.initial_placements[i];
    if (!ids.count(a.box_id)) continue;
    for (std::size_t j = i + 1; j < inst.initial_placements.size(); ++j) {
      const auto& b = inst.initial_placements[j];
      if (!ids.count(b.box_id) || a.box_id == b.box_id) continue;
      const Extents ea = placed_extents(inst, a);
      const Extents eb = placed_extents(inst, b);
      if (ea.w < 1 || ea.h < 1 || ea.d < 1 || eb.w < 1 || eb.h < 1 || eb.d < 1)
        continue;
      if (boxes_overlap(a, ea, b, eb)) {
        const int lo = std::min(a.box_id, b.box_id);
        const int hi = std::max(a.box_id, b.box_id);
        out.push_back("overlap: " + std::to_string(lo) + "," + std::to_string(hi));
      }
    }
  }
  return out;
}

}  // namespace tap

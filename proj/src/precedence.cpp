#include "tap/precedence.hpp"

#include <algorithm>
#include <sstream>

namespace tap {

int PrecedenceGraph::index_of(int box_id) const {
  for (std::size_t i = 0; i < box_ids.size(); ++i)
    if (box_ids[i] == box_id) return static_cast<int>(i);
  throw ContractError("unknown box id: " + std::to_string(box_id));
}

const BlockerSets& PrecedenceGraph::sets(int box_id) const {
  return blockers[static_cast<std::size_t>(index_of(box_id))];
}

PrecedenceGraph extract_precedence(const ProblemInstance& inst) {
  const auto violations = validate_instance(inst);
  if (!violations.empty())
    throw ValidationError("invalid instance: " + violations.front());

  PrecedenceGraph g;
  g.dims_mode = inst.dims_mode;
  std::vector<PlacedBox> pile(inst.boxes.size());
  for (const auto& pb : inst.initial_placements) {
    const auto& spec = inst.box(pb.box_id);
    std::size_t idx = 0;
    while (inst.boxes[idx].id != spec.id) ++idx;
    pile[idx] = pb;
  }
  for (const auto& b : inst.boxes) g.box_ids.push_back(b.id);
  for (std::size_t i = 0; i < inst.boxes.size(); ++i)
    g.dims.push_back(placed_extents(inst, pile[i]));

  g.blockers.resize(inst.boxes.size());
  for (std::size_t i = 0; i < pile.size(); ++i) {
    const PlacedBox& o = pile[i];
    const Extents eo = g.dims[i];
    BlockerSets& bs = g.blockers[i];

    const int left = o.x;
    const int right = o.x + eo.w;
    const int bottom = o.y;
    const int top = o.y + eo.h;
    const int z0 = o.z;
    const int z1 = o.z + eo.d;

    if (left == 0) bs.lab.insert(o.box_id);
    if (right == inst.init_width) bs.rab.insert(o.box_id);

    for (std::size_t j = 0; j < pile.size(); ++j) {
      if (j == i) continue;
      const PlacedBox& r = pile[j];
      const Extents er = g.dims[j];
      const bool xz_overlap =
          overlap_interval(r.x, r.x + er.w, left, right) &&
          overlap_interval(r.z, r.z + er.d, z0, z1);
      if (xz_overlap && r.y >= top) bs.tb.insert(r.box_id);

      // A side blocker occupies some cell of the one-column slab against the
      // face, at or above this box's bottom.
      const bool z_touch = overlap_interval(r.z, r.z + er.d, z0, z1);
      const bool reaches_bottom = r.y + er.h > bottom;
      if (z_touch && reaches_bottom) {
        if (left > 0 && r.x <= left - 1 && left - 1 < r.x + er.w)
          bs.lab.insert(r.box_id);
        if (right < inst.init_width && r.x <= right && right < r.x + er.w)
          bs.rab.insert(r.box_id);
      }
    }

    if (bs.lab.empty())
      bs.rab.clear();
    else if (bs.rab.empty())
      bs.lab.clear();
  }
  return g;
}

namespace {

bool live_empty(const std::set<int>& s, const std::set<int>& packed) {
  for (int id : s)
    if (!packed.count(id)) return false;
  return true;
}

}  // namespace

std::vector<int> valid_orientations(const PrecedenceGraph& g, int box_id) {
  std::vector<int> out;
  if (g.is_packed(box_id)) return out;
  const int idx = g.index_of(box_id);
  const BlockerSets& bs = g.blockers[static_cast<std::size_t>(idx)];
  if (!live_empty(bs.tb, g.packed)) return out;
  const bool side_free =
      live_empty(bs.lab, g.packed) || live_empty(bs.rab, g.packed);
  for (int o = 0; o < orientation_count(g.dims_mode); ++o) {
    if (orientation_needs_side(o, g.dims_mode) && !side_free) continue;
    out.push_back(o);
  }
  return out;
}

std::vector<OrientedState> valid_states(const PrecedenceGraph& g) {
  std::vector<OrientedState> out;
  for (std::size_t i = 0; i < g.box_ids.size(); ++i) {
    const int id = g.box_ids[i];
    for (int o : valid_orientations(g, id))
      out.push_back(OrientedState{id, o, oriented(g.dims[i], o, g.dims_mode)});
  }
  return out;
}

PrecedenceGraph remove_box(const PrecedenceGraph& g, int box_id) {
  if (g.is_packed(box_id))
    throw ContractError("box already packed: " + std::to_string(box_id));
  if (valid_orientations(g, box_id).empty())
    throw FeasibilityError("box not removable: " + std::to_string(box_id));
  PrecedenceGraph out = g;
  for (std::size_t i = 0; i < out.box_ids.size(); ++i) {
    if (out.box_ids[i] == box_id) continue;  // walls (self-loops) survive
    out.blockers[i].tb.erase(box_id);
    out.blockers[i].lab.erase(box_id);
    out.blockers[i].rab.erase(box_id);
  }
  out.packed.insert(box_id);
  return out;
}

DynamicEncoding encode_dynamic(const PrecedenceGraph& g, int capacity) {
  const int n = static_cast<int>(g.box_ids.size());
  int unpacked = 0;
  for (int id : g.box_ids)
    if (!g.is_packed(id)) ++unpacked;
  if (unpacked > capacity)
    throw CapacityError("unpacked boxes exceed capacity");
  if (n > capacity) throw CapacityError("boxes exceed capacity");

  DynamicEncoding enc;
  enc.capacity = capacity;
  enc.states_per_box = orientation_count(g.dims_mode);
  const int states = enc.states_per_box * capacity;
  enc.bits = Eigen::MatrixXd::Zero(3 * capacity, states);
  enc.packed.assign(static_cast<std::size_t>(states), 0);
  enc.dummy.assign(static_cast<std::size_t>(states), 0);

  for (int slot = 0; slot < capacity; ++slot) {
    for (int o = 0; o < enc.states_per_box; ++o) {
      const int s = slot * enc.states_per_box + o;
      if (slot >= n) {
        enc.dummy[static_cast<std::size_t>(s)] = 1;
        continue;
      }
      const int id = g.box_ids[static_cast<std::size_t>(slot)];
      if (g.is_packed(id)) {
        enc.packed[static_cast<std::size_t>(s)] = 1;
        continue;
      }
      const BlockerSets& bs = g.blockers[static_cast<std::size_t>(slot)];
      auto fill = [&](const std::set<int>& ids, int row0) {
        for (int b : ids) {
          if (g.packed.count(b)) continue;
          const int j = g.index_of(b);
          enc.bits(row0 + j, s) = 1.0;
        }
      };
      fill(bs.tb, 0);
      fill(bs.lab, capacity);
      fill(bs.rab, 2 * capacity);
    }
  }
  return enc;
}

std::string to_dot(const PrecedenceGraph& g) {
  std::ostringstream os;
  os << "digraph precedence {\n";
  for (std::size_t i = 0; i < g.box_ids.size(); ++i) {
    const int id = g.box_ids[i];
    const char* style = g.is_packed(id) ? " [style=dashed]" : "";
    os << "  b" << id << style << ";\n";
  }
  auto edges = [&](const char* label, auto pick) {
    for (std::size_t i = 0; i < g.box_ids.size(); ++i) {
      const int id = g.box_ids[i];
      for (int from : pick(g.blockers[i]))
        os << "  b" << from << " -> b" << id << " [label=" << label << "];\n";
    }
  };
  edges("TB", [](const BlockerSets& b) { return b.tb; });
  edges("LAB", [](const BlockerSets& b) { return b.lab; });
  edges("RAB", [](const BlockerSets& b) { return b.rab; });
  os << "}\n";
  return os.str();
}

}  // namespace tap

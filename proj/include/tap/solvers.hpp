#ifndef TAP_SOLVERS_HPP
#define TAP_SOLVERS_HPP

#include <map>
#include <vector>

#include "tap/placement.hpp"
#include "tap/precedence.hpp"
#include "tap/rng.hpp"

namespace tap {

// Stepping environment shared by the baseline solvers and policy rollouts:
// the live precedence graph, the target container maps, and the steps
// committed so far. commit() handles placement selection and the composition
// of the chosen orientation with the box's initial pile orientation, so a
// stored solution replays on the original instance.
struct PackEnv {
  const ProblemInstance* inst;
  PrecedenceGraph g;
  PackState state;
  std::vector<PlacedBox> steps;
  std::map<int, int> init_orient;

  explicit PackEnv(const ProblemInstance& inst_);
  void commit(const OrientedState& s, Strategy strategy);
  Solution finish() const;
};

// Steps a stored solution through the environment, enforcing the same rules
// a solver faces: every step must be a currently valid oriented state whose
// target placement is in bounds and drop-consistent, each box packed exactly
// once into its assigned container. Violations come back as text; an empty
// list means valid.
std::vector<std::string> validate_solution(const ProblemInstance& inst,
                                           const std::vector<PlacedBox>& steps);

// Reward of a stored solution (throws ValidationError if it does not replay).
RewardBreakdown replay_solution(const ProblemInstance& inst,
                                const std::vector<PlacedBox>& steps);

// Largest oriented extent among unpacked boxes; sizes the EMS ceiling.
int max_remaining_extent(const ProblemInstance& inst,
                         const PrecedenceGraph& g);

// States that are both movable (precedence) and placeable (footprint fits the
// target container in some x/z position).
std::vector<OrientedState> placeable_states(const ProblemInstance& inst,
                                            const PrecedenceGraph& g);

// Uniform choice over placeable states each step.
Solution solve_random(const ProblemInstance& inst, Strategy strategy, Rng& rng);

// Argmax of the hypothetical aggregate reward over every placeable state,
// placed by the strategy. Ties: lower box id, then lower orientation index.
Solution solve_greedy(const ProblemInstance& inst, Strategy strategy);

// Exact optimum by enumerating every feasible state sequence (placement still
// by the strategy). Oracle for tiny instances only.
Solution solve_exhaustive(const ProblemInstance& inst, Strategy strategy,
                          int max_boxes = 5);

}  // namespace tap

#endif

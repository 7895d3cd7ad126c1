#pragma once

#include "ptga/bra.hpp"

#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace ptga {

enum class Owner { min, max, random };
enum class NodeKind { state, responder, stochastic };

struct TbEdge {
  int target = 0;
  std::string label;
  int move = -1;  // index into the BRA move list of `player`; -1 for bottom or "proceed"
  Player player = Player::min;
};

struct TbNode {
  Owner owner = Owner::min;
  NodeKind kind = NodeKind::state;
  bool target = false;
  int bra_state = -1;
  int first_move = -1;  // responder nodes: the first mover's move (-1 = bottom)
  std::vector<TbEdge> edges;  // decision nodes
  Rational delay;  // stochastic nodes
  std::vector<std::pair<Rational, int>> dist;
};

// Decision nodes read the values produced in the same round, stochastic
// nodes those of the previous round; one round is one move of the game.
struct TurnBasedGame {
  Sense sense = Sense::upper;
  std::vector<TbNode> nodes;
  std::vector<int> state_node;  // BRA state -> its first-mover node

  std::size_t size() const { return nodes.size(); }
  int add_node(TbNode n);
  void check() const;  // throws std::logic_error on a malformed game
};

TurnBasedGame to_turn_based(const BraGame& game, Sense sense);

using ValueVector = std::vector<double>;
using ExactValues = std::vector<std::optional<Rational>>;  // nullopt is infinity
constexpr double infinity = std::numeric_limits<double>::infinity();

struct PositionalStrategy {
  std::vector<int> choice;  // edge index per owned node, -1 elsewhere
};

ValueVector bellman_step(const TurnBasedGame& g, const ValueVector& v);
std::vector<Rational> bellman_step_exact(const TurnBasedGame& g, const std::vector<Rational>& v);
ValueVector n_step_values(const TurnBasedGame& g, int n);
std::vector<Rational> n_step_values_exact(const TurnBasedGame& g, int n);

// Nodes from which Min cannot force reaching a target almost surely.
std::vector<bool> infinite_value_states(const TurnBasedGame& g);

struct SolveOptions {
  double epsilon = 1e-9;
  std::size_t max_iterations = 5000000;
};

struct SolveResult {
  ValueVector values;
  PositionalStrategy min_strategy;
  PositionalStrategy max_strategy;
  std::vector<bool> infinite;
  std::size_t iterations = 0;
  double residual = 0;
};

// Value iteration from zero; throws ResourceError when the cap is reached.
SolveResult solve(const TurnBasedGame& g, const SolveOptions& opts = {});

struct ExactSolveResult {
  ExactValues values;
  PositionalStrategy min_strategy;
  PositionalStrategy max_strategy;
  std::size_t improvement_rounds = 0;
};

// Strategy improvement over rationals, seeded with the iterative solution.
ExactSolveResult solve_exact(const TurnBasedGame& g, const SolveOptions& opts = {});

ExactValues evaluate_strategy_pair(const TurnBasedGame& g, const PositionalStrategy& min_strategy,
                                   const PositionalStrategy& max_strategy);

// Max's exact optimal counter-strategy against a fixed Min strategy.
std::pair<ExactValues, PositionalStrategy> best_response(const TurnBasedGame& g, const PositionalStrategy& min_strategy);

enum class Verdict { at_most, greater, undecided };

const char* to_string(Verdict v);

struct Decision {
  Verdict verdict = Verdict::undecided;
  double lower = 0;  // certified bracket around the value
  double upper = infinity;
  std::optional<Rational> exact_value;  // exact mode, finite values
  bool exact_infinite = false;
};

struct DecideOptions {
  bool exact = false;
  SolveOptions solve;
};

// B = nullopt encodes "no bound".
Decision decide_threshold(const TurnBasedGame& g, int node, const std::optional<Rational>& bound,
                          const DecideOptions& opts = {});

}  // namespace ptga

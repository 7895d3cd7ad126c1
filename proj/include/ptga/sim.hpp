#pragma once

#include "ptga/game.hpp"

#include <cstdint>
#include <memory>
#include <vector>

namespace ptga {

struct TimedMove {
  bool bottom = true;
  Rational delay;
  int edge = -1;  // index into Ptga::edges

  static TimedMove none() { return {}; }
  static TimedMove make(Rational t, int edge) { return {false, std::move(t), edge}; }

  bool operator==(const TimedMove&) const = default;
};

// Availability of a timed move for `who` in configuration `c`.
bool move_available(const Ptga& model, const Configuration& c, Player who, const TimedMove& m);

struct StepResult {
  Player winner = Player::min;
  TimedMove performed;
  std::vector<std::pair<Rational, Configuration>> distribution;
};

StepResult concrete_step(const Ptga& model, const Configuration& c, const TimedMove& min_move, const TimedMove& max_move);

struct PlayStep {
  TimedMove min_move;
  TimedMove max_move;
  Configuration next;
};

struct Play {
  Configuration start;
  std::vector<PlayStep> steps;
};

struct PlayMeasure {
  Rational probability;
  Rational time;
};

PlayMeasure play_measure(const Ptga& model, const Play& play);

class ConcreteStrategy {
 public:
  virtual ~ConcreteStrategy() = default;
  virtual TimedMove move(const Configuration& c) const = 0;
};

// Solved strategies of both players on the turn-based reduction. The
// responder's realisation depends on the first mover's positional choice.
struct StrategyProfile {
  const Ptga* model = nullptr;
  const BraGame* bra = nullptr;
  const TurnBasedGame* game = nullptr;
  PositionalStrategy min_strategy;
  PositionalStrategy max_strategy;
};

std::unique_ptr<ConcreteStrategy> bra_strategy_to_concrete(std::shared_ptr<const StrategyProfile> profile, Player who,
                                                           const Rational& epsilon_shift = Rational(1, 1 << 20));

struct SimOptions {
  std::size_t runs = 100000;
  std::size_t horizon = 10000;
  std::uint64_t seed = 1;
};

struct SimResult {
  double mean = 0;
  double stderr_ = 0;
  std::size_t hits = 0;
  std::size_t runs = 0;
  std::uint64_t seed = 0;
};

SimResult simulate_expected_time(const Ptga& model, const ConcreteStrategy& min_strategy,
                                 const ConcreteStrategy& max_strategy, const Configuration& init,
                                 const SimOptions& opts = {});

// One sampled play, for replay and validity checks.
Play sample_play(const Ptga& model, const ConcreteStrategy& min_strategy, const ConcreteStrategy& max_strategy,
                 const Configuration& init, std::size_t horizon, std::uint64_t seed, std::size_t run);

struct ExhaustiveResult {
  Rational hit_probability;
  Rational expected_time;  // sum over target-hitting plays of probability * time
};

// Enumerates all plays up to `horizon` steps.
ExhaustiveResult exhaustive_expected_time(const Ptga& model, const ConcreteStrategy& min_strategy,
                                          const ConcreteStrategy& max_strategy, const Configuration& init,
                                          std::size_t horizon);

}  // namespace ptga

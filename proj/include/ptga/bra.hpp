#pragma once

#include "ptga/model.hpp"

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace ptga {

struct BraState {
  int location = 0;
  ClockValuation valuation;
  Region region;

  bool operator==(const BraState&) const = default;
  std::string key() const;
};

enum class Op { inf, sup };

const char* to_string(Op op);

struct BraAction {
  int edge = 0;  // index into Ptga::edges; fixes the action and its owner
  Region target;
  Op op = Op::inf;

  bool operator==(const BraAction&) const = default;
};

// An enabled action of a state together with its delay and successors.
struct BraMove {
  BraAction action;
  int chain_pos = 0;  // position of action.target in the chain of the state's region
  Rational delay;
  std::vector<std::pair<Rational, int>> successors;  // (probability, state index)
};

// Which of the two proposals is performed.
enum class Sense { upper, lower };

const char* to_string(Sense s);

struct EnabledActions {
  std::vector<BraAction> min;  // empty means bottom
  std::vector<BraAction> max;
};

EnabledActions enabled_bra_actions(const Ptga& model, const BraState& s);
Rational bra_delay(const Ptga& model, const BraState& s, const BraAction& a);
std::vector<std::pair<Rational, BraState>> bra_successors(const Ptga& model, const BraState& s, const BraAction& a);

// True when Min's proposal is performed. Upper sense follows the winner rule
// with ties for Max; the lower sense lets the responding Min undercut inside
// an open region, except against Max's immediate move (inf of the current
// region `from`, delay 0). A missing action (bottom) always loses against a
// real one.
bool min_wins(const std::optional<BraAction>& alpha, const std::optional<BraAction>& beta, Sense sense = Sense::upper,
              const Region* from = nullptr);
// Convenience form returning the performed action.
BraAction bra_winner(const std::optional<BraAction>& alpha, const std::optional<BraAction>& beta,
                     Sense sense = Sense::upper, const Region* from = nullptr);

struct BraGame {
  const Ptga* model = nullptr;
  std::vector<BraState> states;
  std::vector<std::vector<BraMove>> min_moves;
  std::vector<std::vector<BraMove>> max_moves;
  std::vector<bool> target;
  int initial = 0;

  std::size_t size() const { return states.size(); }
  int find(const BraState& s) const;  // -1 when absent
  std::string action_label(const BraMove& m) const;

  std::unordered_map<std::string, int> index;
};

struct BraOptions {
  std::size_t state_cap = 1000000;
};

class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The model must outlive the returned game.
BraGame build_reachable_bra(const Ptga& model, const Configuration& init, const BraOptions& opts = {});

std::string bra_to_json(const BraGame& g);
std::string bra_to_dot(const BraGame& g);

}  // namespace ptga

#pragma once

#include "ptga/clockalg.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ptga {

enum class Player { min, max };

const char* to_string(Player p);

struct Branch {
  Rational probability;
  ClockSet resets = 0;
  int target = 0;

  bool operator==(const Branch&) const = default;
};

// One row of the transition table: the action `action` of `player` at `location`.
struct Edge {
  int location = 0;
  std::string action;
  Player player = Player::min;
  Zone guard;
  std::vector<Branch> branches;

  bool operator==(const Edge&) const = default;
};

struct Location {
  std::string name;
  Zone invariant;

  bool operator==(const Location&) const = default;
};

struct Configuration {
  int location = 0;
  ClockValuation valuation;

  bool operator==(const Configuration&) const = default;
};

struct Ptga {
  ClockNames clocks;
  int bound = 1;
  std::vector<Location> locations;
  std::vector<Edge> edges;
  std::vector<bool> target;  // per location
  std::optional<Configuration> init;

  int clock_count() const { return static_cast<int>(clocks.size()); }
  int find_location(const std::string& name) const;  // -1 when absent
  int find_clock(const std::string& name) const;
  std::vector<int> edges_from(int location) const;
  std::vector<std::string> actions(Player p) const;
  Zone universe() const { return Zone::universe(clock_count(), bound); }

  // Explicit init, or all clocks zero in the first location.
  Configuration initial_configuration() const;
  // "l0 x=1/2 y=0"; unspecified clocks are zero.
  Configuration parse_configuration(const std::string& text) const;
  std::string to_string(const Configuration& c) const;
  std::string reset_text(ClockSet s) const;

  bool operator==(const Ptga&) const = default;
};

// An edge can fire when its guard holds and every branch lands inside the
// invariant of its target location.
bool edge_enabled(const Ptga& model, int edge, const ClockValuation& v);
bool edge_enabled(const Ptga& model, int edge, const Region& r);

struct Issue {
  std::string code;
  std::string context;
  std::string message;
};

struct ValidationReport {
  std::vector<Issue> errors;
  std::vector<Issue> warnings;

  bool ok() const { return errors.empty(); }
  std::string to_json() const;
};

struct ValidateOptions {
  bool allow_zeno = false;
  std::optional<Configuration> init;  // overrides the model's init
};

ValidationReport validate(const Ptga& model, const ValidateOptions& opts = {});

struct CycleStep {
  int edge = 0;
  int branch = 0;
};

struct ZenoCheck {
  bool non_zeno = true;
  std::vector<CycleStep> witness;
};

ZenoCheck check_structural_non_zeno(const Ptga& model);
std::string describe_cycle(const Ptga& model, const std::vector<CycleStep>& cycle);

}  // namespace ptga

#pragma once

#include "ptga/rational.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ptga {

// Clocks are numbered 0..n-1; sets of clocks are bitmasks.
using ClockSet = std::uint32_t;
using ClockNames = std::vector<std::string>;
constexpr int max_clocks = 32;

inline bool contains_clock(ClockSet s, int c) { return (s >> c) & 1U; }

class ClockValuation {
 public:
  ClockValuation() = default;
  ClockValuation(std::vector<Rational> values, int bound);

  static ClockValuation zero(std::size_t clocks, int bound);

  std::size_t size() const { return values_.size(); }
  int bound() const { return bound_; }
  const Rational& operator[](std::size_t c) const { return values_[c]; }
  const std::vector<Rational>& values() const { return values_; }

  // nu + t; throws std::domain_error if some clock would exceed the bound.
  ClockValuation delayed(const Rational& t) const;
  // nu_C
  ClockValuation reset(ClockSet clocks) const;

  bool operator==(const ClockValuation& o) const { return bound_ == o.bound_ && values_ == o.values_; }
  bool operator!=(const ClockValuation& o) const { return !(*this == o); }

  std::string to_string(const ClockNames& names) const;

 private:
  std::vector<Rational> values_;
  int bound_ = 0;
};

Rational sup_distance(const ClockValuation& a, const ClockValuation& b);

enum class Rel { lt, le, eq, ge, gt };

// lhs - rhs REL bound, with rhs = -1 meaning the constant zero clock.
struct Atom {
  int lhs = 0;
  int rhs = -1;
  Rel rel = Rel::le;
  int bound = 0;

  bool operator==(const Atom&) const = default;
};

struct ClockConstraint {
  std::vector<Atom> atoms;

  bool operator==(const ClockConstraint&) const = default;
};

bool satisfies(const ClockValuation& v, const ClockConstraint& g);
std::string to_string(const ClockConstraint& g, const ClockNames& names);

// One difference bound: x_i - x_j < value (strict) or <= value; or no bound.
struct DbmBound {
  int value = 0;
  bool strict = false;
  bool infinite = true;

  static DbmBound inf() { return {}; }
  static DbmBound le(int c) { return {c, false, false}; }
  static DbmBound lt(int c) { return {c, true, false}; }

  bool operator==(const DbmBound& o) const
  {
    return infinite == o.infinite && (infinite || (value == o.value && strict == o.strict));
  }
  bool operator!=(const DbmBound& o) const { return !(*this == o); }
};

bool tighter(const DbmBound& a, const DbmBound& b);  // a strictly tighter than b
DbmBound operator+(const DbmBound& a, const DbmBound& b);

class Region;

// Closed DBM over clocks 1..n plus the reference clock 0, inside the box [0, K]^n.
class Zone {
 public:
  Zone() = default;
  static Zone universe(int clocks, int bound);
  static Zone empty(int clocks, int bound);
  // Throws std::domain_error when an atom's constant lies outside [0, K].
  static Zone from_constraint(int clocks, int bound, const ClockConstraint& g);

  int clocks() const { return n_; }
  int bound() const { return k_; }
  const DbmBound& at(int i, int j) const { return m_[i * (n_ + 1) + j]; }

  bool is_empty() const { return empty_; }
  bool contains(const ClockValuation& v) const;
  // Zones are unions of regions, so one representative decides inclusion.
  bool includes(const Region& r) const;

  Zone intersect(const Zone& o) const;
  Zone hull(const Zone& o) const;
  void constrain(int i, int j, DbmBound b);  // keeps canonical form

  ClockConstraint to_constraint() const;  // minimal, deterministic
  std::string to_string(const ClockNames& names) const;

  bool operator==(const Zone& o) const;
  bool operator!=(const Zone& o) const { return !(*this == o); }

 private:
  DbmBound& ref(int i, int j) { return m_[i * (n_ + 1) + j]; }
  void close();

  int n_ = 0;
  int k_ = 0;
  bool empty_ = false;
  std::vector<DbmBound> m_;
};

// Alur–Dill region for bound K: integer parts plus ranks of fractional parts,
// rank 0 meaning a zero fraction and 1..m the ordered non-zero classes.
class Region {
 public:
  Region() = default;
  Region(std::vector<int> integer_part, std::vector<int> frac_rank, int bound);

  const std::vector<int>& integer_part() const { return ints_; }
  const std::vector<int>& frac_rank() const { return ranks_; }
  int bound() const { return k_; }
  std::size_t clocks() const { return ints_.size(); }
  int classes() const;  // number of non-zero fractional classes
  bool is_thin() const;  // some clock has a zero fraction

  ClockValuation representative() const;
  Zone to_zone() const;
  std::string to_string(const ClockNames& names) const;
  std::string key() const;

  bool operator==(const Region& o) const { return k_ == o.k_ && ints_ == o.ints_ && ranks_ == o.ranks_; }
  bool operator!=(const Region& o) const { return !(*this == o); }
  bool operator<(const Region& o) const;

 private:
  std::vector<int> ints_;
  std::vector<int> ranks_;
  int k_ = 0;
};

Region region_of(const ClockValuation& v);
std::optional<Region> time_successor(const Region& r);
Region region_reset(const Region& r, ClockSet clocks);

// r, succ(r), succ(succ(r)), ... up to the last region of the chain.
std::vector<Region> future_chain(const Region& r);
// Position of `to` in the chain of `from`, or nullopt when not in its future.
std::optional<int> chain_position(const Region& from, const Region& to);
bool strictly_precedes(const Region& a, const Region& b);

Zone zone_between(const Region& from, const Region& to);

// A delay written as k - nu(c); clock = -1 stands for the zero delay.
struct DelayTerm {
  int clock = -1;
  int k = 0;

  Rational eval(const ClockValuation& v) const;
  bool operator==(const DelayTerm&) const = default;
};

// Delay forms of reaching `to` from nu in `from`. They are affine on `from`
// and extend continuously to its closure.
std::pair<DelayTerm, DelayTerm> delay_forms(const Region& from, const Region& to);
std::pair<Rational, Rational> delay_bounds(const ClockValuation& v, const Region& to);

struct FracSignature {
  std::vector<Rational> fracs;

  bool operator==(const FracSignature&) const = default;
};

FracSignature fractional_signature(const ClockValuation& v);
FracSignature k_shift(const FracSignature& sig, int k);
// Every entry of `sub` occurs in `sig` (both sorted).
bool is_subsequence(const FracSignature& sub, const FracSignature& sig);

}  // namespace ptga

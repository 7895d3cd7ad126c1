#pragma once

#include "ptga/game.hpp"
#include "ptga/parser.hpp"
#include "ptga/qsf.hpp"
#include "ptga/sim.hpp"

#include <random>
#include <string>
#include <vector>

namespace ptga::testing {

std::string fixture_path(const std::string& name);
Ptga load_fixture(const std::string& name);

ClockValuation val(const Ptga& m, std::initializer_list<Rational> xs);
Rational q(const char* text);

// First region met by scanning delays 1/D, 2/D, ... from the representative.
std::optional<Region> scanned_successor(const Region& r);

// Regions visited by the chain from `from` to `to`, by repeated delay scans.
std::vector<Region> scanned_chain(const Region& from, const Region& to);

// n-step values of the boundary region abstraction, straight from the
// Bellman equations with the winner function inlined. Entry [k][s] is
// the k-step value of state s, for k = 0..n.
std::vector<std::vector<Rational>> brute_force_n_step(const BraGame& g, Sense sense, int n);

// Random 2-clock arena with at most four locations and K <= 2. Rejection
// sampled until it validates and its abstraction stays small.
struct RandomModel {
  Ptga model;
  Configuration init;
};
RandomModel random_model(std::mt19937_64& rng, std::size_t max_states = 1500);

// Random quasi-simple tree over `clocks` clocks with leaves bounded by K.
Qsf random_qsf(std::mt19937_64& rng, int clocks, int bound, int depth);
ClockValuation random_valuation(std::mt19937_64& rng, int clocks, int bound, int denominator = 64);

// All same-(location, region) state pairs of a BRA.
std::vector<std::pair<int, int>> same_region_pairs(const BraGame& g);

}  // namespace ptga::testing

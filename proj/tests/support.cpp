#include "support.hpp"

#include <map>
#include <stdexcept>

#ifndef PTGA_MODELS_DIR
#error "PTGA_MODELS_DIR must point at the shipped models"
#endif

namespace ptga::testing {

std::string fixture_path(const std::string& name) { return std::string(PTGA_MODELS_DIR) + "/" + name + ".ptga"; }

Ptga load_fixture(const std::string& name) { return parse_model_file(fixture_path(name)); }

ClockValuation val(const Ptga& m, std::initializer_list<Rational> xs)
{
  return ClockValuation(std::vector<Rational>(xs), m.bound);
}

Rational q(const char* text) { return parse_rational(text); }

std::optional<Region> scanned_successor(const Region& r)
{
  ClockValuation v = r.representative();
  int d = 2 * (r.classes() + 1);
  for (int i = 1;; ++i) {
    Rational t = ratio(i, d);
    bool over = false;
    for (auto const& x : v.values())
      over = over || x + t > r.bound();
    if (over)
      return std::nullopt;
    Region next = region_of(v.delayed(t));
    if (next != r)
      return next;
  }
}

std::vector<Region> scanned_chain(const Region& from, const Region& to)
{
  std::vector<Region> out{from};
  while (out.back() != to) {
    auto next = scanned_successor(out.back());
    if (!next)
      throw std::domain_error("target region is not in the future");
    out.push_back(*next);
  }
  return out;
}

namespace {

// The winner function, restated from its definition.
bool min_performs(const BraMove* a, const BraMove* b, Sense sense)
{
  if (!a)
    return false;
  if (!b)
    return true;
  if (a->chain_pos != b->chain_pos)
    return a->chain_pos < b->chain_pos;
  bool a_inf = a->action.op == Op::inf, b_inf = b->action.op == Op::inf;
  if (sense == Sense::upper)
    return a_inf && !b_inf;
  if (a->action.target.is_thin())
    return false;
  // Max's immediate move cannot be undercut.
  return !b_inf || (a_inf && b->chain_pos != 0);
}

}  // namespace

std::vector<std::vector<Rational>> brute_force_n_step(const BraGame& g, Sense sense, int n)
{
  std::vector<std::vector<Rational>> v(1, std::vector<Rational>(g.size(), Rational(0)));
  for (int k = 0; k < n; ++k) {
    auto const& prev = v.back();
    std::vector<Rational> next(g.size(), Rational(0));
    for (std::size_t s = 0; s < g.size(); ++s) {
      if (g.target[s])
        continue;
      std::vector<const BraMove*> as, bs;
      for (auto const& m : g.min_moves[s])
        as.push_back(&m);
      for (auto const& m : g.max_moves[s])
        bs.push_back(&m);
      if (as.empty())
        as.push_back(nullptr);
      if (bs.empty())
        bs.push_back(nullptr);
      auto payoff = [&](const BraMove* a, const BraMove* b) {
        const BraMove* w = min_performs(a, b, sense) ? a : b;
        Rational x = w->delay;
        for (auto const& [p, t] : w->successors)
          x += p * prev[t];
        return x;
      };
      std::optional<Rational> outer;
      if (sense == Sense::upper) {
        for (auto* a : as) {
          std::optional<Rational> inner;
          for (auto* b : bs) {
            Rational x = payoff(a, b);
            if (!inner || x > *inner)
              inner = x;
          }
          if (!outer || *inner < *outer)
            outer = inner;
        }
      }
      else {
        for (auto* b : bs) {
          std::optional<Rational> inner;
          for (auto* a : as) {
            Rational x = payoff(a, b);
            if (!inner || x < *inner)
              inner = x;
          }
          if (!outer || *inner > *outer)
            outer = inner;
        }
      }
      next[s] = *outer;
    }
    v.push_back(std::move(next));
  }
  return v;
}

namespace {

template <class T>
const T& pick(std::mt19937_64& rng, const std::vector<T>& xs)
{
  return xs[std::uniform_int_distribution<std::size_t>(0, xs.size() - 1)(rng)];
}

int uniform(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

Atom atom(int lhs, int rhs, Rel rel, int bound) { return {lhs, rhs, rel, bound}; }

ClockConstraint random_guard(std::mt19937_64& rng, int k)
{
  ClockConstraint g;
  int atoms = uniform(rng, 0, 2);
  const std::vector<Rel> rels{Rel::lt, Rel::le, Rel::eq, Rel::ge, Rel::gt};
  for (int i = 0; i < atoms; ++i) {
    int c = uniform(rng, 0, 1);
    if (uniform(rng, 0, 4) == 0)
      g.atoms.push_back(atom(c, 1 - c, pick(rng, rels), uniform(rng, 0, 1)));
    else
      g.atoms.push_back(atom(c, -1, pick(rng, rels), uniform(rng, 0, k)));
  }
  return g;
}

}  // namespace

RandomModel random_model(std::mt19937_64& rng, std::size_t max_states)
{
  static const std::vector<Rational> halves{Rational(1, 2), Rational(1, 3), Rational(1, 4), Rational(1, 5)};
  for (;;) {
    Ptga m;
    m.clocks = {"x", "y"};
    m.bound = uniform(rng, 1, 2);
    int k = m.bound;
    int nloc = uniform(rng, 2, 4);
    for (int l = 0; l < nloc; ++l) {
      ClockConstraint inv;
      if (uniform(rng, 0, 2) == 0)
        inv.atoms.push_back(atom(uniform(rng, 0, 1), -1, Rel::le, uniform(rng, 1, k)));
      m.locations.push_back({"l" + std::to_string(l), Zone::from_constraint(2, k, inv)});
    }
    m.target.assign(nloc, false);
    m.target[nloc - 1] = true;
    int actions = 0;
    for (int l = 0; l + 1 < nloc; ++l) {
      int edges = uniform(rng, 1, 3);
      for (int e = 0; e < edges; ++e) {
        Edge edge;
        edge.location = l;
        edge.player = uniform(rng, 0, 2) == 0 ? Player::max : Player::min;
        edge.action = (edge.player == Player::min ? "a" : "b") + std::to_string(actions++);
        ClockConstraint g = random_guard(rng, k);
        int nb = uniform(rng, 1, 2);
        Rational left = 1;
        bool backward = false;
        for (int b = 0; b < nb; ++b) {
          Branch br;
          br.probability = b + 1 == nb ? left : pick(rng, halves);
          left -= br.probability;
          br.target = uniform(rng, 0, nloc - 1);
          br.resets = static_cast<ClockSet>(uniform(rng, 0, 3));
          backward = backward || br.target <= l;
          edge.branches.push_back(br);
        }
        // Edges that may close a cycle reset a clock they bound from below.
        if (backward) {
          int c = uniform(rng, 0, 1);
          g.atoms.push_back(atom(c, -1, Rel::ge, 1));
          for (auto& br : edge.branches)
            br.resets |= 1U << c;
        }
        edge.guard = Zone::from_constraint(2, k, g);
        m.edges.push_back(std::move(edge));
      }
    }
    // A grid-valued initial valuation inside the first invariant.
    int den = uniform(rng, 1, 4);
    std::vector<Rational> init;
    for (int c = 0; c < 2; ++c)
      init.push_back(ratio(uniform(rng, 0, den * k), den));
    ClockValuation v(init, k);
    if (!m.locations[0].invariant.contains(v))
      continue;
    m.init = Configuration{0, v};
    if (!validate(m).ok())
      continue;
    try {
      auto bra = build_reachable_bra(m, *m.init, {max_states});
      (void)bra;
    }
    catch (const ResourceError&) {
      continue;
    }
    return {m, *m.init};
  }
}

Qsf random_qsf(std::mt19937_64& rng, int clocks, int bound, int depth)
{
  if (depth == 0 || uniform(rng, 0, 3) == 0) {
    Rational e = ratio(uniform(rng, 0, 8 * bound), uniform(rng, 1, 4));
    if (uniform(rng, 0, 1))
      return qsf_constant(e);
    return qsf_linear(e + bound, uniform(rng, 0, clocks - 1));
  }
  int kids = uniform(rng, 1, 3);
  std::vector<Qsf> cs;
  for (int i = 0; i < kids; ++i)
    cs.push_back(random_qsf(rng, clocks, bound, depth - 1));
  switch (uniform(rng, 0, 2)) {
  case 0: return combine(QsfKind::min, cs);
  case 1: return combine(QsfKind::max, cs);
  default: {
    std::vector<Rational> w;
    Rational left = 1;
    for (int i = 0; i + 1 < kids; ++i) {
      Rational x = left * ratio(uniform(rng, 1, 3), 4);
      w.push_back(x);
      left -= x;
    }
    w.push_back(left);
    return combine(QsfKind::convex, cs, w);
  }
  }
}

ClockValuation random_valuation(std::mt19937_64& rng, int clocks, int bound, int denominator)
{
  std::vector<Rational> v;
  for (int c = 0; c < clocks; ++c)
    v.push_back(ratio(uniform(rng, 0, bound * denominator), denominator));
  return ClockValuation(v, bound);
}

std::vector<std::pair<int, int>> same_region_pairs(const BraGame& g)
{
  std::map<std::pair<int, std::string>, std::vector<int>> groups;
  for (std::size_t s = 0; s < g.size(); ++s)
    groups[{g.states[s].location, g.states[s].region.key()}].push_back(static_cast<int>(s));
  std::vector<std::pair<int, int>> out;
  for (auto const& [key, ids] : groups)
    for (std::size_t i = 0; i < ids.size(); ++i)
      for (std::size_t j = i + 1; j < ids.size(); ++j)
        out.emplace_back(ids[i], ids[j]);
  return out;
}

}  // namespace ptga::testing

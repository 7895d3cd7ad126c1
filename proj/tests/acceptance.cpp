// Acceptance checks, one PASS/FAIL line per criterion.
#include "support.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>

using namespace ptga;
using namespace ptga::testing;

namespace {

struct Failure {
  std::string what;
};

void expect(bool ok, const std::string& what)
{
  if (!ok)
    throw Failure{what};
}

struct Bundle {
  Ptga model;
  Configuration init;
  BraGame bra;
  TurnBasedGame game;
  int root() const { return game.state_node[bra.initial]; }
};

std::unique_ptr<Bundle> bundle(const Ptga& m, const Configuration& init, Sense sense)
{
  auto b = std::make_unique<Bundle>();
  b->model = m;
  b->init = init;
  b->bra = build_reachable_bra(b->model, init);
  b->game = to_turn_based(b->bra, sense);
  return b;
}

std::unique_ptr<Bundle> bundle(const char* name, Sense sense, const char* init = nullptr)
{
  Ptga m = load_fixture(name);
  return bundle(m, init ? m.parse_configuration(init) : m.initial_configuration(), sense);
}

std::string str(const Rational& r) { return r.get_str(); }

bool close(double a, const std::optional<Rational>& b, double tol)
{
  if (!b)
    return std::isinf(a);
  return std::abs(a - to_double(*b)) <= tol;
}

// Both modes on a fresh abstraction from `init`.
void check_value(const char* name, Sense sense, const std::string& init, const Rational& want)
{
  auto b = bundle(name, sense, init.c_str());
  auto it = solve(b->game);
  auto ex = solve_exact(b->game);
  std::string where = std::string(name) + " " + init + " " + to_string(sense);
  expect(std::abs(it.values[b->root()] - to_double(want)) <= 1e-9,
         where + ": iterative " + std::to_string(it.values[b->root()]) + " != " + str(want));
  auto v = ex.values[b->root()];
  expect(v && *v == want, where + ": exact " + (v ? str(*v) : "inf") + " != " + str(want));
}

void fig2_values()
{
  for (Sense s : {Sense::upper, Sense::lower}) {
    check_value("fig2", s, "l0 x=0", s == Sense::upper ? Rational(1) : Rational(0));
    for (auto const* x : {"0", "1/4", "1/2"}) {
      Rational xv = q(x);
      std::string sx = std::string("x=") + x;
      check_value("fig2", s, "l3 " + sx, 1 - xv);
      check_value("fig2", s, "l2 " + sx, xv == 0 ? Rational(1) : Rational(0));
      if (xv == 0)
        check_value("fig2", s, "l1 " + sx, 0);
    }
  }
}

void fig4_curve()
{
  for (auto const* x : {"0", "1/4", "1/2", "3/4"}) {
    Rational xv = q(x);
    check_value("fig4", Sense::upper, std::string("l0 x=") + x, std::min(Rational(1, 2), Rational(1 - xv)));
  }
}

void example_play_measure()
{
  Ptga m = load_fixture("fig1");
  auto edge = [&](int l, const char* a) {
    for (std::size_t e = 0; e < m.edges.size(); ++e)
      if (m.edges[e].location == l && m.edges[e].action == a)
        return static_cast<int>(e);
    throw Failure{std::string("missing edge ") + a};
  };
  auto c = [&](const char* t) { return m.parse_configuration(t); };
  Play p{c("l0 x=0 y=0"), {}};
  p.steps.push_back({TimedMove::make(q("1.1"), edge(0, "b")), TimedMove::none(), c("l1 x=0 y=1.1")});
  p.steps.push_back(
      {TimedMove::make(q("0.5"), edge(1, "a")), TimedMove::make(q("0.2"), edge(1, "c")), c("l0 x=0.2 y=0")});
  p.steps.push_back({TimedMove::make(q("1.1"), edge(0, "b")), TimedMove::none(), c("l2 x=0 y=0")});
  auto pm = play_measure(m, p);
  expect(pm.probability == q("1/20"), "probability " + str(pm.probability));
  expect(pm.time == q("12/5"), "time " + str(pm.time));
}

void fig5_fidelity()
{
  Ptga m = load_fixture("fig1");
  auto g = build_reachable_bra(m, m.parse_configuration("l0 x=0.3 y=0.1"));
  auto const& moves = g.min_moves[g.initial];
  for (auto const* d : {"0.7", "0.9", "1.7"}) {
    bool found = false;
    for (auto const& mv : moves)
      found = found || mv.delay == q(d);
    expect(found, std::string("no move with delay ") + d);
  }
  int l1 = g.find(BraState{1, val(m, {0, q("0.8")}), region_of(val(m, {0, q("0.8")}))});
  int l2 = g.find(BraState{2, val(m, {0, 0}), region_of(val(m, {0, 0}))});
  expect(l1 >= 0 && l2 >= 0, "successor states missing");
  bool split = false;
  for (auto const& mv : moves) {
    if (mv.delay != q("0.7") || mv.successors.size() != 2)
      continue;
    auto const& s = mv.successors;
    split = split || (s[0] == std::pair{q("1/2"), l1} && s[1] == std::pair{q("1/2"), l2});
  }
  expect(split, "0.5/0.5 split at delay 0.7 missing");
}

void monotone_convergence()
{
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 100; ++i) {
    auto rm = random_model(rng);
    Sense sense = i % 2 ? Sense::lower : Sense::upper;
    auto b = bundle(rm.model, rm.init, sense);
    std::string tag = "model " + std::to_string(i) + ": ";
    auto prev = n_step_values_exact(b->game, 0);
    for (int n = 1; n <= 12; ++n) {
      auto cur = bellman_step_exact(b->game, prev);
      for (std::size_t k = 0; k < cur.size(); ++k)
        expect(prev[k] <= cur[k], tag + "n-step values decrease at n=" + std::to_string(n));
      prev = std::move(cur);
    }
    // The stop rule bounds the step residual, not the distance to the fixpoint;
    // a tenfold margin under the 1e-8 agreement bound absorbs slow mixing.
    auto it = solve(b->game, {1e-10});
    auto next = bellman_step(b->game, it.values);
    auto ex = solve_exact(b->game);
    for (std::size_t k = 0; k < b->game.size(); ++k) {
      expect(close(it.values[k], ex.values[k], 1e-8), tag + "exact and iterative disagree");
      if (!std::isfinite(it.values[k]))
        continue;
      expect(std::abs(next[k] - it.values[k]) <= 1e-8, tag + "optimality equations violated");
      expect(to_double(prev[k]) <= it.values[k] + 1e-8, tag + "n-step above the limit");
    }
  }
}

std::vector<std::unique_ptr<Bundle>> fixtures()
{
  std::vector<std::unique_ptr<Bundle>> out;
  for (Sense s : {Sense::upper, Sense::lower}) {
    out.push_back(bundle("fig1", s));
    out.push_back(bundle("fig1", s, "l0 x=0.3 y=0.1"));
    out.push_back(bundle("fig2", s));
    out.push_back(bundle("fig2", s, "l0 x=0.5"));
    out.push_back(bundle("fig4", s));
    out.push_back(bundle("fig4", s, "l0 x=0.75"));
  }
  return out;
}

void non_expansiveness()
{
  for (auto const& b : fixtures()) {
    auto pairs = same_region_pairs(b->bra);
    auto check = [&](const std::function<std::optional<Rational>(int)>& value, const std::string& tag) {
      for (auto [x, y] : pairs) {
        auto d = sup_distance(b->bra.states[x].valuation, b->bra.states[y].valuation);
        auto vx = value(b->game.state_node[x]), vy = value(b->game.state_node[y]);
        expect(vx.has_value() == vy.has_value(), tag + ": finite next to infinite");
        if (vx)
          expect(abs(*vx - *vy) <= d, tag + ": |V(s1)-V(s2)| exceeds the distance");
      }
    };
    auto v = n_step_values_exact(b->game, 0);
    for (int n = 1; n <= 20; ++n) {
      v = bellman_step_exact(b->game, v);
      check([&](int node) { return std::optional<Rational>(v[node]); }, "n=" + std::to_string(n));
    }
    auto ex = solve_exact(b->game);
    check([&](int node) { return ex.values[node]; }, "converged");
  }
}

void simulator_agreement()
{
  for (auto const* name : {"fig1", "fig4"}) {
    auto b = bundle(name, Sense::upper);
    auto ex = solve_exact(b->game);
    auto prof = std::make_shared<StrategyProfile>(
        StrategyProfile{&b->model, &b->bra, &b->game, ex.min_strategy, ex.max_strategy});
    auto mu = bra_strategy_to_concrete(prof, Player::min);
    auto chi = bra_strategy_to_concrete(prof, Player::max);
    auto r = simulate_expected_time(b->model, *mu, *chi, b->init, {100000, 10000, 12345});
    auto v = ex.values[b->root()];
    expect(v.has_value(), std::string(name) + ": infinite value");
    std::ostringstream os;
    os << name << ": mean " << r.mean << " se " << r.stderr_ << " value " << to_double(*v);
    expect(r.hits == r.runs, os.str() + " hit fraction below 1");
    expect(std::abs(r.mean - to_double(*v)) <= 3 * r.stderr_, os.str());
  }
}

void qsf_suite()
{
  std::mt19937_64 rng(99);
  for (int i = 0; i < 10000; ++i) {
    auto f = random_qsf(rng, 2, 2, 4);
    auto a = random_valuation(rng, 2, 2, 32), b = random_valuation(rng, 2, 2, 32);
    expect(abs(eval_qsf(f, a) - eval_qsf(f, b)) <= sup_distance(a, b), "non-expansiveness");
  }
  int elapse_checked = 0;
  while (elapse_checked < 1000) {
    auto f = random_qsf(rng, 2, 2, 4);
    int c = static_cast<int>(rng() % 2);
    int target = 1 + static_cast<int>(rng() % 2);
    auto a = random_valuation(rng, 2, 2, 32);
    if (a[c] > target)
      continue;
    Rational t = target - a[c];
    bool inside = true;
    for (auto const& x : a.values())
      inside = inside && x + t <= 2;
    if (!inside)
      continue;
    expect(eval_qsf(elapse_transform(f, c, target), a) == t + eval_qsf(f, a.delayed(t)), "elapse law");
    ++elapse_checked;
  }
  for (int i = 0; i < 1000; ++i) {
    auto f = random_qsf(rng, 2, 2, 4);
    auto cs = static_cast<ClockSet>(rng() % 4);
    auto a = random_valuation(rng, 2, 2, 32);
    expect(eval_qsf(reset_transform(f, cs), a) == eval_qsf(f, a.reset(cs)), "reset law");
  }
  for (int i = 0; i < 1000; ++i) {
    auto f = random_qsf(rng, 2, 2, 4);
    auto a = random_valuation(rng, 2, 2, 32);
    Rational room = 2;
    for (auto const& x : a.values())
      room = std::min(room, Rational(2 - x));
    Rational prev = eval_qsf(f, a);
    for (int k = 1; k <= 16; ++k) {
      Rational t = room * ratio(k, 16);
      Rational cur = t + eval_qsf(f, a.delayed(t));
      expect(prev <= cur, "shifted evaluation decreases");
      prev = cur;
    }
  }
}

void brute_force_equivalence()
{
  int compared = 0;
  for (auto const& b : fixtures()) {
    if (b->bra.size() > 50)
      continue;
    auto brute = brute_force_n_step(b->bra, b->game.sense, 4);
    for (int n = 0; n <= 4; ++n) {
      auto v = n_step_values_exact(b->game, n);
      for (std::size_t s = 0; s < b->bra.size(); ++s)
        expect(v[b->game.state_node[s]] == brute[n][s], "n=" + std::to_string(n) + " state " + std::to_string(s) +
                                                            ": " + str(v[b->game.state_node[s]]) +
                                                            " != " + str(brute[n][s]));
    }
    ++compared;
  }
  expect(compared > 0, "no fixture small enough");
}

}  // namespace

int main()
{
  struct Criterion {
    int id;
    const char* title;
    void (*run)();
  };
  const Criterion all[] = {
      {1, "Fig. 2 upper/lower values and intermediate values", fig2_values},
      {2, "Fig. 4 value curve", fig4_curve},
      {3, "Example 3.5 play measure", example_play_measure},
      {4, "Fig. 5 abstraction delays and successors", fig5_fidelity},
      {5, "monotone convergence on 100 random models", monotone_convergence},
      {6, "regional non-expansiveness", non_expansiveness},
      {7, "Monte Carlo agreement on Fig. 1 and Fig. 4", simulator_agreement},
      {8, "quasi-simple function laws", qsf_suite},
      {9, "brute-force n-step oracle", brute_force_equivalence},
  };
  int failed = 0;
  for (auto const& c : all) {
    auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = true;
    try {
      c.run();
    }
    catch (const Failure& f) {
      ok = false;
      detail = f.what;
    }
    catch (const std::exception& e) {
      ok = false;
      detail = std::string("exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << (ok ? "PASS" : "FAIL") << " " << c.id << " " << c.title;
    if (!ok)
      std::cout << " (" << detail << ")";
    std::cout << " [" << std::fixed;
    std::cout.precision(2);
    std::cout << secs << "s]" << std::endl;
    failed += ok ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}

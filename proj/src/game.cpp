#include "ptga/game.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

namespace ptga {

const char* to_string(Verdict v)
{
  switch (v) {
  case Verdict::at_most: return "AT_MOST";
  case Verdict::greater: return "GREATER";
  case Verdict::undecided: return "UNDECIDED";
  }
  return "?";
}

int TurnBasedGame::add_node(TbNode n)
{
  nodes.push_back(std::move(n));
  return static_cast<int>(nodes.size()) - 1;
}

void TurnBasedGame::check() const
{
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    auto const& n = nodes[i];
    if (n.target)
      continue;
    if (n.owner == Owner::random) {
      if (n.dist.empty())
        throw std::logic_error("stochastic node without successors");
      Rational sum = 0;
      for (auto const& [p, t] : n.dist) {
        if (p < 0 || t < 0 || t >= static_cast<int>(nodes.size()))
          throw std::logic_error("bad stochastic row");
        sum += p;
      }
      if (sum != 1 || n.delay < 0)
        throw std::logic_error("stochastic row does not sum to one");
    }
    else {
      if (n.edges.empty())
        throw std::logic_error("decision node without choices");
      for (auto const& e : n.edges)
        if (e.target < 0 || e.target >= static_cast<int>(nodes.size()))
          throw std::logic_error("edge to an unknown node");
    }
  }
}

// ---------------------------------------------------------------- reduction

TurnBasedGame to_turn_based(const BraGame& bra, Sense sense)
{
  TurnBasedGame g;
  g.sense = sense;
  auto const n = bra.size();
  Player first = sense == Sense::upper ? Player::min : Player::max;
  Player second = first == Player::min ? Player::max : Player::min;
  auto owner_of = [](Player p) { return p == Player::min ? Owner::min : Owner::max; };

  for (std::size_t s = 0; s < n; ++s) {
    TbNode node;
    node.owner = owner_of(first);
    node.kind = NodeKind::state;
    node.bra_state = static_cast<int>(s);
    node.target = bra.target[s];
    g.state_node.push_back(g.add_node(std::move(node)));
  }

  std::map<std::tuple<int, int, int>, int> stochastic;
  auto stochastic_node = [&](int s, Player p, int move) {
    auto key = std::make_tuple(s, p == Player::min ? 0 : 1, move);
    auto it = stochastic.find(key);
    if (it != stochastic.end())
      return it->second;
    auto const& mv = (p == Player::min ? bra.min_moves : bra.max_moves)[s][move];
    TbNode node;
    node.owner = Owner::random;
    node.kind = NodeKind::stochastic;
    node.bra_state = s;
    node.delay = mv.delay;
    for (auto const& [prob, t] : mv.successors)
      node.dist.emplace_back(prob, g.state_node[t]);
    int id = g.add_node(std::move(node));
    stochastic.emplace(key, id);
    return id;
  };

  // Min's proposal (index into its list, -1 bottom) against Max's.
  auto min_performed = [&](int s, int a, int b) {
    if (a < 0)
      return false;
    if (b < 0)
      return true;
    auto const& ma = bra.min_moves[s][a];
    auto const& mb = bra.max_moves[s][b];
    if (ma.chain_pos != mb.chain_pos)
      return ma.chain_pos < mb.chain_pos;
    if (sense == Sense::upper)
      return ma.action.op == Op::inf && mb.action.op == Op::sup;
    if (ma.action.target.is_thin() || mb.action.op != Op::inf)
      return !ma.action.target.is_thin();
    return ma.action.op == Op::inf && mb.chain_pos != 0;
  };

  for (std::size_t si = 0; si < n; ++si) {
    int s = static_cast<int>(si);
    if (bra.target[s])
      continue;
    auto const& first_moves = first == Player::min ? bra.min_moves[s] : bra.max_moves[s];
    auto const& second_moves = second == Player::min ? bra.min_moves[s] : bra.max_moves[s];
    if (first_moves.empty() && second_moves.empty())
      throw std::domain_error("state " + std::to_string(s) + " has no action for either player");
    std::vector<int> firsts;
    if (first_moves.empty())
      firsts.push_back(-1);
    for (std::size_t a = 0; a < first_moves.size(); ++a)
      firsts.push_back(static_cast<int>(a));

    for (int f : firsts) {
      TbNode resp;
      resp.owner = owner_of(second);
      resp.kind = NodeKind::responder;
      resp.bra_state = s;
      resp.first_move = f;
      bool can_proceed = second_moves.empty();
      std::vector<TbEdge> overrides;
      for (std::size_t r = 0; r < second_moves.size(); ++r) {
        int rr = static_cast<int>(r);
        bool min_first = first == Player::min;
        bool mp = min_first ? min_performed(s, f, rr) : min_performed(s, rr, f);
        bool responder_wins = min_first ? !mp : mp;
        if (responder_wins)
          overrides.push_back({stochastic_node(s, second, rr), bra.action_label(second_moves[r]), rr, second});
        else
          can_proceed = true;
      }
      if (can_proceed && f >= 0)
        resp.edges.push_back({stochastic_node(s, first, f), "proceed", -1, first});
      for (auto& e : overrides)
        resp.edges.push_back(std::move(e));
      int rid = g.add_node(std::move(resp));
      std::string label = f < 0 ? "bottom" : bra.action_label(first_moves[f]);
      g.nodes[g.state_node[s]].edges.push_back({rid, label, f, first});
    }
  }
  g.check();
  return g;
}

// ---------------------------------------------------------------- value iteration

namespace {

std::vector<int> evaluation_order(const TurnBasedGame& g)
{
  std::vector<int> order;
  for (auto kind : {NodeKind::stochastic, NodeKind::responder, NodeKind::state})
    for (std::size_t i = 0; i < g.size(); ++i)
      if (g.nodes[i].kind == kind)
        order.push_back(static_cast<int>(i));
  return order;
}

struct Compiled {
  std::vector<int> order;
  std::vector<double> delay;
  std::vector<std::vector<std::pair<double, int>>> dist;
};

Compiled compile(const TurnBasedGame& g)
{
  Compiled c;
  c.order = evaluation_order(g);
  c.delay.resize(g.size());
  c.dist.resize(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    c.delay[i] = to_double(g.nodes[i].delay);
    for (auto const& [p, t] : g.nodes[i].dist)
      c.dist[i].emplace_back(to_double(p), t);
  }
  return c;
}

void step_into(const TurnBasedGame& g, const Compiled& c, const ValueVector& v, ValueVector& out,
               const std::vector<bool>* frozen)
{
  out = v;
  for (int n : c.order) {
    auto const& node = g.nodes[n];
    if (node.target) {
      out[n] = 0;
      continue;
    }
    if (frozen && (*frozen)[n])
      continue;
    if (node.owner == Owner::random) {
      double acc = c.delay[n];
      for (auto const& [p, t] : c.dist[n])
        acc += p * v[t];
      out[n] = acc;
    }
    else {
      bool is_min = node.owner == Owner::min;
      double best = is_min ? infinity : -infinity;
      for (auto const& e : node.edges) {
        double x = out[e.target];
        best = is_min ? std::min(best, x) : std::max(best, x);
      }
      out[n] = best;
    }
  }
}

}  // namespace

ValueVector bellman_step(const TurnBasedGame& g, const ValueVector& v)
{
  if (v.size() != g.size())
    throw std::invalid_argument("value vector does not match the game");
  ValueVector out;
  step_into(g, compile(g), v, out, nullptr);
  return out;
}

std::vector<Rational> bellman_step_exact(const TurnBasedGame& g, const std::vector<Rational>& v)
{
  if (v.size() != g.size())
    throw std::invalid_argument("value vector does not match the game");
  std::vector<Rational> out(v);
  for (int n : evaluation_order(g)) {
    auto const& node = g.nodes[n];
    if (node.target) {
      out[n] = 0;
      continue;
    }
    if (node.owner == Owner::random) {
      Rational acc = node.delay;
      for (auto const& [p, t] : node.dist)
        acc += p * v[t];
      out[n] = acc;
    }
    else {
      bool is_min = node.owner == Owner::min;
      Rational best = out[node.edges.front().target];
      for (auto const& e : node.edges) {
        auto const& x = out[e.target];
        if (is_min ? x < best : x > best)
          best = x;
      }
      out[n] = best;
    }
  }
  return out;
}

ValueVector n_step_values(const TurnBasedGame& g, int n)
{
  if (n < 0)
    throw std::invalid_argument("negative horizon");
  auto c = compile(g);
  ValueVector v(g.size(), 0.0), next;
  for (int i = 0; i < n; ++i) {
    step_into(g, c, v, next, nullptr);
    v.swap(next);
  }
  return v;
}

std::vector<Rational> n_step_values_exact(const TurnBasedGame& g, int n)
{
  if (n < 0)
    throw std::invalid_argument("negative horizon");
  std::vector<Rational> v(g.size(), Rational(0));
  for (int i = 0; i < n; ++i)
    v = bellman_step_exact(g, v);
  return v;
}

// ---------------------------------------------------------------- qualitative analysis

namespace {

struct AlmostSure {
  std::vector<bool> winning;
  std::vector<int> attractor;  // Min's edge index on winning Min nodes
  std::vector<int> spoiler;    // Max's edge index on losing Max nodes
};

// Almost-sure reachability for Min; `restrict` pins Min's choices.
AlmostSure almost_sure(const TurnBasedGame& g, const PositionalStrategy* restrict)
{
  auto const n = g.size();
  std::vector<bool> in(n, true);
  std::vector<int> att(n, -1), spoil(n, -1);
  auto allowed = [&](int v, int e) { return !restrict || restrict->choice[v] == e; };
  while (true) {
    for (bool changed = true; changed;) {
      changed = false;
      for (std::size_t v = 0; v < n; ++v) {
        auto const& node = g.nodes[v];
        if (!in[v] || node.target)
          continue;
        bool leave = false;
        if (node.owner == Owner::random) {
          for (auto const& [p, t] : node.dist)
            leave = leave || (p > 0 && !in[t]);
        }
        else if (node.owner == Owner::max) {
          for (std::size_t e = 0; e < node.edges.size() && !leave; ++e)
            if (!in[node.edges[e].target]) {
              leave = true;
              spoil[v] = static_cast<int>(e);
            }
        }
        else {
          leave = true;
          for (std::size_t e = 0; e < node.edges.size(); ++e)
            if (allowed(static_cast<int>(v), static_cast<int>(e)) && in[node.edges[e].target])
              leave = false;
        }
        if (leave) {
          in[v] = false;
          changed = true;
        }
      }
    }
    std::vector<bool> pos(n, false);
    for (std::size_t v = 0; v < n; ++v)
      pos[v] = in[v] && g.nodes[v].target;
    std::fill(att.begin(), att.end(), -1);
    for (bool changed = true; changed;) {
      changed = false;
      for (std::size_t v = 0; v < n; ++v) {
        auto const& node = g.nodes[v];
        if (!in[v] || pos[v])
          continue;
        bool add = false;
        if (node.owner == Owner::random) {
          for (auto const& [p, t] : node.dist)
            add = add || (p > 0 && pos[t]);
        }
        else if (node.owner == Owner::max) {
          add = true;
          for (auto const& e : node.edges)
            add = add && pos[e.target];
        }
        else {
          for (std::size_t e = 0; e < node.edges.size() && !add; ++e)
            if (allowed(static_cast<int>(v), static_cast<int>(e)) && pos[node.edges[e].target]) {
              add = true;
              att[v] = static_cast<int>(e);
            }
        }
        if (add) {
          pos[v] = true;
          changed = true;
        }
      }
    }
    if (pos == in)
      return {in, att, spoil};
    // Max keeps the play inside the trap in \ pos, or leaves it for an
    // earlier losing layer.
    for (std::size_t v = 0; v < n; ++v) {
      auto const& node = g.nodes[v];
      if (!in[v] || pos[v] || node.owner != Owner::max)
        continue;
      for (std::size_t e = 0; e < node.edges.size(); ++e)
        if (!pos[node.edges[e].target]) {
          spoil[v] = static_cast<int>(e);
          break;
        }
    }
    in = pos;
  }
}

}  // namespace

std::vector<bool> infinite_value_states(const TurnBasedGame& g)
{
  auto as = almost_sure(g, nullptr);
  std::vector<bool> out(g.size());
  for (std::size_t v = 0; v < g.size(); ++v)
    out[v] = !as.winning[v];
  return out;
}

// ---------------------------------------------------------------- solving

namespace {

PositionalStrategy greedy(const TurnBasedGame& g, const ValueVector& v, Owner who, const std::vector<bool>& infinite,
                          const std::vector<int>& spoiler)
{
  PositionalStrategy s;
  s.choice.assign(g.size(), -1);
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto const& node = g.nodes[i];
    if (node.owner != who || node.target || node.edges.empty())
      continue;
    if (who == Owner::max && infinite[i]) {
      s.choice[i] = spoiler[i] >= 0 ? spoiler[i] : 0;
      continue;
    }
    double best = v[node.edges[0].target];
    for (auto const& e : node.edges)
      best = who == Owner::min ? std::min(best, v[e.target]) : std::max(best, v[e.target]);
    double tol = std::isfinite(best) ? 1e-12 * std::max(1.0, std::abs(best)) : 0.0;
    for (std::size_t e = 0; e < node.edges.size(); ++e) {
      double x = v[node.edges[e].target];
      bool hit = who == Owner::min ? (x <= best + tol) : (x >= best - tol);
      if (hit) {
        s.choice[i] = static_cast<int>(e);
        break;
      }
    }
  }
  return s;
}

}  // namespace

SolveResult solve(const TurnBasedGame& g, const SolveOptions& opts)
{
  if (!(opts.epsilon > 0))
    throw std::invalid_argument("tolerance must be positive");
  SolveResult r;
  auto as = almost_sure(g, nullptr);
  r.infinite.assign(g.size(), false);
  for (std::size_t i = 0; i < g.size(); ++i)
    r.infinite[i] = !as.winning[i];
  auto c = compile(g);
  ValueVector v(g.size(), 0.0), next;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (r.infinite[i])
      v[i] = infinity;
  while (true) {
    step_into(g, c, v, next, &r.infinite);
    double res = 0;
    for (std::size_t i = 0; i < g.size(); ++i)
      if (!r.infinite[i])
        res = std::max(res, std::abs(next[i] - v[i]));
    v.swap(next);
    ++r.iterations;
    r.residual = res;
    if (res < opts.epsilon)
      break;
    if (r.iterations >= opts.max_iterations)
      throw ResourceError("value iteration did not converge within " + std::to_string(opts.max_iterations) +
                          " iterations (residual " + std::to_string(res) + ")");
  }
  r.values = std::move(v);
  r.min_strategy = greedy(g, r.values, Owner::min, r.infinite, as.spoiler);
  r.max_strategy = greedy(g, r.values, Owner::max, r.infinite, as.spoiler);
  return r;
}

namespace {

// Solves A x = b for a sparse system whose Gaussian elimination needs no pivoting
// (I - P restricted to transient states).
std::vector<Rational> solve_sparse(std::vector<std::map<int, Rational>> rows, std::vector<Rational> rhs)
{
  auto const n = rows.size();
  std::vector<std::set<int>> cols(n);
  for (std::size_t i = 0; i < n; ++i)
    for (auto const& [j, a] : rows[i])
      cols[j].insert(static_cast<int>(i));
  for (std::size_t k = 0; k < n; ++k) {
    auto pit = rows[k].find(static_cast<int>(k));
    if (pit == rows[k].end() || pit->second == 0)
      throw std::logic_error("singular system in strategy evaluation");
    Rational piv = pit->second;
    for (auto& [j, a] : rows[k])
      a /= piv;
    rhs[k] /= piv;
    std::vector<int> below;
    for (int i : cols[k])
      if (i > static_cast<int>(k))
        below.push_back(i);
    for (int i : below) {
      Rational f = rows[i][static_cast<int>(k)];
      for (auto const& [j, a] : rows[k]) {
        auto& cell = rows[i][j];
        cell -= f * a;
        if (cell == 0) {
          rows[i].erase(j);
          cols[j].erase(i);
        }
        else
          cols[j].insert(i);
      }
      rhs[i] -= f * rhs[k];
    }
  }
  std::vector<Rational> x(n);
  for (std::size_t kk = n; kk-- > 0;) {
    Rational acc = rhs[kk];
    for (auto const& [j, a] : rows[kk])
      if (j > static_cast<int>(kk))
        acc -= a * x[j];
    x[kk] = acc;
  }
  return x;
}

}  // namespace

ExactValues evaluate_strategy_pair(const TurnBasedGame& g, const PositionalStrategy& mu, const PositionalStrategy& chi)
{
  auto const n = g.size();
  if (mu.choice.size() != n || chi.choice.size() != n)
    throw std::invalid_argument("strategy does not match the game");
  auto chosen = [&](std::size_t v) {
    auto const& node = g.nodes[v];
    int idx = (node.owner == Owner::min ? mu : chi).choice[v];
    if (idx < 0 || idx >= static_cast<int>(node.edges.size()))
      throw std::invalid_argument("strategy is not total on node " + std::to_string(v));
    return node.edges[idx].target;
  };
  std::vector<std::vector<int>> preds(n);
  for (std::size_t v = 0; v < n; ++v) {
    auto const& node = g.nodes[v];
    if (node.target)
      continue;
    if (node.owner == Owner::random) {
      for (auto const& [p, t] : node.dist)
        if (p > 0)
          preds[t].push_back(static_cast<int>(v));
    }
    else
      preds[chosen(v)].push_back(static_cast<int>(v));
  }
  auto backward = [&](std::vector<bool> mark) {
    std::vector<int> stack;
    for (std::size_t v = 0; v < n; ++v)
      if (mark[v])
        stack.push_back(static_cast<int>(v));
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int p : preds[v])
        if (!mark[p]) {
          mark[p] = true;
          stack.push_back(p);
        }
    }
    return mark;
  };
  std::vector<bool> seed(n);
  for (std::size_t v = 0; v < n; ++v)
    seed[v] = g.nodes[v].target;
  auto reach = backward(seed);
  std::vector<bool> bad(n);
  for (std::size_t v = 0; v < n; ++v)
    bad[v] = !reach[v];
  auto unsure = backward(bad);

  auto rep = [&](int v) {
    for (std::size_t guard = 0; guard <= n; ++guard) {
      auto const& node = g.nodes[v];
      if (node.target || node.owner == Owner::random)
        return v;
      v = chosen(v);
    }
    throw std::logic_error("decision cycle in a finite-value region");
  };

  std::vector<int> var(n, -1);
  std::vector<int> vars;
  for (std::size_t v = 0; v < n; ++v)
    if (!unsure[v] && !g.nodes[v].target && g.nodes[v].owner == Owner::random) {
      var[v] = static_cast<int>(vars.size());
      vars.push_back(static_cast<int>(v));
    }
  std::vector<std::map<int, Rational>> rows(vars.size());
  std::vector<Rational> rhs(vars.size());
  for (std::size_t i = 0; i < vars.size(); ++i) {
    auto const& node = g.nodes[vars[i]];
    rows[i][static_cast<int>(i)] += 1;
    for (auto const& [p, t] : node.dist) {
      int r = rep(t);
      if (g.nodes[r].target)
        continue;
      rows[i][var[r]] -= p;
    }
    for (auto it = rows[i].begin(); it != rows[i].end();)
      it = it->second == 0 ? rows[i].erase(it) : std::next(it);
    rhs[i] = node.delay;
  }
  auto x = solve_sparse(std::move(rows), std::move(rhs));

  ExactValues out(n);
  for (std::size_t v = 0; v < n; ++v) {
    if (g.nodes[v].target) {
      out[v] = Rational(0);
      continue;
    }
    if (unsure[v])
      continue;
    int r = rep(static_cast<int>(v));
    out[v] = g.nodes[r].target ? Rational(0) : x[var[r]];
  }
  return out;
}

namespace {

// a < b over rationals extended with infinity
bool ext_less(const std::optional<Rational>& a, const std::optional<Rational>& b)
{
  if (!a)
    return false;
  if (!b)
    return true;
  return *a < *b;
}

}  // namespace

std::pair<ExactValues, PositionalStrategy> best_response(const TurnBasedGame& g, const PositionalStrategy& mu)
{
  auto const n = g.size();
  auto as = almost_sure(g, &mu);
  PositionalStrategy chi;
  chi.choice.assign(n, -1);
  for (std::size_t v = 0; v < n; ++v) {
    auto const& node = g.nodes[v];
    if (node.owner != Owner::max || node.target)
      continue;
    chi.choice[v] = !as.winning[v] && as.spoiler[v] >= 0 ? as.spoiler[v] : 0;
  }
  while (true) {
    auto vals = evaluate_strategy_pair(g, mu, chi);
    bool switched = false;
    for (std::size_t v = 0; v < n; ++v) {
      auto const& node = g.nodes[v];
      if (node.owner != Owner::max || node.target || !as.winning[v])
        continue;
      auto cur = vals[node.edges[chi.choice[v]].target];
      int best = chi.choice[v];
      for (std::size_t e = 0; e < node.edges.size(); ++e)
        if (ext_less(cur, vals[node.edges[e].target])) {
          cur = vals[node.edges[e].target];
          best = static_cast<int>(e);
        }
      if (best != chi.choice[v]) {
        chi.choice[v] = best;
        switched = true;
      }
    }
    if (!switched)
      return {vals, chi};
  }
}

ExactSolveResult solve_exact(const TurnBasedGame& g, const SolveOptions& opts)
{
  auto const n = g.size();
  auto as = almost_sure(g, nullptr);
  auto approx = solve(g, opts);
  PositionalStrategy mu = approx.min_strategy;
  ExactSolveResult out;
  bool used_attractor = false;
  while (true) {
    auto [vals, chi] = best_response(g, mu);
    bool improper = false;
    for (std::size_t v = 0; v < n; ++v)
      improper = improper || (as.winning[v] && !vals[v]);
    if (improper) {
      if (used_attractor)
        throw std::logic_error("attractor strategy is not proper");
      for (std::size_t v = 0; v < n; ++v)
        if (as.winning[v] && as.attractor[v] >= 0)
          mu.choice[v] = as.attractor[v];
      used_attractor = true;
      continue;
    }
    bool switched = false;
    for (std::size_t v = 0; v < n; ++v) {
      auto const& node = g.nodes[v];
      if (node.owner != Owner::min || node.target || !as.winning[v])
        continue;
      auto cur = vals[node.edges[mu.choice[v]].target];
      int best = mu.choice[v];
      for (std::size_t e = 0; e < node.edges.size(); ++e)
        if (ext_less(vals[node.edges[e].target], cur)) {
          cur = vals[node.edges[e].target];
          best = static_cast<int>(e);
        }
      if (best != mu.choice[v]) {
        mu.choice[v] = best;
        switched = true;
      }
    }
    if (!switched) {
      out.values = std::move(vals);
      out.min_strategy = mu;
      out.max_strategy = std::move(chi);
      return out;
    }
    ++out.improvement_rounds;
  }
}

Decision decide_threshold(const TurnBasedGame& g, int node, const std::optional<Rational>& bound,
                          const DecideOptions& opts)
{
  if (node < 0 || node >= static_cast<int>(g.size()))
    throw std::invalid_argument("unknown node");
  Decision d;
  if (opts.exact) {
    auto r = solve_exact(g, opts.solve);
    auto const& v = r.values[node];
    d.exact_infinite = !v;
    if (v) {
      d.exact_value = *v;
      d.lower = d.upper = to_double(*v);
    }
    else
      d.lower = d.upper = infinity;
    if (!bound)
      d.verdict = Verdict::at_most;
    else
      d.verdict = v && *v <= *bound ? Verdict::at_most : Verdict::greater;
    return d;
  }
  auto r = solve(g, opts.solve);
  d.lower = r.values[node];
  auto upper = best_response(g, r.min_strategy).first[node];
  d.upper = upper ? to_double(*upper) : infinity;
  if (!bound) {
    d.verdict = Verdict::at_most;
    return d;
  }
  if (upper && *upper <= *bound)
    d.verdict = Verdict::at_most;
  else if (std::isinf(d.lower) || d.lower - opts.solve.epsilon >= to_double(*bound))
    d.verdict = Verdict::greater;
  else
    d.verdict = Verdict::undecided;
  return d;
}

}  // namespace ptga

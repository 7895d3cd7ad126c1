#include "ptga/sim.hpp"

#include <cmath>
#include <map>
#include <random>
#include <stdexcept>

namespace ptga {

bool move_available(const Ptga& model, const Configuration& c, Player who, const TimedMove& m)
{
  if (m.bottom)
    return true;
  if (m.edge < 0 || m.edge >= static_cast<int>(model.edges.size()) || m.delay < 0)
    return false;
  auto const& e = model.edges[m.edge];
  if (e.player != who || e.location != c.location)
    return false;
  for (auto const& v : c.valuation.values())
    if (v + m.delay > model.bound)
      return false;
  ClockValuation after = c.valuation.delayed(m.delay);
  auto const& inv = model.locations[c.location].invariant;
  // Invariants are convex, so both endpoints suffice.
  return inv.contains(c.valuation) && inv.contains(after) && edge_enabled(model, m.edge, after);
}

StepResult concrete_step(const Ptga& model, const Configuration& c, const TimedMove& min_move, const TimedMove& max_move)
{
  if (min_move.bottom && max_move.bottom)
    throw std::domain_error("both players propose bottom");
  if (!move_available(model, c, Player::min, min_move))
    throw std::domain_error("Min's move is not available in " + model.to_string(c));
  if (!move_available(model, c, Player::max, max_move))
    throw std::domain_error("Max's move is not available in " + model.to_string(c));
  StepResult r;
  bool min_first = max_move.bottom || (!min_move.bottom && min_move.delay < max_move.delay);
  r.winner = min_first ? Player::min : Player::max;
  r.performed = min_first ? min_move : max_move;
  ClockValuation after = c.valuation.delayed(r.performed.delay);
  for (auto const& b : model.edges[r.performed.edge].branches) {
    Configuration next{b.target, after.reset(b.resets)};
    bool merged = false;
    for (auto& [p, conf] : r.distribution)
      if (conf == next) {
        p += b.probability;
        merged = true;
      }
    if (!merged)
      r.distribution.emplace_back(b.probability, std::move(next));
  }
  return r;
}

PlayMeasure play_measure(const Ptga& model, const Play& play)
{
  PlayMeasure m{Rational(1), Rational(0)};
  Configuration cur = play.start;
  bool reached = model.target.at(cur.location);
  for (std::size_t i = 0; i < play.steps.size(); ++i) {
    auto const& st = play.steps[i];
    auto r = concrete_step(model, cur, st.min_move, st.max_move);
    Rational p = 0;
    for (auto const& [q, conf] : r.distribution)
      if (conf == st.next)
        p = q;
    if (p == 0)
      throw std::domain_error("play step " + std::to_string(i) + " is not a transition");
    m.probability *= p;
    if (!reached)
      m.time += r.performed.delay;
    cur = st.next;
    reached = reached || model.target[cur.location];
  }
  return m;
}

// ---------------------------------------------------------------- BRA strategy adapter

namespace {

class BraAdapter : public ConcreteStrategy {
 public:
  BraAdapter(std::shared_ptr<const StrategyProfile> p, Player who, Rational eps)
      : p_(std::move(p)), who_(who), eps_(std::move(eps))
  {
    if (!p_ || !p_->model || !p_->bra || !p_->game)
      throw std::invalid_argument("incomplete strategy profile");
    for (std::size_t s = 0; s < p_->bra->size(); ++s) {
      auto const& st = p_->bra->states[s];
      by_region_[{st.location, st.region.key()}].push_back(static_cast<int>(s));
    }
  }

  TimedMove move(const Configuration& c) const override
  {
    auto const& bra = *p_->bra;
    auto const& g = *p_->game;
    int s = shadow(c);
    if (bra.target[s])
      return TimedMove::none();
    Player first = g.sense == Sense::upper ? Player::min : Player::max;
    int n = g.state_node[s];
    auto const& fs = strategy(first);
    int fe = fs.choice.at(n);
    if (fe < 0)
      throw std::domain_error("strategy undefined on the first-mover node");
    auto const& fedge = g.nodes[n].edges[fe];
    int f = fedge.move;
    if (who_ == first)
      return f < 0 ? TimedMove::none() : realize(c, s, first, f, false);

    int r = fedge.target;
    int re = strategy(who_).choice.at(r);
    if (re < 0)
      throw std::domain_error("strategy undefined on the responder node");
    auto const& redge = g.nodes[r].edges[re];
    if (redge.move >= 0)
      return realize(c, s, who_, redge.move, true);
    // Let the first mover through: propose the latest losing move.
    auto const& mine = moves(who_, s);
    if (mine.empty())
      return TimedMove::none();
    std::optional<TimedMove> best;
    for (std::size_t m = 0; m < mine.size(); ++m) {
      if (responder_wins(s, f, static_cast<int>(m)))
        continue;
      auto tm = realize(c, s, who_, static_cast<int>(m), true);
      if (!best || best->delay < tm.delay)
        best = tm;
    }
    if (!best)
      throw std::logic_error("proceed chosen without a losing response");
    return *best;
  }

 private:
  const PositionalStrategy& strategy(Player p) const { return p == Player::min ? p_->min_strategy : p_->max_strategy; }
  const std::vector<BraMove>& moves(Player p, int s) const
  {
    return (p == Player::min ? p_->bra->min_moves : p_->bra->max_moves)[s];
  }

  bool responder_wins(int s, int f, int r) const
  {
    auto const& g = *p_->game;
    Player first = g.sense == Sense::upper ? Player::min : Player::max;
    std::optional<BraAction> fa, ra;
    if (f >= 0)
      fa = moves(first, s)[f].action;
    ra = moves(who_, s)[r].action;
    auto const* from = &p_->bra->states[s].region;
    bool min_perf = first == Player::min ? min_wins(fa, ra, g.sense, from) : min_wins(ra, fa, g.sense, from);
    return first == Player::min ? !min_perf : min_perf;
  }

  int shadow(const Configuration& c) const
  {
    auto it = by_region_.find({c.location, region_of(c.valuation).key()});
    if (it == by_region_.end())
      throw std::domain_error("configuration " + p_->model->to_string(c) + " lies outside the explored abstraction");
    int best = -1;
    Rational dist;
    for (int s : it->second) {
      Rational d = sup_distance(p_->bra->states[s].valuation, c.valuation);
      if (best < 0 || d < dist) {
        best = s;
        dist = d;
      }
    }
    return best;
  }

  TimedMove realize(const Configuration& c, int s, Player p, int m, bool responder) const
  {
    auto const& mv = moves(p, s)[m];
    auto const& target = mv.action.target;
    auto [lo, hi] = delay_bounds(c.valuation, target);
    Rational t;
    bool attained_inf = target.is_thin() || target == region_of(c.valuation);
    if (mv.action.op == Op::inf) {
      Rational shift = responder ? Rational(eps_ / 2) : eps_;
      t = attained_inf ? lo : Rational(lo + shift);
      if (!attained_inf && t >= hi)
        t = (lo + hi) / 2;
    }
    else {
      Rational shift = responder ? Rational(eps_ * 2) : eps_;
      t = target.is_thin() ? hi : Rational(hi - shift);
      if (!target.is_thin() && t <= lo)
        t = (lo + hi) / 2;
    }
    return TimedMove::make(t, mv.action.edge);
  }

  std::shared_ptr<const StrategyProfile> p_;
  Player who_;
  Rational eps_;
  std::map<std::pair<int, std::string>, std::vector<int>> by_region_;
};

std::uint64_t splitmix64(std::uint64_t x)
{
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Picks a branch with a 64-bit uniform against exact cumulative thresholds.
std::size_t pick(const std::vector<std::pair<Rational, Configuration>>& dist, std::uint64_t u)
{
  static const Rational two64 = [] {
    mpz_class z;
    mpz_ui_pow_ui(z.get_mpz_t(), 2, 64);
    return Rational(z);
  }();
  mpz_class uz;
  mpz_import(uz.get_mpz_t(), 1, 1, sizeof(u), 0, 0, &u);
  Rational x = Rational(uz) / two64;
  Rational cum = 0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    cum += dist[i].first;
    if (x < cum)
      return i;
  }
  return dist.size() - 1;
}

}  // namespace

std::unique_ptr<ConcreteStrategy> bra_strategy_to_concrete(std::shared_ptr<const StrategyProfile> profile, Player who,
                                                           const Rational& epsilon_shift)
{
  if (epsilon_shift <= 0)
    throw std::invalid_argument("epsilon shift must be positive");
  return std::make_unique<BraAdapter>(std::move(profile), who, epsilon_shift);
}

Play sample_play(const Ptga& model, const ConcreteStrategy& mu, const ConcreteStrategy& chi,
                 const Configuration& init, std::size_t horizon, std::uint64_t seed, std::size_t run)
{
  std::mt19937_64 rng(splitmix64(seed ^ splitmix64(run)));
  Play play{init, {}};
  Configuration cur = init;
  for (std::size_t i = 0; i < horizon && !model.target.at(cur.location); ++i) {
    TimedMove a = mu.move(cur), b = chi.move(cur);
    auto r = concrete_step(model, cur, a, b);
    auto const& next = r.distribution[pick(r.distribution, rng())].second;
    play.steps.push_back({a, b, next});
    cur = next;
  }
  return play;
}

SimResult simulate_expected_time(const Ptga& model, const ConcreteStrategy& mu, const ConcreteStrategy& chi,
                                 const Configuration& init, const SimOptions& opts)
{
  if (opts.runs < 1 || opts.horizon < 1)
    throw std::invalid_argument("runs and horizon must be positive");
  SimResult res;
  res.runs = opts.runs;
  res.seed = opts.seed;
  double sum = 0, sumsq = 0;
  for (std::size_t run = 0; run < opts.runs; ++run) {
    auto play = sample_play(model, mu, chi, init, opts.horizon, opts.seed, run);
    Configuration last = play.steps.empty() ? play.start : play.steps.back().next;
    if (!model.target[last.location])
      continue;
    Rational t = 0;
    for (auto const& st : play.steps) {
      bool min_first = st.max_move.bottom || (!st.min_move.bottom && st.min_move.delay < st.max_move.delay);
      t += min_first ? st.min_move.delay : st.max_move.delay;
    }
    double x = to_double(t);
    sum += x;
    sumsq += x * x;
    ++res.hits;
  }
  if (res.hits) {
    double h = static_cast<double>(res.hits);
    res.mean = sum / h;
    double var = res.hits > 1 ? std::max(0.0, (sumsq - h * res.mean * res.mean) / (h - 1)) : 0.0;
    res.stderr_ = std::sqrt(var / h);
  }
  return res;
}

ExhaustiveResult exhaustive_expected_time(const Ptga& model, const ConcreteStrategy& mu, const ConcreteStrategy& chi,
                                          const Configuration& init, std::size_t horizon)
{
  ExhaustiveResult out{Rational(0), Rational(0)};
  struct Frame {
    Configuration conf;
    Rational prob;
    Rational time;
    std::size_t depth;
  };
  std::vector<Frame> stack{{init, Rational(1), Rational(0), 0}};
  while (!stack.empty()) {
    Frame f = std::move(stack.back());
    stack.pop_back();
    if (model.target.at(f.conf.location)) {
      out.hit_probability += f.prob;
      out.expected_time += f.prob * f.time;
      continue;
    }
    if (f.depth == horizon)
      continue;
    auto r = concrete_step(model, f.conf, mu.move(f.conf), chi.move(f.conf));
    for (auto const& [p, conf] : r.distribution)
      stack.push_back({conf, f.prob * p, f.time + r.performed.delay, f.depth + 1});
  }
  return out;
}

}  // namespace ptga

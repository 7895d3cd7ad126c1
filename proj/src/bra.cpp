#include "ptga/bra.hpp"

#include <json.hpp>

#include <algorithm>
#include <deque>
#include <map>
#include <sstream>
#include <stdexcept>

namespace ptga {

const char* to_string(Op op) { return op == Op::inf ? "inf" : "sup"; }
const char* to_string(Sense s) { return s == Sense::upper ? "upper" : "lower"; }

std::string BraState::key() const
{
  std::string k = std::to_string(location) + "|";
  for (auto const& v : valuation.values())
    k += to_string(v) + ",";
  return k + "|" + region.key();
}

EnabledActions enabled_bra_actions(const Ptga& model, const BraState& s)
{
  EnabledActions out;
  auto const& inv = model.locations.at(s.location).invariant;
  auto edges = model.edges_from(s.location);
  for (auto const& r : future_chain(s.region)) {
    if (!inv.includes(r))
      break;
    for (int e : edges) {
      if (!edge_enabled(model, e, r))
        continue;
      auto& list = model.edges[e].player == Player::min ? out.min : out.max;
      list.push_back({e, r, Op::inf});
      list.push_back({e, r, Op::sup});
    }
  }
  return out;
}

namespace {

// Returns the chain position of the action's target, or throws when disabled.
int check_enabled(const Ptga& model, const BraState& s, const BraAction& a)
{
  if (a.edge < 0 || a.edge >= static_cast<int>(model.edges.size()) || model.edges[a.edge].location != s.location)
    throw std::domain_error("action does not belong to the state's location");
  if (!edge_enabled(model, a.edge, a.target))
    throw std::domain_error("action is not enabled in the target region");
  auto const& inv = model.locations[s.location].invariant;
  int pos = 0;
  for (auto const& r : future_chain(s.region)) {
    if (!inv.includes(r))
      break;
    if (r == a.target)
      return pos;
    ++pos;
  }
  throw std::domain_error("target region is not reachable inside the invariant");
}

Rational delay_unchecked(const BraState& s, const BraAction& a)
{
  auto forms = delay_forms(s.region, a.target);
  return (a.op == Op::inf ? forms.first : forms.second).eval(s.valuation);
}

std::vector<std::pair<Rational, BraState>> successors_unchecked(const Ptga& model, const BraState& s,
                                                                const BraAction& a, const Rational& t)
{
  ClockValuation boundary = s.valuation.delayed(t);
  std::vector<std::pair<Rational, BraState>> out;
  for (auto const& b : model.edges[a.edge].branches) {
    BraState next{b.target, boundary.reset(b.resets), region_reset(a.target, b.resets)};
    auto it = std::find_if(out.begin(), out.end(), [&](auto const& p) { return p.second == next; });
    if (it != out.end())
      it->first += b.probability;
    else
      out.emplace_back(b.probability, std::move(next));
  }
  return out;
}

}  // namespace

Rational bra_delay(const Ptga& model, const BraState& s, const BraAction& a)
{
  check_enabled(model, s, a);
  return delay_unchecked(s, a);
}

std::vector<std::pair<Rational, BraState>> bra_successors(const Ptga& model, const BraState& s, const BraAction& a)
{
  check_enabled(model, s, a);
  return successors_unchecked(model, s, a, delay_unchecked(s, a));
}

bool min_wins(const std::optional<BraAction>& alpha, const std::optional<BraAction>& beta, Sense sense,
              const Region* from)
{
  if (!alpha && !beta)
    throw std::domain_error("both players propose bottom");
  if (!alpha)
    return false;
  if (!beta)
    return true;
  if (strictly_precedes(alpha->target, beta->target))
    return true;
  if (alpha->target != beta->target)
    return false;
  if (sense == Sense::upper)
    return alpha->op == Op::inf && beta->op == Op::sup;
  if (alpha->target.is_thin() || beta->op != Op::inf)
    return !alpha->target.is_thin();
  // Max's inf: an open later region can be undercut, the current one cannot.
  return alpha->op == Op::inf && !(from && *from == beta->target);
}

BraAction bra_winner(const std::optional<BraAction>& alpha, const std::optional<BraAction>& beta, Sense sense,
                     const Region* from)
{
  return min_wins(alpha, beta, sense, from) ? *alpha : *beta;
}

int BraGame::find(const BraState& s) const
{
  auto it = index.find(s.key());
  return it == index.end() ? -1 : it->second;
}

std::string BraGame::action_label(const BraMove& m) const
{
  return "(" + model->edges[m.action.edge].action + ", " + m.action.target.to_string(model->clocks) + ", " +
         to_string(m.action.op) + ")";
}

BraGame build_reachable_bra(const Ptga& model, const Configuration& init, const BraOptions& opts)
{
  BraGame g;
  g.model = &model;
  std::deque<int> work;
  auto intern = [&](BraState s) {
    auto key = s.key();
    auto it = g.index.find(key);
    if (it != g.index.end())
      return it->second;
    if (g.states.size() >= opts.state_cap)
      throw ResourceError("boundary region abstraction exceeds the state cap of " + std::to_string(opts.state_cap));
    int id = static_cast<int>(g.states.size());
    g.index.emplace(std::move(key), id);
    g.target.push_back(model.target.at(s.location));
    g.states.push_back(std::move(s));
    g.min_moves.emplace_back();
    g.max_moves.emplace_back();
    work.push_back(id);
    return id;
  };
  if (!model.locations.at(init.location).invariant.contains(init.valuation))
    throw std::domain_error("initial configuration violates its invariant");
  g.initial = intern({init.location, init.valuation, region_of(init.valuation)});

  while (!work.empty()) {
    int id = work.front();
    work.pop_front();
    BraState s = g.states[id];
    auto enabled = enabled_bra_actions(model, s);
    auto chain = future_chain(s.region);
    auto expand = [&](const std::vector<BraAction>& acts) {
      std::vector<BraMove> moves;
      for (auto const& a : acts) {
        BraMove m;
        m.action = a;
        m.chain_pos = static_cast<int>(std::find(chain.begin(), chain.end(), a.target) - chain.begin());
        m.delay = delay_unchecked(s, a);
        for (auto& [p, next] : successors_unchecked(model, s, a, m.delay))
          m.successors.emplace_back(p, intern(std::move(next)));
        moves.push_back(std::move(m));
      }
      return moves;
    };
    auto mins = expand(enabled.min);
    auto maxs = expand(enabled.max);
    g.min_moves[id] = std::move(mins);
    g.max_moves[id] = std::move(maxs);
  }
  return g;
}

std::string bra_to_json(const BraGame& g)
{
  auto const& m = *g.model;
  using nlohmann::json;
  json states = json::array();
  auto moves_json = [&](const std::vector<BraMove>& moves) {
    json a = json::array();
    for (auto const& mv : moves) {
      json succ = json::array();
      for (auto const& [p, t] : mv.successors)
        succ.push_back({{"probability", to_string(p)}, {"state", t}});
      a.push_back({{"action", m.edges[mv.action.edge].action},
                   {"region", mv.action.target.to_string(m.clocks)},
                   {"op", to_string(mv.action.op)},
                   {"delay", to_string(mv.delay)},
                   {"successors", succ}});
    }
    return a;
  };
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto const& s = g.states[i];
    json val = json::object();
    for (int c = 0; c < m.clock_count(); ++c)
      val[m.clocks[c]] = to_string(s.valuation[c]);
    states.push_back({{"id", i},
                      {"location", m.locations[s.location].name},
                      {"valuation", val},
                      {"region", s.region.to_string(m.clocks)},
                      {"target", static_cast<bool>(g.target[i])},
                      {"min_actions", moves_json(g.min_moves[i])},
                      {"max_actions", moves_json(g.max_moves[i])}});
  }
  json j{{"format", "ptga-bra/1"}, {"clocks", m.clocks}, {"initial", g.initial}, {"states", states}};
  return j.dump(2);
}

std::string bra_to_dot(const BraGame& g)
{
  auto const& m = *g.model;
  auto esc = [](std::string s) {
    std::string out;
    for (char c : s) {
      if (c == '"' || c == '\\')
        out += '\\';
      out += c;
    }
    return out;
  };
  std::ostringstream out;
  out << "digraph bra {\n  rankdir=LR;\n  node [shape=box, fontsize=10];\n";
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto const& s = g.states[i];
    out << "  s" << i << " [label=\""
        << esc("(" + m.locations[s.location].name + ", " + s.valuation.to_string(m.clocks) + ")\\n" +
               s.region.to_string(m.clocks))
        << "\"" << (g.target[i] ? ", peripheries=2" : "") << (static_cast<int>(i) == g.initial ? ", style=bold" : "")
        << "];\n";
  }
  int hub = 0;
  auto emit = [&](std::size_t i, const BraMove& mv, bool dashed) {
    std::string label = esc(g.action_label(mv)) + ";" + to_string(mv.delay);
    if (mv.successors.size() == 1) {
      out << "  s" << i << " -> s" << mv.successors[0].second << " [label=\"" << label << "\""
          << (dashed ? ", style=dashed" : "") << "];\n";
      return;
    }
    out << "  p" << hub << " [shape=point];\n";
    out << "  s" << i << " -> p" << hub << " [label=\"" << label << "\"" << (dashed ? ", style=dashed" : "")
        << "];\n";
    for (auto const& [p, t] : mv.successors)
      out << "  p" << hub << " -> s" << t << " [label=\"" << to_string(p) << "\"];\n";
    ++hub;
  };
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (auto const& mv : g.min_moves[i])
      emit(i, mv, false);
    for (auto const& mv : g.max_moves[i])
      emit(i, mv, true);
  }
  out << "}\n";
  return out.str();
}

}  // namespace ptga

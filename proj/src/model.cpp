#include "ptga/model.hpp"

#include <json.hpp>

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace ptga {

const char* to_string(Player p) { return p == Player::min ? "min" : "max"; }

int Ptga::find_location(const std::string& name) const
{
  for (std::size_t i = 0; i < locations.size(); ++i)
    if (locations[i].name == name)
      return static_cast<int>(i);
  return -1;
}

int Ptga::find_clock(const std::string& name) const
{
  for (std::size_t i = 0; i < clocks.size(); ++i)
    if (clocks[i] == name)
      return static_cast<int>(i);
  return -1;
}

std::vector<int> Ptga::edges_from(int location) const
{
  std::vector<int> out;
  for (std::size_t e = 0; e < edges.size(); ++e)
    if (edges[e].location == location)
      out.push_back(static_cast<int>(e));
  return out;
}

std::vector<std::string> Ptga::actions(Player p) const
{
  std::set<std::string> s;
  for (auto const& e : edges)
    if (e.player == p)
      s.insert(e.action);
  return {s.begin(), s.end()};
}

Configuration Ptga::initial_configuration() const
{
  if (init)
    return *init;
  if (locations.empty())
    throw std::domain_error("model has no locations");
  return {0, ClockValuation::zero(clocks.size(), bound)};
}

Configuration Ptga::parse_configuration(const std::string& text) const
{
  std::istringstream in(text);
  std::string loc;
  if (!(in >> loc))
    throw std::invalid_argument("empty configuration");
  int l = find_location(loc);
  if (l < 0)
    throw std::invalid_argument("unknown location '" + loc + "'");
  std::vector<Rational> values(clocks.size(), Rational(0));
  std::string item;
  while (in >> item) {
    auto eq = item.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("expected clock=value, got '" + item + "'");
    int c = find_clock(item.substr(0, eq));
    if (c < 0)
      throw std::invalid_argument("unknown clock '" + item.substr(0, eq) + "'");
    values[c] = parse_rational(item.substr(eq + 1));
  }
  return {l, ClockValuation(std::move(values), bound)};
}

std::string Ptga::to_string(const Configuration& c) const
{
  return "(" + locations.at(c.location).name + ", " + c.valuation.to_string(clocks) + ")";
}

std::string Ptga::reset_text(ClockSet s) const
{
  std::string out;
  for (int c = 0; c < clock_count(); ++c)
    if (contains_clock(s, c))
      out += (out.empty() ? "" : " ") + clocks[c];
  return out;
}

std::string ValidationReport::to_json() const
{
  auto list = [](const std::vector<Issue>& v) {
    nlohmann::json a = nlohmann::json::array();
    for (auto const& i : v)
      a.push_back({{"code", i.code}, {"context", i.context}, {"message", i.message}});
    return a;
  };
  nlohmann::json j{{"valid", ok()}, {"errors", list(errors)}, {"warnings", list(warnings)}};
  return j.dump(2);
}

namespace {

class Reporter {
 public:
  explicit Reporter(ValidationReport& r) : report_(r) {}

  void error(const std::string& code, const std::string& ctx, const std::string& msg) { add(report_.errors, code, ctx, msg); }
  void warn(const std::string& code, const std::string& ctx, const std::string& msg) { add(report_.warnings, code, ctx, msg); }

 private:
  void add(std::vector<Issue>& v, const std::string& code, const std::string& ctx, const std::string& msg)
  {
    if (seen_.insert(code + "\x1f" + ctx).second)
      v.push_back({code, ctx, msg});
  }

  ValidationReport& report_;
  std::set<std::string> seen_;
};

std::string edge_context(const Ptga& m, const Edge& e)
{
  std::string loc = e.location >= 0 && e.location < static_cast<int>(m.locations.size()) ? m.locations[e.location].name : "?";
  return "edge " + std::string(to_string(e.player)) + " " + e.action + " from " + loc;
}

bool structure_ok(const Ptga& m, Reporter& rep)
{
  bool ok = true;
  int n = m.clock_count();
  if (m.bound < 1) {
    rep.error("bad bound", "model", "clock bound must be a positive integer");
    ok = false;
  }
  if (n > max_clocks) {
    rep.error("too many clocks", "model", "at most 32 clocks are supported");
    return false;
  }
  if (m.locations.empty()) {
    rep.error("no locations", "model", "the model declares no location");
    return false;
  }
  if (m.target.size() != m.locations.size()) {
    rep.error("dangling reference", "model", "target flags do not match the location list");
    ok = false;
  }
  std::set<std::string> names;
  for (auto const& l : m.locations) {
    if (!names.insert(l.name).second) {
      rep.error("duplicate identifier", "location " + l.name, "location declared twice");
      ok = false;
    }
    if (l.invariant.clocks() != n || l.invariant.bound() != m.bound) {
      rep.error("zone shape mismatch", "location " + l.name, "invariant built over another clock space");
      ok = false;
    }
  }
  ClockSet all = n == 32 ? ~ClockSet(0) : ((ClockSet(1) << n) - 1);
  std::set<std::pair<int, std::string>> rows;
  for (auto const& e : m.edges) {
    auto ctx = edge_context(m, e);
    if (e.location < 0 || e.location >= static_cast<int>(m.locations.size())) {
      rep.error("dangling reference", ctx, "source location does not exist");
      ok = false;
      continue;
    }
    if (!rows.insert({e.location, e.action}).second) {
      rep.error("duplicate edge", ctx, "action listed twice at the same location");
      ok = false;
    }
    if (e.guard.clocks() != n || e.guard.bound() != m.bound) {
      rep.error("zone shape mismatch", ctx, "guard built over another clock space");
      ok = false;
    }
    for (auto const& b : e.branches)
      if (b.target < 0 || b.target >= static_cast<int>(m.locations.size()) || (b.resets & ~all)) {
        rep.error("dangling reference", ctx, "branch refers to an unknown location or clock");
        ok = false;
      }
  }
  return ok;
}

void check_semantics(const Ptga& m, Reporter& rep)
{
  std::map<std::string, std::set<Player>> owners;
  for (auto const& e : m.edges)
    owners[e.action].insert(e.player);
  for (auto const& [a, ps] : owners)
    if (ps.size() > 1)
      rep.error("player action overlap", "action " + a, "action '" + a + "' is used by both players");

  for (auto const& e : m.edges) {
    auto ctx = edge_context(m, e);
    Rational sum = 0;
    bool positive = true;
    for (auto const& b : e.branches) {
      sum += b.probability;
      positive = positive && b.probability > 0;
    }
    if (e.branches.empty() || !positive || sum != 1)
      rep.error("distribution not stochastic", ctx,
                "branch probabilities must be positive and sum to 1 (sum is " + to_string(sum) + ")");
    if (e.guard.is_empty())
      rep.warn("empty guard", ctx, "the action is never enabled");
  }
  for (auto const& l : m.locations)
    if (l.invariant.is_empty())
      rep.error("empty invariant", "location " + l.name, "the invariant admits no valuation");
  if (std::none_of(m.target.begin(), m.target.end(), [](bool b) { return b; }))
    rep.warn("no targets", "model", "no target location; every value is infinite");
}

// Liveness over the entry regions reachable in the region graph.
void check_reachable_regions(const Ptga& m, const Configuration& init, Reporter& rep)
{
  auto const& inv0 = m.locations.at(init.location).invariant;
  if (!inv0.contains(init.valuation)) {
    rep.error("init violates invariant", "location " + m.locations[init.location].name,
              "initial valuation " + init.valuation.to_string(m.clocks) + " violates the invariant");
    return;
  }
  std::set<std::pair<int, std::string>> seen, blocked;
  std::deque<std::pair<int, Region>> work;
  auto push = [&](int l, const Region& r) {
    if (seen.insert({l, r.key()}).second)
      work.emplace_back(l, r);
  };
  push(init.location, region_of(init.valuation));
  while (!work.empty()) {
    auto [l, r] = work.front();
    work.pop_front();
    auto const& loc = m.locations[l];
    auto region_ctx = "location " + loc.name + " region " + r.to_string(m.clocks);
    if (m.target[l])
      continue;
    auto out = m.edges_from(l);
    bool live = false;
    for (auto const& z : future_chain(r)) {
      if (!loc.invariant.includes(z))
        break;
      for (int e : out) {
        auto const& edge = m.edges[e];
        if (!edge.guard.includes(z))
          continue;
        if (!edge_enabled(m, e, z)) {
          for (auto const& b : edge.branches) {
            Region next = region_reset(z, b.resets);
            if (!m.locations[b.target].invariant.includes(next) &&
                blocked.insert({e, next.key() + "@" + std::to_string(b.target)}).second)
              rep.warn("invariant violated on entry", edge_context(m, edge),
                       "branch to " + m.locations[b.target].name + " would enter region " +
                           next.to_string(m.clocks) + " outside its invariant; the action is blocked there");
          }
          continue;
        }
        live = true;
        for (auto const& b : edge.branches)
          push(b.target, region_reset(z, b.resets));
      }
    }
    if (!live)
      rep.error("dead region", region_ctx, "no action of either player can ever be taken from this region");
  }
}

bool lower_bound_at_least_one(const Zone& g, int c)
{
  auto const& b = g.at(0, c + 1);
  return !b.infinite && b.value <= -1;
}

}  // namespace

bool edge_enabled(const Ptga& model, int edge, const ClockValuation& v)
{
  auto const& e = model.edges.at(edge);
  if (!e.guard.contains(v))
    return false;
  for (auto const& b : e.branches)
    if (!model.locations.at(b.target).invariant.contains(v.reset(b.resets)))
      return false;
  return true;
}

bool edge_enabled(const Ptga& model, int edge, const Region& r)
{
  auto const& e = model.edges.at(edge);
  if (!e.guard.includes(r))
    return false;
  for (auto const& b : e.branches)
    if (!model.locations.at(b.target).invariant.includes(region_reset(r, b.resets)))
      return false;
  return true;
}

ValidationReport validate(const Ptga& model, const ValidateOptions& opts)
{
  ValidationReport report;
  Reporter rep(report);
  if (!structure_ok(model, rep))
    return report;
  check_semantics(model, rep);

  Configuration init;
  try {
    init = opts.init ? *opts.init : model.initial_configuration();
    if (init.location < 0 || init.location >= static_cast<int>(model.locations.size()) ||
        static_cast<int>(init.valuation.size()) != model.clock_count() || init.valuation.bound() != model.bound)
      throw std::invalid_argument("initial configuration does not fit the model");
  }
  catch (std::exception const& ex) {
    rep.error("bad init", "init", ex.what());
    return report;
  }
  if (report.ok())
    check_reachable_regions(model, init, rep);

  auto zeno = check_structural_non_zeno(model);
  if (!zeno.non_zeno) {
    auto msg = "cycle " + describe_cycle(model, zeno.witness) + " may take zero time";
    if (opts.allow_zeno)
      rep.warn("zeno cycle", "model", msg);
    else
      rep.error("zeno cycle", "model", msg);
  }
  return report;
}

ZenoCheck check_structural_non_zeno(const Ptga& model)
{
  struct Arc {
    int to;
    CycleStep step;
  };
  int nl = static_cast<int>(model.locations.size());
  std::vector<std::vector<Arc>> arcs(nl);
  for (std::size_t e = 0; e < model.edges.size(); ++e) {
    auto const& edge = model.edges[e];
    for (std::size_t b = 0; b < edge.branches.size(); ++b)
      arcs[edge.location].push_back({edge.branches[b].target, {static_cast<int>(e), static_cast<int>(b)}});
  }
  auto cycle_ok = [&](const std::vector<CycleStep>& cyc) {
    ClockSet reset = 0;
    for (auto const& s : cyc)
      reset |= model.edges[s.edge].branches[s.branch].resets;
    for (int c = 0; c < model.clock_count(); ++c) {
      if (!contains_clock(reset, c))
        continue;
      for (auto const& s : cyc)
        if (lower_bound_at_least_one(model.edges[s.edge].guard, c))
          return true;
    }
    return false;
  };

  // Elementary cycles, each enumerated from its smallest location.
  ZenoCheck result;
  std::vector<CycleStep> path;
  std::vector<bool> on_path(nl, false);
  std::function<bool(int, int)> dfs = [&](int start, int v) -> bool {
    for (auto const& a : arcs[v]) {
      if (a.to == start) {
        path.push_back(a.step);
        bool ok = cycle_ok(path);
        if (!ok) {
          result.non_zeno = false;
          result.witness = path;
          return false;
        }
        path.pop_back();
      }
      else if (a.to > start && !on_path[a.to]) {
        on_path[a.to] = true;
        path.push_back(a.step);
        if (!dfs(start, a.to))
          return false;
        path.pop_back();
        on_path[a.to] = false;
      }
    }
    return true;
  };
  for (int s = 0; s < nl; ++s) {
    on_path.assign(nl, false);
    on_path[s] = true;
    path.clear();
    if (!dfs(s, s))
      break;
  }
  return result;
}

std::string describe_cycle(const Ptga& model, const std::vector<CycleStep>& cycle)
{
  std::string s;
  for (auto const& st : cycle) {
    auto const& e = model.edges[st.edge];
    if (s.empty())
      s = model.locations[e.location].name;
    s += " -" + e.action + "-> " + model.locations[e.branches[st.branch].target].name;
  }
  return s;
}

}  // namespace ptga

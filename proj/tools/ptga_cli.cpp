#include "ptga/parser.hpp"
#include "ptga/sim.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>

using nlohmann::ordered_json;
using namespace ptga;

namespace {

struct Request {
  std::string model_path;
  std::string init;
  std::string sense = "upper";
  std::string output;
  double epsilon = 1e-9;
  std::string bound;
  std::size_t runs = 100000;
  std::size_t horizon = 10000;
  std::uint64_t seed = 1;
  std::size_t state_cap = 1000000;
  bool allow_zeno = false;
  bool exact = false;
  bool dot = false;
  std::string epsilon_shift = "1/1048576";
};

void emit(const Request& r, const std::string& text)
{
  if (r.output.empty()) {
    std::cout << text << '\n';
    return;
  }
  std::ofstream out(r.output);
  if (!out)
    throw std::runtime_error("cannot write " + r.output);
  out << text << '\n';
}

Sense parse_sense(const std::string& s)
{
  if (s == "upper")
    return Sense::upper;
  if (s == "lower")
    return Sense::lower;
  throw std::invalid_argument("sense must be 'upper' or 'lower'");
}

// The common front half: parse, pick init, validate.
struct Loaded {
  Ptga model;
  Configuration init;
  ValidationReport report;
};

Loaded load(const Request& r)
{
  Loaded l{parse_model_file(r.model_path), {}, {}};
  l.init = r.init.empty() ? l.model.initial_configuration() : l.model.parse_configuration(r.init);
  ValidateOptions vo;
  vo.allow_zeno = r.allow_zeno;
  vo.init = l.init;
  l.report = validate(l.model, vo);
  for (auto const& w : l.report.warnings)
    std::cerr << "warning: " << w.code << " (" << w.context << "): " << w.message << '\n';
  if (!l.report.ok()) {
    for (auto const& e : l.report.errors)
      std::cerr << "error: " << e.code << " (" << e.context << "): " << e.message << '\n';
    throw std::invalid_argument("model rejected by validation");
  }
  return l;
}

std::string value_text(double v) { return std::isinf(v) ? "inf" : ordered_json(v).dump(); }

int cmd_validate(const Request& r)
{
  Ptga m = parse_model_file(r.model_path);
  ValidateOptions vo;
  vo.allow_zeno = r.allow_zeno;
  if (!r.init.empty())
    vo.init = m.parse_configuration(r.init);
  auto rep = validate(m, vo);
  emit(r, rep.to_json());
  for (auto const& e : rep.errors)
    std::cerr << "error: " << e.code << " (" << e.context << "): " << e.message << '\n';
  return rep.ok() ? 0 : 2;
}

int cmd_bra(const Request& r)
{
  auto l = load(r);
  auto g = build_reachable_bra(l.model, l.init, {r.state_cap});
  emit(r, r.dot ? bra_to_dot(g) : bra_to_json(g));
  return 0;
}

int cmd_solve(const Request& r)
{
  auto l = load(r);
  auto bra = build_reachable_bra(l.model, l.init, {r.state_cap});
  auto tb = to_turn_based(bra, parse_sense(r.sense));
  SolveOptions so{r.epsilon};
  auto res = solve(tb, so);
  std::optional<ExactSolveResult> ex;
  if (r.exact)
    ex = solve_exact(tb, so);

  auto label = [&](const PositionalStrategy& s, int node) -> ordered_json {
    int e = s.choice.at(node);
    if (e < 0)
      return nullptr;
    return tb.nodes[node].edges[e].label;
  };
  Player first = tb.sense == Sense::upper ? Player::min : Player::max;
  ordered_json states = ordered_json::array();
  for (std::size_t s = 0; s < bra.size(); ++s) {
    int n = tb.state_node[s];
    auto const& st = bra.states[s];
    ordered_json j;
    j["id"] = s;
    j["location"] = l.model.locations[st.location].name;
    j["valuation"] = st.valuation.to_string(l.model.clocks);
    j["region"] = st.region.to_string(l.model.clocks);
    j["value"] = std::isinf(res.values[n]) ? ordered_json("inf") : ordered_json(res.values[n]);
    if (ex)
      j["exact"] = ex->values[n] ? ordered_json(to_string(*ex->values[n])) : ordered_json("inf");
    auto const& strat = first == Player::min ? (ex ? ex->min_strategy : res.min_strategy)
                                             : (ex ? ex->max_strategy : res.max_strategy);
    j["first_mover"] = to_string(first);
    j["choice"] = label(strat, n);
    states.push_back(j);
  }
  ordered_json out;
  out["format"] = "ptga-solve/1";
  out["sense"] = to_string(tb.sense);
  out["init"] = l.model.to_string(l.init);
  int n0 = tb.state_node[bra.initial];
  out["value"] = std::isinf(res.values[n0]) ? ordered_json("inf") : ordered_json(res.values[n0]);
  if (ex)
    out["exact_value"] = ex->values[n0] ? ordered_json(to_string(*ex->values[n0])) : ordered_json("inf");
  out["epsilon"] = r.epsilon;
  out["iterations"] = res.iterations;
  out["residual"] = res.residual;
  out["bra_states"] = bra.size();
  out["game_nodes"] = tb.size();
  out["states"] = states;
  emit(r, out.dump(2));
  return 0;
}

int cmd_decide(const Request& r)
{
  auto l = load(r);
  auto bra = build_reachable_bra(l.model, l.init, {r.state_cap});
  auto tb = to_turn_based(bra, parse_sense(r.sense));
  std::optional<Rational> b;
  if (!r.bound.empty() && r.bound != "inf")
    b = parse_rational(r.bound);
  DecideOptions d;
  d.exact = r.exact;
  d.solve.epsilon = r.epsilon;
  auto dec = decide_threshold(tb, tb.state_node[bra.initial], b, d);
  ordered_json out;
  out["verdict"] = to_string(dec.verdict);
  out["bound"] = b ? ordered_json(to_string(*b)) : ordered_json("inf");
  out["sense"] = to_string(tb.sense);
  out["lower"] = value_text(dec.lower);
  out["upper"] = value_text(dec.upper);
  if (dec.exact_value)
    out["exact_value"] = to_string(*dec.exact_value);
  else if (dec.exact_infinite)
    out["exact_value"] = "inf";
  emit(r, out.dump(2));
  switch (dec.verdict) {
  case Verdict::at_most: return 0;
  case Verdict::greater: return 1;
  default: return 3;
  }
}

int cmd_simulate(const Request& r)
{
  auto l = load(r);
  auto bra = build_reachable_bra(l.model, l.init, {r.state_cap});
  auto tb = to_turn_based(bra, parse_sense(r.sense));
  auto res = solve(tb, {r.epsilon});
  auto profile = std::make_shared<StrategyProfile>();
  profile->model = &l.model;
  profile->bra = &bra;
  profile->game = &tb;
  profile->min_strategy = res.min_strategy;
  profile->max_strategy = res.max_strategy;
  Rational shift = parse_rational(r.epsilon_shift);
  auto mu = bra_strategy_to_concrete(profile, Player::min, shift);
  auto chi = bra_strategy_to_concrete(profile, Player::max, shift);
  auto sim = simulate_expected_time(l.model, *mu, *chi, l.init, {r.runs, r.horizon, r.seed});
  ordered_json out;
  out["mean"] = sim.mean;
  out["stderr"] = sim.stderr_;
  out["hits"] = sim.hits;
  out["runs"] = sim.runs;
  out["seed"] = sim.seed;
  out["epsilon_shift"] = to_string(shift);
  out["solved_value"] = value_text(res.values[tb.state_node[bra.initial]]);
  emit(r, out.dump(2));
  return 0;
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Expected reachability-time games on probabilistic timed game arenas"};
  app.require_subcommand(1);
  Request r;

  auto common = [&](CLI::App* sub) {
    sub->add_option("model", r.model_path, "Model file (.ptga)")->required()->check(CLI::ExistingFile);
    sub->add_option("--init", r.init, "Initial configuration, e.g. \"l0 x=1/2\"");
    sub->add_option("-o,--output", r.output, "Write the result here instead of stdout");
    sub->add_flag("--allow-zeno", r.allow_zeno, "Downgrade the non-Zeno check to a warning");
    sub->add_option("--state-cap", r.state_cap, "Abort once the abstraction exceeds this many states");
  };
  auto solving = [&](CLI::App* sub) {
    sub->add_option("--sense", r.sense, "upper or lower")->check(CLI::IsMember({"upper", "lower"}));
    sub->add_option("--epsilon", r.epsilon, "Value-iteration tolerance");
  };

  auto* v = app.add_subcommand("validate", "Check a model and print the report");
  common(v);
  auto* b = app.add_subcommand("bra", "Dump the reachable boundary region abstraction");
  common(b);
  b->add_flag("--dot", r.dot, "Emit DOT instead of JSON");
  auto* s = app.add_subcommand("solve", "Compute values and strategies");
  common(s);
  solving(s);
  s->add_flag("--exact", r.exact, "Also run exact strategy improvement");
  auto* d = app.add_subcommand("decide", "Decide whether the value is at most B");
  common(d);
  solving(d);
  d->add_option("--bound", r.bound, "Threshold B as p/q or decimal; omitted means no bound");
  d->add_flag("--exact", r.exact, "Decide with exact arithmetic");
  auto* m = app.add_subcommand("simulate", "Monte Carlo estimate under the solved strategies");
  common(m);
  solving(m);
  m->add_option("--runs", r.runs, "Number of sampled plays");
  m->add_option("--horizon", r.horizon, "Maximum steps per play");
  m->add_option("--seed", r.seed, "Random seed");
  m->add_option("--epsilon-shift", r.epsilon_shift, "Offset used to realise open-boundary moves");

  try {
    app.parse(argc, argv);
  }
  catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (v->parsed())
      return cmd_validate(r);
    if (b->parsed())
      return cmd_bra(r);
    if (s->parsed())
      return cmd_solve(r);
    if (d->parsed())
      return cmd_decide(r);
    return cmd_simulate(r);
  }
  catch (const ParseError& e) {
    std::cerr << e.what() << '\n';
  }
  catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
  }
  return 2;
}

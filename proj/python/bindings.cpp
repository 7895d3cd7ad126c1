#include "ptga/game.hpp"
#include "ptga/parser.hpp"
#include "ptga/qsf.hpp"
#include "ptga/sim.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <memory>

namespace py = pybind11;
using namespace ptga;

namespace {

Sense sense_of(const std::string& s)
{
  if (s == "upper")
    return Sense::upper;
  if (s == "lower")
    return Sense::lower;
  throw std::invalid_argument("sense must be 'upper' or 'lower', got '" + s + "'");
}

// Rationals cross the boundary as "p/q" strings; the Python side wraps them
// in fractions.Fraction. Infinity is None.
py::object exact_text(const std::optional<Rational>& v)
{
  if (!v)
    return py::none();
  return py::str(to_string(*v));
}

// Model, abstraction and turn-based game kept together; the abstraction
// points into the model, so the whole bundle is heap-allocated and pinned.
class Game {
 public:
  Game(const Ptga& model, const std::optional<std::string>& init, const std::string& sense, std::size_t state_cap)
      : model_(model)
  {
    init_ = init ? model_.parse_configuration(*init) : model_.initial_configuration();
    bra_ = build_reachable_bra(model_, init_, {state_cap});
    game_ = to_turn_based(bra_, sense_of(sense));
  }

  std::size_t bra_states() const { return bra_.size(); }
  std::size_t nodes() const { return game_.size(); }
  std::string sense() const { return to_string(game_.sense); }
  std::string init() const { return model_.to_string(init_); }

  double value(double epsilon) const
  {
    return solve(game_, {epsilon}).values[root()];
  }

  py::object exact_value() const { return exact_text(solve_exact(game_).values[root()]); }

  py::list states(bool exact) const
  {
    auto it = solve(game_);
    std::optional<ExactSolveResult> ex;
    if (exact)
      ex = solve_exact(game_);
    py::list out;
    for (std::size_t s = 0; s < bra_.size(); ++s) {
      auto const& st = bra_.states[s];
      int n = game_.state_node[s];
      py::dict d;
      d["location"] = model_.locations[st.location].name;
      d["valuation"] = st.valuation.to_string(model_.clocks);
      d["region"] = st.region.to_string(model_.clocks);
      d["target"] = static_cast<bool>(bra_.target[s]);
      d["value"] = it.values[n];
      if (ex)
        d["exact"] = exact_text(ex->values[n]);
      out.append(d);
    }
    return out;
  }

  std::vector<std::string> n_step(int n) const
  {
    auto v = n_step_values_exact(game_, n);
    std::vector<std::string> out;
    for (std::size_t s = 0; s < bra_.size(); ++s)
      out.push_back(to_string(v[game_.state_node[s]]));
    return out;
  }

  py::dict decide(const std::optional<std::string>& bound, bool exact) const
  {
    std::optional<Rational> b;
    if (bound && *bound != "inf")
      b = parse_rational(*bound);
    DecideOptions opts;
    opts.exact = exact;
    auto d = decide_threshold(game_, root(), b, opts);
    py::dict out;
    out["verdict"] = to_string(d.verdict);
    out["lower"] = d.lower;
    out["upper"] = d.upper;
    out["exact_value"] = d.exact_value ? py::object(py::str(to_string(*d.exact_value))) : py::none();
    out["exact_infinite"] = d.exact_infinite;
    return out;
  }

  py::dict simulate(std::size_t runs, std::size_t horizon, std::uint64_t seed, const std::string& shift) const
  {
    auto ex = solve_exact(game_);
    auto profile = std::make_shared<StrategyProfile>(
        StrategyProfile{&model_, &bra_, &game_, ex.min_strategy, ex.max_strategy});
    Rational eps = parse_rational(shift);
    auto mu = bra_strategy_to_concrete(profile, Player::min, eps);
    auto chi = bra_strategy_to_concrete(profile, Player::max, eps);
    SimResult r;
    {
      py::gil_scoped_release release;
      r = simulate_expected_time(model_, *mu, *chi, init_, {runs, horizon, seed});
    }
    py::dict out;
    out["mean"] = r.mean;
    out["stderr"] = r.stderr_;
    out["hits"] = r.hits;
    out["runs"] = r.runs;
    out["seed"] = r.seed;
    return out;
  }

  std::string bra_json() const { return bra_to_json(bra_); }
  std::string bra_dot() const { return bra_to_dot(bra_); }

 private:
  int root() const { return game_.state_node[bra_.initial]; }

  Ptga model_;
  Configuration init_;
  BraGame bra_;
  TurnBasedGame game_;
};

}  // namespace

PYBIND11_MODULE(_ptga, m)
{
  m.doc() = "Expected reachability-time games on probabilistic timed game arenas";

  static py::exception<ParseError> parse_error(m, "ParseError", PyExc_ValueError);
  static py::exception<ResourceError> resource_error(m, "ResourceError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p)
        std::rethrow_exception(p);
    }
    catch (const ParseError& e) {
      py::set_error(parse_error, e.what());
    }
    catch (const ResourceError& e) {
      py::set_error(resource_error, e.what());
    }
  });

  py::class_<Ptga>(m, "Model")
      .def_static("from_text", [](const std::string& text) { return parse_model({text}); }, py::arg("text"))
      .def_static("from_file", &parse_model_file, py::arg("path"))
      .def_readonly("clocks", &Ptga::clocks)
      .def_readonly("bound", &Ptga::bound)
      .def_property_readonly("locations",
                             [](const Ptga& p) {
                               std::vector<std::string> names;
                               for (auto const& l : p.locations)
                                 names.push_back(l.name);
                               return names;
                             })
      .def(
          "validate_json",
          [](const Ptga& p, bool allow_zeno, const std::optional<std::string>& init) {
            ValidateOptions vo;
            vo.allow_zeno = allow_zeno;
            if (init)
              vo.init = p.parse_configuration(*init);
            return validate(p, vo).to_json();
          },
          py::arg("allow_zeno") = false, py::arg("init") = py::none())
      .def("to_text", &serialize_model);

  py::class_<Game>(m, "Game")
      .def(py::init<const Ptga&, const std::optional<std::string>&, const std::string&, std::size_t>(),
           py::arg("model"), py::arg("init") = py::none(), py::arg("sense") = "upper",
           py::arg("state_cap") = BraOptions{}.state_cap)
      .def_property_readonly("bra_states", &Game::bra_states)
      .def_property_readonly("nodes", &Game::nodes)
      .def_property_readonly("sense", &Game::sense)
      .def_property_readonly("init", &Game::init)
      .def("value", &Game::value, py::arg("epsilon") = SolveOptions{}.epsilon)
      .def("exact_value_text", &Game::exact_value)
      .def("states", &Game::states, py::arg("exact") = false)
      .def("n_step_text", &Game::n_step, py::arg("n"))
      .def("decide_raw", &Game::decide, py::arg("bound"), py::arg("exact") = false)
      .def("simulate", &Game::simulate, py::arg("runs") = 10000, py::arg("horizon") = 10000, py::arg("seed") = 1,
           py::arg("shift") = "1/1048576")
      .def("bra_json", &Game::bra_json)
      .def("bra_dot", &Game::bra_dot);

  m.def(
      "eval_qsf_text",
      [](const std::string& text, const ClockNames& clocks, const std::vector<std::string>& values, int bound) {
        std::vector<Rational> xs;
        for (auto const& v : values)
          xs.push_back(parse_rational(v));
        return to_string(eval_qsf(parse_qsf(text, clocks), ClockValuation(xs, bound)));
      },
      py::arg("text"), py::arg("clocks"), py::arg("values"), py::arg("bound"));
}

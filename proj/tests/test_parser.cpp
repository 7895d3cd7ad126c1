#include "support.hpp"

#include <doctest.h>

using namespace ptga;
using namespace ptga::testing;

namespace {

Zone z(const Ptga& m, const std::string& text) { return parse_zone(text, m.clocks, m.bound); }

// Fig. 1 assembled field by field.
Ptga hand_fig1()
{
  Ptga m;
  m.clocks = {"x", "y"};
  m.bound = 2;
  m.locations = {{"l0", z(m, "x<=2 & y<=2")}, {"l1", z(m, "y>0 & y<=2 & x<=2")}, {"l2", m.universe()}};
  const ClockSet X = 1, Y = 2;
  m.edges = {
      {0, "b", Player::min, z(m, "x>1"), {{q("1/2"), X, 1}, {q("1/2"), X | Y, 2}}},
      {0, "a", Player::min, z(m, "x=2"), {{q("1"), X | Y, 2}}},
      {1, "a", Player::min, z(m, "y>1"), {{q("1"), X | Y, 2}}},
      {1, "c", Player::max, z(m, "y>1"), {{q("1/5"), Y, 0}, {q("4/5"), X | Y, 2}}},
      {2, "e", Player::min, z(m, "x>=2 & y>=2"), {{q("1"), X, 2}}},
  };
  m.target = {false, false, true};
  m.init = Configuration{0, ClockValuation::zero(2, 2)};
  return m;
}

ParseError parse_error(const std::string& text)
{
  try {
    parse_model({text});
  }
  catch (const ParseError& e) {
    return e;
  }
  FAIL("expected a parse error for:\n" << text);
  return ParseError("", 0, 0, "");
}

// The token at (line, column) starts with `token`.
bool points_at(const std::string& text, const ParseError& e, const std::string& token)
{
  std::size_t pos = 0;
  for (int l = 1; l < e.line(); ++l)
    pos = text.find('\n', pos) + 1;
  pos += static_cast<std::size_t>(e.column() - 1);
  return text.compare(pos, token.size(), token) == 0;
}

const char* minimal = R"(clocks x;
bound 1;
location start { }
location goal { }
edge min go from start guard x<=1 { 1 -> goal }
target goal;
)";

}  // namespace

TEST_SUITE("parser")
{
  TEST_CASE("minimal document")
  {
    Ptga m = parse_model({minimal});
    CHECK(m.locations.size() == 2);
    CHECK(m.edges.size() == 1);
    auto rep = validate(m);
    CHECK(rep.ok());
    CHECK(rep.warnings.empty());
    CHECK(m.initial_configuration() == Configuration{0, ClockValuation::zero(1, 1)});
  }

  TEST_CASE("Fig. 1 transcription equals the hand-built arena")
  {
    Ptga parsed = load_fixture("fig1");
    Ptga hand = hand_fig1();
    CHECK(parsed.clocks == hand.clocks);
    CHECK(parsed.locations == hand.locations);
    for (std::size_t e = 0; e < hand.edges.size(); ++e)
      CHECK(parsed.edges.at(e) == hand.edges[e]);
    CHECK(parsed == hand);
  }

  TEST_CASE("non-stochastic rows parse and fail validation")
  {
    std::string doc = R"(clocks x; bound 1;
location a { } location b { }
edge min go from a { 0.5 -> b; 0.6 -> a }
target b;)";
    Ptga m = parse_model({doc});
    auto rep = validate(m);
    REQUIRE_FALSE(rep.ok());
    CHECK(rep.errors[0].code == "distribution not stochastic");
  }

  TEST_CASE("round trip and determinism")
  {
    for (auto const* name : {"fig1", "fig2", "fig4"}) {
      Ptga m = load_fixture(name);
      std::string a = serialize_model(m), b = serialize_model(m);
      CHECK(a == b);
      CHECK(parse_model({a}) == m);
      CHECK(serialize_model(parse_model({a})) == a);
    }
    std::mt19937_64 rng(99);
    for (int i = 0; i < 60; ++i) {
      auto rm = random_model(rng, 400);
      std::string text = serialize_model(rm.model);
      INFO(text);
      REQUIRE(parse_model({text}) == rm.model);
    }
  }

  TEST_CASE("decimal and fractional probabilities agree")
  {
    std::string a = R"(clocks x; bound 1; location s { } location t { }
edge min go from s { 0.25 -> t; 3/4 reset x -> t } target t;)";
    Ptga m = parse_model({a});
    CHECK(m.edges[0].branches[0].probability == q("1/4"));
    CHECK(m.edges[0].branches[1].probability == q("3/4"));
  }

  TEST_CASE("errors carry positions inside the offending token")
  {
    struct Case {
      std::string text;
      std::string token;
    };
    std::vector<Case> cases{
        {"clocks x;\nbound 1;\nlocation l0 { inv x<=3 }\n", "3"},
        {"clocks x;\nbound 1;\nlocation l0 { inv z<=1 }\n", "z"},
        {"clocks x;\nbound 1;\nlocation l0 { }\nlocation l0 { }\n", "l0"},
        {"clocks x;\nbound 1;\nlocation l0 { }\nedge min a from l9 { 1 -> l0 }\n", "l9"},
        {"clocks x;\nbound 1;\nlocation l0 { }\nedge min a from l0 { 1 -> l0 }\nedge min a from l0 { 1 -> l0 }\n", "a"},
        {"clocks x x;\nbound 1;\n", "x"},
        {"clocks x;\nbound 1;\nlocation l0 { inv x<=1 } @\n", "@"},
        {"clocks x;\nbound 1;\nlocation l0 { inv x<=1/2 }\n", "1/2"},
        {"clocks x;\nbound 0;\n", "0"},
        {"clocks x;\nbound 1;\nlocation l0 { }\nedge min a from l0 { 1 reset x x -> l0 }\n", "x -> l0"},
    };
    for (auto const& c : cases) {
      auto e = parse_error(c.text);
      INFO(c.text << " -> " << std::string(e.what()));
      CHECK(e.line() >= 1);
      CHECK(points_at(c.text, e, c.token));
    }
  }

  TEST_CASE("missing bound reports the inferred constant")
  {
    auto e = parse_error("clocks x;\nlocation l0 { inv x<=3 }\n");
    CHECK(std::string(e.detail()).find("3") != std::string::npos);
  }

  TEST_CASE("comments are skipped")
  {
    std::string doc = std::string("# leading\n// other\n") + minimal;
    CHECK(parse_model({doc}) == parse_model({minimal}));
  }

  TEST_CASE("init declaration")
  {
    Ptga m = load_fixture("fig1");
    CHECK(m.init->valuation == ClockValuation::zero(2, 2));
    auto c = m.parse_configuration("l0 x=0.3 y=1/10");
    CHECK(c.valuation == ClockValuation({q("3/10"), q("1/10")}, 2));
    CHECK_THROWS(m.parse_configuration("l7 x=0"));
    CHECK_THROWS(m.parse_configuration("l0 x=3"));
  }
}

import math
import pathlib
from fractions import Fraction

import pytest

import ptga

MODELS = pathlib.Path(__file__).resolve().parents[2] / "models"


def load(name):
    return ptga.Model.from_file(str(MODELS / f"{name}.ptga"))


def test_model_metadata():
    m = load("fig1")
    assert m.clocks == ["x", "y"]
    assert m.bound == 2
    assert m.locations[0] == "l0"
    assert ptga.validate(m)["valid"]


def test_round_trip_text():
    m = load("fig4")
    again = ptga.Model.from_text(m.to_text())
    assert again.to_text() == m.to_text()


def test_parse_error_is_value_error():
    with pytest.raises(ptga.ParseError) as err:
        ptga.Model.from_text("clocks x; bound 1; location l0 { inv x<=1 ")
    assert isinstance(err.value, ValueError)


def test_broken_model_reports_errors():
    m = ptga.Model.from_file(str(MODELS.parent / "tests" / "data" / "broken.ptga"))
    report = ptga.validate(m)
    assert not report["valid"]
    assert any(e["code"] == "distribution not stochastic" for e in report["errors"])


@pytest.mark.parametrize("sense, want", [("upper", 1), ("lower", 0)])
def test_fig2_values_differ(sense, want):
    g = ptga.Game(load("fig2"), "l0 x=0", sense)
    assert g.exact_value() == want
    assert g.value() == pytest.approx(want, abs=1e-9)


def test_fig4_curve_and_decide():
    for x, want in [("0", "1/2"), ("1/4", "1/2"), ("3/4", "1/4")]:
        g = ptga.Game(load("fig4"), f"l0 x={x}")
        assert g.exact_value() == Fraction(want)
    g = ptga.Game(load("fig4"), "l0 x=3/4")
    assert g.decide(Fraction(1, 4), exact=True)["verdict"] == "AT_MOST"
    assert g.decide("1/5", exact=True)["verdict"] == "GREATER"


def test_n_step_monotone():
    g = ptga.Game(load("fig1"))
    prev = g.n_step(0)
    for n in range(1, 6):
        cur = g.n_step(n)
        assert all(a <= b for a, b in zip(prev, cur))
        prev = cur


def test_states_and_graph():
    g = ptga.Game(load("fig1"), "l0 x=0.3 y=0.1")
    states = g.states(exact=True)
    assert len(states) == g.bra_states == len(g.graph()["states"])
    assert any(s["target"] for s in states)
    assert "digraph" in g.bra_dot()


def test_state_cap():
    with pytest.raises(ptga.ResourceError):
        ptga.Game(load("fig1"), state_cap=3)


def test_simulation_is_seeded():
    g = ptga.Game(load("fig4"))
    a = g.simulate(runs=2000, seed=5)
    assert a == g.simulate(runs=2000, seed=5)
    assert a["hits"] == 2000
    assert abs(a["mean"] - 0.5) <= 4 * a["stderr"]


def test_qsf_evaluation():
    assert ptga.eval_qsf("min(c:1/2, lin(1,x))", ["x"], [Fraction(3, 4)], 1) == Fraction(1, 4)


def test_infinite_exact_value():
    m = ptga.Model.from_text(
        "clocks x; bound 1; location s { } location t { } location d { }"
        " edge max bad from s guard x>=1 { 1 reset x -> d }"
        " edge min ok from s guard x>=1 { 1 reset x -> t }"
        " edge min stay from d guard x>=1 { 1 reset x -> d }"
        " edge min loop from t guard x>=1 { 1 reset x -> t }"
        " target t;"
    )
    assert ptga.Game(m).exact_value() == math.inf

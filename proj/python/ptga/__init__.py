"""Expected reachability-time games on probabilistic timed game arenas.

Exact quantities are returned as ``fractions.Fraction``; an infinite exact
value is ``math.inf``.
"""

from __future__ import annotations

import json
import math
from fractions import Fraction

from ._ptga import Game as _Game
from ._ptga import Model, ParseError, ResourceError
from ._ptga import eval_qsf_text as _eval_qsf_text

__all__ = ["Model", "Game", "ParseError", "ResourceError", "validate", "eval_qsf"]


def _fraction(text):
    return math.inf if text is None else Fraction(text)


def validate(model: Model, allow_zeno: bool = False, init: str | None = None) -> dict:
    """Validation report as a dict with ``valid``, ``errors`` and ``warnings``."""
    return json.loads(model.validate_json(allow_zeno, init))


class Game(_Game):
    """Abstraction plus turn-based game from one initial configuration."""

    def exact_value(self):
        return _fraction(self.exact_value_text())

    def n_step(self, n: int) -> list[Fraction]:
        """Exact n-step values, one per abstraction state."""
        return [Fraction(t) for t in self.n_step_text(n)]

    def decide(self, bound=None, exact: bool = False) -> dict:
        if bound is not None and not isinstance(bound, str):
            bound = str(Fraction(bound))
        out = self.decide_raw(bound, exact)
        if out["exact_value"] is not None:
            out["exact_value"] = Fraction(out["exact_value"])
        return out

    def graph(self) -> dict:
        return json.loads(self.bra_json())


def eval_qsf(text: str, clocks, values, bound: int) -> Fraction:
    return Fraction(_eval_qsf_text(text, list(clocks), [str(Fraction(v)) for v in values], bound))

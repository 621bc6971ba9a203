"""Bisimilarity of simple grammars and equivalence of context-free session types.

Grammars, words and types are passed as text in the same formats as the
``sgbisim`` command line tool. Results are plain dictionaries.
"""

import json

from . import _core
from ._core import ContractViolation, Error, ParseError

__all__ = [
    "ContractViolation",
    "Error",
    "ParseError",
    "approximant",
    "check",
    "check_types",
    "closure",
    "congruence",
    "equivalent",
    "format_type",
    "fuzz",
    "norms",
    "render_tree",
]


def check(grammar, gamma, delta, trace=False):
    """Decides gamma ~ delta; the result mirrors ``sgbisim check --trace json``."""
    return json.loads(_core.check(grammar, gamma, delta, trace))


def check_types(t, u, trace=False):
    return json.loads(_core.check_types(t, u, trace))


def equivalent(t, u):
    return check_types(t, u)["verdict"] == "bisimilar"


def norms(grammar):
    return json.loads(_core.norms(grammar))


def congruence(grammar, basis, gamma, delta, mode="coinductive"):
    return json.loads(_core.congruence(grammar, basis, gamma, delta, mode))


def approximant(grammar, gamma, delta, max_depth=64):
    return json.loads(_core.approximant(grammar, gamma, delta, max_depth))


def closure(grammar, gamma, delta, len_cap=64):
    return json.loads(_core.closure(grammar, gamma, delta, len_cap))


def fuzz(seed=1, count=100, inject_dead=False):
    return json.loads(_core.fuzz(seed, count, inject_dead))


def render_tree(tree):
    """Text form of one ``phases[i]["tree"]`` entry."""
    return _core.render_tree(json.dumps(tree))


format_type = _core.format_type

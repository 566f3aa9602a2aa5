"""Named Bell-type inequalities with their reference LHV bounds.

Every generator returns exact small-integer coefficients so the bound
computations in :mod:`lhvbounds.forms` are exact in floating point.

Matrices over (setting, block) pairs use one flattening everywhere: rows
and columns run (1,1), (1,2), ..., (1,Q), (2,1), ..., (S,Q), i.e. settings
major, blocks minor.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from itertools import product

import numpy as np

from .errors import ValidationError
from .forms import DEFAULT_CAP
from .scenario import (CorrelationFunctional, EventFunctional, EventTerm,
                       ProbabilityFunctional, Scenario)

__all__ = [
    "NamedInequality",
    "GENERATORS",
    "chsh",
    "ch",
    "mk_coefficients",
    "collins_gisin_4422",
    "collins_gisin_2233",
    "zohren_gill",
    "correlation_from_matrix",
    "probability_from_matrix",
    "block_index",
    "bar",
    "rebind",
    "applicable_inequalities",
]


@dataclass(frozen=True)
class NamedInequality:
    name: str
    functional: object
    published_min: float | None = None
    published_max: float | None = None


def block_index(setting: int, block: int, Q: int) -> int:
    """Flat position of the 0-based (setting, block) pair."""
    return setting * Q + block


def correlation_from_matrix(scenario, gamma, name=None) -> CorrelationFunctional:
    """Bipartite full-correlation functional with ``gamma[s1][s2]``."""
    g = np.asarray(gamma, dtype=float)
    terms = {((0, i), (1, k)): float(g[i, k])
             for i in range(g.shape[0]) for k in range(g.shape[1])
             if g[i, k] != 0}
    return CorrelationFunctional(scenario, terms, name)


def probability_from_matrix(scenario, blocks, events, gamma, gamma1=None,
                            gamma2=None, name=None) -> ProbabilityFunctional:
    """Bipartite probability functional ``(eta_1, gamma eta_2) + (eta_1,
    gamma1) + (eta_2, gamma2)`` over flattened (setting, block) vectors."""
    Q1, Q2 = blocks
    g = np.asarray(gamma, dtype=float)
    S1, S2 = scenario.settings
    if g.shape != (S1 * Q1, S2 * Q2):
        raise ValidationError(f"matrix shape {g.shape} does not match "
                              f"{(S1 * Q1, S2 * Q2)}", "gamma")
    terms = {}
    for (s1, q1), (s2, q2) in product(product(range(S1), range(Q1)),
                                      product(range(S2), range(Q2))):
        v = g[block_index(s1, q1, Q1), block_index(s2, q2, Q2)]
        if v != 0:
            terms[((0, s1, q1), (1, s2, q2))] = float(v)
    for site, vec, S, Q in ((0, gamma1, S1, Q1), (1, gamma2, S2, Q2)):
        if vec is None:
            continue
        vec = np.asarray(vec, dtype=float)
        if vec.shape != (S * Q,):
            raise ValidationError(f"marginal vector for site {site + 1} has "
                                  f"shape {vec.shape}, expected {(S * Q,)}")
        for s, q in product(range(S), range(Q)):
            v = vec[block_index(s, q, Q)]
            if v != 0:
                terms[((site, s, q),)] = float(v)
    return ProbabilityFunctional(scenario, blocks, events, terms, name)


def chsh(sign_position: int = 4, negate: bool = False) -> NamedInequality:
    """2x2 full-correlation CHSH with the minus sign in one matrix cell.

    Cells are numbered row-major: 1 = (1,1), 2 = (1,2), 3 = (2,1),
    4 = (2,2).  ``negate`` flips the overall sign.
    """
    if (isinstance(sign_position, bool)
            or not isinstance(sign_position, (int, np.integer))
            or sign_position not in (1, 2, 3, 4)):
        raise ValidationError(f"sign cell must be 1..4, got {sign_position!r}",
                              "sign_position")
    g = np.ones((2, 2))
    g.flat[int(sign_position) - 1] = -1.0
    if negate:
        g = -g
    name = "chsh" if (sign_position, negate) == (4, False) else \
        f"chsh-c{sign_position}" + ("-neg" if negate else "")
    sc = Scenario.uniform((2, 2))
    return NamedInequality(name, correlation_from_matrix(sc, g, name),
                           -2.0, 2.0)


def _binary_events(settings, block_outcome=1):
    return {(n, s, 0): frozenset({block_outcome})
            for n, S in enumerate(settings) for s in range(S)}


def ch() -> NamedInequality:
    """Clauser-Horne form on 2x2 settings with events ``{+1}``."""
    sc = Scenario.uniform((2, 2))
    f = probability_from_matrix(sc, (1, 1), _binary_events(sc.settings),
                                [[1, 1], [1, -1]], [-1, 0], [-1, 0], "ch")
    return NamedInequality("ch", f, -1.0, 0.0)


def bar(key):
    """Swap settings 1 and 2 (0-based: 0 and 1) in a setting tuple."""
    return tuple(1 - s for s in key)


def mk_coefficients(N: int) -> NamedInequality:
    """Full-correlation coefficients of the N-party two-setting recursion.

    Starting from CHSH, a new last site with setting ``t`` gets
    ``gamma[s + (t,)] = gamma[s] + (+1 if t == first else -1) * gamma[bar(s)]``.
    """
    if isinstance(N, bool) or not isinstance(N, (int, np.integer)) or N < 2:
        raise ValidationError(f"need N >= 2 parties, got {N!r}", "parties")
    N = int(N)
    gamma = {(0, 0): 1, (0, 1): 1, (1, 0): 1, (1, 1): -1}
    for _ in range(N - 2):
        nxt = {}
        for s in product((0, 1), repeat=len(next(iter(gamma)))):
            a, b = gamma.get(s, 0), gamma.get(bar(s), 0)
            nxt[s + (0,)] = a + b
            nxt[s + (1,)] = a - b
        gamma = {k: v for k, v in nxt.items() if v != 0}
    sc = Scenario.uniform((2,) * N)
    terms = {tuple(enumerate(k)): float(v) for k, v in sorted(gamma.items())}
    bound = float(2 ** (N - 1))
    return NamedInequality(f"mk{N}", CorrelationFunctional(sc, terms, f"mk{N}"),
                           -bound, bound)


CG4422_MATRIX = [[1, 1, 1, 1],
                 [1, 1, 1, -1],
                 [1, 1, -1, 0],
                 [1, -1, 0, 0]]
CG2233_MATRIX = [[1, 1, 0, 1],
                 [1, 0, 1, 1],
                 [0, 1, 0, -1],
                 [1, 1, -1, -1]]


def collins_gisin_4422() -> NamedInequality:
    """4x4-setting inequality with binary outcomes and events ``{+1}``.

    Only the upper bound 0 is a reference value; the lower bound is left to
    the enumeration.
    """
    sc = Scenario.uniform((4, 4))
    f = probability_from_matrix(sc, (1, 1), _binary_events(sc.settings),
                                CG4422_MATRIX, [-1, 0, 0, 0], [-3, -2, -1, 0],
                                "cg4422")
    return NamedInequality("cg4422", f, None, 0.0)


def collins_gisin_2233() -> NamedInequality:
    """2x2-setting inequality with three outcomes and two blocks per setting.

    Block q of every setting is the single outcome with index q, so the
    third outcome stays outside both events.
    """
    sc = Scenario.uniform((2, 2), values=(-1, 0, 1))
    events = {(n, s, q): frozenset({q})
              for n in range(2) for s in range(2) for q in range(2)}
    f = probability_from_matrix(sc, (2, 2), events, CG2233_MATRIX,
                                [-1, -1, 0, 0], [-1, -1, 0, 0], "cg2233")
    return NamedInequality("cg2233", f, None, 0.0)


def _zg_terms(K, strict):
    idx = range(K)
    up = frozenset((a, b) for a in idx for b in idx if b > a)
    down = frozenset((a, b) for a in idx for b in idx if a > b)
    closed = down if strict else frozenset(
        (a, b) for a in idx for b in idx if a >= b)
    # same setting pair: site 2 beats site 1; mixed pair: site 1 beats site 2
    return (EventTerm((0, 0), up, 1.0), EventTerm((0, 1), closed, 1.0),
            EventTerm((1, 1), up, 1.0), EventTerm((1, 0), down, 1.0))


def zohren_gill(K: int, cap: int = DEFAULT_CAP,
                strict: bool = False) -> NamedInequality:
    """Cyclic order events on 2x2 settings with outcomes 1..K.

    Terms, in order: ``l2(1) > l1(1)``, ``l1(1) >= l2(2)``, ``l2(2) > l1(2)``,
    ``l1(2) > l2(1)``.  One comparison must be weak: if all four were
    strict, equal outcomes everywhere would make every event fail and the
    infimum would drop to 0.  With ``strict=True`` that all-strict variant is
    built instead and carries no reference bound.  The weak form has
    infimum 1 for every K.
    """
    if isinstance(K, bool) or not isinstance(K, (int, np.integer)):
        raise ValidationError(f"K must be an integer, got {K!r}", "outcomes")
    K = int(K)
    if K < 2 or K ** 4 > cap:
        raise ValidationError(f"K must satisfy 2 <= K and K^4 <= {cap}, "
                              f"got {K}", "outcomes")
    sc = Scenario.uniform((2, 2), values=tuple(range(1, K + 1)))
    name = f"zohren-gill{K}" + ("-strict" if strict else "")
    f = EventFunctional(sc, _zg_terms(K, strict), name)
    return NamedInequality(name, f, None if strict else 1.0, None)


GENERATORS = {
    "chsh": chsh,
    "ch": ch,
    "mk": mk_coefficients,
    "cg4422": collins_gisin_4422,
    "cg2233": collins_gisin_2233,
    "zohren-gill": zohren_gill,
}


def rebind(ineq: NamedInequality, scenario: Scenario):
    """The same inequality on another scenario, or None if it does not fit.

    Events are referenced by outcome index, so a fit needs matching setting
    counts and enough outcomes; correlation forms also need outcome spaces
    spanning exactly [-1, +1].
    """
    f = ineq.functional
    if f.scenario.settings != scenario.settings:
        return None
    if isinstance(f, CorrelationFunctional) and not scenario.is_normalized:
        return None
    if isinstance(f, (ProbabilityFunctional, EventFunctional)):
        if not scenario.is_finite:
            return None
        if isinstance(f, EventFunctional) and (scenario.outcome_counts()
                                               != f.scenario.outcome_counts()):
            return None
    try:
        g = dataclasses.replace(f, scenario=scenario)
    except ValidationError:
        return None
    return dataclasses.replace(ineq, functional=g)


def applicable_inequalities(scenario: Scenario):
    """Every catalog inequality that fits ``scenario``."""
    out = []
    cands = [chsh(c, neg) for c in (1, 2, 3, 4) for neg in (False, True)]
    cands += [ch(), collins_gisin_4422(), collins_gisin_2233()]
    if scenario.num_parties >= 2:
        cands.append(mk_coefficients(scenario.num_parties))
    counts = {k for row in scenario.outcome_counts() for k in row} \
        if scenario.is_finite else set()
    if len(counts) == 1 and 2 <= (K := counts.pop()) <= 64:
        cands.append(zohren_gill(K))
    for c in cands:
        r = rebind(c, scenario)
        if r is not None:
            out.append(r)
    return out

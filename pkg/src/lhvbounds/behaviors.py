"""Concrete behaviors, deterministic-strategy models and LHV membership.

A behavior holds one joint probability table per setting tuple, indexed by
0-based outcome indices (last site fastest when flattened).  An LHV model
is a probability vector over deterministic strategies, stored as a tensor
with one axis per (site, setting) pair in site-major order.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from . import _simplex
from .errors import CapExceeded, SignalingError, ValidationError
from .scenario import (CorrelationFunctional, EventFunctional,
                       ProbabilityFunctional, Scenario, _parse_scenario,
                       _read_json, scenario_to_dict)

__all__ = [
    "Behavior",
    "LhvModel",
    "NoSignalingReport",
    "LhvVerdict",
    "correlation",
    "marginal",
    "evaluate_functional",
    "check_no_signaling",
    "behavior_from_lhv",
    "is_lhv",
    "pr_box",
    "noisy_pr_box",
    "singlet_behavior",
    "deterministic_behavior",
    "uniform_behavior",
    "load_behavior",
    "parse_behavior",
    "behavior_to_dict",
    "dump_behavior",
    "certificate_margin",
]

NORM_TOL = 1e-9
CLAMP_TOL = 1e-12
SIGNAL_TOL = 1e-9
WITNESS_TOL = 1e-7
MARGIN_TOL = 1e-7
FEASIBLE_TOL = 1e-9
STRATEGY_CAP = 20000
ENTRY_CAP = 20000


def _settings_key(t):
    return ",".join(str(s + 1) for s in t)


@dataclass(frozen=True)
class Behavior:
    scenario: Scenario
    tables: dict = field(default_factory=dict)

    def __post_init__(self):
        sc = self.scenario
        if not sc.is_finite:
            raise ValidationError("behaviors need finite outcome alphabets",
                                  "scenario")
        counts = sc.outcome_counts()
        clean = {}
        given = {tuple(int(s) for s in k): v for k, v in self.tables.items()}
        for t in sc.setting_tuples():
            path = f"tables.{_settings_key(t)}"
            if t not in given:
                raise ValidationError("table missing", path)
            shape = tuple(counts[n][s] for n, s in enumerate(t))
            arr = np.array(given.pop(t), dtype=float)
            if arr.size != math.prod(shape):
                raise ValidationError(
                    f"table has {arr.size} entries, expected "
                    f"{math.prod(shape)}", path)
            arr = arr.reshape(shape)
            if not np.all(np.isfinite(arr)):
                raise ValidationError("non-finite probability", path)
            if arr.min() < -CLAMP_TOL:
                raise ValidationError(
                    f"negative probability {arr.min():.3g}", path)
            arr = np.maximum(arr, 0.0)
            if abs(arr.sum() - 1.0) > NORM_TOL:
                raise ValidationError(
                    f"table sums to {arr.sum():.12g}, not 1", path)
            arr.setflags(write=False)
            clean[t] = arr
        if given:
            extra = next(iter(given))
            raise ValidationError("table for a setting tuple outside the "
                                  "scenario", f"tables.{_settings_key(extra)}")
        object.__setattr__(self, "tables", clean)


def _coordinate_offsets(scenario):
    return np.cumsum((0,) + scenario.settings)[:-1]


@dataclass(frozen=True)
class LhvModel:
    """Weights over deterministic strategies.

    ``weights`` has one axis per (site, setting), site-major; the entry at
    index ``(o_11, o_12, ..., o_NS)`` is the probability of the strategy
    that answers outcome ``o_ns`` to setting s at site n.
    """

    scenario: Scenario
    weights: np.ndarray

    def __post_init__(self):
        sc = self.scenario
        if not sc.is_finite:
            raise ValidationError("LHV models need finite outcome alphabets")
        shape = tuple(k for row in sc.outcome_counts() for k in row)
        w = np.array(self.weights, dtype=float)
        if w.size != math.prod(shape):
            raise ValidationError(f"{w.size} weights for {math.prod(shape)} "
                                  "strategies", "weights")
        w = w.reshape(shape)
        if w.min() < -CLAMP_TOL:
            raise ValidationError("negative strategy weight", "weights")
        w = np.maximum(w, 0.0)
        if abs(w.sum() - 1.0) > NORM_TOL:
            raise ValidationError(f"weights sum to {w.sum():.12g}, not 1",
                                  "weights")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def strategy_count(self) -> int:
        return self.weights.size

    @classmethod
    def random(cls, scenario, rng) -> LhvModel:
        """Dirichlet(1) weights, i.e. uniform on the probability simplex."""
        shape = tuple(k for row in scenario.outcome_counts() for k in row)
        w = rng.dirichlet(np.ones(math.prod(shape)))
        return cls(scenario, w.reshape(shape))

    @classmethod
    def point_mass(cls, scenario, assignment) -> LhvModel:
        """All weight on one strategy; ``assignment[n][s]`` is an index."""
        shape = tuple(k for row in scenario.outcome_counts() for k in row)
        w = np.zeros(shape)
        w[tuple(o for row in assignment for o in row)] = 1.0
        return cls(scenario, w)


def behavior_from_lhv(m: LhvModel) -> Behavior:
    """Marginal of the strategy distribution for every setting tuple."""
    sc = m.scenario
    off = _coordinate_offsets(sc)
    axes = range(m.weights.ndim)
    tables = {}
    for t in sc.setting_tuples():
        keep = [int(off[n]) + s for n, s in enumerate(t)]
        drop = tuple(a for a in axes if a not in keep)
        tables[t] = m.weights.sum(axis=drop)
    return Behavior(sc, tables)


def marginal(b: Behavior, sites, settings) -> np.ndarray:
    """Joint table of the listed sites at the listed settings.

    Unlisted sites are summed out with their first setting; for a
    no-signaling behavior the choice does not matter.
    """
    sc = b.scenario
    sites = [int(n) for n in sites]
    settings = [int(s) for s in settings]
    if not sites or len(sites) != len(settings):
        raise ValidationError("need a nonempty site list with one setting "
                              "per site")
    if sorted(set(sites)) != sites:
        raise ValidationError("sites must be strictly increasing")
    full = [0] * sc.num_parties
    for n, s in zip(sites, settings):
        if not 0 <= n < sc.num_parties or not 0 <= s < sc.settings[n]:
            raise ValidationError(f"site {n + 1} / setting {s + 1} out of "
                                  "range")
        full[n] = s
    drop = tuple(n for n in range(sc.num_parties) if n not in sites)
    table = b.tables[tuple(full)]
    return table.sum(axis=drop) if drop else table


def correlation(b: Behavior, sites, settings) -> float:
    """Expectation of the product of outcome values at the listed sites."""
    table = marginal(b, sites, settings)
    prod_ = np.ones(())
    for n, s in zip(sites, settings):
        vals = np.asarray(b.scenario.outcomes[int(n)][int(s)].values)
        prod_ = np.multiply.outer(prod_, vals)
    return float((prod_ * table).sum())


def _check_compatible(b, f):
    if f.scenario.settings != b.scenario.settings:
        raise ValidationError("functional and behavior have different "
                              "setting counts")
    if not isinstance(f, CorrelationFunctional) and (
            f.scenario.outcome_counts() != b.scenario.outcome_counts()):
        raise ValidationError("functional and behavior have different "
                              "outcome alphabets")


def evaluate_functional(b: Behavior, f) -> float:
    """Value of a functional on a behavior (the quantity the LHV bounds
    constrain)."""
    _check_compatible(b, f)
    total = 0.0
    if isinstance(f, CorrelationFunctional):
        for key, g in f.terms.items():
            total += g * correlation(b, [n for n, _ in key],
                                     [s for _, s in key])
    elif isinstance(f, ProbabilityFunctional):
        for key, g in f.terms.items():
            table = marginal(b, [n for n, _, _ in key], [s for _, s, _ in key])
            idx = np.ix_(*(sorted(f.events[k]) for k in key))
            total += g * float(table[idx].sum())
    elif isinstance(f, EventFunctional):
        for t in f.terms:
            table = b.tables[t.settings]
            if t.outcomes:
                hit = tuple(np.array(sorted(t.outcomes)).T)
                total += t.gamma * float(table[hit].sum())
    else:
        raise TypeError(f"not a functional: {type(f).__name__}")
    return total + 0.0


@dataclass(frozen=True)
class NoSignalingReport:
    passed: bool
    max_deviation: float
    violations: tuple = ()

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "max_deviation": self.max_deviation,
            "violations": [
                {"sites": [n + 1 for n in v["sites"]],
                 "settings": [[s + 1 for s in v["settings"][0]],
                              [s + 1 for s in v["settings"][1]]],
                 "deviation": v["deviation"]}
                for v in self.violations],
        }


def check_no_signaling(b: Behavior, tol=SIGNAL_TOL) -> NoSignalingReport:
    """Compare marginals of every proper site subset across setting tuples
    that agree on that subset."""
    sc = b.scenario
    N = sc.num_parties
    worst = 0.0
    violations = []
    for size in range(1, N):
        for sub in combinations(range(N), size):
            drop = tuple(n for n in range(N) if n not in sub)
            ref = {}
            for t in sc.setting_tuples():
                local = tuple(t[n] for n in sub)
                m = b.tables[t].sum(axis=drop)
                if local not in ref:
                    ref[local] = (t, m)
                    continue
                t0, m0 = ref[local]
                dev = float(np.abs(m - m0).max())
                worst = max(worst, dev)
                if dev > tol:
                    violations.append({"sites": sub, "settings": (t0, t),
                                       "deviation": dev})
    return NoSignalingReport(not violations, worst, tuple(violations))


@dataclass(frozen=True)
class LhvVerdict:
    """Outcome of the membership test.

    ``kind`` is ``"LHV"`` (with ``model``), ``"NotLHV"`` (with
    ``certificate``: one coefficient table per setting tuple whose value on
    the behavior exceeds its maximum over deterministic strategies by
    ``margin``) or ``"inconclusive"`` when neither side certifies within
    tolerance.
    """

    kind: str
    model: LhvModel | None = None
    certificate: dict | None = None
    margin: float | None = None
    reproduction_error: float | None = None
    iterations: int = 0

    def to_dict(self) -> dict:
        out = {"verdict": self.kind, "iterations": self.iterations}
        if self.model is not None:
            out["weights"] = self.model.weights.ravel().tolist()
            out["reproduction_error"] = self.reproduction_error
        if self.certificate is not None:
            out["certificate"] = {_settings_key(t): c.ravel().tolist()
                                  for t, c in self.certificate.items()}
        if self.margin is not None:
            out["margin"] = self.margin
        return out


def _strategy_outcomes(sc):
    """Index array (strategies, coordinates) in C order of the weight tensor."""
    shape = tuple(k for row in sc.outcome_counts() for k in row)
    return np.indices(shape).reshape(len(shape), -1).T


def is_lhv(b: Behavior, strategy_cap=STRATEGY_CAP,
           entry_cap=ENTRY_CAP) -> LhvVerdict:
    """Decide whether strategy weights reproduce every table of ``b``.

    Solved as phase-1 linear feasibility: one equality per table entry plus
    normalization, one nonnegative variable per deterministic strategy.  An
    infeasible system yields a separating functional from the phase-1 dual,
    whose margin is then recomputed directly over all strategies.
    """
    sc = b.scenario
    report = check_no_signaling(b)
    if not report.passed:
        raise SignalingError(report)
    counts = sc.outcome_counts()
    n_strat = math.prod(k for row in counts for k in row)
    if n_strat > strategy_cap:
        raise CapExceeded("deterministic strategies", n_strat, strategy_cap)
    tuples = sc.setting_tuples()
    n_entries = sum(b.tables[t].size for t in tuples)
    if n_entries > entry_cap:
        raise CapExceeded("behavior table entries", n_entries, entry_cap)

    off = _coordinate_offsets(sc)
    strat = _strategy_outcomes(sc)
    A = np.zeros((n_entries + 1, n_strat))
    rhs = np.zeros(n_entries + 1)
    cols = np.arange(n_strat)
    row0 = 0
    for t in tuples:
        table = b.tables[t]
        picked = strat[:, [int(off[n]) + s for n, s in enumerate(t)]]
        flat = np.ravel_multi_index(tuple(picked.T), table.shape)
        A[row0 + flat, cols] = 1.0
        rhs[row0:row0 + table.size] = table.ravel()
        row0 += table.size
    A[-1] = 1.0
    rhs[-1] = 1.0

    res = _simplex.phase1(A, rhs)
    if res.infeasibility <= FEASIBLE_TOL:
        w = np.maximum(res.x, 0.0)
        w = w / w.sum()
        model = LhvModel(sc, w)
        rebuilt = behavior_from_lhv(model)
        err = max(float(np.abs(rebuilt.tables[t] - b.tables[t]).max())
                  for t in tuples)
        kind = "LHV" if err <= WITNESS_TOL else "inconclusive"
        return LhvVerdict(kind, model, reproduction_error=err,
                          iterations=res.iterations)

    y = res.dual[:-1]
    scale = float(np.abs(y).max())
    if scale == 0.0:
        return LhvVerdict("inconclusive", iterations=res.iterations)
    y = y / scale
    cert, row0 = {}, 0
    for t in tuples:
        size = b.tables[t].size
        cert[t] = y[row0:row0 + size].reshape(b.tables[t].shape)
        row0 += size
    margin = certificate_margin(b, cert)
    kind = "NotLHV" if margin > MARGIN_TOL else "inconclusive"
    return LhvVerdict(kind, certificate=cert, margin=margin,
                      iterations=res.iterations)


def certificate_margin(b: Behavior, cert: dict) -> float:
    """Value of a coefficient table family on ``b`` minus its maximum over
    all deterministic strategies."""
    sc = b.scenario
    off = _coordinate_offsets(sc)
    strat = _strategy_outcomes(sc)
    on_b = sum(float((cert[t] * b.tables[t]).sum()) for t in cert)
    per_strategy = np.zeros(len(strat))
    for t, c in cert.items():
        picked = strat[:, [int(off[n]) + s for n, s in enumerate(t)]]
        per_strategy += c[tuple(picked.T)]
    return on_b - float(per_strategy.max())


# ---------------------------------------------------------------------------
# Fixtures
# ---------------------------------------------------------------------------

def _binary_2x2():
    return Scenario.uniform((2, 2))


def pr_box() -> Behavior:
    """Perfect correlations except anticorrelation at settings (2, 2)."""
    tables = {}
    for t in _binary_2x2().setting_tuples():
        sign = -1.0 if t == (1, 1) else 1.0
        vals = np.array([-1.0, 1.0])
        tables[t] = np.where(np.outer(vals, vals) == sign, 0.5, 0.0)
    return Behavior(_binary_2x2(), tables)


def uniform_behavior(scenario) -> Behavior:
    tables = {}
    for t in scenario.setting_tuples():
        shape = tuple(scenario.outcomes[n][s].size for n, s in enumerate(t))
        tables[t] = np.full(shape, 1.0 / math.prod(shape))
    return Behavior(scenario, tables)


def noisy_pr_box(visibility: float) -> Behavior:
    """``v * PR + (1 - v) * uniform``; CHSH value ``4 v``."""
    pr = pr_box()
    flat = uniform_behavior(pr.scenario)
    return Behavior(pr.scenario, {
        t: visibility * pr.tables[t] + (1 - visibility) * flat.tables[t]
        for t in pr.tables})


def singlet_behavior(alice=(0.0, math.pi / 2),
                     bob=(5 * math.pi / 4, 3 * math.pi / 4)) -> Behavior:
    """Spin-singlet statistics for coplanar measurement angles.

    ``p(x, y) = (1 - x y cos(a - b)) / 4`` so the correlation is
    ``-cos(a - b)``.  The default angles give CHSH value ``2 sqrt 2``.
    """
    vals = np.array([-1.0, 1.0])
    xy = np.outer(vals, vals)
    tables = {}
    for i, a in enumerate(alice):
        for k, c in enumerate(bob):
            tables[(i, k)] = (1.0 - xy * math.cos(a - c)) / 4.0
    return Behavior(Scenario.uniform((len(alice), len(bob))), tables)


def deterministic_behavior(scenario, assignment) -> Behavior:
    return behavior_from_lhv(LhvModel.point_mass(scenario, assignment))


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------

def parse_behavior(doc) -> Behavior:
    if not isinstance(doc, dict):
        raise ValidationError("behavior document must be an object")
    if "scenario" not in doc or "tables" not in doc:
        raise ValidationError("behavior document needs 'scenario' and "
                              "'tables'")
    sc = _parse_scenario(doc["scenario"])
    if not isinstance(doc["tables"], dict):
        raise ValidationError("must be an object", "tables")
    tables = {}
    for key, vals in doc["tables"].items():
        try:
            t = tuple(int(x) - 1 for x in str(key).split(","))
        except ValueError:
            raise ValidationError("bad settings key", f"tables.{key}")
        if len(t) != sc.num_parties or any(
                not 0 <= s < S for s, S in zip(t, sc.settings)):
            raise ValidationError("settings out of range", f"tables.{key}")
        if not isinstance(vals, list) or not all(
                isinstance(v, (int, float)) and not isinstance(v, bool)
                for v in vals):
            raise ValidationError("must be a flat list of numbers",
                                  f"tables.{key}")
        tables[t] = vals
    return Behavior(sc, tables)


def load_behavior(path) -> Behavior:
    return parse_behavior(_read_json(path))


def behavior_to_dict(b: Behavior) -> dict:
    return {"scenario": scenario_to_dict(b.scenario),
            "tables": {_settings_key(t): v.ravel().tolist()
                       for t, v in b.tables.items()}}


def dump_behavior(b: Behavior, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(behavior_to_dict(b), fh, indent=1)
        fh.write("\n")

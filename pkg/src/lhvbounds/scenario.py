"""Experiment data model and the JSON document format.

A scenario fixes the number of parties, the number of measurement settings
per party and the outcome alphabet of every (site, setting) pair.  Functionals
are linear combinations of correlation functions, product-event
probabilities or general joint-event probabilities over that scenario.

Internally every index (site, setting, block, outcome) is 0-based.  Files use
1-based indices throughout; conversion happens only in this module.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from itertools import product
from pathlib import Path
from typing import Mapping, Union

from .errors import ValidationError

__all__ = [
    "FiniteReal",
    "IntervalExtremes",
    "OutcomeSpace",
    "AffineMap",
    "Scenario",
    "CorrelationFunctional",
    "ProbabilityFunctional",
    "EventTerm",
    "EventFunctional",
    "Functional",
    "Document",
    "normalize_outcomes",
    "parse_document",
    "load_document",
    "load_scenario",
    "dump_document",
    "scenario_to_dict",
]


def _finite_float(x, path):
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise ValidationError(f"expected a real number, got {x!r}", path)
    x = float(x)
    if not math.isfinite(x):
        raise ValidationError(f"value {x!r} is not finite", path)
    return x


@dataclass(frozen=True)
class FiniteReal:
    """Finite outcome alphabet; values strictly increasing."""

    values: tuple[float, ...]

    kind = "finite"

    def __post_init__(self):
        vals = tuple(_finite_float(v, "values") for v in self.values)
        if not vals:
            raise ValidationError("outcome list is empty")
        if any(b <= a for a, b in zip(vals, vals[1:])):
            raise ValidationError(
                f"outcome values must be strictly increasing, got {list(vals)}")
        object.__setattr__(self, "values", vals)

    @property
    def lo(self) -> float:
        return self.values[0]

    @property
    def hi(self) -> float:
        return self.values[-1]

    @property
    def size(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class IntervalExtremes:
    """Outcomes known only through their extremes (continuous spectra)."""

    lo: float
    hi: float

    kind = "interval"

    def __post_init__(self):
        lo = _finite_float(self.lo, "lo")
        hi = _finite_float(self.hi, "hi")
        if not lo < hi:
            raise ValidationError(f"interval needs lo < hi, got [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)


OutcomeSpace = Union[FiniteReal, IntervalExtremes]


@dataclass(frozen=True)
class AffineMap:
    """``x -> scale * x + shift`` with ``scale > 0``."""

    scale: float
    shift: float

    def __call__(self, x):
        return self.scale * x + self.shift

    def inverse(self, y):
        return (y - self.shift) / self.scale

    @property
    def is_identity(self) -> bool:
        return self.scale == 1.0 and self.shift == 0.0


@dataclass(frozen=True)
class Scenario:
    """Parties, settings per party and outcome spaces per (site, setting).

    ``outcomes[n][s]`` is the outcome space of setting ``s`` at site ``n``.
    """

    settings: tuple[int, ...]
    outcomes: tuple[tuple[OutcomeSpace, ...], ...]

    def __post_init__(self):
        settings = tuple(self.settings)
        if len(settings) < 1:
            raise ValidationError("need at least one party", "parties")
        for n, s in enumerate(settings):
            if isinstance(s, bool) or not isinstance(s, int) or s < 1:
                raise ValidationError(
                    f"settings count must be a positive integer, got {s!r}",
                    f"settings[{n + 1}]")
        outcomes = tuple(tuple(row) for row in self.outcomes)
        if len(outcomes) != len(settings):
            raise ValidationError(
                f"outcomes given for {len(outcomes)} sites, expected "
                f"{len(settings)}", "outcomes")
        for n, row in enumerate(outcomes):
            if len(row) != settings[n]:
                raise ValidationError(
                    f"site {n + 1} has {len(row)} outcome spaces, expected "
                    f"{settings[n]}", f"outcomes.{n + 1}")
            for s, space in enumerate(row):
                if not isinstance(space, (FiniteReal, IntervalExtremes)):
                    raise ValidationError(
                        f"not an outcome space: {space!r}",
                        f"outcomes.{n + 1}.{s + 1}")
        object.__setattr__(self, "settings", settings)
        object.__setattr__(self, "outcomes", outcomes)

    @classmethod
    def uniform(cls, settings, values=(-1.0, 1.0)) -> Scenario:
        """Scenario with the same finite alphabet at every (site, setting)."""
        space = FiniteReal(tuple(values))
        return cls(tuple(settings), tuple((space,) * s for s in settings))

    @property
    def num_parties(self) -> int:
        return len(self.settings)

    @property
    def dimension(self) -> int:
        """Total number of (site, setting) pairs, ``S_1 + ... + S_N``."""
        return sum(self.settings)

    def space(self, site: int, setting: int) -> OutcomeSpace:
        return self.outcomes[site][setting]

    def coordinates(self):
        """All (site, setting) pairs, site-major."""
        return [(n, s) for n, S in enumerate(self.settings) for s in range(S)]

    @property
    def is_finite(self) -> bool:
        return all(isinstance(sp, FiniteReal) for row in self.outcomes
                   for sp in row)

    @property
    def is_normalized(self) -> bool:
        return all(sp.lo == -1.0 and sp.hi == 1.0 for row in self.outcomes
                   for sp in row)

    def outcome_counts(self) -> tuple[tuple[int, ...], ...]:
        if not self.is_finite:
            raise ValidationError("scenario has interval outcome spaces; "
                                  "a finite alphabet is required here")
        return tuple(tuple(sp.size for sp in row) for row in self.outcomes)

    def setting_tuples(self):
        """All joint setting tuples in lexicographic order."""
        return list(product(*(range(S) for S in self.settings)))


def normalize_outcomes(scenario: Scenario):
    """Map every outcome space affinely onto one with min -1 and max +1.

    Returns ``(normalized_scenario, maps)`` with ``maps[n][s]`` the
    :class:`AffineMap` applied at (n, s).  Extremes land exactly on -1 and
    +1; spaces that are already normalized get the identity map.
    """
    new_rows, maps = [], []
    for n, row in enumerate(scenario.outcomes):
        new_row, map_row = [], []
        for s, space in enumerate(row):
            lo, hi = space.lo, space.hi
            if isinstance(space, FiniteReal) and space.size < 2:
                raise ValidationError(
                    "a single outcome value cannot be mapped onto {-1, +1}",
                    f"outcomes.{n + 1}.{s + 1}")
            if lo == -1.0 and hi == 1.0:
                new_row.append(space)
                map_row.append(AffineMap(1.0, 0.0))
                continue
            width = hi - lo
            amap = AffineMap(2.0 / width, -(hi + lo) / width)
            if isinstance(space, IntervalExtremes):
                new_row.append(IntervalExtremes(-1.0, 1.0))
            else:
                inner = [min(1.0, max(-1.0, amap(v)))
                         for v in space.values[1:-1]]
                mapped = (-1.0, *inner, 1.0)
                if any(b <= a for a, b in zip(mapped, mapped[1:])):
                    raise ValidationError(
                        "outcome values too close to stay distinct after "
                        "mapping onto [-1, 1]", f"outcomes.{n + 1}.{s + 1}")
                new_row.append(FiniteReal(mapped))
            map_row.append(amap)
        new_rows.append(tuple(new_row))
        maps.append(tuple(map_row))
    return Scenario(scenario.settings, tuple(new_rows)), tuple(maps)


# ---------------------------------------------------------------------------
# Functionals
# ---------------------------------------------------------------------------

def _check_site_setting(scenario, site, setting, path):
    if not 0 <= site < scenario.num_parties:
        raise ValidationError(f"site {site + 1} out of range", path)
    if not 0 <= setting < scenario.settings[site]:
        raise ValidationError(
            f"setting {setting + 1} out of range at site {site + 1}", path)


@dataclass(frozen=True)
class CorrelationFunctional:
    """Coefficients on correlation functions of site subsets.

    ``terms`` maps a key ``((n_1, s_1), ..., (n_M, s_M))`` with strictly
    increasing sites to the real coefficient of
    ``<lambda_{n_1}^{(s_1)} ... lambda_{n_M}^{(s_M)}>``.
    """

    scenario: Scenario
    terms: Mapping[tuple[tuple[int, int], ...], float] = field(
        default_factory=dict)
    name: str | None = None

    def __post_init__(self):
        clean = {}
        for i, (key, gamma) in enumerate(dict(self.terms).items()):
            path = f"terms[{i}]"
            key = tuple((int(n), int(s)) for n, s in key)
            if not key:
                raise ValidationError("empty site subset", path)
            sites = [n for n, _ in key]
            if any(b <= a for a, b in zip(sites, sites[1:])):
                raise ValidationError(
                    "sites must be strictly increasing", path)
            for n, s in key:
                _check_site_setting(self.scenario, n, s, path)
            clean[key] = _finite_float(gamma, path + ".gamma")
        object.__setattr__(self, "terms", clean)

    @property
    def is_full(self) -> bool:
        N = self.scenario.num_parties
        return all(len(k) == N for k in self.terms)

    def __add__(self, other: CorrelationFunctional) -> CorrelationFunctional:
        if other.scenario != self.scenario:
            raise ValidationError("cannot add functionals on different "
                                  "scenarios")
        terms = dict(self.terms)
        for k, g in other.terms.items():
            terms[k] = terms.get(k, 0.0) + g
        return CorrelationFunctional(self.scenario, terms)


@dataclass(frozen=True)
class ProbabilityFunctional:
    """Coefficients on probabilities of product events.

    ``blocks[n]`` is Q_n, the number of disjoint events per setting at site
    n.  ``events[(n, s, q)]`` is the set of outcome indices forming event q
    of setting s at site n.  ``terms`` maps ``((n_1, s_1, q_1), ...)`` with
    strictly increasing sites to the coefficient of
    ``P(D_{n_1}^{(s_1,q_1)} x ... x D_{n_M}^{(s_M,q_M)})``.
    """

    scenario: Scenario
    blocks: tuple[int, ...]
    events: Mapping[tuple[int, int, int], frozenset]
    terms: Mapping[tuple[tuple[int, int, int], ...], float] = field(
        default_factory=dict)
    name: str | None = None

    def __post_init__(self):
        sc = self.scenario
        if not sc.is_finite:
            raise ValidationError("probability functionals need finite "
                                  "outcome alphabets", "outcomes")
        blocks = tuple(int(q) for q in self.blocks)
        if len(blocks) != sc.num_parties or any(q < 1 for q in blocks):
            raise ValidationError(
                f"need one block count >= 1 per site, got {list(blocks)}",
                "blocks")
        events = {}
        for (n, s, q), idx in dict(self.events).items():
            events[(int(n), int(s), int(q))] = frozenset(int(i) for i in idx)
        for n, S in enumerate(sc.settings):
            for s in range(S):
                size = sc.outcomes[n][s].size
                seen = set()
                for q in range(blocks[n]):
                    path = f"events.{n + 1}.{s + 1}.{q + 1}"
                    ev = events.get((n, s, q))
                    if ev is None:
                        raise ValidationError("event missing", path)
                    if not ev:
                        raise ValidationError("event is empty", path)
                    bad = [i + 1 for i in ev if not 0 <= i < size]
                    if bad:
                        raise ValidationError(
                            f"outcome indices {sorted(bad)} out of range "
                            f"1..{size}", path)
                    if seen & ev:
                        raise ValidationError(
                            "events of one setting must be disjoint", path)
                    seen |= ev
                if len(seen) == size:
                    raise ValidationError(
                        "union of the events must be a proper subset of "
                        "the outcome alphabet", f"events.{n + 1}.{s + 1}")
        extra = [k for k in events
                 if not (0 <= k[0] < sc.num_parties
                         and 0 <= k[1] < sc.settings[k[0]]
                         and 0 <= k[2] < blocks[k[0]])]
        if extra:
            n, s, q = extra[0]
            raise ValidationError("event defined outside the block structure",
                                  f"events.{n + 1}.{s + 1}.{q + 1}")
        clean = {}
        for i, (key, gamma) in enumerate(dict(self.terms).items()):
            path = f"terms[{i}]"
            key = tuple((int(n), int(s), int(q)) for n, s, q in key)
            if not key:
                raise ValidationError("empty site subset", path)
            sites = [n for n, _, _ in key]
            if any(b <= a for a, b in zip(sites, sites[1:])):
                raise ValidationError("sites must be strictly increasing",
                                      path)
            for n, s, q in key:
                _check_site_setting(sc, n, s, path)
                if not 0 <= q < blocks[n]:
                    raise ValidationError(
                        f"block {q + 1} out of range 1..{blocks[n]}", path)
            clean[key] = _finite_float(gamma, path + ".gamma")
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "events", events)
        object.__setattr__(self, "terms", clean)

    def local_dimension(self, site: int) -> int:
        """Length of the 0/1 vector for one site, ``S_n * Q_n``."""
        return self.scenario.settings[site] * self.blocks[site]


@dataclass(frozen=True)
class EventTerm:
    """``gamma * P_s(D)`` with D an explicit set of outcome-index tuples."""

    settings: tuple[int, ...]
    outcomes: frozenset
    gamma: float

    def __post_init__(self):
        object.__setattr__(self, "settings", tuple(int(s) for s in
                                                   self.settings))
        object.__setattr__(self, "outcomes", frozenset(
            tuple(int(i) for i in t) for t in self.outcomes))
        object.__setattr__(self, "gamma", _finite_float(self.gamma, "gamma"))


@dataclass(frozen=True)
class EventFunctional:
    """Coefficients on probabilities of arbitrary joint events."""

    scenario: Scenario
    terms: tuple[EventTerm, ...] = ()
    name: str | None = None

    def __post_init__(self):
        sc = self.scenario
        if not sc.is_finite:
            raise ValidationError("event functionals need finite outcome "
                                  "alphabets", "outcomes")
        terms = tuple(self.terms)
        N = sc.num_parties
        for i, t in enumerate(terms):
            path = f"terms[{i}]"
            if len(t.settings) != N:
                raise ValidationError(
                    f"need one setting per site ({N}), got {len(t.settings)}",
                    path)
            for n, s in enumerate(t.settings):
                _check_site_setting(sc, n, s, path)
            sizes = [sc.outcomes[n][s].size for n, s in enumerate(t.settings)]
            for tup in t.outcomes:
                if len(tup) != N or any(not 0 <= o < k
                                        for o, k in zip(tup, sizes)):
                    raise ValidationError(
                        f"outcome tuple {[o + 1 for o in tup]} outside the "
                        f"grid {sizes}", path + ".event")
        object.__setattr__(self, "terms", terms)


Functional = Union[CorrelationFunctional, ProbabilityFunctional,
                   EventFunctional]


@dataclass(frozen=True)
class Document:
    """A scenario plus zero or more functionals, as stored in one file.

    ``published[i]`` holds optional ``(min, max)`` reference bounds for
    functional ``i`` (None where not stated).
    """

    scenario: Scenario
    functionals: tuple = ()
    published: tuple = ()

    def __post_init__(self):
        funcs = tuple(self.functionals)
        pub = tuple(self.published) or tuple((None, None) for _ in funcs)
        if len(pub) != len(funcs):
            raise ValidationError("published bounds do not match the "
                                  "functionals")
        object.__setattr__(self, "functionals", funcs)
        object.__setattr__(self, "published", pub)


# ---------------------------------------------------------------------------
# JSON document format
# ---------------------------------------------------------------------------

def _require(obj, key, path):
    if not isinstance(obj, dict) or key not in obj:
        raise ValidationError(f"missing field {key!r}", path)
    return obj[key]


def _int_list(x, path):
    if not isinstance(x, list) or any(
            isinstance(v, bool) or not isinstance(v, int) for v in x):
        raise ValidationError(f"expected a list of integers, got {x!r}", path)
    return x


def _parse_space(obj, path):
    if not isinstance(obj, dict):
        raise ValidationError("outcome space must be an object", path)
    kind = obj.get("kind", "finite")
    try:
        if kind == "finite":
            values = _require(obj, "values", path)
            if not isinstance(values, list):
                raise ValidationError("values must be a list", path)
            return FiniteReal(tuple(values))
        if kind == "interval":
            return IntervalExtremes(_require(obj, "lo", path),
                                    _require(obj, "hi", path))
    except ValidationError as exc:
        raise ValidationError(exc.message, path) from None
    raise ValidationError(f"unknown outcome kind {kind!r}", path)


def _parse_scenario(doc) -> Scenario:
    parties = _require(doc, "parties", "")
    if isinstance(parties, bool) or not isinstance(parties, int) or parties < 1:
        raise ValidationError(f"parties must be a positive integer, got "
                              f"{parties!r}", "parties")
    settings = _int_list(_require(doc, "settings", ""), "settings")
    if len(settings) != parties:
        raise ValidationError(f"{len(settings)} settings counts for "
                              f"{parties} parties", "settings")
    for n, S in enumerate(settings):
        if S < 1:
            raise ValidationError(f"settings count must be >= 1, got {S}",
                                  f"settings[{n + 1}]")
    raw = _require(doc, "outcomes", "")
    if not isinstance(raw, dict):
        raise ValidationError("outcomes must be an object", "outcomes")
    default = raw.get("*")
    known = {f"{n + 1}.{s + 1}" for n, S in enumerate(settings)
             for s in range(S)} | {"*"}
    for key in raw:
        if key not in known:
            raise ValidationError("unknown (site, setting) key",
                                  f"outcomes.{key}")
    rows = []
    for n, S in enumerate(settings):
        row = []
        for s in range(S):
            key = f"{n + 1}.{s + 1}"
            obj = raw.get(key, default)
            if obj is None:
                raise ValidationError("outcome space missing",
                                      f"outcomes.{key}")
            row.append(_parse_space(obj, f"outcomes.{key}"))
        rows.append(tuple(row))
    return Scenario(tuple(settings), tuple(rows))


def _parse_events(doc, scenario):
    raw = doc.get("events", {})
    if not isinstance(raw, dict):
        raise ValidationError("events must be an object", "events")
    events, blocks = {}, [0] * scenario.num_parties
    for key, idx in raw.items():
        path = f"events.{key}"
        parts = key.split(".")
        try:
            n, s, q = (int(p) - 1 for p in parts)
        except ValueError:
            raise ValidationError("key must be <site>.<setting>.<block>",
                                  path) from None
        if len(parts) != 3 or min(n, s, q) < 0:
            raise ValidationError("key must be <site>.<setting>.<block>", path)
        if n >= scenario.num_parties:
            raise ValidationError(f"site {n + 1} out of range", path)
        events[(n, s, q)] = frozenset(i - 1 for i in _int_list(idx, path))
        blocks[n] = max(blocks[n], q + 1)
    return events, tuple(blocks)


def _gamma(term, path):
    return _finite_float(_require(term, "gamma", path), path + ".gamma")


def _parse_functional(obj, scenario, events, blocks, path):
    if not isinstance(obj, dict):
        raise ValidationError("functional must be an object", path)
    kind = _require(obj, "type", path)
    terms_raw = obj.get("terms", [])
    if not isinstance(terms_raw, list):
        raise ValidationError("terms must be a list", path + ".terms")
    name = obj.get("name")
    try:
        if kind == "correlation":
            terms = {}
            for i, t in enumerate(terms_raw):
                tp = f"{path}.terms[{i}]"
                sites = _int_list(_require(t, "sites", tp), tp + ".sites")
                sets = _int_list(_require(t, "settings", tp), tp + ".settings")
                if len(sites) != len(sets):
                    raise ValidationError("sites and settings differ in "
                                          "length", tp)
                if len(set(sites)) != len(sites):
                    raise ValidationError("repeated site", tp + ".sites")
                key = tuple(sorted((n - 1, s - 1) for n, s in zip(sites, sets)))
                if key in terms:
                    raise ValidationError("duplicate term", tp)
                terms[key] = _gamma(t, tp)
            return CorrelationFunctional(scenario, terms, name)
        if kind == "probability":
            if not events:
                raise ValidationError("probability functional needs a "
                                      "top-level 'events' object", path)
            terms = {}
            for i, t in enumerate(terms_raw):
                tp = f"{path}.terms[{i}]"
                sites = _int_list(_require(t, "sites", tp), tp + ".sites")
                sets = _int_list(_require(t, "settings", tp), tp + ".settings")
                blks = _int_list(_require(t, "blocks", tp), tp + ".blocks")
                if not len(sites) == len(sets) == len(blks):
                    raise ValidationError("sites, settings and blocks differ "
                                          "in length", tp)
                if len(set(sites)) != len(sites):
                    raise ValidationError("repeated site", tp + ".sites")
                key = tuple(sorted((n - 1, s - 1, q - 1)
                                   for n, s, q in zip(sites, sets, blks)))
                if key in terms:
                    raise ValidationError("duplicate term", tp)
                terms[key] = _gamma(t, tp)
            return ProbabilityFunctional(scenario, blocks, events, terms, name)
        if kind == "event":
            terms = []
            for i, t in enumerate(terms_raw):
                tp = f"{path}.terms[{i}]"
                sets = _int_list(_require(t, "settings", tp), tp + ".settings")
                ev = _require(t, "event", tp)
                if not isinstance(ev, list):
                    raise ValidationError("event must be a list of outcome "
                                          "tuples", tp + ".event")
                tuples = [tuple(o - 1 for o in _int_list(e, tp + ".event"))
                          for e in ev]
                terms.append(EventTerm(tuple(s - 1 for s in sets),
                                       frozenset(tuples), _gamma(t, tp)))
            return EventFunctional(scenario, tuple(terms), name)
    except ValidationError as exc:
        if exc.path and (exc.path.startswith(path)
                         or exc.path.startswith("events")):
            raise
        where = f"{path}.{exc.path}" if exc.path else path
        raise ValidationError(exc.message, where) from None
    raise ValidationError(f"unknown functional type {kind!r}", path + ".type")


def _published(obj, key, path):
    v = obj.get(key)
    return None if v is None else _finite_float(v, f"{path}.{key}")


def parse_document(doc) -> Document:
    """Validate a decoded JSON document and build a :class:`Document`."""
    if not isinstance(doc, dict):
        raise ValidationError("top level must be an object")
    scenario = _parse_scenario(doc)
    events, blocks = _parse_events(doc, scenario)
    raw = doc.get("functionals", [])
    if not isinstance(raw, list):
        raise ValidationError("functionals must be a list", "functionals")
    funcs, pub = [], []
    for i, obj in enumerate(raw):
        path = f"functionals[{i}]"
        funcs.append(_parse_functional(obj, scenario, events, blocks, path))
        pub.append((_published(obj, "published_min", path),
                    _published(obj, "published_max", path)))
    return Document(scenario, tuple(funcs), tuple(pub))


def _read_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"malformed JSON: {exc}", str(path)) from None


def load_document(path) -> Document:
    return parse_document(_read_json(Path(path)))


def load_scenario(path) -> Scenario:
    """Read and validate the scenario part of a document file."""
    return _parse_scenario(_read_json(Path(path)))


def _num(x):
    x = float(x)
    return int(x) if x.is_integer() and abs(x) < 2 ** 53 else x


def scenario_to_dict(scenario: Scenario) -> dict:
    out = {}
    for n, row in enumerate(scenario.outcomes):
        for s, sp in enumerate(row):
            key = f"{n + 1}.{s + 1}"
            if isinstance(sp, FiniteReal):
                out[key] = {"kind": "finite",
                            "values": [_num(v) for v in sp.values]}
            else:
                out[key] = {"kind": "interval", "lo": _num(sp.lo),
                            "hi": _num(sp.hi)}
    return {"parties": scenario.num_parties,
            "settings": list(scenario.settings), "outcomes": out}


def _functional_to_dict(f) -> dict:
    if isinstance(f, CorrelationFunctional):
        terms = [{"sites": [n + 1 for n, _ in k],
                  "settings": [s + 1 for _, s in k], "gamma": _num(g)}
                 for k, g in f.terms.items()]
        obj = {"type": "correlation"}
    elif isinstance(f, ProbabilityFunctional):
        terms = [{"sites": [n + 1 for n, _, _ in k],
                  "settings": [s + 1 for _, s, _ in k],
                  "blocks": [q + 1 for _, _, q in k], "gamma": _num(g)}
                 for k, g in f.terms.items()]
        obj = {"type": "probability"}
    else:
        terms = [{"settings": [s + 1 for s in t.settings],
                  "event": [[o + 1 for o in tup] for tup in sorted(t.outcomes)],
                  "gamma": _num(t.gamma)} for t in f.terms]
        obj = {"type": "event"}
    if f.name is not None:
        obj["name"] = f.name
    obj["terms"] = terms
    return obj


def dump_document(doc: Document) -> dict:
    """Inverse of :func:`parse_document`."""
    out = scenario_to_dict(doc.scenario)
    prob = [f for f in doc.functionals if isinstance(f, ProbabilityFunctional)]
    if prob:
        first = prob[0]
        if any(f.events != first.events or f.blocks != first.blocks
               for f in prob[1:]):
            raise ValidationError("probability functionals in one document "
                                  "must share their events")
        out["events"] = {
            f"{n + 1}.{s + 1}.{q + 1}": sorted(i + 1 for i in idx)
            for (n, s, q), idx in sorted(first.events.items())}
    funcs = []
    for f, (lo, hi) in zip(doc.functionals, doc.published):
        obj = _functional_to_dict(f)
        if lo is not None:
            obj["published_min"] = _num(lo)
        if hi is not None:
            obj["published_max"] = _num(hi)
        funcs.append(obj)
    out["functionals"] = funcs
    return out

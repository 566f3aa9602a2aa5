"""Exact LHV bounds by enumeration over extreme assignments.

Correlation functionals are multilinear in the per-site vectors
``eta_n in [-1, 1]^{S_n}``, so their extremes over the hypercube sit on its
``2^d`` vertices.  Probability functionals over product events are optimized
over the 0/1 vectors with at most one active block per setting, and general
event functionals over every joint outcome assignment of the finite grid.

All three enumerations share one scan driver: the index space is cut into
fixed contiguous chunks, each chunk is evaluated with a fixed per-element
operation order, and the per-chunk summaries are merged with a deterministic
tie-break.  Results therefore do not depend on the number of worker threads.

Tie-break: among all assignments within ``TIE_TOL`` of the optimum the
lexicographically smallest wins (site-major, setting-major, -1 < +1,
0 < 1, lower outcome index first).
"""
from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import product

import numpy as np

from .errors import CapExceeded, ValidationError
from .scenario import (CorrelationFunctional, EventFunctional,
                       ProbabilityFunctional, _num)

__all__ = [
    "DEFAULT_CAP",
    "TIE_TOL",
    "AUDIT_TOL",
    "BoundReport",
    "AuditRecord",
    "vertex_points",
    "xi_points",
    "evaluate_correlation_form",
    "evaluate_correlation_points",
    "evaluate_probability_form",
    "evaluate_event_objective",
    "vertex_values",
    "lhv_bounds_correlation",
    "lhv_bounds_full_correlation",
    "lhv_bounds_probability",
    "lhv_bounds_events",
    "lhv_bounds",
    "face_count",
    "distinct_face_count",
    "lemma1_audit",
]

DEFAULT_CAP = 2 ** 30
TIE_TOL = 1e-12
AUDIT_TOL = 1e-9
CHUNK = 1 << 18
# dense coefficient tensors beyond this many entries are refused
COEFF_CAP = 1 << 26


@dataclass(frozen=True)
class BoundReport:
    """Extremes of a functional's objective with lexicographic witnesses.

    ``argmin``/``argmax`` hold one tuple per site: the ±1 vertex vector
    (kind ``"vertex"``), the 0/1 block vector (``"xi"``) or the 0-based
    outcome index per setting (``"grid"``).
    """

    min: float
    max: float
    argmin: tuple
    argmax: tuple
    vertices_scanned: int
    elapsed: float
    kind: str = "vertex"

    def to_dict(self, timing=True) -> dict:
        shift = 1 if self.kind == "grid" else 0

        def fmt(a):
            return [[int(x) + shift for x in site] for site in a]

        return {
            "min": _num(self.min),
            "max": _num(self.max),
            "argmin": fmt(self.argmin),
            "argmax": fmt(self.argmax),
            "vertices_scanned": int(self.vertices_scanned),
            "elapsed_ms": int(round(self.elapsed * 1000)) if timing else None,
        }


# ---------------------------------------------------------------------------
# Per-site candidate points
# ---------------------------------------------------------------------------

def vertex_points(S: int) -> np.ndarray:
    """All of ``{-1, +1}^S`` as rows in lexicographic order."""
    idx = np.arange(2 ** S)[:, None]
    bits = (idx >> np.arange(S - 1, -1, -1)) & 1
    return (2 * bits - 1).astype(float)


def xi_points(S: int, Q: int) -> np.ndarray:
    """0/1 vectors of length ``S*Q`` with at most one 1 per setting block.

    Rows are in lexicographic order of the flattened (setting, block) vector.
    """
    choices = np.zeros((Q + 1, Q))
    # lexicographic order of one block: 0...0 < 0...01 < ... < 10...0
    for r in range(1, Q + 1):
        choices[r, Q - r] = 1.0
    rows = [np.concatenate(c) for c in product(choices, repeat=S)]
    return np.array(rows).reshape(len(rows), S * Q)


# ---------------------------------------------------------------------------
# Scan machinery
# ---------------------------------------------------------------------------

def _chunks(sizes, chunk=CHUNK):
    """Split the mixed-radix index space into contiguous per-site boxes.

    Yields ``(offset, selections)`` with one slice per axis.  The split only
    depends on ``sizes`` and ``chunk``.
    """
    N = len(sizes)
    k = N - 1
    while k > 0 and math.prod(sizes[k:]) <= chunk:
        k -= 1
    tail = math.prod(sizes[k + 1:])
    step = max(1, chunk // tail)
    for prefix in product(*(range(r) for r in sizes[:k])):
        for a in range(0, sizes[k], step):
            b = min(a + step, sizes[k])
            offset = 0
            for p, r in zip(prefix + (a,), sizes[:k + 1]):
                offset = offset * r + p
            sel = ([slice(p, p + 1) for p in prefix] + [slice(a, b)]
                   + [slice(0, r) for r in sizes[k + 1:]])
            yield offset * tail, sel


def _unravel(index, sizes):
    out = []
    for r in reversed(sizes):
        index, rem = divmod(index, r)
        out.append(rem)
    return tuple(reversed(out))


def _summarize(values, offset):
    """Chunk extremes plus the running-record candidates near each extreme.

    A record is an index whose value beats every earlier candidate; the
    smallest index above any threshold within ``TIE_TOL`` of the chunk
    extreme is always a record.
    """
    mx = float(values.max())
    mn = float(values.min())
    out = []
    for best, sign in ((mx, 1.0), (mn, -1.0)):
        idx = np.flatnonzero(sign * values >= sign * best - TIE_TOL)
        cv = sign * values[idx]
        run = np.maximum.accumulate(cv)
        keep = np.ones(len(idx), dtype=bool)
        keep[1:] = cv[1:] > run[:-1]
        out.append([(offset + int(i), float(sign * v))
                    for i, v in zip(idx[keep], cv[keep])])
    return mx, out[0], mn, out[1], len(values)


@dataclass(frozen=True)
class _Scan:
    max: float
    argmax: int
    min: float
    argmin: int
    scanned: int


def _run_scan(evaluate, sizes, threads=1, chunk=CHUNK):
    chunks = list(_chunks(sizes, chunk))

    def work(ch):
        offset, sel = ch
        return _summarize(evaluate(sel), offset)

    if threads and threads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            parts = list(ex.map(work, chunks))
    else:
        parts = [work(ch) for ch in chunks]

    top = max(p[0] for p in parts)
    bottom = min(p[2] for p in parts)
    argmax = next(i for p in parts for i, v in p[1] if v >= top - TIE_TOL)
    argmin = next(i for p in parts for i, v in p[3] if v <= bottom + TIE_TOL)
    vmax = next(v for p in parts for i, v in p[1] if i == argmax)
    vmin = next(v for p in parts for i, v in p[3] if i == argmin)
    return _Scan(vmax, argmax, vmin, argmin, sum(p[4] for p in parts))


class _Contraction:
    """Evaluate a multilinear form on a product of per-site point sets.

    ``coeffs`` is dense with shape ``(c_1 + 1, ..., c_N + 1)``; index 0 on an
    axis means the site is absent from the term.  ``points[n]`` has shape
    ``(r_n, c_n)``.  The value at one combination of rows is accumulated
    site by site in a fixed column order, so it is bit-identical however the
    rows are batched.
    """

    def __init__(self, points, coeffs):
        self.aug = [np.hstack([np.ones((len(p), 1)), p]) for p in points]
        self.coeffs = coeffs
        self.active = []
        for n in range(coeffs.ndim):
            other = tuple(a for a in range(coeffs.ndim) if a != n)
            nz = np.any(coeffs != 0, axis=other) if other else coeffs != 0
            self.active.append([int(c) for c in np.flatnonzero(nz)])

    @property
    def sizes(self):
        return [len(p) for p in self.aug]

    def __call__(self, sel):
        t = self.coeffs[None, ...]
        for n, p in enumerate(self.aug):
            p = p[sel[n]]
            R, K, rest = t.shape[0], t.shape[1], t.shape[2:]
            t2 = t.reshape(R, K, -1)
            cols = self.active[n]
            if not cols:
                acc = np.zeros((R, len(p), t2.shape[2]))
            else:
                c0 = cols[0]
                acc = p[None, :, c0, None] * t2[:, None, c0, :]
                for c in cols[1:]:
                    acc += p[None, :, c, None] * t2[:, None, c, :]
            t = acc.reshape(R * len(p), *rest)
        # +0.0 turns any -0.0 into 0.0
        return t.reshape(-1) + 0.0


def _check_cap(what, count, cap):
    if count > cap:
        raise CapExceeded(what, count, cap)


def _correlation_coeffs(f: CorrelationFunctional) -> np.ndarray:
    shape = tuple(S + 1 for S in f.scenario.settings)
    _check_cap("coefficient tensor entries", math.prod(shape), COEFF_CAP)
    coeffs = np.zeros(shape)
    for key, g in f.terms.items():
        idx = [0] * len(shape)
        for n, s in key:
            idx[n] = s + 1
        coeffs[tuple(idx)] = g
    return coeffs


def _probability_coeffs(f: ProbabilityFunctional) -> np.ndarray:
    sc = f.scenario
    shape = tuple(f.local_dimension(n) + 1 for n in range(sc.num_parties))
    _check_cap("coefficient tensor entries", math.prod(shape), COEFF_CAP)
    coeffs = np.zeros(shape)
    for key, g in f.terms.items():
        idx = [0] * len(shape)
        for n, s, q in key:
            idx[n] = 1 + s * f.blocks[n] + q
        coeffs[tuple(idx)] = g
    return coeffs


def _correlation_engine(f, points=None):
    if points is None:
        points = [vertex_points(S) for S in f.scenario.settings]
    return _Contraction(points, _correlation_coeffs(f))


def _probability_engine(f):
    points = [xi_points(S, Q) for S, Q in zip(f.scenario.settings, f.blocks)]
    return _Contraction(points, _probability_coeffs(f))


def _require_normalized(f):
    if not f.scenario.is_normalized:
        raise ValidationError(
            "outcome spaces must have min -1 and max +1; apply "
            "normalize_outcomes first", "outcomes")


# ---------------------------------------------------------------------------
# Point evaluation
# ---------------------------------------------------------------------------

def _single_rows(vectors, widths, what):
    if len(vectors) != len(widths):
        raise ValidationError(f"{what}: expected {len(widths)} site vectors, "
                              f"got {len(vectors)}")
    rows = []
    for n, (v, w) in enumerate(zip(vectors, widths)):
        v = np.asarray(v, dtype=float).reshape(-1)
        if len(v) != w:
            raise ValidationError(f"{what}: site {n + 1} vector has length "
                                  f"{len(v)}, expected {w}")
        rows.append(v[None, :])
    return rows


def evaluate_correlation_form(f: CorrelationFunctional, eta) -> float:
    """``sum gamma * prod_j eta_{n_j}^{(s_j)}`` at one point.

    ``eta`` holds one length-``S_n`` vector per site.  Vertex values match
    the enumeration bit for bit.
    """
    rows = _single_rows(eta, f.scenario.settings, "correlation form")
    engine = _Contraction(rows, _correlation_coeffs(f))
    return float(engine([slice(0, 1)] * len(rows))[0])


def evaluate_correlation_points(f: CorrelationFunctional, etas) -> np.ndarray:
    """Vectorized term-by-term evaluation on a batch of points.

    ``etas[n]`` has shape ``(batch, S_n)``.  Used for interior sampling; it
    does not share code with the vertex enumeration.
    """
    batch = len(etas[0])
    out = np.zeros(batch)
    for key, g in f.terms.items():
        prod_ = np.full(batch, g)
        for n, s in key:
            prod_ = prod_ * etas[n][:, s]
        out += prod_
    return out


def evaluate_probability_form(f: ProbabilityFunctional, eta) -> float:
    """Objective of a probability functional at one 0/1 block assignment.

    ``eta[n]`` is the flattened (setting-major, block-minor) vector of site
    n.  Membership in the at-most-one-block set is not checked.
    """
    widths = [f.local_dimension(n) for n in range(f.scenario.num_parties)]
    rows = _single_rows(eta, widths, "probability form")
    engine = _Contraction(rows, _probability_coeffs(f))
    return float(engine([slice(0, 1)] * len(rows))[0])


def _event_masks(f: EventFunctional):
    counts = f.scenario.outcome_counts()
    masks = []
    for t in f.terms:
        shape = tuple(counts[n][s] for n, s in enumerate(t.settings))
        m = np.zeros(shape, dtype=bool)
        if t.outcomes:
            m[tuple(np.array(sorted(t.outcomes)).T)] = True
        masks.append(m)
    return masks


def evaluate_event_objective(f: EventFunctional, assignment) -> float:
    """Objective at one outcome assignment.

    ``assignment[n][s]`` is the 0-based outcome index at site n, setting s.
    """
    counts = f.scenario.outcome_counts()
    if len(assignment) != len(counts) or any(
            len(a) != len(c) for a, c in zip(assignment, counts)):
        raise ValidationError("assignment does not match the scenario shape")
    acc = 0.0
    for t in f.terms:
        tup = tuple(int(assignment[n][s]) for n, s in enumerate(t.settings))
        acc += t.gamma * (1.0 if tup in t.outcomes else 0.0)
    return acc + 0.0


# ---------------------------------------------------------------------------
# Full-table helpers (oracles and tests)
# ---------------------------------------------------------------------------

def vertex_values(f: CorrelationFunctional, method="tensor") -> np.ndarray:
    """Objective at every vertex, indexed like the enumeration.

    ``method`` is ``"tensor"`` (the enumeration kernel), ``"naive"`` (one
    term-by-term sum per vertex) or ``"gray"`` (Gray-code walk updating the
    sum when one coordinate flips).  Meant for ``d`` up to about 20.
    """
    settings = f.scenario.settings
    d = sum(settings)
    if method == "tensor":
        engine = _correlation_engine(f)
        return engine([slice(0, r) for r in engine.sizes])

    offsets = np.cumsum((0,) + settings)
    terms = [([offsets[n] + s for n, s in key], g) for key, g in f.terms.items()]

    def direct(eta):
        acc = 0.0
        for coords, g in terms:
            p = g
            for c in coords:
                p *= eta[c]
            acc += p
        return acc

    out = np.empty(2 ** d)
    if method == "naive":
        for i in range(2 ** d):
            eta = [1.0 if (i >> (d - 1 - c)) & 1 else -1.0 for c in range(d)]
            out[i] = direct(eta)
        return out + 0.0
    if method == "gray":
        touching = [[] for _ in range(d)]
        for coords, g in terms:
            for c in coords:
                touching[c].append((coords, g))
        eta = [-1.0] * d
        value = direct(eta)
        out[0] = value
        gray = 0
        for i in range(1, 2 ** d):
            bit = (i & -i).bit_length() - 1
            c = d - 1 - bit
            partial = 0.0
            for coords, g in touching[c]:
                p = g
                for k in coords:
                    p *= eta[k]
                partial += p
            value -= 2.0 * partial
            eta[c] = -eta[c]
            gray ^= 1 << bit
            out[gray] = value
        return out + 0.0
    raise ValueError(f"unknown method {method!r}")


# ---------------------------------------------------------------------------
# Bounds
# ---------------------------------------------------------------------------

def _vertex_assignment(index, settings):
    rows = _unravel(index, [2 ** S for S in settings])
    return tuple(tuple(1 if (r >> (S - 1 - s)) & 1 else -1 for s in range(S))
                 for r, S in zip(rows, settings))


def _xi_assignment(index, settings, blocks):
    sizes = [(Q + 1) ** S for S, Q in zip(settings, blocks)]
    rows = _unravel(index, sizes)
    return tuple(tuple(int(x) for x in xi_points(S, Q)[r])
                 for r, S, Q in zip(rows, settings, blocks))


def _report(scan, decode, t0, kind):
    return BoundReport(scan.min, scan.max, decode(scan.argmin),
                       decode(scan.argmax), scan.scanned,
                       time.perf_counter() - t0, kind)


def _empty_report(f, t0, kind, witness):
    return BoundReport(0.0, 0.0, witness, witness, 0,
                       time.perf_counter() - t0, kind)


def lhv_bounds_correlation(f: CorrelationFunctional, cap=DEFAULT_CAP,
                           threads=1, chunk=CHUNK) -> BoundReport:
    """Min and max of the correlation objective over all hypercube vertices.

    By multilinearity these are also the extremes over ``[-1, 1]^d`` and
    hence the tight LHV bounds for any outcome spaces with extremes -1, +1.
    """
    t0 = time.perf_counter()
    _require_normalized(f)
    settings = f.scenario.settings
    _check_cap("vertex enumeration", 2 ** sum(settings), cap)
    if not f.terms:
        return _empty_report(f, t0, "vertex",
                             tuple((1,) * S for S in settings))
    engine = _correlation_engine(f)
    scan = _run_scan(engine, engine.sizes, threads, chunk)
    return _report(scan, lambda i: _vertex_assignment(i, settings), t0,
                   "vertex")


def lhv_bounds_full_correlation(f: CorrelationFunctional, cap=DEFAULT_CAP,
                                threads=1, chunk=CHUNK) -> BoundReport:
    """Bounds for a functional with only full (all-site) terms.

    Negating one site's vector negates the form, so only vertices with
    ``eta_1^{(1)} = +1`` are enumerated for ``max |F|``; the canonical
    witnesses are then located by an ordered scan that stops early.
    """
    t0 = time.perf_counter()
    _require_normalized(f)
    if not f.is_full:
        raise ValidationError("functional has terms on proper site subsets; "
                              "use lhv_bounds_correlation")
    settings = f.scenario.settings
    _check_cap("vertex enumeration", 2 ** (sum(settings) - 1), cap)
    if not f.terms:
        return _empty_report(f, t0, "vertex",
                             tuple((1,) * S for S in settings))
    points = [vertex_points(S) for S in settings]
    points[0] = points[0][2 ** (settings[0] - 1):]
    half = _Contraction(points, _correlation_coeffs(f))
    scan = _run_scan(half, half.sizes, threads, chunk)
    top = max(scan.max, -scan.min)

    full = _correlation_engine(f)
    argmax = argmin = None
    for offset, sel in _chunks(full.sizes, chunk):
        v = full(sel)
        if argmax is None:
            hit = np.flatnonzero(v >= top - TIE_TOL)
            if len(hit):
                argmax = (offset + int(hit[0]), float(v[hit[0]]))
        if argmin is None:
            hit = np.flatnonzero(v <= -top + TIE_TOL)
            if len(hit):
                argmin = (offset + int(hit[0]), float(v[hit[0]]))
        if argmax is not None and argmin is not None:
            break
    # count the ordered scan up to the later witness, not whole chunks, so
    # the figure does not depend on the chunk size
    scanned = scan.scanned + max(argmax[0], argmin[0]) + 1
    return BoundReport(argmin[1], argmax[1],
                       _vertex_assignment(argmin[0], settings),
                       _vertex_assignment(argmax[0], settings), scanned,
                       time.perf_counter() - t0, "vertex")


def lhv_bounds_probability(f: ProbabilityFunctional, cap=DEFAULT_CAP,
                           threads=1, chunk=CHUNK) -> BoundReport:
    """Min and max over 0/1 block vectors with at most one block per setting."""
    t0 = time.perf_counter()
    settings, blocks = f.scenario.settings, f.blocks
    count = math.prod((Q + 1) ** S for S, Q in zip(settings, blocks))
    _check_cap("block-assignment enumeration", count, cap)
    if not f.terms:
        zero = tuple((0,) * (S * Q) for S, Q in zip(settings, blocks))
        return _empty_report(f, t0, "xi", zero)
    engine = _probability_engine(f)
    scan = _run_scan(engine, engine.sizes, threads, chunk)
    return _report(scan, lambda i: _xi_assignment(i, settings, blocks), t0,
                   "xi")


def lhv_bounds_events(f: EventFunctional, cap=DEFAULT_CAP, threads=1,
                      chunk=CHUNK) -> BoundReport:
    """Inf and sup of the event objective over all joint outcome assignments.

    One outcome is fixed per (site, setting) and shared by every term that
    uses that setting.
    """
    t0 = time.perf_counter()
    counts = f.scenario.outcome_counts()
    sizes = [k for row in counts for k in row]
    _check_cap("outcome-grid enumeration", math.prod(sizes), cap)
    settings = f.scenario.settings

    def decode(index):
        flat = _unravel(index, sizes)
        out, i = [], 0
        for S in settings:
            out.append(tuple(flat[i:i + S]))
            i += S
        return tuple(out)

    if not f.terms:
        return _empty_report(f, t0, "grid", decode(0))
    offsets = np.cumsum((0,) + settings)
    masks = _event_masks(f)
    axes = [[int(offsets[n]) + s for n, s in enumerate(t.settings)]
            for t in f.terms]
    gammas = [t.gamma for t in f.terms]

    def evaluate(sel):
        shape = [len(range(*sl.indices(k))) for sl, k in zip(sel, sizes)]
        acc = np.zeros(shape)
        for m, ax, g in zip(masks, axes, gammas):
            sub = m[tuple(sel[a] for a in ax)]
            bshape = [1] * len(sizes)
            for j, a in enumerate(ax):
                bshape[a] = sub.shape[j]
            acc += g * sub.reshape(bshape)
        return acc.reshape(-1) + 0.0

    scan = _run_scan(evaluate, sizes, threads, chunk)
    return _report(scan, decode, t0, "grid")


def lhv_bounds(f, cap=DEFAULT_CAP, threads=1) -> BoundReport:
    """Dispatch on the functional type."""
    if isinstance(f, CorrelationFunctional):
        if f.is_full and f.terms:
            return lhv_bounds_full_correlation(f, cap, threads)
        return lhv_bounds_correlation(f, cap, threads)
    if isinstance(f, ProbabilityFunctional):
        return lhv_bounds_probability(f, cap, threads)
    if isinstance(f, EventFunctional):
        return lhv_bounds_events(f, cap, threads)
    raise TypeError(f"not a functional: {type(f).__name__}")


# ---------------------------------------------------------------------------
# Hypercube faces
# ---------------------------------------------------------------------------

def _face_args(d, l):
    for name, v in (("d", d), ("l", l)):
        if isinstance(v, bool) or not isinstance(v, int):
            raise TypeError(f"{name} must be an integer")
    if d < 1 or not 0 <= l <= d:
        raise ValueError(f"need d >= 1 and 0 <= l <= d, got d={d}, l={l}")


def _check_width(value, bits):
    if bits is not None and value >= 2 ** (bits - 1):
        raise OverflowError(f"{value} does not fit a signed {bits}-bit integer")
    return value


def face_count(d: int, l: int, bits: int | None = None) -> int:
    """``d! / (d - l)! * 2^(d - l)``, exact.

    This is the l-face count formula as used in the vertex-reduction
    argument; it agrees with the number of distinct l-faces for l = 0, 1
    and counts ordered choices of free coordinates otherwise (see
    :func:`distinct_face_count`).  With ``bits`` set, values that do not
    fit a signed integer of that width raise ``OverflowError``.
    """
    _face_args(d, l)
    value = math.factorial(d) // math.factorial(d - l) * 2 ** (d - l)
    return _check_width(value, bits)


def distinct_face_count(d: int, l: int, bits: int | None = None) -> int:
    """Number of distinct l-dimensional faces of the d-cube, C(d, l) 2^(d-l)."""
    _face_args(d, l)
    return _check_width(math.comb(d, l) * 2 ** (d - l), bits)


# ---------------------------------------------------------------------------
# Interior sampling audit
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AuditRecord:
    bound_min: float
    bound_max: float
    sampled_min: float
    sampled_max: float
    samples: int
    seed: int
    passed: bool
    escape: dict | None = None

    @property
    def margin_max(self) -> float:
        return self.bound_max - self.sampled_max

    @property
    def margin_min(self) -> float:
        return self.sampled_min - self.bound_min

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "samples": self.samples,
            "seed": self.seed,
            "bound_min": _num(self.bound_min),
            "bound_max": _num(self.bound_max),
            "sampled_min": self.sampled_min,
            "sampled_max": self.sampled_max,
            "margin_min": self.margin_min,
            "margin_max": self.margin_max,
            "escape": self.escape,
        }


def lemma1_audit(f: CorrelationFunctional, samples: int, seed: int = 0,
                 batch: int = 20000, bounds: BoundReport | None = None
                 ) -> AuditRecord:
    """Sample interior points of the hypercube and check the vertex bounds.

    Each site vector is drawn uniformly from ``[-1, 1]^{S_n}``.  A sampled
    value more than ``AUDIT_TOL`` outside ``[min, max]`` fails the audit and
    is returned as the escape witness.
    """
    if samples < 1:
        raise ValueError("samples must be positive")
    if bounds is None:
        bounds = lhv_bounds_correlation(f)
    rng = np.random.default_rng(seed)
    settings = f.scenario.settings
    lo, hi = math.inf, -math.inf
    escape = None
    done = 0
    while done < samples:
        b = min(batch, samples - done)
        # one row per sample so the stream does not depend on the batch size
        flat = rng.uniform(-1.0, 1.0, size=(b, sum(settings)))
        etas = np.split(flat, np.cumsum(settings)[:-1], axis=1)
        vals = evaluate_correlation_points(f, etas)
        lo = min(lo, float(vals.min()))
        hi = max(hi, float(vals.max()))
        if escape is None:
            bad = np.flatnonzero((vals > bounds.max + AUDIT_TOL)
                                 | (vals < bounds.min - AUDIT_TOL))
            if len(bad):
                i = int(bad[0])
                escape = {"sample": done + i, "value": float(vals[i]),
                          "point": [e[i].tolist() for e in etas]}
        done += b
    return AuditRecord(bounds.min, bounds.max, lo, hi, samples, seed,
                       escape is None, escape)

"""Dense operator algebra for the two-setting Bell operator.

Operators are plain complex numpy arrays.  Site 1 is the leftmost tensor
factor throughout, so ``tensor(X_1, ..., X_N)`` acts on
``H_1 (x) ... (x) H_N``.

The Bell operator is assembled by the recursion

    B_n = B_{n-1} (x) (X_n1 + X_n2) + Bt_{n-1} (x) (X_n1 - X_n2)
    Bt_n = Bt_{n-1} (x) (X_n2 + X_n1) + B_{n-1} (x) (X_n2 - X_n1)

with ``B_1 = X_11`` and ``Bt_1 = X_12``.  ``Bt`` is ``B`` with the two
observables swapped at every site.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .behaviors import LhvModel
from .errors import CapExceeded, ValidationError
from .scenario import FiniteReal, Scenario

__all__ = [
    "MATRIX_CAP",
    "I2", "SX", "SY", "SZ",
    "tensor",
    "as_observable",
    "as_state",
    "BellOperator",
    "bell_operator",
    "expectation",
    "expansion_expectation",
    "ViolationReport",
    "mk_violation_report",
    "singlet",
    "ghz",
    "maximally_mixed",
    "pure_state",
    "product_state",
    "random_state",
    "random_observable",
    "chsh_observables",
    "spin1_observables",
    "product_state_lhv_model",
    "parse_matrix",
    "parse_quantum_document",
    "matrix_to_dict",
]

MATRIX_CAP = 2 ** 12
HERM_TOL = 1e-12
NORM_TOL = 1e-9
TRACE_TOL = 1e-12
EIG_TOL = 1e-10
IMAG_TOL = 1e-10

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)


def tensor(*ops, cap=MATRIX_CAP) -> np.ndarray:
    """Kronecker product, first factor leftmost."""
    dim = math.prod(np.shape(op)[0] for op in ops)
    if dim > cap:
        raise CapExceeded("operator dimension", dim, cap)
    out = np.ones((1, 1), dtype=complex)
    for op in ops:
        out = np.kron(out, np.asarray(op, dtype=complex))
    return out


def _square(m, what):
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise ValidationError(f"{what} must be a square matrix, got shape "
                              f"{m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValidationError(f"{what} has non-finite entries")
    return m


def as_observable(m, what="observable") -> np.ndarray:
    """Check Hermiticity and operator norm <= 1."""
    m = _square(m, what)
    if np.abs(m - m.conj().T).max() > HERM_TOL:
        raise ValidationError(f"{what} is not Hermitian")
    norm = np.linalg.norm(m, 2)
    if norm > 1 + NORM_TOL:
        raise ValidationError(f"{what} has operator norm {norm:.12g} > 1")
    return m


def as_state(rho, what="state") -> np.ndarray:
    """Check that ``rho`` is a density matrix."""
    rho = _square(rho, what)
    if np.abs(rho - rho.conj().T).max() > HERM_TOL:
        raise ValidationError(f"{what} is not Hermitian")
    tr = np.trace(rho)
    if abs(tr - 1) > TRACE_TOL:
        raise ValidationError(f"{what} has trace {tr.real:.15g}, not 1")
    low = np.linalg.eigvalsh(rho).min()
    if low < -EIG_TOL:
        raise ValidationError(f"{what} has negative eigenvalue {low:.3g}")
    return rho


@dataclass(frozen=True)
class BellOperator:
    num_parties: int
    observables: tuple
    matrix: np.ndarray
    swapped: np.ndarray

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def bell_operator(observables, cap=MATRIX_CAP) -> BellOperator:
    """Assemble ``B_N`` and its swapped partner from per-site pairs."""
    obs = []
    for n, pair in enumerate(observables):
        if len(pair) != 2:
            raise ValidationError(f"site {n + 1} needs exactly two "
                                  "observables")
        x1 = as_observable(pair[0], f"observable {n + 1}.1")
        x2 = as_observable(pair[1], f"observable {n + 1}.2")
        if x1.shape != x2.shape:
            raise ValidationError(f"site {n + 1} observables differ in "
                                  "dimension")
        obs.append((x1, x2))
    if not obs:
        raise ValidationError("need at least one site")
    dim = math.prod(x.shape[0] for x, _ in obs)
    if dim > cap:
        raise CapExceeded("operator dimension", dim, cap)
    B, Bt = obs[0]
    for x1, x2 in obs[1:]:
        B, Bt = (np.kron(B, x1 + x2) + np.kron(Bt, x1 - x2),
                 np.kron(Bt, x2 + x1) + np.kron(B, x2 - x1))
    return BellOperator(len(obs), tuple(obs), B, Bt)


def expectation(rho, B) -> float:
    """``Re tr(rho B)``; a non-negligible imaginary part is an error."""
    M = B.matrix if isinstance(B, BellOperator) else np.asarray(B)
    rho = np.asarray(rho)
    if rho.shape != M.shape:
        raise ValidationError(f"state dimension {rho.shape[0]} does not match "
                              f"operator dimension {M.shape[0]}")
    val = np.einsum("ij,ji->", rho, M)
    if abs(val.imag) > IMAG_TOL:
        raise ValidationError(f"expectation has imaginary part {val.imag:.3g}")
    return float(val.real)


def expansion_expectation(rho, observables, terms) -> float:
    """``sum gamma * tr(rho X_1^(s_1) (x) ... (x) X_N^(s_N))`` over full
    correlation keys ``((0, s_1), ..., (N-1, s_N))``."""
    total = 0.0
    for key, g in terms.items():
        op = tensor(*(observables[n][s] for n, s in key))
        total += g * expectation(rho, op)
    return total


@dataclass(frozen=True)
class ViolationReport:
    value: float
    bound: float
    verdict: str
    margin: float

    def to_dict(self) -> dict:
        return {"value": self.value, "bound": self.bound,
                "verdict": self.verdict, "margin": self.margin}


def mk_violation_report(rho, observables) -> ViolationReport:
    """Compare ``|tr(rho B_N)|`` with the LHV bound ``2^(N-1)``.

    ``margin = |value| - bound``; positive means the LHV bound is violated.
    """
    B = bell_operator(observables)
    rho = as_state(rho)
    value = expectation(rho, B)
    bound = float(2 ** (B.num_parties - 1))
    margin = abs(value) - bound
    verdict = "VIOLATES" if margin > NORM_TOL else "SATISFIES"
    return ViolationReport(value, bound, verdict, margin)


# ---------------------------------------------------------------------------
# States and observables
# ---------------------------------------------------------------------------

def pure_state(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    psi = psi / np.linalg.norm(psi)
    return np.outer(psi, psi.conj())


def singlet() -> np.ndarray:
    return pure_state([0, 1, -1, 0])


def ghz(N: int) -> np.ndarray:
    psi = np.zeros(2 ** N, dtype=complex)
    psi[0] = psi[-1] = 1
    return pure_state(psi)


def maximally_mixed(dim: int) -> np.ndarray:
    return np.eye(dim, dtype=complex) / dim


def product_state(*rhos) -> np.ndarray:
    return tensor(*rhos)


def random_state(dim, rng, rank=None) -> np.ndarray:
    """Random density matrix ``G G^dag / tr`` with complex Gaussian G."""
    rank = rank or dim
    G = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = G @ G.conj().T
    rho = (rho + rho.conj().T) / 2
    return rho / np.trace(rho).real


def random_observable(dim, rng) -> np.ndarray:
    """Random Hermitian matrix scaled to operator norm in (0, 1]."""
    G = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    H = (G + G.conj().T) / 2
    H = H / np.linalg.norm(H, 2) * rng.uniform(0.5, 1.0)
    return (H + H.conj().T) / 2


def chsh_observables():
    """Coplanar qubit observables reaching ``2 sqrt 2`` on the singlet.

    Site 1 measures ``sz`` and ``sx``; site 2 measures ``-(sz + sx)/sqrt 2``
    and ``-(sz - sx)/sqrt 2``, the sign compensating the singlet's
    anticorrelation.
    """
    r = 1 / math.sqrt(2)
    return [(SZ, SX), (-(SZ + SX) * r, -(SZ - SX) * r)]


def spin1_observables():
    """Qutrit pair with spectrum {-1, 0, 1}: ``Sz`` and ``Sx`` of spin 1."""
    sz = np.diag([1.0, 0.0, -1.0]).astype(complex)
    sx = np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]], dtype=complex)
    return sz, sx / math.sqrt(2)


def product_state_lhv_model(states, observables):
    """Explicit LHV model for a product state.

    Each site answers every setting independently, drawing an eigenvalue
    of ``X_n^(s)`` with its Born probability under ``rho_n``.  Returns
    ``(scenario, model)``; the scenario's alphabet at (n, s) is the
    spectrum of ``X_n^(s)`` joined with {-1, +1} so it is normalized.
    """
    rows, dists = [], []
    for n, (rho, pair) in enumerate(zip(states, observables)):
        rho = as_state(rho, f"state {n + 1}")
        row = []
        for s, X in enumerate(pair):
            X = as_observable(X, f"observable {n + 1}.{s + 1}")
            w, V = np.linalg.eigh(X)
            probs = np.einsum("ik,ij,jk->k", V.conj(), rho, V).real
            w = np.clip(w, -1.0, 1.0)
            alphabet = []
            for v in sorted(set(w.tolist()) | {-1.0, 1.0}):
                if not alphabet or v - alphabet[-1] > NORM_TOL:
                    alphabet.append(v)
            alphabet[0], alphabet[-1] = -1.0, 1.0
            p = np.zeros(len(alphabet))
            for val, pr in zip(w, probs):
                k = int(np.argmin([abs(val - a) for a in alphabet]))
                p[k] += max(pr, 0.0)
            row.append(FiniteReal(tuple(alphabet)))
            dists.append(p / p.sum())
        rows.append(tuple(row))
    sc = Scenario(tuple(len(r) for r in rows), tuple(rows))
    weights = np.ones(())
    for p in dists:
        weights = np.multiply.outer(weights, p)
    return sc, LhvModel(sc, weights)


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------

def parse_matrix(obj, path) -> np.ndarray:
    if not isinstance(obj, dict) or "re" not in obj:
        raise ValidationError("matrix needs 're' (and optionally 'im')", path)
    try:
        re = np.array(obj["re"], dtype=float)
        im = np.array(obj.get("im", np.zeros_like(re)), dtype=float)
    except (TypeError, ValueError):
        raise ValidationError("matrix entries must be numbers", path) from None
    if re.ndim != 2 or re.shape != im.shape or re.shape[0] != re.shape[1]:
        raise ValidationError("'re' and 'im' must be equal square matrices",
                              path)
    if "dim" in obj and obj["dim"] != re.shape[0]:
        raise ValidationError(f"dim {obj['dim']} does not match matrix size "
                              f"{re.shape[0]}", path)
    return re + 1j * im


def parse_quantum_document(doc):
    """``(rho, observables)`` from ``{"state": ..., "observables": ...}``."""
    if not isinstance(doc, dict):
        raise ValidationError("document must be an object")
    for key in ("state", "observables"):
        if key not in doc:
            raise ValidationError("missing", key)
    rho = parse_matrix(doc["state"], "state")
    obs = doc["observables"]
    if not isinstance(obs, list) or not obs:
        raise ValidationError("need a list of per-site pairs", "observables")
    pairs = []
    for n, pair in enumerate(obs):
        if not isinstance(pair, list) or len(pair) != 2:
            raise ValidationError("need exactly two matrices",
                                  f"observables[{n}]")
        pairs.append(tuple(parse_matrix(m, f"observables[{n}][{s}]")
                           for s, m in enumerate(pair)))
    return rho, pairs


def matrix_to_dict(m) -> dict:
    m = np.asarray(m, dtype=complex)
    return {"dim": m.shape[0], "re": m.real.tolist(), "im": m.imag.tolist()}

"""Rebuild a unitary or antiunitary lift from a black-box ray map.

Basis indices are 0-based; index 0 is the distinguished basis vector whose
image fixes the single free global phase. All probe vectors are built in the
standard basis of the input space.

Pipeline for ``dim_in = n``:

* ``n == 1``: one query; the flag is ``Degenerate``.
* ``n >= 2``: basis images from the ``xi(0, a)`` probes, then the ``phi``
  probes decide between ``c = +i`` (linear) and ``c = -i`` (antilinear).
* ``n >= 3``: additionally the ``eta(a, b)`` and ``xi(a, b)`` probes must
  come back with all coefficients equal to +1 after phase fixing.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .hilbert import as_vector, basis_vector, default_tol, format_complex, parse_complex
from .oracles import Flag, RayMapOracle
from .rays import ray_from_vector

TOL_CLASS = 1e-6
# the chain pair set stays exhaustive up to this input dimension
EXHAUSTIVE_PAIRS_MAX_DIM = 8

SQRT2 = math.sqrt(2.0)
SQRT3 = math.sqrt(3.0)


class PhaseUndeterminedError(ValueError):
    """The reference is (numerically) orthogonal to the target."""


class PhaseAlgebraError(ValueError):
    """A unit-modulus coefficient is not near any admissible solution."""


class ProbeError(ValueError):
    """A probe reply violated a constraint every ray isometry satisfies.

    Attributes carry the counterexample: probe ``kind``, basis ``indices``,
    the ``measured`` quantity and what was ``expected``.
    """

    def __init__(self, message: str, *, kind: str, indices: tuple, measured, expected):
        self.kind = kind
        self.indices = tuple(indices)
        self.measured = measured
        self.expected = expected
        self.reason = message
        super().__init__(
            f"{message} [probe {kind}{self.indices}: measured {measured!r}, expected {expected!r}]"
        )


# --- probe vectors -----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ProbeVector:
    kind: str
    indices: tuple
    vector: np.ndarray

    @property
    def label(self) -> str:
        return f"{self.kind}{self.indices}"


def _distinct(*idx: int) -> None:
    if len(set(idx)) != len(idx):
        raise ValueError(f"probe indices must be distinct, got {idx}")


def xi(dim: int, a: int, b: int) -> ProbeVector:
    """``(e_a + e_b) / sqrt(2)``."""
    _distinct(a, b)
    return ProbeVector("Xi", (a, b), (basis_vector(dim, a) + basis_vector(dim, b)) / SQRT2)


def eta(dim: int, a: int, b: int) -> ProbeVector:
    """``(e_0 + e_a + e_b) / sqrt(3)`` for ``0, a, b`` distinct."""
    _distinct(0, a, b)
    v = basis_vector(dim, 0) + basis_vector(dim, a) + basis_vector(dim, b)
    return ProbeVector("Eta", (a, b), v / SQRT3)


def phi(dim: int, a: int, b: int) -> ProbeVector:
    """``(e_a + i e_b) / sqrt(2)``."""
    _distinct(a, b)
    return ProbeVector("Phi", (a, b), (basis_vector(dim, a) + 1j * basis_vector(dim, b)) / SQRT2)


def chain_probe(dim: int, a: int, g: int, b: int) -> ProbeVector:
    """``(e_a + e_g + i e_b) / sqrt(3)``: overlaps ``phi(a, b)`` and
    ``phi(g, b)`` with modulus ``2/sqrt(6)``, which rules out mixing
    classifications across those two probes."""
    _distinct(a, g, b)
    v = basis_vector(dim, a) + basis_vector(dim, g) + 1j * basis_vector(dim, b)
    return ProbeVector("Chain", (a, g, b), v / SQRT3)


# --- phase algebra -----------------------------------------------------------

def unit_circle_solutions(modulus: float) -> list[complex]:
    """All unit-modulus ``c`` with ``|1 + c| == modulus``.

    ``|1 + c|^2 = 2 + 2 Re(c)`` pins ``Re(c)``; the imaginary part follows
    from ``|c| = 1`` up to sign. ``modulus == 2`` gives ``[1]``,
    ``modulus == sqrt(2)`` gives ``[i, -i]``.
    """
    re = (modulus * modulus - 2.0) / 2.0
    if abs(re) > 1.0:
        return []
    im = math.sqrt(max(0.0, 1.0 - re * re))
    if im == 0.0:
        return [complex(re, 0.0)]
    return [complex(re, im), complex(re, -im)]


def deduce_unit_solution(c: complex, modulus: float, tol: float) -> complex:
    """Snap ``c`` to the solution of ``|1 + c| = modulus, |c| = 1`` within
    ``tol``, or raise :class:`PhaseAlgebraError`."""
    sols = unit_circle_solutions(modulus)
    if not sols:
        raise PhaseAlgebraError(f"|1+c| = {modulus} has no unit-modulus solution")
    best = min(sols, key=lambda s: abs(c - s))
    if abs(c - best) > tol:
        raise PhaseAlgebraError(
            f"c = {c:.6g} is {abs(c - best):.3e} from the solution set {sols} of |1+c| = {modulus:.6g}"
        )
    if modulus == 2.0:
        return 1.0 + 0j
    if modulus == SQRT2:
        return 1j if best.imag > 0 else -1j
    return best


def deduce_unity(c: complex, tol: float) -> complex:
    """``|1 + c| = 2`` with ``|c| = 1`` forces ``c = 1``."""
    return deduce_unit_solution(c, 2.0, tol)


def deduce_plus_minus_i(c: complex, tol: float) -> complex:
    """``|1 + c| = |1 + i|`` with ``|c| = 1`` forces ``c = +i`` or ``c = -i``."""
    return deduce_unit_solution(c, SQRT2, tol)


# --- operator and report -----------------------------------------------------

@dataclass(frozen=True, eq=False)
class WignerOperator:
    """Matrix whose column ``a`` is the image of ``e_a``, plus the linearity flag."""

    matrix: np.ndarray
    flag: Flag

    def __post_init__(self):
        m = np.array(self.matrix, dtype=np.complex128)
        if m.ndim != 2:
            raise ValueError("operator matrix must be 2-D")
        if not np.all(np.isfinite(m)):
            raise ValueError("operator matrix has non-finite entries")
        flag = Flag(self.flag)
        if flag is Flag.DEGENERATE and m.shape[1] != 1:
            raise ValueError("Degenerate flag is reserved for dim_in == 1")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "flag", flag)

    @property
    def dim_out(self) -> int:
        return self.matrix.shape[0]

    @property
    def dim_in(self) -> int:
        return self.matrix.shape[1]

    @property
    def columns(self) -> list[np.ndarray]:
        return [self.matrix[:, k] for k in range(self.dim_in)]

    def orthonormality_defect(self) -> float:
        m = self.matrix
        return float(np.max(np.abs(m.conj().T @ m - np.eye(self.dim_in))))


@dataclass
class ReconstructionReport:
    tolerance_used: float
    tol_class: float = TOL_CLASS
    classification_values: dict = field(default_factory=dict)
    xi_residuals: dict = field(default_factory=dict)
    eta_residuals: dict = field(default_factory=dict)
    basis_residuals: dict = field(default_factory=dict)
    pivot_choices: dict = field(default_factory=dict)
    probe_images: list = field(default_factory=list)
    oracle_calls: int = 0
    compat_residual: float = 0.0

    def max_residual(self) -> float:
        vals = [*self.xi_residuals.values(), *self.eta_residuals.values(),
                *self.basis_residuals.values(), self.compat_residual]
        return max(vals, default=0.0)

    def summary_lines(self) -> list[str]:
        cls = self.classification_values
        worst_class = max((min(abs(c - 1j), abs(c + 1j)) for c in cls.values()), default=0.0)
        return [
            f"oracle_calls={self.oracle_calls}",
            f"pairs_classified={len(cls)} max_class_deviation={worst_class:.3e}",
            f"max_basis_residual={max(self.basis_residuals.values(), default=0.0):.3e}",
            f"max_xi_residual={max(self.xi_residuals.values(), default=0.0):.3e}",
            f"max_eta_residual={max(self.eta_residuals.values(), default=0.0):.3e}",
            f"compat_residual={self.compat_residual:.3e}",
        ]


def _record(report, probe: ProbeVector, image: np.ndarray, reference: int | None = None) -> None:
    if report is None:
        return
    report.probe_images.append((probe, image))
    if reference is not None:
        report.pivot_choices[probe.label] = reference


def _query(oracle: RayMapOracle, probe: ProbeVector, report) -> np.ndarray:
    rep = oracle(ray_from_vector(probe.vector)).rep
    _record(report, probe, rep)
    return np.array(rep)


# --- proof steps -------------------------------------------------------------

def fix_phase(target, reference, tol: float = 1e-12) -> np.ndarray:
    """Rotate ``target`` so that ``<reference, target>`` is real and positive."""
    target, reference = as_vector(target), as_vector(reference)
    ov = complex(np.vdot(reference, target))
    if abs(ov) <= tol:
        raise PhaseUndeterminedError(
            f"phase undetermined: orthogonal reference (overlap {abs(ov):.3e} <= {tol:.3e})"
        )
    return target * (ov.conjugate() / abs(ov))


def _aligned_residual(v: np.ndarray, target: np.ndarray) -> float:
    """``min_theta ||e^{i theta} v - target||``."""
    ov = complex(np.vdot(target, v))
    if ov == 0:
        return float(np.linalg.norm(v - target))
    return float(np.linalg.norm(v * (ov.conjugate() / abs(ov)) - target))


def reconstruct_basis_images(oracle: RayMapOracle, tol: float | None = None, report=None):
    """Images of the standard basis with mutually consistent phases.

    Column 0 is the oracle's reply for ``e_0`` as returned. For ``a >= 1`` the
    reply for ``xi(0, a)`` is rotated so its overlap with column 0 is
    ``+1/sqrt(2)``, and column ``a = sqrt(2) * xi_image - column_0``. A direct
    query of ``e_a`` cross-checks each derived column.

    Returns
    -------
    columns : list of ndarray
    xi_images : dict
        ``a -> `` phase-fixed image of ``xi(0, a)``.
    """
    n = oracle.dim_in
    if n < 2:
        raise ValueError("basis reconstruction needs dim_in >= 2")
    if tol is None:
        tol = default_tol(max(n, oracle.dim_out))
    e0 = ProbeVector("Basis", (0,), basis_vector(n, 0))
    col0 = _query(oracle, e0, report)
    columns = [col0]
    xi_images = {}
    for a in range(1, n):
        probe = xi(n, 0, a)
        x = _query(oracle, probe, report)
        ov = abs(np.vdot(col0, x))
        if abs(ov - 1 / SQRT2) > tol:
            raise ProbeError("oracle is not an isometry", kind="Xi", indices=(0, a),
                             measured=float(ov), expected=1 / SQRT2)
        x = fix_phase(x, col0, tol)
        if report is not None:
            report.pivot_choices[probe.label] = 0
        xi_images[a] = x
        col = SQRT2 * x - col0
        direct = _query(oracle, ProbeVector("Basis", (a,), basis_vector(n, a)), report)
        res = _aligned_residual(direct, col)
        if report is not None:
            report.basis_residuals[a] = res
        if res > tol:
            raise ProbeError("oracle is not an isometry: basis image disagrees with its xi-derived column",
                             kind="Basis", indices=(a,), measured=res, expected=0.0)
        columns.append(col)

    gram = np.array(columns).conj() @ np.array(columns).T
    defect = np.abs(gram - np.eye(n))
    if defect.max() > tol:
        i, j = np.unravel_index(int(np.argmax(defect)), defect.shape)
        raise ProbeError("oracle is not an isometry: basis images are not orthonormal",
                         kind="Basis", indices=(int(i), int(j)),
                         measured=complex(gram[i, j]), expected=float(i == j))
    # overlap pattern: 1/sqrt(2) on columns 0 and a, zero elsewhere
    cols = np.array(columns)
    for a, x in xi_images.items():
        ov = np.abs(cols.conj() @ x)
        expected = np.zeros(n)
        expected[[0, a]] = 1 / SQRT2
        dev = np.abs(ov - expected)
        if dev.max() > tol:
            b = int(np.argmax(dev))
            raise ProbeError("oracle is not an isometry", kind="Xi", indices=(0, a),
                             measured=float(ov[b]), expected=float(expected[b]))
    return columns, xi_images


def classify_pair(oracle: RayMapOracle, columns: Sequence, alpha: int, beta: int,
                  tol: float = TOL_CLASS, report=None) -> complex:
    """Coefficient ``c`` of column ``beta`` in the image of ``phi(alpha, beta)``
    once the column-``alpha`` coefficient is made ``+1/sqrt(2)``.

    An isometry forces ``c = +i`` (linear) or ``c = -i`` (antilinear).
    """
    n = oracle.dim_in
    probe = phi(n, alpha, beta)
    y = _query(oracle, probe, report)
    try:
        y = fix_phase(y, columns[alpha], tol)
    except PhaseUndeterminedError as exc:
        raise ProbeError("phase undetermined for phi probe", kind="Phi", indices=(alpha, beta),
                         measured=float(abs(np.vdot(columns[alpha], y))), expected=1 / SQRT2) from exc
    c = complex(SQRT2 * np.vdot(columns[beta], y))
    try:
        deduce_plus_minus_i(c, tol)
    except PhaseAlgebraError as exc:
        raise ProbeError("oracle violates |1+c| = |1+i| constraint", kind="Phi",
                         indices=(alpha, beta), measured=c, expected="+i or -i") from exc
    if report is not None:
        report.pivot_choices[probe.label] = alpha
        report.classification_values[(alpha, beta)] = c
    return c


def chain_pairs(n: int) -> list[tuple[int, int]]:
    """Ordered pairs whose classifications must agree.

    Exhaustive up to ``EXHAUSTIVE_PAIRS_MAX_DIM``; beyond that the pairs
    ``(0, b)``, ``(b, 0)`` and ``(a, a+1)``, which link every pair through the
    three chain moves (swap order, change first index, change second index).
    """
    if n < 2:
        return []
    if n <= EXHAUSTIVE_PAIRS_MAX_DIM:
        return [(a, b) for a in range(n) for b in range(n) if a != b]
    pairs = [(0, b) for b in range(1, n)] + [(b, 0) for b in range(1, n)]
    pairs += [(a, a + 1) for a in range(1, n - 1)]
    return pairs


def chain_consistency(oracle: RayMapOracle, columns: Sequence, pairs: Iterable[tuple[int, int]],
                      tol: float = TOL_CLASS, report=None) -> dict:
    """Classify every pair and require one common choice of ``+i`` / ``-i``.

    Returns ``{(a, b): c}``.
    """
    values = {}
    first = None
    for a, b in pairs:
        c = classify_pair(oracle, columns, a, b, tol, report)
        values[(a, b)] = c
        sign = deduce_plus_minus_i(c, tol)
        if first is None:
            first = ((a, b), sign)
        elif sign != first[1]:
            raise ProbeError("inconsistent linearity type - not a ray isometry", kind="Phi",
                             indices=(a, b), measured=c,
                             expected=f"{first[1]} (as for Phi{first[0]})")
    return values


def validate_triples(oracle: RayMapOracle, columns: Sequence, tol: float | None = None,
                     report=None, triples: Iterable[tuple[int, int]] | None = None) -> dict:
    """Check ``eta(a, b)`` and ``xi(a, b)`` images for ``1 <= a < b``.

    After phase fixing against column 0 (eta) or column ``a`` (xi), every
    coefficient on the probe's own columns must be +1 and all others 0.
    Returns ``{"eta": {...}, "xi": {...}}`` residual maps.
    """
    n = oracle.dim_in
    if n < 3:
        raise ValueError("triple validation needs dim_in >= 3")
    if tol is None:
        tol = default_tol(max(n, oracle.dim_out))
    cols = np.array(columns)
    if triples is None:
        triples = itertools.combinations(range(1, n), 2)
    out = {"eta": {}, "xi": {}}
    for a, b in triples:
        for kind, probe, pivot, scale in (
            ("eta", eta(n, a, b), 0, SQRT3),
            ("xi", xi(n, a, b), a, SQRT2),
        ):
            z = _query(oracle, probe, report)
            try:
                z = fix_phase(z, cols[pivot], tol)
            except PhaseUndeterminedError as exc:
                raise ProbeError("phase undetermined", kind=probe.kind, indices=(a, b),
                                 measured=0.0, expected=1 / scale) from exc
            coeffs = scale * (cols.conj() @ z)
            expected = scale * probe.vector
            residual = float(np.max(np.abs(coeffs - expected)))
            # weight outside the column span
            residual = max(residual, scale * float(np.linalg.norm(z - cols.T @ (cols.conj() @ z))))
            if residual > tol:
                worst = int(np.argmax(np.abs(coeffs - expected)))
                raise ProbeError("triple-sum phase coherence violated", kind=probe.kind,
                                 indices=(a, b), measured=complex(coeffs[worst]),
                                 expected=complex(expected[worst]))
            for g in (a, b) if kind == "eta" else (b,):
                deduce_unity(complex(coeffs[g]), tol)
            out[kind][(a, b)] = residual
            if report is not None:
                report.pivot_choices[probe.label] = pivot
                getattr(report, f"{kind}_residuals")[(a, b)] = residual
    return out


def apply(w: WignerOperator, psi) -> np.ndarray:
    """``matrix @ psi`` (Linear, Degenerate) or ``matrix @ conj(psi)`` (Antilinear)."""
    psi = as_vector(psi)
    if psi.shape[0] != w.dim_in:
        raise ValueError(f"dimension mismatch: operator takes {w.dim_in}, got {psi.shape[0]}")
    if w.flag is Flag.ANTILINEAR:
        psi = psi.conj()
    return w.matrix @ psi


def apply_rows(w: WignerOperator, vectors: np.ndarray) -> np.ndarray:
    """Batched :func:`apply` over the rows of ``vectors``."""
    vectors = np.asarray(vectors, dtype=np.complex128)
    if w.flag is Flag.ANTILINEAR:
        vectors = vectors.conj()
    return vectors @ w.matrix.T


def reconstruct(oracle: RayMapOracle, tol: float | None = None,
                tol_class: float = TOL_CLASS) -> tuple[WignerOperator, ReconstructionReport]:
    """Run the full construction against ``oracle``.

    Raises :class:`ProbeError` naming the first probe whose reply no ray
    isometry could produce.
    """
    n = oracle.dim_in
    if n < 1 or oracle.dim_out < n:
        raise ValueError(f"invalid oracle dimensions {n} -> {oracle.dim_out}")
    if tol is None:
        tol = default_tol(max(n, oracle.dim_out))
    report = ReconstructionReport(tolerance_used=tol, tol_class=tol_class)
    start = oracle.calls_made

    if n == 1:
        col = _query(oracle, ProbeVector("Basis", (0,), basis_vector(1, 0)), report)
        w = WignerOperator(col[:, None], Flag.DEGENERATE)
    else:
        columns, _ = reconstruct_basis_images(oracle, tol, report)
        if n >= 3:
            validate_triples(oracle, columns, tol, report)
        values = chain_consistency(oracle, columns, chain_pairs(n), tol_class, report)
        sign = deduce_plus_minus_i(next(iter(values.values())), tol_class)
        flag = Flag.LINEAR if sign == 1j else Flag.ANTILINEAR
        w = WignerOperator(np.array(columns).T, flag)

    worst = 0.0
    for probe, image in report.probe_images:
        res = _aligned_residual(image, apply(w, probe.vector))
        if res > tol:
            raise ProbeError("lifted probe leaves its image ray", kind=probe.kind,
                             indices=probe.indices, measured=res, expected=0.0)
        worst = max(worst, res)
    report.compat_residual = worst
    report.oracle_calls = oracle.calls_made - start
    return w, report


def pivot_index(coefficients) -> int:
    """Largest-modulus coefficient, lowest index on ties."""
    return int(np.argmax(np.abs(np.asarray(coefficients))))


def coefficient_match_check(w: WignerOperator, oracle: RayMapOracle, psi,
                            tol: float | None = None, report=None) -> float:
    """Compare the oracle's image of ``ray(psi)`` with the predicted coefficients.

    The reply is rotated so that its coefficient on the pivot column equals
    the pivot coefficient of ``psi`` (conjugated when antilinear); the result
    is ``max_b |c'_b - c_b|`` (or ``|c'_b - conj(c_b)|``), which vanishes for
    a genuine lift.
    """
    if w.flag is Flag.DEGENERATE:
        raise ValueError("coefficient check needs a Linear or Antilinear operator")
    psi = as_vector(psi)
    if psi.shape[0] != w.dim_in:
        raise ValueError("dimension mismatch")
    if tol is None:
        tol = default_tol(max(w.dim_in, w.dim_out))
    nrm = np.linalg.norm(psi)
    if nrm == 0:
        raise ValueError("zero vector has no ray")
    c = psi / nrm
    if w.flag is Flag.ANTILINEAR:
        c = c.conj()
    p = pivot_index(c)
    y = oracle(ray_from_vector(psi)).rep
    c_img = w.matrix.conj().T @ y
    if abs(c_img[p]) <= tol:
        raise ProbeError("pivot coefficient vanishes in the image", kind="Coefficient",
                         indices=(p,), measured=float(abs(c_img[p])), expected=float(abs(c[p])))
    c_img = c_img * (c[p] / abs(c[p])) * (abs(c_img[p]) / c_img[p])
    if report is not None:
        report.pivot_choices[f"psi#{len(report.pivot_choices)}"] = p
    return float(np.max(np.abs(c_img - c)))


# --- file format -------------------------------------------------------------

OPERATOR_HEADER = "wigner-operator v1"


def format_operator(w: WignerOperator) -> str:
    lines = [OPERATOR_HEADER, f"{w.dim_out} {w.dim_in} {w.flag.value}"]
    lines += [" ".join(format_complex(complex(z)) for z in row) for row in w.matrix]
    return "\n".join(lines) + "\n"


def parse_operator(text: str) -> WignerOperator:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0].strip() != OPERATOR_HEADER:
        raise ValueError(f"missing {OPERATOR_HEADER!r} header")
    try:
        m_s, n_s, flag_s = lines[1].split()
        m, n = int(m_s), int(n_s)
    except (IndexError, ValueError) as exc:
        raise ValueError("malformed operator header line") from exc
    rows = [[parse_complex(t) for t in ln.split()] for ln in lines[2:]]
    if len(rows) != m or any(len(r) != n for r in rows):
        raise ValueError(f"expected {m} rows of {n} entries")
    return WignerOperator(np.array(rows, dtype=np.complex128).reshape(m, n), Flag.parse(flag_s))


def write_operator(w: WignerOperator, path) -> None:
    Path(path).write_text(format_operator(w), encoding="utf-8")


def read_operator(path) -> WignerOperator:
    return parse_operator(Path(path).read_text(encoding="utf-8"))

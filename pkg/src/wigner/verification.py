"""Independent certifiers. They report failures instead of raising."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hilbert import format_vector
from .oracles import Flag, RayMapOracle
from .prng import Prng
from .rays import ray_from_vector
from .reconstruct import WignerOperator, apply_rows


@dataclass(frozen=True)
class CheckReport:
    passed: bool
    max_violation: float
    samples_used: int
    worst_witness: tuple | None = None
    tolerance: float | None = None

    def to_text(self, witness: bool | None = None) -> str:
        """Witness vectors are included for failed checks unless overridden."""
        if witness is None:
            witness = not self.passed
        lines = [f"passed={str(self.passed).lower()} max_violation={self.max_violation:.17g} "
                 f"samples={self.samples_used}"]
        for v in (self.worst_witness or ()) if witness else ():
            lines.append("witness " + format_vector(v))
        return "\n".join(lines)


def _report(violations: np.ndarray, witnesses: list, tol: float) -> CheckReport:
    k = int(np.argmax(violations))
    worst = float(violations[k])
    return CheckReport(passed=worst <= tol, max_violation=worst, samples_used=len(violations),
                       worst_witness=witnesses[k], tolerance=tol)


def _structured_pairs(n: int) -> list[tuple[np.ndarray, np.ndarray]]:
    eye = np.eye(n, dtype=np.complex128)
    return [(eye[a], eye[a + 1]) for a in range(n - 1)]


def check_isometry(oracle: RayMapOracle, n_samples: int, seed: int, tol: float) -> CheckReport:
    """Compare ``|<psi1, psi2>|`` with the product of the image rays.

    Adjacent standard-basis pairs are checked first, then ``n_samples``
    Haar-random pairs.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    n = oracle.dim_in
    rng = Prng(seed)
    u, v = rng.unit_vectors(n_samples, n), rng.unit_vectors(n_samples, n)
    pairs = _structured_pairs(n) + list(zip(u, v))
    violations, witnesses = [], []
    for p, q in pairs:
        before = abs(np.vdot(p, q))
        a, b = oracle(ray_from_vector(p)), oracle(ray_from_vector(q))
        after = abs(np.vdot(a.rep, b.rep))
        violations.append(abs(before - after))
        witnesses.append((p, q))
    return _report(np.array(violations), witnesses, tol)


def check_operator_law(w: WignerOperator, n_samples: int, seed: int, tol: float) -> CheckReport:
    """Inner-product law and (anti)linearity on random vectors.

    Linear: ``<Wu, Wv> = <u, v>`` and ``W(a u + b v) = a Wu + b Wv``.
    Antilinear: ``<Wu, Wv> = <v, u>`` and ``W(a u + b v) = a* Wu + b* Wv``.
    """
    if w.flag is Flag.DEGENERATE:
        raise ValueError("operator law is undefined for the Degenerate flag")
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    n = w.dim_in
    rng = Prng(seed)
    u = rng.complex_normal((n_samples, n))
    v = rng.complex_normal((n_samples, n))
    a = rng.complex_normal(n_samples)[:, None]
    b = rng.complex_normal(n_samples)[:, None]
    wu, wv = apply_rows(w, u), apply_rows(w, v)

    lhs = np.einsum("ij,ij->i", wu.conj(), wv)
    rhs = np.einsum("ij,ij->i", u.conj(), v)
    if w.flag is Flag.ANTILINEAR:
        rhs = rhs.conj()
        a_, b_ = a.conj(), b.conj()
    else:
        a_, b_ = a, b
    law = np.abs(lhs - rhs)
    combo = np.max(np.abs(apply_rows(w, a * u + b * v) - (a_ * wu + b_ * wv)), axis=1)
    violations = np.maximum(law, combo)
    witnesses = list(zip(u, v))
    return _report(violations, witnesses, tol)


def check_ray_compatibility(w: WignerOperator, oracle: RayMapOracle, n_samples: int,
                            seed: int, tol: float) -> CheckReport:
    """``1 - ray_product(ray(W psi), oracle(ray(psi)))`` over probe and random
    vectors; the smallest product seen is ``1 - max_violation``.

    Standard-basis vectors and ``(e_a + i e_{a+1})/sqrt(2)`` are tried before
    ``n_samples`` Haar-random vectors.
    """
    if w.dim_in != oracle.dim_in or w.dim_out != oracle.dim_out:
        raise ValueError("operator and oracle dimensions differ")
    n = w.dim_in
    eye = np.eye(n, dtype=np.complex128)
    probes = [eye[a] for a in range(n)]
    probes += [(eye[a] + 1j * eye[a + 1]) / np.sqrt(2) for a in range(n - 1)]
    psis = np.vstack([np.array(probes), Prng(seed).unit_vectors(n_samples, n)])
    lifted = apply_rows(w, psis)
    violations = []
    for psi, lw in zip(psis, lifted):
        img = oracle(ray_from_vector(psi)).rep
        nrm = np.linalg.norm(lw)
        prod = abs(np.vdot(lw, img)) / nrm if nrm > 0 else 0.0
        violations.append(max(0.0, 1.0 - prod))
    return _report(np.array(violations), [(p,) for p in psis], tol)


def distance_up_to_global_phase(a, b) -> float:
    """``max|A - e^{i theta} B|`` with ``theta = arg tr(B^H A)``.

    When ``tr(B^H A)`` vanishes the phases are incomparable and ``theta = 0``
    is used, so the value is ``max|A - B|``.
    """
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    # fixed argument order keeps the result bit-symmetric
    if a.tobytes() > b.tobytes():
        a, b = b, a
    t = complex(np.vdot(b, a))
    scale = max(np.linalg.norm(a), np.linalg.norm(b), 1.0)
    phase = t / abs(t) if abs(t) > 1e-14 * scale * scale else 1.0
    return float(np.max(np.abs(a - phase * b)))

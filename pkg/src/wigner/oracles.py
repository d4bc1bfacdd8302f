"""Ground-truth symmetries and gauge-scrambled black-box ray maps."""

from __future__ import annotations

import enum
import hashlib
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from .hilbert import format_complex, parse_complex
from .prng import Prng, derive_seed
from .rays import Ray, canonical_gauge, ray_from_vector


class Flag(str, enum.Enum):
    LINEAR = "Linear"
    ANTILINEAR = "Antilinear"
    DEGENERATE = "Degenerate"

    @classmethod
    def parse(cls, text: str) -> "Flag":
        for f in cls:
            if f.value.lower() == text.strip().lower():
                return f
        raise ValueError(f"unknown flag {text!r}")


def haar_unitary(n: int, seed: int) -> np.ndarray:
    """Haar-random ``n x n`` unitary: QR of a complex Ginibre matrix with the
    phases of ``diag(R)`` absorbed into ``Q``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    z = Prng(seed).complex_normal((n, n))
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def isometric_embedding(n: int, m: int, seed: int) -> np.ndarray:
    """``m x n`` matrix with orthonormal columns; Haar unitary when m == n."""
    if m < n:
        raise ValueError(f"no isometry into smaller space (n={n}, m={m})")
    return haar_unitary(m, seed)[:, :n]


@dataclass(frozen=True, eq=False)
class GroundTruth:
    matrix: np.ndarray
    flag: Flag
    gauge_seed: int

    def __post_init__(self):
        v = np.asarray(self.matrix, dtype=np.complex128)
        if v.ndim != 2:
            raise ValueError("ground-truth matrix must be 2-D")
        if self.flag not in (Flag.LINEAR, Flag.ANTILINEAR):
            raise ValueError("ground truth must be Linear or Antilinear")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "matrix", v)

    @property
    def dim_out(self) -> int:
        return self.matrix.shape[0]

    @property
    def dim_in(self) -> int:
        return self.matrix.shape[1]

    def isometry_defect(self) -> float:
        v = self.matrix
        return float(np.max(np.abs(v.conj().T @ v - np.eye(self.dim_in))))

    def validate(self, tol: float = 1e-12) -> None:
        defect = self.isometry_defect()
        if defect > tol:
            raise ValueError(f"ground-truth columns not orthonormal: |V^H V - I|_max = {defect:.3e}")

    def lift(self, psi: np.ndarray) -> np.ndarray:
        if self.flag is Flag.ANTILINEAR:
            psi = psi.conj()
        return self.matrix @ psi


def random_truth(n: int, m: int, flag: Flag, seed: int, gauge_seed: int | None = None) -> GroundTruth:
    if gauge_seed is None:
        gauge_seed = derive_seed(seed, 0x6A09E667)
    return GroundTruth(isometric_embedding(n, m, seed), Flag(flag), gauge_seed)


class RayMapOracle:
    """Black-box ray map from ``dim_in`` to ``dim_out``.

    ``image(ray, call_index)`` returns the image's representative. The call
    counter makes oracles stateful: one instance per thread; use
    :meth:`clone` with a distinct ``counter_offset`` per worker.
    """

    def __init__(self, dim_in: int, dim_out: int,
                 image: Callable[[Ray, int], np.ndarray], calls_made: int = 0):
        self.dim_in = dim_in
        self.dim_out = dim_out
        self._image = image
        self.calls_made = calls_made

    def __call__(self, ray: Ray) -> Ray:
        if ray.dim != self.dim_in:
            raise ValueError(f"oracle expects rays of dim {self.dim_in}, got {ray.dim}")
        out = self._image(ray, self.calls_made)
        self.calls_made += 1
        out = ray_from_vector(out)
        if out.dim != self.dim_out:
            raise RuntimeError("oracle produced an image of the wrong dimension")
        return out

    def clone(self, counter_offset: int = 0) -> "RayMapOracle":
        return RayMapOracle(self.dim_in, self.dim_out, self._image, counter_offset)


def _ray_digest(ray: Ray) -> int:
    # rounding keeps representatives of one ray (differing by rounding) together
    canon = np.round(canonical_gauge(ray), 9) + 0.0
    h = hashlib.blake2b(canon.astype(np.complex128).tobytes(), digest_size=8)
    return int.from_bytes(h.digest(), "little")


def _gauge_phase(gauge_seed: int, ray: Ray, call_index: int, strict: bool) -> complex:
    key = _ray_digest(ray) if strict else call_index
    theta = Prng(derive_seed(gauge_seed, 1 if strict else 0, key)).phase()
    return np.exp(1j * theta)


def make_oracle(truth: GroundTruth, strict_gauge: bool = False) -> RayMapOracle:
    """Wrap ``truth`` as a ray map whose every reply carries a fresh phase.

    The phase comes from ``(gauge_seed, call counter)``, so repeated queries
    of one ray return different representatives. With ``strict_gauge`` the
    phase is instead a function of the input ray, applied to its canonical
    representative, so equal rays get identical replies.
    """

    def image(ray: Ray, call_index: int) -> np.ndarray:
        psi = canonical_gauge(ray) if strict_gauge else ray.rep
        return _gauge_phase(truth.gauge_seed, ray, call_index, strict_gauge) * truth.lift(psi)

    return RayMapOracle(truth.dim_in, truth.dim_out, image)


def collapse_oracle(n: int) -> RayMapOracle:
    """Every ray goes to ray(e1); violates product preservation."""
    if n < 2:
        raise ValueError("collapse oracle needs n >= 2")
    target = np.zeros(n, dtype=np.complex128)
    target[0] = 1.0
    return RayMapOracle(n, n, lambda ray, k: target)


def perturbed_oracle(truth: GroundTruth, epsilon: float, strict_gauge: bool = False) -> RayMapOracle:
    """Honest image plus a unit pseudo-random vector scaled by ``epsilon``.

    The perturbation depends only on the input ray, so the result is still a
    well-defined ray map, just not an isometry once ``epsilon > 0``.
    """
    if epsilon < 0:
        raise ValueError("epsilon must be >= 0")

    def image(ray: Ray, call_index: int) -> np.ndarray:
        if epsilon == 0:
            w = truth.lift(ray.rep)
        else:
            g = Prng(derive_seed(truth.gauge_seed, 2, _ray_digest(ray))).complex_normal(truth.dim_out)
            # perturb the canonical-gauge image so the map ignores input phase
            w = truth.lift(canonical_gauge(ray)) + epsilon * g / np.linalg.norm(g)
            w = w / np.linalg.norm(w)
        return _gauge_phase(truth.gauge_seed, ray, call_index, strict_gauge) * w

    return RayMapOracle(truth.dim_in, truth.dim_out, image)


# --- file format -------------------------------------------------------------

TRUTH_HEADER = "wigner-truth v1"


def format_truth(truth: GroundTruth) -> str:
    lines = [TRUTH_HEADER, f"{truth.dim_out} {truth.dim_in} {truth.flag.value} {truth.gauge_seed}"]
    lines += [" ".join(format_complex(complex(z)) for z in row) for row in truth.matrix]
    return "\n".join(lines) + "\n"


def parse_truth(text: str) -> GroundTruth:
    """Parse the ground-truth text format. Orthonormality is NOT checked here;
    call :meth:`GroundTruth.validate`."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0].strip() != TRUTH_HEADER:
        raise ValueError(f"missing {TRUTH_HEADER!r} header")
    try:
        m_s, n_s, flag_s, seed_s = lines[1].split()
        m, n, seed = int(m_s), int(n_s), int(seed_s)
    except (IndexError, ValueError) as exc:
        raise ValueError("malformed ground-truth header line") from exc
    rows = [[parse_complex(t) for t in ln.split()] for ln in lines[2:]]
    if len(rows) != m or any(len(r) != n for r in rows):
        raise ValueError(f"expected {m} rows of {n} entries")
    flag = Flag.parse(flag_s)
    return GroundTruth(np.array(rows, dtype=np.complex128).reshape(m, n), flag, seed)


def write_truth(truth: GroundTruth, path) -> None:
    Path(path).write_text(format_truth(truth), encoding="utf-8")


def read_truth(path) -> GroundTruth:
    return parse_truth(Path(path).read_text(encoding="utf-8"))

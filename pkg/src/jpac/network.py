"""Physical interference model, channel normalization, and index-set algebra.

The physical channel is a K-link interference channel (one transmitter /
receiver pair per link).  Feasibility of a power vector is expressed either
in physical units (SINR_k >= gamma_k) or, after normalization, as
[A x - b]_k >= 0 with x_k = p_k / pbar_k.  The normalized matrix A has unit
diagonal and non-positive off-diagonals, which the downstream solvers rely
on.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

import numpy as np

SCHEMA_VERSION = 1


def _as_vector(v, k: int, name: str) -> np.ndarray:
    a = np.asarray(v, dtype=float)
    if a.shape != (k,):
        raise ValueError(f"{name} must have shape ({k},), got {a.shape}")
    return a


@dataclass(frozen=True)
class NetworkInstance:
    """Physical channel: gains, noises, SINR targets, and power budgets.

    gains[k, j] is the linear gain from transmitter j to receiver k
    (dimensionless); noise is in watts, sinr_targets in linear scale,
    budgets in watts.  geometry, when present, holds transmitter and
    receiver coordinates in meters.
    """

    gains: np.ndarray
    noise: np.ndarray
    sinr_targets: np.ndarray
    budgets: np.ndarray
    geometry: dict | None = None

    def __post_init__(self):
        gains = np.asarray(self.gains, dtype=float)
        if gains.ndim != 2 or gains.shape[0] != gains.shape[1]:
            raise ValueError(f"gains must be a square matrix, got {gains.shape}")
        k = gains.shape[0]
        object.__setattr__(self, "gains", gains)
        object.__setattr__(self, "noise", _as_vector(self.noise, k, "noise"))
        object.__setattr__(self, "sinr_targets", _as_vector(self.sinr_targets, k, "sinr_targets"))
        object.__setattr__(self, "budgets", _as_vector(self.budgets, k, "budgets"))
        if np.any(gains < 0):
            raise ValueError("channel gains must be nonnegative")
        if np.any(np.diag(gains) <= 0):
            raise ValueError("diagonal (direct-link) gains must be strictly positive")
        for name in ("noise", "sinr_targets", "budgets"):
            if np.any(getattr(self, name) <= 0):
                raise ValueError(f"{name} must be strictly positive")

    @property
    def K(self) -> int:
        return self.gains.shape[0]

    def to_json(self) -> str:
        doc = {
            "version": SCHEMA_VERSION,
            "K": self.K,
            "gains": self.gains.tolist(),
            "noise_w": self.noise.tolist(),
            "sinr_targets_linear": self.sinr_targets.tolist(),
            "budgets_w": self.budgets.tolist(),
        }
        if self.geometry is not None:
            doc["geometry"] = {k: np.asarray(v).tolist() for k, v in self.geometry.items()}
        return json.dumps(doc)

    @classmethod
    def from_json(cls, text: str) -> "NetworkInstance":
        doc = json.loads(text)
        if doc.get("version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema version {doc.get('version')!r}")
        geometry = doc.get("geometry")
        if geometry is not None:
            geometry = {k: np.asarray(v, dtype=float) for k, v in geometry.items()}
        return cls(
            gains=doc["gains"],
            noise=doc["noise_w"],
            sinr_targets=doc["sinr_targets_linear"],
            budgets=doc["budgets_w"],
            geometry=geometry,
        )


@dataclass(frozen=True)
class NormalizedProblem:
    """The (A, b, pbar) triple of the sparse formulation, plus the weight alpha.

    A has exactly unit diagonal and non-positive off-diagonals, b > 0.
    link_ids maps row index back to the original link identity and survives
    restriction to subsets.  alpha is None until selected; when set it must
    lie strictly inside (0, 1 / sum(pbar)).
    """

    A: np.ndarray
    b: np.ndarray
    budgets: np.ndarray
    alpha: float | None = None
    link_ids: tuple[int, ...] = ()

    def __post_init__(self):
        A = np.asarray(self.A, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValueError(f"A must be square, got {A.shape}")
        k = A.shape[0]
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", _as_vector(self.b, k, "b"))
        object.__setattr__(self, "budgets", _as_vector(self.budgets, k, "budgets"))
        if not self.link_ids:
            object.__setattr__(self, "link_ids", tuple(range(k)))
        elif len(self.link_ids) != k:
            raise ValueError("link_ids length must match problem size")
        if np.any(np.diag(A) != 1.0):
            raise ValueError("A must have exactly unit diagonal")
        off = A - np.diag(np.diag(A))
        if np.any(off > 0):
            raise ValueError("off-diagonals of A must be non-positive")
        if np.any(self.b <= 0):
            raise ValueError("b must be strictly positive")
        if np.any(self.budgets <= 0):
            raise ValueError("budgets must be strictly positive")
        if self.alpha is not None:
            hi = 1.0 / float(np.sum(self.budgets))
            if not (0.0 < self.alpha < hi):
                raise ValueError(f"alpha must lie in (0, {hi}), got {self.alpha}")

    @property
    def K(self) -> int:
        return self.A.shape[0]

    @property
    def alpha1(self) -> float:
        """Upper limit 1 / (e^T pbar) on the power-weight alpha."""
        return 1.0 / float(np.sum(self.budgets))

    def with_alpha(self, alpha: float) -> "NormalizedProblem":
        return replace(self, alpha=float(alpha))

    def to_json(self) -> str:
        doc = {
            "version": SCHEMA_VERSION,
            "K": self.K,
            "A": self.A.tolist(),
            "b": self.b.tolist(),
            "budgets_w": self.budgets.tolist(),
            "alpha": self.alpha,
            "link_ids": list(self.link_ids),
        }
        return json.dumps(doc)

    @classmethod
    def from_json(cls, text: str) -> "NormalizedProblem":
        doc = json.loads(text)
        if doc.get("version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema version {doc.get('version')!r}")
        return cls(
            A=doc["A"],
            b=doc["b"],
            budgets=doc["budgets_w"],
            alpha=doc.get("alpha"),
            link_ids=tuple(doc.get("link_ids") or ()),
        )


def sinr(instance: NetworkInstance, p) -> np.ndarray:
    """Per-link SINR g_kk p_k / (eta_k + sum_{j != k} g_kj p_j) at power p (watts)."""
    p = _as_vector(p, instance.K, "p")
    interference = instance.gains @ p - np.diag(instance.gains) * p
    return np.diag(instance.gains) * p / (instance.noise + interference)


def normalize(instance: NetworkInstance) -> NormalizedProblem:
    """Map the physical channel to the normalized (A, b, pbar) form.

    a_kk = 1, a_kj = -gamma_k g_kj pbar_j / (g_kk pbar_k) for j != k, and
    b_k = gamma_k eta_k / (g_kk pbar_k).  With x = p / pbar, SINR_k >= gamma_k
    iff [A x - b]_k >= 0.  alpha is left unset.
    """
    g = instance.gains
    gkk = np.diag(g)
    gamma = instance.sinr_targets
    pbar = instance.budgets
    A = -(gamma[:, None] * g * pbar[None, :]) / (gkk * pbar)[:, None]
    np.fill_diagonal(A, 1.0)
    b = gamma * instance.noise / (gkk * pbar)
    return NormalizedProblem(A=A, b=b, budgets=pbar.copy())


def spectral_radius(M) -> float:
    """Spectral radius of a nonnegative square matrix.

    Dense eigensolve for small matrices; power iteration with random
    positive restarts above that (Perron-Frobenius makes the iteration
    reliable on nonnegative matrices, restarts cover reducible cases).
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"M must be square, got {M.shape}")
    if np.any(M < 0):
        raise ValueError("M must be nonnegative")
    n = M.shape[0]
    if n == 0:
        return 0.0
    if not np.any(M):
        return 0.0
    if n <= 64:
        return float(np.max(np.abs(np.linalg.eigvals(M))))
    rng = np.random.default_rng(0)
    best = 0.0
    for _ in range(10):
        v = rng.uniform(0.1, 1.0, size=n)
        v /= np.linalg.norm(v)
        lam = 0.0
        for _ in range(10_000):
            mv = M @ v
            norm = np.linalg.norm(mv)
            if norm == 0.0:
                lam = 0.0
                break
            v_next = mv / norm
            lam_next = float(v_next @ (M @ v_next))
            if abs(lam_next - lam) <= 1e-12 * max(1.0, abs(lam_next)):
                lam = lam_next
                break
            v, lam = v_next, lam_next
        best = max(best, lam)
    return best


def select_alpha(
    normalized: NormalizedProblem,
    c1: float = 0.2,
    c2: float = 0.2,
    c3: float = 4.0,
    alpha2: float | None = None,
) -> float:
    """Power-weight selection rule driven by the spectral radius of I - A.

    Returns c1 * alpha1 when rho(I - A) >= 1.  Below 1, returns
    min(c2 * alpha1, c3 * alpha2) when an alpha2 override is supplied and
    c2 * alpha1 otherwise (the alpha2 bound lives in prior work and is
    accepted here only as a pluggable parameter).
    """
    if not (0.0 < c1 < 1.0 and 0.0 < c2 < 1.0):
        raise ValueError("c1 and c2 must lie in (0, 1)")
    if c3 <= c2:
        raise ValueError("c3 must exceed c2")
    alpha1 = normalized.alpha1
    rho = spectral_radius(np.eye(normalized.K) - normalized.A)
    if rho >= 1.0:
        return c1 * alpha1
    if alpha2 is not None:
        return min(c2 * alpha1, c3 * alpha2)
    return c2 * alpha1


def restrict(normalized: NormalizedProblem, S) -> NormalizedProblem:
    """Sub-problem (A_SS, b_S, pbar_S) on the row indices S; alpha carries over."""
    idx = np.asarray(sorted(S), dtype=int)
    if idx.size == 0:
        raise ValueError("S must be nonempty")
    if idx[0] < 0 or idx[-1] >= normalized.K or len(set(idx.tolist())) != idx.size:
        raise ValueError("S must be a set of valid row indices")
    return NormalizedProblem(
        A=normalized.A[np.ix_(idx, idx)],
        b=normalized.b[idx],
        budgets=normalized.budgets[idx],
        alpha=normalized.alpha,
        link_ids=tuple(normalized.link_ids[i] for i in idx),
    )

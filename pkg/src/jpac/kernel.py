"""Potential-reduction interior-point solver for the slack-augmented lq problem.

The box-constrained lq objective over x is rewritten with slack variables as

    min  c~^T w1 + ||w2||_q^q   s.t.  A~ w = b~,  w >= 0,

with w = (w1; w2; w3) = (powers; residual slacks; budget slacks) and the
2K x 3K block matrix A~ = [[A, I, 0], [I, 0, I]].  Each iteration solves a
projection problem in the space scaled by W = Diag(w): a fixed-radius step
along the projected scaled gradient reduces the potential

    phi(w) = rho * log f(w) - sum_n log w_n

by at least 2 - sqrt(3) until either phi falls below the eps-optimality
threshold or the projected direction has norm <= 1, which certifies an
eps-KKT point.

All multistart runs advance in lockstep through a batched core; the public
single-iterate operations are thin wrappers over a batch of one, so both
paths share the same arithmetic.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .network import NormalizedProblem

EPS_OPTIMAL = "eps-optimal"
EPS_KKT = "eps-kkt"
ITERATION_CAP = "iteration-cap"

STEP_BETA = 1.0 - math.sqrt(3.0) / 3.0
MIN_POTENTIAL_DECREASE = 2.0 - math.sqrt(3.0)
_W_FLOOR = 1e-280  # retire a start once a component nears the float64 range


@dataclass(frozen=True)
class AugmentedProblem:
    """Slack-variable form (A~, b~, c~) with the lq exponent q."""

    A_tilde: np.ndarray   # (2K, 3K)
    b_tilde: np.ndarray   # (2K,)
    c_tilde: np.ndarray   # (K,)
    q: float
    K: int

    def __post_init__(self):
        if not (0.0 < self.q <= 1.0):
            raise ValueError("q must lie in (0, 1]")
        if self.A_tilde.shape != (2 * self.K, 3 * self.K):
            raise ValueError("A_tilde must be 2K x 3K")
        if np.any(self.b_tilde <= 0):
            raise ValueError("b_tilde must be strictly positive")

    @property
    def A(self) -> np.ndarray:
        return self.A_tilde[: self.K, : self.K]

    @property
    def b(self) -> np.ndarray:
        return self.b_tilde[: self.K]


@dataclass
class IterateState:
    """One strictly positive feasible iterate with its potential value."""

    w: np.ndarray
    f_value: float
    potential: float
    rho: float
    beta: float
    iteration: int = 0


@dataclass(frozen=True)
class KktCertificate:
    """Multipliers and residuals backing a solver termination claim.

    dual_residual is the minimum component of grad f(w) - A~^T lambda;
    comp_gap is w^T (grad f - A~^T lambda) / f(w).  gap_literal records the
    sum_n (q w_n^q - [A~^T lambda]_n w_n) / f(w) variant for comparison (the
    two differ on the w1 block, whose gradient is c~ rather than q w^q).
    """

    lam: np.ndarray
    dual_residual: float
    comp_gap: float
    epsilon: float
    termination: str
    f_value: float
    gap_literal: float = float("nan")
    iterations: int = 0


@dataclass(frozen=True)
class SolverConfig:
    epsilon: float = 1e-4
    beta: float = STEP_BETA
    iter_cap_factor: float = 10.0
    iter_cap_abs: int = 100_000
    zero_tol: float = 1e-6        # support-detection threshold on b - A x
    init_margin: float = 1e-3     # clip random xi into [margin, 1 - margin]
    trace_path: str | None = None

    def __post_init__(self):
        if not (0.0 < self.beta < 1.0):
            raise ValueError("beta must lie in (0, 1)")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")

    def rho(self, K: int, q: float) -> float:
        # rho >= 6K/eps certifies the eps-KKT gap; rho > K/q is needed by
        # the eps-optimality threshold.
        return max(6.0 * K / self.epsilon, 2.0 * K / q)

    def iter_cap(self, K: int, q: float) -> int:
        cap = self.iter_cap_factor * (K / min(self.epsilon, q)) * math.log(1.0 / self.epsilon)
        return int(min(max(cap, 1.0), self.iter_cap_abs))


def augment(normalized: NormalizedProblem, q: float = 1.0) -> AugmentedProblem:
    """Assemble the 2K x 3K slack form; requires alpha to be set."""
    if normalized.alpha is None:
        raise ValueError("normalized problem must have alpha set")
    k = normalized.K
    eye = np.eye(k)
    zero = np.zeros((k, k))
    A_tilde = np.block([[normalized.A, eye, zero], [eye, zero, eye]])
    b_tilde = np.concatenate([normalized.b, np.ones(k)])
    c_tilde = normalized.alpha * normalized.budgets
    return AugmentedProblem(A_tilde=A_tilde, b_tilde=b_tilde, c_tilde=c_tilde, q=float(q), K=k)


def with_q(problem: AugmentedProblem, q: float) -> AugmentedProblem:
    return AugmentedProblem(
        A_tilde=problem.A_tilde, b_tilde=problem.b_tilde, c_tilde=problem.c_tilde,
        q=float(q), K=problem.K,
    )


def objective_f(w: np.ndarray, problem: AugmentedProblem) -> float:
    k = problem.K
    w2 = w[k : 2 * k]
    return float(problem.c_tilde @ w[:k] + np.sum(w2 ** problem.q))


def gradient_f(w: np.ndarray, problem: AugmentedProblem) -> np.ndarray:
    k = problem.K
    w2 = w[k : 2 * k]
    if np.any(w2 <= 0):
        raise ValueError("gradient undefined: w2 has a nonpositive component")
    return np.concatenate([
        problem.c_tilde,
        problem.q * w2 ** (problem.q - 1.0),
        np.zeros(k),
    ])


def potential(w: np.ndarray, problem: AugmentedProblem, rho: float) -> float:
    if np.any(w <= 0):
        raise ValueError("potential undefined at the boundary")
    return rho * math.log(objective_f(w, problem)) - float(np.sum(np.log(w)))


def interior_point_default(problem: AugmentedProblem) -> np.ndarray:
    """Deterministic strictly interior start w0 = (m/2; b - A m/2; e - m/2)."""
    A, b = problem.A, problem.b
    m = np.minimum(b, 1.0)
    w1 = m / 2.0
    return np.concatenate([w1, b - A @ w1, 1.0 - w1])


def interior_point_random(problem: AugmentedProblem, xi: np.ndarray, init_margin: float = 1e-3) -> np.ndarray:
    """Random strictly interior start w(xi) = (xi o m; b - A(xi o m); e - xi o m)."""
    xi = np.asarray(xi, dtype=float)
    if xi.shape != (problem.K,):
        raise ValueError(f"xi must have shape ({problem.K},)")
    if np.any(xi < init_margin) or np.any(xi > 1.0 - init_margin):
        raise ValueError("xi must lie in [init_margin, 1 - init_margin]")
    A, b = problem.A, problem.b
    w1 = xi * np.minimum(b, 1.0)
    return np.concatenate([w1, b - A @ w1, 1.0 - w1])


# ---------------------------------------------------------------------------
# Batched core: N starts advance in lockstep; converged starts are frozen.
# ---------------------------------------------------------------------------


def _batch_objective(W: np.ndarray, problem: AugmentedProblem) -> np.ndarray:
    k = problem.K
    return W[:, :k] @ problem.c_tilde + np.sum(W[:, k : 2 * k] ** problem.q, axis=1)


def _batch_potential(W: np.ndarray, problem: AugmentedProblem, rho: float) -> np.ndarray:
    return rho * np.log(_batch_objective(W, problem)) - np.sum(np.log(W), axis=1)


def _solve_normal(normal: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Cholesky solve of the batched SPD normal systems, with ridge retries."""
    m = normal.shape[-1]
    ridge = np.trace(normal, axis1=-2, axis2=-1) / m * 1e-12
    for attempt in range(4):
        try:
            L = np.linalg.cholesky(normal)
        except np.linalg.LinAlgError:
            if attempt == 3:
                raise
            normal = normal + ridge[..., None, None] * np.eye(m)
            continue
        y = np.linalg.solve(L, rhs[..., None])
        return np.linalg.solve(np.swapaxes(L, -1, -2), y)[..., 0]
    raise np.linalg.LinAlgError("normal equations remained singular after regularization")


@dataclass
class _StartResult:
    w: np.ndarray
    certificate: KktCertificate


def _solve_batch(
    problem: AugmentedProblem,
    config: SolverConfig,
    W0: np.ndarray,
    trace_file=None,
) -> list[_StartResult]:
    """Run the potential-reduction iteration from each row of W0."""
    n_starts, n = W0.shape
    k = problem.K
    q = problem.q
    rho = config.rho(k, q)
    beta = config.beta
    cap = config.iter_cap(k, q)
    threshold = (rho - k / q) * math.log(config.epsilon) + (k / q) * math.log(k) + k * math.log(4.0)

    At = problem.A_tilde
    W = W0.copy()
    active = np.arange(n_starts)
    results: list[_StartResult | None] = [None] * n_starts
    iters = np.zeros(n_starts, dtype=int)

    def finalize(idx, w, lam, resid, f_val, termination):
        comp_gap = float(w @ resid / f_val)
        w2q = np.zeros(n)
        w2q[k : 2 * k] = q * w[k : 2 * k] ** q
        gap_literal = float(np.sum(w2q - (At.T @ lam) * w) / f_val)
        results[idx] = _StartResult(
            w=w,
            certificate=KktCertificate(
                lam=lam,
                dual_residual=float(np.min(resid)),
                comp_gap=comp_gap,
                epsilon=config.epsilon,
                termination=termination,
                f_value=float(f_val),
                gap_literal=gap_literal,
                iterations=int(iters[idx]),
            ),
        )

    for it in range(cap + 1):
        if active.size == 0:
            break
        Wa = W[active]
        f = _batch_objective(Wa, problem)
        phi = rho * np.log(f) - np.sum(np.log(Wa), axis=1)

        grad = np.empty_like(Wa)
        grad[:, :k] = problem.c_tilde
        grad[:, k : 2 * k] = q * Wa[:, k : 2 * k] ** (q - 1.0)
        grad[:, 2 * k :] = 0.0

        M = At[None, :, :] * Wa[:, None, :]                 # A~ W, (N, 2K, 3K)
        normal = M @ np.swapaxes(M, 1, 2)                    # A~ W^2 A~^T
        rhs = np.einsum("nij,nj->ni", M, Wa * grad - (f / rho)[:, None])
        lam = _solve_normal(normal, rhs)
        resid = grad - np.einsum("ij,nj->ni", At.T, lam)     # grad f - A~^T lambda
        g = 1.0 - (rho / f)[:, None] * Wa * resid
        norm_g = np.linalg.norm(g, axis=1)

        if trace_file is not None:
            for row, idx in enumerate(active):
                rec = {"iter": int(iters[idx]), "f": float(f[row]), "phi": float(phi[row]),
                       "norm_g": float(norm_g[row])}
                if n_starts > 1:
                    rec["start"] = int(idx)
                trace_file.write(json.dumps(rec) + "\n")

        done_optimal = phi <= threshold
        done_kkt = ~done_optimal & (norm_g <= 1.0)
        done = done_optimal | done_kkt
        for row in np.nonzero(done)[0]:
            term = EPS_OPTIMAL if done_optimal[row] else EPS_KKT
            finalize(active[row], Wa[row].copy(), lam[row], resid[row], f[row], term)

        keep = ~done
        if it == cap:
            for row in np.nonzero(keep)[0]:
                finalize(active[row], Wa[row].copy(), lam[row], resid[row], f[row], ITERATION_CAP)
            break

        step = (beta / norm_g[keep])[:, None] * g[keep]
        W_new = Wa[keep] * (1.0 + step)
        if np.any(W_new <= 0):
            raise RuntimeError("iterate left the positive orthant (step radius beta < 1 violated)")
        # For very small q the eps-KKT slack target can underflow float64;
        # retire such starts instead of letting the gradient blow up.
        floored = np.min(W_new, axis=1) < _W_FLOOR
        if np.any(floored):
            keep_rows = np.nonzero(keep)[0]
            for j in np.nonzero(floored)[0]:
                row = keep_rows[j]
                finalize(active[row], Wa[row].copy(), lam[row], resid[row], f[row], ITERATION_CAP)
        survivors = ~floored
        W[active[keep][survivors]] = W_new[survivors]
        iters[active[keep][survivors]] += 1
        active = active[keep][survivors]

    return [r for r in results if r is not None]


def reduction_step(
    state: IterateState, problem: AugmentedProblem, config: SolverConfig | None = None
) -> tuple[IterateState, KktCertificate | None]:
    """One projected potential-reduction step.

    Returns the advanced state and None, or the unchanged state together
    with an eps-KKT certificate when the projected direction already has
    norm <= 1.
    """
    config = config or SolverConfig()
    k = problem.K
    q = problem.q
    w = state.w
    f = objective_f(w, problem)
    grad = gradient_f(w, problem)
    At = problem.A_tilde
    M = At * w[None, :]
    normal = M @ M.T
    rhs = M @ (w * grad - (f / state.rho))
    lam = _solve_normal(normal[None], rhs[None])[0]
    resid = grad - At.T @ lam
    g = 1.0 - (state.rho / f) * w * resid
    norm_g = float(np.linalg.norm(g))
    if norm_g <= 1.0:
        comp_gap = float(w @ resid / f)
        w2q = np.zeros(3 * k)
        w2q[k : 2 * k] = q * w[k : 2 * k] ** q
        cert = KktCertificate(
            lam=lam,
            dual_residual=float(np.min(resid)),
            comp_gap=comp_gap,
            epsilon=config.epsilon,
            termination=EPS_KKT,
            f_value=f,
            gap_literal=float(np.sum(w2q - (At.T @ lam) * w) / f),
            iterations=state.iteration,
        )
        return state, cert
    step = (state.beta / norm_g) * g
    w_new = w * (1.0 + step)
    assert np.all(w_new > 0), "step radius beta < 1 must preserve positivity"
    f_new = objective_f(w_new, problem)
    phi_new = state.rho * math.log(f_new) - float(np.sum(np.log(w_new)))
    new_state = IterateState(
        w=w_new, f_value=f_new, potential=phi_new,
        rho=state.rho, beta=state.beta, iteration=state.iteration + 1,
    )
    return new_state, None


def make_state(problem: AugmentedProblem, config: SolverConfig, w: np.ndarray) -> IterateState:
    rho = config.rho(problem.K, problem.q)
    return IterateState(
        w=np.asarray(w, dtype=float),
        f_value=objective_f(w, problem),
        potential=potential(w, problem, rho),
        rho=rho,
        beta=config.beta,
    )


def solve_potential_reduction(
    problem: AugmentedProblem, config: SolverConfig, w_init: np.ndarray
) -> tuple[np.ndarray, KktCertificate]:
    """Iterate to an eps-optimal or eps-KKT point (or hit the iteration cap)."""
    w_init = np.asarray(w_init, dtype=float)
    if np.any(w_init <= 0):
        raise ValueError("w_init must be strictly positive")
    trace_file = open(config.trace_path, "a") if config.trace_path else None
    try:
        results = _solve_batch(problem, config, w_init[None, :], trace_file=trace_file)
    finally:
        if trace_file is not None:
            trace_file.close()
    res = results[0]
    return res.w, res.certificate


def round_to_power(
    w: np.ndarray, problem: AugmentedProblem, zero_tol: float = 1e-6
) -> tuple[np.ndarray, list[int]]:
    """Map an iterate back to x in [0, 1]^K and its supported-link set."""
    k = problem.K
    x = np.clip(np.asarray(w, dtype=float)[:k], 0.0, 1.0)
    resid = problem.b - problem.A @ x
    support = [int(i) for i in np.nonzero(resid <= zero_tol)[0]]
    return x, support


@dataclass
class MultistartResult:
    x: np.ndarray
    support: list[int]
    score: float
    certificates: list[KktCertificate]
    best_start: int
    total_iterations: int


def multistart_solve(
    problem: AugmentedProblem, config: SolverConfig, n_starts: int, seed: int
) -> MultistartResult:
    """Best of the default start plus n_starts - 1 random interior starts.

    Each rounded solution is scored by the thresholded l0 objective
    #{k: [b - A x]_k > zero_tol} + alpha pbar^T x; ties break by the lower
    power term and then the lower start index.  Starts that hit the
    iteration cap are skipped (at least one start must terminate cleanly).
    """
    if n_starts < 1:
        raise ValueError("n_starts must be at least 1")
    k = problem.K
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    starts = [interior_point_default(problem)]
    lo, hi = config.init_margin, 1.0 - config.init_margin
    for _ in range(n_starts - 1):
        xi = rng.uniform(lo, hi, size=k)
        starts.append(interior_point_random(problem, xi, init_margin=config.init_margin))

    trace_file = open(config.trace_path, "a") if config.trace_path else None
    try:
        results = _solve_batch(problem, config, np.asarray(starts), trace_file=trace_file)
    finally:
        if trace_file is not None:
            trace_file.close()

    best = None
    best_key = None
    for idx, res in enumerate(results):
        if res.certificate.termination == ITERATION_CAP:
            continue
        x, support = round_to_power(res.w, problem, config.zero_tol)
        power_term = float(problem.c_tilde @ x)
        score = (k - len(support)) + power_term
        key = (score, power_term, idx)
        if best_key is None or key < best_key:
            best_key = key
            best = (x, support, score, idx)
    if best is None:
        raise RuntimeError("every start hit the iteration cap")
    x, support, score, idx = best
    return MultistartResult(
        x=x,
        support=support,
        score=score,
        certificates=[r.certificate for r in results],
        best_start=idx,
        total_iterations=int(sum(r.certificate.iterations for r in results)),
    )

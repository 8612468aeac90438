"""
Complex basis pursuit denoising: min ‖x‖₁ subject to ‖Gx − y‖₂ ≤ η.

The solver runs a primal-dual (Chambolle-Pock) iteration on the scaled
operator G/√m and, every few iterations, tries to turn the current iterate
into a certified solution: first by restoring feasibility along a
least-squares correction, then by polishing on the detected support. A
duality gap certificate decides convergence.
"""

import math
from typing import Iterable, Sequence

import numpy as np
import scipy.linalg
import scipy.optimize

from .errors import InfeasiblePointError, InvalidProblemError
from .models import (
    BpdnProblem,
    ComplexArray,
    MeasurementMatrix,
    SolverConfig,
    SolverResult,
    SolverStatus,
)
from .sampling import generator

NORM_ESTIMATE_MARGIN = 1.01
POLISH_ROUNDS = 5


def l1_norm(x: ComplexArray) -> float:
    """Complex ℓ1 norm Σ sqrt(Re² + Im²)."""
    return float(np.sum(np.abs(x)))


def least_squares(
    matrix: MeasurementMatrix | ComplexArray, samples: ComplexArray
) -> ComplexArray:
    """
    Minimum-norm minimizer of ‖Gx − y‖₂.

    Uses LAPACK's rank-revealing complete orthogonal factorization (gelsy),
    so rank-deficient and underdetermined systems are handled.
    """
    entries = (
        matrix.entries if isinstance(matrix, MeasurementMatrix) else np.asarray(matrix)
    )
    y = np.asarray(samples, dtype=np.complex128).reshape(-1)
    if entries.shape[0] < 1:
        raise InvalidProblemError("least squares needs at least one row")
    if entries.shape[0] != len(y):
        raise InvalidProblemError(
            f"{len(y)} samples for a matrix with {entries.shape[0]} rows"
        )
    if entries.shape[1] == 0:
        return np.zeros(0, dtype=np.complex128)
    solution, _, _, _ = scipy.linalg.lstsq(entries, y, lapack_driver="gelsy")
    return np.asarray(solution, dtype=np.complex128)


def soft_threshold(v: ComplexArray, threshold: float) -> ComplexArray:
    """Shrink moduli by ``threshold`` while keeping phases."""
    magnitude = np.abs(v)
    factor = np.zeros_like(magnitude)
    np.divide(threshold, magnitude, out=factor, where=magnitude > 0)
    return v * np.maximum(0.0, 1.0 - factor)


def operator_norm_estimate(a: ComplexArray, iterations: int) -> float:
    """Power iteration on AᴴA from a fixed pseudo-random start vector."""
    cols = a.shape[1]
    if cols == 0 or a.shape[0] == 0:
        return 0.0
    rng = generator(0)
    v = rng.standard_normal(cols) + 1j * rng.standard_normal(cols)
    v /= np.linalg.norm(v)
    estimate = 0.0
    for _ in range(iterations):
        w = a.conj().T @ (a @ v)
        norm = np.linalg.norm(w)
        if norm == 0:
            break
        v = w / norm
        estimate = math.sqrt(norm)
    return max(estimate, float(np.linalg.norm(a @ v)))


def _project_ball(v: ComplexArray, center: ComplexArray, radius: float) -> ComplexArray:
    offset = v - center
    norm = np.linalg.norm(offset)
    if norm <= radius:
        return v
    return center + offset * (radius / norm)


def _feasibility_tolerance(problem: BpdnProblem, cfg: SolverConfig) -> float:
    return cfg.feas_tol * max(1.0, float(np.linalg.norm(problem.samples)))


def _residual(problem: BpdnProblem, x: ComplexArray) -> float:
    return float(np.linalg.norm(problem.matrix.entries @ x - problem.samples))


def _dual_bound(problem: BpdnProblem, nu: ComplexArray) -> float:
    """Best lower bound on the optimum along the ray t·ν, t ≥ 0."""
    g = problem.matrix.entries
    scale = float(np.max(np.abs(g.conj().T @ nu))) if g.shape[1] else 0.0
    value = float(np.real(np.vdot(nu, problem.samples)))
    value -= problem.eta * float(np.linalg.norm(nu))
    if value <= 0 or scale == 0:
        return 0.0
    return value / scale


def _support(x: ComplexArray, support_tol: float) -> np.ndarray:
    magnitude = np.abs(x)
    peak = float(np.max(magnitude)) if magnitude.size else 0.0
    if peak == 0:
        return np.zeros(0, dtype=np.int64)
    return np.flatnonzero(magnitude > support_tol * peak)


def _support_cuts(x: ComplexArray, rows: int, cfg: SolverConfig) -> list[np.ndarray]:
    """
    Candidate supports of x, largest moduli first, none longer than ``rows``.

    Cuts sit at the row count, at the gap tolerance relative to ‖x‖₁ and at
    the largest relative drop between consecutive moduli.
    """
    magnitude = np.abs(x)
    support = _support(x, cfg.support_tol)
    if support.size == 0:
        return []
    order = support[np.argsort(-magnitude[support], kind="stable")]
    limit = min(order.size, rows)
    ranked = magnitude[order[:limit]]
    sizes = {limit}
    above = int(np.count_nonzero(ranked > cfg.gap_tol * float(np.sum(magnitude))))
    if above:
        sizes.add(above)
    if limit > 1:
        sizes.add(int(np.argmin(ranked[1:] / ranked[:-1])) + 1)
    return [np.sort(order[:k]) for k in sorted(sizes)]


def _support_certificate(
    problem: BpdnProblem, x: ComplexArray, support: np.ndarray
) -> ComplexArray:
    # minimum-norm ν with (Gᴴν)_S = phases of x on S
    phases = x[support] / np.abs(x[support])
    g_support = problem.matrix.entries[:, support]
    nu, _, _, _ = scipy.linalg.lstsq(
        g_support.conj().T, phases, lapack_driver="gelsy"
    )
    return np.asarray(nu, dtype=np.complex128)


def _certificate(
    problem: BpdnProblem,
    x: ComplexArray,
    dual_candidates: Iterable[ComplexArray],
    cfg: SolverConfig,
) -> tuple[float, ComplexArray | None]:
    """The gap of x and the dual vector attaining it (None for ν = 0)."""
    x = np.asarray(x, dtype=np.complex128).reshape(-1)
    if len(x) != problem.matrix.cols:
        raise InvalidProblemError(
            f"point of length {len(x)} for {problem.matrix.cols} columns"
        )
    residual = problem.samples - problem.matrix.entries @ x
    residual_norm = float(np.linalg.norm(residual))
    if residual_norm > problem.eta + _feasibility_tolerance(problem, cfg):
        raise InfeasiblePointError(
            f"residual {residual_norm:.6g} exceeds eta {problem.eta:.6g}"
        )
    candidates: list[ComplexArray] = [residual]
    candidates.extend(
        _support_certificate(problem, x, support)
        for support in _support_cuts(x, problem.matrix.rows, cfg)
    )
    candidates.extend(np.asarray(nu, dtype=np.complex128) for nu in dual_candidates)
    best, best_nu = 0.0, None
    for nu in candidates:
        bound = _dual_bound(problem, nu)
        if bound > best:
            best, best_nu = bound, nu
    return max(0.0, l1_norm(x) - best), best_nu


def certificate_gap(
    problem: BpdnProblem,
    x: ComplexArray,
    dual_candidates: Iterable[ComplexArray] = (),
    cfg: SolverConfig | None = None,
) -> float:
    """
    Duality-based upper bound on ‖x‖₁ − OPT.

    Every candidate ν is rescaled so that ‖Gᴴν‖_∞ ≤ 1, which makes
    Re⟨ν, y⟩ − η‖ν‖₂ a lower bound on the optimum. Candidates are the
    residual direction y − Gx, support certificates of x on a few pruned
    supports, ν = 0 and any extra vectors passed in; the best bound wins.

    Args:
        problem: BPDN instance
        x: Point to certify, feasible up to the configured tolerance
        dual_candidates: Additional dual vectors, e.g. ``SolverResult.dual``
        cfg: Tolerances; defaults to SolverConfig()

    Returns:
        Nonnegative gap

    Raises:
        InfeasiblePointError: If ‖Gx − y‖₂ exceeds η by more than the tolerance
    """
    gap, _ = _certificate(problem, x, dual_candidates, cfg or SolverConfig())
    return gap


def _restore(
    problem: BpdnProblem, x: ComplexArray, tolerance: float
) -> ComplexArray:
    """Move x along the least-squares correction until ‖Gx − y‖₂ reaches η."""
    g, y, eta = problem.matrix.entries, problem.samples, problem.eta
    if _residual(problem, x) <= eta + tolerance:
        return x
    correction = least_squares(g, y - g @ x)
    start = g @ x - y
    step = g @ correction

    def excess(t: float) -> float:
        return float(np.linalg.norm(start + t * step)) - eta

    if excess(1.0) >= 0:
        return x + correction
    t = scipy.optimize.brentq(excess, 0.0, 1.0, xtol=1e-15)
    return x + t * correction


def _multiplier(
    g_support: ComplexArray,
    y: ComplexArray,
    eta: float,
    factor: tuple[np.ndarray, bool],
    rhs: ComplexArray,
    phases: ComplexArray,
    tolerance: float,
) -> float | None:
    """The μ ≥ 0 at which the reduced residual equals η, or None if unreachable."""

    def excess(mu: float) -> float:
        reduced = scipy.linalg.cho_solve(factor, rhs - mu * phases)
        return float(np.linalg.norm(g_support @ reduced - y)) - eta

    base = excess(0.0)
    if base > tolerance:
        return None
    if base >= 0:
        return 0.0
    upper = 1.0
    for _ in range(200):
        if excess(upper) >= 0:
            return float(scipy.optimize.brentq(excess, 0.0, upper, xtol=1e-15))
        upper *= 2
    return None


def _polish(
    problem: BpdnProblem, x: ComplexArray, cfg: SolverConfig
) -> ComplexArray | None:
    """
    Solve the reduced optimality system on the support of x.

    On a fixed support S with phases z the optimum has the form
    x_S(μ) = (G_SᴴG_S)⁻¹(G_Sᴴy − μz) with μ ≥ 0 chosen so that the residual
    equals η; the phases are refreshed for a few rounds.
    """
    g, y, eta = problem.matrix.entries, problem.samples, problem.eta
    support = _support(x, cfg.support_tol)
    if support.size == 0 or support.size > g.shape[0]:
        return None
    g_support = g[:, support]
    try:
        factor = scipy.linalg.cho_factor(g_support.conj().T @ g_support)
    except scipy.linalg.LinAlgError:
        return None
    rhs = g_support.conj().T @ y
    phases = x[support] / np.abs(x[support])
    tolerance = _feasibility_tolerance(problem, cfg)
    polished: ComplexArray | None = None
    for _ in range(POLISH_ROUNDS):
        mu = _multiplier(g_support, y, eta, factor, rhs, phases, tolerance)
        if mu is None:
            return polished
        reduced = scipy.linalg.cho_solve(factor, rhs - mu * phases)
        polished = np.zeros_like(x)
        polished[support] = reduced
        magnitude = np.abs(reduced)
        if np.any(magnitude == 0):
            break
        refreshed = reduced / magnitude
        if np.allclose(refreshed, phases, rtol=0, atol=1e-14):
            break
        phases = refreshed
    return polished


def _result(
    problem: BpdnProblem,
    x: ComplexArray,
    iterations: int,
    gap: float,
    status: SolverStatus,
    dual: ComplexArray | None = None,
) -> SolverResult:
    return SolverResult(
        x=x,
        objective=l1_norm(x),
        residual_norm=_residual(problem, x),
        iterations=iterations,
        certificate_gap=gap,
        status=status,
        dual=dual,
    )


def _certify(
    problem: BpdnProblem,
    x: ComplexArray,
    duals: Sequence[ComplexArray],
    cfg: SolverConfig,
) -> tuple[float, ComplexArray | None]:
    try:
        return _certificate(problem, x, duals, cfg)
    except InfeasiblePointError:
        return math.inf, None


def solve_bpdn(problem: BpdnProblem, cfg: SolverConfig | None = None) -> SolverResult:
    """
    Solve min ‖x‖₁ subject to ‖Gx − y‖₂ ≤ η.

    Never raises on non-convergence: if max_iter is exhausted the best
    certified iterate is returned with status ``max_iter``. If even the
    least-squares residual exceeds η the least-squares point is returned
    with status ``infeasible_detected``.

    Args:
        problem: Validated BPDN instance
        cfg: Solver tolerances and step parameters

    Returns:
        SolverResult for the unscaled problem
    """
    cfg = cfg or SolverConfig()
    g, y, eta = problem.matrix.entries, problem.samples, problem.eta
    rows, cols = g.shape
    zero = np.zeros(cols, dtype=np.complex128)
    if eta >= float(np.linalg.norm(y)):
        return _result(problem, zero, 0, 0.0, SolverStatus.CONVERGED)

    tolerance = _feasibility_tolerance(problem, cfg)
    x_ls = least_squares(g, y)
    if _residual(problem, x_ls) > eta + tolerance:
        return _result(problem, x_ls, 0, math.inf, SolverStatus.INFEASIBLE_DETECTED)

    scale = 1.0 / math.sqrt(rows)
    a = g * scale
    b = y * scale
    radius = eta * scale
    norm = operator_norm_estimate(a, cfg.power_iterations)
    step = cfg.step_safety / (NORM_ESTIMATE_MARGIN * norm)
    a_adjoint = a.conj().T

    x = zero.copy()
    x_bar = zero.copy()
    nu = np.zeros(rows, dtype=np.complex128)
    best_x = x_ls
    best_gap, best_dual = _certify(problem, x_ls, (), cfg)

    for iteration in range(1, cfg.max_iter + 1):
        shifted = nu + step * (a @ x_bar)
        nu = shifted - step * _project_ball(shifted / step, b, radius)
        x_next = soft_threshold(x - step * (a_adjoint @ nu), step)
        x_bar = x_next + cfg.relaxation * (x_next - x)
        x = x_next

        if iteration % cfg.check_every and iteration != cfg.max_iter:
            continue
        # the CP dual iterate carries the opposite sign convention
        duals = (-nu * scale,)
        restored = _restore(problem, x, tolerance)
        for candidate in (restored, _polish(problem, restored, cfg)):
            if candidate is None:
                continue
            gap, dual = _certify(problem, candidate, duals, cfg)
            if gap < best_gap:
                best_x, best_gap, best_dual = candidate, gap, dual
        if best_gap <= cfg.gap_tol * max(1.0, l1_norm(best_x)):
            return _result(
                problem, best_x, iteration, best_gap, SolverStatus.CONVERGED, best_dual
            )

    return _result(
        problem, best_x, cfg.max_iter, best_gap, SolverStatus.MAX_ITER, best_dual
    )


class PrimalDualSolver:
    """``BpdnSolver`` backed by ``solve_bpdn`` with a fixed configuration."""

    def __init__(self, cfg: SolverConfig | None = None):
        self.cfg = cfg or SolverConfig()

    def solve(self, problem: BpdnProblem) -> SolverResult:
        return solve_bpdn(problem, self.cfg)

"""Construction of generalized Gaussian rules for Muntz systems.

The rule for exponents ``lam_0..lam_{2N+1}`` and weight ``x**beta`` is the
root of the moment-matching map

    F(z)_n = sum_k L_n^beta(x_k) w_k - m_n,      n = 0..2N+1,

where ``z`` stacks the N+1 nodes and weights.  Newton's equation is solved
in a rescaled variable: the Jacobian columns are premultiplied by powers of
``x`` and ``w`` so that nothing blows up when nodes crowd the origin, which
is the whole point of these rules.  The step is damped by a geometric
schedule after a configurable number of full steps, and a feasibility
safeguard halves any step that would push a node out of (0, 1), cross two
nodes, or kill a weight.

A Newton solve alone only converges locally, so the driver walks a homotopy
from the classical Gauss-Jacobi rule: the exponents are blended with the
integers, ``alpha*lam_n + (1-alpha)*n``, and ``alpha`` steps from 0 to 1
with adaptive step control, re-solving at each stage from the previous
rule.  At ``alpha = 0`` the basis degenerates to polynomials and the
Gauss-Jacobi rule is already exact, so the path starts at a known root.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .classical import gauss_jacobi
from .errors import (
    ContinuationFailedError,
    DomainError,
    NewtonDivergedError,
    NonFiniteSampleError,
    SingularMatrixError,
)
from . import dd, refine
from .muntz import (
    EvalConfig,
    _basis_batch,
    _dd_axis_sum,
    _moments_dd,
    ensure_admissible,
    moments,
    scaled_derivatives,
)
from .numerics import solve_dense


@dataclass(frozen=True)
class RuleSpec:
    """Exponent sequence (even length, order as given) and weight exponent."""

    exponents: np.ndarray
    beta: float = 0.0

    def __post_init__(self):
        lam = ensure_admissible(self.exponents, self.beta)
        if lam.size % 2 != 0 or lam.size < 2:
            raise ValueError(f"need an even number (>= 2) of exponents, got {lam.size}")
        lam = lam.copy()
        lam.setflags(write=False)
        object.__setattr__(self, "exponents", lam)
        object.__setattr__(self, "beta", float(self.beta))

    @property
    def n_nodes(self) -> int:
        return self.exponents.size // 2


@dataclass(frozen=True)
class RuleDiagnostics:
    residual: float
    continuation_steps: int
    newton_iterations: int


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes in (0, 1), positive weights, and the spec they are exact for."""

    nodes: np.ndarray
    weights: np.ndarray
    spec: RuleSpec
    diagnostics: RuleDiagnostics

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float).copy()
        weights = np.asarray(self.weights, dtype=float).copy()
        if nodes.shape != weights.shape or nodes.ndim != 1:
            raise ValueError("nodes and weights must be 1-D arrays of equal length")
        if not _feasible(nodes, weights):
            raise ValueError("rule violates feasibility: nodes ascending in (0,1), weights > 0")
        nodes.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)


@dataclass(frozen=True)
class NewtonConfig:
    """Damped-Newton controls.

    The residual target is ``tolerance * max(1, max|moment|)``; damping uses
    the schedule ``damping ** max(0, k - damping_onset)`` so the first
    ``damping_onset`` iterations take full steps.  When the residual stops
    improving for ``stall_iterations`` in a row, the best iterate is
    accepted if it sits within ``stall_factor`` of the target, otherwise
    the solve is declared divergent without burning the remaining budget.
    The evaluator's noise floor rises when continuation paths carry
    near-coincident exponents, so the stall window is generous; the final
    polish restores full accuracy at the end of the walk.
    """

    tolerance: float = 1e-14
    max_iterations: int = 50
    damping: float = 0.5
    damping_onset: int = 8
    max_step_halvings: int = 30
    stall_iterations: int = 3
    stall_factor: float = 50.0
    polish_iterations: int = 4

    def __post_init__(self):
        if not (0.0 < self.damping < 1.0):
            raise ValueError("damping must lie in (0, 1)")
        if self.damping_onset < 0 or self.max_iterations < 1 or self.max_step_halvings < 0:
            raise ValueError("iteration controls must be non-negative (max_iterations >= 1)")
        if self.stall_iterations < 1 or self.stall_factor < 1.0:
            raise ValueError("need stall_iterations >= 1 and stall_factor >= 1")
        if self.polish_iterations < 0:
            raise ValueError("polish_iterations must be >= 0")


@dataclass(frozen=True)
class ContinuationConfig:
    """Adaptive blend-stepping controls for the homotopy walk.

    A step counts as fast when its Newton solve needed at most
    ``fast_iterations``; a quadratically convergent solve from an O(step)
    start needs about five, so that is the growth trigger.
    """

    step_initial: float = 0.1
    step_min: float = 1e-4
    shrink: float = 0.5
    growth: float = 2.0
    fast_iterations: int = 5

    def __post_init__(self):
        if not (0.0 < self.step_min <= self.step_initial <= 1.0):
            raise ValueError("need 0 < step_min <= step_initial <= 1")
        if not (0.0 < self.shrink < 1.0 <= self.growth):
            raise ValueError("need 0 < shrink < 1 <= growth")


@dataclass(frozen=True)
class NewtonResult:
    nodes: np.ndarray
    weights: np.ndarray
    iterations: int
    residual: float
    residual_history: tuple


def continuation_exponents(exponents, alpha: float) -> np.ndarray:
    """Blend toward the integer ladder: ``alpha*lam_n + (1-alpha)*n``."""
    lam = np.atleast_1d(np.asarray(exponents, dtype=float))
    alpha = float(alpha)
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    return alpha * lam + (1.0 - alpha) * np.arange(lam.size, dtype=float)


def _feasible(nodes, weights) -> bool:
    return bool(
        np.all(np.isfinite(nodes))
        and np.all(np.isfinite(weights))
        and nodes.size > 0
        and nodes[0] > 0.0
        and nodes[-1] < 1.0
        and np.all(np.diff(nodes) > 0.0)
        and np.all(weights > 0.0)
    )


def _predict(alpha, nodes, weights, previous, alpha_next):
    """Secant extrapolation of the path to the next blend value.

    Nodes near the origin decay roughly exponentially in alpha, so the
    extrapolation runs in log space, which also preserves positivity.
    Falls back to the current iterate when there is no usable history or
    the prediction leaves the feasible region.
    """
    if previous is None:
        return nodes, weights
    alpha_prev, nodes_prev, weights_prev = previous
    gap = alpha - alpha_prev
    if gap <= 0.0:
        return nodes, weights
    ratio = (alpha_next - alpha) / gap
    x_pred = np.exp(np.log(nodes) + ratio * (np.log(nodes) - np.log(nodes_prev)))
    w_pred = np.exp(np.log(weights) + ratio * (np.log(weights) - np.log(weights_prev)))
    if _feasible(x_pred, w_pred):
        return x_pred, w_pred
    return nodes, weights


def assemble(nodes, weights, exponents, beta, moment_vector, config: EvalConfig | None = None,
             compensated: bool = False):
    """Residual vector F and rescaled Jacobian for the current iterate.

    One batched basis sweep per call serves every row: the value matrix
    gives both F and the right Jacobian block, and the scaled-derivative
    recurrence turns the same values into the left block

        [ x L' - (beta/2) L  |  L ].

    The true Jacobian is this matrix times positive diagonal scalings, so
    solving with the rescaled one loses nothing and stays accurate for
    nodes near 0.

    With ``compensated=True`` the basis evaluation and the residual
    contraction run in double-double, pushing the residual's noise floor
    well below one ulp of its terms; ``moment_vector`` may then also be an
    (hi, lo) pair so the moments do not reintroduce rounding.  The Jacobian
    never needs compensation: its errors only perturb the Newton direction.
    """
    cfg = config or EvalConfig()
    nodes = np.asarray(nodes, dtype=float)
    weights = np.asarray(weights, dtype=float)
    lam = np.asarray(exponents, dtype=float)
    if isinstance(moment_vector, tuple):
        m_pair = (np.asarray(moment_vector[0], dtype=float), np.asarray(moment_vector[1], dtype=float))
    else:
        m_pair = (np.asarray(moment_vector, dtype=float), np.zeros_like(np.asarray(moment_vector, dtype=float)))
    if not _feasible(nodes, weights):
        raise DomainError("iterate is infeasible: need ascending nodes in (0,1) and positive weights")
    if lam.size != 2 * nodes.size or m_pair[0].size != lam.size:
        raise ValueError("need len(exponents) = len(moments) = 2 * len(nodes)")

    beta = float(beta)
    shifted = lam + 0.5 * beta
    basis, basis_low, _, _ = _basis_batch(shifted, nodes, cfg, compensated=compensated)
    x_derivative = scaled_derivatives(basis, lam, beta)

    weighted = nodes ** (-0.5 * beta) * weights
    if compensated:
        terms = dd.mul_double((basis, basis_low), weighted[None, :])
        row = _dd_axis_sum(terms, axis=1)
        residual = dd.to_double(dd.add(row, dd.negate(m_pair)))
    else:
        residual = basis @ weighted - (m_pair[0] + m_pair[1])
    jacobian = np.hstack([x_derivative - 0.5 * beta * basis, basis])
    return residual, jacobian


def newton_solve(
    nodes,
    weights,
    exponents,
    beta,
    moment_vector,
    newton: NewtonConfig | None = None,
    eval_config: EvalConfig | None = None,
) -> NewtonResult:
    """Damped Newton iteration on the moment-matching map.

    The rescaled Newton equation is solved directly; the physical update
    directions are recovered through the same diagonal scalings,

        dx = x**(beta/2+1) / w * p_nodes,     dw = x**(beta/2) * p_weights,

    then applied with the damping schedule.  Any step that would leave the
    feasible region is halved up to ``max_step_halvings`` times before the
    iteration is declared divergent.  Raises ``NewtonDivergedError`` when
    the iteration budget or the safeguard is exhausted.
    """
    ncfg = newton or NewtonConfig()
    cfg = eval_config or EvalConfig()
    x = np.array(nodes, dtype=float, copy=True)
    w = np.array(weights, dtype=float, copy=True)
    m = np.asarray(moment_vector, dtype=float)
    n = x.size
    target = ncfg.tolerance * max(1.0, float(np.abs(m).max()))

    residual, jacobian = assemble(x, w, exponents, beta, m, cfg)
    res_norm = float(np.abs(residual).max())
    history = [res_norm]
    if res_norm <= target:
        return NewtonResult(x, w, 0, res_norm, tuple(history))

    best = (x.copy(), w.copy(), res_norm)
    stalled = 0
    beta = float(beta)
    for iteration in range(1, ncfg.max_iterations + 1):
        step_scale = ncfg.damping ** max(0, iteration - ncfg.damping_onset)
        try:
            p_scaled = solve_dense(jacobian, -residual)
        except SingularMatrixError as exc:
            raise NewtonDivergedError(
                f"Jacobian became singular: {exc}", iterations=iteration, residual=res_norm
            ) from exc
        dx = x ** (0.5 * beta + 1.0) / w * p_scaled[:n]
        dw = x ** (0.5 * beta) * p_scaled[n:]

        halvings = 0
        while True:
            x_trial = x + step_scale * dx
            w_trial = w + step_scale * dw
            if _feasible(x_trial, w_trial):
                break
            halvings += 1
            if halvings > ncfg.max_step_halvings:
                raise NewtonDivergedError(
                    "feasibility safeguard exhausted", iterations=iteration, residual=res_norm
                )
            step_scale *= 0.5

        x, w = x_trial, w_trial
        residual, jacobian = assemble(x, w, exponents, beta, m, cfg)
        res_norm = float(np.abs(residual).max())
        if not np.isfinite(res_norm):
            raise NewtonDivergedError("residual became non-finite", iterations=iteration, residual=res_norm)
        history.append(res_norm)
        if res_norm <= target:
            return NewtonResult(x, w, iteration, res_norm, tuple(history))

        if res_norm < 0.9 * best[2]:
            best = (x.copy(), w.copy(), res_norm)
            stalled = 0
        else:
            stalled += 1
            if stalled >= ncfg.stall_iterations:
                if best[2] <= ncfg.stall_factor * target:
                    return NewtonResult(best[0], best[1], iteration, best[2], tuple(history))
                raise NewtonDivergedError(
                    f"stalled at residual {best[2]:.3e} (target {target:.3e})",
                    iterations=iteration,
                    residual=best[2],
                )

    raise NewtonDivergedError(
        f"no convergence in {ncfg.max_iterations} iterations (residual {res_norm:.3e})",
        iterations=ncfg.max_iterations,
        residual=res_norm,
    )


def compute_rule(
    spec: RuleSpec,
    newton: NewtonConfig | None = None,
    continuation: ContinuationConfig | None = None,
    eval_config: EvalConfig | None = None,
) -> QuadratureRule:
    """Build the generalized Gaussian rule for ``spec`` by homotopy walking.

    Starts from the classical Gauss-Jacobi rule (the exact root for the
    integer-exponent blend), then advances the blend parameter with
    adaptive steps: shrink on a diverged Newton solve, grow after fast
    convergence, and always land the final step exactly on 1.  Raises
    ``ContinuationFailedError`` (carrying the last good state) if the step
    size falls below its minimum.
    """
    ncfg = newton or NewtonConfig()
    ccfg = continuation or ContinuationConfig()
    cfg = eval_config or EvalConfig()

    # The rule only depends on the exponent set, and a sorted sequence keeps
    # the blended tracks alpha*lam_n + (1-alpha)*n from crossing mid-walk
    # (crossings create near-coincident exponents whose basis is nearly
    # dependent, stalling Newton); walk the sorted sequence internally.
    walk_spec = RuleSpec(np.sort(spec.exponents), spec.beta)

    start = gauss_jacobi(spec.n_nodes, spec.beta)
    x = start.nodes.copy()
    w = start.weights.copy()

    alpha = 0.0
    step = ccfg.step_initial
    steps_taken = 0
    total_iterations = 0
    res_norm = 0.0
    cooldown = 0  # successes required before re-growing after a failed step
    previous = None  # (alpha, nodes, weights) of the step before the current one

    while alpha < 1.0:
        alpha_next = min(alpha + step, 1.0)
        lam_alpha = continuation_exponents(walk_spec.exponents, alpha_next)
        m_alpha = moments(lam_alpha, walk_spec.beta)
        x0, w0 = _predict(alpha, x, w, previous, alpha_next)
        try:
            result = newton_solve(x0, w0, lam_alpha, walk_spec.beta, m_alpha, ncfg, cfg)
        except NewtonDivergedError:
            step *= ccfg.shrink
            cooldown = 3
            if step < ccfg.step_min:
                raise ContinuationFailedError(
                    f"step size fell below {ccfg.step_min} at alpha = {alpha}",
                    alpha=alpha,
                    nodes=x,
                    weights=w,
                )
            continue
        previous = (alpha, x, w)
        x, w = result.nodes, result.weights
        alpha = alpha_next
        steps_taken += 1
        total_iterations += result.iterations
        res_norm = result.residual
        if result.iterations <= ccfg.fast_iterations:
            if cooldown > 0:
                cooldown -= 1
            else:
                step *= ccfg.growth

    x, w, res_norm, polish_iters = _polish(x, w, walk_spec, ncfg, cfg, res_norm)

    return QuadratureRule(
        nodes=x,
        weights=w,
        spec=spec,
        diagnostics=RuleDiagnostics(
            residual=res_norm,
            continuation_steps=steps_taken,
            newton_iterations=total_iterations + polish_iters,
        ),
    )


def _polish(x, w, spec: RuleSpec, ncfg: NewtonConfig, cfg: EvalConfig, res_norm: float):
    """Squeeze out the numerical noise floor at the solved rule.

    The residual at a near-converged rule lives in a near-null Jacobian
    direction: ulp-level evaluation systematics park the smallest weight up
    to ~1e-11 relative away from the true rule.  The last Newton steps
    therefore use a bias-free residual from the arbitrary-precision pole
    expansion when one is available (distinct or doubly repeated exponents),
    and a compensated double-double residual otherwise.  Newton directions
    stay in ordinary arithmetic; any trouble aborts polishing and keeps the
    walk's result.
    """
    if ncfg.polish_iterations == 0:
        return x, w, res_norm, 0

    def residual_fn(xc, wc):
        exact = refine.exact_residual(xc, wc, spec.exponents, spec.beta)
        if exact is not None:
            return exact
        res, _ = assemble(xc, wc, spec.exponents, spec.beta, m_pair, cfg, compensated=True)
        return res

    m_pair = _moments_dd(spec.exponents, spec.beta)
    beta = spec.beta
    n = x.size
    best = (x, w, math.inf)
    previous = math.inf
    iterations = 0
    for _ in range(ncfg.polish_iterations):
        try:
            residual = residual_fn(x, w)
            res = float(np.abs(residual).max())
            if res < best[2]:
                best = (x, w, res)
            if res >= 0.25 * previous:
                break  # residual stopped contracting; the floor is reached
            previous = res
            _, jacobian = assemble(x, w, spec.exponents, beta, m_pair, cfg)
            p_scaled = solve_dense(jacobian, -residual)
        except (SingularMatrixError, DomainError):
            break
        iterations += 1
        x_trial = x + x ** (0.5 * beta + 1.0) / w * p_scaled[:n]
        w_trial = w + x ** (0.5 * beta) * p_scaled[n:]
        if not _feasible(x_trial, w_trial):
            break
        x, w = x_trial, w_trial
    try:
        residual = residual_fn(x, w)
        res = float(np.abs(residual).max())
        if res < best[2]:
            best = (x, w, res)
    except (SingularMatrixError, DomainError):
        pass
    if not np.isfinite(best[2]):
        return x, w, res_norm, iterations
    return best[0], best[1], best[2], iterations


def transform_to_unit_weight(rule: QuadratureRule) -> QuadratureRule:
    """Map a weight ``x**beta`` rule to a unit-weight rule.

    With ``kappa = 1/(beta+1)`` the substitution ``x -> x**kappa`` sends the
    rule to nodes ``x**(1/kappa)`` and weights ``w/kappa``, exact for the
    Muntz space of the scaled exponents ``kappa * lam`` under weight 1.
    """
    beta = rule.spec.beta
    kappa = 1.0 / (beta + 1.0)
    return QuadratureRule(
        nodes=rule.nodes ** (1.0 / kappa),
        weights=rule.weights / kappa,
        spec=RuleSpec(exponents=kappa * rule.spec.exponents, beta=0.0),
        diagnostics=rule.diagnostics,
    )


def apply_rule(rule: QuadratureRule, f: Callable[[float], float]) -> float:
    """Weighted sum ``sum_k f(x_k) w_k``; rejects non-finite samples."""
    samples = np.array([f(float(x)) for x in rule.nodes], dtype=float)
    if not np.all(np.isfinite(samples)):
        bad = rule.nodes[~np.isfinite(samples)]
        raise NonFiniteSampleError(f"integrand not finite at nodes {bad}")
    return float(samples @ rule.weights)

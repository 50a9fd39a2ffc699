"""Stable evaluation of Muntz-Legendre bases and their exact moments.

A Muntz system ``{x**l0, ..., x**lN}`` generally admits no three-term
recurrence, so the orthogonal basis elements are computed from their
contour-integral representation: the integration path is deformed to a
horizontal line ``Re(t) = sigma`` below every exponent, which turns each
basis value into an oscillatory half-line integral

    L_n(x) = (x**sigma / pi) * Im{ integral_0^inf f_n(t, w) e^{it} dt },

with ``w = -log x``.  The half-line splits into unit panels handled by
Gauss-Legendre plus an exponentially damped vertical tail handled by
Gauss-Laguerre.  Writing ``sigma = lam_min - theta/w`` removes the
``w -> 0`` singularity, and ``theta > 0`` is chosen per evaluation point by
minimizing a growth-versus-singularity estimate with Nelder-Mead.

The vertical tail launched at ``t = a`` passes the integrand's poles, which
sit on the imaginary axis at heights up to ``theta + w*(max(lam)-min(lam))``.
If ``a`` is too short the tail integrand grows through many orders of
magnitude before ``exp(-y)`` kills it and no fixed-order rule can resolve
the cancellation, so the segment length doubles per evaluation point until
the sampled tail is either bump-free or negligibly small.

Because ``f_{n+1}`` is ``f_n`` times a single rational factor, one sweep of
updates over the sampled integrand yields the whole basis at a point for the
cost of the last element.  The same sweep is batched across evaluation
points, which is what the rule solver calls.

Derivatives never need their own contour pass: ``x * L_n'(x)`` follows from
the values by a two-term recurrence.  Weighted moments follow from the
closed form ``integral L_n(x) x**lam dx = -W_n(-lam-1)`` and its ratio
recurrence, so no numerical integration enters the solver anywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import dd
from .classical import gauss_laguerre, gauss_legendre
from .errors import (
    DomainError,
    InadmissibleExponentError,
    InadmissibleSequenceError,
    LengthMismatchError,
    PoleHitError,
)
from .numerics import nelder_mead_min


@dataclass(frozen=True)
class EvalConfig:
    """Contour-evaluation parameters.

    ``panel_width * panel_count`` is the base length of the oscillatory
    segment; it doubles (up to ``max_segment_doublings`` times) at
    evaluation points whose tail integrand would otherwise be unresolvable.
    The tail beyond the segment decays like ``exp(-y)`` and goes to
    Gauss-Laguerre.
    """

    panel_width: float = 1.0
    panel_count: int = 32
    panel_order: int = 24
    laguerre_order: int = 48
    theta_init: float = 1.0
    theta_min: float = 1e-6
    theta_max: float = 40.0
    theta_tolerance: float = 1e-6
    theta_max_evals: int = 200
    omega_floor: float = 1e-14
    max_segment_doublings: int = 5
    tail_bump_factor: float = 64.0
    tail_negligible: float = 1e-18

    def __post_init__(self):
        if not (self.panel_width > 0.0 and self.panel_count >= 1):
            raise ValueError("panel_width must be positive and panel_count >= 1")
        if self.panel_order < 1 or self.laguerre_order < 1:
            raise ValueError("quadrature orders must be >= 1")
        if not (0.0 < self.theta_min < self.theta_max):
            raise ValueError("theta bounds must satisfy 0 < theta_min < theta_max")
        if self.omega_floor < 0.0:
            raise ValueError("omega_floor must be >= 0")
        if self.max_segment_doublings < 0:
            raise ValueError("max_segment_doublings must be >= 0")


@dataclass(frozen=True)
class EvalResult:
    """Basis values at one point plus the contour parameters that were used."""

    values: np.ndarray
    theta_used: float
    sigma_used: float


@dataclass(frozen=True)
class ThetaSelection:
    theta: float
    objective: float
    converged: bool


def _as_exponents(exponents) -> np.ndarray:
    lam = np.atleast_1d(np.asarray(exponents, dtype=float))
    if lam.ndim != 1 or lam.size == 0:
        raise ValueError("exponent sequence must be a non-empty 1-D array")
    if not np.all(np.isfinite(lam)):
        raise ValueError("exponents must be finite")
    return lam


def admissible(exponents, beta: float) -> bool:
    """True when every weighted moment integral converges.

    The sequence is usable with weight ``x**beta`` iff ``min(lam) + beta > -1``:
    each basis element behaves like ``x**lam`` near zero, so this is exactly
    integrability of the moments (and of the quadrature problem itself).
    """
    lam = _as_exponents(exponents)
    return bool(np.min(lam) + float(beta) > -1.0)


def ensure_admissible(exponents, beta: float) -> np.ndarray:
    lam = _as_exponents(exponents)
    if np.min(lam) + float(beta) <= -1.0:
        raise InadmissibleSequenceError(
            f"min exponent {np.min(lam)} with beta {beta} gives a divergent weighted moment; "
            "need min(lambda) + beta > -1"
        )
    return lam


def rational_kernel(exponents, t: complex) -> complex:
    """Product ``prod_{k<n} (t+lam_k+1)/(t-lam_k) * 1/(t-lam_n)``, left to right.

    This is the rational function whose contour integral against ``x**t``
    defines the basis element for the prefix ``exponents``; its value at
    ``-lam-1`` gives weighted moments in closed form.
    """
    lam = _as_exponents(exponents)
    tc = complex(t)
    for lam_k in lam:
        if tc == complex(lam_k):
            raise PoleHitError(f"t = {tc} hits the pole at exponent {lam_k}")
    result = complex(1.0)
    for lam_k in lam[:-1]:
        result *= (tc + lam_k + 1.0) / (tc - lam_k)
    return result / (tc - lam[-1])


def moment_general(exponents, lam_power: float) -> float:
    """Exact integral of the last basis element against ``x**lam_power``.

    Requires ``lam_power + lam_k > -1`` for every exponent in the prefix,
    which also keeps the kernel argument away from every pole.  The result
    is zero whenever ``lam_power`` equals an earlier exponent, which is the
    orthogonality of the basis to the pure powers it was built from.
    """
    lam = _as_exponents(exponents)
    lam_power = float(lam_power)
    if np.min(lam) + lam_power <= -1.0:
        raise InadmissibleExponentError(
            f"lam_power {lam_power} gives min(lambda) + lam_power <= -1; integral diverges"
        )
    return float(-rational_kernel(lam, complex(-lam_power - 1.0)).real)


def _moments_dd(exponents, beta: float):
    """Moment recurrence carried in double-double; returns an (hi, lo) pair.

    The plain recurrence accumulates a rounding random walk of ~sqrt(n) ulp,
    which is enough to bias the rule solver's smallest weight; compensated
    accumulation keeps the moments exact to well below one ulp.
    """
    lam = ensure_admissible(exponents, beta)
    beta = float(beta)
    hi = np.empty(lam.size)
    lo = np.empty(lam.size)
    den = dd.add_double(dd.two_sum(np.float64(lam[0]), np.float64(beta)), 1.0)
    m = dd.div(dd.from_double(np.float64(1.0)), den)
    hi[0], lo[0] = m
    for n in range(1, lam.size):
        den = dd.add_double(dd.two_sum(np.float64(lam[n]), np.float64(beta)), 1.0)
        m = dd.div(dd.mul_double(m, np.float64(-lam[n - 1])), den)
        hi[n], lo[n] = m
    return hi, lo


def moments(exponents, beta: float) -> np.ndarray:
    """All weighted moments ``integral_0^1 L_n^beta(x) x**beta dx`` at once.

    Closed-form ratio recurrence: the first moment is ``1/(1+lam_0+beta)``
    and each later one is the previous scaled by ``-lam_{n-1}/(1+lam_n+beta)``.
    A leading exponent equal to zero therefore kills every later moment,
    which is orthogonality to constants.
    """
    hi, lo = _moments_dd(exponents, beta)
    return hi + lo


def _theta_search(lam, lam_min, omega, cfg: EvalConfig, start: float, initial_step: float) -> ThetaSelection:
    # near-origin magnitude of the sampled integrand: numerator offsets
    # omega*(lam_min+lam+1) - theta against denominator distances
    # theta + omega*(lam - lam_min), which is |omega*(sigma - lam_v)| for
    # sigma = lam_min - theta/omega
    num_centers = omega * (lam_min + lam[:-1] + 1.0)
    den_centers = omega * (lam[:-1] - lam_min)
    last_center = omega * (lam[-1] - lam_min)
    prefactor = math.exp(math.sqrt(omega))
    growth_exponent = -lam_min * omega

    def objective(point: np.ndarray) -> float:
        theta = float(point[0])
        if theta <= 0.0:
            return math.inf
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            ratios = np.abs((theta - num_centers) / (theta + den_centers))
            magnitude = float(np.prod(ratios)) / abs(theta + last_center)
            value = prefactor * magnitude + math.exp(
                min(theta + growth_exponent, 700.0)
            ) / math.sqrt(theta)
        return value if np.isfinite(value) else math.inf

    result = nelder_mead_min(
        objective,
        np.array([start]),
        tolerance=cfg.theta_tolerance,
        max_evals=cfg.theta_max_evals,
        lower=np.array([cfg.theta_min]),
        upper=np.array([cfg.theta_max]),
        initial_step=initial_step,
    )
    return ThetaSelection(theta=float(result.x[0]), objective=result.fx, converged=result.converged)


def select_theta(exponents, omega: float, config: EvalConfig | None = None) -> ThetaSelection:
    """Pick the contour offset ``theta`` for oscillation frequency ``omega``.

    Minimizes the sum of a near-origin magnitude estimate of the sampled
    integrand (which blows up as theta shrinks) and the amplification
    ``x**sigma = exp(theta - lam_min*omega)`` divided by sqrt(theta) (which
    blows up as theta grows).  Any positive theta yields a valid contour;
    the minimizer only tunes conditioning.  Non-convergence of the simplex
    search is not an error: the best point seen is returned with a flag.
    """
    cfg = config or EvalConfig()
    lam = _as_exponents(exponents)
    omega = float(omega)
    if omega <= 0.0:
        raise DomainError(f"omega must be positive, got {omega}")
    return _theta_search(lam, float(np.min(lam)), omega, cfg, cfg.theta_init, 0.5)


# Pole-expansion (small-x) evaluation controls.  The expansion keeps every
# pole: damping underflow (exp(-omega*gap) -> 0 past ~745) truncates far
# poles long after their worst-case coefficient growth, so the only failure
# mode is cancellation, caught by the amplification guard.
_EXPANSION_MIN_GAP_OMEGA = 6.0
_EXPANSION_MAX_POLES = 96
_EXPANSION_AMPLIFICATION = 16.0
_expansion_cache: dict = {}


def _pole_expansion_table(lam_key: bytes, lam: np.ndarray):
    """Expansion coefficients of every basis prefix over its poles, or None.

    Each prefix element equals ``sum_v (a[n,v] + b[n,v]*log x) * x**pole_v``.
    The coefficients are rational products of exponent differences,
    accumulated in double-double so they stay at the 1-ulp level even after
    ~2n factors.  Only pole multiplicities up to 2 are supported; higher
    repeats (or an exactly vanishing numerator factor) return None and the
    caller keeps the contour path.
    """
    if lam_key in _expansion_cache:
        return _expansion_cache[lam_key]
    poles, counts_full = np.unique(lam, return_counts=True)
    table = None
    if counts_full.max() <= 2 and np.all(np.isfinite(poles)):
        table = _build_pole_expansion(lam, poles)
    if len(_expansion_cache) > 64:
        _expansion_cache.clear()
    _expansion_cache[lam_key] = table
    return table


def _build_pole_expansion(lam: np.ndarray, poles: np.ndarray):
    nb = lam.size
    npol = poles.size
    ones = np.ones(npol)
    zeros = np.zeros(npol)
    g = (ones.copy(), zeros.copy())  # current product with own pole factors removed
    s = (zeros.copy(), zeros.copy())  # logarithmic derivative of g at each pole
    counts = np.zeros(npol, dtype=int)
    a = np.zeros((2, nb, npol))  # dd hi/lo of the constant coefficient
    b = np.zeros((2, nb, npol))  # dd hi/lo of the log-coefficient
    active = np.zeros((nb, npol), dtype=bool)

    def denominator_step(value):
        nonlocal g, s
        same = poles == value
        counts[same] += 1
        d = dd.two_sum(poles, -value)
        safe = (np.where(same, 1.0, d[0]), np.where(same, 0.0, d[1]))
        g_div = dd.div(g, safe)
        g = (np.where(same, g[0], g_div[0]), np.where(same, g[1], g_div[1]))
        rec = dd.div((ones, zeros), safe)
        s_new = dd.add(s, dd.negate(rec))
        s = (np.where(same, s[0], s_new[0]), np.where(same, s[1], s_new[1]))

    def numerator_step(value):
        nonlocal g, s
        f = dd.add_double(dd.two_sum(poles, value), 1.0)
        if np.any(dd.to_double(f) == 0.0):
            raise ZeroDivisionError
        g = dd.mul(g, f)
        s = dd.add(s, dd.div((ones, zeros), f))

    def record(n):
        act = counts >= 1
        single = act & (counts == 1)
        double_ = act & (counts == 2)
        a[0][n][single] = g[0][single]
        a[1][n][single] = g[1][single]
        if np.any(double_):
            gs = dd.mul(g, s)
            a[0][n][double_] = gs[0][double_]
            a[1][n][double_] = gs[1][double_]
            b[0][n][double_] = g[0][double_]
            b[1][n][double_] = g[1][double_]
        active[n] = act

    try:
        denominator_step(lam[0])
        record(0)
        for n in range(1, nb):
            numerator_step(lam[n - 1])
            denominator_step(lam[n])
            record(n)
    except ZeroDivisionError:
        return None
    return poles, a, b, active


def _expansion_applicable(poles: np.ndarray, omega: float) -> bool:
    if poles.size > _EXPANSION_MAX_POLES:
        return False
    if poles.size == 1:
        return True
    return (poles[1] - poles[0]) * omega >= _EXPANSION_MIN_GAP_OMEGA


def _expansion_values(table, x: float, omega: float):
    """Basis values at one small point from the pole expansion, or None.

    Works relative to the leading pole: every term carries the damping
    ``exp(-omega * gap)``, and only the common factor ``x**min(lam)``
    (whose rounding acts like a harmless weight perturbation) is applied in
    ordinary arithmetic.  Returns None when cancellation between terms
    exceeds the amplification guard (the expansion is then meaningless and
    the caller keeps the contour path).
    """
    poles, a, b, active = table
    damp = np.exp(-omega * (poles - poles[0]))
    log_x = -omega
    term = dd.add((a[0], a[1]), dd.mul_double((b[0], b[1]), log_x))
    term = dd.mul_double(term, damp[None, :])
    usable = active & np.isfinite(term[0])
    if np.any(active & ~np.isfinite(term[0]) & (damp[None, :] > 0.0)):
        return None  # a contributing coefficient overflowed
    term = (np.where(usable, term[0], 0.0), np.where(usable, term[1], 0.0))

    total = (np.zeros(a.shape[1]), np.zeros(a.shape[1]))
    for v in range(poles.size):
        total = dd.add(total, (term[0][:, v], term[1][:, v]))
    shape = dd.to_double(total)
    largest = np.abs(term[0]).max(axis=1)
    if np.any(largest > _EXPANSION_AMPLIFICATION * np.maximum(np.abs(shape), 1e-300)):
        return None
    return dd.mul_double(total, x ** poles[0])


def _cdd_mul(a, b):
    """Complex double-double product; operands are ((re_hi,re_lo),(im_hi,im_lo))."""
    ar, ai = a
    br, bi = b
    re = dd.add(dd.mul(ar, br), dd.negate(dd.mul(ai, bi)))
    im = dd.add(dd.mul(ar, bi), dd.mul(ai, br))
    return re, im


def _cdd_div(a, b):
    ar, ai = a
    br, bi = b
    den = dd.add(dd.mul(br, br), dd.mul(bi, bi))
    re = dd.div(dd.add(dd.mul(ar, br), dd.mul(ai, bi)), den)
    im = dd.div(dd.add(dd.mul(ai, br), dd.negate(dd.mul(ar, bi))), den)
    return re, im


def _dd_axis_sum(pair, axis=-1):
    """Pairwise double-double reduction along one axis."""
    hi = np.moveaxis(pair[0], axis, -1)
    lo = np.moveaxis(pair[1], axis, -1)
    while hi.shape[-1] > 1:
        if hi.shape[-1] % 2:
            pad = [(0, 0)] * (hi.ndim - 1) + [(0, 1)]
            hi = np.pad(hi, pad)
            lo = np.pad(lo, pad)
        hi, lo = dd.add((hi[..., 0::2], lo[..., 0::2]), (hi[..., 1::2], lo[..., 1::2]))
    return hi[..., 0], lo[..., 0]


_MAX_PANEL_WIDTH = 16.0  # e^{it} stays resolvable at the default panel order


def _graded_widths(first: float, width: float, segment: float):
    """Panel widths: four at ``first``, doubling every second panel to a cap."""
    starts, widths = [], []
    position, current, at_current = 0.0, first, 0
    while position < segment:
        step = min(current, segment - position)
        starts.append(position)
        widths.append(step)
        position += step
        at_current += 1
        if at_current >= (4 if current == first else 2) and current < _MAX_PANEL_WIDTH:
            current = min(2.0 * current, _MAX_PANEL_WIDTH)
            at_current = 0
    return np.asarray(starts), np.asarray(widths)


@lru_cache(maxsize=128)
def _panel_grid(first: float, width: float, segment: float, order: int):
    """Graded panel sample points, weights, and oscillatory phase on [0, segment].

    The integrand's only sharp feature sits within O(theta) of the origin,
    so the first panels use width ``first`` (matched to theta) and then
    widths double every second panel up to a fixed cap; the sample count
    grows only logarithmically with the segment length chosen by the
    tail-escalation test.
    """
    gl = gauss_legendre(order)
    starts, widths = _graded_widths(first, width, segment)
    t = (starts[:, None] + widths[:, None] * gl.nodes[None, :]).ravel()
    w = (widths[:, None] * gl.weights[None, :]).ravel()
    phase = np.exp(1j * t)
    for arr in (t, w, phase):
        arr.setflags(write=False)
    return t, w, phase


@lru_cache(maxsize=128)
def _panel_grid_dd(first: float, width: float, segment: float, order: int):
    """Panel grid with sample points and oscillatory phase in double-double."""
    _, w, _ = _panel_grid(first, width, segment, order)
    gl = gauss_legendre(order)
    starts, wds = _graded_widths(first, width, segment)
    starts = starts[:, None]
    wds = wds[:, None]
    p_hi, p_lo = dd.two_prod(wds, gl.nodes[None, :])
    t_hi, e1 = dd.two_sum(starts, p_hi)
    t_hi, t_lo = dd.quick_two_sum(t_hi, e1 + p_lo)
    t_hi = t_hi.ravel()
    t_lo = t_lo.ravel()
    base = np.exp(1j * t_hi)
    # fold the low part into the phase to first order: e^{i(t_hi+t_lo)}
    ph_re = (base.real, -base.imag * t_lo)
    ph_im = (base.imag, base.real * t_lo)
    for arr in (t_hi, t_lo, ph_re[0], ph_re[1], ph_im[0], ph_im[1]):
        arr.setflags(write=False)
    return t_hi, t_lo, w, ph_re, ph_im


def _first_panel_width(width: float, theta_group: np.ndarray) -> float:
    """First-panel width resolving the pole at distance theta from the origin."""
    scale = float(min(width, np.min(theta_group)))
    if scale >= width:
        return width
    return max(2.0 ** math.floor(math.log2(scale)), width / 256.0)


def _offsets_dd(lam, lam_min, omega, theta, shift_one: bool):
    """Offsets ``omega*(lam_min +- lam (+1)) - theta`` as exact dd pairs."""
    base = dd.two_sum(np.full_like(lam, lam_min)[None, :], (lam if shift_one else -lam)[None, :])
    if shift_one:
        base = dd.add_double(base, 1.0)
    prod = dd.mul_double(base, omega[:, None])
    return dd.add_double(prod, -theta[:, None])


def _group_sweep_dd(lam, lam_min, omega, theta, amp, segment, cfg, lag):
    """Compensated version of the contour sweep for one segment-level group.

    Returns the basis values as an (hi, lo) pair of shape (nb, n_points).
    The recurrence products, quadrature contractions, and phase all run in
    double-double; only per-point coherent factors (the amplitude and the
    evaluation frequency itself) stay in ordinary arithmetic, since those
    act like node/weight perturbations far below the solver's tolerances.
    """
    nb = lam.size
    first = _first_panel_width(cfg.panel_width, theta)
    t_hi, t_lo, w_panel, ph_re, ph_im = _panel_grid_dd(first, cfg.panel_width, segment, cfg.panel_order)

    num = _offsets_dd(lam, lam_min, omega, theta, shift_one=True)
    den = _offsets_dd(lam, lam_min, omega, theta, shift_one=False)

    def num_n(n):
        return (num[0][:, n : n + 1], num[1][:, n : n + 1])

    def den_n(n):
        return (den[0][:, n : n + 1], den[1][:, n : n + 1])

    zero = np.zeros_like(t_hi)[None, :]
    h_cur = _cdd_div((ph_re, ph_im), ((t_hi[None, :], t_lo[None, :]), dd.add((zero, zero), den_n(0))))

    tau = lag.nodes
    tl_re = (np.full((1, tau.size), segment), np.zeros((1, tau.size)))
    g_cur = _cdd_div(
        ((np.ones((1, tau.size)), np.zeros((1, tau.size))), (np.zeros((1, tau.size)), np.zeros((1, tau.size)))),
        (tl_re, dd.add((tau[None, :], np.zeros((1, tau.size))), den_n(0))),
    )
    pref = 1j * np.exp(1j * segment)

    out_hi = np.empty((nb, omega.size))
    out_lo = np.zeros((nb, omega.size))
    out_hi[0] = np.nan  # row 0 is filled by the caller
    for n in range(1, nb):
        factor = _cdd_div(
            ((t_hi[None, :], t_lo[None, :]), dd.add((zero, zero), num_n(n - 1))),
            ((t_hi[None, :], t_lo[None, :]), dd.add((zero, zero), den_n(n))),
        )
        h_cur = _cdd_mul(h_cur, factor)
        tail_factor = _cdd_div(
            (tl_re, dd.add((tau[None, :], np.zeros((1, tau.size))), num_n(n - 1))),
            (tl_re, dd.add((tau[None, :], np.zeros((1, tau.size))), den_n(n))),
        )
        g_cur = _cdd_mul(g_cur, tail_factor)

        q1_im = _dd_axis_sum(dd.mul_double(h_cur[1], w_panel[None, :]))
        # overflowed tail samples live in the damped-dead zone; drop them
        ok = np.isfinite(g_cur[0][0]) & np.isfinite(g_cur[1][0])
        tr = (np.where(ok, g_cur[0][0], 0.0), np.where(ok, g_cur[0][1], 0.0))
        ti = (np.where(ok, g_cur[1][0], 0.0), np.where(ok, g_cur[1][1], 0.0))
        s_re = _dd_axis_sum(dd.mul_double(tr, lag.weights[None, :]))
        s_im = _dd_axis_sum(dd.mul_double(ti, lag.weights[None, :]))
        # Im(pref * S) = Re(pref) Im(S) + Im(pref) Re(S)
        q2_im = dd.add(dd.mul_double(s_im, pref.real), dd.mul_double(s_re, pref.imag))
        total = dd.mul_double(dd.add(q1_im, q2_im), amp / math.pi)
        out_hi[n], out_lo[n] = total
    return out_hi, out_lo


def _segment_levels(num_off, den_off, amplitude, theta, tau, cfg: EvalConfig) -> np.ndarray:
    """Per-point segment-doubling level that makes the Laguerre tail usable.

    For each candidate segment length the tail integrand is swept through
    the basis recurrence at the Laguerre ordinates; a point is accepted when
    every sample either stays within ``tail_bump_factor`` of its launch
    value (resolvable) or contributes below ``tail_negligible`` relative to
    the output scale ``max(1, x**lam_min)`` (harmless).
    """
    n_points, n_basis = num_off.shape
    base = cfg.panel_width * cfg.panel_count
    levels = np.full(n_points, cfg.max_segment_doublings, dtype=int)
    pending = np.arange(n_points)
    damp = np.exp(-tau)
    # amplitude = x**lam_min * e**theta, so the output scale is amp * e**-theta
    dead_cut = cfg.tail_negligible * np.maximum(1.0, amplitude * np.exp(-theta)) / amplitude

    for level in range(cfg.max_segment_doublings + 1):
        if pending.size == 0:
            break
        segment = base * 2.0**level
        t_tail = segment + 1j * tau
        num = num_off[pending]
        den = den_off[pending]
        cut = dead_cut[pending]

        factors = np.empty((pending.size, n_basis, tau.size), dtype=complex)
        factors[:, 0, :] = 1.0 / (t_tail[None, :] + 1j * den[:, :1])
        factors[:, 1:, :] = (t_tail[None, None, :] + 1j * num[:, :-1, None]) / (
            t_tail[None, None, :] + 1j * den[:, 1:, None]
        )
        with np.errstate(over="ignore", invalid="ignore"):
            magnitudes = np.abs(np.cumprod(factors, axis=1))
        launch = magnitudes[:, :, :1] + 1.0 / segment
        bump_ok = magnitudes <= cfg.tail_bump_factor * launch
        dead = magnitudes * damp[None, None, :] <= cut[:, None, None]
        ok = np.all(bump_ok | dead, axis=(1, 2))

        levels[pending[ok]] = level
        pending = pending[~ok]
    return levels


def _basis_batch(shifted, xs, cfg: EvalConfig, compensated: bool = False):
    """Basis values for the (already shifted) exponents at many points.

    Returns ``(values, values_low, thetas, sigmas)`` where ``values[n, i]``
    is the n-th basis element at ``xs[i]``.  Points equal to 1 short-circuit
    to exact ones; a single-element sequence bypasses the contour entirely.
    With ``compensated=True`` the whole pipeline runs in double-double and
    ``values_low`` carries the compensation terms (otherwise it is None).
    """
    lam = _as_exponents(shifted)
    nb = lam.size
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    lam_min = float(np.min(lam))

    values = np.empty((nb, xs.size))
    values_low = np.zeros((nb, xs.size)) if compensated else None
    thetas = np.zeros(xs.size)
    sigmas = np.full(xs.size, lam_min)

    at_one = xs == 1.0
    if np.any(at_one):
        values[:, at_one] = 1.0
    active = np.flatnonzero(~at_one)
    if active.size == 0:
        return values, values_low, thetas, sigmas
    xa = xs[active]

    if nb == 1:
        values[0, active] = xa ** lam[0]
        return values, values_low, thetas, sigmas

    omega = np.maximum(-np.log(xa), cfg.omega_floor)
    out = np.empty((nb, xa.size))
    out_low = np.zeros((nb, xa.size))

    # Points deep enough toward 0 skip the contour entirely: their basis
    # values come from the compensated pole expansion at full precision,
    # which is exactly where the contour quadrature is noisiest.
    by_contour = np.ones(xa.size, dtype=bool)
    pole_values, pole_counts = np.unique(lam, return_counts=True)
    if pole_counts.max() <= 2:
        candidates = [i for i in range(xa.size) if _expansion_applicable(pole_values, float(omega[i]))]
        table = _pole_expansion_table(lam.tobytes(), lam) if candidates else None
        if table is not None:
            for i in candidates:
                expanded = _expansion_values(table, float(xa[i]), float(omega[i]))
                if expanded is not None:
                    out[:, i], out_low[:, i] = expanded
                    by_contour[i] = False

    contour = np.flatnonzero(by_contour)
    omega_c = omega[contour]
    theta = np.array(
        [_theta_search(lam, lam_min, float(freq), cfg, cfg.theta_init, 0.5).theta for freq in omega_c]
    )
    thetas[active[contour]] = theta
    sigmas[active[contour]] = lam_min - theta / omega_c

    # All sigma-dependent quantities enter only through these offsets, so
    # sigma itself (which blows up as omega -> 0) is never formed here.
    num_off = omega_c[:, None] * (lam_min + lam[None, :] + 1.0) - theta[:, None]
    den_off = omega_c[:, None] * (lam_min - lam[None, :]) - theta[:, None]
    amplitude = xa[contour] ** lam_min * np.exp(theta)

    lag = gauss_laguerre(cfg.laguerre_order)
    levels = np.empty(0, dtype=int)
    if contour.size:
        levels = _segment_levels(num_off, den_off, amplitude, theta, lag.nodes, cfg)

    out[0] = xa ** lam[0]
    for level in np.unique(levels):
        in_level = np.flatnonzero(levels == level)
        group = contour[in_level]
        segment = cfg.panel_width * cfg.panel_count * 2.0 ** int(level)
        amp = amplitude[in_level]

        if compensated:
            hi, low = _group_sweep_dd(
                lam, lam_min, omega_c[in_level], theta[in_level], amp, segment, cfg, lag
            )
            out[1:, group] = hi[1:]
            out_low[1:, group] = low[1:]
            continue

        first = _first_panel_width(cfg.panel_width, theta[in_level])
        t_panel, w_panel, phase = _panel_grid(first, cfg.panel_width, segment, cfg.panel_order)
        t_tail = segment + 1j * lag.nodes
        tail_prefactor = 1j * np.exp(1j * segment)

        num = num_off[in_level]
        den = den_off[in_level]

        panel = np.empty((group.size, nb, t_panel.size), dtype=complex)
        panel[:, 0, :] = phase[None, :] / (t_panel[None, :] + 1j * den[:, :1])
        panel[:, 1:, :] = (t_panel[None, None, :] + 1j * num[:, :-1, None]) / (
            t_panel[None, None, :] + 1j * den[:, 1:, None]
        )
        np.cumprod(panel, axis=1, out=panel)
        q_osc = panel @ w_panel

        tail = np.empty((group.size, nb, lag.nodes.size), dtype=complex)
        tail[:, 0, :] = 1.0 / (t_tail[None, :] + 1j * den[:, :1])
        tail[:, 1:, :] = (t_tail[None, None, :] + 1j * num[:, :-1, None]) / (
            t_tail[None, None, :] + 1j * den[:, 1:, None]
        )
        with np.errstate(over="ignore", invalid="ignore"):
            np.cumprod(tail, axis=1, out=tail)
        # overflowed tail samples live in the damped-dead zone; drop them
        np.copyto(tail, 0.0, where=~np.isfinite(tail))
        q_tail = tail_prefactor * (tail @ lag.weights)

        out[1:, group] = (amp[:, None] / math.pi * (q_osc + q_tail)[:, 1:].imag).T
    values[:, active] = out
    if compensated:
        values_low[:, active] = out_low
    return values, values_low, thetas, sigmas


def _check_point(x: float) -> float:
    x = float(x)
    if not (0.0 < x <= 1.0) or not np.isfinite(x):
        raise DomainError(f"evaluation point must lie in (0, 1], got {x}")
    return x


def eval_all(exponents, x: float, config: EvalConfig | None = None) -> EvalResult:
    """All basis values ``L_0(x), ..., L_N(x)`` for the unit-weight family."""
    cfg = config or EvalConfig()
    x = _check_point(x)
    values, _, thetas, sigmas = _basis_batch(exponents, np.array([x]), cfg)
    return EvalResult(values=values[:, 0], theta_used=float(thetas[0]), sigma_used=float(sigmas[0]))


def eval_all_weighted(exponents, beta: float, x: float, config: EvalConfig | None = None) -> EvalResult:
    """Basis values for the family orthogonal under weight ``x**beta``.

    These are ``x**(-beta/2)`` times the unit-weight basis of the exponents
    shifted by ``beta/2``; at ``x = 1`` every value is exactly 1.
    """
    cfg = config or EvalConfig()
    lam = ensure_admissible(exponents, beta)
    x = _check_point(x)
    shifted = lam + 0.5 * float(beta)
    values, _, thetas, sigmas = _basis_batch(shifted, np.array([x]), cfg)
    scaled = values[:, 0] * x ** (-0.5 * float(beta))
    return EvalResult(values=scaled, theta_used=float(thetas[0]), sigma_used=float(sigmas[0]))


def scaled_derivatives(values, exponents, beta: float = 0.0) -> np.ndarray:
    """Turn shifted-basis values at one point into ``x * L_n'(x)`` values.

    ``values`` must be evaluations of the basis for ``exponents + beta/2``
    at a single x (a vector), or at several points (a matrix whose rows are
    basis indices).  The recurrence

        x L_n' = x L_{n-1}' + (lam_n + beta/2) L_n + (1 + lam_{n-1} + beta/2) L_{n-1}

    runs in index order, seeded by ``x L_0' = (lam_0 + beta/2) L_0``.
    """
    lam = _as_exponents(exponents)
    vals = np.asarray(values, dtype=float)
    if vals.shape[0] != lam.size:
        raise LengthMismatchError(f"{vals.shape[0]} values for {lam.size} exponents")
    shifted = lam + 0.5 * float(beta)
    out = np.empty_like(vals)
    out[0] = shifted[0] * vals[0]
    for n in range(1, lam.size):
        out[n] = out[n - 1] + shifted[n] * vals[n] + (1.0 + shifted[n - 1]) * vals[n - 1]
    return out

"""Bias-free residual evaluation for the final polish of a solved rule.

The moment-matching residual at a nearly converged rule lives deep in a
near-null direction of its Jacobian: displacements of the smallest weight
by one part in 1e11 change the residual by barely a few ulps.  Any fixed
systematic in a double-precision evaluator therefore parks the solved rule
up to ~1e-11 away from the true one.  The acceptance targets for published
reference rules sit inside that wander radius, so the last Newton steps
use a residual computed in arbitrary precision from the closed-form pole
expansion of the basis (exact rational coefficient recurrences, poles of
multiplicity up to two).  Working precision scales with the sequence
length, since the expansion's cancellation grows with it.  The Newton
directions themselves stay in ordinary double arithmetic: direction errors
only perturb the path, not the limit.
"""

from __future__ import annotations

import numpy as np

try:
    import mpmath as mp
except ImportError:  # pragma: no cover - dependency is declared, but stay usable
    mp = None


def available() -> bool:
    return mp is not None


def _basis_columns(shifted, xs, n_basis):
    """Exact basis values at each x: columns[k][n] as mp floats."""
    poles = sorted(set(shifted))
    columns = []
    for x in xs:
        xq = mp.mpf(x)
        ln_x = mp.log(xq)
        powers = {p: xq**p for p in poles}
        g = {p: mp.mpf(1) for p in poles}
        s = {p: mp.mpf(0) for p in poles}
        count = {p: 0 for p in poles}
        out = []

        def denominator_step(value):
            for p in poles:
                if p == value:
                    count[p] += 1
                else:
                    g[p] /= p - value
                    s[p] -= 1 / (p - value)

        def numerator_step(value):
            for p in poles:
                factor = p + value + 1
                g[p] *= factor
                s[p] += 1 / factor

        def record():
            total = mp.mpf(0)
            for p in poles:
                if count[p] == 1:
                    total += g[p] * powers[p]
                elif count[p] == 2:
                    total += g[p] * (s[p] + ln_x) * powers[p]
            out.append(total)

        denominator_step(shifted[0])
        record()
        for n in range(1, n_basis):
            numerator_step(shifted[n - 1])
            denominator_step(shifted[n])
            record()
        columns.append(out)
    return columns


def exact_residual(nodes, weights, exponents, beta: float):
    """Moment-matching residual rounded from arbitrary precision, or None.

    Returns None when unavailable: no mpmath, or an exponent repeated more
    than twice (the expansion here handles poles of order <= 2 only).
    """
    if mp is None:
        return None
    lam = np.asarray(exponents, dtype=float)
    values, counts = np.unique(lam, return_counts=True)
    if counts.max() > 2:
        return None

    digits = 30 + int(1.2 * lam.size)
    with mp.workdps(digits):
        beta_q = mp.mpf(beta)
        shifted = [mp.mpf(v) + beta_q / 2 for v in lam]
        columns = _basis_columns(shifted, [float(x) for x in nodes], lam.size)

        moments_q = [1 / (1 + mp.mpf(lam[0]) + beta_q)]
        for n in range(1, lam.size):
            moments_q.append(moments_q[-1] * (-mp.mpf(lam[n - 1])) / (1 + mp.mpf(lam[n]) + beta_q))

        factors = [mp.mpf(x) ** (-beta_q / 2) * mp.mpf(w) for x, w in zip(nodes, weights)]
        residual = np.empty(lam.size)
        for n in range(lam.size):
            q = mp.fsum(columns[k][n] * factors[k] for k in range(len(factors)))
            residual[n] = float(q - moments_q[n])
    return residual

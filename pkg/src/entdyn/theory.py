"""Closed-form Lambda-curves and moment-ODE integration.

All averages of entanglement measures evolve in the complexity parameter
Lambda through linear moment hierarchies.  This module provides the closed
forms (purity, higher Schmidt moments and their variance, von Neumann
entropy, sublattice weights of single-particle states) plus direct
integration of the underlying moment ODEs, used both to cross-check the
closed forms and to evolve quantities without a closed form.

Conventions: for an N_A x N_B bipartition of an N-dimensional state,
``a = N_A + N_B + 1`` and ``b = N + 2``; natural logarithms throughout.
"""

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "BipartiteDims",
    "avg_s2",
    "avg_s3",
    "var_s2",
    "var_s2_balanced",
    "avg_r1",
    "avg_pa",
    "avg_papb",
    "var_papb",
    "spee_ergodic",
    "integrate_adaptive",
    "sn_recursion",
    "r1_variance_ode",
    "papb_moment_ode",
    "papb_variance_ode",
    "curve_to_csv",
]


@dataclass(frozen=True)
class BipartiteDims:
    n_a: int
    n_b: int

    def __post_init__(self):
        if self.n_a < 2 or self.n_b < 2:
            raise ValueError("both subsystem dimensions must be >= 2")

    @property
    def n(self):
        return self.n_a * self.n_b

    @property
    def coeff_a(self):
        return self.n_a + self.n_b + 1

    @property
    def coeff_b(self):
        return self.n + 2

    @property
    def nu(self):
        return (self.n_a - self.n_b - 1) / 2.0

    @property
    def eta(self):
        return self.n / 2.0


# ---------------------------------------------------------------------------
# closed forms


def avg_s2(dims, lam):
    """Mean purity <S2>(Lambda): a/b + ((b-a)/b) exp(-b Lambda)."""
    a, b = dims.coeff_a, dims.coeff_b
    return a / b + ((b - a) / b) * np.exp(-b * np.asarray(lam, dtype=float))


def avg_s3(dims, lam):
    """Mean third Schmidt moment <S3>(Lambda)."""
    a, b = dims.coeff_a, dims.coeff_b
    lam = np.asarray(lam, dtype=float)
    return (
        a * a
        + b
        + (2 * a * a - 3 * a * b + b * b - b) * np.exp(-1.5 * b * lam)
        + 3 * a * (b - a) * np.exp(-b * lam)
    ) / (b * b)


def var_s2(dims, lam):
    """Purity variance <dS2^2>(Lambda), general bipartition form."""
    a, b = dims.coeff_a, dims.coeff_b
    lam = np.asarray(lam, dtype=float)
    bracket = (
        6 * (a * b - a * a) * np.exp(-0.5 * b * lam)
        + 4 * (2 * a * a + b * b - b - 3 * a * b) * np.exp(-1.5 * b * lam)
        - (3 * a * a - 6 * a * b + 4 * b * b - 3 * b) * np.exp(-2.0 * b * lam)
        + a * a
        + b
    )
    return 4.0 * bracket / b ** 3


def var_s2_balanced(d, lam):
    """Purity variance for the balanced case n_a = n_b = D."""
    lam = np.asarray(lam, dtype=float)
    d = float(d)
    d2 = d * d
    return (
        20.0
        - 4.0 * (3.0 - 2.0 * d) ** 2 * np.exp(-2.0 * d2 * lam)
        + 48.0 * (d - 2.0) * np.exp(-d2 * lam)
        + 16.0 * (7.0 + d * (d - 6.0)) * np.exp(-1.5 * d2 * lam)
    ) / d ** 4


def avg_r1(dims, lam):
    """Mean von Neumann entropy: Page limit times (1 - exp(-N Lambda / 2))."""
    page = math.log(dims.n_a) - dims.n_a / (2.0 * dims.n_b)
    return page * (1.0 - np.exp(-0.5 * dims.n * np.asarray(lam, dtype=float)))


def avg_pa(n, lam):
    """Mean sublattice weight <P_A>(Lambda), balanced split, P_A(0) = 1."""
    return 0.5 * (1.0 + np.exp(-2.0 * n * np.asarray(lam, dtype=float)))


def avg_papb(n, lam):
    """Mean <P_A P_B>(Lambda): (N/(4(N+2)))(1 - exp(-4(N+2) Lambda))."""
    return (n / (4.0 * (n + 2.0))) * (1.0 - np.exp(-4.0 * (n + 2.0) * np.asarray(lam, dtype=float)))


def var_papb(n, lam):
    """Closed-form <d(P_A P_B)^2>(Lambda).

    Note this expression evaluates to 5/(2 N^2) at Lambda = 0 instead of 0;
    the ODE route (:func:`papb_variance_ode`, which does start at 0) is the
    normative curve, and this form is kept for comparison.  Both share the
    plateau 1/(2 N^2).
    """
    lam = np.asarray(lam, dtype=float)
    n = float(n)
    bracket = (
        8.0 * n
        + 8.0 * n * (n + 4.0) * np.exp(-4.0 * (n + 2.0) * lam)
        - n * (n * n + 16.0 * n) * np.exp(-8.0 * (n + 2.0) * lam)
        + n * (n * n + 8.0 * n) * np.exp(-8.0 * (n + 6.0) * lam)
    )
    return bracket / (16.0 * n ** 3)


def spee_ergodic(n):
    """Ergodic mean of the single-particle entanglement entropy."""
    return math.log(2.0) - 2.0 / n


# ---------------------------------------------------------------------------
# adaptive RK4 integration (classic 4-stage scheme with step doubling)


def _rk4_step(f, t, y, h):
    k1 = f(t, y)
    k2 = f(t + 0.5 * h, y + 0.5 * h * k1)
    k3 = f(t + 0.5 * h, y + 0.5 * h * k2)
    k4 = f(t + h, y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def integrate_adaptive(f, y0, grid, tol=1e-10):
    """Integrate y' = f(t, y) and return y at each point of ``grid``.

    Step-doubling error control: each step is taken once at h and twice at
    h/2; the difference/15 estimates the local error, the extrapolated value
    is kept.  Steps shrink on failure and grow when comfortably accurate.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or len(grid) < 1 or np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be strictly increasing")
    y = np.array(y0, dtype=float, ndmin=1).copy()
    out = np.empty((len(grid), len(y)))
    t = grid[0]
    out[0] = y
    span = grid[-1] - grid[0] if len(grid) > 1 else 1.0
    h = span / 64.0 if span > 0 else 1.0
    h_min = max(span, 1.0) * 1e-13
    for i, t_next in enumerate(grid[1:], start=1):
        while t < t_next - 1e-15 * max(1.0, abs(t_next)):
            step = min(h, t_next - t)
            y_full = _rk4_step(f, t, y, step)
            y_half = _rk4_step(f, t + 0.5 * step, _rk4_step(f, t, y, 0.5 * step), 0.5 * step)
            err = float(np.max(np.abs(y_half - y_full))) / 15.0
            if err > tol and step > h_min:
                h = 0.5 * step
                continue
            if err > tol:
                raise RuntimeError(
                    f"integration cannot reach tolerance {tol} at t={t} "
                    f"(step underflow; error estimate {err})"
                )
            y = y_half + (y_half - y_full) / 15.0
            t += step
            if err < tol / 32.0:
                h = min(2.0 * step, span)
            else:
                h = step
        out[i] = y
    return out


def sn_recursion(dims, n_max, grid, tol=1e-10):
    """Evolve the Schmidt moments <S_2> ... <S_n_max> along a Lambda grid.

    The moments obey the closed hierarchy

        d<S_n>/dLambda = (n/2) [ (a + n - 2) <S_{n-1}> - b <S_n>
                                 + (n - 2) <S_{n-2}> ]

    with S_0 = N_A and S_1 = 1 held constant and <S_n>(0) = 1 (separable
    initial state).  Returns a dict {n: values over grid}.
    """
    if n_max < 2:
        raise ValueError("n_max must be >= 2")
    a, b = dims.coeff_a, dims.coeff_b
    n_a = dims.n_a

    def rhs(_, y):
        dy = np.empty_like(y)
        for idx in range(len(y)):
            n = idx + 2
            s_prev = y[idx - 1] if idx >= 1 else 1.0
            s_prev2 = y[idx - 2] if idx >= 2 else (1.0 if n == 3 else n_a)
            dy[idx] = 0.5 * n * ((a + n - 2) * s_prev - b * y[idx] + (n - 2) * s_prev2)
        return dy

    y0 = np.ones(n_max - 1)
    values = integrate_adaptive(rhs, y0, grid, tol)
    return {n: values[:, n - 2] for n in range(2, n_max + 1)}


def r1_variance_ode(dims, q_minus_r1sq, cov_r0_r1, grid, tol=1e-10):
    """Evolve the entropy variance <dR1^2> from tabulated inputs.

        d<dR1^2>/dLambda = 2 (Q - <R1>^2) + N_B cov(R0, R1) - N <dR1^2>

    ``q_minus_r1sq`` and ``cov_r0_r1`` are callables of Lambda (use e.g.
    ``lambda x: np.interp(x, grid, table)`` for numeric inputs).
    """
    n, n_b = dims.n, dims.n_b

    def rhs(t, y):
        return np.array([2.0 * q_minus_r1sq(t) + n_b * cov_r0_r1(t) - n * y[0]])

    return integrate_adaptive(rhs, [0.0], grid, tol)[:, 0]


def papb_moment_ode(n, k_max, grid, tol=1e-10):
    """Evolve the moments <(P_A P_B)^k>, k = 1..k_max, from 0.

        d<(PP)^k>/dLambda = k (4(k-1) + N) <(PP)^{k-1}>
                            - 4 k (N + 4k - 2) <(PP)^k>

    with (PP)^0 = 1.  Returns a dict {k: values over grid}.
    """
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    n = float(n)

    def rhs(_, y):
        dy = np.empty_like(y)
        for idx in range(len(y)):
            k = idx + 1
            m_prev = y[idx - 1] if idx >= 1 else 1.0
            dy[idx] = k * (4.0 * (k - 1) + n) * m_prev - 4.0 * k * (n + 4.0 * k - 2.0) * y[idx]
        return dy

    values = integrate_adaptive(rhs, np.zeros(k_max), grid, tol)
    return {k: values[:, k - 1] for k in range(1, k_max + 1)}


def papb_variance_ode(n, grid, tol=1e-10):
    """Variance of P_A P_B via the moment ODEs, starting exactly at 0."""
    moments = papb_moment_ode(n, 2, grid, tol)
    return moments[2] - moments[1] ** 2


def curve_to_csv(path, kind, grid, values, n_a="", n_b=""):
    """Write a theory curve as CSV with columns lambda,value,kind,n_a,n_b."""
    with open(path, "w") as fh:
        fh.write("lambda,value,kind,n_a,n_b\n")
        for lam, val in zip(grid, values):
            fh.write(f"{lam:.17g},{val:.17g},{kind},{n_a},{n_b}\n")

"""Complexity parameter: ensemble parameters -> Y - Y0 -> Lambda.

A sweep of ensemble parameters (the coupling range ``band_b`` of the spin
model, or the disorder strength ``w`` of the lattice model) is mapped onto a
single scalar Y - Y0 measuring the distance from the localized initial
ensemble.  Rescaling by the squared local spectral density,

    Lambda = chi0 * (Y - Y0) * (xi_d / (delta_e * N))**2,    xi_d = 1/<IPR>,

gives the evolution parameter in which the closed-form curves of
:mod:`entdyn.theory` are written.  ``chi0`` is an overall scale constant
(default 1); only relative Lambda scales matter for the collapse analyses.
"""

import math
from dataclasses import dataclass

__all__ = ["ComplexityPoint", "y_qrem", "y_anderson", "lambda_from"]


@dataclass
class ComplexityPoint:
    y_minus_y0: float
    r_local: float
    chi0: float
    lam: float
    lambda_over_n: float


def y_qrem(n_spins, band_b, gamma=0.5):
    """Y - Y0 for the banded spin ensemble relative to band_b = 0.

        -1/(2(N+1)gamma) * sum_{r=0}^{L-1} ln|1 - 2 gamma / (1 + (2**r/b)**2)|

    with N = 2**L.  Returns exactly 0 at band_b = 0 and +inf (with a
    diagnostic) if some term's argument vanishes.
    """
    if gamma <= 0:
        raise ValueError("gamma must be > 0")
    if band_b < 0:
        raise ValueError("band_b must be >= 0")
    if band_b == 0:
        return 0.0
    n = 2 ** n_spins
    total = 0.0
    for r in range(n_spins):
        arg = 1.0 - 2.0 * gamma / (1.0 + ((2 ** r) / band_b) ** 2)
        if arg == 0.0:
            raise OverflowError(
                f"divergent term at r={r}: 1 - 2*gamma/(1+(2^r/b)^2) = 0"
            )
        total += math.log(abs(arg))
    return -total / (2.0 * (n + 1) * gamma) + 0.0  # +0.0 avoids returning -0.0


def y_anderson(n_sites, z, w, w_ref, gamma, hop_mean_t=1.0):
    """Y - Y0 for the lattice ensemble relative to disorder ``w_ref``.

        -N/(2 M gamma) * ln| (1 - gamma w**2) / (1 - gamma w_ref**2) |

    with M = (N/2)(N + z*(t != 0) + 1).  Only the diagonal disorder varies
    along a sweep, so the hopping terms cancel between Y and Y0.
    """
    if gamma <= 0:
        raise ValueError("gamma must be > 0")
    m = (n_sites / 2.0) * (n_sites + (z if hop_mean_t != 0 else 0) + 1)
    num = 1.0 - gamma * w ** 2
    den = 1.0 - gamma * w_ref ** 2
    if num == 0.0 or den == 0.0:
        raise OverflowError(f"singular at gamma*w^2 = 1 (w={w}, w_ref={w_ref})")
    return -n_sites / (2.0 * m * gamma) * math.log(abs(num / den)) + 0.0


def lambda_from(y_minus_y0, window, n, chi0=1.0):
    """Rescale Y - Y0 by the squared local spectral density of a window.

    ``window`` needs attributes ``mean_ipr`` and ``delta_e`` (a
    SpectralWindow or any pooled stand-in).
    """
    if y_minus_y0 < 0:
        raise ValueError("y_minus_y0 must be >= 0")
    if window.delta_e <= 0:
        raise ValueError("delta_e must be > 0")
    xi_d = 1.0 / window.mean_ipr
    r_local = xi_d / (window.delta_e * n)
    lam = chi0 * y_minus_y0 * r_local ** 2
    return ComplexityPoint(
        y_minus_y0=float(y_minus_y0),
        r_local=float(r_local),
        chi0=float(chi0),
        lam=float(lam),
        lambda_over_n=float(lam / n),
    )

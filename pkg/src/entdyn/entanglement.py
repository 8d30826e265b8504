"""Bipartite entanglement measures of pure states.

For a many-body eigenvector the state is reshaped into the N_A x N_B state
matrix C and the Schmidt spectrum is obtained as the eigenvalues of the
reduced density matrix W = C C^T (natural logarithms throughout).  For a
single-particle state on a lattice the relevant measures are the sublattice
weight P_A, the product P_A * P_B and the binary entropy of P_A.
"""

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Bipartition",
    "spin_split",
    "site_split",
    "SchmidtSpectrum",
    "schmidt_spectrum",
    "von_neumann",
    "renyi",
    "s_moment",
    "r0",
    "q_moment",
    "linear_entropy",
    "spee_measures",
    "MeasureRecord",
    "measure_record",
]

#: Schmidt eigenvalues below this floor are excluded from R0 (which would
#: otherwise diverge whenever the state has less than full Schmidt rank)
R0_FLOOR = 1e-14


@dataclass(frozen=True)
class Bipartition:
    """Either a spin split (kind='spin') or a site mask (kind='site').

    Spin split: subsystem A is the ``l_a`` most significant bits of the
    basis-configuration index, so ``n_a = 2**l_a`` and reshaping the state
    vector to (n_a, n_b) realizes the product basis directly.

    Site split: ``mask`` is a boolean array over sites, True for A.
    """

    kind: str
    l_a: int = 0
    l_b: int = 0
    mask: object = None

    @property
    def n_a(self):
        return 2 ** self.l_a

    @property
    def n_b(self):
        return 2 ** self.l_b


def spin_split(n_spins, l_a=None):
    """Contiguous spin bipartition; balanced (l_a = L//2) by default."""
    if l_a is None:
        l_a = n_spins // 2
    if not 0 < l_a < n_spins:
        raise ValueError("l_a must satisfy 0 < l_a < n_spins")
    return Bipartition(kind="spin", l_a=l_a, l_b=n_spins - l_a)


def site_split(side, dim=3):
    """Balanced lattice bipartition: lower half along the last axis is A."""
    n = side ** dim
    coords = np.unravel_index(np.arange(n), (side,) * dim)
    mask = coords[dim - 1] < side // 2
    return Bipartition(kind="site", mask=mask)


@dataclass
class SchmidtSpectrum:
    """Nonnegative eigenvalues of the reduced density matrix, descending."""

    lambdas: np.ndarray

    def __post_init__(self):
        if np.any(self.lambdas < -1e-12):
            raise ValueError("negative Schmidt eigenvalue beyond tolerance")
        total = float(np.sum(self.lambdas))
        if abs(total - 1.0) > 1e-10:
            raise ValueError(f"Schmidt eigenvalues sum to {total}, not 1")


def schmidt_spectrum(psi, part):
    """Schmidt spectrum of a pure state under a spin bipartition.

    Uses the eigenvalues of the smaller Gram matrix C C^T (size n_a) rather
    than an SVD of C; eigenvalues are clipped at 0 and renormalized to
    absorb roundoff.
    """
    psi = np.asarray(psi, dtype=float)
    if part.kind != "spin":
        raise ValueError("schmidt_spectrum needs a spin bipartition")
    n_a, n_b = part.n_a, part.n_b
    if n_a * n_b != len(psi):
        raise ValueError(f"state length {len(psi)} != n_a*n_b = {n_a * n_b}")
    c = psi.reshape(n_a, n_b)
    lam = np.linalg.eigvalsh(c @ c.T)
    lam = np.clip(lam, 0.0, None)
    lam /= lam.sum()
    return SchmidtSpectrum(lambdas=lam[::-1].copy())


def von_neumann(spectrum):
    """R1 = -sum lambda ln lambda (0 ln 0 = 0)."""
    lam = spectrum.lambdas
    pos = lam > 0
    return float(-np.sum(lam[pos] * np.log(lam[pos])))


def renyi(spectrum, alpha):
    """R_alpha = ln(sum lambda**alpha) / (1 - alpha); R1 at alpha = 1."""
    if alpha == 1:
        return von_neumann(spectrum)
    lam = spectrum.lambdas
    pos = lam > 0
    return float(np.log(np.sum(lam[pos] ** alpha)) / (1.0 - alpha))


def s_moment(spectrum, n):
    """S_n = sum lambda**n (purity for n = 2)."""
    return float(np.sum(spectrum.lambdas ** n))


def r0(spectrum, floor=R0_FLOOR):
    """(-sum ln lambda over lambda > floor, saturated flag).

    R0 diverges whenever any Schmidt eigenvalue vanishes; eigenvalues at or
    below ``floor`` are excluded and the flag marks the value as a lower
    bound of a divergent quantity.
    """
    lam = spectrum.lambdas
    kept = lam > floor
    value = float(-np.sum(np.log(lam[kept])))
    saturated = bool(np.any(~kept))
    return value, saturated


def q_moment(spectrum):
    """Q = sum lambda (ln lambda)**2 (0 contribution from lambda = 0)."""
    lam = spectrum.lambdas
    pos = lam > 0
    return float(np.sum(lam[pos] * np.log(lam[pos]) ** 2))


def linear_entropy(spectrum):
    """S_L = 1 - S2."""
    return 1.0 - s_moment(spectrum, 2)


def spee_measures(psi, mask):
    """(p_a, p_a * p_b, binary entropy) of a single-particle state.

    ``p_a`` is the total weight of the state on the masked sites; the
    entropy is ``-p ln p - (1-p) ln(1-p)`` with 0 ln 0 = 0.
    """
    psi = np.asarray(psi, dtype=float)
    mask = np.asarray(mask, dtype=bool)
    if not mask.any() or mask.all():
        raise ValueError("mask must be nonempty on both sides")
    p_a = float(np.sum(psi[mask] ** 2))
    p_b = 1.0 - p_a
    spee = 0.0
    for p in (p_a, p_b):
        if p > 0:
            spee -= p * math.log(p)
    return p_a, p_a * p_b, spee


@dataclass
class MeasureRecord:
    """All scalar measures of one eigenstate used by the sweep harness."""

    r1: float
    s2: float
    s3: float
    s_l: float
    q: float
    r0: float
    r0_saturated: bool
    p_a: float = float("nan")
    p_a_p_b: float = float("nan")
    spee: float = float("nan")


def measure_record(psi, part):
    """MeasureRecord of one eigenstate under either bipartition kind."""
    if part.kind == "spin":
        spec = schmidt_spectrum(psi, part)
        r0_val, r0_sat = r0(spec)
        return MeasureRecord(
            r1=von_neumann(spec),
            s2=s_moment(spec, 2),
            s3=s_moment(spec, 3),
            s_l=linear_entropy(spec),
            q=q_moment(spec),
            r0=r0_val,
            r0_saturated=r0_sat,
        )
    if part.kind == "site":
        p_a, papb, spee = spee_measures(psi, part.mask)
        return MeasureRecord(
            r1=float("nan"),
            s2=float("nan"),
            s3=float("nan"),
            s_l=float("nan"),
            q=float("nan"),
            r0=float("nan"),
            r0_saturated=False,
            p_a=p_a,
            p_a_p_b=papb,
            spee=spee,
        )
    raise ValueError(f"unknown bipartition kind: {part.kind}")

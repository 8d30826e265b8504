"""Random Hamiltonian ensembles.

Two families of sparse real-symmetric random matrices:

* :func:`sample_qrem` -- a spin model on ``N = 2**L`` configurations with
  Gaussian diagonal disorder of variance ``L/2`` and Gaussian off-diagonal
  couplings only between configurations that differ by a single spin flip
  (column offsets ``2**r``).  The coupling variance decays as a power law,
  ``1 / (1 + (2**r / band_b)**2)``, so ``band_b`` interpolates between a
  strictly diagonal matrix (``band_b = 0``) and uniformly coupled flips.

* :func:`sample_anderson` -- a tight-binding particle on a d-dimensional
  periodic lattice with Gaussian site energies (variance ``diag_w**2 / 2``)
  and hopping of mean ``hop_mean_t`` and variance ``hop_var_w1**2 / 2``
  between sites at Manhattan distance at most ``shell_k``.

Sampling is a pure function of ``(spec, realization_index, master_seed)``:
each realization draws from an independent RNG substream, so results do not
depend on how realizations are distributed over workers.
"""

import hashlib
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "QremSpec",
    "AndersonSpec",
    "HamiltonianSample",
    "sample_qrem",
    "sample_anderson",
    "variance_map",
    "dump_sample",
    "spec_digest",
    "realization_rng",
]

#: refuse QREM sampling above this many spins (dense 2^L x 2^L memory budget)
DEFAULT_MAX_SPINS = 14


@dataclass(frozen=True)
class QremSpec:
    """Parameters of the banded spin ensemble.

    ``n_spins`` is the chain length L (matrix dimension ``N = 2**L``),
    ``band_b`` the off-diagonal variance range (0 gives a diagonal matrix),
    and ``gamma`` the drift constant used by the complexity-parameter map
    (1/2 by convention for this ensemble).
    """

    n_spins: int
    band_b: float
    gamma: float = 0.5
    max_spins: int = DEFAULT_MAX_SPINS

    def __post_init__(self):
        if self.n_spins < 1:
            raise ValueError("n_spins must be >= 1")
        if self.band_b < 0:
            raise ValueError("band_b must be >= 0")
        if self.gamma <= 0:
            raise ValueError("gamma must be > 0")

    @property
    def dim(self):
        return 2 ** self.n_spins


@dataclass(frozen=True)
class AndersonSpec:
    """Parameters of the disordered lattice ensemble.

    ``side`` is the linear lattice size L (``N = L**dim`` sites, periodic
    boundaries), ``diag_w`` the site-energy disorder strength, ``hop_mean_t``
    and ``hop_var_w1`` the mean and strength of the hopping disorder, and
    ``shell_k`` the hopping range in Manhattan distance (1 -> z = 6
    neighbors, 2 -> z = 24 neighbors in three dimensions).  ``w_ref`` is the
    reference disorder (the largest w of a sweep) entering the complexity
    parameter; ``gamma`` its drift constant, ``1 / (2 w_min**2)`` by
    convention with ``w_min`` the smallest disorder of the sweep.
    """

    side: int
    diag_w: float
    hop_var_w1: float = 0.0
    hop_mean_t: float = 1.0
    shell_k: int = 1
    dim: int = 3
    gamma: float = 0.5
    w_ref: float = 1.0

    def __post_init__(self):
        if self.side < 2:
            raise ValueError("side must be >= 2")
        if self.shell_k not in (1, 2):
            raise ValueError("shell_k must be 1 or 2")
        if self.side < 2 * self.shell_k + 1:
            raise ValueError(
                "side must be >= 2*shell_k + 1, otherwise periodic images "
                "double-count neighbor pairs"
            )
        if self.diag_w <= 0:
            raise ValueError("diag_w must be > 0")
        if self.hop_var_w1 < 0:
            raise ValueError("hop_var_w1 must be >= 0")
        if self.gamma <= 0:
            raise ValueError("gamma must be > 0")

    @property
    def n_sites(self):
        return self.side ** self.dim

    @property
    def coordination(self):
        """Number of neighbors within Manhattan distance shell_k."""
        return len(_shell_offsets(self.dim, self.shell_k)) * 2


@dataclass
class HamiltonianSample:
    """One realization, stored as the upper triangle (incl. diagonal)."""

    dim: int
    rows: np.ndarray
    cols: np.ndarray
    values: np.ndarray
    realization_seed: int
    spec_digest: str
    realization_index: int = 0

    def to_dense(self):
        h = np.zeros((self.dim, self.dim))
        h[self.rows, self.cols] = self.values
        off = self.rows != self.cols
        h[self.cols[off], self.rows[off]] = self.values[off]
        return h

    @property
    def nnz(self):
        return len(self.values)


def spec_digest(spec):
    """Stable short digest of an ensemble spec, for seeding and manifests."""
    text = repr(spec)
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def realization_rng(spec, realization_index, master_seed):
    """Independent RNG substream for one realization.

    Streams are derived from (master_seed, digest of the spec, realization
    index), so the draw for realization i never depends on worker layout or
    on how many other realizations were sampled before it.
    """
    digest_int = int(spec_digest(spec), 16)
    seq = np.random.SeedSequence([int(master_seed), digest_int, int(realization_index)])
    return np.random.default_rng(seq), seq.generate_state(1, np.uint64)[0]


def sample_qrem(spec, realization_index, master_seed):
    """Draw one realization of the banded spin ensemble.

    Diagonal entries are i.i.d. Gaussian with variance ``L/2``.  For
    ``band_b > 0`` every row k couples to the L partners ``k XOR 2**r``
    with Gaussian entries of variance ``1 / (1 + (2**r / band_b)**2)``;
    each row therefore has exactly L nonzero off-diagonal entries.
    """
    if spec.n_spins > spec.max_spins:
        raise ValueError(
            f"n_spins={spec.n_spins} exceeds the memory cap max_spins={spec.max_spins}"
        )
    rng, seed = realization_rng(spec, realization_index, master_seed)
    ell = spec.n_spins
    n = spec.dim

    rows = [np.arange(n)]
    cols = [np.arange(n)]
    values = [rng.normal(0.0, np.sqrt(ell / 2.0), n)]

    if spec.band_b > 0:
        base = np.arange(n)
        for r in range(ell):
            offset = 1 << r
            # rows with bit r clear; the partner differs by a single flip
            i = base[(base & offset) == 0]
            # hypot form avoids overflow of (offset/band_b)**2 for tiny band_b
            sigma = 1.0 / math.hypot(1.0, offset / spec.band_b)
            rows.append(i)
            cols.append(i + offset)
            values.append(rng.normal(0.0, sigma, len(i)))

    return HamiltonianSample(
        dim=n,
        rows=np.concatenate(rows),
        cols=np.concatenate(cols),
        values=np.concatenate(values),
        realization_seed=int(seed),
        spec_digest=spec_digest(spec),
        realization_index=realization_index,
    )


def _shell_offsets(dim, shell_k):
    """Half of the displacement vectors with 0 < Manhattan norm <= shell_k.

    Keeping only the lexicographically positive half enumerates each
    unordered neighbor pair exactly once.
    """
    offsets = []
    for delta in itertools.product(range(-shell_k, shell_k + 1), repeat=dim):
        if 0 < sum(abs(d) for d in delta) <= shell_k:
            # first nonzero component positive picks one of (delta, -delta)
            first = next(d for d in delta if d != 0)
            if first > 0:
                offsets.append(delta)
    return offsets


def sample_anderson(spec, realization_index, master_seed):
    """Draw one realization of the disordered lattice ensemble.

    Site energies are i.i.d. Gaussian with variance ``diag_w**2 / 2``; each
    pair of sites within Manhattan distance ``shell_k`` (periodic
    boundaries) gets a hopping entry of mean ``hop_mean_t`` and variance
    ``hop_var_w1**2 / 2`` (exactly ``hop_mean_t`` when ``hop_var_w1 = 0``).
    """
    rng, seed = realization_rng(spec, realization_index, master_seed)
    L, d = spec.side, spec.dim
    n = spec.n_sites

    rows = [np.arange(n)]
    cols = [np.arange(n)]
    values = [rng.normal(0.0, spec.diag_w / np.sqrt(2.0), n)]

    site = np.arange(n)
    coords = np.stack(np.unravel_index(site, (L,) * d), axis=1)
    for delta in _shell_offsets(d, spec.shell_k):
        nb = (coords + np.asarray(delta)) % L
        j = np.ravel_multi_index(nb.T, (L,) * d)
        i = site
        # store in the upper triangle
        lo = np.minimum(i, j)
        hi = np.maximum(i, j)
        if spec.hop_var_w1 > 0:
            v = rng.normal(spec.hop_mean_t, spec.hop_var_w1 / np.sqrt(2.0), n)
        else:
            v = np.full(n, float(spec.hop_mean_t))
        rows.append(lo)
        cols.append(hi)
        values.append(v)

    return HamiltonianSample(
        dim=n,
        rows=np.concatenate(rows),
        cols=np.concatenate(cols),
        values=np.concatenate(values),
        realization_seed=int(seed),
        spec_digest=spec_digest(spec),
        realization_index=realization_index,
    )


def variance_map(spec):
    """(mean, variance parameter v) for each matrix-element class.

    The convention is the ensemble density ``exp[-(H - mean)**2 / v]``, i.e.
    Gaussian variance ``v / 2``.  These are exactly the parameters consumed
    by the complexity-parameter formulas.
    """
    if isinstance(spec, QremSpec):
        table = {"diagonal": (0.0, float(spec.n_spins))}
        for r in range(spec.n_spins):
            if spec.band_b > 0:
                v = 2.0 / math.hypot(1.0, (1 << r) / spec.band_b) ** 2
            else:
                v = 0.0
            table[f"offdiag_2^{r}"] = (0.0, v)
        return table
    if isinstance(spec, AndersonSpec):
        return {
            "diagonal": (0.0, float(spec.diag_w ** 2)),
            "hopping": (float(spec.hop_mean_t), float(spec.hop_var_w1 ** 2)),
        }
    raise TypeError(f"unknown spec type: {type(spec)!r}")


def dump_sample(sample, path):
    """Write a realization as text: header ``N nnz seed``, then triples."""
    with open(path, "w") as fh:
        fh.write(f"{sample.dim} {sample.nnz} {sample.realization_seed}\n")
        for r, c, v in zip(sample.rows, sample.cols, sample.values):
            fh.write(f"{r} {c} {v:.17g}\n")

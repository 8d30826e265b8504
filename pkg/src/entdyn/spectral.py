"""Dense diagonalization and mid-spectrum window extraction.

The statistics of interest live in a small window of eigenpairs around a
target energy (the band center E = 0 by default).  :func:`select_window`
keeps the ``n_w = max(2, round(f * N))`` eigenpairs closest to the target
(with a configurable floor so small systems still give reasonable window
statistics) and records the local mean level spacing and the mean inverse
participation ratio of the window.
"""

from dataclasses import dataclass

import numpy as np

__all__ = ["SpectralWindow", "diagonalize", "select_window", "ipr"]

#: refuse dense diagonalization above this dimension
DEFAULT_MAX_DIM = 8192


@dataclass
class SpectralWindow:
    """Eigenpairs nearest a target energy, with local spectral statistics."""

    target_energy: float
    fraction: float
    eigenvalues: np.ndarray  # sorted ascending, window only
    eigenvectors: np.ndarray  # N x n_w, orthonormal columns
    delta_e: float  # local mean level spacing
    mean_ipr: float

    @property
    def n_states(self):
        return len(self.eigenvalues)


def diagonalize(sample, max_dim=DEFAULT_MAX_DIM):
    """Full symmetric eigendecomposition of one realization.

    Returns ascending eigenvalues and the orthonormal eigenvector matrix.
    """
    if sample.dim > max_dim:
        raise ValueError(f"dim={sample.dim} exceeds the dense cap {max_dim}")
    h = sample.to_dense()
    try:
        eigs, vecs = np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:
        raise RuntimeError(
            f"diagonalization failed for realization "
            f"{sample.realization_index} (seed {sample.realization_seed})"
        ) from exc
    return eigs, vecs


def ipr(v):
    """Inverse participation ratio sum_r v_r**4 of a unit vector."""
    v = np.asarray(v)
    norm = np.sum(v ** 2)
    if abs(norm - 1.0) > 1e-8:
        raise ValueError(f"vector not normalized: |v|^2 = {norm}")
    return float(np.sum(v ** 4))


def select_window(eigs, vecs, target_energy=0.0, fraction=0.01, min_states=2):
    """Window of the ``n_w`` eigenpairs closest to ``target_energy``.

    ``n_w = max(min_states, round(fraction * N))``; ties at the window edge
    are broken by lower index.  The local mean level spacing is the window
    width divided by ``n_w - 1``.
    """
    n = len(eigs)
    n_w = max(int(min_states), int(round(fraction * n)))
    if n_w < 2:
        raise ValueError("window needs at least 2 states to define a level spacing")
    if n_w > n:
        raise ValueError(f"window of {n_w} states exceeds spectrum size {n}")
    order = np.argsort(np.abs(eigs - target_energy), kind="stable")
    sel = np.sort(order[:n_w])
    window_eigs = eigs[sel]
    window_vecs = vecs[:, sel]
    delta_e = float(window_eigs[-1] - window_eigs[0]) / (n_w - 1)
    if delta_e <= 0:
        raise ValueError("degenerate window: zero level spacing")
    mean_ipr = float(np.mean(np.sum(window_vecs ** 4, axis=0)))
    return SpectralWindow(
        target_energy=float(target_energy),
        fraction=float(fraction),
        eigenvalues=window_eigs,
        eigenvectors=window_vecs,
        delta_e=delta_e,
        mean_ipr=mean_ipr,
    )

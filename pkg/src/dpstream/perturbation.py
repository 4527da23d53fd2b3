"""Degree and community-pair edge-count extraction, noise, consistency, fusion."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .community import CommunityPartition
from .dp import BudgetError, NoiseSource, laplace_perturb, normsub
from .graph import Snapshot

DEGREE_SENSITIVITY = 2.0
PAIR_SENSITIVITY = 1.0


@dataclass(frozen=True)
class DegreeProfile:
    d_in: np.ndarray
    d_out: np.ndarray


@dataclass(frozen=True)
class PerturbedProfile:
    d_in_hat: np.ndarray
    d_out_hat: np.ndarray
    v_hat: np.ndarray
    m_pert: float
    eps_i: float
    eps_i1: float
    eps_i2: float

    @property
    def num_nodes(self) -> int:
        return len(self.d_in_hat)


def extract(s: Snapshot, part: CommunityPartition) -> tuple[DegreeProfile, np.ndarray]:
    """Per-node intra/inter degrees and the K x K inter-community edge counts."""
    if part.num_nodes < s.num_nodes:
        raise ValueError(f"partition covers {part.num_nodes} nodes, snapshot has {s.num_nodes}")
    labels = part.labels[: s.num_nodes]
    n, k = s.num_nodes, part.num_communities
    u, v = s.edges[:, 0], s.edges[:, 1]
    cu, cv = labels[u], labels[v]
    intra = cu == cv
    d_in = np.bincount(np.concatenate([u[intra], v[intra]]), minlength=n).astype(float)
    d_out = np.bincount(np.concatenate([u[~intra], v[~intra]]), minlength=n).astype(float)
    pairs = np.zeros((k, k))
    np.add.at(pairs, (cu[~intra], cv[~intra]), 1.0)
    pairs = pairs + pairs.T
    return DegreeProfile(d_in, d_out), pairs


def _upper(v: np.ndarray) -> tuple[tuple[np.ndarray, np.ndarray], np.ndarray]:
    iu = np.triu_indices(v.shape[0], 1)
    return iu, v[iu]


def _from_upper(iu, values: np.ndarray, k: int) -> np.ndarray:
    out = np.zeros((k, k))
    out[iu] = values
    return out + out.T


def perturb(profile: DegreeProfile, pairs: np.ndarray, eps_i: float, eps_i1: float,
            ns: NoiseSource, m_pert: float = 0.0) -> PerturbedProfile:
    """Laplace noise on the three statistics, followed by :func:`consistency`.

    Intra degrees touch only intra-community edges, so they get the whole
    ``eps_i``; inter degrees and pair counts read the same edges and split it
    as ``eps_i1`` + ``eps_i2``.
    """
    eps_i2 = eps_i - eps_i1
    if not (eps_i > 0 and eps_i1 > 0 and eps_i2 > 0):
        raise BudgetError(f"need 0 < eps_i1 < eps_i, got eps_i={eps_i}, eps_i1={eps_i1}")
    iu, upper = _upper(pairs)
    noisy = PerturbedProfile(
        d_in_hat=laplace_perturb(profile.d_in, eps_i, DEGREE_SENSITIVITY, ns),
        d_out_hat=laplace_perturb(profile.d_out, eps_i1, DEGREE_SENSITIVITY, ns),
        v_hat=_from_upper(iu, laplace_perturb(upper, eps_i2, PAIR_SENSITIVITY, ns), pairs.shape[0]),
        m_pert=m_pert, eps_i=eps_i, eps_i1=eps_i1, eps_i2=eps_i2,
    )
    return consistency(noisy)


def consistency(p: PerturbedProfile) -> PerturbedProfile:
    iu, upper = _upper(p.v_hat)
    return replace(p, d_in_hat=normsub(p.d_in_hat), d_out_hat=normsub(p.d_out_hat),
                   v_hat=_from_upper(iu, normsub(upper), p.v_hat.shape[0]))


def fusion_weights(current: PerturbedProfile, previous: PerturbedProfile) -> tuple[float, float]:
    a1 = current.eps_i / (current.eps_i + previous.eps_i)
    a2 = current.eps_i1 / (current.eps_i1 + previous.eps_i1)
    return a1, a2


def fuse(current: PerturbedProfile, previous: PerturbedProfile | None,
         reused: bool) -> PerturbedProfile:
    """Budget-weighted average of this and the previous degree estimates.

    Only nodes present at both timestamps are averaged; newcomers keep their
    current estimate and the pair counts are never fused.
    """
    if not reused or previous is None:
        return current
    n_old = previous.num_nodes
    if n_old > current.num_nodes:
        raise ValueError("previous profile covers more nodes than the current one")
    if previous.v_hat.shape != current.v_hat.shape:
        raise ValueError("fusion requires the same community structure at both timestamps")
    a1, a2 = fusion_weights(current, previous)
    d_in = current.d_in_hat.copy()
    d_out = current.d_out_hat.copy()
    d_in[:n_old] = a1 * d_in[:n_old] + (1 - a1) * previous.d_in_hat
    d_out[:n_old] = a2 * d_out[:n_old] + (1 - a2) * previous.d_out_hat
    return replace(current, d_in_hat=d_in, d_out_hat=d_out)

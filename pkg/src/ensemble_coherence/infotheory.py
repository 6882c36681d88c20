"""Holevo quantity, accessible information and unambiguous state discrimination."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize
from scipy.special import entr

from .entangle import DEFAULT_SEED, Ensemble, Povm
from .optimize import golden_section_batch, grid_then_golden
from .qubit import LN2, IDENTITY, binary_entropy, eigen2, projector, von_neumann_entropy

ANALYTIC = "analytic_two_pure"
OPTIMIZED = "optimized"

PROJECTIVE_GRID = 256
MULTI_STARTS = 32
COORD_ROUNDS = 3
POLISH = 2
# bracket width for the coordinate phase; the simplex polish takes it from there
COORD_TOL = 1e-6
# a three-outcome POVM must beat the best projective one by this much (bits);
# smaller gains come from near-duplicate directions whose weights are ill-conditioned
TRINE_GAIN = 1e-10


class DegenerateUSDWarning(UserWarning):
    """Unambiguous discrimination was requested for two identical states."""


class NonPlanarEnsembleWarning(UserWarning):
    """Ensemble Bloch vectors do not share a plane; the optimizer result is a lower bound."""


@dataclass(frozen=True)
class AccessibleInfoResult:
    value: float
    optimal_povm: Povm
    method: str


def holevo(ens: Ensemble) -> float:
    """S(sum p_i rho_i) - sum p_i S(rho_i) in bits."""
    avg = ens.average()
    avg = 0.5 * (avg + avg.conj().T)
    chi = von_neumann_entropy(avg, validate=False) - float(
        np.dot(ens.probs, von_neumann_entropy(ens.states, validate=False))
    )
    return max(float(chi), 0.0)


def _mi_from_likelihoods(probs: np.ndarray, lik: np.ndarray) -> np.ndarray:
    """Mutual information (bits) from ``lik[..., i, k] = P(outcome k | state i)``."""
    lik = np.clip(lik, 0.0, None)
    outcome = np.einsum("i,...ik->...k", probs, lik)
    h_out = entr(outcome).sum(axis=-1)
    h_cond = np.einsum("i,...i->...", probs, entr(lik).sum(axis=-1))
    return np.maximum((h_out - h_cond) / LN2, 0.0)


def mutual_information(ens: Ensemble, povm: Povm) -> float:
    """I(X;Y) between the ensemble label and the outcome of ``povm``."""
    lik = povm.probabilities(ens.states)
    return float(_mi_from_likelihoods(ens.probs, lik))


def _plane_rotation(r: np.ndarray) -> tuple[np.ndarray, float]:
    """Rotation taking the best-fit plane of Bloch vectors ``r`` to the XZ plane.

    Returns the rotation and the largest out-of-plane component left over.
    """
    if np.max(np.abs(r[:, 1]), initial=0.0) <= 1e-12:
        return np.eye(3), 0.0
    _, _, vh = np.linalg.svd(r, full_matrices=True)
    normal = vh[-1]
    u = vh[0]
    w = np.cross(u, normal)
    rot = np.stack([u, normal, w])
    return rot, float(np.max(np.abs(r @ normal)))


def _real_plane_lik(rx: np.ndarray, rz: np.ndarray, angles: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """P(k|i) for rank-1 elements w_k |t_k><t_k| with Bloch directions (sin t_k, 0, cos t_k)."""
    dots = rx[:, None] * np.sin(angles)[..., None, :] + rz[:, None] * np.cos(angles)[..., None, :]
    return 0.5 * weights[..., None, :] * (1.0 + dots)


def _trine_weights(t: np.ndarray) -> np.ndarray:
    """Weights making three rank-1 elements at Bloch angles ``t`` complete (negative if impossible)."""
    w = np.stack(
        [np.sin(t[..., 2] - t[..., 1]), np.sin(t[..., 0] - t[..., 2]), np.sin(t[..., 1] - t[..., 0])],
        axis=-1,
    )
    total = w.sum(axis=-1, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        w = 2.0 * w / total
    return np.where(np.isfinite(w), w, -1.0)


def _feasible_arc(ti: np.ndarray, tj: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Arc (start, length) of third angles completing a POVM with elements at ti, tj.

    The third direction must lie between the antipodes of the other two.
    """
    a = (ti + math.pi) % (2 * math.pi)
    b = (tj + math.pi) % (2 * math.pi)
    diff = (b - a) % (2 * math.pi)
    start = np.where(diff <= math.pi, a, b)
    length = np.where(diff <= math.pi, diff, 2 * math.pi - diff)
    return start, length


def _optimize_projective(rx, rz, probs, tol):
    def neg_mi(t):
        angles = np.stack([t, t + math.pi], axis=-1)
        return -_mi_from_likelihoods(probs, _real_plane_lik(rx, rz, angles, np.ones_like(angles)))

    t, f, _ = grid_then_golden(neg_mi, 0.0, math.pi, PROJECTIVE_GRID, tol, periodic=True)
    return np.array([t, t + math.pi]), np.ones(2), -f


def _optimize_trine(rx, rz, probs, tol, starts, seed):
    rng = np.random.default_rng(seed)
    found = []
    while sum(len(x) for x in found) < starts:
        cand = rng.uniform(0.0, 2 * math.pi, size=(4 * starts, 3))
        found.append(cand[np.all(_trine_weights(cand) > 0, axis=1)])
    t = np.concatenate(found)[:starts]

    def mi(angles):
        w = _trine_weights(angles)
        val = _mi_from_likelihoods(probs, _real_plane_lik(rx, rz, angles, np.clip(w, 0.0, None)))
        return np.where(np.all(w >= 0, axis=-1), val, -np.inf)

    current = mi(t)
    for _ in range(COORD_ROUNDS):
        for k in range(3):
            i, j = [x for x in range(3) if x != k]
            start, length = _feasible_arc(t[:, i], t[:, j])
            base = t.copy()

            def neg_along(s, k=k, base=base, start=start, length=length):
                trial = base.copy()
                trial[:, k] = start + s * length
                return -mi(trial)

            s, f, _ = golden_section_batch(neg_along, np.zeros(len(t)), np.ones(len(t)), max(tol, COORD_TOL))
            better = -f > current
            t[better, k] = (start + s * length)[better]
            current = np.where(better, -f, current)

    # coordinate moves crawl along the coupled ridge; finish the leaders with a simplex search
    for idx in np.argsort(-current, kind="stable")[:POLISH]:
        res = minimize(
            lambda x: -float(mi(x[None])[0]),
            t[idx],
            method="Nelder-Mead",
            options={"xatol": tol, "fatol": 1e-15, "maxiter": 4000},
        )
        if -res.fun > current[idx]:
            t[idx], current[idx] = res.x, -res.fun
    best = int(np.argmax(current))
    return t[best], _trine_weights(t[best]), float(current[best])


def _kets_from_angles(angles: np.ndarray, rot: np.ndarray) -> np.ndarray:
    directions = np.stack([np.sin(angles), np.zeros_like(angles), np.cos(angles)], axis=-1) @ rot
    theta = np.arctan2(np.hypot(directions[:, 0], directions[:, 1]), directions[:, 2])
    phi = np.arctan2(directions[:, 1], directions[:, 0])
    return np.stack([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)], axis=-1)


def _analytic_applies(ens: Ensemble) -> bool:
    return len(ens) == 2 and ens.all_pure and bool(np.all(np.abs(ens.probs - 0.5) <= 1e-12))


def accessible_information(
    ens: Ensemble,
    starts: int = MULTI_STARTS,
    tol: float = 1e-9,
    seed: int = DEFAULT_SEED,
    method: str | None = None,
) -> AccessibleInfoResult:
    """Largest mutual information between ensemble label and a measurement outcome.

    Two equiprobable pure states use the closed form
    ``1 - h2((1 + sqrt(1 - |<psi1|psi2>|^2)) / 2)`` realized by the
    minimum-error measurement.  Everything else goes through a search over
    rank-1 POVMs with at most three elements whose Bloch directions lie in the
    plane of the ensemble.  ``method`` forces one path.
    """
    if method is None:
        method = ANALYTIC if _analytic_applies(ens) else OPTIMIZED
    if method == ANALYTIC:
        if not _analytic_applies(ens):
            raise ValueError("closed form needs two equiprobable pure states")
        overlap = min(abs(np.vdot(ens.kets[0], ens.kets[1])), 1.0)
        value = 1.0 - binary_entropy((1.0 + math.sqrt(1.0 - overlap * overlap)) / 2.0)
        _, vecs = eigen2(ens.states[0] - ens.states[1])
        povm = Povm.from_rank1(np.ones(2), vecs.T)
        return AccessibleInfoResult(max(value, 0.0), povm, ANALYTIC)

    r = ens.bloch()
    rot, residual = _plane_rotation(r)
    if residual > 1e-9:
        warnings.warn(
            f"ensemble Bloch vectors leave the plane by {residual:.3g}; accessible information is a lower bound",
            NonPlanarEnsembleWarning,
            stacklevel=2,
        )
    rr = r @ rot.T
    rx, rz = rr[:, 0], rr[:, 2]
    angles, weights, value = _optimize_projective(rx, rz, ens.probs, tol)
    if len(ens) > 1:
        trine = _optimize_trine(rx, rz, ens.probs, tol, starts, seed)
        if trine[2] > value + TRINE_GAIN:
            angles, weights, value = trine
    keep = weights > 1e-14
    povm = Povm.from_rank1(weights[keep], _kets_from_angles(angles[keep], rot))
    return AccessibleInfoResult(mutual_information(ens, povm), povm, OPTIMIZED)


def coherence_lower_bound(ens: Ensemble, **kwargs) -> float:
    """max(0, Holevo quantity - accessible information)."""
    return max(0.0, holevo(ens) - accessible_information(ens, **kwargs).value)


def usd_povm(psi1: np.ndarray, psi2: np.ndarray) -> tuple[Povm, float]:
    """Unambiguous discrimination measurement for two pure states.

    Elements ``q(1 - |psi2><psi2|)``, ``q(1 - |psi1><psi1|)`` and the
    inconclusive remainder, with ``q = 1 / (1 + |<psi1|psi2>|)``.  Returns the
    POVM and the probability ``1 - |<psi1|psi2>|`` of a conclusive outcome.
    """
    psi1 = np.asarray(psi1, dtype=complex)
    psi2 = np.asarray(psi2, dtype=complex)
    overlap = min(abs(np.vdot(psi1, psi2)), 1.0)
    if overlap * overlap > 1 - 1e-12:
        warnings.warn("identical states cannot be discriminated", DegenerateUSDWarning, stacklevel=2)
        zero = np.zeros((2, 2), dtype=complex)
        return Povm(np.stack([zero, zero, IDENTITY])), 0.0
    q = 1.0 / (1.0 + overlap)
    m1 = q * (IDENTITY - projector(psi2))
    m2 = q * (IDENTITY - projector(psi1))
    m_fail = IDENTITY - m1 - m2
    # clear rounding noise on the (possibly zero) inconclusive element
    vals, vecs = eigen2(m_fail)
    m_fail = np.einsum("ik,k,jk->ij", vecs, np.clip(vals, 0.0, None), vecs.conj())
    return Povm(np.stack([m1, m2, m_fail])), 1.0 - overlap

"""Relative entropy of coherence for states and ensembles, and its basis-free minimum."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize
from scipy.special import entr

from .entangle import Ensemble
from .optimize import golden_section_batch, grid_size_for, grid_then_golden, pick_grid_min
from .qubit import LN2, DomainError, MeasurementBasis, binary_entropy, check_density, von_neumann_entropy

THETA_GRID = 1024
THETA_GRID_2D = 256
PHI_GRID_2D = 128
COORD_ROUNDS_2D = 3


@dataclass(frozen=True)
class CoherenceResult:
    value: float
    optimal_basis: MeasurementBasis
    optimizer_iterations: int


def relative_entropy_coherence(rho: np.ndarray, basis: MeasurementBasis) -> float:
    """S(rho_diag) - S(rho), with rho_diag the dephasing of rho in ``basis``."""
    rho = check_density(rho)
    u = basis.unitary
    in_basis = u.conj().T @ rho @ u
    diag = np.diag(np.diag(in_basis))
    value = von_neumann_entropy(diag, validate=False) - von_neumann_entropy(rho, validate=False)
    return max(float(value), 0.0)


def _coherence_general(ens: Ensemble, basis: MeasurementBasis) -> float:
    return float(sum(p * relative_entropy_coherence(rho, basis) for p, rho in zip(ens.probs, ens.states)))


def _coherence_pure(ens: Ensemble, basis: MeasurementBasis) -> float:
    overlaps = np.abs(ens.kets @ basis.e1.conj()) ** 2
    return float(np.dot(ens.probs, binary_entropy(np.clip(overlaps, 0.0, 1.0))))


def ensemble_coherence_in_basis(ens: Ensemble, basis: MeasurementBasis) -> float:
    """Probability-weighted relative entropy of coherence in a fixed basis.

    All-pure ensembles take the overlap shortcut ``sum p_i h2(|<e1|psi_i>|^2)``.
    """
    if ens.all_pure:
        return _coherence_pure(ens, basis)
    return _coherence_general(ens, basis)


def real_plane_profile(vecs: np.ndarray, thetas: np.ndarray) -> np.ndarray:
    """Ensemble coherence of pure ensembles along real bases ``theta`` (phi = 0).

    ``vecs[..., i, :]`` is ``sqrt(p_i) |psi_i>``; zero rows are allowed.  Uses
    ``p h2(q) = entr(p q) + entr(p (1 - q)) - entr(p)`` so no division by
    ``p`` is needed.  Returns an array of shape ``vecs.shape[:-2] + thetas.shape``.
    """
    thetas = np.asarray(thetas, dtype=float)
    c = np.cos(thetas / 2)
    s = np.sin(thetas / 2)
    v0 = vecs[..., None, :, 0]
    v1 = vecs[..., None, :, 1]
    cc = c[:, None]
    ss = s[:, None]
    a = np.abs(cc * v0 + ss * v1) ** 2
    b = np.abs(ss * v0 - cc * v1) ** 2
    p = np.abs(vecs[..., 0]) ** 2 + np.abs(vecs[..., 1]) ** 2
    total = entr(a).sum(axis=-1) + entr(b).sum(axis=-1) - entr(p).sum(axis=-1)[..., None]
    return np.maximum(total / LN2, 0.0)


def coherence_profile(ens: Ensemble, thetas: np.ndarray, phis: np.ndarray | float = 0.0) -> np.ndarray:
    """Ensemble coherence over many bases at once (``thetas``/``phis`` broadcast)."""
    thetas, phis = np.broadcast_arrays(np.asarray(thetas, float), np.asarray(phis, float))
    if ens.all_pure and np.all(phis == 0):
        vecs = np.sqrt(ens.probs)[:, None] * ens.kets
        return real_plane_profile(vecs, thetas.ravel()).reshape(thetas.shape)
    e1 = np.stack([np.cos(thetas / 2), np.exp(1j * phis) * np.sin(thetas / 2)], axis=-1)
    q = np.einsum("...a,iab,...b->...i", e1.conj(), ens.states, e1).real
    q = np.clip(q, 0.0, 1.0)
    s_states = von_neumann_entropy(ens.states, validate=False)
    terms = (entr(q) + entr(1.0 - q)) / LN2 - s_states
    return np.maximum(terms @ ens.probs, 0.0)


def _minimize_real(ens: Ensemble, tol: float, n_grid: int) -> CoherenceResult:
    n = grid_size_for(math.pi, tol, n_grid)
    theta, value, nevals = grid_then_golden(
        lambda t: coherence_profile(ens, t), 0.0, math.pi, n, tol, periodic=True
    )
    return CoherenceResult(value, MeasurementBasis(theta, 0.0), nevals)


def _bloch_to_basis(n: np.ndarray) -> MeasurementBasis:
    n = n / np.linalg.norm(n)
    theta = math.atan2(math.hypot(float(n[0]), float(n[1])), float(n[2]))
    phi = math.atan2(float(n[1]), float(n[0])) % (2 * math.pi)
    return MeasurementBasis(theta, phi)


def _minimize_sphere(ens: Ensemble, tol: float) -> CoherenceResult:
    n_theta = grid_size_for(math.pi, tol, THETA_GRID_2D)
    n_phi = max(2, grid_size_for(2 * math.pi, tol, PHI_GRID_2D + 1) - 1)
    thetas = np.linspace(0.0, math.pi, n_theta)
    phis = np.linspace(0.0, 2 * math.pi, n_phi, endpoint=False)
    grid = coherence_profile(ens, thetas[:, None], phis[None, :])
    j = pick_grid_min(grid.ravel())
    theta, phi = float(thetas[j // n_phi]), float(phis[j % n_phi])
    value = float(grid.ravel()[j])
    nevals = grid.size
    dtheta = thetas[1] - thetas[0]
    dphi = phis[1] - phis[0]

    for _ in range(COORD_ROUNDS_2D):
        lo, hi = max(theta - dtheta, 0.0), min(theta + dtheta, math.pi)
        t, ft, k = golden_section_batch(lambda x: coherence_profile(ens, x, phi), np.array([lo]), np.array([hi]), tol)
        nevals += k
        if ft[0] < value:
            theta, value = float(t[0]), float(ft[0])
        ph, fp, k = golden_section_batch(
            lambda x: coherence_profile(ens, theta, x), np.array([phi - dphi]), np.array([phi + dphi]), tol
        )
        nevals += k
        if fp[0] < value:
            phi, value = float(ph[0]) % (2 * math.pi), float(fp[0])

    # polish in a chart tangent to the current optimum, free of the pole singularity
    best = MeasurementBasis(theta, phi)
    n0 = best.bloch
    t1 = np.array([math.cos(theta) * math.cos(phi), math.cos(theta) * math.sin(phi), -math.sin(theta)])
    t2 = np.cross(n0, t1)

    def chart(uv):
        n = n0 + uv[0] * t1 + uv[1] * t2
        return n / np.linalg.norm(n)

    def f_chart(uv):
        b = _bloch_to_basis(chart(uv))
        return float(coherence_profile(ens, b.theta, b.phi))

    res = minimize(
        f_chart,
        np.zeros(2),
        method="Nelder-Mead",
        options={"xatol": max(tol, 1e-12), "fatol": 1e-15, "initial_simplex": [[0, 0], [dtheta, 0], [0, dtheta]]},
    )
    nevals += res.nfev
    if res.fun < value - 1e-15:
        best, value = _bloch_to_basis(chart(res.x)), float(res.fun)
    return CoherenceResult(value, best, nevals)


def basis_free_coherence(
    ens: Ensemble,
    real_plane: bool | None = None,
    basis_tol: float = 1e-10,
    n_grid: int = THETA_GRID,
) -> CoherenceResult:
    """Minimum of the ensemble coherence over all orthonormal qubit bases.

    With ``real_plane`` the search is restricted to real bases (``phi = 0``,
    ``theta`` in ``[0, pi]``); by default this is chosen when every state is
    real.  ``basis_tol`` is the final bracket width of the golden-section
    refinement; when it is coarser than the default grid spacing the grid is
    coarsened to match.
    """
    if basis_tol <= 0:
        raise DomainError("basis_tol must be positive")
    if real_plane is None:
        real_plane = ens.is_real
    if real_plane:
        return _minimize_real(ens, basis_tol, n_grid)
    return _minimize_sphere(ens, basis_tol)


def perturb_ensemble(ens: Ensemble, rho: np.ndarray, delta: float) -> Ensemble:
    """Mix ``rho`` into ``ens`` with weight ``delta``; zero-weight entries are dropped."""
    if delta < 0 or delta > 1 or math.isnan(delta):
        raise DomainError(f"delta must lie in [0, 1], got {delta}")
    rho = check_density(rho)
    extra = Ensemble(np.array([1.0]), rho[None])
    if delta == 0:
        return ens
    if delta == 1:
        return extra
    probs = np.concatenate([[delta], (1 - delta) * ens.probs])
    states = np.concatenate([rho[None], ens.states])
    pure = np.concatenate([extra.pure, ens.pure])
    kets = np.concatenate([extra.kets, ens.kets])
    return Ensemble(probs, states, pure, kets)

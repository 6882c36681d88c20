"""Symmetric rank-1 POVMs in the XZ plane and the ensembles they induce.

Element ``i`` of the ``N``-outcome family is ``(2/N)|xi_i><xi_i|`` with
``|xi_i> = cos(t_i/2)|0> + sin(t_i/2)|1>`` and ``t_i = gamma + 2 pi (i-1)/N``.
N = 2 with gamma = pi/2 is the Hadamard measurement (B92 ensemble), N = 3
the trine and N = 4 the two BB84 bases.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import astuple, dataclass, fields

import numpy as np

from .coherence import THETA_GRID, real_plane_profile
from .entangle import (
    DEFAULT_SEED,
    PROB_DROP,
    Ensemble,
    Povm,
    SchmidtState,
    entanglement,
    merge_duplicates,
)
from .infotheory import accessible_information, holevo
from .optimize import TIE_TOL, golden_section, grid_size_for, grid_then_golden, pick_grid_min
from .qubit import DomainError, projector

GAMMA_GRID = 256
SCREEN_CANDIDATES = 4
SANDWICH_TOL = 1e-6
# cap on gamma x theta x state entries held at once during screening
_SCREEN_CHUNK = 4_000_000
# total gamma x theta x state entries spent on screening; large n gets fewer gammas
_SCREEN_BUDGET = GAMMA_GRID * THETA_GRID * 16


class SandwichViolation(RuntimeError):
    """A record breaks lower_bound <= coherence <= holevo."""


@dataclass(frozen=True)
class SymPovmSpec:
    n: int
    gamma: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise DomainError(f"n must be an integer >= 2, got {self.n}")
        if self.gamma < -1e-12 or self.gamma > math.pi / self.n + 1e-12:
            raise DomainError(f"gamma must lie in [0, pi/n], got {self.gamma}")
        object.__setattr__(self, "n", int(self.n))

    @property
    def angles(self) -> np.ndarray:
        return self.gamma + 2 * math.pi * np.arange(self.n) / self.n


@dataclass(frozen=True)
class SweepRecord:
    alpha: float
    entanglement: float
    n: int
    coherence: float
    optimal_gamma: float
    optimal_theta: float
    holevo: float
    accessible_info: float
    lower_bound: float

    @classmethod
    def columns(cls) -> list[str]:
        return [f.name for f in fields(cls)]

    def as_tuple(self) -> tuple:
        return astuple(self)

    def sandwich_ok(self, tol: float = SANDWICH_TOL) -> bool:
        return self.lower_bound - tol <= self.coherence <= self.holevo + tol

    def check_sandwich(self, tol: float = SANDWICH_TOL) -> None:
        if not self.sandwich_ok(tol):
            raise SandwichViolation(
                f"alpha={self.alpha:.6g} n={self.n}: lower bound {self.lower_bound:.9g}, "
                f"coherence {self.coherence:.9g}, holevo {self.holevo:.9g}"
            )


def rotation_unitary(n: int) -> np.ndarray:
    """cos(pi/n) I - i sin(pi/n) sigma_y, the step between consecutive symmetric states."""
    c, s = math.cos(math.pi / n), math.sin(math.pi / n)
    return np.array([[c, -s], [s, c]], dtype=complex)


def _xi(angles: np.ndarray) -> np.ndarray:
    return np.stack([np.cos(angles / 2), np.sin(angles / 2)], axis=-1).astype(complex)


def build_sym_povm(spec: SymPovmSpec) -> Povm:
    return Povm.from_rank1(np.full(spec.n, 2.0 / spec.n), _xi(spec.angles))


def sym_probabilities(spec: SymPovmSpec, state: SchmidtState) -> np.ndarray:
    c2 = math.cos(state.alpha) ** 2
    s2 = math.sin(state.alpha) ** 2
    half = spec.angles / 2
    return (2.0 / spec.n) * (np.cos(half) ** 2 * c2 + np.sin(half) ** 2 * s2)


def _weighted_vectors(n: int, gammas: np.ndarray, alpha: float) -> np.ndarray:
    """sqrt(p_i)|psi_i> = sqrt(2/N)(cos a cos(t_i/2), sin a sin(t_i/2)) for each gamma."""
    t = np.asarray(gammas, dtype=float)[..., None] + 2 * math.pi * np.arange(n) / n
    scale = math.sqrt(2.0 / n)
    return np.stack(
        [scale * math.cos(alpha) * np.cos(t / 2), scale * math.sin(alpha) * np.sin(t / 2)], axis=-1
    )


def sym_ensemble(spec: SymPovmSpec, state: SchmidtState, merge: bool = True) -> Ensemble:
    """Bob's ensemble for the symmetric POVM, from the closed-form states.

    Zero-probability outcomes are dropped; with ``merge`` coinciding states
    are combined (this happens as the entanglement goes to zero).
    """
    probs = sym_probabilities(spec, state)
    vecs = _weighted_vectors(spec.n, np.array(spec.gamma), state.alpha)
    keep = probs > PROB_DROP
    kets = vecs[keep] / np.sqrt(probs[keep])[:, None]
    kets = kets / np.linalg.norm(kets, axis=1, keepdims=True)
    kets = kets.astype(complex)
    ens = Ensemble(probs[keep], projector(kets), np.ones(int(keep.sum()), dtype=bool), kets)
    return merge_duplicates(ens) if merge else ens


def _screen_gammas(n: int, alpha: float, gammas: np.ndarray, thetas: np.ndarray) -> np.ndarray:
    """Grid-resolution inner minimum over bases for every gamma."""
    out = np.empty(len(gammas))
    step = max(1, _SCREEN_CHUNK // (len(thetas) * n))
    for start in range(0, len(gammas), step):
        vecs = _weighted_vectors(n, gammas[start : start + step], alpha)
        out[start : start + step] = real_plane_profile(vecs, thetas).min(axis=-1)
    return out


def _inner(n: int, state: SchmidtState, gamma: float, basis_tol: float) -> tuple[float, float]:
    """Basis-free coherence and optimal theta of the ensemble at one gamma.

    Same search as :func:`basis_free_coherence` on the real plane, run on
    the closed-form weighted vectors so no ensemble object is built.
    """
    vecs = _weighted_vectors(n, np.array(gamma), state.alpha)
    n_theta = grid_size_for(math.pi, basis_tol, THETA_GRID)
    theta, value, _ = grid_then_golden(
        lambda t: real_plane_profile(vecs, t), 0.0, math.pi, n_theta, basis_tol, periodic=True
    )
    return value, theta


def optimize_gamma(
    n: int,
    state: SchmidtState,
    basis_tol: float = 1e-10,
    gamma_tol: float = 1e-10,
    gamma_grid: int = GAMMA_GRID,
) -> tuple[float, float, float]:
    """max over gamma in [0, pi/n] of the basis-free coherence of the induced ensemble.

    A screening pass evaluates every gamma grid point with the inner minimum
    taken on the basis grid only.  The best screened points and both window
    ends are then evaluated exactly, and the winner is refined by golden
    section.  Near-ties prefer the larger gamma.

    Returns:
        ``(coherence, gamma, theta)``.
    """
    if gamma_tol <= 0:
        raise DomainError("gamma_tol must be positive")
    hi = math.pi / n
    n_theta = grid_size_for(math.pi, basis_tol, THETA_GRID)
    n_gamma = grid_size_for(hi, gamma_tol, gamma_grid)
    n_gamma = min(n_gamma, max(16, _SCREEN_BUDGET // (n_theta * n)))
    gammas = np.linspace(0.0, hi, n_gamma)
    thetas = math.pi * np.arange(n_theta) / n_theta
    screened = _screen_gammas(n, state.alpha, gammas, thetas)
    order = np.argsort(-screened, kind="stable")
    candidates = sorted(set(order[:SCREEN_CANDIDATES].tolist()) | {0, len(gammas) - 1})
    exact = {j: _inner(n, state, float(gammas[j]), basis_tol) for j in candidates}
    values = np.array([exact[j][0] for j in candidates])
    j = candidates[pick_grid_min(-values, prefer="high")]
    best_gamma, best = float(gammas[j]), exact[j]

    lo_b = gammas[max(j - 1, 0)]
    hi_b = gammas[min(j + 1, len(gammas) - 1)]
    g, neg_val, _ = golden_section(lambda x: -_inner(n, state, x, basis_tol)[0], lo_b, hi_b, gamma_tol)
    if -neg_val > best[0] + TIE_TOL:
        best_gamma, best = g, _inner(n, state, g, basis_tol)
    return best[0], best_gamma, best[1]


def gamma_optimized_coherence(
    n: int,
    state: SchmidtState,
    basis_tol: float = 1e-10,
    gamma_tol: float = 1e-10,
    seed: int = DEFAULT_SEED,
    with_info: bool = True,
) -> SweepRecord:
    """Coherence maximized over the POVM rotation, with the information bounds attached.

    ``with_info=False`` skips the Holevo/accessible-information columns
    (reported as NaN).
    """
    if n < 2:
        raise DomainError("n must be >= 2")
    value, gamma, theta = optimize_gamma(n, state, basis_tol, gamma_tol)
    if n % 2 == 0 and 0 < state.alpha < math.pi / 2 and abs(gamma - math.pi / n) > 1e-3:
        warnings.warn(f"even n={n}: optimal gamma {gamma:.6g} differs from pi/n", RuntimeWarning, stacklevel=2)
    if with_info:
        ens = sym_ensemble(SymPovmSpec(n, gamma), state)
        chi = holevo(ens)
        iacc = accessible_information(ens, seed=seed).value
        lower = max(0.0, chi - iacc)
    else:
        chi = iacc = lower = float("nan")
    return SweepRecord(state.alpha, entanglement(state), n, value, gamma, theta, chi, iacc, lower)


def asymptotic_split(
    state: SchmidtState,
    n_large: int = 256,
    basis_tol: float = 1e-10,
    gamma_tol: float = 1e-10,
    seed: int = DEFAULT_SEED,
) -> tuple[float, float, float]:
    """Coherence, accessible information and ``|E - C - I_acc|`` for a many-outcome POVM."""
    if n_large < 64:
        raise DomainError("n_large must be >= 64")
    rec = gamma_optimized_coherence(n_large, state, basis_tol, gamma_tol, seed)
    return rec.coherence, rec.accessible_info, abs(rec.entanglement - rec.coherence - rec.accessible_info)


def split_residuals(
    state: SchmidtState,
    ns: tuple[int, ...] = (8, 16, 32, 64),
    basis_tol: float = 1e-10,
    gamma_tol: float = 1e-10,
    seed: int = DEFAULT_SEED,
) -> list[float]:
    """``|E - C - I_acc|`` for each n; warns if it fails to shrink monotonically."""
    out = []
    for n in ns:
        rec = gamma_optimized_coherence(n, state, basis_tol, gamma_tol, seed)
        out.append(abs(rec.entanglement - rec.coherence - rec.accessible_info))
    if any(b > a for a, b in zip(out, out[1:])):
        warnings.warn(f"split residual not monotone in n: {out}", RuntimeWarning, stacklevel=2)
    return out

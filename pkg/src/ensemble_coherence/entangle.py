"""Two-qubit Schmidt states, POVMs and the measurement/ensemble duality map.

Alice measures her half of ``cos(a)|00> + sin(a)|11>`` with a POVM; the
duality map returns the ensemble of conditional states Bob is left with.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize
from scipy.special import entr

from .optimize import golden_section_batch
from .qubit import (
    HERMITIAN_TOL,
    IDENTITY,
    LN2,
    DomainError,
    InvariantError,
    MeasurementBasis,
    binary_entropy,
    bloch_vector,
    check_density,
    eigen2,
    projector,
    purity,
)

PROB_DROP = 1e-12
PROB_SUM_TOL = 1e-10
DEFAULT_SEED = 1729

# decomposition search: coordinate phase, then a simplex polish of the leaders
UNCERTAINTY_ROUNDS = 4
UNCERTAINTY_WINDOW = 0.5
UNCERTAINTY_POLISH = 3
COORD_TOL = 1e-6


@dataclass(frozen=True)
class SchmidtState:
    """``cos(alpha)|00> + sin(alpha)|11>`` with ``0 <= alpha <= pi/2``."""

    alpha: float

    def __post_init__(self):
        a = float(self.alpha)
        if a < -1e-12 or a > math.pi / 2 + 1e-12 or math.isnan(a):
            raise DomainError(f"alpha must lie in [0, pi/2], got {a}")
        object.__setattr__(self, "alpha", min(max(a, 0.0), math.pi / 2))

    @property
    def coefficients(self) -> tuple[float, float]:
        return math.cos(self.alpha), math.sin(self.alpha)

    @property
    def reduced(self) -> np.ndarray:
        """Reduced density operator; identical for Alice and Bob in the Schmidt basis."""
        c, s = self.coefficients
        return np.diag([c * c, s * s]).astype(complex)

    @property
    def ket(self) -> np.ndarray:
        c, s = self.coefficients
        return np.array([c, 0.0, 0.0, s], dtype=complex)


def entanglement(state: SchmidtState) -> float:
    """Entanglement entropy of a Schmidt state in bits."""
    return binary_entropy(math.cos(state.alpha) ** 2)


def alpha_for_entanglement(e: float) -> SchmidtState:
    """Schmidt state with ``alpha`` in ``[0, pi/4]`` carrying ``e`` bits of entanglement."""
    if e < 0 or e > 1 or math.isnan(e):
        raise DomainError(f"entanglement must lie in [0, 1], got {e}")
    if e == 0:
        return SchmidtState(0.0)
    if e == 1:
        return SchmidtState(math.pi / 4)
    alpha = brentq(
        lambda a: binary_entropy(math.cos(a) ** 2) - e, 0.0, math.pi / 4, xtol=1e-15
    )
    return SchmidtState(alpha)


@dataclass(frozen=True, eq=False)
class Povm:
    """Positive operators summing to the identity.

    ``weights``/``kets`` hold the rank-1 form ``M_k = w_k |k><k|`` when every
    element has rank one; it is derived automatically if not supplied.
    """

    elements: np.ndarray
    weights: np.ndarray | None = None
    kets: np.ndarray | None = None

    def __post_init__(self):
        el = np.asarray(self.elements, dtype=complex)
        if el.ndim != 3 or el.shape[1:] != (2, 2) or len(el) == 0:
            raise InvariantError(f"POVM elements must have shape (K, 2, 2), got {el.shape}")
        if np.max(np.abs(el - np.swapaxes(el, 1, 2).conj())) > HERMITIAN_TOL:
            raise InvariantError("POVM element is not Hermitian")
        vals, vecs = eigen2(el)
        if vals.min() < -HERMITIAN_TOL:
            raise InvariantError("POVM element is not positive semidefinite")
        if np.max(np.abs(el.sum(axis=0) - IDENTITY)) > HERMITIAN_TOL:
            raise InvariantError("POVM elements do not sum to the identity")
        object.__setattr__(self, "elements", el)
        if self.weights is None:
            if np.all(np.abs(vals[:, 1]) <= 1e-12) and np.all(vals[:, 0] > 1e-12):
                object.__setattr__(self, "weights", vals[:, 0].copy())
                object.__setattr__(self, "kets", vecs[:, :, 0].copy())
        else:
            w = np.asarray(self.weights, dtype=float)
            k = np.asarray(self.kets, dtype=complex)
            if np.any(w <= 0):
                raise InvariantError("rank-1 weights must be positive")
            if np.max(np.abs(w[:, None, None] * projector(k) - el)) > 1e-12:
                raise InvariantError("rank-1 form does not match the elements")
            object.__setattr__(self, "weights", w)
            object.__setattr__(self, "kets", k)

    def __len__(self) -> int:
        return len(self.elements)

    @property
    def is_rank1(self) -> bool:
        return self.weights is not None

    @classmethod
    def from_rank1(cls, weights, kets) -> Povm:
        w = np.asarray(weights, dtype=float)
        k = np.asarray(kets, dtype=complex)
        k = k / np.linalg.norm(k, axis=1, keepdims=True)
        return cls(w[:, None, None] * projector(k), w, k)

    @classmethod
    def projective(cls, basis: MeasurementBasis) -> Povm:
        return cls.from_rank1(np.ones(2), np.stack([basis.e1, basis.e2]))

    @classmethod
    def trivial(cls) -> Povm:
        """The one-outcome measurement {I}."""
        return cls(IDENTITY[None].copy())

    def probabilities(self, rho: np.ndarray) -> np.ndarray:
        """Born probabilities tr(M_k rho); ``rho`` may carry leading batch dims."""
        rho = np.asarray(rho, dtype=complex)
        return np.einsum("kij,...ji->...k", self.elements, rho).real


@dataclass(frozen=True, eq=False)
class Ensemble:
    """Probabilities ``probs[i]`` of density operators ``states[i]``.

    ``pure[i]`` flags rank-one states; for those ``kets[i]`` is a unit vector
    with ``states[i] = |kets[i]><kets[i]|``.
    """

    probs: np.ndarray
    states: np.ndarray
    pure: np.ndarray = field(default=None)
    kets: np.ndarray = field(default=None)

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        rho = check_density(self.states)
        if p.ndim != 1 or rho.shape[0] != p.shape[0] or len(p) == 0:
            raise InvariantError("probabilities and states must be non-empty and aligned")
        if np.any(p < 0) or np.any(p > 1 + PROB_SUM_TOL):
            raise InvariantError("ensemble probabilities must lie in [0, 1]")
        if abs(p.sum() - 1.0) > PROB_SUM_TOL:
            raise InvariantError(f"ensemble probabilities sum to {p.sum()!r}")
        if self.pure is None:
            pure = purity(rho) >= 1 - 1e-10
            vals, vecs = eigen2(rho)
            kets = vecs[:, :, 0]
        else:
            pure = np.asarray(self.pure, dtype=bool)
            kets = np.asarray(self.kets, dtype=complex)
        object.__setattr__(self, "probs", p)
        object.__setattr__(self, "states", rho)
        object.__setattr__(self, "pure", pure)
        object.__setattr__(self, "kets", kets)

    @classmethod
    def from_kets(cls, probs, kets) -> Ensemble:
        k = np.asarray(kets, dtype=complex)
        k = k / np.linalg.norm(k, axis=1, keepdims=True)
        return cls(probs, projector(k), np.ones(len(k), dtype=bool), k)

    @classmethod
    def from_states(cls, probs, states) -> Ensemble:
        return cls(probs, states)

    def __len__(self) -> int:
        return len(self.probs)

    @property
    def all_pure(self) -> bool:
        return bool(np.all(self.pure))

    @property
    def is_real(self) -> bool:
        """True when every state has real matrix entries (XZ-plane Bloch vectors)."""
        return bool(np.max(np.abs(self.states.imag)) <= 1e-12)

    def average(self) -> np.ndarray:
        return np.einsum("i,ijk->jk", self.probs, self.states)

    def bloch(self) -> np.ndarray:
        return bloch_vector(self.states)

    def transformed(self, unitary: np.ndarray) -> Ensemble:
        """Apply the same unitary to every state."""
        u = np.asarray(unitary, dtype=complex)
        states = u @ self.states @ u.conj().T
        states = 0.5 * (states + np.swapaxes(states, 1, 2).conj())
        return Ensemble(self.probs, states, self.pure, self.kets @ u.T)


def merge_duplicates(ens: Ensemble, tol: float = 1e-12) -> Ensemble:
    """Merge pure entries whose fidelity exceeds ``1 - tol`` by summing probabilities."""
    fid = np.abs(ens.kets.conj() @ ens.kets.T) ** 2
    same = (fid > 1 - tol) & ens.pure[:, None] & ens.pure[None, :]
    np.fill_diagonal(same, False)
    if not same.any():
        return ens
    owner = np.arange(len(ens))
    for i in range(len(ens)):
        earlier = np.flatnonzero(same[i, :i])
        if len(earlier):
            owner[i] = owner[earlier[0]]
    keep = np.unique(owner)
    probs = np.array([ens.probs[owner == j].sum() for j in keep])
    return Ensemble(probs, ens.states[keep], ens.pure[keep], ens.kets[keep])


def dual_map(state: SchmidtState, povm: Povm) -> Ensemble:
    """Ensemble on Bob's side produced by Alice measuring ``povm``.

    ``p_i = tr(sigma_A M_i)`` and ``rho_i = sqrt(sigma_B) M_i^T sqrt(sigma_B) / p_i``,
    the transpose taken in the Schmidt basis.  Outcomes with ``p_i <= 1e-12``
    are dropped.
    """
    sigma = state.reduced
    # sqrt(sigma_B) is diagonal in the Schmidt basis with the Schmidt coefficients on it
    root = np.diag(np.array(state.coefficients, dtype=complex))
    probs = np.einsum("ij,kji->k", sigma, povm.elements).real
    keep = probs > PROB_DROP
    if abs(probs[keep].sum() - 1.0) > PROB_SUM_TOL:
        raise InvariantError("dual map probabilities do not sum to one")
    p = probs[keep]
    if povm.is_rank1:
        kets = (root @ povm.kets[keep].conj().T).T * np.sqrt(povm.weights[keep] / p)[:, None]
        kets = kets / np.linalg.norm(kets, axis=1, keepdims=True)
        return Ensemble(p, projector(kets), np.ones(len(p), dtype=bool), kets)
    m_bob = np.swapaxes(povm.elements[keep], 1, 2)
    states = root @ m_bob @ root / p[:, None, None]
    states = 0.5 * (states + np.swapaxes(states, 1, 2).conj())
    return Ensemble(p, states)


def measurement_entropy(povm: Povm, rho: np.ndarray) -> float:
    """Shannon entropy (bits) of the outcome distribution of ``povm`` on ``rho``."""
    probs = np.clip(povm.probabilities(check_density(rho)), 0.0, 1.0)
    return float(entr(probs).sum() / LN2)


def _decomposition_entropy(povm: Povm, lam: np.ndarray, iso: np.ndarray) -> np.ndarray:
    """Average measurement entropy of the pure decompositions defined by isometries.

    ``iso`` has shape (B, K, 2) with orthonormal columns; row k gives the
    unnormalized member ``sum_j iso[k, j] sqrt(lam_j) |j>``.
    """
    vecs = iso * np.sqrt(lam)[None, None, :]
    # joint[b, k, i] = <v_k| M_i |v_k>, the weight of member k with outcome i
    joint = np.einsum("bkj,ijl,bkl->bki", vecs.conj(), povm.elements, vecs).real
    joint = np.clip(joint, 0.0, None)
    weights = joint.sum(axis=2)
    return (entr(joint).sum(axis=(1, 2)) - entr(weights).sum(axis=1)) / LN2


def _isometries(params: np.ndarray, k: int) -> np.ndarray:
    """K x 2 isometries from the first two columns of exp(iH), H Hermitian built from k*k reals.

    The exponential goes through a batched Hermitian eigendecomposition.
    """
    b = params.shape[0]
    h = np.zeros((b, k, k), dtype=complex)
    iu = np.triu_indices(k, 1)
    n_off = len(iu[0])
    h[:, range(k), range(k)] = params[:, :k]
    off = params[:, k : k + n_off] + 1j * params[:, k + n_off :]
    h[:, iu[0], iu[1]] = off
    h[:, iu[1], iu[0]] = off.conj()
    w, v = np.linalg.eigh(h)
    return np.einsum("bij,bj,bkj->bik", v, np.exp(1j * w), v[:, :2, :].conj())


def povm_uncertainty(
    povm: Povm,
    state: SchmidtState,
    sizes: tuple[int, ...] = (2, 3),
    starts: int = 64,
    tol: float = 1e-9,
    seed: int = DEFAULT_SEED,
    max_rounds: int = UNCERTAINTY_ROUNDS,
) -> float:
    """Minimum average outcome entropy over pure-state decompositions of Alice's state.

    Decompositions with ``K`` members are parameterized by ``K x 2``
    isometries (purification freedom).  All starts take a few rounds of
    coordinate golden-section moves; the best few are then polished by a
    simplex search to ``tol``.  The eigendecomposition is always a candidate.
    """
    vals, eigvecs = eigen2(state.reduced)
    lam = np.clip(vals, 0.0, None)
    # work in the eigenbasis of sigma_A
    povm_eig = Povm(eigvecs.conj().T @ povm.elements @ eigvecs)
    best = float(_decomposition_entropy(povm_eig, lam, np.eye(2, dtype=complex)[None])[0])
    rng = np.random.default_rng(seed)
    for k in sizes:
        npar = k * k
        params = rng.uniform(-math.pi, math.pi, size=(starts, npar))

        def objective(p):
            return _decomposition_entropy(povm_eig, lam, _isometries(p, k))

        current = objective(params)
        for _ in range(max_rounds):
            before = current.copy()
            for c in range(npar):
                base = params.copy()

                def along(x, c=c, base=base):
                    trial = base.copy()
                    trial[:, c] = x
                    return objective(trial)

                x, fx, _ = golden_section_batch(
                    along, base[:, c] - UNCERTAINTY_WINDOW, base[:, c] + UNCERTAINTY_WINDOW, max(tol, COORD_TOL)
                )
                improved = fx < current
                params[improved, c] = x[improved]
                current = np.where(improved, fx, current)
            if np.max(before - current) < 1e-12:
                break
        for idx in np.argsort(current, kind="stable")[:UNCERTAINTY_POLISH]:
            res = minimize(
                lambda p: float(objective(p[None])[0]),
                params[idx],
                method="Nelder-Mead",
                options={"xatol": tol, "fatol": 1e-15, "maxiter": 200 * npar},
            )
            current[idx] = min(current[idx], res.fun)
        best = min(best, float(current.min()))
    return max(best, 0.0)

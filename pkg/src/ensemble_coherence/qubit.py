"""Closed-form single-qubit linear algebra and entropy primitives.

Kets are complex arrays of shape ``(2,)`` and density operators complex arrays
of shape ``(2, 2)``.  Most functions broadcast over leading batch dimensions.
All entropies are in bits.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import entr

LN2 = np.log(2.0)

STATE_TOL = 1e-12
HERMITIAN_TOL = 1e-10

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY = np.eye(2, dtype=complex)


class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


class InvariantError(ValueError):
    """A value violates a structural invariant (normalization, positivity, ...)."""


def binary_entropy(x):
    """Shannon entropy of a Bernoulli(x) variable in bits, with 0 log 0 = 0.

    Values within 1e-9 outside ``[0, 1]`` are clamped; anything further out
    raises :class:`DomainError`.  Accepts scalars or arrays.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x < -1e-9) or np.any(x > 1 + 1e-9) or np.any(np.isnan(x)):
        raise DomainError(f"binary entropy argument outside [0, 1]: {x}")
    x = np.clip(x, 0.0, 1.0)
    h = (entr(x) + entr(1.0 - x)) / LN2
    return float(h) if h.ndim == 0 else h


def ket(amp0: complex, amp1: complex, normalize: bool = True) -> np.ndarray:
    """Build a qubit ket from its two amplitudes."""
    v = np.array([amp0, amp1], dtype=complex)
    norm = np.linalg.norm(v)
    if normalize:
        if norm == 0:
            raise DomainError("cannot normalize the zero vector")
        return v / norm
    if abs(norm - 1.0) > STATE_TOL:
        raise InvariantError(f"ket is not normalized (|v| = {norm!r})")
    return v


def projector(psi: np.ndarray) -> np.ndarray:
    """|psi><psi| for a ket or a batch of kets of shape (..., 2)."""
    psi = np.asarray(psi, dtype=complex)
    return psi[..., :, None] * psi[..., None, :].conj()


def check_density(rho: np.ndarray, tol: float = STATE_TOL) -> np.ndarray:
    """Validate a (batch of) density operator(s); returns it as a complex array."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape[-2:] != (2, 2):
        raise InvariantError(f"expected 2x2 operators, got shape {rho.shape}")
    if not np.all(np.isfinite(rho)):
        raise InvariantError("density operator has non-finite entries")
    if np.max(np.abs(rho - np.swapaxes(rho, -1, -2).conj()), initial=0.0) > tol:
        raise InvariantError("density operator is not Hermitian")
    tr = np.trace(rho, axis1=-2, axis2=-1)
    if np.max(np.abs(tr - 1.0), initial=0.0) > tol:
        raise InvariantError(f"density operator trace != 1: {tr}")
    vals, _ = eigen2(rho)
    if np.min(vals, initial=0.0) < -tol:
        raise InvariantError("density operator has a negative eigenvalue")
    return rho


def bloch_vector(rho: np.ndarray) -> np.ndarray:
    """Bloch vector(s) (x, y, z) of density operator(s) of shape (..., 2, 2)."""
    rho = np.asarray(rho, dtype=complex)
    x = 2.0 * rho[..., 1, 0].real
    y = 2.0 * rho[..., 1, 0].imag
    z = (rho[..., 0, 0] - rho[..., 1, 1]).real
    return np.stack([x, y, z], axis=-1)


def from_bloch(r: np.ndarray) -> np.ndarray:
    """Density operator(s) (I + r.sigma) / 2 from Bloch vector(s)."""
    r = np.asarray(r, dtype=float)
    return 0.5 * (IDENTITY + np.einsum("...k,kij->...ij", r, np.stack([PAULI_X, PAULI_Y, PAULI_Z])))


def eigen2(h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Closed-form eigendecomposition of 2x2 Hermitian matrices.

    Writes ``h = m I + r (n . sigma)`` and reads the eigenvectors off the
    polar angles of the unit vector ``n``.

    Returns:
        ``(vals, vecs)``: eigenvalues sorted descending with shape (..., 2),
        and ``vecs[..., :, k]`` the unit eigenvector of ``vals[..., k]``
        (numpy column convention).  A degenerate input yields the
        computational basis.
    """
    h = np.asarray(h, dtype=complex)
    a = h[..., 0, 0].real
    d = h[..., 1, 1].real
    b = 0.5 * (h[..., 0, 1] + h[..., 1, 0].conj())
    m = 0.5 * (a + d)
    hz = 0.5 * (a - d)
    hx = b.real
    hy = -b.imag
    hperp = np.hypot(hx, hy)
    r = np.hypot(hz, hperp)
    # the eigenvalue nearer zero comes from det / (the other one) to avoid cancellation
    det = a * d - np.abs(b) ** 2
    big = m + np.where(m >= 0, r, -r)
    with np.errstate(divide="ignore", invalid="ignore"):
        small = np.where(big != 0, det / big, 0.0)
    vals = np.where((m >= 0)[..., None], np.stack([big, small], axis=-1), np.stack([small, big], axis=-1))

    # polar angles of n; atan2 keeps the half-angle cosines accurate near the poles
    theta = np.arctan2(hperp, hz)
    phi = np.arctan2(hy, hx)
    degenerate = r == 0.0
    theta = np.where(degenerate, 0.0, theta)
    phi = np.where(degenerate, 0.0, phi)
    c = np.cos(theta / 2)
    s = np.sin(theta / 2)
    eip = np.exp(1j * phi)
    vecs = np.empty(h.shape, dtype=complex)
    vecs[..., 0, 0] = c
    vecs[..., 1, 0] = eip * s
    vecs[..., 0, 1] = -eip.conj() * s
    vecs[..., 1, 1] = c
    return vals, vecs


def von_neumann_entropy(rho: np.ndarray, validate: bool = True):
    """Von Neumann entropy in bits of density operator(s).

    For a qubit the spectrum is ``(1 +- |r|) / 2`` with ``r`` the Bloch vector,
    so the entropy is the binary entropy of the larger eigenvalue.
    """
    if validate:
        rho = check_density(rho)
    vals, _ = eigen2(rho)
    vals = np.clip(vals, 0.0, 1.0)
    return binary_entropy(vals[..., 0])


def matrix_sqrt_psd(m: np.ndarray, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Principal square root of a positive semidefinite 2x2 matrix."""
    m = np.asarray(m, dtype=complex)
    vals, vecs = eigen2(m)
    if np.min(vals, initial=0.0) < -tol:
        raise InvariantError(f"matrix is not positive semidefinite (eigenvalues {vals})")
    root = np.sqrt(np.clip(vals, 0.0, None))
    return np.einsum("...ik,...k,...jk->...ij", vecs, root, vecs.conj())


def purity(rho: np.ndarray):
    """tr(rho^2)."""
    rho = np.asarray(rho, dtype=complex)
    return np.einsum("...ij,...ji->...", rho, rho).real


@dataclass(frozen=True)
class MeasurementBasis:
    """Orthonormal qubit basis {e1, e2}.

    ``e1 = cos(theta/2)|0> + exp(i phi) sin(theta/2)|1>``; ``e2`` is its
    orthogonal complement.  ``theta`` is the polar angle of ``e1`` on the
    Bloch sphere, so the computational basis is ``theta = 0`` and the
    Hadamard basis ``theta = pi/2``.
    """

    theta: float
    phi: float = 0.0

    @property
    def e1(self) -> np.ndarray:
        return np.array(
            [np.cos(self.theta / 2), np.exp(1j * self.phi) * np.sin(self.theta / 2)],
            dtype=complex,
        )

    @property
    def e2(self) -> np.ndarray:
        return np.array(
            [np.sin(self.theta / 2), -np.exp(1j * self.phi) * np.cos(self.theta / 2)],
            dtype=complex,
        )

    @property
    def unitary(self) -> np.ndarray:
        """Matrix whose k-th column is e_k (maps |k> to |e_k>)."""
        return np.stack([self.e1, self.e2], axis=1)

    @property
    def bloch(self) -> np.ndarray:
        st = np.sin(self.theta)
        return np.array([st * np.cos(self.phi), st * np.sin(self.phi), np.cos(self.theta)])

    @classmethod
    def computational(cls) -> MeasurementBasis:
        return cls(0.0, 0.0)

    @classmethod
    def hadamard(cls) -> MeasurementBasis:
        return cls(np.pi / 2, 0.0)

    def projectors(self) -> np.ndarray:
        return projector(np.stack([self.e1, self.e2]))

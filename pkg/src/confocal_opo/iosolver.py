"""Input/output Bogoliubov transform of the cavity, B_out = U B_in + V B_in^+.

Below threshold the intracavity equations are linear, so eliminating the
intracavity field between the evolution equation and the coupling-mirror
boundary condition gives a closed linear relation between output and input.
In units of the cavity escape rate, with a = i omega_bar + 1 + i detuning
and abar = i omega_bar + 1 - i detuning, the relation reads

    [a I - K Kbar / abar] B_out = [(2 - a) I + K Kbar / abar] B_in
                                  + (2 / abar) K B_in^+

where K is the coupling operator and Kbar its elementwise conjugate.  U and
V follow from one dense factorization of the left-hand matrix.  For a plane
pump the far-field operator is diagonal on the even subspace and U, V reduce
to closed-form functions of the phase-matching factor sigma(q).

Commutator preservation of the even field fixes the Bogoliubov identities
U U^+ - V V^+ = I and U V^T = V U^T (operator form, uniform weights), which
are asserted after every dense solve and serve as the correctness gate.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.linalg import lapack, lu_factor, lu_solve

from .errors import AtOrAboveThreshold, SingularSystem
from .kernels import KernelMatrix, Grid1D, phase_match_sinc
from .params import DerivedScales, OpoParams

__all__ = [
    "BogoliubovPair",
    "analytic_uv_planepump",
    "diagonal_pair",
    "solve_io",
    "threshold_margin",
    "even_diagonal",
    "bogoliubov_residuals",
]

_CONDITION_CUTOFF = 1e12


@dataclass(frozen=True, eq=False)
class BogoliubovPair:
    """The (U, V) input/output transform at one (detuning, omega_bar) point.

    kind = "diagonal": U and V are callables of the transverse wavevector
    (plane pump, closed form).  kind = "dense": U and V are complex n x n
    matrices in operator form (quadrature weights folded in) acting on
    field-value vectors over ``grid``.
    """

    kind: str
    U: object = field(repr=False)
    V: object = field(repr=False)
    at: tuple[float, float] = (0.0, 0.0)  # (detuning, omega_bar)
    grid: Grid1D | None = None


def analytic_uv_planepump(
    q,
    p: OpoParams,
    s: DerivedScales,
    omega_bar: float | None = None,
):
    """Closed-form (U, V) of the plane-pump cavity at transverse wavevector q.

    With sigma = sinc(l_c q^2 / (2 k_s)), a = 1 + i(detuning + omega_bar),
    abar = 1 + i(omega_bar - detuning):

        U = (conj(a) abar + A_p^2 sigma^2) / D
        V = 2 A_p sigma / D
        D = a abar - A_p^2 sigma^2

    |U|^2 - |V|^2 = 1 identically (each even mode is an independent OPO
    below threshold).  ``omega_bar`` overrides the analysis frequency of
    ``p`` (used for the negative-frequency partner).

    Raises ``AtOrAboveThreshold`` when |D| vanishes within 1e-14.
    """
    q = np.asarray(q, dtype=float)
    om = p.omega_bar if omega_bar is None else omega_bar
    sig = p.A_p * phase_match_sinc(q, s)
    a = 1.0 + 1j * (p.detuning + om)
    abar = 1.0 + 1j * (om - p.detuning)
    den = a * abar - sig**2
    if np.any(np.abs(den) <= 1e-14):
        raise AtOrAboveThreshold("plane-pump response diverges: a*abar = (A_p sigma)^2")
    u = (np.conj(a) * abar + sig**2) / den
    v = 2.0 * sig / den
    return u, v

def diagonal_pair(p: OpoParams, s: DerivedScales) -> BogoliubovPair:
    """Package the closed-form plane-pump transform as a BogoliubovPair."""
    u_of_q: Callable = lambda q: analytic_uv_planepump(q, p, s)[0]
    v_of_q: Callable = lambda q: analytic_uv_planepump(q, p, s)[1]
    return BogoliubovPair(
        kind="diagonal", U=u_of_q, V=v_of_q, at=(p.detuning, p.omega_bar)
    )


def solve_io(K: KernelMatrix, p: OpoParams, check: bool = True) -> BogoliubovPair:
    """Dense input/output solve on the grid of ``K``.

    One LU factorization of M = a I - K Kbar / abar is reused for both
    right-hand blocks.  Raises ``SingularSystem`` when the 1-norm condition
    estimate of M exceeds 1e12 (at/above threshold, or a grid too coarse to
    keep the discretized operator below threshold).

    With ``check`` the Bogoliubov residuals are verified to 1e-6 as a
    structural sanity gate (they normally sit at rounding level).
    """
    n = K.grid.n
    a = 1.0 + 1j * (p.detuning + p.omega_bar)
    abar = 1.0 + 1j * (p.omega_bar - p.detuning)
    kop = np.asarray(K.entries, dtype=complex)
    kk = kop @ np.conj(kop)
    eye = np.eye(n)
    m = a * eye - kk / abar
    anorm = np.linalg.norm(m, 1)
    lu, piv = lu_factor(m)
    rcond, info = lapack.zgecon(lu, anorm, norm="1")
    if info != 0 or rcond <= 0 or (1.0 / rcond) > _CONDITION_CUTOFF:
        cond = np.inf if rcond <= 0 else 1.0 / rcond
        raise SingularSystem(
            f"input/output system condition {cond:.3e} exceeds {_CONDITION_CUTOFF:.0e}; "
            "the configuration is at/above threshold or the grid is too coarse"
        )
    u = lu_solve((lu, piv), (2.0 - a) * eye + kk / abar)
    v = lu_solve((lu, piv), (2.0 / abar) * kop)
    pair = BogoliubovPair(
        kind="dense", U=u, V=v, at=(p.detuning, p.omega_bar), grid=K.grid
    )
    if check:
        r1, r2 = bogoliubov_residuals(pair)
        if max(r1, r2) > 1e-6:
            raise SingularSystem(
                f"Bogoliubov residuals {r1:.2e}, {r2:.2e} exceed 1e-6; "
                "solve output is not a symplectic transform"
            )
    return pair

def threshold_margin(K: KernelMatrix, p: OpoParams) -> float:
    """1 - rho, where rho is the largest singular value of the kernel matrix.

    The weight-normalized kernel coincides with the operator form on a
    uniform grid; the resonant zero-frequency system matrix I - K Kbar is
    singular exactly when rho = 1, so a positive margin certifies that the
    solve is well posed.  Scaling is inherited from threshold units: a plane
    pump at A_p gives rho = A_p (threshold mode q = 0, sigma = 1).
    """
    sv = np.linalg.svd(np.asarray(K.entries, dtype=complex), compute_uv=False)
    return 1.0 - float(sv[0])


def even_diagonal(mat: np.ndarray) -> np.ndarray:
    """Even-subspace transfer function of a parity-block operator matrix.

    For an operator that couples each grid point only to itself and to its
    mirror image, the action on even vectors is m[i, i] + m[i, flip(i)]
    (the single entry at a self-paired center point already carries both
    parity channels).
    """
    n = mat.shape[0]
    idx = np.arange(n)
    flip = n - 1 - idx
    anti = np.where(flip != idx, mat[idx, flip], 0.0)
    return mat[idx, idx] + anti

def bogoliubov_residuals(pair: BogoliubovPair) -> tuple[float, float]:
    """Max-norm residuals of U U^+ - V V^+ = I and U V^T = V U^T.

    Operator-form matrices on a uniform symmetric grid coincide with the
    weight-normalized convention (conjugation by sqrt-weights), so the
    symplectic conditions of the even-field transform take this plain
    matrix shape.
    """
    if pair.kind != "dense":
        raise ValueError("residuals are defined for dense pairs")
    u, v = pair.U, pair.V
    r1 = np.abs(u @ u.conj().T - v @ v.conj().T - np.eye(u.shape[0])).max()
    r2 = np.abs(u @ v.T - v @ u.T).max()
    return float(r1), float(r2)

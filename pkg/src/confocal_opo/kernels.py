"""Thick-crystal coupling kernels in position and transverse-wavevector space.

The parametric interaction inside a crystal of finite length couples field
operators at different transverse points.  In the near field (crystal center
image plane) the coupling kernel is built from the function ``delta_2d``,
a smeared delta of width ``l_coh`` written in terms of the sine integral.
In the far field (Fourier plane) the same kernel is a product of the pump
transform and a phase-matching sinc.  Both are evaluated here, in 2-D closed
form and on 1-D numerical grids.

Normalization: kernels act as integral operators on the even part of the
field, in pump threshold units.  For a plane pump the far-field operator is
exactly ``A_p * sinc(l_c q^2 / (2 k_s))`` on the even subspace, so threshold
sits at ``A_p = 1``.  The Gaussian pump transform is integral-normalized
(its q-integral equals ``A_p``), which makes the finite-pump operator
approach the plane-pump one continuously as ``w_p`` grows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import GridTooCoarse
from .params import DerivedScales, OpoParams, validate

__all__ = [
    "si",
    "delta_2d",
    "kint_near_2d",
    "PhaseMatchParams",
    "phase_mismatch",
    "phase_match_sinc",
    "ktilde_far",
    "ktilde_far_2d",
    "Grid1D",
    "KernelMatrix",
    "build_kernel_matrix",
    "auto_grid",
]

# Branch switch for the sine integral: power series below, auxiliary-function
# continued fraction above.  Both branches agree to ~4e-16 at the switch.
_SI_SWITCH = 6.0

# Grid sizing rule constants.  Steps must resolve the finest kernel scale by
# this factor; extents must cover the widest envelope by this factor.
_STEP_DIVISOR = 8.0
_EXTENT_FACTOR = 4.0
# Near-field thin-limit branch: for a physically thin crystal
# (l_c / z_C below _THIN_CRYSTAL_RATIO) a step of at least _THIN_STEP_RATIO
# coherence lengths leaves the kernel delta-like at grid resolution (the
# largest phase-match argument on the conjugate window is
# (pi l_coh / 2h)^2 < 0.051, sinc within 5e-4 of 1), so the grid represents
# the thin-crystal limit faithfully and no finer step is needed.  A thick
# crystal gets no such escape: an unresolved kernel misrepresents it.
_THIN_STEP_RATIO = 7.0
_THIN_CRYSTAL_RATIO = 1e-3


def _sinc(x):
    """sin(x)/x with sinc(0) = 1 (unnormalized convention)."""
    return np.sinc(np.asarray(x) / np.pi)


# ---------------------------------------------------------------------------
# Sine integral
# ---------------------------------------------------------------------------

def _si_series(a: np.ndarray) -> np.ndarray:
    # Si(a) = sum_k (-1)^k a^(2k+1) / ((2k+1)(2k+1)!), |a| <= 6: 24 terms
    # reach ~1e-17 at the switch point.
    term = a.copy()
    total = a.copy()
    a2 = a * a
    for k in range(30):
        term = term * (-a2) * (2 * k + 1.0) / ((2 * k + 3.0) ** 2 * (2 * k + 2.0))
        total += term
        if np.all(np.abs(term) <= 1e-18 * np.maximum(np.abs(total), 1e-30)):
            break
    return total

def _si_auxiliary(a: np.ndarray) -> np.ndarray:
    # Si(a) = pi/2 + Im E1(i a) for a > 0.  E1 is evaluated through its
    # continued fraction (modified Lentz), which resums the divergent
    # asymptotic expansion of the auxiliary functions f and g.
    z = 1j * a
    tiny = 1e-290
    b = z + 1.0
    c = np.full(a.shape, 1.0 / tiny, dtype=complex)
    d = 1.0 / b
    frac = d.copy()
    for j in range(2, 300):
        coef = -((j - 1.0) ** 2)
        b = b + 2.0
        d = coef * d + b
        np.copyto(d, tiny, where=np.abs(d) < tiny)
        c = b + coef / c
        np.copyto(c, tiny, where=np.abs(c) < tiny)
        d = 1.0 / d
        delta = c * d
        frac *= delta
        if np.all(np.abs(delta - 1.0) < 1e-16):
            break
    e1 = np.exp(-z) * frac
    return np.pi / 2 + e1.imag

def si(x):
    """Sine integral Si(x) = integral_0^x sin(u)/u du.

    Odd, total on finite inputs, absolute error below 1e-12 (in practice a
    few 1e-16).  Power series for |x| <= 6, auxiliary-function continued
    fraction beyond; the two branches agree to better than 1e-13 at the
    switch point.

    Parameters
    ----------
    x : float or array_like

    Returns
    -------
    float or ndarray, matching the input shape.
    """
    arr = np.asarray(x, dtype=float)
    scalar = arr.ndim == 0
    a = np.abs(np.atleast_1d(arr))
    out = np.empty_like(a)
    small = a <= _SI_SWITCH
    if np.any(small):
        out[small] = _si_series(a[small])
    if np.any(~small):
        out[~small] = _si_auxiliary(a[~small])
    out = out * np.sign(np.atleast_1d(arr))
    return float(out[0]) if scalar else out.reshape(arr.shape)


# ---------------------------------------------------------------------------
# Closed-form 2-D kernels
# ---------------------------------------------------------------------------

def delta_2d(r, s: DerivedScales):
    """Near-field coupling profile Delta(r) of the thick crystal (1/m^2).

    Delta(r) = (k_s / (2 pi l_c)) * (pi/2 - Si(k_s r^2 / (2 l_c))), with the
    argument equal to (r / l_coh)^2.  Delta(0) = 1 / (2 l_coh^2); the first
    zero falls at r = l_coh * sqrt(u1) ~ 1.388 l_coh where Si(u1) = pi/2,
    and the integral over the transverse plane equals 1, so Delta tends to a
    2-D delta for a vanishing crystal length.

    Parameters
    ----------
    r : float or array_like
        Transverse distance (m), r >= 0.
    s : DerivedScales
    """
    r = np.asarray(r, dtype=float)
    u = (r / s.l_coh) ** 2
    return (np.pi / 2 - si(u)) / (np.pi * s.l_coh**2)

def kint_near_2d(x, x2, p: OpoParams, s: DerivedScales):
    """Near-field coupling kernel between transverse points x and x2 (2-D).

    Real-valued, in threshold units times 1/m^2:

        K(x, x2) = 1/2 [ A((x+x2)/2) Delta(|x-x2|) + A((x-x2)/2) Delta(|x+x2|) ]

    where A is the pump amplitude profile (Gaussian of waist w_p, or the
    constant A_p for a plane pump).  The symmetrized pair of terms confines
    the dynamics to the even-parity subspace.

    Parameters
    ----------
    x, x2 : array_like, shape (2,) or (..., 2)
        Transverse positions (m).
    """
    x = np.asarray(x, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    plus = x + x2
    minus = x - x2
    r_minus = np.sqrt(np.sum(minus**2, axis=-1))
    r_plus = np.sqrt(np.sum(plus**2, axis=-1))
    if p.plane_pump:
        amp_plus = amp_minus = p.A_p
    else:
        amp_plus = p.A_p * np.exp(-np.sum((plus / 2) ** 2, axis=-1) / p.w_p**2)
        amp_minus = p.A_p * np.exp(-np.sum((minus / 2) ** 2, axis=-1) / p.w_p**2)
    return 0.5 * (amp_plus * delta_2d(r_minus, s) + amp_minus * delta_2d(r_plus, s))


@dataclass(frozen=True)
class PhaseMatchParams:
    """Wavevector bookkeeping for the phase-mismatch function.

    Defaults (``collinear``) reproduce exact collinear phase matching
    k_p = 2 k_s with zero walk-off, the configuration used everywhere else
    in this package.  Walk-off angles are exposed only as parameters of
    ``phase_mismatch``.
    """

    k_p: float
    mismatch: float = 0.0  # k_p - 2 k_s (1/m)
    rho_s: tuple[float, float] = (0.0, 0.0)  # signal walk-off angle (rad)
    rho_p: tuple[float, float] = (0.0, 0.0)  # pump walk-off angle (rad)

    @classmethod
    def collinear(cls, s: DerivedScales) -> "PhaseMatchParams":
        return cls(k_p=2.0 * s.k_s, mismatch=0.0)


def _as_vec2(q):
    q = np.asarray(q, dtype=float)
    if q.shape == () or q.shape[-1] != 2:
        q = np.stack([q, np.zeros_like(q)], axis=-1)
    return q

def phase_mismatch(q, q2, pm: PhaseMatchParams, s: DerivedScales):
    """Half-argument delta(q, q2) * l_c / 2 of the phase-matching sinc.

    Paraxial expression (valid for |q|, |q2| << k_s, not enforced):

        delta = mismatch + (rho_s - rho_p).(q + q2)
                - |q + q2|^2 / (2 k_p) + (q^2 + q2^2) / (2 k_s)

    With defaults (mismatch = 0, zero walk-off) this reduces to
    (l_c / (2 k_s)) |(q - q2)/2|^2.

    Parameters
    ----------
    q, q2 : scalar (1/m, promoted to (q, 0)) or array_like shape (..., 2)
    """
    q = _as_vec2(q)
    q2 = _as_vec2(q2)
    qsum = q + q2
    rho = np.asarray(pm.rho_s, dtype=float) - np.asarray(pm.rho_p, dtype=float)
    delta = (
        pm.mismatch
        + np.sum(rho * qsum, axis=-1)
        - np.sum(qsum**2, axis=-1) / (2.0 * pm.k_p)
        + (np.sum(q**2, axis=-1) + np.sum(q2**2, axis=-1)) / (2.0 * s.k_s)
    )
    l_c = s.k_s * s.l_coh**2 / 2.0  # algebraic inverse of l_coh = sqrt(2 l_c / k_s)
    return delta * l_c / 2.0

def phase_match_sinc(q, s: DerivedScales):
    """Collinear phase-matching factor sigma(q) = sinc(l_c q^2 / (2 k_s)).

    The argument equals (q l_coh / 2)^2; sigma is the per-mode coupling of a
    plane pump in the far field.
    """
    q = np.asarray(q, dtype=float)
    return _sinc((q * s.l_coh / 2.0) ** 2)


# ---------------------------------------------------------------------------
# Far-field kernels
# ---------------------------------------------------------------------------

def ktilde_far(q, q2, p: OpoParams, s: DerivedScales):
    """1-D far-field coupling kernel (threshold units times m).

    K(q, q2) = 1/2 [ G(q+q2) sinc(m(q,-q2)) + G(q-q2) sinc(m(q,q2)) ] with
    m(q,q2) = (l_c / (2 k_s)) ((q-q2)/2)^2 and the integral-normalized pump
    transform G(k) = A_p (w_p / (2 sqrt(pi))) exp(-k^2 w_p^2 / 4), so that
    integral G dk = A_p and the plane-pump limit of the operator is
    A_p * sigma(q) on the even subspace.

    A plane pump makes G distributional; ``build_kernel_matrix`` collapses
    it to a discrete delta on the grid instead.
    """
    if p.plane_pump:
        raise ValueError(
            "plane-wave pump gives a distributional far-field kernel; "
            "build_kernel_matrix handles it on a grid"
        )
    q = np.asarray(q, dtype=float)
    q2 = np.asarray(q2, dtype=float)
    lc_2ks = s.l_coh**2 / 4.0  # l_c / (2 k_s)
    amp = p.A_p * p.w_p / (2.0 * math.sqrt(math.pi))
    g_plus = amp * np.exp(-((q + q2) * p.w_p / 2.0) ** 2)
    g_minus = amp * np.exp(-((q - q2) * p.w_p / 2.0) ** 2)
    return 0.5 * (
        g_plus * _sinc(lc_2ks * ((q - q2) / 2.0) ** 2)
        + g_minus * _sinc(lc_2ks * ((q + q2) / 2.0) ** 2)
    )

def ktilde_far_2d(q, q2, p: OpoParams, s: DerivedScales):
    """2-D far-field coupling kernel (threshold units times m^2).

    Same structure as the 1-D form with the 2-D integral-normalized pump
    transform G(k) = A_p (w_p^2 / (4 pi)) exp(-|k|^2 w_p^2 / 4); q and q2
    are transverse wavevectors of shape (..., 2).
    """
    if p.plane_pump:
        raise ValueError("plane-wave pump gives a distributional far-field kernel")
    q = _as_vec2(q)
    q2 = _as_vec2(q2)
    lc_2ks = s.l_coh**2 / 4.0
    amp = p.A_p * p.w_p**2 / (4.0 * math.pi)
    qp2 = np.sum((q + q2) ** 2, axis=-1)
    qm2 = np.sum((q - q2) ** 2, axis=-1)
    g_plus = amp * np.exp(-qp2 * p.w_p**2 / 4.0)
    g_minus = amp * np.exp(-qm2 * p.w_p**2 / 4.0)
    return 0.5 * (g_plus * _sinc(lc_2ks * qm2 / 4.0) + g_minus * _sinc(lc_2ks * qp2 / 4.0))


# ---------------------------------------------------------------------------
# Grids and discretized kernels
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Grid1D:
    """Uniform symmetric midpoint grid on [-L, L].

    Points sit at cell centers, x_k = -L + (k + 1/2) h with h = 2L/n, so the
    set is exactly symmetric under sign flip (x_k = -x_{n-1-k}) and contains
    0 when n is odd.  Midpoint weights (all equal to h) keep the quadrature
    exactly flip-symmetric; the weights sum to 2L.

    ``domain`` is "near" (coordinates in m) or "far" (wavevectors in 1/m).
    """

    n: int
    half_extent: float
    domain: str
    points: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)

    @classmethod
    def uniform(cls, n: int, half_extent: float, domain: str) -> "Grid1D":
        if domain not in ("near", "far"):
            raise ValueError(f"domain must be 'near' or 'far', got {domain!r}")
        if n < 2 or half_extent <= 0:
            raise ValueError("need n >= 2 and half_extent > 0")
        h = 2.0 * half_extent / n
        pts = -half_extent + (np.arange(n) + 0.5) * h
        wts = np.full(n, h)
        return cls(n=n, half_extent=half_extent, domain=domain, points=pts, weights=wts)

    @property
    def step(self) -> float:
        return 2.0 * self.half_extent / self.n

    def flip(self, i):
        """Index of the sign-flipped coordinate, x_flip(i) = -x_i."""
        return self.n - 1 - np.asarray(i)

    def conjugate(self) -> "Grid1D":
        """DFT-conjugate grid: same n, step dq = 2 pi / (n h), domain swapped."""
        dq = 2.0 * math.pi / (self.n * self.step)
        other = "far" if self.domain == "near" else "near"
        return Grid1D.uniform(self.n, self.n * dq / 2.0, other)


@dataclass(frozen=True, eq=False)
class KernelMatrix:
    """Quadrature-weighted discretization of the coupling kernel.

    ``entries[i, j] = K(x_i, x_j) * w_j`` (operator form): the matrix acts on
    vectors of field values by plain matrix multiplication.  The kernel is
    even under sign flip of either argument and symmetric under swap.
    """

    entries: np.ndarray = field(repr=False)
    grid: Grid1D
    parity: str = "even"


def _structure_scales(p: OpoParams, s: DerivedScales, domain: str):
    """(finest step allowed, minimum half extent) demanded by pump + kernel."""
    if domain == "near":
        step_max = s.l_coh / _STEP_DIVISOR
        extent_min = _EXTENT_FACTOR * p.w_p if not p.plane_pump else 0.0
    else:
        scales = [2.0 / s.l_coh]  # sqrt(2 k_s / l_c): phase-matching sinc scale
        if not p.plane_pump:
            scales.append(1.0 / p.w_p)
        step_max = min(scales) / _STEP_DIVISOR
        extent_min = _EXTENT_FACTOR * (2.0 / p.w_p) if not p.plane_pump else 0.0
    return step_max, extent_min

def _check_sizing(g: Grid1D, p: OpoParams, s: DerivedScales) -> None:
    step_max, extent_min = _structure_scales(p, s, g.domain)
    if g.domain == "near" and g.step > step_max:
        # Thin-limit branch: for a physically thin crystal a step far above
        # l_coh samples the kernel where it is indistinguishable from a
        # delta, which is equally faithful.
        thin = (
            p.l_c <= _THIN_CRYSTAL_RATIO * p.z_C
            and g.step >= _THIN_STEP_RATIO * s.l_coh
        )
        if not thin:
            raise GridTooCoarse(
                f"near grid step {g.step:.3e} m exceeds l_coh/{_STEP_DIVISOR:g} = "
                f"{step_max:.3e} m (thin-crystal escape needs l_c <= "
                f"{_THIN_CRYSTAL_RATIO:g} z_C and step >= {_THIN_STEP_RATIO:g} l_coh)"
            )
    elif g.domain == "far" and g.step > step_max:
        raise GridTooCoarse(
            f"far grid step {g.step:.3e} /m exceeds min(1/w_p, sqrt(2 k_s/l_c))/"
            f"{_STEP_DIVISOR:g} = {step_max:.3e} /m"
        )
    if g.half_extent < extent_min:
        raise GridTooCoarse(
            f"{g.domain} grid half extent {g.half_extent:.3e} is below "
            f"{_EXTENT_FACTOR:g} x the pump envelope scale {extent_min / _EXTENT_FACTOR:.3e}"
        )

def auto_grid(
    p: OpoParams,
    s: DerivedScales,
    domain: str,
    extra_extents: tuple[float, ...] = (),
    max_n: int = 6000,
) -> Grid1D:
    """Smallest odd-n grid satisfying the sizing rule.

    ``extra_extents`` are additional half extents that must be covered with
    the same 4x margin (detector reach, local-oscillator waist scale); they
    are in m for the near domain and 1/m for the far domain.  Odd n keeps
    the zero coordinate on the grid.
    """
    step_max, extent_min = _structure_scales(p, s, domain)
    extent = max([extent_min] + [_EXTENT_FACTOR * e for e in extra_extents if e > 0])
    if extent <= 0:
        raise GridTooCoarse("no finite extent available to size the grid")
    n = int(math.ceil(2.0 * extent / step_max))
    if n % 2 == 0:
        n += 1
    if n > max_n:
        raise GridTooCoarse(
            f"sizing rule demands n = {n} > {max_n} points "
            f"(extent {extent:.3e}, step {step_max:.3e})"
        )
    n = max(n, 33)
    return Grid1D.uniform(n, extent, domain)


def _far_entries(g: Grid1D, p: OpoParams, s: DerivedScales) -> np.ndarray:
    qs = g.points
    if p.plane_pump:
        # G collapses to a discrete delta: weight w_j cancels against the
        # 1/w_j of the delta, leaving the two parity channels.
        n = g.n
        sig = p.A_p * phase_match_sinc(qs, s)
        entries = np.zeros((n, n))
        idx = np.arange(n)
        entries[idx, idx] += 0.5 * sig
        entries[idx, g.flip(idx)] += 0.5 * sig
        return entries
    qq, qq2 = np.meshgrid(qs, qs, indexing="ij")
    return ktilde_far(qq, qq2, p, s) * g.weights[np.newaxis, :]

def build_kernel_matrix(
    g: Grid1D, p: OpoParams, s: DerivedScales, strict: bool = True
) -> KernelMatrix:
    """Discretize the coupling kernel on ``g``.

    Far domain: direct evaluation of the 1-D far-field kernel (plane pump:
    discrete delta).  Near domain: discrete inverse Fourier transform, over
    both indices, of the far-domain kernel built on the conjugate grid.
    Constructing the near kernel this way guarantees the transform-pair
    consistency of the two representations, and avoids evaluating an
    oscillatory half-power Fresnel integral for the 1-D position kernel,
    which has no closed form.

    Raises ``GridTooCoarse`` when ``strict`` and the grid violates the
    sizing rule (step <= l_coh/8 near, or beyond the thin-crystal regime;
    step <= min(1/w_p, sqrt(2 k_s / l_c))/8 far; extent >= 4 w_p for a
    finite pump).
    """
    validate(p)
    if strict:
        _check_sizing(g, p, s)
    if g.domain == "far":
        return KernelMatrix(entries=_far_entries(g, p, s), grid=g)
    conj = g.conjugate()
    far_op = _far_entries(conj, p, s)
    # x -> q transform matrix (unitary-normalized, exact inverse pair on
    # conjugate grids since dq dx = 2 pi / n)
    fmat = (g.step / math.sqrt(2.0 * math.pi)) * np.exp(
        -1j * np.outer(conj.points, g.points)
    )
    bmat = (conj.step / g.step) * fmat.conj().T
    near = bmat @ far_op @ fmat
    scale = np.abs(near.real).max()
    if scale > 0 and np.abs(near.imag).max() > 1e-10 * scale:
        raise GridTooCoarse(
            "near-field kernel acquired a non-negligible imaginary part; "
            "the conjugate grid cannot represent the far kernel"
        )
    return KernelMatrix(entries=near.real.copy(), grid=g)

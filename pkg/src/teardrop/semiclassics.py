"""Bohr-Sommerfeld recovery of the many-particle spectrum from the
mean-field flow.

Because the Hamiltonian is tridiagonal in the m basis, its eigenvalue
equation is a three-term recurrence; a WKB ansatz in the continuous
variable p = eta*m turns it into classical motion under the potential
curves

    U+-(p) = eps p +- |v| r(p),

the max/min of H(p, q) over the angle.  An orbit of (rescaled) energy e
is confined between turning points p_-, p_+ which, together with a third
root p_0 <= -1/2, solve the cubic

    2 v^2 p^3 + (v^2 + eps^2) p^2 - (v^2/2 + 2 eps e) p - v^2/4 + e^2 = 0.

The quantisation condition reads  S(eta E_n) = 2 pi eta (n + 1/2)  where
S(e) is the phase-space area enclosed below the orbit (the area of
{H <= e}); it interpolates monotonically from 0 at the lowest fixed-point
energy to 2 pi at the highest, and is exact for v = 0.  Differentiating
gives the density of states dn/dE = T(e)/(2 pi) with the orbit period

    T(e) = 2 sqrt(2) / (|v| sqrt(p_+ - p_0)) * K((p_+ - p_-)/(p_+ - p_0)),

K being the complete elliptic integral of the first kind (parameter
convention).  T diverges on the separatrix through the saddle at the tip
(e = -eps/2, subcritical), where the spectrum accumulates.

All functions below work on the rescaled energy e = eta E; only the
quantised levels are also reported on the many-particle scale E = e/eta.
Spectra depend on v only through |v| (a staggering gauge flips its sign),
so the formulas use |v| throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .core import ModelParams, basis_states, teardrop_radius
from .meanfield import critical_epsilon, energy_range

ACTION_ABS_TOL = 1e-10
BISECTION_TOL = 1e-13
# a nearly-double root is conditioned to ~sqrt(machine eps) in absolute
# position, so the escape diagnostic must sit well above that floor
ROOT_ESCAPE_TOL = 1e-6
ON_U_MINUS = "on_U_minus"
ON_U_PLUS = "on_U_plus"


@dataclass(frozen=True)
class PotentialCurves:
    """Envelope of the classical energy at fixed p, extremised over q."""

    params: ModelParams

    def u_plus(self, p):
        return self.params.epsilon * np.asarray(p, dtype=float) + abs(
            self.params.v
        ) * teardrop_radius(p)

    def u_minus(self, p):
        return self.params.epsilon * np.asarray(p, dtype=float) - abs(
            self.params.v
        ) * teardrop_radius(p)


def potential_curves(params: ModelParams):
    return PotentialCurves(params)


@dataclass(frozen=True)
class TurningPoints:
    """Roots of the turning-point cubic, sorted p_zero <= p_minus <= p_plus,
    with the potential branch each physical root lies on."""

    p_zero: float
    p_minus: float
    p_plus: float
    branch_minus: str
    branch_plus: str
    energy: float


def _validate_energy(e, params, tol=1e-10):
    emin, emax = energy_range(params)
    if e < emin - tol or e > emax + tol:
        raise ValueError(
            f"energy {e} outside the classical range [{emin}, {emax}]"
        )
    return min(max(e, emin), emax), emin, emax


def _poly_stable(p, e, params):
    """Turning-point cubic in the cancellation-free form
    (e - eps p)^2 - v^2 r^2(p); well conditioned for any v."""
    g = (1.0 - 2.0 * p) * (1.0 + 2.0 * p) ** 2
    return (e - params.epsilon * p) ** 2 - 0.25 * params.v**2 * g


def _poly_stable_deriv(p, e, params):
    gp = (1.0 + 2.0 * p) * (2.0 - 12.0 * p)
    return (
        -2.0 * params.epsilon * (e - params.epsilon * p)
        - 0.25 * params.v**2 * gp
    )


def _newton_polish(p, e, params, steps=1):
    for _ in range(steps):
        deriv = _poly_stable_deriv(p, e, params)
        if deriv == 0.0:
            return p
        step = _poly_stable(p, e, params) / deriv
        if abs(step) > 0.1:
            return p  # nearly double root; Newton unreliable, keep the seed
        p -= step
    return p


def _cubic_roots(e, params):
    """Three real roots of the turning-point cubic, sorted ascending.

    Regular couplings go through the closed-form trigonometric method plus
    a Newton polish (safe at double roots); tiny |v|/|eps| switches to a
    Newton search on the stable polynomial form, because the monic shift
    toward the distant third root would cancel the physical pair away.
    """
    v2 = params.v**2
    eps = params.epsilon
    a3 = 2.0 * v2
    a2 = v2 + eps**2
    a1 = -(0.5 * v2 + 2.0 * eps * e)
    a0 = e**2 - 0.25 * v2

    b = a2 / a3
    if abs(b) > 1e5:
        # |v| << |eps|: the far root sits at ~ -eps^2/(2 v^2) and the monic
        # shift would cancel the physical pair away; seed Newton on the
        # stable form at p = e/eps -+ v r / eps instead
        base = min(max(e / eps, -0.5), 0.5)
        spread = abs(params.v) * teardrop_radius(base) / abs(eps)
        lo = _newton_polish(base - spread, e, params, steps=4)
        hi = _newton_polish(base + spread, e, params, steps=4)
        pm, pp = sorted((lo, hi))
        return [-b - pm - pp, pm, pp]

    c = a1 / a3
    d = a0 / a3
    pc = c - b * b / 3.0
    qc = d - b * c / 3.0 + 2.0 * b**3 / 27.0

    disc = -4.0 * pc**3 - 27.0 * qc**2
    scale = max(1.0, abs(pc) ** 3, qc**2)
    if disc < -1e-8 * scale:
        raise RuntimeError(
            "turning-point cubic developed complex roots; the allowed-energy "
            f"assumption is violated (e={e}, eps={eps}, v={params.v})"
        )

    if abs(pc) < 1e-30:
        roots = [-b / 3.0 + math.copysign(abs(qc) ** (1 / 3), -qc)] * 3
    else:
        if pc > 0.0:
            # only possible within rounding noise of a triple root
            pc = -abs(pc)
        amp = 2.0 * math.sqrt(-pc / 3.0)
        arg = 3.0 * qc / (pc * amp)
        arg = min(1.0, max(-1.0, arg))
        phi = math.acos(arg)
        roots = [
            amp * math.cos((phi - 2.0 * math.pi * k) / 3.0) - b / 3.0
            for k in range(3)
        ]

    return sorted(_newton_polish(p, e, params, steps=1) for p in roots)


def turning_points(e, params: ModelParams):
    if params.v == 0.0:
        raise ValueError("turning-point cubic degenerates at v = 0")
    e, _, _ = _validate_energy(e, params)
    p0, pm, pp = _cubic_roots(e, params)

    if p0 > -0.5 + ROOT_ESCAPE_TOL:
        raise RuntimeError(
            f"leftmost cubic root {p0} enters the physical interval (e={e})"
        )
    if pm < -0.5 - ROOT_ESCAPE_TOL or pp > 0.5 + ROOT_ESCAPE_TOL:
        raise RuntimeError(
            f"turning points ({pm}, {pp}) escape [-1/2, 1/2] (e={e})"
        )
    pm = min(max(pm, -0.5), 0.5)
    pp = min(max(pp, -0.5), 0.5)

    curves = potential_curves(params)
    emin, emax = energy_range(params)

    def branch(p):
        # At a vertex both curves meet the energy and the tag is ambiguous.
        # Where only one turning point sits there the case-table rows agree,
        # so any tag works; when the orbit degenerates onto the tip the tag
        # must reflect whether that orbit encloses nothing (tip is the
        # energy minimum) or the whole surface (tip is the maximum).
        du = abs(e - float(curves.u_plus(p)))
        dl = abs(e - float(curves.u_minus(p)))
        if du + dl == 0.0 or abs(du - dl) <= 1e-6 * (du + dl):
            return ON_U_MINUS if e - emin <= emax - e else ON_U_PLUS
        return ON_U_PLUS if du < dl else ON_U_MINUS

    return TurningPoints(
        p_zero=p0,
        p_minus=pm,
        p_plus=pp,
        branch_minus=branch(pm),
        branch_plus=branch(pp),
        energy=e,
    )


@lru_cache(maxsize=32)
def _gauss_nodes(n):
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def _angle(p, e, params):
    """Lattice wavenumber q(p) = arccos((e - eps p)/(|v| r(p))) on [0, pi]."""
    p = np.asarray(p, dtype=float)
    r = teardrop_radius(np.clip(p, -0.5, 0.5))
    num = e - params.epsilon * p
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(r > 0.0, num / (abs(params.v) * np.where(r > 0, r, 1.0)),
                         np.sign(num) * 2.0)
    return np.arccos(np.clip(ratio, -1.0, 1.0))


def _sin_substituted_integral(f, lo, hi, abs_tol=ACTION_ABS_TOL, start=64,
                              max_nodes=4096):
    """Integrate f over [lo, hi] after p = mid + half*sin(theta).

    The substitution absorbs the square-root behaviour that f inherits at
    turning-point endpoints, so Gauss-Legendre converges rapidly; node
    counts double until the result is stable to abs_tol.
    """
    width = hi - lo
    if width <= 1e-14:
        return float(f(np.array([(lo + hi) / 2.0]))[0]) * max(width, 0.0)
    mid = 0.5 * (lo + hi)
    half = 0.5 * width
    prev = None
    n = start
    while True:
        x, w = _gauss_nodes(n)
        theta = 0.5 * math.pi * x
        p = mid + half * np.sin(theta)
        weights = w * (0.5 * math.pi) * half * np.cos(theta)
        val = float(np.dot(f(p), weights))
        if prev is not None and abs(val - prev) < abs_tol:
            return val
        prev = val
        n *= 2
        if n > max_nodes:
            return val


def _angle_integral(lo, hi, e, params, abs_tol=ACTION_ABS_TOL):
    return _sin_substituted_integral(lambda p: _angle(p, e, params), lo, hi,
                                     abs_tol)


def _enclosed_area(tp: TurningPoints, s_tilde):
    """Area of {H <= e} from the partial integral s_tilde = int q dp.

    The strip terms depend on which branch each turning point lies on:
    outside the oscillatory window a p-strip contributes either 2 pi (the
    energy clears the whole circle) or nothing.
    """
    two_pi = 2.0 * math.pi
    if tp.branch_minus == ON_U_MINUS and tp.branch_plus == ON_U_MINUS:
        return two_pi * (tp.p_plus - tp.p_minus) - 2.0 * s_tilde
    if tp.branch_minus == ON_U_MINUS and tp.branch_plus == ON_U_PLUS:
        return two_pi * (0.5 - tp.p_minus) - 2.0 * s_tilde
    if tp.branch_minus == ON_U_PLUS and tp.branch_plus == ON_U_MINUS:
        return two_pi * (0.5 + tp.p_plus) - 2.0 * s_tilde
    return two_pi - 2.0 * s_tilde


def action(e, params: ModelParams):
    """Enclosed phase-space area S(e); monotone from 0 to 2 pi."""
    e, _, _ = _validate_energy(e, params)
    if params.v == 0.0:
        # horizontal orbits p = e/eps: the area below is exact
        s = 2.0 * math.pi * (0.5 + e / abs(params.epsilon))
        return min(max(s, 0.0), 2.0 * math.pi)
    tp = turning_points(e, params)
    s_tilde = _angle_integral(tp.p_minus, tp.p_plus, e, params)
    s = _enclosed_area(tp, s_tilde)
    return min(max(s, 0.0), 2.0 * math.pi)


@dataclass(frozen=True)
class SemiclassicalLevel:
    n: int
    energy_mp: float
    energy_mf: float
    action: float


@dataclass(eq=False)
class SemiclassicalSpectrum:
    params: ModelParams
    levels: list

    @property
    def energies_mp(self):
        return np.array([lv.energy_mp for lv in self.levels])

    @property
    def energies_mf(self):
        return np.array([lv.energy_mf for lv in self.levels])

    @property
    def actions(self):
        return np.array([lv.action for lv in self.levels])


@lru_cache(maxsize=16)
def _quantize_cached(params: ModelParams):
    eta = params.eta
    n_levels = params.n_particles // 2 + 1
    emin, emax = energy_range(params)
    span = emax - emin
    delta = 1e-13 * span
    tol = BISECTION_TOL * max(1.0, span)

    levels = []
    for n in range(n_levels):
        target = 2.0 * math.pi * eta * (n + 0.5)
        lo, hi = emin + delta, emax - delta
        for _ in range(200):
            midpoint = 0.5 * (lo + hi)
            if action(midpoint, params) < target:
                lo = midpoint
            else:
                hi = midpoint
            if hi - lo < tol:
                break
        e_n = 0.5 * (lo + hi)
        levels.append(
            SemiclassicalLevel(
                n=n,
                energy_mp=e_n / eta,
                energy_mf=e_n,
                action=action(e_n, params),
            )
        )
    return SemiclassicalSpectrum(params=params, levels=levels)


def quantize(params: ModelParams):
    """Solve S(e) = 2 pi eta (n + 1/2) for every n = 0 .. N/2 by bisection
    (S is monotone but its derivative blows up at the separatrix, which
    rules out Newton)."""
    return _quantize_cached(params)


def elliptic_k(m):
    """Complete elliptic integral of the first kind, parameter convention,
    by the arithmetic-geometric mean.  Returns inf for m >= 1."""
    if m < 0.0:
        raise ValueError(f"elliptic parameter must be >= 0, got {m}")
    if m >= 1.0:
        return math.inf
    a, b = 1.0, math.sqrt(1.0 - m)
    # quadratic convergence: a handful of iterations reach the 1-2 ulp
    # floor; the cap guards against ulp ping-pong at that floor
    for _ in range(60):
        if abs(a - b) <= 4.0 * np.finfo(float).eps * a:
            break
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return math.pi / (2.0 * a)


def period(e, params: ModelParams):
    """Orbit period T(e); math.inf on the subcritical separatrix."""
    if params.v == 0.0:
        if params.epsilon == 0.0:
            raise ValueError("period undefined for eps = v = 0")
        return 2.0 * math.pi / abs(params.epsilon)
    e, emin, emax = _validate_energy(e, params)
    span = max(1.0, emax - emin)
    subcritical = abs(params.epsilon) < critical_epsilon(params) - 1e-12
    if subcritical and abs(e + 0.5 * params.epsilon) <= 1e-12 * span:
        return math.inf
    tp = turning_points(e, params)
    denom = tp.p_plus - tp.p_zero
    if denom < 1e-14:
        return math.inf
    m_par = (tp.p_plus - tp.p_minus) / denom
    k = elliptic_k(min(m_par, 1.0))
    if math.isinf(k):
        return math.inf
    return 2.0 * math.sqrt(2.0) / (abs(params.v) * math.sqrt(denom)) * k


def density_of_states(e, params: ModelParams):
    """Many-particle states per unit many-particle energy at e = eta E."""
    t = period(e, params)
    return math.inf if math.isinf(t) else t / (2.0 * math.pi)


@dataclass(eq=False)
class WKBState:
    """Discrete semiclassical eigenvector envelope on the m grid."""

    level: int
    m_values: np.ndarray
    amplitudes: np.ndarray
    allowed: np.ndarray
    unreliable: np.ndarray
    energy_mf: float
    turning: TurningPoints


def _wkb_phase(p, tp: TurningPoints, s_tilde_p):
    """Position-dependent phase S(p) of the oscillatory WKB solution.

    The strip terms track which curve the turning points lie on; at the
    lattice points p = eta*m the offsets differ from the plain integral by
    multiples of pi after division by eta, so each case yields the correct
    discrete node structure.  A lower-curve turning point carries the
    staggered (wavenumber pi) connection, so both lower-lower and
    lower-upper windows accumulate phase from the left lower point; the
    upper-upper window reduces to the plain integral.  (Quantisation makes
    the two-sided matching consistent; validated against exact
    eigenvectors in all four cases.)
    """
    if tp.branch_minus == ON_U_MINUS:
        return math.pi * (p - tp.p_minus) - s_tilde_p
    if tp.branch_plus == ON_U_MINUS:
        return math.pi * (0.5 + p) - s_tilde_p
    return -math.pi + s_tilde_p


def _decay_exponent(p, e, params):
    p = np.asarray(p, dtype=float)
    r = teardrop_radius(np.clip(p, -0.5, 0.5))
    num = np.abs(e - params.epsilon * p)
    with np.errstate(divide="ignore"):
        ratio = np.where(r > 0.0, num / (abs(params.v) * np.where(r > 0, r, 1.0)),
                         np.inf)
    return np.arccosh(np.maximum(ratio, 1.0))


def wkb_state(n, params: ModelParams):
    """Semiclassical approximation of the n-th eigenvector.

    Inside the allowed window |psi|^2 = 2 |w_cl| cos^2(S(p)/eta - pi/4)
    with the classical residence density w_cl; outside, the single
    decaying solution |psi|^2 = |w_cl| exp(-2 Im S / eta) / 2.  Grid
    points within 2 eta of a turning point are computed but flagged:
    there the harmonic ansatz breaks down (no Airy uniformisation is
    attempted).  The discrete amplitudes are L2-normalised.
    """
    basis = basis_states(params.n_particles)
    if not 0 <= n < basis.dimension:
        raise ValueError(f"level index {n} outside 0..{basis.dimension - 1}")
    eta = params.eta
    level = quantize(params).levels[n]
    e = level.energy_mf
    tp = turning_points(e, params)
    t_period = period(e, params)
    if math.isinf(t_period):
        t_period = 1.0  # constant prefactor; removed by normalisation

    p_grid = eta * basis.m_values
    allowed = (p_grid > tp.p_minus) & (p_grid < tp.p_plus)
    unreliable = (np.abs(p_grid - tp.p_minus) < 2.0 * eta) | (
        np.abs(p_grid - tp.p_plus) < 2.0 * eta
    )

    vabs = abs(params.v)
    amp_sq = np.zeros(basis.dimension)
    for i, p in enumerate(p_grid):
        radicand = vabs**2 * teardrop_radius(np.clip(p, -0.5, 0.5)) ** 2 - (
            e - params.epsilon * p
        ) ** 2
        if allowed[i]:
            s_tilde = _angle_integral(tp.p_minus, p, e, params)
            phase = _wkb_phase(p, tp, s_tilde)
            w_cl = 1.0 / (2.0 * t_period * math.sqrt(max(radicand, 1e-300)))
            amp_sq[i] = 2.0 * w_cl * math.cos(phase / eta - 0.25 * math.pi) ** 2
        else:
            if p <= tp.p_minus:
                decay = _sin_substituted_integral(
                    lambda x: _decay_exponent(x, e, params), p, tp.p_minus
                )
            else:
                decay = _sin_substituted_integral(
                    lambda x: _decay_exponent(x, e, params), tp.p_plus, p
                )
            w_cl = 1.0 / (2.0 * t_period * math.sqrt(max(-radicand, 1e-300)))
            amp_sq[i] = 0.5 * w_cl * math.exp(-2.0 * max(decay, 0.0) / eta)

    amplitudes = np.sqrt(amp_sq)
    amplitudes /= np.linalg.norm(amplitudes)
    return WKBState(
        level=n,
        m_values=basis.m_values,
        amplitudes=amplitudes,
        allowed=allowed,
        unreliable=unreliable,
        energy_mf=e,
        turning=tp,
    )

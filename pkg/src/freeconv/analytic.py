"""Floating-point layer: Cauchy transforms, algebraic equations for the
Cauchy transform G, Stieltjes inversion, closed-form densities and the
exact Hankel positivity test.

The exact engine hands over moment sequences; this module turns them
into measures.  G(zeta) is evaluated from moments only where the
Laurent tail is provably small (the caller declares a norm bound), the
example equations for G are either pinned from their printed quadratic
and cubic forms or derived by eliminating the compositional inverse of
the even-cumulant series, and densities come out of the usual limit
-Im G(t + i*eps)/pi, extrapolated in eps along a decreasing schedule.

Root selection for the algebraic equations is done by homotopy: at
zeta = iR with R large the admissible root is the unique one near
1/zeta; it is then continued down to the evaluation point, tracking the
nearest root and flagging near-ties instead of silently choosing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import quad

from .freeops import Distribution, LawSpec, LawError, re_inverse_rational

_ZERO = Fraction(0)
_ONE = Fraction(1)

Poly = tuple[Fraction, ...]  # univariate, ascending powers


class OutOfRegionError(Exception):
    """Moment partial sums do not converge at the requested point."""


class BranchError(Exception):
    """Root tracking lost the physical branch."""


# ---------------------------------------------------------------------------
# Exact polynomial helpers
# ---------------------------------------------------------------------------

def _trim(p: Sequence[Fraction]) -> Poly:
    out = list(p)
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


def _padd(a: Poly, b: Poly) -> Poly:
    n = max(len(a), len(b))
    return _trim(tuple(
        (a[i] if i < len(a) else _ZERO) + (b[i] if i < len(b) else _ZERO)
        for i in range(n)))


def _pmul(a: Poly, b: Poly) -> Poly:
    if not a or not b:
        return ()
    out = [_ZERO] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            out[i + j] += x * y
    return _trim(tuple(out))


def _pscale(a: Poly, c: Fraction) -> Poly:
    return _trim(tuple(c * x for x in a))


def _peval(a: Poly, x):
    acc = 0.0 if not isinstance(x, complex) else 0.0 + 0j
    for c in reversed(a):
        acc = acc * x + c  # Fraction coerces against float/complex
    return acc


def _peval_frac(a: Poly, x: Fraction) -> Fraction:
    acc = _ZERO
    for c in reversed(a):
        acc = acc * x + c
    return acc


def _pdivmod(a: Poly, b: Poly) -> tuple[Poly, Poly]:
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    a = list(a)
    q = [_ZERO] * max(0, len(a) - len(b) + 1)
    while len(a) >= len(b) and any(x != 0 for x in a):
        if a[-1] == 0:
            a.pop()
            continue
        shift = len(a) - len(b)
        c = a[-1] / b[-1]
        q[shift] = c
        for i, x in enumerate(b):
            a[shift + i] -= c * x
        a.pop()
    return _trim(tuple(q)), _trim(tuple(a))


def _pgcd(a: Poly, b: Poly) -> Poly:
    a, b = _trim(a), _trim(b)
    while b:
        a, b = b, _pdivmod(a, b)[1]
    if not a:
        return ()
    return _pscale(a, 1 / a[-1])  # monic


def _substitute_half(a: Poly) -> Poly:
    """a(w/2)."""
    return _trim(tuple(c / Fraction(2**k) for k, c in enumerate(a)))


# ---------------------------------------------------------------------------
# Equations for the Cauchy transform
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CauchyEquation:
    """sum_k c_k(zeta) G^k = 0 with rational coefficient polynomials."""

    coeffs: tuple[Poly, ...]  # coeffs[k] is the zeta-polynomial on G^k

    def __post_init__(self):
        if not self.coeffs or not _trim(self.coeffs[-1]):
            raise ValueError("leading coefficient polynomial vanishes identically")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def g_polynomial(self, zeta: complex) -> np.ndarray:
        """Coefficients in G, highest degree first, at a fixed zeta."""
        return np.array([_peval(c, complex(zeta)) for c in reversed(self.coeffs)])

    def residual(self, zeta: complex, g: complex) -> float:
        acc = 0j
        for k, c in enumerate(self.coeffs):
            acc += _peval(c, complex(zeta)) * g**k
        return abs(acc)

    def canonical(self) -> "CauchyEquation":
        """Divide out any common zeta power and normalize the leading
        coefficient, so that equivalent equations compare equal."""
        coeffs = [_trim(c) for c in self.coeffs]
        shift = min(
            (next(j for j, v in enumerate(c) if v != 0) for c in coeffs if c),
            default=0)
        coeffs = [c[shift:] if c else c for c in coeffs]
        lead = coeffs[-1][-1]
        return CauchyEquation(tuple(_pscale(c, 1 / lead) for c in coeffs))

    def scaled_residual(self, zeta: complex, g: complex) -> float:
        p = self.g_polynomial(zeta)
        scale = max(1.0, float(np.max(np.abs(p))))
        return self.residual(zeta, g) / scale


def example_equation(which: str, lam=None) -> CauchyEquation:
    """The printed quadratic/cubic equations for the examples, plus the
    machine-derived quartics for two free projections."""
    if which == "semi_semi":
        # zeta G^3 + G^2 - zeta G + 1 = 0
        return CauchyEquation((
            (_ONE,), (_ZERO, -_ONE), (_ONE,), (_ZERO, _ONE)))
    if which == "semi_proj":
        lam = Fraction(lam)
        if not 0 < lam < 1:
            raise LawError("projection trace must lie in (0,1)")
        xi = 4 * lam * (1 - lam)
        # zeta^2 G^2 - 2 zeta^3 G + (2 zeta^2 - 1 + xi) = 0
        return CauchyEquation((
            (xi - 1, _ZERO, Fraction(2)),
            (_ZERO, _ZERO, _ZERO, Fraction(-2)),
            (_ZERO, _ZERO, _ONE)))
    if which == "proj_half":
        lam = Fraction(lam)
        from .freeops import projection
        return derived_equation(projection(lam), projection(Fraction(1, 2)))
    if which in ("proj_proj", "proj_proj_small", "proj_proj_mid"):
        lam = Fraction(lam)
        from .freeops import projection
        return derived_equation(projection(lam), projection(lam))
    raise LawError(f"unknown example {which!r}")


def derived_equation(spec_a: LawSpec, spec_b: LawSpec) -> CauchyEquation:
    """Eliminate the compositional inversions from the moment-series
    formula for the commutator.

    With invE the tabulated inverse of the even-cumulant series and

        H(w) = 2 invE_a(w/2) invE_b(w/2) / (w (1+w/2)(1+w)^2),

    the even moment series Mhat satisfies H(Mhat(u)) = u.  Writing
    Mhat(1/zeta^2) = zeta G(zeta) - 1 and clearing denominators turns
    this into a polynomial equation for G with zeta-polynomial
    coefficients."""
    na, da = re_inverse_rational(spec_a)
    nb, db = re_inverse_rational(spec_b)
    num = _pscale(_pmul(_substitute_half(na), _substitute_half(nb)), Fraction(2))
    den = _pmul(_pmul((_ZERO, _ONE), (_ONE, Fraction(1, 2))), (_ONE, Fraction(2), _ONE))
    den = _pmul(den, _pmul(_substitute_half(da), _substitute_half(db)))
    g = _pgcd(num, den)
    num, _ = _pdivmod(num, g)
    den, _ = _pdivmod(den, g)

    # substitute w -> zeta*G - 1 by Horner; carry a dict {(gdeg, zdeg): c}
    def subst(poly: Poly) -> dict:
        acc: dict = {}
        for c in reversed(poly):
            nxt: dict = {}
            for (i, j), v in acc.items():  # multiply by (zeta G - 1)
                nxt[(i + 1, j + 1)] = nxt.get((i + 1, j + 1), _ZERO) + v
                nxt[(i, j)] = nxt.get((i, j), _ZERO) - v
            if c != 0:
                nxt[(0, 0)] = nxt.get((0, 0), _ZERO) + c
            acc = {k: v for k, v in nxt.items() if v != 0}
        return acc

    eqn: dict = {}
    for (i, j), v in subst(num).items():  # zeta^2 * num(what)
        eqn[(i, j + 2)] = eqn.get((i, j + 2), _ZERO) + v
    for (i, j), v in subst(den).items():
        eqn[(i, j)] = eqn.get((i, j), _ZERO) - v
    eqn = {k: v for k, v in eqn.items() if v != 0}
    if not eqn:
        raise LawError("degenerate equation")
    zshift = min(j for _, j in eqn)
    gdeg = max(i for i, _ in eqn)
    zdeg = max(j for _, j in eqn) - zshift
    coeffs = [[_ZERO] * (zdeg + 1) for _ in range(gdeg + 1)]
    for (i, j), v in eqn.items():
        coeffs[i][j - zshift] = v
    return CauchyEquation(tuple(_trim(tuple(c)) for c in coeffs))


def cauchy_from_moments(dist: Distribution, zeta: complex, norm_bound: float,
                        tol: float = 1e-9) -> complex:
    """G(zeta) by Laurent partial sums, with a geometric tail bound from
    the caller's operator-norm estimate.  Raises outside the provable
    region."""
    z = complex(zeta)
    az = abs(z)
    if norm_bound <= 0:
        raise OutOfRegionError("norm bound must be positive")
    ratio = norm_bound / az
    if ratio >= 1:
        raise OutOfRegionError(
            f"|zeta| = {az:.3g} inside the declared norm bound {norm_bound:.3g}")
    tail = ratio ** (dist.order + 1) / (az * (1 - ratio))
    if tail > tol:
        raise OutOfRegionError(
            f"truncation tail bound {tail:.3g} exceeds tolerance {tol:.3g}")
    acc = 1.0 + 0j
    zin = 1 / z
    p = 1.0 + 0j
    for m in dist.moments:
        p *= zin
        acc += float(m) * p
    return acc / z


# ---------------------------------------------------------------------------
# Stieltjes inversion
# ---------------------------------------------------------------------------

@dataclass
class DensityModel:
    """Atoms plus an absolutely continuous part with declared support."""

    atoms: tuple[tuple[float, float], ...]
    density: Callable[[float], float]
    support: tuple[tuple[float, float], ...]
    flagged: tuple[float, ...] = ()


def _extrapolate_to_zero(eps: Sequence[float], values: Sequence[float]) -> float:
    """Lagrange extrapolation of values(eps) to eps = 0."""
    pts = list(zip(eps, values))
    acc = 0.0
    for i, (xi, yi) in enumerate(pts):
        w = 1.0
        for j, (xj, _) in enumerate(pts):
            if j != i:
                w *= xj / (xj - xi)
        acc += w * yi
    return acc


class _BranchTracker:
    """Follows the G ~ 1/zeta branch from high up the imaginary axis."""

    def __init__(self, eq: CauchyEquation, anchor_height: float):
        self.eq = eq
        self.anchor = complex(0.0, anchor_height)
        roots = np.roots(eq.g_polynomial(self.anchor))
        target = 1 / self.anchor
        dist = np.abs(roots - target)
        k = int(np.argmin(dist))
        if dist[k] > 0.5 / anchor_height:
            raise BranchError("no root near 1/zeta at the anchor; raise the anchor")
        self.anchor_root = complex(roots[k])

    def follow_from(self, g: complex, path: Sequence[complex]) -> tuple[complex, bool]:
        """Track the nearest root along the path; returns (G, tie_flag)."""
        tied = False
        for zeta in path:
            roots = np.roots(self.eq.g_polynomial(zeta))
            dist = np.abs(roots - g)
            order = np.argsort(dist)
            k = int(order[0])
            if len(roots) > 1:
                d1, d2 = float(dist[k]), float(dist[order[1]])
                if d1 > 1e-12 and d2 < 2 * d1:
                    tied = True
            g = complex(roots[k])
        return g, tied

    def follow(self, path: Sequence[complex]) -> tuple[complex, bool]:
        return self.follow_from(self.anchor_root, path)

    def path_to(self, t: float, height: float, stop: float,
                shrink: float = 0.75) -> list[complex]:
        steps = [complex(x, height) for x in np.linspace(0.0, t, 12)[1:]]
        y = height
        while y > stop:
            y = max(y * shrink, stop)
            steps.append(complex(t, y))
        return steps

    def value(self, t: float, eps: float) -> tuple[complex, bool]:
        return self.follow(self.path_to(t, abs(self.anchor), eps))


def solve_density(eq: CauchyEquation, grid: Sequence[float],
                  eps_schedule: Sequence[float] = (1e-2, 1e-3, 1e-4),
                  atom_candidates: Sequence[float] = (0.0,),
                  anchor_height: float | None = None) -> DensityModel:
    """Recover atoms and density values on a grid by Stieltjes inversion.

    Each grid point gets the branch-tracked G(t + i*eps) for every eps in
    the schedule and a polynomial extrapolation to eps = 0; near-ties in
    root tracking flag the point rather than silently picking a root."""
    eps = sorted(eps_schedule, reverse=True)
    grid = [float(t) for t in grid]
    height = anchor_height or 10.0 * (1.0 + max(abs(t) for t in grid))
    tracker = _BranchTracker(eq, height)
    flagged: list[float] = []
    values: dict[float, float] = {}

    def density_at(t: float) -> tuple[float, bool]:
        ims = []
        path = tracker.path_to(t, height, eps[0])
        g, tied = tracker.follow(path)
        ims.append(g.imag)
        for e_prev, e_next in zip(eps, eps[1:]):
            y = e_prev
            seg = []
            while y > e_next:
                y = max(y * 0.75, e_next)
                seg.append(complex(t, y))
            g, t2 = tracker.follow_from(g, seg)
            tied = tied or t2
            ims.append(g.imag)
        dens = -_extrapolate_to_zero(eps, ims) / math.pi
        return dens, tied

    for t in grid:
        d, tied = density_at(t)
        values[t] = d
        if tied:
            flagged.append(t)

    atoms = []
    for c in atom_candidates:
        weights = []
        for e in eps:
            g, _ = tracker.value(float(c), e)
            weights.append(-e * g.imag)
        w = _extrapolate_to_zero(eps, weights)
        if w > 1e-7:
            atoms.append((float(c), w))

    def density(t: float) -> float:
        t = float(t)
        if t in values:
            return values[t]
        return density_at(t)[0]

    lo, hi = min(grid), max(grid)
    return DensityModel(tuple(atoms), density, ((lo, hi),), tuple(flagged))


def support_endpoints(eq: CauchyEquation) -> tuple[float, ...]:
    """Real branch points of the equation: real roots of the resultant of
    the G-polynomial with its G-derivative (computed exactly, then rooted
    numerically).  Support edges and atom locations appear among these."""
    d = eq.degree
    deriv = tuple(
        _pscale(c, Fraction(k)) for k, c in enumerate(eq.coeffs) if k >= 1)
    max_deg = max(len(c) for c in eq.coeffs)
    bound = (2 * d - 1) * max_deg + 1
    samples = [Fraction(k) for k in range(-(bound // 2), bound // 2 + 2)]

    def sylvester_det(z: Fraction) -> Fraction:
        p = [_peval_frac(c, z) for c in eq.coeffs]
        q = [_peval_frac(c, z) for c in deriv]
        n, m = d, d - 1
        size = n + m
        rows = []
        for i in range(m):
            row = [_ZERO] * size
            for j, c in enumerate(reversed(p)):
                row[i + j] = c
            rows.append(row)
        for i in range(n):
            row = [_ZERO] * size
            for j, c in enumerate(reversed(q)):
                row[i + j] = c
            rows.append(row)
        return _det_fraction(rows)

    vals = [sylvester_det(z) for z in samples]
    res_poly = _lagrange_interpolate(samples, vals)
    if not res_poly:
        return ()
    roots = np.roots([float(c) for c in reversed(res_poly)])
    real = sorted({round(float(r.real), 12) for r in roots if abs(r.imag) < 1e-9})
    return tuple(real)


def _lagrange_interpolate(xs: Sequence[Fraction], ys: Sequence[Fraction]) -> Poly:
    acc: Poly = ()
    for i, (xi, yi) in enumerate(zip(xs, ys)):
        if yi == 0:
            continue
        term: Poly = (yi,)
        for j, xj in enumerate(xs):
            if j == i:
                continue
            term = _pscale(_pmul(term, (-xj, _ONE)), 1 / (xi - xj))
        acc = _padd(acc, term)
    return acc


def _det_fraction(rows: list[list[Fraction]]) -> Fraction:
    n = len(rows)
    det = _ONE
    for col in range(n):
        pivot = None
        for r in range(col, n):
            if rows[r][col] != 0:
                pivot = r
                break
        if pivot is None:
            return _ZERO
        if pivot != col:
            rows[col], rows[pivot] = rows[pivot], rows[col]
            det = -det
        pv = rows[col][col]
        det *= pv
        for r in range(col + 1, n):
            f = rows[r][col] / pv
            if f == 0:
                continue
            rows[r] = [a - f * b for a, b in zip(rows[r], rows[col])]
    return det


# ---------------------------------------------------------------------------
# Closed-form densities
# ---------------------------------------------------------------------------

def closed_form_model(which: str, lam=None) -> DensityModel:
    """The explicitly integrable examples.

    ``semi_proj``: semicircular against a projection of trace lam;
    ``semi_semi``: two semicirculars; ``proj_half``: projections with the
    second of trace 1/2; ``proj_proj``: equal traces (two regimes split
    at lam = 1/2 - 1/sqrt(8); traces above 1/2 fold down by symmetry)."""
    if which == "semi_semi":
        return _semi_semi_model()
    lam = Fraction(lam)
    if not 0 < lam < 1:
        raise LawError("trace parameter must lie in (0,1)")
    if which == "semi_proj":
        return _semi_proj_model(float(lam))
    if which == "proj_half":
        return _proj_half_model(float(lam))
    if which in ("proj_proj", "proj_proj_small", "proj_proj_mid"):
        if lam > Fraction(1, 2):
            lam = 1 - lam  # replacing both projections by their complements
        xi = 4 * lam * (1 - lam)
        small = xi <= Fraction(1, 2)
        if which == "proj_proj_small" and not small:
            raise LawError("small-trace regime needs lam <= 1/2 - 1/sqrt(8)")
        if which == "proj_proj_mid" and small:
            raise LawError("middle regime needs lam >= 1/2 - 1/sqrt(8)")
        lamf = float(lam)
        return _proj_proj_small_model(lamf) if small else _proj_proj_mid_model(lamf)
    raise LawError(f"unknown example {which!r}")


def closed_form_density(which: str, t: float, lam=None) -> float:
    return closed_form_model(which, lam).density(float(t))


def _semi_proj_model(lam: float) -> DensityModel:
    xi = 4.0 * lam * (1.0 - lam)
    root = math.sqrt(lam * (1.0 - lam))
    alpha = math.sqrt(max(1.0 - 2.0 * root, 0.0))
    beta = math.sqrt(1.0 + 2.0 * root)

    def density(t: float) -> float:
        a = abs(t)
        if a < 1e-12 or not alpha <= a <= beta:
            return 0.0
        rad = xi - (t * t - 1.0) ** 2
        if rad <= 0.0:
            return 0.0
        return math.sqrt(rad) / (math.pi * a)

    atom_w = math.sqrt(1.0 - xi)
    atoms = ((0.0, atom_w),) if atom_w > 1e-15 else ()
    if alpha > 1e-12:
        support = ((-beta, -alpha), (alpha, beta))
    else:
        support = ((-beta, beta),)
    return DensityModel(atoms, density, support)


def _semi_semi_model() -> DensityModel:
    r = math.sqrt((11.0 + 5.0 * math.sqrt(5.0)) / 2.0)

    def density(t: float) -> float:
        u = t * t
        if u >= r * r:
            return 0.0
        if u < 1e-20:
            return 1.0 / math.pi  # limit of the formula at the origin
        inner = u * (1.0 + 11.0 * u - u * u) / 27.0
        h = ((18.0 * u + 1.0) / 27.0 - math.sqrt(max(inner, 0.0))) ** (1.0 / 3.0)
        val = (3.0 * u + 1.0) / (9.0 * h) - h
        return math.sqrt(3.0) / (2.0 * math.pi * abs(t)) * val

    return DensityModel((), density, ((-r, r),))


def _proj_half_model(lam: float) -> DensityModel:
    xi = 4.0 * lam * (1.0 - lam)
    inner = math.sqrt(1.0 - xi) / 2.0

    def density(t: float) -> float:
        a = abs(t)
        if a < 1e-12 or a >= 0.5 or a < inner:
            return 0.0
        num = 4.0 * t * t - 1.0 + xi
        den = 1.0 - 4.0 * t * t
        if num <= 0.0 or den <= 0.0:
            return 0.0
        return math.sqrt(num / den) / (math.pi * a)

    atom_w = math.sqrt(1.0 - xi)
    atoms = ((0.0, atom_w),) if atom_w > 1e-15 else ()
    if inner > 1e-12:
        support = ((-0.5, -inner), (inner, 0.5))
    else:
        support = ((-0.5, 0.5),)
    return DensityModel(atoms, density, support)


def _proj_proj_small_model(lam: float) -> DensityModel:
    xi = 4.0 * lam * (1.0 - lam)
    edge = math.sqrt(xi * (1.0 - xi))

    def density(t: float) -> float:
        if abs(t) >= edge:
            return 0.0
        s = math.sqrt(1.0 - 4.0 * t * t)
        num = xi * (1.0 - xi) - t * t
        den = (1.0 - 4.0 * t * t) * (1.0 + s) * (1.0 - 2.0 * xi + s)
        if num <= 0.0 or den <= 0.0:
            return 0.0
        return 2.0 / math.pi * math.sqrt(num / den)

    return DensityModel(((0.0, math.sqrt(1.0 - xi)),), density, ((-edge, edge),))


def _proj_proj_mid_model(lam: float) -> DensityModel:
    xi = 4.0 * lam * (1.0 - lam)
    split = math.sqrt(max(xi * (1.0 - xi), 0.0))

    def density(t: float) -> float:
        a = abs(t)
        if a >= 0.5:
            return 0.0
        s = math.sqrt(1.0 - 4.0 * t * t)
        if a < split:
            num = 2.0 * xi - 1.0 + s
            den = (1.0 + s) * (1.0 - 4.0 * t * t)
            if num <= 0.0:
                return 0.0
            return math.sqrt(num / den) / math.pi
        if a < 1e-12:
            return 0.0
        num = 2.0 * t * t - 1.0 + xi + 2.0 * a * math.sqrt(max(t * t - xi * (1.0 - xi), 0.0))
        den = t * t * (1.0 - 4.0 * t * t)
        if num <= 0.0:
            return 0.0
        return math.sqrt(num / den) / math.pi

    atom_w = math.sqrt(1.0 - xi)
    atoms = ((0.0, atom_w),) if atom_w > 1e-15 else ()
    return DensityModel(atoms, density, ((-0.5, 0.5),))


# ---------------------------------------------------------------------------
# Moments of a model, and positivity
# ---------------------------------------------------------------------------

def density_moments(model: DensityModel, n: int) -> float:
    """n-th moment by adaptive quadrature plus atom contributions."""
    acc = sum(w * c**n for c, w in model.atoms)
    for lo, hi in model.support:
        val, err = quad(lambda t: t**n * model.density(t), lo, hi,
                        limit=400, epsabs=1e-11, epsrel=1e-11)
        if err > 1e-6:
            raise ArithmeticError(f"quadrature error {err:.2g} too large")
        acc += val
    return float(acc)


def total_mass(model: DensityModel) -> float:
    return density_moments(model, 0)


def hankel_positive(dist: Distribution, k: int) -> tuple[bool, int | None]:
    """Exact leading-principal Hankel determinants det (m_{i+j}), i,j <= r
    for r <= k.  Returns (all nonnegative?, first failing r or None)."""
    if 2 * k > dist.order:
        raise ValueError(f"need moments up to 2k = {2 * k}, have {dist.order}")
    for r in range(k + 1):
        rows = [[dist.moment(i + j) for j in range(r + 1)] for i in range(r + 1)]
        if _det_fraction(rows) < 0:
            return False, r
    return True, None

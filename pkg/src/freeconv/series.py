"""Exact truncated formal series over the rationals.

Three representations are used throughout the package:

* ``PowerSeries`` -- one variable, no constant term, coefficients for
  z^1 .. z^N.  This is the home of moment series, free-cumulant series
  and their even parts.
* ``UnitSeries`` -- one variable with a constant term, coefficients for
  w^0 .. w^N.  This is the home of S-transforms and of the
  combinatorial Fourier transform, whose values genuinely have
  constant terms.
* ``NCSeries2`` -- two non-commuting variables, coefficients indexed by
  words over {1, 2} of length 1 .. N.

All coefficients are ``fractions.Fraction`` and every operation is
exact.  Operations never extend the truncation order silently: mixing
orders raises ``OrderMismatchError``.  The few operations that *do*
change the order (``shift_div``, ``substitute_square``, ``r_even`` in
the transforms module) say so in their docstrings.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

Rat = Fraction


class SeriesError(Exception):
    """Base class for series arithmetic failures."""


class OrderMismatchError(SeriesError):
    pass


class CoefficientRangeError(SeriesError):
    pass


class SeriesDivisionError(SeriesError):
    """Division by a series with a vanishing leading/constant coefficient,
    or a quotient that does not fit the result type."""


class InversionError(SeriesError):
    """Compositional inverse requested for a series with zero linear term."""


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def _fracs(xs: Iterable) -> tuple[Fraction, ...]:
    return tuple(_frac(x) for x in xs)


_ZERO = Fraction(0)
_ONE = Fraction(1)


@dataclass(frozen=True)
class PowerSeries:
    """Truncated series a_1 z + a_2 z^2 + ... + a_N z^N with rational a_n."""

    coeffs: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _fracs(self.coeffs))
        if len(self.coeffs) < 1:
            raise SeriesError("truncation order must be at least 1")

    @property
    def order(self) -> int:
        return len(self.coeffs)

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, order: int = 16) -> "PowerSeries":
        return cls((_ZERO,) * order)

    @classmethod
    def identity(cls, order: int = 16) -> "PowerSeries":
        """The series z, the unit for the combinatorial convolution."""
        return cls.monomial(1, 1, order)

    @classmethod
    def monomial(cls, n: int, c, order: int = 16) -> "PowerSeries":
        if not 1 <= n <= order:
            raise CoefficientRangeError(f"monomial degree {n} outside 1..{order}")
        return cls(tuple(_frac(c) if k == n else _ZERO for k in range(1, order + 1)))

    # -- basic access --------------------------------------------------

    def coef(self, n: int) -> Fraction:
        if not 1 <= n <= self.order:
            raise CoefficientRangeError(f"coefficient {n} outside 1..{self.order}")
        return self.coeffs[n - 1]

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def __repr__(self):
        return f"PowerSeries({list(self.coeffs)})"

    # -- ring operations ----------------------------------------------

    def _check(self, other: "PowerSeries"):
        if not isinstance(other, PowerSeries):
            raise TypeError(f"expected PowerSeries, got {type(other).__name__}")
        if other.order != self.order:
            raise OrderMismatchError(f"orders differ: {self.order} vs {other.order}")

    def __add__(self, other):
        self._check(other)
        return PowerSeries(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other):
        self._check(other)
        return PowerSeries(tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self):
        return PowerSeries(tuple(-a for a in self.coeffs))

    def __mul__(self, other):
        self._check(other)
        n = self.order
        a, b = self.coeffs, other.coeffs
        out = [_ZERO] * n
        for i in range(1, n):
            ai = a[i - 1]
            if ai == 0:
                continue
            for j in range(1, n - i + 1):
                out[i + j - 1] += ai * b[j - 1]
        return PowerSeries(tuple(out))

    def __truediv__(self, other):
        """Formal quotient, staying inside the no-constant-term type.

        Requires the divisor's linear coefficient to be nonzero and the
        dividend's linear coefficient to vanish (otherwise the quotient
        would carry a constant term).  Coefficients of the dividend
        beyond the truncation are taken as zero.
        """
        self._check(other)
        if other.coeffs[0] == 0:
            raise SeriesDivisionError("division by a series with zero leading coefficient")
        if self.coeffs[0] != 0:
            raise SeriesDivisionError("quotient would have a constant term")
        n = self.order
        a = self.coeffs + (_ZERO,)  # a[e] = coefficient of z^(e+1), padded
        b = other.coeffs
        q = [_ZERO] * n
        for m in range(1, n + 1):
            # z^(m+1) of q*g = sum_{i=1..m} q_i b_{m+1-i}
            acc = a[m]
            for i in range(1, m):
                acc -= q[i - 1] * b[m - i]
            q[m - 1] = acc / b[0]
        return PowerSeries(tuple(q))

    def scale(self, c) -> "PowerSeries":
        c = _frac(c)
        return PowerSeries(tuple(c * a for a in self.coeffs))

    # -- composition ---------------------------------------------------

    def compose(self, inner: "PowerSeries") -> "PowerSeries":
        """self(inner(z)), truncated to the shared order."""
        self._check(inner)
        n = self.order
        acc = [_ZERO] * n
        power = inner
        for k in range(1, n + 1):
            fk = self.coeffs[k - 1]
            if fk != 0:
                for m in range(k, n + 1):
                    acc[m - 1] += fk * power.coeffs[m - 1]
            if k < n:
                power = power * inner
        return PowerSeries(tuple(acc))

    def comp_inverse(self) -> "PowerSeries":
        """Inverse under composition, by coefficient recursion.

        The inverse g satisfies self(g(w)) = w to the truncation order;
        it exists iff the linear coefficient is nonzero and is unique.
        """
        if self.coeffs[0] == 0:
            raise InversionError("no compositional inverse: linear coefficient is zero")
        n = self.order
        f1 = self.coeffs[0]
        g = [_ZERO] * n
        g[0] = 1 / f1
        for m in range(2, n + 1):
            partial = PowerSeries(tuple(g))
            cm = self.compose(partial).coeffs[m - 1]
            g[m - 1] = -cm / f1
        return PowerSeries(tuple(g))

    def dilate(self, lam) -> "PowerSeries":
        """f(lam * z): the n-th coefficient picks up lam^n."""
        lam = _frac(lam)
        if lam == 0:
            return PowerSeries.zero(self.order)
        out, p = [], _ONE
        for a in self.coeffs:
            p *= lam
            out.append(a * p)
        return PowerSeries(tuple(out))

    def substitute_square(self) -> "PowerSeries":
        """f(z^2), at doubled order 2N (all new coefficients are exact)."""
        out = [_ZERO] * (2 * self.order)
        for n, a in enumerate(self.coeffs, start=1):
            out[2 * n - 1] = a
        return PowerSeries(tuple(out))

    def pad(self, order: int) -> "PowerSeries":
        """Extend with explicit zero coefficients.  Only meaningful when the
        caller knows the omitted coefficients vanish."""
        if order < self.order:
            raise OrderMismatchError("pad cannot shrink a series")
        return PowerSeries(self.coeffs + (_ZERO,) * (order - self.order))

    def truncate(self, order: int) -> "PowerSeries":
        if order > self.order:
            raise OrderMismatchError("truncate cannot extend a series")
        return PowerSeries(self.coeffs[:order])

    # -- mixed operations with unit series ------------------------------

    def mul_unit(self, u: "UnitSeries") -> "PowerSeries":
        """Multiply by a series with constant term; result stays constant-free."""
        if u.order != self.order:
            raise OrderMismatchError(f"orders differ: {self.order} vs {u.order}")
        n = self.order
        out = [_ZERO] * n
        uc = (u.const,) + u.coeffs
        for i in range(1, n + 1):
            ai = self.coeffs[i - 1]
            if ai == 0:
                continue
            for j in range(0, n - i + 1):
                out[i + j - 1] += ai * uc[j]
        return PowerSeries(tuple(out))

    def div_unit(self, u: "UnitSeries") -> "PowerSeries":
        if u.order != self.order:
            raise OrderMismatchError(f"orders differ: {self.order} vs {u.order}")
        if u.const == 0:
            raise SeriesDivisionError("division by a unit series with zero constant term")
        n = self.order
        uc = (u.const,) + u.coeffs
        q = [_ZERO] * n
        for m in range(1, n + 1):
            acc = self.coeffs[m - 1]
            for i in range(1, m):
                acc -= q[i - 1] * uc[m - i]
            q[m - 1] = acc / uc[0]
        return PowerSeries(tuple(q))


@dataclass(frozen=True)
class UnitSeries:
    """Truncated series c + a_1 w + ... + a_N w^N with rational coefficients."""

    const: Fraction
    coeffs: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "const", _frac(self.const))
        object.__setattr__(self, "coeffs", _fracs(self.coeffs))

    @property
    def order(self) -> int:
        return len(self.coeffs)

    @classmethod
    def constant(cls, c, order: int = 16) -> "UnitSeries":
        return cls(_frac(c), (_ZERO,) * order)

    @classmethod
    def from_coeffs(cls, coeffs: Sequence) -> "UnitSeries":
        """coeffs[0] is the constant term."""
        cs = _fracs(coeffs)
        return cls(cs[0], cs[1:])

    def coef(self, n: int) -> Fraction:
        if n == 0:
            return self.const
        if not 1 <= n <= self.order:
            raise CoefficientRangeError(f"coefficient {n} outside 0..{self.order}")
        return self.coeffs[n - 1]

    def all_coeffs(self) -> tuple[Fraction, ...]:
        return (self.const,) + self.coeffs

    def __repr__(self):
        return f"UnitSeries({self.const}, {list(self.coeffs)})"

    def _check(self, other: "UnitSeries"):
        if not isinstance(other, UnitSeries):
            raise TypeError(f"expected UnitSeries, got {type(other).__name__}")
        if other.order != self.order:
            raise OrderMismatchError(f"orders differ: {self.order} vs {other.order}")

    def __add__(self, other):
        self._check(other)
        return UnitSeries(self.const + other.const,
                          tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other):
        self._check(other)
        return UnitSeries(self.const - other.const,
                          tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __mul__(self, other):
        self._check(other)
        n = self.order
        a = self.all_coeffs()
        b = other.all_coeffs()
        out = [_ZERO] * (n + 1)
        for i in range(n + 1):
            if a[i] == 0:
                continue
            for j in range(n + 1 - i):
                out[i + j] += a[i] * b[j]
        return UnitSeries(out[0], tuple(out[1:]))

    def __truediv__(self, other):
        self._check(other)
        if other.const == 0:
            raise SeriesDivisionError("division by a unit series with zero constant term")
        n = self.order
        a = self.all_coeffs()
        b = other.all_coeffs()
        q = [_ZERO] * (n + 1)
        for m in range(n + 1):
            acc = a[m]
            for i in range(m):
                acc -= q[i] * b[m - i]
            q[m] = acc / b[0]
        return UnitSeries(q[0], tuple(q[1:]))

    def scale(self, c) -> "UnitSeries":
        c = _frac(c)
        return UnitSeries(c * self.const, tuple(c * a for a in self.coeffs))

    def dilate(self, lam) -> "UnitSeries":
        """g(lam * w); the constant term is unchanged."""
        lam = _frac(lam)
        out, p = [], _ONE
        for a in self.coeffs:
            p *= lam
            out.append(a * p)
        return UnitSeries(self.const, tuple(out))

    def as_power(self) -> PowerSeries:
        """Reinterpret as a constant-free series; the constant must vanish."""
        if self.const != 0:
            raise SeriesDivisionError("cannot drop a nonzero constant term")
        return PowerSeries(self.coeffs)

    def truncate(self, order: int) -> "UnitSeries":
        if order > self.order:
            raise OrderMismatchError("truncate cannot extend a series")
        return UnitSeries(self.const, self.coeffs[:order])


def geometric(ratio, order: int = 16) -> UnitSeries:
    """1/(1 - ratio*w) = 1 + ratio w + ratio^2 w^2 + ..."""
    ratio = _frac(ratio)
    out, p = [], _ONE
    for _ in range(order):
        p *= ratio
        out.append(p)
    return UnitSeries(_ONE, tuple(out))


def one_plus(ratio, order: int = 16) -> UnitSeries:
    """1 + ratio*w."""
    ratio = _frac(ratio)
    return UnitSeries(_ONE, tuple(ratio if k == 0 else _ZERO for k in range(order)))


def shift_div(f: PowerSeries | UnitSeries, k: int) -> UnitSeries:
    """Divide by w^k (k > 0) or multiply by w^{-k} (k < 0).

    Exponents shift by -k; division discards only exponents below k and
    demands that the corresponding coefficients vanish.  The output
    order changes by -k accordingly.
    """
    if isinstance(f, PowerSeries):
        coeffs = (_ZERO,) + f.coeffs  # exponents 0..N
    elif isinstance(f, UnitSeries):
        coeffs = f.all_coeffs()
    else:
        raise TypeError(f"expected a series, got {type(f).__name__}")
    if k > 0:
        for e in range(min(k, len(coeffs))):
            if coeffs[e] != 0:
                raise SeriesDivisionError(
                    f"not divisible by w^{k}: coefficient at exponent {e} is {coeffs[e]}")
        shifted = coeffs[k:]
        if len(shifted) == 0:
            raise SeriesDivisionError(f"shift by {k} leaves no coefficients")
        return UnitSeries.from_coeffs(shifted)
    if k < 0:
        return UnitSeries.from_coeffs((_ZERO,) * (-k) + coeffs)
    return UnitSeries.from_coeffs(coeffs)


def arith(f, g, op: str):
    """Dispatch add/sub/mul/div on same-kind, same-order series."""
    table = {
        "add": lambda a, b: a + b,
        "sub": lambda a, b: a - b,
        "mul": lambda a, b: a * b,
        "div": lambda a, b: a / b,
    }
    if op not in table:
        raise ValueError(f"unknown operation {op!r}")
    if type(f) is not type(g):
        raise TypeError("arith requires operands of the same kind")
    return table[op](f, g)


def coef(f, n: int) -> Fraction:
    return f.coef(n)


def coef_partition(f: PowerSeries, part) -> Fraction:
    """Product of coefficients of f over the block sizes of a partition."""
    acc = _ONE
    for size in part.block_sizes():
        acc *= f.coef(size)
    return acc


# ---------------------------------------------------------------------------
# Two-variable series indexed by words over {1, 2}
# ---------------------------------------------------------------------------

Word = tuple[int, ...]


def words_of_length(n: int):
    return itertools.product((1, 2), repeat=n)


def all_words(order: int):
    for n in range(1, order + 1):
        yield from words_of_length(n)


MAX_WORD_ORDER = 10  # dense storage: 2^1 + ... + 2^N entries


class NCSeries2:
    """Truncated series in two non-commuting variables: one rational
    coefficient per word over {1,2} of length 1..N, stored densely."""

    __slots__ = ("order", "table")

    def __init__(self, order: int, table: dict[Word, Fraction] | None = None):
        if not 1 <= order <= MAX_WORD_ORDER:
            raise SeriesError(
                f"two-variable truncation order must lie in 1..{MAX_WORD_ORDER}")
        self.order = order
        full = {w: _ZERO for w in all_words(order)}
        if table:
            for w, v in table.items():
                w = tuple(w)
                if not 1 <= len(w) <= order or any(l not in (1, 2) for l in w):
                    raise CoefficientRangeError(f"bad word {w} for order {order}")
                full[w] = _frac(v)
        self.table = full

    @classmethod
    def from_function(cls, order: int, fn) -> "NCSeries2":
        return cls(order, {w: fn(w) for w in all_words(order)})

    def coef_word(self, word: Sequence[int]) -> Fraction:
        w = tuple(word)
        if w not in self.table:
            raise CoefficientRangeError(f"word {w} outside order {self.order}")
        return self.table[w]

    def __eq__(self, other):
        return (isinstance(other, NCSeries2) and self.order == other.order
                and self.table == other.table)

    def __repr__(self):
        nonzero = {w: v for w, v in self.table.items() if v != 0}
        return f"NCSeries2(order={self.order}, nonzero={len(nonzero)})"


def word_restrict(word: Word, block: Sequence[int]) -> Word:
    """(i_1,...,i_n | B): the subword read along the (1-based) positions of B."""
    return tuple(word[h - 1] for h in block)


def coef_word(F: NCSeries2, word: Sequence[int], part=None) -> Fraction:
    """Coefficient of a word; with a partition, the product of the
    coefficients of the word restricted to each block."""
    w = tuple(word)
    if part is None:
        return F.coef_word(w)
    if part.n != len(w):
        raise OrderMismatchError("partition size does not match word length")
    acc = _ONE
    for block in part.blocks:
        acc *= F.coef_word(word_restrict(w, block))
    return acc


# ---------------------------------------------------------------------------
# Line-oriented text form (used by the CLI --dump-series flag)
# ---------------------------------------------------------------------------

def dump_series(s) -> str:
    lines = [f"order={s.order}"]
    if isinstance(s, PowerSeries):
        lines += [f"{n}: {s.coef(n)}" for n in range(1, s.order + 1)]
    elif isinstance(s, UnitSeries):
        lines += [f"{n}: {s.coef(n)}" for n in range(0, s.order + 1)]
    elif isinstance(s, NCSeries2):
        for w in all_words(s.order):
            lines.append(f"{','.join(map(str, w))}: {s.table[w]}")
    else:
        raise TypeError(f"cannot dump {type(s).__name__}")
    return "\n".join(lines) + "\n"


def parse_series(text: str):
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("order="):
        raise SeriesError("missing order= header")
    order = int(lines[0][len("order="):])
    entries = {}
    for ln in lines[1:]:
        key, _, val = ln.partition(":")
        entries[key.strip()] = Fraction(val.strip())
    if any("," in k for k in entries):
        table = {tuple(int(x) for x in k.split(",")): v for k, v in entries.items()}
        return NCSeries2(order, table)
    idx = {int(k): v for k, v in entries.items()}
    if 0 in idx:
        return UnitSeries(idx.get(0, _ZERO), tuple(idx.get(n, _ZERO) for n in range(1, order + 1)))
    return PowerSeries(tuple(idx.get(n, _ZERO) for n in range(1, order + 1)))

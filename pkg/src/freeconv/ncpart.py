"""Non-crossing partition combinatorics.

Provides enumeration of NC(n), the refinement order, the Kreweras
complement, the general epsilon-complementation built from the
insertion-bead circle picture, the alternating/parity classifications,
and the twist involutions used by the odd-block cancellation argument.

Two deliberately independent complement implementations live here:

* ``kreweras`` uses the interval characterisation (i' ~ j' exactly when
  {i+1..j} is a union of complete blocks);
* ``eps_complement`` walks the token circle of the insertion bead and
  reads off the faces of the chord diagram.

Their agreement for eps = (1,...,1) is a theorem, and is tested rather
than assumed.  The module also exposes aggregated shape tables
(``shape_pair_counts``, ``eps_pair_counts``) that group the terms of
partition-indexed sums by block-size multisets; the grouped tables are
cross-checked against brute-force enumeration in the test suite.
"""

from __future__ import annotations

import enum
import itertools
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

MAX_ENUM = 14  # Catalan(14) = 2,674,440; enumeration beyond this is refused
_SCAN_TABLE_MAX = 10  # per-partition scan metadata is only cached at oracle scale


class PartitionError(Exception):
    pass


class CrossingError(PartitionError):
    """A non-crossing partition was required."""


class NoTwistError(PartitionError):
    """Twist requested for a partition with all blocks of even size."""


@dataclass(frozen=True)
class Partition:
    """A set partition of {1..n}; blocks sorted ascending, ordered by minimum."""

    n: int
    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        blocks = tuple(sorted(tuple(sorted(b)) for b in self.blocks))
        object.__setattr__(self, "blocks", blocks)
        seen = [x for b in blocks for x in b]
        if sorted(seen) != list(range(1, self.n + 1)):
            raise PartitionError(f"blocks do not partition 1..{self.n}: {blocks}")

    @classmethod
    def _trusted(cls, n: int, blocks: tuple[tuple[int, ...], ...]) -> "Partition":
        # for internal enumeration only: blocks already canonical
        obj = object.__new__(cls)
        object.__setattr__(obj, "n", n)
        object.__setattr__(obj, "blocks", blocks)
        return obj

    def block_sizes(self) -> tuple[int, ...]:
        return tuple(sorted(len(b) for b in self.blocks))

    def block_of(self) -> tuple[int, ...]:
        """Block index for each element, 1-based positions 1..n."""
        out = [0] * (self.n + 1)
        for bi, blk in enumerate(self.blocks):
            for e in blk:
                out[e] = bi
        return tuple(out)

    @property
    def is_noncrossing(self) -> bool:
        bid = self.block_of()
        first = {b[0] for b in self.blocks}
        last = {b[-1] for b in self.blocks}
        stack: list[int] = []
        for i in range(1, self.n + 1):
            if i in first:
                stack.append(bid[i])
            if not stack or stack[-1] != bid[i]:
                return False
            if i in last:
                stack.pop()
        return True

    def __str__(self):
        return "{" + ",".join("{" + ",".join(map(str, b)) + "}" for b in self.blocks) + "}"

    def __repr__(self):
        return f"Partition({self})"


def parse_partition(text: str, n: int | None = None) -> Partition:
    """Parse the printed form, e.g. ``{{1,2},{3,4,5}}``."""
    t = text.strip().replace(" ", "")
    if not (t.startswith("{") and t.endswith("}")):
        raise PartitionError(f"not a partition literal: {text!r}")
    inner = re.findall(r"\{([0-9,]*)\}", t[1:-1])
    if not inner:
        raise PartitionError(f"not a partition literal: {text!r}")
    blocks = tuple(tuple(int(x) for x in grp.split(",") if x) for grp in inner)
    elements = [x for b in blocks for x in b]
    if not elements:
        raise PartitionError(f"empty partition literal: {text!r}")
    return Partition(n if n is not None else max(elements), blocks)


@dataclass(frozen=True)
class EpsSignature:
    """A word over {1,2}; prints as a digit string such as ``11221``."""

    entries: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        if any(l not in (1, 2) for l in self.entries):
            raise PartitionError(f"signature entries must be 1 or 2: {self.entries}")

    @classmethod
    def parse(cls, text: str) -> "EpsSignature":
        return cls(tuple(int(c) for c in text.strip()))

    def d(self) -> int:
        """Number of entries equal to 2."""
        return sum(1 for l in self.entries if l == 2)

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __str__(self):
        return "".join(map(str, self.entries))


class ParityClass(enum.Enum):
    NCE = "NCE"  # every block of even size
    NCO = "NCO"  # at least one odd block


def _eps_tuple(eps) -> tuple[int, ...]:
    t = tuple(eps)
    if any(l not in (1, 2) for l in t):
        raise PartitionError(f"signature entries must be 1 or 2: {t}")
    return t


def _require_nc(part: Partition):
    if not part.is_noncrossing:
        raise CrossingError(f"partition is crossing: {part}")


# ---------------------------------------------------------------------------
# Enumeration
# ---------------------------------------------------------------------------

def _compositions(total: int, parts: int):
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for rest in _compositions(total - head, parts - 1):
            yield (head,) + rest


@lru_cache(maxsize=None)
def _nc_raw(m: int) -> tuple:
    """All non-crossing partitions of {0..m-1}, blocks ordered by minimum.

    Recursive first-block decomposition: the block of 0 splits the rest
    into independent segments, each carrying an arbitrary smaller
    non-crossing partition.
    """
    if m == 0:
        return ((),)
    out = []
    for k in range(1, m + 1):
        for gaps in _compositions(m - k, k):
            blk = []
            segs = []
            pos = 0
            for g in gaps:
                blk.append(pos)
                segs.append((pos + 1, g))
                pos += g + 1
            blk = tuple(blk)
            sub_lists = [_nc_raw(g) for g in gaps]
            for combo in itertools.product(*sub_lists):
                blocks = [blk]
                for (start, _), sub in zip(segs, combo):
                    for b in sub:
                        blocks.append(tuple(x + start for x in b))
                out.append(tuple(blocks))
    return tuple(out)


@lru_cache(maxsize=None)
def _nc_sorted(n: int) -> tuple:
    """NC(n) over 1-based ground set, lexicographic in the block encoding."""
    shifted = [tuple(tuple(x + 1 for x in b) for b in blocks) for blocks in _nc_raw(n)]
    return tuple(sorted(shifted))


@lru_cache(maxsize=None)
def enumerate_nc(n: int) -> tuple[Partition, ...]:
    """All of NC(n) in a deterministic (lexicographic) order."""
    if not 1 <= n <= MAX_ENUM:
        raise PartitionError(f"enumeration supported for 1 <= n <= {MAX_ENUM}, got {n}")
    return tuple(Partition._trusted(n, blocks) for blocks in _nc_sorted(n))


def catalan(n: int) -> int:
    from math import comb
    return comb(2 * n, n) // (n + 1)


# ---------------------------------------------------------------------------
# Refinement order, parity, alternation
# ---------------------------------------------------------------------------

def leq(pi: Partition, rho: Partition) -> bool:
    """Refinement order: every block of rho is a union of blocks of pi."""
    if pi.n != rho.n:
        raise PartitionError(f"ground sets differ: {pi.n} vs {rho.n}")
    rid = rho.block_of()
    for blk in pi.blocks:
        r = rid[blk[0]]
        for e in blk[1:]:
            if rid[e] != r:
                return False
    return True


def parity_class(part: Partition) -> ParityClass:
    if all(len(b) % 2 == 0 for b in part.blocks):
        return ParityClass.NCE
    return ParityClass.NCO


def is_eps_alternating(eps, part: Partition) -> bool:
    """Every block alternates cyclically between 1- and 2-labelled slots."""
    letters = _eps_tuple(eps)
    if len(letters) != part.n:
        raise PartitionError("signature length does not match ground set")
    for blk in part.blocks:
        k = len(blk)
        for a in range(k):
            if letters[blk[a] - 1] == letters[blk[(a + 1) % k] - 1]:
                return False
    return True


# ---------------------------------------------------------------------------
# Kreweras complement (interval characterisation)
# ---------------------------------------------------------------------------

def kreweras(part: Partition) -> Partition:
    """Kreweras complement: i ~ j (i < j) exactly when {i+1..j} is a
    union of complete blocks of the input."""
    _require_nc(part)
    n = part.n
    bmin = [0] * (n + 1)
    bmax = [0] * (n + 1)
    for blk in part.blocks:
        for e in blk:
            bmin[e] = blk[0]
            bmax[e] = blk[-1]
    parent = list(range(n + 1))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i in range(1, n):
        lo, hi = n + 1, 0
        for j in range(i + 1, n + 1):
            lo = min(lo, bmin[j])
            hi = max(hi, bmax[j])
            if lo >= i + 1 and hi <= j:
                parent[find(j)] = find(i)
    groups: dict[int, list[int]] = {}
    for i in range(1, n + 1):
        groups.setdefault(find(i), []).append(i)
    return Partition(n, tuple(tuple(g) for g in groups.values()))


# ---------------------------------------------------------------------------
# epsilon-complementation via the token circle
# ---------------------------------------------------------------------------
#
# The insertion bead puts, at slot i, the pair (P_i, Q_i) when l_i = 1 and
# (Q_i, P_i) when l_i = 2.  Two Q points are equivalent under the complement
# exactly when no chord of the input partition separates them, i.e. when
# they lie in the same face of the chord diagram.  The faces are read off
# in a single pass with a stack of open blocks: a block's own P token
# closes the current face inside that block, while the Q tokens join the
# innermost open face.  Points outside every hull form a single face.

def _scan_arrays(blocks: Sequence[Sequence[int]], n: int):
    block_of = [0] * (n + 1)
    first = [False] * (n + 1)
    last = [False] * (n + 1)
    for bi, blk in enumerate(blocks):
        for e in blk:
            block_of[e] = bi
        first[blk[0]] = True
        last[blk[-1]] = True
    return block_of, first, last


def _face_runs(first, last, letters, n) -> list[list[int]]:
    stack: list[list[int]] = [[]]
    emitted: list[list[int]] = []

    def p_token(i):
        if first[i]:
            stack.append([])
        run = stack[-1]
        if run:
            emitted.append(run)
            stack[-1] = []
        if last[i]:
            stack.pop()

    for i in range(1, n + 1):
        if letters[i - 1] == 2:
            stack[-1].append(i)
            p_token(i)
        else:
            p_token(i)
            stack[-1].append(i)
    if stack[0]:
        emitted.append(stack[0])
    return emitted


def _face_shape(first, last, letters, n) -> tuple[int, ...]:
    # run-length variant of _face_runs, for the aggregated tables
    stack = [0]
    emitted = []
    for i in range(1, n + 1):
        pre_q = letters[i - 1] == 2
        if pre_q:
            stack[-1] += 1
        if first[i]:
            stack.append(0)
        if stack[-1]:
            emitted.append(stack[-1])
            stack[-1] = 0
        if last[i]:
            stack.pop()
        if not pre_q:
            stack[-1] += 1
    if stack[0]:
        emitted.append(stack[0])
    emitted.sort()
    return tuple(emitted)


def eps_complement(eps, part: Partition) -> Partition:
    """The complement determined by a {1,2}-word, via the insertion bead."""
    letters = _eps_tuple(eps)
    if len(letters) != part.n:
        raise PartitionError("signature length does not match ground set")
    _require_nc(part)
    _, first, last = _scan_arrays(part.blocks, part.n)
    runs = _face_runs(first, last, letters, part.n)
    result = Partition(part.n, tuple(tuple(r) for r in runs))
    assert result.is_noncrossing
    return result


# ---------------------------------------------------------------------------
# Twist involutions on NCO(n)
# ---------------------------------------------------------------------------

def twist_interval(part: Partition) -> tuple[int, int]:
    """Endpoints [min B, max B] of the lowest-min odd block whose
    endpoints share a parity."""
    _require_nc(part)
    for blk in part.blocks:  # blocks are ordered by minimum
        if len(blk) % 2 == 1 and (blk[0] + blk[-1]) % 2 == 0:
            return blk[0], blk[-1]
    if parity_class(part) is ParityClass.NCE:
        raise NoTwistError(f"no odd block in {part}")
    raise PartitionError(f"no odd block with matching end parity in {part}")


def twist(part: Partition) -> Partition:
    """Reverse every block inside the twist interval; an involution."""
    t0, t1 = twist_interval(part)
    s = t0 + t1

    def tau(i):
        return s - i if t0 <= i <= t1 else i

    return Partition(part.n, tuple(tuple(tau(i) for i in blk) for blk in part.blocks))


def twist_signed(part: Partition, eps) -> tuple[Partition, EpsSignature]:
    """The signed twist: reverse inside the interval and flip the labels
    carried through the reversal."""
    letters = _eps_tuple(eps)
    if len(letters) != part.n:
        raise PartitionError("signature length does not match ground set")
    t0, t1 = twist_interval(part)
    s = t0 + t1
    new_letters = tuple(
        3 - letters[s - i - 1] if t0 <= i <= t1 else letters[i - 1]
        for i in range(1, part.n + 1)
    )
    return twist(part), EpsSignature(new_letters)


# ---------------------------------------------------------------------------
# Aggregated shape tables
# ---------------------------------------------------------------------------
#
# Sums over NC(n) weighted by block-size products only depend on the pair
# (sizes of pi, sizes of the complement of pi), so the terms can be grouped.
# For the Kreweras complement the grouped counts are computed without
# enumeration, through the arc decomposition of the complement: if the
# first block of pi is {b_1 < ... < b_k}, the complement splits along the
# arcs (b_i, b_{i+1}) into the complements of the arc interiors, each taken
# with the arc's left endpoint adjoined as an anchor.  Rotating the circle
# turns the recursion for an anchored interior into the same recursion with
# one more trailing singleton, which is what the parameter r tracks below.

def _merge(a: tuple, b: tuple) -> tuple:
    return tuple(sorted(a + b))


@lru_cache(maxsize=None)
def _anchored_pairs(L: int, r: int) -> dict:
    """Counts of (sizes(sigma), sizes(complement of anchor + sigma + r
    trailing singletons)) over sigma in NC(L)."""
    if L == 0:
        return {((), (r + 1,)): 1}
    out: dict = {}
    for j in range(1, L + 1):  # size of the first block of sigma
        for tail in range(0, L - j + 1):
            rest = L - j - tail
            gap_table = _gap_seq(j - 1, rest)
            if not gap_table:
                continue
            tail_table = _anchored_pairs(tail, r + 1)
            for (gs, ga), gc in gap_table.items():
                for (ts, ta), tc in tail_table.items():
                    key = (_merge(gs, ts + (j,)), _merge(ga, ta))
                    out[key] = out.get(key, 0) + gc * tc
    return out


@lru_cache(maxsize=None)
def _gap_seq(c: int, m: int) -> dict:
    """Counts over c independent gap partitions of total size m of the
    pair (union of their sizes, union of their anchored-complement sizes)."""
    if c == 0:
        return {((), ()): 1} if m == 0 else {}
    out: dict = {}
    for g in range(0, m + 1):
        prev = _gap_seq(c - 1, m - g)
        if not prev:
            continue
        for (gs, ga), gc in _anchored_pairs(g, 0).items():
            for (ps, pa), pc in prev.items():
                key = (_merge(ps, gs), _merge(pa, ga))
                out[key] = out.get(key, 0) + pc * gc
    return out


@lru_cache(maxsize=None)
def shape_pair_counts(n: int) -> dict:
    """Counts of (sizes(pi), sizes(Kreweras(pi))) over pi in NC(n)."""
    out: dict = {}
    for k in range(1, n + 1):
        for (gs, ga), gc in _gap_seq(k, n - k).items():
            key = (_merge(gs, (k,)), ga)
            out[key] = out.get(key, 0) + gc
    return out


@lru_cache(maxsize=None)
def _scan_meta(n: int) -> tuple:
    """(first, last, sizes) per partition, aligned with enumerate_nc(n)."""
    if n > _SCAN_TABLE_MAX:
        raise PartitionError(f"scan tables limited to n <= {_SCAN_TABLE_MAX}")
    metas = []
    for blocks in _nc_sorted(n):
        _, first, last = _scan_arrays(blocks, n)
        sizes = tuple(sorted(len(b) for b in blocks))
        metas.append((tuple(first), tuple(last), sizes))
    return tuple(metas)


@lru_cache(maxsize=None)
def eps_pair_counts(n: int, eps: tuple[int, ...]) -> dict:
    """Counts of (sizes(pi), sizes(C_eps(pi))) over pi in NC(n)."""
    out: dict = {}
    for first, last, sizes in _scan_meta(n):
        key = (sizes, _face_shape(first, last, eps, n))
        out[key] = out.get(key, 0) + 1
    return out


def nc_shape_counts(n: int) -> dict:
    """Counts of block-size multisets over NC(n)."""
    out: dict = {}
    for (sizes, _), c in shape_pair_counts(n).items():
        out[sizes] = out.get(sizes, 0) + c
    return out

"""Finite group carriers with dense 0-based element indices.

Every group enumerates its carrier deterministically with the identity at
index 0, so an element is just an index and a distribution over the group
is a flat integer array.  Multiplication is computed on a canonical form
per backend (residue, permutation tuple, matrix) and resolved back to an
index; groups of modest order additionally expose a dense numpy
multiplication table for vectorized consumers.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import (
    GroupMismatchError,
    MalformedCayleyTableError,
    TooLargeError,
    UnsupportedParameterError,
)

# Full-enumeration structural queries (center, commutators, quotients).
STRUCTURE_CAP = 20_000
# Dense numpy multiplication tables are built lazily up to this order.
TABLE_CAP = 4096
# sl2/psl2: odd prime p with p(p^2-1) <= 10^6.
SL2_CARRIER_CAP = 10**6
# symmetric/alternating: n <= 9.
PERM_DEGREE_CAP = 9

GROUP_KINDS = (
    "cyclic",
    "dihedral",
    "symmetric",
    "alternating",
    "sl2",
    "psl2",
    "cayley-file",
)


@dataclass(frozen=True)
class GroupSpec:
    """Constructible group description, e.g. kind='psl2', parameter=7."""

    kind: str
    parameter: int
    path: Optional[str] = None

    def __str__(self) -> str:
        if self.kind == "cayley-file":
            return f"cayley-file:{self.path}"
        return f"{self.kind}:{self.parameter}"

    @classmethod
    def parse(cls, text: str) -> "GroupSpec":
        text = text.strip()
        if ":" not in text:
            raise UnsupportedParameterError(f"bad group spec {text!r}: expected kind:parameter")
        kind, _, rest = text.partition(":")
        kind = kind.strip()
        if kind == "cayley-file":
            return cls(kind=kind, parameter=0, path=rest.strip())
        if kind not in GROUP_KINDS:
            raise UnsupportedParameterError(f"unknown group kind {kind!r}")
        try:
            parameter = int(rest)
        except ValueError:
            raise UnsupportedParameterError(f"bad parameter in group spec {text!r}") from None
        return cls(kind=kind, parameter=parameter)


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in range(2, int(n**0.5) + 1):
        if n % q == 0:
            return False
    return True


class Group:
    """Base carrier: order, identity at index 0, mul/inv on indices."""

    spec: Optional[GroupSpec]
    name: str
    order: int
    identity: int = 0

    def mul(self, a: int, b: int) -> int:
        raise NotImplementedError

    def inv(self, a: int) -> int:
        raise NotImplementedError

    def pow(self, a: int, k: int) -> int:
        """Square-and-multiply power; negative exponents via inverse."""
        if k < 0:
            a, k = self.inv(a), -k
        acc = self.identity
        while k:
            if k & 1:
                acc = self.mul(acc, a)
            a = self.mul(a, a)
            k >>= 1
        return acc

    def elements(self) -> range:
        return range(self.order)

    def element(self, index: int) -> "Element":
        if not 0 <= index < self.order:
            raise IndexError(f"element index {index} out of range for {self.name}")
        return Element(self, index)

    def element_repr(self, index: int) -> str:
        return str(index)

    # --- vectorized multiplication and dense table support --------------

    _table: Optional[np.ndarray] = None
    _inv_array: Optional[np.ndarray] = None

    supports_vector_mul: bool = False

    def mul_vec(self, a, b) -> np.ndarray:
        """Elementwise product of index arrays (numpy broadcasting applies).

        Backends that can compute products in bulk override this; consumers
        check `supports_vector_mul` first.
        """
        raise NotImplementedError(f"{self.name}: no vectorized multiplication")

    @property
    def has_table(self) -> bool:
        return self.order <= TABLE_CAP

    def mul_table(self) -> np.ndarray:
        """Dense int32 table, table[a, b] = a*b.  Built lazily, cached."""
        if self._table is None:
            if not self.has_table:
                raise TooLargeError(
                    f"{self.name}: order {self.order} exceeds table cap {TABLE_CAP}"
                )
            self._table = self._build_table()
        return self._table

    def _build_table(self) -> np.ndarray:
        n = self.order
        table = np.empty((n, n), dtype=np.int32)
        if self.supports_vector_mul:
            cols = np.arange(n, dtype=np.int64)
            for a in range(n):
                table[a] = self.mul_vec(a, cols)
        else:
            mul = self.mul
            for a in range(n):
                row = table[a]
                for b in range(n):
                    row[b] = mul(a, b)
        return table

    def inv_array(self) -> np.ndarray:
        if self._inv_array is None:
            self._inv_array = np.array([self.inv(a) for a in range(self.order)], dtype=np.int32)
        return self._inv_array

    def __repr__(self) -> str:
        return f"<Group {self.name} order={self.order}>"


@dataclass(frozen=True)
class Element:
    """An element is its owning group plus a dense carrier index."""

    group: Group
    index: int

    def _check(self, other: "Element") -> None:
        if self.group is not other.group and (
            self.group.name != other.group.name or self.group.order != other.group.order
        ):
            raise GroupMismatchError(
                f"elements of {self.group.name} and {other.group.name} cannot combine"
            )

    def __mul__(self, other: "Element") -> "Element":
        self._check(other)
        return Element(self.group, self.group.mul(self.index, other.index))

    def inverse(self) -> "Element":
        return Element(self.group, self.group.inv(self.index))

    def __pow__(self, k: int) -> "Element":
        return Element(self.group, self.group.pow(self.index, k))

    def is_identity(self) -> bool:
        return self.index == self.group.identity

    def __repr__(self) -> str:
        return f"{self.group.name}[{self.index}]"


def multiply(a: Element, b: Element) -> Element:
    return a * b


def invert(a: Element) -> Element:
    return a.inverse()


def power(a: Element, k: int) -> Element:
    return a**k


# ---------------------------------------------------------------------------
# Backends
# ---------------------------------------------------------------------------


class CyclicGroup(Group):
    supports_vector_mul = True

    def __init__(self, n: int):
        if n < 1:
            raise UnsupportedParameterError(f"cyclic group needs n >= 1, got {n}")
        self.spec = GroupSpec("cyclic", n)
        self.name = str(self.spec)
        self.order = n

    def mul(self, a: int, b: int) -> int:
        return (a + b) % self.order

    def inv(self, a: int) -> int:
        return (-a) % self.order

    def mul_vec(self, a, b) -> np.ndarray:
        return (np.asarray(a, dtype=np.int64) + np.asarray(b, dtype=np.int64)) % self.order


class DihedralGroup(Group):
    """Symmetries of the regular n-gon; index = rotation + n * flip."""

    def __init__(self, n: int):
        if n < 1:
            raise UnsupportedParameterError(f"dihedral group needs n >= 1, got {n}")
        self.spec = GroupSpec("dihedral", n)
        self.name = str(self.spec)
        self.n = n
        self.order = 2 * n

    def mul(self, a: int, b: int) -> int:
        n = self.n
        ra, fa = a % n, a // n
        rb, fb = b % n, b // n
        rot = (ra - rb) % n if fa else (ra + rb) % n
        return rot + n * (fa ^ fb)

    def inv(self, a: int) -> int:
        n = self.n
        ra, fa = a % n, a // n
        return a if fa else (-ra) % n

    supports_vector_mul = True

    def mul_vec(self, a, b) -> np.ndarray:
        n = self.n
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        ra, fa = a % n, a // n
        rb, fb = b % n, b // n
        rot = np.where(fa == 1, (ra - rb) % n, (ra + rb) % n)
        return rot + n * (fa ^ fb)

    def element_repr(self, index: int) -> str:
        r, f = index % self.n, index // self.n
        return f"r{r}" + ("s" if f else "")


def _perm_sign(perm: Sequence[int]) -> int:
    seen = [False] * len(perm)
    sign = 1
    for start in range(len(perm)):
        if seen[start]:
            continue
        length = 0
        j = start
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


class PermutationGroup(Group):
    """S_n or A_n on points 0..n-1, carrier in lexicographic order."""

    def __init__(self, kind: str, n: int):
        if not 1 <= n <= PERM_DEGREE_CAP:
            raise UnsupportedParameterError(
                f"{kind} group needs 1 <= n <= {PERM_DEGREE_CAP}, got {n}"
            )
        self.spec = GroupSpec(kind, n)
        self.name = str(self.spec)
        self.n = n
        even_only = kind == "alternating"
        carrier = [
            p for p in itertools.permutations(range(n)) if not even_only or _perm_sign(p) == 1
        ]
        # lexicographic order puts the identity first
        self.carrier = carrier
        self.order = len(carrier)
        self._index = {p: i for i, p in enumerate(carrier)}

    def mul(self, a: int, b: int) -> int:
        pa, pb = self.carrier[a], self.carrier[b]
        return self._index[tuple(pa[x] for x in pb)]

    def inv(self, a: int) -> int:
        pa = self.carrier[a]
        out = [0] * self.n
        for i, x in enumerate(pa):
            out[x] = i
        return self._index[tuple(out)]

    supports_vector_mul = True
    _carrier_arr: Optional[np.ndarray] = None

    def _vector_tables(self) -> np.ndarray:
        if self._carrier_arr is None:
            arr = np.array(self.carrier, dtype=np.int8)
            radix = self.n ** np.arange(self.n - 1, -1, -1, dtype=np.int64)
            packed = arr.astype(np.int64) @ radix
            order = np.argsort(packed, kind="stable")
            self._perm_radix = radix
            self._sorted_packed = packed[order]
            self._sorted_to_index = order
            self._carrier_arr = arr
        return self._carrier_arr

    def mul_vec(self, a, b) -> np.ndarray:
        arr = self._vector_tables()
        pa, pb = np.broadcast_arrays(arr[np.asarray(a)], arr[np.asarray(b)])
        comp = np.take_along_axis(pa, pb.astype(np.intp), axis=-1)
        packed = comp.astype(np.int64) @ self._perm_radix
        pos = np.searchsorted(self._sorted_packed, packed)
        return self._sorted_to_index[pos]

    def element_repr(self, index: int) -> str:
        return _cycle_notation(self.carrier[index])

    def index_of_perm(self, perm: Sequence[int]) -> int:
        """Look up a one-line permutation of 0..n-1 (raises KeyError if absent)."""
        return self._index[tuple(perm)]

    def index_of_cycles(self, cycles: Sequence[Sequence[int]], one_based: bool = True) -> int:
        """Look up a permutation given as disjoint cycles, e.g. [(1,2,3)]."""
        perm = list(range(self.n))
        for cyc in cycles:
            pts = [c - 1 for c in cyc] if one_based else list(cyc)
            for i, pt in enumerate(pts):
                perm[pt] = pts[(i + 1) % len(pts)]
        return self._index[tuple(perm)]


def _cycle_notation(perm: Sequence[int]) -> str:
    seen = [False] * len(perm)
    parts = []
    for start in range(len(perm)):
        if seen[start] or perm[start] == start:
            seen[start] = True
            continue
        cyc = []
        j = start
        while not seen[j]:
            seen[j] = True
            cyc.append(str(j + 1))
            j = perm[j]
        parts.append("(" + " ".join(cyc) + ")")
    return "".join(parts) if parts else "()"


class _MatrixGroup(Group):
    """Common machinery for SL(2,p) and PSL(2,p).

    Elements are canonical 2x2 matrices mod p packed into a single int
    ((a*p+b)*p+c)*p+d.  Carrier order: identity first, the rest sorted by
    packed value.
    """

    def __init__(self, kind: str, p: int):
        if not _is_prime(p) or p == 2:
            raise UnsupportedParameterError(f"{kind} needs an odd prime, got {p}")
        if p * (p * p - 1) > SL2_CARRIER_CAP:
            raise UnsupportedParameterError(
                f"{kind}:{p} exceeds carrier cap p(p^2-1) <= {SL2_CARRIER_CAP}"
            )
        self.spec = GroupSpec(kind, p)
        self.name = str(self.spec)
        self.p = p
        packed = self._enumerate_packed(p)
        packed.sort()
        ident = self._pack(1, 0, 0, 1)
        ordered = [ident] + [v for v in packed if v != ident]
        self._packed_by_index = np.array(ordered, dtype=np.int64)
        self._sorted_packed = np.array(packed, dtype=np.int64)
        # position in the sorted array -> carrier index
        self._sorted_to_index = np.argsort(self._packed_by_index, kind="stable")
        self.order = len(packed)

    def _enumerate_packed(self, p: int) -> list:
        raise NotImplementedError

    def _pack(self, a: int, b: int, c: int, d: int) -> int:
        p = self.p
        return ((a * p + b) * p + c) * p + d

    def _unpack(self, v: int) -> tuple:
        p = self.p
        v, d = divmod(v, p)
        v, c = divmod(v, p)
        a, b = divmod(v, p)
        return a, b, c, d

    def _canon(self, a: int, b: int, c: int, d: int) -> int:
        raise NotImplementedError

    def _index_of_packed(self, v: int) -> int:
        pos = int(np.searchsorted(self._sorted_packed, v))
        return int(self._sorted_to_index[pos])

    def mul(self, x: int, y: int) -> int:
        p = self.p
        a, b, c, d = self._unpack(int(self._packed_by_index[x]))
        e, f, g, h = self._unpack(int(self._packed_by_index[y]))
        return self._index_of_packed(
            self._canon((a * e + b * g) % p, (a * f + b * h) % p,
                        (c * e + d * g) % p, (c * f + d * h) % p)
        )

    def inv(self, x: int) -> int:
        # det = 1, so inverse of [[a,b],[c,d]] is [[d,-b],[-c,a]]
        p = self.p
        a, b, c, d = self._unpack(int(self._packed_by_index[x]))
        return self._index_of_packed(self._canon(d, (-b) % p, (-c) % p, a))

    def matrix(self, index: int) -> tuple:
        """Canonical representative as ((a, b), (c, d)) with entries mod p."""
        a, b, c, d = self._unpack(int(self._packed_by_index[index]))
        return ((a, b), (c, d))

    def element_repr(self, index: int) -> str:
        (a, b), (c, d) = self.matrix(index)
        return f"[[{a},{b}],[{c},{d}]]"

    supports_vector_mul = True

    def _unpack_vec(self, v: np.ndarray) -> tuple:
        p = self.p
        v, d = np.divmod(v, p)
        v, c = np.divmod(v, p)
        a, b = np.divmod(v, p)
        return a, b, c, d

    def mul_vec(self, x, y) -> np.ndarray:
        p = self.p
        a0, b0, c0, d0 = self._unpack_vec(self._packed_by_index[np.asarray(x)])
        a1, b1, c1, d1 = self._unpack_vec(self._packed_by_index[np.asarray(y)])
        packed = self._canon_vec(
            (a0 * a1 + b0 * c1) % p,
            (a0 * b1 + b0 * d1) % p,
            (c0 * a1 + d0 * c1) % p,
            (c0 * b1 + d0 * d1) % p,
        )
        pos = np.searchsorted(self._sorted_packed, packed)
        return self._sorted_to_index[pos]

    def _canon_vec(self, a, b, c, d):
        raise NotImplementedError


def _enumerate_sl2_packed(p: int) -> list:
    """All det-1 matrices mod p as packed ints, split on whether a = 0."""
    packed = []
    inv = [0] + [pow(x, p - 2, p) for x in range(1, p)]
    for a in range(1, p):
        for b in range(p):
            for c in range(p):
                d = (1 + b * c) * inv[a] % p
                packed.append(((a * p + b) * p + c) * p + d)
    for b in range(1, p):
        c = (-inv[b]) % p
        for d in range(p):
            packed.append((b * p + c) * p + d)  # a = 0
    return packed


def _psl2_canon(a: int, b: int, c: int, d: int, p: int) -> int:
    v1 = ((a * p + b) * p + c) * p + d
    v2 = ((((-a) % p) * p + (-b) % p) * p + (-c) % p) * p + (-d) % p
    return min(v1, v2)


class SL2Group(_MatrixGroup):
    def __init__(self, p: int):
        super().__init__("sl2", p)

    def _enumerate_packed(self, p: int) -> list:
        return _enumerate_sl2_packed(p)

    def _canon(self, a, b, c, d):
        return self._pack(a, b, c, d)

    def _canon_vec(self, a, b, c, d):
        p = self.p
        return ((a * p + b) * p + c) * p + d


class PSL2Group(_MatrixGroup):
    """SL(2,p) modulo its center {+-I}; representative = lex-min of {M, -M}."""

    def __init__(self, p: int):
        super().__init__("psl2", p)

    def _enumerate_packed(self, p: int) -> list:
        reps = set()
        for v in _enumerate_sl2_packed(p):
            a, b, c, d = _MatrixGroup._unpack(self, v)
            reps.add(_psl2_canon(a, b, c, d, p))
        return list(reps)

    def _canon(self, a, b, c, d):
        return _psl2_canon(a, b, c, d, self.p)

    def _canon_vec(self, a, b, c, d):
        p = self.p
        v1 = ((a * p + b) * p + c) * p + d
        v2 = (((p - a) % p * p + (p - b) % p) * p + (p - c) % p) * p + (p - d) % p
        return np.minimum(v1, v2)


class CayleyGroup(Group):
    """Group given by an explicit multiplication table (rows of indices)."""

    def __init__(self, table: Sequence[Sequence[int]], name: str,
                 spec: Optional[GroupSpec] = None, validate: bool = True):
        self.spec = spec
        self.name = name
        self.order = len(table)
        self._rows = [list(row) for row in table]
        if validate:
            _validate_cayley_table(self._rows, name)
        self._invs = _inverse_vector(self._rows)
        # attributes set by quotient constructions
        self.projection: Optional[list] = None
        self.parent: Optional[Group] = None

    def mul(self, a: int, b: int) -> int:
        return self._rows[a][b]

    def inv(self, a: int) -> int:
        return self._invs[a]

    supports_vector_mul = True
    _np_rows: Optional[np.ndarray] = None

    def mul_vec(self, a, b) -> np.ndarray:
        if self._np_rows is None:
            self._np_rows = np.array(self._rows, dtype=np.int64)
        return self._np_rows[np.asarray(a), np.asarray(b)]

    def _build_table(self) -> np.ndarray:
        return np.array(self._rows, dtype=np.int32)


class DirectPowerGroup(Group):
    """G^N with componentwise multiplication; index in mixed radix base |G|.

    The carrier is virtual (no table); coordinate 0 is the most significant
    digit of the index.
    """

    def __init__(self, base: Group, n_copies: int):
        if n_copies < 1:
            raise UnsupportedParameterError("direct power needs at least one copy")
        self.base = base
        self.copies = n_copies
        self.spec = None
        self.name = f"power({base.name},{n_copies})"
        self.order = base.order**n_copies

    def split(self, x: int) -> tuple:
        m = self.base.order
        out = []
        for _ in range(self.copies):
            x, r = divmod(x, m)
            out.append(r)
        return tuple(reversed(out))

    def join(self, coords: Sequence[int]) -> int:
        m = self.base.order
        x = 0
        for c in coords:
            x = x * m + c
        return x

    def mul(self, a: int, b: int) -> int:
        m = self.base.order
        mul = self.base.mul
        out = 0
        shift = self.order
        for _ in range(self.copies):
            shift //= m
            ca, a = divmod(a, shift)
            cb, b = divmod(b, shift)
            out = out * m + mul(ca, cb)
        return out

    def inv(self, a: int) -> int:
        return self.join([self.base.inv(c) for c in self.split(a)])

    @property
    def supports_vector_mul(self) -> bool:  # type: ignore[override]
        return self.base.supports_vector_mul

    def mul_vec(self, a, b) -> np.ndarray:
        m = self.base.order
        a, b = np.broadcast_arrays(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64))
        aa, bb = a.copy(), b.copy()
        out = np.zeros(a.shape, dtype=np.int64)
        shift = self.order
        for _ in range(self.copies):
            shift //= m
            ca, aa = np.divmod(aa, shift)
            cb, bb = np.divmod(bb, shift)
            out = out * m + self.base.mul_vec(ca, cb)
        return out

    def element_repr(self, index: int) -> str:
        return "(" + ",".join(self.base.element_repr(c) for c in self.split(index)) + ")"


# ---------------------------------------------------------------------------
# Cayley-table file handling
# ---------------------------------------------------------------------------


def _inverse_vector(rows: Sequence[Sequence[int]]) -> list:
    n = len(rows)
    invs = [-1] * n
    for g in range(n):
        for h in range(n):
            if rows[g][h] == 0:
                invs[g] = h
                break
    return invs


def _validate_cayley_table(rows: Sequence[Sequence[int]], name: str) -> None:
    n = len(rows)
    if n == 0:
        raise MalformedCayleyTableError(f"{name}: empty table")
    full = set(range(n))
    for g, row in enumerate(rows):
        if len(row) != n:
            raise MalformedCayleyTableError(f"{name}: row {g} has {len(row)} entries, expected {n}")
        if any(not 0 <= v < n for v in row):
            raise MalformedCayleyTableError(f"{name}: row {g} has an index outside [0,{n})")
        if set(row) != full:
            raise MalformedCayleyTableError(f"{name}: row {g} is not a permutation of 0..{n - 1}")
    for h in range(n):
        if {rows[g][h] for g in range(n)} != full:
            raise MalformedCayleyTableError(f"{name}: column {h} is not a permutation of 0..{n - 1}")
    for h in range(n):
        if rows[0][h] != h:
            raise MalformedCayleyTableError(f"{name}: index 0 is not a left identity at row 0, column {h}")
    for g in range(n):
        if rows[g][0] != g:
            raise MalformedCayleyTableError(f"{name}: index 0 is not a right identity at row {g}")
    # two-sided inverses
    for g in range(n):
        h = next((h for h in range(n) if rows[g][h] == 0), None)
        if h is None:
            raise MalformedCayleyTableError(f"{name}: row {g} has no inverse")
        if rows[h][g] != 0:
            raise MalformedCayleyTableError(f"{name}: row {g} has no two-sided inverse")
    # associativity: all triples when cheap, otherwise a seeded sample
    if n**3 <= 10**6:
        for a in range(n):
            ra = rows[a]
            for b in range(n):
                ab = ra[b]
                rb = rows[b]
                rab = rows[ab]
                for c in range(n):
                    if rab[c] != ra[rb[c]]:
                        raise MalformedCayleyTableError(
                            f"{name}: associativity fails at ({a},{b},{c})"
                        )
    else:
        rng = np.random.default_rng(0)
        triples = rng.integers(0, n, size=(10**6, 3))
        for a, b, c in triples:
            if rows[rows[a][b]][c] != rows[a][rows[b][c]]:
                raise MalformedCayleyTableError(f"{name}: associativity fails at ({a},{b},{c})")


def load_cayley_table(path: str | Path) -> CayleyGroup:
    """Read the text format: first line order n, then n rows of n indices."""
    path = Path(path)
    try:
        tokens = path.read_text().split()
    except OSError as exc:
        raise MalformedCayleyTableError(f"cannot read {path}: {exc}") from exc
    if not tokens:
        raise MalformedCayleyTableError(f"{path}: empty file")
    try:
        values = [int(t) for t in tokens]
    except ValueError:
        raise MalformedCayleyTableError(f"{path}: non-integer token") from None
    n = values[0]
    if n < 1 or len(values) != 1 + n * n:
        raise MalformedCayleyTableError(
            f"{path}: expected {1 + n * n if n >= 1 else 'order line plus n^2'} tokens, got {len(values)}"
        )
    rows = [values[1 + i * n : 1 + (i + 1) * n] for i in range(n)]
    spec = GroupSpec("cayley-file", n, path=str(path))
    return CayleyGroup(rows, name=str(spec), spec=spec)


# ---------------------------------------------------------------------------
# Construction
# ---------------------------------------------------------------------------


def construct_group(spec: GroupSpec | str) -> Group:
    """Build the enumerated carrier for a spec (string form accepted)."""
    if isinstance(spec, str):
        spec = GroupSpec.parse(spec)
    kind = spec.kind
    if kind == "cyclic":
        return CyclicGroup(spec.parameter)
    if kind == "dihedral":
        return DihedralGroup(spec.parameter)
    if kind in ("symmetric", "alternating"):
        return PermutationGroup(kind, spec.parameter)
    if kind == "sl2":
        return SL2Group(spec.parameter)
    if kind == "psl2":
        return PSL2Group(spec.parameter)
    if kind == "cayley-file":
        if not spec.path:
            raise UnsupportedParameterError("cayley-file spec needs a path")
        return load_cayley_table(spec.path)
    raise UnsupportedParameterError(f"unknown group kind {kind!r}")


# The groups exercised by the test and experiment suites.
CATALOG_SPECS = (
    "cyclic:2",
    "cyclic:4",
    "cyclic:6",
    "dihedral:4",
    "symmetric:3",
    "symmetric:4",
    "alternating:4",
    "alternating:5",
    "alternating:6",
    "sl2:5",
    "sl2:7",
    "psl2:7",
    "psl2:11",
    "psl2:13",
)


# ---------------------------------------------------------------------------
# Structural queries (full enumeration, capped)
# ---------------------------------------------------------------------------


def _check_structure_cap(group: Group) -> None:
    if group.order > STRUCTURE_CAP:
        raise TooLargeError(
            f"{group.name}: order {group.order} exceeds structural cap {STRUCTURE_CAP}"
        )


def vector_multiplier(group: Group):
    """Best available elementwise multiplier on index arrays, or None.

    Prefers a cached Cayley table (cheap fancy indexing), falls back to the
    group's native vectorized product.  Callers keep a scalar path for the
    None case.
    """
    if group.has_table:
        table = group.mul_table()

        def mul_vec(a, b):
            return table[a, b]

        return mul_vec
    if group.supports_vector_mul:
        return group.mul_vec
    return None


def _as_indices(group: Group, gens: Iterable[Element | int]) -> list:
    out = []
    for g in gens:
        if isinstance(g, Element):
            if g.group is not group and g.group.name != group.name:
                raise GroupMismatchError(f"generator from {g.group.name}, expected {group.name}")
            out.append(g.index)
        else:
            out.append(int(g))
    return out


def closure(group: Group, gens: Iterable[Element | int]) -> frozenset:
    """Subgroup generated by gens, by worklist saturation from the identity."""
    gen_idx = _as_indices(group, gens)
    if not gen_idx:
        raise GroupMismatchError("closure needs at least one generator")
    mul = group.mul
    seen = {group.identity}
    frontier = [group.identity]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gen_idx:
                y = mul(x, g)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return frozenset(seen)


def center(group: Group) -> frozenset:
    _check_structure_cap(group)
    n = group.order
    mul_vec = vector_multiplier(group)
    if mul_vec is not None:
        everyone = np.arange(n, dtype=np.int64)
        out = []
        for z in range(n):
            zs = np.full(n, z, dtype=np.int64)
            if np.array_equal(mul_vec(zs, everyone), mul_vec(everyone, zs)):
                out.append(z)
        return frozenset(out)
    mul = group.mul
    out = []
    for z in range(n):
        if all(mul(z, g) == mul(g, z) for g in range(n)):
            out.append(z)
    return frozenset(out)


def _closure_of_values(group: Group, values: Iterable[int]) -> frozenset:
    """Closure of a possibly huge set of values via incremental adjoining.

    Values already inside the running subgroup are skipped, so the closure
    is recomputed only O(log |G|) times however many values come in.
    """
    sub = frozenset({group.identity})
    gens = []
    for v in values:
        if v not in sub:
            gens.append(v)
            sub = closure(group, gens)
    return sub


def commutator_subgroup(group: Group) -> frozenset:
    """Closure of all commutators a^-1 b^-1 a b."""
    _check_structure_cap(group)
    n = group.order
    mul_vec = vector_multiplier(group)
    if mul_vec is not None:
        everyone = np.arange(n, dtype=np.int64)
        inv_all = group.inv_array().astype(np.int64)
        seen = np.zeros(n, dtype=bool)
        for a in range(n):
            ia = np.full(n, group.inv(a), dtype=np.int64)
            left = mul_vec(ia, inv_all)
            right = mul_vec(np.full(n, a, dtype=np.int64), everyone)
            seen[mul_vec(left, right)] = True
        return _closure_of_values(group, np.flatnonzero(seen).tolist())
    mul, inv = group.mul, group.inv
    comms = set()
    for a in range(n):
        ia = inv(a)
        for b in range(n):
            comms.add(mul(mul(ia, inv(b)), mul(a, b)))
    comms.add(group.identity)
    return _closure_of_values(group, sorted(comms))


def quotient_group(group: Group, normal: Iterable[int], name: str) -> CayleyGroup:
    """Quotient by a normal subgroup, as a Cayley-table group.

    Coset ids are assigned in order of each coset's minimal element index,
    so the identity coset gets id 0.  The result carries `.projection`
    (element index -> coset id) and `.parent`.
    """
    sub = sorted(set(normal))
    n = group.order
    if n % len(sub) != 0:
        raise MalformedCayleyTableError(f"{name}: subgroup size {len(sub)} does not divide {n}")
    mul = group.mul
    proj = [-1] * n
    reps = []
    for g in range(n):
        if proj[g] != -1:
            continue
        cid = len(reps)
        reps.append(g)
        for k in sub:
            proj[mul(g, k)] = cid
    m = len(reps)
    rows = [[proj[mul(reps[i], reps[j])] for j in range(m)] for i in range(m)]
    q = CayleyGroup(rows, name=name, validate=False)
    q.projection = proj
    q.parent = group
    return q


def quotient_by_center(group: Group) -> CayleyGroup:
    z = center(group)
    return quotient_group(group, z, name=f"{group.name}/center")


def _element_order(group: Group, x: int) -> int:
    k = 1
    y = x
    while y != group.identity:
        y = group.mul(y, x)
        k += 1
    return k


def abelianization_invariants(group: Group) -> list:
    """Cyclic factors of G/[G,G], ascending, each dividing the next."""
    k = commutator_subgroup(group)
    ab = quotient_group(group, k, name=f"{group.name}/derived")
    n = ab.order
    if n == 1:
        return []
    orders = [_element_order(ab, x) for x in range(n)]
    # factor the group order
    primes = []
    m = n
    q = 2
    while q * q <= m:
        if m % q == 0:
            primes.append(q)
            while m % q == 0:
                m //= q
        q += 1
    if m > 1:
        primes.append(m)
    # per prime: lambda_k = number of cyclic p-factors with exponent >= k,
    # read off log_p #{x : x^{p^k} = e} for k = 0, 1, 2, ...
    per_prime_exponents = {}
    for p in primes:
        logs = [0]
        while True:
            pk = p ** len(logs)
            c = sum(1 for o in orders if pk % o == 0)
            # c is the size of a subgroup of a p-group, an exact power of p
            logc = 0
            while c > 1:
                c //= p
                logc += 1
            if logc == logs[-1]:
                break
            logs.append(logc)
        lambdas = [logs[i] - logs[i - 1] for i in range(1, len(logs))]
        # lambdas is nonincreasing; conjugate partition gives factor exponents
        exps = [sum(1 for lam in lambdas if lam >= i) for i in range(1, (lambdas[0] if lambdas else 0) + 1)]
        per_prime_exponents[p] = exps  # descending factor exponents
    r = max(len(v) for v in per_prime_exponents.values())
    factors = []
    for j in range(r):
        d = 1
        for p, exps in per_prime_exponents.items():
            if j < len(exps):
                d *= p ** exps[j]
        factors.append(d)
    factors.reverse()  # ascending, each divides the next
    return factors


def is_perfect(group: Group) -> bool:
    return len(commutator_subgroup(group)) == group.order

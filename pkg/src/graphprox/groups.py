"""Vertex groups: concrete kinds with computable arithmetic plus abstract
groups that only carry an order and three-valued property flags.

Three-valued flags use Python values True / False / None (None = unknown)
and serialize as "true" / "false" / "unknown". Kleene logic: False wins a
conjunction, True wins a disjunction, None otherwise.

Concrete elements are indices into a fixed enumeration per group, so element
order (and therefore every listing downstream) is deterministic:
  cyclic(n)     0..n-1                    named "0".."n-1"
  dihedral(n)   rotations r^0..r^(n-1), then reflections r^0 s..r^(n-1) s
  symmetric(n)  one-line permutations in lexicographic order, named "231"
  table         declaration order of the name list
"""
from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Sequence

from .errors import (
    ConsistencyError,
    InputError,
    UnsupportedOperationError,
    ValidationError,
)

__all__ = [
    "Tri",
    "tri_and",
    "tri_or",
    "tri_str",
    "parse_tri",
    "Facts",
    "Conventions",
    "GroupSpec",
    "Element",
    "cyclic",
    "dihedral",
    "symmetric",
    "table_group",
    "abstract",
    "build_group",
    "derive_facts",
    "identity",
    "compose",
    "inverse",
    "is_identity",
    "elements",
    "element_name",
    "parse_element",
]

Tri = bool | None

INFINITE = math.inf


def tri_and(*vals: Tri) -> Tri:
    """Kleene conjunction: any False -> False, else any None -> None."""
    if any(v is False for v in vals):
        return False
    if any(v is None for v in vals):
        return None
    return True


def tri_or(*vals: Tri) -> Tri:
    """Kleene disjunction: any True -> True, else any None -> None."""
    if any(v is True for v in vals):
        return True
    if any(v is None for v in vals):
        return None
    return False


def tri_str(v: Tri) -> str:
    return "unknown" if v is None else ("true" if v else "false")


def parse_tri(text: object) -> Tri:
    """Accepts "true"/"false"/"unknown" (any case) or real booleans/None."""
    if text is None or isinstance(text, bool):
        return text
    if isinstance(text, str):
        low = text.strip().lower()
        if low == "true":
            return True
        if low == "false":
            return False
        if low == "unknown":
            return None
    raise InputError(f"not a three-valued flag: {text!r} (want true/false/unknown)")


@dataclass(frozen=True)
class Facts:
    """Three-valued property record of a group."""

    properly_proximal: Tri = None
    amenable: Tri = None
    weakly_amenable_cstar1: Tri = None

    FIELDS = ("properly_proximal", "amenable", "weakly_amenable_cstar1")

    def to_dict(self) -> dict[str, str]:
        return {f: tri_str(getattr(self, f)) for f in self.FIELDS}


@dataclass(frozen=True)
class Conventions:
    """Tunable conventions; finite_groups_pp says whether finite groups count
    as properly proximal (the vacuous-boundary convention)."""

    finite_groups_pp: bool = True

    def to_dict(self) -> dict[str, bool]:
        return {"finite_groups_pp": self.finite_groups_pp}


@dataclass(frozen=True)
class GroupSpec:
    """One vertex group. order is an int for finite groups, math.inf otherwise.
    Concrete kinds (cyclic/dihedral/symmetric/table) have computable
    arithmetic; kind "abstract" only carries order and facts."""

    kind: str
    order: int | float
    facts: Facts = Facts()
    n: int | None = None
    names: tuple[str, ...] | None = None
    table: tuple[tuple[int, ...], ...] | None = None

    @property
    def concrete(self) -> bool:
        return self.kind != "abstract"

    @property
    def finite(self) -> bool:
        return self.order is not INFINITE

    def describe(self) -> str:
        if self.kind in ("cyclic", "dihedral", "symmetric"):
            return f"{self.kind}({self.n})"
        if self.kind == "table":
            return f"table(order {self.order})"
        ordtxt = "infinite" if not self.finite else str(self.order)
        return f"abstract(order {ordtxt})"


@dataclass(frozen=True)
class Element:
    """Element of a concrete group, as an index into its enumeration."""

    group: GroupSpec
    index: int

    def __repr__(self) -> str:
        return f"Element({self.group.describe()}, {element_name(self)!r})"


# ---------------------------------------------------------------------------
# constructors


def _merge_facts(base: Facts, override: Facts | None) -> Facts:
    if override is None:
        return base
    out = {}
    for f in Facts.FIELDS:
        b, o = getattr(base, f), getattr(override, f)
        if b is not None and o is not None and b != o:
            raise ConsistencyError(
                f"flag {f} = {tri_str(o)} contradicts the derived value {tri_str(b)}"
            )
        out[f] = b if o is None else o
    return Facts(**out)


def cyclic(n: int, facts: Facts | None = None) -> GroupSpec:
    if not isinstance(n, int) or n < 1:
        raise ValidationError(f"cyclic group needs an integer n >= 1, got {n!r}")
    base = Facts(amenable=True)  # finite groups are amenable
    return GroupSpec("cyclic", n, _merge_facts(base, facts), n=n)


def dihedral(n: int, facts: Facts | None = None) -> GroupSpec:
    """Dihedral group of order 2n (symmetries of the n-gon)."""
    if not isinstance(n, int) or n < 1:
        raise ValidationError(f"dihedral group needs an integer n >= 1, got {n!r}")
    base = Facts(amenable=True)
    return GroupSpec("dihedral", 2 * n, _merge_facts(base, facts), n=n)


def symmetric(n: int, facts: Facts | None = None) -> GroupSpec:
    if not isinstance(n, int) or n < 1:
        raise ValidationError(f"symmetric group needs an integer n >= 1, got {n!r}")
    if n > 8:
        raise ValidationError(f"symmetric({n}) is beyond desk scale (max n = 8)")
    base = Facts(amenable=True)
    return GroupSpec("symmetric", math.factorial(n), _merge_facts(base, facts), n=n)


def table_group(names: Sequence[str], table: Sequence[Sequence[int]],
                facts: Facts | None = None) -> GroupSpec:
    """Finite group from a Cayley table: table[i][j] is the index of
    names[i] * names[j]. Validates Latin-square shape, identity, inverses and
    associativity (exhaustive for order <= 64, sampled above)."""
    names_t = tuple(names)
    n = len(names_t)
    if n == 0:
        raise ValidationError("table group needs at least one element")
    if len(set(names_t)) != n:
        raise ValidationError("table group element names must be distinct")
    for nm in names_t:
        if not nm or any(c.isspace() for c in nm) or ":" in nm:
            raise ValidationError(
                f"element name {nm!r} must be non-empty without whitespace or ':'"
            )
    rows = tuple(tuple(row) for row in table)
    if len(rows) != n or any(len(r) != n for r in rows):
        raise ValidationError(f"table must be {n}x{n} to match the name list")
    full = set(range(n))
    for i, row in enumerate(rows):
        if set(row) != full:
            raise ValidationError(f"row {names_t[i]!r} is not a permutation of all elements")
    for j in range(n):
        if {rows[i][j] for i in range(n)} != full:
            raise ValidationError(f"column {names_t[j]!r} is not a permutation of all elements")
    ident = None
    for e in range(n):
        if all(rows[e][x] == x and rows[x][e] == x for x in range(n)):
            ident = e
            break
    if ident is None:
        raise ValidationError("table has no identity element")
    for x in range(n):
        if not any(rows[x][y] == ident and rows[y][x] == ident for y in range(n)):
            raise ValidationError(f"element {names_t[x]!r} has no inverse")
    if n <= 64:
        triples = itertools.product(range(n), repeat=3)
    else:
        rng = random.Random(0)
        triples = ((rng.randrange(n), rng.randrange(n), rng.randrange(n))
                   for _ in range(20000))
    for x, y, z in triples:
        if rows[rows[x][y]][z] != rows[x][rows[y][z]]:
            raise ValidationError(
                "associativity fails at "
                f"({names_t[x]!r}, {names_t[y]!r}, {names_t[z]!r})"
            )
    base = Facts(amenable=True)
    return GroupSpec("table", n, _merge_facts(base, facts), names=names_t, table=rows)


def abstract(order: int | float, facts: Facts | None = None) -> GroupSpec:
    if order is INFINITE or order == math.inf:
        ordv: int | float = INFINITE
    elif isinstance(order, int) and order >= 1:
        ordv = order
    else:
        raise ValidationError(f"abstract group order must be a positive integer or infinite, got {order!r}")
    base = Facts(amenable=True) if ordv is not INFINITE else Facts()
    return GroupSpec("abstract", ordv, _merge_facts(base, facts))


def build_group(descriptor: Mapping[str, object]) -> GroupSpec:
    """Build from a descriptor dict as used in spec files, e.g.
    {"kind": "cyclic", "n": 3} or
    {"kind": "abstract", "order": "infinite", "amenable": "true"}."""
    if not isinstance(descriptor, Mapping):
        raise InputError(f"group descriptor must be an object, got {type(descriptor).__name__}")
    kind = descriptor.get("kind")
    known = {"kind", "n", "names", "table", "order",
             "properly_proximal", "amenable", "weakly_amenable_cstar1"}
    extra = set(descriptor) - known
    if extra:
        raise InputError(f"unknown group descriptor field(s): {sorted(extra)}")
    facts = Facts(
        properly_proximal=parse_tri(descriptor.get("properly_proximal")),
        amenable=parse_tri(descriptor.get("amenable")),
        weakly_amenable_cstar1=parse_tri(descriptor.get("weakly_amenable_cstar1")),
    )
    if kind in ("cyclic", "dihedral", "symmetric"):
        n = descriptor.get("n")
        if not isinstance(n, int) or isinstance(n, bool):
            raise InputError(f"group kind {kind!r} needs an integer field 'n'")
        return {"cyclic": cyclic, "dihedral": dihedral, "symmetric": symmetric}[kind](n, facts)
    if kind == "table":
        names = descriptor.get("names")
        table = descriptor.get("table")
        if not isinstance(names, Sequence) or isinstance(names, str):
            raise InputError("table group needs a 'names' list")
        if not isinstance(table, Sequence):
            raise InputError("table group needs a 'table' list of rows")
        return table_group(list(names), [list(r) for r in table], facts)
    if kind == "abstract":
        order = descriptor.get("order")
        if order == "infinite":
            return abstract(INFINITE, facts)
        if isinstance(order, int) and not isinstance(order, bool):
            return abstract(order, facts)
        raise InputError("abstract group needs field 'order': \"infinite\" or a positive integer")
    raise InputError(f"unknown group kind {kind!r}")


def group_to_descriptor(spec: GroupSpec) -> dict[str, object]:
    """Inverse of build_group, used when echoing specs back over the wire."""
    out: dict[str, object] = {"kind": spec.kind}
    if spec.kind in ("cyclic", "dihedral", "symmetric"):
        out["n"] = spec.n
    elif spec.kind == "table":
        out["names"] = list(spec.names or ())
        out["table"] = [list(r) for r in (spec.table or ())]
    else:
        out["order"] = "infinite" if not spec.finite else int(spec.order)
    for f in Facts.FIELDS:
        v = getattr(spec.facts, f)
        if v is not None:
            out[f] = tri_str(v)
    return out


# ---------------------------------------------------------------------------
# fact closure


def derive_facts(spec: GroupSpec, config: Conventions = Conventions()) -> GroupSpec:
    """Close the fact record: finite order forces properly_proximal to the
    configured convention; amenable and infinite forces it to False. Idempotent
    and monotone (never turns a known flag unknown); contradictions raise."""
    facts = spec.facts
    forced: Tri = None
    why = ""
    if spec.finite:
        forced = config.finite_groups_pp
        why = f"finite groups count as properly_proximal={tri_str(forced)} by convention"
    elif facts.amenable is True:
        forced = False
        why = "infinite amenable groups are not properly proximal"
    if forced is not None:
        if facts.properly_proximal is not None and facts.properly_proximal != forced:
            raise ConsistencyError(
                f"properly_proximal={tri_str(facts.properly_proximal)} contradicts: {why}"
            )
        facts = replace(facts, properly_proximal=forced)
    if spec.finite and facts.amenable is False:
        raise ConsistencyError("a finite group cannot be flagged amenable=false")
    return replace(spec, facts=facts)


def facts_closed(spec: GroupSpec, config: Conventions = Conventions()) -> bool:
    return derive_facts(spec, config) == spec


# ---------------------------------------------------------------------------
# concrete arithmetic


class _Runtime:
    """Cached per-spec arithmetic: index-level compose/inverse plus naming."""

    def __init__(self, spec: GroupSpec):
        self.spec = spec
        kind = spec.kind
        if kind == "cyclic":
            n = spec.n
            self.order = n
            self.identity = 0
            self.compose = lambda a, b: (a + b) % n
            self.inverse = lambda a: (-a) % n
            self.name = lambda a: str(a)
            self._parse = self._parse_cyclic
        elif kind == "dihedral":
            n = spec.n
            self.order = 2 * n
            self.identity = 0
            self.compose = lambda a, b: self._dh_compose(n, a, b)
            self.inverse = lambda a: a if a >= n else (-a) % n
            self.name = lambda a: f"r^{a} s" if a >= n else f"r^{a}"
            self._parse = self._parse_dihedral
        elif kind == "symmetric":
            n = spec.n
            self.perms = tuple(sorted(itertools.permutations(range(1, n + 1))))
            self.perm_index = {p: i for i, p in enumerate(self.perms)}
            self.order = len(self.perms)
            self.identity = self.perm_index[tuple(range(1, n + 1))]
            self.compose = self._sym_compose
            self.inverse = self._sym_inverse
            self.name = self._sym_name
            self._parse = self._parse_symmetric
        elif kind == "table":
            rows = spec.table
            self.order = len(rows)
            ident = next(e for e in range(self.order)
                         if all(rows[e][x] == x for x in range(self.order)))
            self.identity = ident
            inv = [0] * self.order
            for x in range(self.order):
                inv[x] = next(y for y in range(self.order) if rows[x][y] == ident)
            self.compose = lambda a, b: rows[a][b]
            self.inverse = lambda a: inv[a]
            self.name = lambda a: spec.names[a]
            self.name_index = {nm: i for i, nm in enumerate(spec.names)}
            self._parse = self._parse_table
        else:
            raise UnsupportedOperationError(
                f"{spec.describe()} has no computable elements"
            )

    @staticmethod
    def _dh_compose(n: int, a: int, b: int) -> int:
        a1, f1 = a % n, a // n
        a2, f2 = b % n, b // n
        if f1 == 0:
            return (a1 + a2) % n + n * f2
        return (a1 - a2) % n + n * (1 - f2)

    def _sym_compose(self, a: int, b: int) -> int:
        pa, pb = self.perms[a], self.perms[b]
        return self.perm_index[tuple(pa[x - 1] for x in pb)]

    def _sym_inverse(self, a: int) -> int:
        p = self.perms[a]
        inv = [0] * len(p)
        for i, x in enumerate(p):
            inv[x - 1] = i + 1
        return self.perm_index[tuple(inv)]

    def _sym_name(self, a: int) -> str:
        p = self.perms[a]
        if len(p) <= 9:
            return "".join(str(x) for x in p)
        return ",".join(str(x) for x in p)

    def _parse_cyclic(self, text: str) -> int:
        try:
            v = int(text)
        except ValueError:
            raise InputError(f"not a cyclic({self.spec.n}) element: {text!r}") from None
        if not 0 <= v < self.order:
            raise InputError(f"cyclic({self.spec.n}) element out of range: {text!r}")
        return v

    def _parse_dihedral(self, text: str) -> int:
        n = self.spec.n
        t = text.strip()
        flip = 0
        if t.endswith("s"):
            flip = 1
            t = t[:-1].strip()
        if not t.startswith("r^"):
            raise InputError(f"not a dihedral({n}) element: {text!r} (want 'r^a' or 'r^a s')")
        try:
            a = int(t[2:])
        except ValueError:
            raise InputError(f"not a dihedral({n}) element: {text!r}") from None
        if not 0 <= a < n:
            raise InputError(f"dihedral({n}) rotation out of range: {text!r}")
        return a + n * flip

    def _parse_symmetric(self, text: str) -> int:
        n = self.spec.n
        t = text.strip()
        if "," in t:
            parts = t.split(",")
        else:
            parts = list(t)
        try:
            p = tuple(int(x) for x in parts)
        except ValueError:
            raise InputError(f"not a symmetric({n}) one-line permutation: {text!r}") from None
        if p not in self.perm_index:
            raise InputError(f"not a symmetric({n}) one-line permutation: {text!r}")
        return self.perm_index[p]

    def _parse_table(self, text: str) -> int:
        if text not in self.name_index:
            raise InputError(f"unknown element name {text!r}")
        return self.name_index[text]


_RUNTIMES: dict[GroupSpec, _Runtime] = {}


def _runtime(spec: GroupSpec) -> _Runtime:
    rt = _RUNTIMES.get(spec)
    if rt is None:
        if not spec.concrete:
            raise UnsupportedOperationError(
                f"operation needs computable elements but the group is {spec.describe()}"
            )
        rt = _Runtime(spec)
        _RUNTIMES[spec] = rt
    return rt


def identity(spec: GroupSpec) -> Element:
    return Element(spec, _runtime(spec).identity)


def compose(a: Element, b: Element) -> Element:
    if a.group != b.group:
        raise InputError(
            f"cannot compose elements of {a.group.describe()} and {b.group.describe()}"
        )
    return Element(a.group, _runtime(a.group).compose(a.index, b.index))


def inverse(a: Element) -> Element:
    return Element(a.group, _runtime(a.group).inverse(a.index))


def is_identity(a: Element) -> bool:
    return a.index == _runtime(a.group).identity


def elements(spec: GroupSpec) -> list[Element]:
    """All elements in the deterministic enumeration order."""
    rt = _runtime(spec)
    return [Element(spec, i) for i in range(rt.order)]


def element_name(a: Element) -> str:
    return _runtime(a.group).name(a.index)


def parse_element(spec: GroupSpec, text: str) -> Element:
    return Element(spec, _runtime(spec)._parse(text))

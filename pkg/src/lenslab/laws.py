"""The eleven lens laws and their decision procedure over finite carriers.

A lens is a pair ``get: S -> V`` and ``put: S x V -> S``.  Every law is
decided by evaluating its quantified formula over the full carriers, and a
failing law is reported as a :class:`ViolationWitness` that can be replayed
with :func:`verify_witness`.

The quantifier evaluator is shared with :mod:`lenslab.gallery`, which runs
the same formulas over windows of the integers instead of ``range(n)``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Mapping, Sequence

from .errors import CarrierMismatch, InvalidLens


class Family(enum.Enum):
    GETPUT = "GetPut"
    PUTGET = "PutGet"
    PUTPUT = "PutPut"


class Law(enum.Enum):
    """A lens law.  Declaration order is the canonical order everywhere."""

    SG = ("StrongGetPut", "∀s,s′: put(s, get(s′)) = s′", ("s", "s'"))
    GP = ("GetPut", "∀s: put(s, get(s)) = s", ("s",))
    PG = ("PutGet", "∀s,v: get(put(s, v)) = v", ("s", "v"))
    PP = ("PutPut", "∀s,v,v′: put(put(s, v), v′) = put(s, v′)", ("s", "v", "v'"))
    WP = ("WeakPutGet", "∀s,v: put(s, get(put(s, v))) = put(s, v)", ("s", "v"))
    UD = ("Undoability", "∀s,v: put(put(s, v), get(s)) = s", ("s", "v"))
    PT = ("PutTwice", "∀s,v: put(put(s, v), v) = put(s, v)", ("s", "v"))
    SS = ("SourceStability", "∀s ∃v: put(s, v) = s", ("s",))
    PS = ("PutSurjectivity", "∀s ∃s′,v: put(s′, v) = s", ("s",))
    VD = (
        "ViewDetermination",
        "∀s,s′,v,v′: put(s, v) = put(s′, v′) ⇒ v = v′",
        ("s", "s'", "v", "v'"),
    )
    PI = ("PutInjectivity", "∀s,v,v′: put(s, v) = put(s, v′) ⇒ v = v′", ("s", "v", "v'"))

    def __init__(self, long_name: str, equation: str, variables: tuple[str, ...]) -> None:
        self.long_name = long_name
        self.equation = equation
        self.variables = variables

    @property
    def index(self) -> int:
        return _ORDER[self]

    @property
    def bit(self) -> int:
        return 1 << _ORDER[self]

    @property
    def families(self) -> frozenset[Family]:
        return _FAMILIES[self]

    @property
    def put_only(self) -> bool:
        return self in PUT_ONLY

    @property
    def existential(self) -> bool:
        return self in (Law.SS, Law.PS)

    @property
    def conditional(self) -> bool:
        return self in (Law.VD, Law.PI)

    @classmethod
    def parse(cls, name: str) -> "Law":
        try:
            return cls[name.strip().upper()]
        except KeyError:
            raise ValueError(f"unknown law name {name!r}") from None

    def __lt__(self, other: "Law") -> bool:
        if not isinstance(other, Law):
            return NotImplemented
        return self.index < other.index

    def __repr__(self) -> str:
        return f"Law.{self.name}"


ALL_LAWS: tuple[Law, ...] = tuple(Law)
_ORDER = {law: i for i, law in enumerate(ALL_LAWS)}
PUT_ONLY = frozenset({Law.PP, Law.PT, Law.SS, Law.PS, Law.VD, Law.PI})
GET_LAWS = tuple(law for law in ALL_LAWS if law not in PUT_ONLY)
PUT_LAWS = tuple(law for law in ALL_LAWS if law in PUT_ONLY)

_FAMILIES = {
    **{law: frozenset({Family.GETPUT}) for law in (Law.SG, Law.GP, Law.UD, Law.SS, Law.PS)},
    **{law: frozenset({Family.PUTGET}) for law in (Law.PG, Law.VD, Law.PI)},
    **{law: frozenset({Family.PUTPUT}) for law in (Law.PP, Law.PT)},
    Law.WP: frozenset({Family.GETPUT, Family.PUTGET}),
}

LawSet = frozenset  # frozenset[Law]


def law_set(laws: Iterable[Law | str]) -> frozenset[Law]:
    return frozenset(law if isinstance(law, Law) else Law.parse(law) for law in laws)


def sorted_laws(laws: Iterable[Law]) -> list[Law]:
    return sorted(laws, key=lambda law: law.index)


def format_laws(laws: Iterable[Law]) -> str:
    return "{" + ", ".join(law.name for law in sorted_laws(laws)) + "}"


def to_mask(laws: Iterable[Law]) -> int:
    mask = 0
    for law in laws:
        mask |= law.bit
    return mask


def from_mask(mask: int) -> frozenset[Law]:
    return frozenset(law for law in ALL_LAWS if mask & law.bit)


@dataclass(frozen=True)
class FiniteLens:
    """A lens tabulated over ``S = range(s_size)`` and ``V = range(v_size)``.

    ``get`` is ``None`` for a put-only lens, which can only be checked
    against put-only laws.
    """

    s_size: int
    v_size: int
    get: tuple[int, ...] | None
    put: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        n, m = self.s_size, self.v_size
        if not isinstance(n, int) or n < 1:
            raise InvalidLens(f"s_size must be a positive integer, got {n!r}")
        if not isinstance(m, int) or m < 1:
            raise InvalidLens(f"v_size must be a positive integer, got {m!r}")
        if self.get is not None:
            object.__setattr__(self, "get", tuple(self.get))
            if len(self.get) != n:
                raise InvalidLens(f"get has {len(self.get)} entries, expected s_size={n}")
            for s, v in enumerate(self.get):
                if not _is_index(v, m):
                    raise InvalidLens(f"get[{s}] = {v!r} is not a view index in [0, {m})")
        object.__setattr__(self, "put", tuple(tuple(row) for row in self.put))
        if len(self.put) != n:
            raise InvalidLens(f"put has {len(self.put)} rows, expected s_size={n}")
        for s, row in enumerate(self.put):
            if len(row) != m:
                raise InvalidLens(f"put[{s}] has {len(row)} entries, expected v_size={m}")
            for v, t in enumerate(row):
                if not _is_index(t, n):
                    raise InvalidLens(f"put[{s}][{v}] = {t!r} is not a source index in [0, {n})")

    @property
    def put_only(self) -> bool:
        return self.get is None

    def without_get(self) -> "FiniteLens":
        return FiniteLens(self.s_size, self.v_size, None, self.put)

    def to_dict(self) -> dict[str, Any]:
        doc: dict[str, Any] = {"s_size": self.s_size, "v_size": self.v_size}
        if self.get is not None:
            doc["get"] = list(self.get)
        doc["put"] = [list(row) for row in self.put]
        return doc

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> "FiniteLens":
        if not isinstance(doc, Mapping):
            raise InvalidLens("lens document must be a mapping")
        unknown = set(doc) - {"s_size", "v_size", "get", "put"}
        if unknown:
            raise InvalidLens(f"unknown keys in lens document: {sorted(unknown)}")
        for key in ("s_size", "v_size", "put"):
            if key not in doc:
                raise InvalidLens(f"lens document is missing {key!r}")
        get = doc.get("get")
        put = doc["put"]
        if get is not None and not isinstance(get, (list, tuple)):
            raise InvalidLens("get must be an array")
        if not isinstance(put, (list, tuple)) or not all(isinstance(r, (list, tuple)) for r in put):
            raise InvalidLens("put must be an array of arrays")
        return cls(doc["s_size"], doc["v_size"], get, put)

    def __str__(self) -> str:
        get = "-" if self.get is None else list(self.get)
        return f"FiniteLens(n={self.s_size}, m={self.v_size}, get={get}, put={[list(r) for r in self.put]})"


def _is_index(x: Any, bound: int) -> bool:
    return isinstance(x, int) and not isinstance(x, bool) and 0 <= x < bound


@dataclass(frozen=True)
class ViolationWitness:
    """A concrete failing instance of ``law``.

    ``binding`` names the law's quantified variables.  For equational laws
    ``lhs != rhs`` are the two sides; for VD/PI they are the two views that
    the consequent wrongly equates; for SS/PS both are ``None`` and the
    binding holds only the source whose existential search came up empty.
    """

    law: Law
    binding: Mapping[str, Any] = field(hash=False)
    lhs: Any = None
    rhs: Any = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "law": self.law.name,
            "binding": {k: _jsonable(v) for k, v in self.binding.items()},
            "lhs": _jsonable(self.lhs),
            "rhs": _jsonable(self.rhs),
        }

    def __str__(self) -> str:
        binding = ", ".join(f"{k}={v}" for k, v in self.binding.items())
        if self.law.existential:
            return f"{self.law.name} fails at {{{binding}}}: existential has no solution"
        return f"{self.law.name} fails at {{{binding}}}: {self.lhs} != {self.rhs}"


def _jsonable(x: Any) -> Any:
    return list(x) if isinstance(x, tuple) else x


Getter = Callable[[Any], Any]
Putter = Callable[[Any, Any], Any]


def find_violation(
    law: Law,
    get: Getter | None,
    put: Putter,
    sources: Sequence[Any],
    views: Sequence[Any],
) -> ViolationWitness | None:
    """Return the first violating binding of ``law`` in iteration order.

    Variables are nested in the order ``s, s', v, v'`` (outermost first),
    each ranging over ``sources`` / ``views`` in the order given, so the
    result is the lexicographically least witness under that order.
    """
    if get is None and not law.put_only:
        raise CarrierMismatch(f"law {law.name} needs get, but the lens is put-only")
    S, V = sources, views

    if law is Law.SG:
        for s in S:
            for s2 in S:
                lhs = put(s, get(s2))
                if lhs != s2:
                    return ViolationWitness(law, {"s": s, "s'": s2}, lhs, s2)
    elif law is Law.GP:
        for s in S:
            lhs = put(s, get(s))
            if lhs != s:
                return ViolationWitness(law, {"s": s}, lhs, s)
    elif law is Law.PG:
        for s in S:
            for v in V:
                lhs = get(put(s, v))
                if lhs != v:
                    return ViolationWitness(law, {"s": s, "v": v}, lhs, v)
    elif law is Law.PP:
        for s in S:
            for v in V:
                t = put(s, v)
                for v2 in V:
                    lhs, rhs = put(t, v2), put(s, v2)
                    if lhs != rhs:
                        return ViolationWitness(law, {"s": s, "v": v, "v'": v2}, lhs, rhs)
    elif law is Law.WP:
        for s in S:
            for v in V:
                rhs = put(s, v)
                lhs = put(s, get(rhs))
                if lhs != rhs:
                    return ViolationWitness(law, {"s": s, "v": v}, lhs, rhs)
    elif law is Law.UD:
        for s in S:
            g = get(s)
            for v in V:
                lhs = put(put(s, v), g)
                if lhs != s:
                    return ViolationWitness(law, {"s": s, "v": v}, lhs, s)
    elif law is Law.PT:
        for s in S:
            for v in V:
                rhs = put(s, v)
                lhs = put(rhs, v)
                if lhs != rhs:
                    return ViolationWitness(law, {"s": s, "v": v}, lhs, rhs)
    elif law is Law.SS:
        for s in S:
            if not any(put(s, v) == s for v in V):
                return ViolationWitness(law, {"s": s})
    elif law is Law.PS:
        image = {put(s2, v) for s2 in S for v in V}
        for s in S:
            if s not in image:
                return ViolationWitness(law, {"s": s})
    elif law is Law.VD:
        table = {(s, v): put(s, v) for s in S for v in V}
        views_of: dict[Any, set] = {}
        for (_, v), t in table.items():
            views_of.setdefault(t, set()).add(v)
        if all(len(vs) == 1 for vs in views_of.values()):
            return None
        for s in S:
            for s2 in S:
                for v in V:
                    t = table[s, v]
                    if len(views_of[t]) == 1:
                        continue
                    for v2 in V:
                        if v != v2 and table[s2, v2] == t:
                            return ViolationWitness(law, {"s": s, "s'": s2, "v": v, "v'": v2}, v, v2)
    elif law is Law.PI:
        for s in S:
            row = [put(s, v) for v in V]
            for i, v in enumerate(V):
                for j, v2 in enumerate(V):
                    if i != j and row[i] == row[j]:
                        return ViolationWitness(law, {"s": s, "v": v, "v'": v2}, v, v2)
    return None


def replay_violation(
    witness: ViolationWitness,
    get: Getter | None,
    put: Putter,
    sources: Sequence[Any],
    views: Sequence[Any],
) -> bool:
    """Re-evaluate ``witness.law`` at ``witness.binding`` and confirm it fails.

    The existential searches of SS/PS range over ``sources`` / ``views``.
    """
    law, b = witness.law, witness.binding
    if set(b) != set(law.variables):
        return False
    if get is None and not law.put_only:
        raise CarrierMismatch(f"law {law.name} needs get, but the lens is put-only")
    s, s2, v, v2 = b.get("s"), b.get("s'"), b.get("v"), b.get("v'")

    if law is Law.SS:
        return not any(put(s, u) == s for u in views)
    if law is Law.PS:
        return not any(put(t, u) == s for t in sources for u in views)
    if law is Law.VD:
        violated = put(s, v) == put(s2, v2) and v != v2
        return violated and (witness.lhs, witness.rhs) == (v, v2)
    if law is Law.PI:
        violated = put(s, v) == put(s, v2) and v != v2
        return violated and (witness.lhs, witness.rhs) == (v, v2)

    if law is Law.SG:
        lhs, rhs = put(s, get(s2)), s2
    elif law is Law.GP:
        lhs, rhs = put(s, get(s)), s
    elif law is Law.PG:
        lhs, rhs = get(put(s, v)), v
    elif law is Law.PP:
        lhs, rhs = put(put(s, v), v2), put(s, v2)
    elif law is Law.WP:
        rhs = put(s, v)
        lhs = put(s, get(rhs))
    elif law is Law.UD:
        lhs, rhs = put(put(s, v), get(s)), s
    else:  # Law.PT
        rhs = put(s, v)
        lhs = put(rhs, v)
    return lhs != rhs and (witness.lhs, witness.rhs) == (lhs, rhs)


def _lens_functions(lens: FiniteLens) -> tuple[Getter | None, Putter]:
    put_table = lens.put
    g = lens.get
    get = None if g is None else g.__getitem__
    return get, (lambda s, v: put_table[s][v])


def check_law(lens: FiniteLens, law: Law) -> ViolationWitness | None:
    """Decide ``law`` on ``lens``: ``None`` if it holds, else the least witness."""
    if lens.get is None and not law.put_only:
        raise CarrierMismatch(f"law {law.name} needs get, but the lens is put-only")
    get, put = _lens_functions(lens)
    return find_violation(law, get, put, range(lens.s_size), range(lens.v_size))


def law_profile(lens: FiniteLens) -> frozenset[Law]:
    laws = PUT_LAWS if lens.get is None else ALL_LAWS
    return frozenset(law for law in laws if check_law(lens, law) is None)


def verify_witness(lens: FiniteLens, witness: ViolationWitness) -> bool:
    """True iff replaying ``witness`` on ``lens`` reproduces the violation."""
    for name, value in witness.binding.items():
        bound = lens.v_size if name.startswith("v") else lens.s_size
        if not _is_index(value, bound):
            raise CarrierMismatch(f"binding {name}={value!r} lies outside the carrier [0, {bound})")
    get, put = _lens_functions(lens)
    return replay_violation(witness, get, put, range(lens.s_size), range(lens.v_size))

"""Integer example lenses and window-bounded checks of their claimed laws.

Each entry is an exact function on Python integers (unbounded, so
``2**abs(s)`` never overflows).  :func:`gallery_check` quantifies over the
window ``[-N, N]`` visited in magnitude order ``0, 1, -1, 2, -2, ...``, so
reported witnesses are the smallest in absolute value.

A witness for a universal law is a genuine refutation over the integers.
Absence of a witness is only evidence, so claimed-holds laws are reported as
``consistent`` rather than ``holds``.  SS and PS are existential: their
witnesses are refutations of the search within the window and carry
``bounded=True``.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Any, Callable

from .errors import UnknownEntry, WindowTooSmall
from .laws import (
    ALL_LAWS,
    Law,
    ViolationWitness,
    find_violation,
    replay_violation,
    sorted_laws,
)

DEFAULT_WINDOW = 16


def floor_div(a: int, b: int) -> int:
    """The largest integer ``k`` with ``k <= a / b``, for ``b > 0``."""
    if b <= 0:
        raise ValueError("divisor must be positive")
    return a // b


def magnitude_order(n: int) -> list[int]:
    """``[0, 1, -1, 2, -2, ..., n, -n]``"""
    out = [0]
    for k in range(1, n + 1):
        out += [k, -k]
    return out


@dataclass(frozen=True)
class GalleryEntry:
    name: str
    get: Callable[[int], Any] | None
    put: Callable[[int, Any], int]
    claimed_holds: frozenset[Law]
    claimed_fails: frozenset[Law]
    source_note: str
    pair_views: bool = False
    formula: str = ""

    def __post_init__(self) -> None:
        assert not (self.claimed_holds & self.claimed_fails), self.name
        if self.get is None:
            assert all(law.put_only for law in self.claimed_holds | self.claimed_fails), self.name

    @property
    def claimed(self) -> list[Law]:
        return sorted_laws(self.claimed_holds | self.claimed_fails)

    def carriers(self, window: int) -> tuple[list[int], list[Any]]:
        sources = magnitude_order(window)
        views: list[Any] = list(itertools.product(sources, sources)) if self.pair_views else sources
        return sources, views


def _laws(*names: str) -> frozenset[Law]:
    return frozenset(Law[n] for n in names)


_d = floor_div

_ENTRIES: tuple[GalleryEntry, ...] = (
    GalleryEntry(
        "sg_double",
        lambda s: 2 * s,
        lambda s, v: _d(v, 2),
        _laws("SG"),
        _laws(),
        "GetPut family, StrongGetPut example over Z",
        formula="get(s) = 2s, put(s, v) = floor(v/2)",
    ),
    GalleryEntry(
        "gp_diff",
        lambda s: 2 * s,
        lambda s, v: v - s,
        _laws("GP"),
        _laws("SG"),
        "GetPut family, GetPut example that is not StrongGetPut",
        formula="get(s) = 2s, put(s, v) = v - s",
    ),
    GalleryEntry(
        "wp_pair",
        lambda s: (s, s),
        lambda s, v: v[0],
        _laws("WP"),
        _laws("PG"),
        "WeakPutGet example with V = Z x Z; breaks PutGet whenever v1 != v2",
        pair_views=True,
        formula="get(s) = (s, s), put(s, (v1, v2)) = v1",
    ),
    GalleryEntry(
        "ud_parity",
        lambda s: _d(s, 2),
        lambda s, v: 2 * v - s + 1 + 2 * _d(s, 2),
        _laws("UD"),
        _laws(),
        "GetPut family, Undoability example",
        formula="get(s) = floor(s/2), put(s, v) = 2v - s + 1 + 2 floor(s/2)",
    ),
    GalleryEntry(
        "ss_affine",
        None,
        lambda s, v: (v - s + 1) * v,
        _laws("SS"),
        _laws(),
        "SourceStability example (v = s is stable); not PutTwice: "
        "put(0, 2) = 6 but put(6, 2) = -6",
        formula="put(s, v) = (v - s + 1) v",
    ),
    GalleryEntry(
        "ps_linear",
        None,
        lambda s, v: 2 * s - 3 * v,
        _laws("PS"),
        _laws("SS"),
        "PutSurjectivity example that is not SourceStability (s = 1 needs v = 1/3)",
        formula="put(s, v) = 2s - 3v",
    ),
    GalleryEntry(
        "pg_halve",
        lambda s: _d(s, 2),
        lambda s, v: 2 * v,
        _laws("PG"),
        _laws(),
        "PutGet family, PutGet example",
        formula="get(s) = floor(s/2), put(s, v) = 2v",
    ),
    GalleryEntry(
        "vd_pow",
        None,
        lambda s, v: 2 ** abs(s) * (2 * v - 1),
        _laws("VD"),
        _laws(),
        "PutGet family, ViewDetermination example (odd part recovers v)",
        formula="put(s, v) = 2^|s| (2v - 1)",
    ),
    GalleryEntry(
        "pi_pow",
        None,
        lambda s, v: 2 ** abs(s) * v,
        _laws("PI"),
        _laws("VD"),
        "PutGet family, PutInjectivity example that is not ViewDetermination",
        formula="put(s, v) = 2^|s| v",
    ),
    GalleryEntry(
        "pp_floor",
        None,
        lambda s, v: 2 * _d(s, 2) - 2 * _d(v, 2) + v,
        _laws("PP"),
        _laws(),
        "PutPut family, PutPut example",
        formula="put(s, v) = 2 floor(s/2) - 2 floor(v/2) + v",
    ),
    GalleryEntry(
        "pt_floor",
        None,
        lambda s, v: 2 * _d(s - v, 2) + v,
        _laws("PT"),
        _laws("PP"),
        "PutPut family, PutTwice example that is not PutPut",
        formula="put(s, v) = 2 floor((s - v)/2) + v",
    ),
    GalleryEntry(
        "identity",
        lambda s: s,
        lambda s, v: v,
        frozenset(ALL_LAWS),
        _laws(),
        "identity lens; every law reduces to reflexivity",
        formula="get(s) = s, put(s, v) = v",
    ),
)

_BY_NAME = {entry.name: entry for entry in _ENTRIES}


def list_gallery() -> list[GalleryEntry]:
    return list(_ENTRIES)


def get_entry(name: str) -> GalleryEntry:
    try:
        return _BY_NAME[name]
    except KeyError:
        raise UnknownEntry(f"unknown gallery entry {name!r}; choose from {', '.join(_BY_NAME)}") from None


class Status(enum.Enum):
    CONSISTENT = "consistent"      # claimed to hold, no violation in the window
    REFUTED = "refuted"            # claimed to fail, witness found
    CONTRADICTED = "contradicted"  # claimed to hold, but a witness was found


@dataclass(frozen=True)
class LawVerdict:
    law: Law
    claimed_holds: bool
    status: Status
    witness: ViolationWitness | None = None

    @property
    def bounded(self) -> bool:
        """The witness refutes an existential only within the window."""
        return self.witness is not None and self.law.existential


@dataclass(frozen=True)
class WindowReport:
    entry: str
    window: int
    verdicts: tuple[LawVerdict, ...] = field(default=())

    @property
    def conforms(self) -> bool:
        return all(v.status is not Status.CONTRADICTED for v in self.verdicts)

    def verdict(self, law: Law) -> LawVerdict:
        for v in self.verdicts:
            if v.law is law:
                return v
        raise KeyError(law)

    def to_dict(self) -> dict[str, Any]:
        return {
            "entry": self.entry,
            "window": self.window,
            "conforms": self.conforms,
            "verdicts": [
                {
                    "law": v.law.name,
                    "claim": "holds" if v.claimed_holds else "fails",
                    "status": v.status.value,
                    "bounded": v.bounded,
                    "witness": None if v.witness is None else v.witness.to_dict(),
                }
                for v in self.verdicts
            ],
        }


def gallery_check(name: str, window: int = DEFAULT_WINDOW) -> WindowReport:
    """Check every claimed law of the named entry over ``[-window, window]``.

    Raises :class:`WindowTooSmall` if a claimed failure has no witness in the
    window.
    """
    entry = get_entry(name)
    if not isinstance(window, int) or window < 1:
        raise ValueError(f"window must be a positive integer, got {window!r}")
    sources, views = entry.carriers(window)
    verdicts = []
    for law in entry.claimed:
        witness = find_violation(law, entry.get, entry.put, sources, views)
        holds = law in entry.claimed_holds
        if holds:
            status = Status.CONSISTENT if witness is None else Status.CONTRADICTED
        elif witness is None:
            raise WindowTooSmall(
                f"{name}: claimed failure of {law.name} has no witness in [-{window}, {window}]"
            )
        else:
            status = Status.REFUTED
        verdicts.append(LawVerdict(law, holds, status, witness))
    return WindowReport(name, window, tuple(verdicts))


def replay_gallery_witness(name: str, witness: ViolationWitness, window: int = DEFAULT_WINDOW) -> bool:
    """Re-evaluate a gallery witness with exact arithmetic.

    Only the existential laws consult ``window``; universal witnesses are
    replayed pointwise at their binding.
    """
    entry = get_entry(name)
    sources, views = entry.carriers(window)
    return replay_violation(witness, entry.get, entry.put, sources, views)

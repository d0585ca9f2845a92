"""Exhaustive and sampled search over finite lens spaces.

Lenses over ``(n, m)`` are indexed by ``(get_code, put_code)``: the get table
is the base-``m`` digits of ``get_code`` (digit ``s`` is ``get[s]``, least
significant first) and the put table the base-``n`` digits of ``put_code`` in
row-major ``(s, v)`` order.  The flat index ``get_code * n**(n*m) + put_code``
is the enumeration order, and every "first" result below is the minimum flat
index.

Law profiles of whole spaces are computed with numpy as bitmasks (bit ``i``
is ``ALL_LAWS[i]``).  Spaces can be split by get code across worker
processes; slices are concatenated in index order, so results do not depend
on the number of workers.
"""

from __future__ import annotations

import functools
import itertools
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Iterable, Iterator

import numpy as np

from .errors import BudgetExceeded
from .implication import ImplicationRule, ProofChain, derivable, rule_database
from .laws import (
    ALL_LAWS,
    FiniteLens,
    Law,
    ViolationWitness,
    check_law,
    format_laws,
    from_mask,
    law_set,
    sorted_laws,
    to_mask,
)

DEFAULT_BUDGET = 10**7
DEFAULT_MAX_N = 3
DEFAULT_MAX_V = 3


def space_size(n: int, m: int) -> int:
    return m**n * n ** (n * m)


@dataclass(frozen=True, order=True)
class LensIndex:
    s_size: int
    v_size: int
    get_code: int
    put_code: int

    def __post_init__(self) -> None:
        n, m = self.s_size, self.v_size
        if n < 1 or m < 1:
            raise ValueError("carrier sizes must be positive")
        if not 0 <= self.get_code < m**n:
            raise ValueError(f"get_code {self.get_code} out of range for ({n}, {m})")
        if not 0 <= self.put_code < n ** (n * m):
            raise ValueError(f"put_code {self.put_code} out of range for ({n}, {m})")

    @property
    def flat(self) -> int:
        return self.get_code * self.s_size ** (self.s_size * self.v_size) + self.put_code

    @classmethod
    def from_flat(cls, n: int, m: int, flat: int) -> "LensIndex":
        get_code, put_code = divmod(flat, n ** (n * m))
        return cls(n, m, get_code, put_code)

    def decode(self) -> FiniteLens:
        n, m = self.s_size, self.v_size
        get = _int_digits(self.get_code, m, n)
        flat = _int_digits(self.put_code, n, n * m)
        put = [flat[s * m:(s + 1) * m] for s in range(n)]
        return FiniteLens(n, m, get, put)

    @classmethod
    def encode(cls, lens: FiniteLens) -> "LensIndex":
        if lens.get is None:
            raise ValueError("only lenses with a get table are indexed")
        n, m = lens.s_size, lens.v_size
        get_code = sum(g * m**s for s, g in enumerate(lens.get))
        put_code = sum(t * n ** (s * m + v) for s, row in enumerate(lens.put) for v, t in enumerate(row))
        return cls(n, m, get_code, put_code)


def _int_digits(code: int, base: int, width: int) -> list[int]:
    out = []
    for _ in range(width):
        code, d = divmod(code, base)
        out.append(d)
    return out


def _check_budget(count: int, budget: int, what: str, searched=None) -> None:
    if count > budget:
        raise BudgetExceeded(f"{what} needs {count} lenses, budget is {budget}", searched)


def enumerate_lenses(n: int, m: int, budget: int = DEFAULT_BUDGET) -> Iterator[FiniteLens]:
    """Yield every lens over ``(n, m)`` once, in ``(get_code, put_code)`` order."""
    if n < 1 or m < 1:
        raise ValueError("carrier sizes must be positive")
    _check_budget(space_size(n, m), budget, f"space ({n}, {m})")
    for get_code in range(m**n):
        for put_code in range(n ** (n * m)):
            yield LensIndex(n, m, get_code, put_code).decode()


def scan_order(max_n: int, max_m: int) -> list[tuple[int, int]]:
    """All ``(n, m)`` up to the bounds, smallest ``n*m`` first, then smallest ``n``."""
    pairs = itertools.product(range(1, max_n + 1), range(1, max_m + 1))
    return sorted(pairs, key=lambda p: (p[0] * p[1], p[0]))


# -- vectorised law evaluation -------------------------------------------------

def _digit_table(count: int, base: int, width: int) -> np.ndarray:
    codes = np.arange(count, dtype=np.int64)[:, None]
    powers = base ** np.arange(width, dtype=np.int64)[None, :]
    return ((codes // powers) % base).astype(np.intp)


def put_only_masks(puts: np.ndarray) -> np.ndarray:
    """Profile bits of the put-only laws for a batch of put tables ``(B, n, m)``."""
    B, n, m = puts.shape
    b = np.arange(B)[:, None, None]
    vs = np.arange(m)
    ss = np.arange(n)
    once = puts                                     # put(s, v)
    out = np.zeros(B, dtype=np.uint16)

    twice = puts[b[..., None], once[..., None], vs]  # put(put(s, v), v')
    pp = (twice == puts[:, :, None, :]).all(axis=(1, 2, 3))
    pt = (puts[b, once, vs[None, None, :]] == once).all(axis=(1, 2))
    ss_ = (puts == ss[None, :, None]).any(axis=2).all(axis=1)
    flat = puts.reshape(B, n * m)
    ps = (flat[:, :, None] == ss[None, None, :]).any(axis=1).all(axis=1)
    view_of = np.tile(vs, n)
    distinct_views = view_of[:, None] != view_of[None, :]
    vd = ~((flat[:, :, None] == flat[:, None, :]) & distinct_views).any(axis=(1, 2))
    off_diag = ~np.eye(m, dtype=bool)
    pi = ~((puts[:, :, :, None] == puts[:, :, None, :]) & off_diag).any(axis=(1, 2, 3))

    for law, bits in ((Law.PP, pp), (Law.PT, pt), (Law.SS, ss_), (Law.PS, ps), (Law.VD, vd), (Law.PI, pi)):
        out |= np.where(bits, np.uint16(law.bit), np.uint16(0))
    return out


def get_masks(gets: np.ndarray, puts: np.ndarray) -> np.ndarray:
    """Profile bits of the get-involving laws for ``gets (B, n)``, ``puts (B, n, m)``."""
    B, n, m = puts.shape
    b2 = np.arange(B)[:, None]
    b3 = b2[..., None]
    ss = np.arange(n)
    vs = np.arange(m)
    out = np.zeros(B, dtype=np.uint16)

    sg = (puts[b3, ss[None, :, None], gets[:, None, :]] == ss[None, None, :]).all(axis=(1, 2))
    own = puts[b2, ss[None, :], gets]               # put(s, get(s))
    gp = (own == ss[None, :]).all(axis=1)
    once = puts                                     # put(s, v)
    view = gets[b3, once]                           # get(put(s, v))
    pg = (view == vs[None, None, :]).all(axis=(1, 2))
    wp = (puts[b3, ss[None, :, None], view] == once).all(axis=(1, 2))
    ud = (puts[b3, once, gets[:, :, None]] == ss[None, :, None]).all(axis=(1, 2))

    for law, bits in ((Law.SG, sg), (Law.GP, gp), (Law.PG, pg), (Law.WP, wp), (Law.UD, ud)):
        out |= np.where(bits, np.uint16(law.bit), np.uint16(0))
    return out


def batch_masks(gets: np.ndarray, puts: np.ndarray, chunk: int = 1 << 15) -> np.ndarray:
    """Full 11-law profile masks for arbitrary batches of lens tables."""
    out = np.empty(len(puts), dtype=np.uint16)
    for lo in range(0, len(puts), chunk):
        g, p = gets[lo:lo + chunk], puts[lo:lo + chunk]
        out[lo:lo + chunk] = put_only_masks(p) | get_masks(g, p)
    return out


@functools.lru_cache(maxsize=None)
def _space_tables(n: int, m: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    gets = _digit_table(m**n, m, n)
    puts = _digit_table(n ** (n * m), n, n * m).reshape(-1, n, m)
    put_bits = np.concatenate([put_only_masks(puts[i:i + 8192]) for i in range(0, len(puts), 8192)])
    return gets, puts, put_bits


def _masks_for_get_codes(n: int, m: int, lo: int, hi: int) -> np.ndarray:
    gets, puts, put_bits = _space_tables(n, m)
    K = len(puts)
    out = np.empty((hi - lo) * K, dtype=np.uint16)
    for j in range(lo, hi):
        g = np.broadcast_to(gets[j], (K, n))
        out[(j - lo) * K:(j - lo + 1) * K] = put_bits | get_masks(g, puts)
    return out


def _partitions(total: int, parts: int) -> list[tuple[int, int]]:
    parts = max(1, min(parts, total))
    bounds = [total * i // parts for i in range(parts + 1)]
    return [(bounds[i], bounds[i + 1]) for i in range(parts)]


_MASK_CACHE: dict[tuple[int, int], np.ndarray] = {}


def space_masks(n: int, m: int, workers: int = 1, budget: int = DEFAULT_BUDGET) -> np.ndarray:
    """Profile mask of every lens over ``(n, m)``, indexed by flat lens index."""
    _check_budget(space_size(n, m), budget, f"space ({n}, {m})")
    key = (n, m)
    if key not in _MASK_CACHE:
        J = m**n
        if workers > 1 and J > 1:
            parts = _partitions(J, workers)
            with ProcessPoolExecutor(max_workers=len(parts)) as pool:
                slices = list(pool.map(_masks_for_get_codes, *zip(*[(n, m, lo, hi) for lo, hi in parts])))
            masks = np.concatenate(slices)
        else:
            masks = _masks_for_get_codes(n, m, 0, J)
        masks.setflags(write=False)
        _MASK_CACHE[key] = masks
    return _MASK_CACHE[key]


def clear_cache() -> None:
    _MASK_CACHE.clear()
    _space_tables.cache_clear()
    _distinct_profiles.cache_clear()


@functools.lru_cache(maxsize=None)
def _distinct_profiles(n: int, m: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Distinct masks of a space with the first flat index and count of each."""
    masks = space_masks(n, m)
    uniq, first, counts = np.unique(masks, return_index=True, return_counts=True)
    return uniq, first, counts


def _first_hit(n: int, m: int, need: int, forbid: int) -> int | None:
    uniq, first, _ = _distinct_profiles(n, m)
    ok = ((uniq & need) == need) & ((uniq & forbid) == 0)
    if not ok.any():
        return None
    return int(first[ok].min())


# -- operations ------------------------------------------------------------------

@dataclass(frozen=True)
class Counterexample:
    lens: FiniteLens
    witness: ViolationWitness
    index: LensIndex

    def to_dict(self) -> dict[str, Any]:
        return {
            "lens": self.lens.to_dict(),
            "index": [self.index.get_code, self.index.put_code],
            "witness": self.witness.to_dict(),
        }


@dataclass(frozen=True)
class NoneFound:
    """No counterexample; ``searched`` lists every fully scanned space."""

    searched: tuple[tuple[int, int], ...]
    samples: int = 0

    @property
    def max_scale(self) -> tuple[int, int] | None:
        return self.searched[-1] if self.searched else None


def _counterexample_at(n: int, m: int, flat: int, conclusion: Law) -> Counterexample:
    index = LensIndex.from_flat(n, m, flat)
    lens = index.decode()
    witness = check_law(lens, conclusion)
    assert witness is not None, f"vector and scalar evaluators disagree on {lens}"
    return Counterexample(lens, witness, index)


def _prepare(premises: Iterable[Law | str], conclusion: Law | str) -> tuple[frozenset[Law], Law]:
    premises = law_set(premises)
    conclusion = conclusion if isinstance(conclusion, Law) else Law.parse(conclusion)
    if conclusion in premises:
        raise ValueError(f"conclusion {conclusion.name} is already a premise")
    return premises, conclusion


def find_counterexample(
    premises: Iterable[Law | str],
    conclusion: Law | str,
    max_n: int = DEFAULT_MAX_N,
    max_m: int = DEFAULT_MAX_V,
    budget: int = DEFAULT_BUDGET,
    workers: int = 1,
) -> Counterexample | NoneFound:
    """First lens, in scan order, satisfying ``premises`` but not ``conclusion``."""
    premises, conclusion = _prepare(premises, conclusion)
    need, forbid = to_mask(premises), conclusion.bit
    searched: list[tuple[int, int]] = []
    visited = 0
    for n, m in scan_order(max_n, max_m):
        visited += space_size(n, m)
        _check_budget(visited, budget, f"search up to ({n}, {m})", list(searched))
        space_masks(n, m, workers=workers, budget=budget)
        flat = _first_hit(n, m, need, forbid)
        if flat is not None:
            return _counterexample_at(n, m, flat, conclusion)
        searched.append((n, m))
    return NoneFound(tuple(searched))


@dataclass(frozen=True)
class SpaceStats:
    s_size: int
    v_size: int
    lenses: int
    distinct_profiles: int
    law_counts: dict[str, int]
    violations: dict[str, int]

    def to_dict(self) -> dict[str, Any]:
        return {
            "s_size": self.s_size,
            "v_size": self.v_size,
            "lenses": self.lenses,
            "distinct_profiles": self.distinct_profiles,
            "law_counts": dict(self.law_counts),
            "violations": dict(self.violations),
        }


@dataclass(frozen=True)
class SweepReport:
    max_n: int
    max_m: int
    total: int
    violations: int
    spaces: tuple[SpaceStats, ...]
    first_violations: dict[str, Counterexample] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {
            "max_s": self.max_n,
            "max_v": self.max_m,
            "total_lenses": self.total,
            "violations": self.violations,
            "spaces": [s.to_dict() for s in self.spaces],
            "first_violations": {k: c.to_dict() for k, c in self.first_violations.items()},
        }


def soundness_sweep(
    max_n: int = DEFAULT_MAX_N,
    max_m: int = DEFAULT_MAX_V,
    rules: Iterable[ImplicationRule] | None = None,
    budget: int = DEFAULT_BUDGET,
    workers: int = 1,
) -> SweepReport:
    """Check every rule against the profile of every lens up to ``(max_n, max_m)``."""
    rules = rule_database() if rules is None else list(rules)
    spaces = scan_order(max_n, max_m)
    _check_budget(sum(space_size(n, m) for n, m in spaces), budget, f"sweep up to ({max_n}, {max_m})")
    total = violations = 0
    stats = []
    first: dict[str, Counterexample] = {}
    for n, m in spaces:
        masks = space_masks(n, m, workers=workers, budget=budget)
        uniq, first_idx, counts = _distinct_profiles(n, m)
        per_rule = {}
        for rule in rules:
            need, cb = rule.premise_mask, rule.conclusion.bit
            bad = ((uniq & need) == need) & ((uniq & cb) == 0)
            count = int(counts[bad].sum())
            per_rule[rule.name] = count
            violations += count
            if count and rule.name not in first:
                first[rule.name] = _counterexample_at(n, m, int(first_idx[bad].min()), rule.conclusion)
        law_counts = {law.name: int(counts[(uniq & law.bit) != 0].sum()) for law in ALL_LAWS}
        stats.append(SpaceStats(n, m, len(masks), len(uniq), law_counts, per_rule))
        total += len(masks)
    return SweepReport(max_n, max_m, total, violations, tuple(stats), first)


def profile_census(n: int, m: int, budget: int = DEFAULT_BUDGET, workers: int = 1) -> dict[frozenset[Law], int]:
    """Exact count of each law profile over the whole space, ordered by bitmask."""
    space_masks(n, m, workers=workers, budget=budget)
    uniq, _, counts = _distinct_profiles(n, m)
    return {from_mask(int(u)): int(c) for u, c in zip(uniq, counts)}


@dataclass(frozen=True)
class CandidateReport:
    premises: frozenset[Law]
    conclusion: Law
    status: str  # "derivable" | "refuted" | "open"
    chain: ProofChain | None = None
    counterexample: Counterexample | None = None
    searched: tuple[int, int] | None = None

    def to_dict(self) -> dict[str, Any]:
        doc: dict[str, Any] = {
            "premises": [law.name for law in sorted_laws(self.premises)],
            "conclusion": self.conclusion.name,
            "status": self.status,
        }
        if self.chain is not None:
            doc["chain"] = [rule.name for rule in self.chain.steps]
        if self.counterexample is not None:
            doc["counterexample"] = self.counterexample.to_dict()
        if self.searched is not None:
            doc["searched"] = list(self.searched)
        return doc

    def __str__(self) -> str:
        head = f"{format_laws(self.premises)} => {self.conclusion.name}: {self.status}"
        if self.chain is not None:
            return head + " via " + ", ".join(rule.name for rule in self.chain.steps)
        if self.counterexample is not None:
            return head + f" by {self.counterexample.lens}"
        return head + f" up to {self.searched}"


def classify_candidate(
    premises: Iterable[Law | str],
    conclusion: Law | str,
    max_n: int = DEFAULT_MAX_N,
    max_m: int = DEFAULT_MAX_V,
    budget: int = DEFAULT_BUDGET,
    workers: int = 1,
) -> CandidateReport:
    premises, conclusion = _prepare(premises, conclusion)
    chain = derivable(premises, conclusion)
    if chain is not None:
        return CandidateReport(premises, conclusion, "derivable", chain=chain)
    found = find_counterexample(premises, conclusion, max_n, max_m, budget, workers)
    if isinstance(found, Counterexample):
        return CandidateReport(premises, conclusion, "refuted", counterexample=found)
    return CandidateReport(premises, conclusion, "open", searched=found.max_scale)


def candidate_survey(
    max_premise_size: int = 2,
    max_n: int = DEFAULT_MAX_N,
    max_m: int = DEFAULT_MAX_V,
    budget: int = DEFAULT_BUDGET,
    workers: int = 1,
) -> list[CandidateReport]:
    """Classify every ``premises => conclusion`` with ``1 <= |premises| <= k``."""
    if max_premise_size not in (1, 2, 3):
        raise ValueError("max_premise_size must be 1, 2 or 3")
    spaces = scan_order(max_n, max_m)
    _check_budget(sum(space_size(n, m) for n, m in spaces), budget, f"survey up to ({max_n}, {max_m})")
    for n, m in spaces:
        space_masks(n, m, workers=workers, budget=budget)
    reports = []
    for size in range(1, max_premise_size + 1):
        for combo in itertools.combinations(ALL_LAWS, size):
            for conclusion in ALL_LAWS:
                if conclusion in combo:
                    continue
                reports.append(classify_candidate(combo, conclusion, max_n, max_m, budget, workers))
    return reports


def random_search(
    premises: Iterable[Law | str],
    conclusion: Law | str,
    n: int,
    m: int,
    samples: int,
    seed: int,
    chunk: int = 1 << 15,
) -> Counterexample | NoneFound:
    """Sample lenses uniformly from ``(n, m)`` and return the first counterexample.

    Each table entry is drawn independently and uniformly, which is the
    uniform distribution over ``(get_code, put_code)``.
    """
    premises, conclusion = _prepare(premises, conclusion)
    if samples < 1:
        raise ValueError("samples must be positive")
    need, forbid = to_mask(premises), conclusion.bit
    rng = np.random.default_rng(seed)
    done = 0
    while done < samples:
        size = min(chunk, samples - done)
        gets = rng.integers(0, m, size=(size, n), dtype=np.intp)
        puts = rng.integers(0, n, size=(size, n, m), dtype=np.intp)
        masks = batch_masks(gets, puts, chunk=chunk)
        hits = np.flatnonzero(((masks & need) == need) & ((masks & forbid) == 0))
        if hits.size:
            i = int(hits[0])
            lens = FiniteLens(n, m, gets[i].tolist(), puts[i].tolist())
            witness = check_law(lens, conclusion)
            assert witness is not None, f"vector and scalar evaluators disagree on {lens}"
            return Counterexample(lens, witness, LensIndex.encode(lens))
        done += size
    return NoneFound((), samples=samples)


def default_workers() -> int:
    return max(1, min(4, os.cpu_count() or 1))


def census_table(census: dict[frozenset[Law], int]) -> list[tuple[str, int]]:
    return [(format_laws(profile), count) for profile, count in census.items()]


__all__ = [
    "CandidateReport",
    "Counterexample",
    "LensIndex",
    "NoneFound",
    "SweepReport",
    "batch_masks",
    "candidate_survey",
    "classify_candidate",
    "enumerate_lenses",
    "find_counterexample",
    "profile_census",
    "random_search",
    "scan_order",
    "soundness_sweep",
    "space_masks",
    "space_size",
]

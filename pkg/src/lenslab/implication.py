"""Horn-clause implication rules between lens laws.

The database holds the eighteen primitive inclusions between law classes;
derived implications such as SG => SS are never stored, only computed by
:func:`closure`.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable

from .laws import ALL_LAWS, Law, format_laws, from_mask, law_set, sorted_laws, to_mask


@dataclass(frozen=True)
class ImplicationRule:
    index: int
    premises: frozenset[Law]
    conclusion: Law
    provenance: str

    def __post_init__(self) -> None:
        if not self.premises:
            raise ValueError("a rule needs at least one premise")
        if self.conclusion in self.premises:
            raise ValueError(f"R{self.index}: conclusion repeats a premise")

    @property
    def name(self) -> str:
        return f"R{self.index}"

    @property
    def premise_mask(self) -> int:
        return to_mask(self.premises)

    def __str__(self) -> str:
        lhs = " & ".join(law.name for law in sorted_laws(self.premises))
        return f"{self.name}: {lhs} => {self.conclusion.name}"


def _rule(index: int, premises: str, conclusion: str, provenance: str) -> ImplicationRule:
    return ImplicationRule(index, law_set(premises.split()), Law[conclusion], provenance)


_T1 = "GetPut family inclusions"
_T2 = "PutGet family inclusions"
_RULES: tuple[ImplicationRule, ...] = (
    _rule(1, "SG", "GP", f"{_T1} (1): SG <= GP"),
    _rule(2, "GP", "SS", f"{_T1} (1): GP <= SS"),
    _rule(3, "SS", "PS", f"{_T1} (1): SS <= PS"),
    _rule(4, "SG", "UD", f"{_T1} (2): SG <= UD"),
    _rule(5, "UD", "PS", f"{_T1} (2): UD < PS (proper)"),
    _rule(6, "UD", "WP", f"{_T1} (3): UD <= WP"),
    _rule(7, "SS WP", "GP", f"{_T1} (4): SS & WP <= GP"),
    _rule(8, "PG", "WP", f"{_T2} (1): PG <= WP"),
    _rule(9, "PG", "VD", f"{_T2} (2): PG < VD (proper)"),
    _rule(10, "VD", "PI", f"{_T2} (2): VD <= PI"),
    _rule(11, "PI WP", "PG", f"{_T2} (3): PI & WP <= PG"),
    _rule(12, "PP", "PT", "PutPut family inclusion: PP <= PT"),
    _rule(13, "PS PT", "SS", "equivalence under PT: PS & PT <= SS"),
    _rule(14, "GP PP", "UD", "GP & PP <= UD (GP and UD not related by inclusion)"),
    _rule(15, "VD GP", "PG", "equivalence under GP: VD & GP <= PG"),
    _rule(16, "PI PT", "VD", "equivalence under PT: PI & PT <= VD"),
    _rule(17, "SS VD", "PT", "combination across families: SS & VD <= PT"),
    _rule(18, "SG PI", "PP", "combination across families: SG & PI <= PP"),
)


def rule_database() -> list[ImplicationRule]:
    return list(_RULES)


@dataclass(frozen=True)
class ProofChain:
    """Rule applications, in order, that derive ``goal`` from ``start``."""

    start: frozenset[Law]
    goal: Law
    steps: tuple[ImplicationRule, ...]

    def replay(self) -> bool:
        known = set(self.start)
        for rule in self.steps:
            if not rule.premises <= known:
                return False
            known.add(rule.conclusion)
        return self.goal in known

    def __str__(self) -> str:
        if not self.steps:
            return f"{self.goal.name}: given"
        return f"{self.goal.name}: " + ", ".join(str(rule) for rule in self.steps)


def _fixpoint(mask: int, rules: Iterable[ImplicationRule]) -> int:
    rules = tuple(rules)
    changed = True
    while changed:
        changed = False
        for rule in rules:
            pm = rule.premise_mask
            if mask & pm == pm and not mask & rule.conclusion.bit:
                mask |= rule.conclusion.bit
                changed = True
    return mask


def closure_set(start: Iterable[Law], rules: Iterable[ImplicationRule] | None = None) -> frozenset[Law]:
    """Least superset of ``start`` closed under ``rules`` (default: the database)."""
    return from_mask(_fixpoint(to_mask(start), _RULES if rules is None else rules))


def _shortest_chains(start: frozenset[Law], rules: tuple[ImplicationRule, ...]) -> dict[Law, tuple[ImplicationRule, ...]]:
    # Breadth-first search over sets of known laws; each edge fires one rule
    # that adds a new law.  Rules expand in index order, so ties between
    # equally short chains go to the earliest rule.
    origin = to_mask(start)
    parent: dict[int, tuple[int, ImplicationRule] | None] = {origin: None}
    chains: dict[Law, tuple[ImplicationRule, ...]] = {}

    def path(mask: int) -> tuple[ImplicationRule, ...]:
        out = []
        while parent[mask] is not None:
            mask, rule = parent[mask]
            out.append(rule)
        return tuple(reversed(out))

    queue = deque([origin])
    while queue:
        mask = queue.popleft()
        for rule in rules:
            pm, cb = rule.premise_mask, rule.conclusion.bit
            if mask & pm != pm or mask & cb:
                continue
            nxt = mask | cb
            if nxt in parent:
                continue
            parent[nxt] = (mask, rule)
            queue.append(nxt)
            if rule.conclusion not in chains:
                chains[rule.conclusion] = path(nxt)
    return chains


def closure(start: Iterable[Law | str]) -> tuple[frozenset[Law], dict[Law, ProofChain]]:
    """Forward-chaining closure of ``start`` with one shortest proof per law.

    The trace covers every law in the closure; laws in ``start`` get an
    empty chain.
    """
    start = law_set(start)
    chains = _shortest_chains(start, _RULES)
    trace = {law: ProofChain(start, law, ()) for law in start}
    trace.update({law: ProofChain(start, law, steps) for law, steps in chains.items()})
    closed = closure_set(start)
    assert closed == frozenset(trace), "search and fixpoint disagree"
    return closed, dict(sorted(trace.items(), key=lambda kv: kv[0].index))


def derivable(premises: Iterable[Law | str], goal: Law | str) -> ProofChain | None:
    """A shortest chain deriving ``goal`` from ``premises``, or ``None``."""
    premises = law_set(premises)
    goal = goal if isinstance(goal, Law) else Law.parse(goal)
    if goal not in closure_set(premises):
        return None
    return closure(premises)[1][goal]


def equivalent_under(context: Iterable[Law | str], a: Iterable[Law | str], b: Iterable[Law | str]) -> bool:
    context = law_set(context)
    return closure_set(context | law_set(a)) == closure_set(context | law_set(b))


def export_graph(rules: Iterable[ImplicationRule] | None = None) -> str:
    """DOT digraph: one node per law, one ``and_<i>`` node per two-premise rule."""
    rules = _RULES if rules is None else tuple(rules)
    lines = ["digraph lens_laws {", "  rankdir=LR;", "  node [shape=box];"]
    for law in ALL_LAWS:
        lines.append(f'  {law.name} [label="{law.name}"];')
    conj = [rule for rule in rules if len(rule.premises) > 1]
    for rule in conj:
        lines.append(f'  and_{rule.index} [shape=circle, label="∧"];')
    for rule in rules:
        if len(rule.premises) == 1:
            (p,) = rule.premises
            lines.append(f'  {p.name} -> {rule.conclusion.name} [label="{rule.name}", style=bold];')
        else:
            for p in sorted_laws(rule.premises):
                lines.append(f"  {p.name} -> and_{rule.index} [arrowhead=none];")
            lines.append(f'  and_{rule.index} -> {rule.conclusion.name} [label="{rule.name}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def describe_closure(start: Iterable[Law | str]) -> str:
    closed, trace = closure(start)
    lines = [f"closure = {format_laws(closed)}"]
    lines += [f"  {chain}" for chain in trace.values()]
    return "\n".join(lines)

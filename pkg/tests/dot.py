"""Minimal reader for the DOT documents produced by export_graph."""

import re

NODE = re.compile(r"^\s*(\w+)\s*\[(.*)\];$")
EDGE = re.compile(r"^\s*(\w+)\s*->\s*(\w+)(?:\s*\[(.*)\])?;$")


def parse(text):
    nodes, edges = [], []
    for line in text.splitlines():
        if m := EDGE.match(line):
            edges.append((m[1], m[2]))
        elif m := NODE.match(line):
            if m[1] not in ("node", "graph", "edge"):
                nodes.append(m[1])
    return nodes, edges


def rules(text):
    """Rebuild {(frozenset(premises), conclusion)} from the graph."""
    nodes, edges = parse(text)
    conj = {n for n in nodes if n.startswith("and_")}
    out = set()
    for a, b in edges:
        if a not in conj and b not in conj:
            out.add((frozenset({a}), b))
    for c in conj:
        premises = frozenset(a for a, b in edges if b == c)
        (conclusion,) = [b for a, b in edges if a == c]
        out.add((premises, conclusion))
    return out

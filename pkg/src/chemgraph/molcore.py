"""Core data model: mol nodes, mol patterns, molecules, port graphs.

A mol pattern is a list of typed nodes, each holding an ordered vector of
edge tags.  A tag occurring twice is an edge between the two port
occurrences; a tag occurring once is a free half-edge.  A molecule is a
pattern with no free tags.  Everything here is immutable and safe to share
between threads.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .errors import (
    ArityMismatch,
    MissingCapType,
    MolSyntaxError,
    OrientationClash,
    TagOveruse,
    UnknownNodeType,
)

# Characters that can never appear in an edge tag: they are the field and
# line separators of the two mol dialects, plus the comment marker.
TAG_FORBIDDEN = {" ", "\t", "\n", "\r", "^", "#"}

PORT_IN = "in"
PORT_MIDDLE = "middle"
PORT_OUT = "out"


def valid_tag(tag: str) -> bool:
    return bool(tag) and tag.isprintable() and not (set(tag) & TAG_FORBIDDEN)


@dataclass(frozen=True)
class NodeType:
    """A node type: a name plus one orientation bit per port.

    Bit 0 marks an "in" port, bit 1 an "out" port.  Unoriented chemistries
    keep the bits but never enforce the in/out pairing rule.
    """

    name: str
    valence_bits: tuple[int, ...]

    def __post_init__(self):
        if not self.name or len(self.valence_bits) < 1:
            raise ValueError(f"node type {self.name!r} needs valence >= 1")
        if any(b not in (0, 1) for b in self.valence_bits):
            raise ValueError(f"node type {self.name!r}: bits must be 0 or 1")

    @property
    def valence(self) -> int:
        return len(self.valence_bits)

    # The Arrow*/FR* prefixes are naming conventions carried over from the
    # mol format: Arrow-family nodes are 2-valent splice bookkeeping, the
    # FR family are the 1-valent free-edge caps.
    @property
    def is_arrow(self) -> bool:
        return self.name.startswith("Arrow") and self.valence == 2

    @property
    def is_free_cap(self) -> bool:
        return self.name.startswith("FR") and self.valence == 1

    @property
    def is_terminator(self) -> bool:
        return self.name == "T"


@dataclass(frozen=True)
class MolNode:
    """One node item: a type and an ordered port-tag vector."""

    node_type: NodeType
    ports: tuple[str, ...]

    def __post_init__(self):
        if len(self.ports) != self.node_type.valence:
            raise ArityMismatch(
                f"{self.node_type.name} expects {self.node_type.valence} "
                f"ports, got {len(self.ports)}"
            )
        for tag in self.ports:
            if not valid_tag(tag):
                raise MolSyntaxError(f"bad edge tag {tag!r}")
            if self.ports.count(tag) > 2:
                raise TagOveruse(f"tag {tag!r} used more than twice in one node")

    @property
    def type_name(self) -> str:
        return self.node_type.name

    def line(self) -> str:
        return " ".join((self.node_type.name,) + self.ports)


class MolPattern:
    """An immutable vector of mol nodes with the tag discipline enforced.

    Every tag occurs at most twice over all ports.  Orientation (each
    twice-occurring tag pairing an "in" with an "out" port) is a separate,
    chemistry-dependent check: see validate_orientation().
    """

    __slots__ = ("nodes", "_tag_count")

    def __init__(self, nodes: Iterable[MolNode]):
        object.__setattr__(self, "nodes", tuple(nodes))
        counts: dict[str, int] = {}
        for node in self.nodes:
            for tag in node.ports:
                counts[tag] = counts.get(tag, 0) + 1
                if counts[tag] > 2:
                    raise TagOveruse(f"tag {tag!r} occurs more than twice")
        object.__setattr__(self, "_tag_count", counts)

    def __setattr__(self, *_):
        raise AttributeError("MolPattern is immutable")

    def __len__(self) -> int:
        return len(self.nodes)

    def __iter__(self) -> Iterator[MolNode]:
        return iter(self.nodes)

    def __getitem__(self, i: int) -> MolNode:
        return self.nodes[i]

    def __eq__(self, other) -> bool:
        return isinstance(other, MolPattern) and self.nodes == other.nodes

    def __hash__(self) -> int:
        return hash(self.nodes)

    def __repr__(self) -> str:
        return f"MolPattern({len(self.nodes)} nodes)"

    def free_tags(self) -> frozenset[str]:
        return frozenset(t for t, c in self._tag_count.items() if c == 1)

    def bound_tags(self) -> frozenset[str]:
        return frozenset(t for t, c in self._tag_count.items() if c == 2)

    def all_tags(self) -> frozenset[str]:
        return frozenset(self._tag_count)

    def is_molecule(self) -> bool:
        return not self.free_tags()

    def type_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for node in self.nodes:
            counts[node.type_name] = counts.get(node.type_name, 0) + 1
        return counts

    def occurrences(self, tag: str) -> list[tuple[int, int]]:
        """All (node index, port index) positions holding `tag`."""
        out = []
        for i, node in enumerate(self.nodes):
            for p, t in enumerate(node.ports):
                if t == tag:
                    out.append((i, p))
        return out

    def partner(self, i: int, p: int) -> tuple[int, int] | None:
        """The other end of the edge at port (i, p), or None if free."""
        tag = self.nodes[i].ports[p]
        occ = self.occurrences(tag)
        if len(occ) == 1:
            return None
        return occ[0] if occ[1] == (i, p) else occ[1]


class Molecule(MolPattern):
    """A mol pattern with no free tags (every tag occurs exactly twice)."""

    __slots__ = ()

    def __init__(self, nodes: Iterable[MolNode]):
        super().__init__(nodes)
        free = self.free_tags()
        if free:
            raise MolSyntaxError(
                f"molecule has free tags: {', '.join(sorted(free))}"
            )

    def __repr__(self) -> str:
        return f"Molecule({len(self.nodes)} nodes)"


EMPTY_MOLECULE = Molecule(())


def validate_orientation(pattern: MolPattern) -> None:
    """Check the oriented pairing rule: a bound tag joins one "out" and one
    "in" port.  Raises OrientationClash."""
    seen: dict[str, int] = {}
    for node in pattern.nodes:
        for p, tag in enumerate(node.ports):
            bit = node.node_type.valence_bits[p]
            if tag in seen:
                if seen[tag] == bit:
                    kind = "out" if bit else "in"
                    raise OrientationClash(
                        f"tag {tag!r} joins two {kind!r} ports"
                    )
            else:
                seen[tag] = bit


# ---------------------------------------------------------------------------
# Text format

NEWLINE = "newline"
CARET = "caret"
_SEPARATORS = {NEWLINE: "\n", CARET: "^"}


def parse_mol(text: str, chem, dialect: str | None = None) -> MolPattern:
    """Parse mol text against a chemistry's node-type registry.

    `dialect` is "newline" or "caret"; by default both separators are
    accepted.  Items starting with "#" are comments and are skipped.
    Raises UnknownNodeType / ArityMismatch / TagOveruse / OrientationClash.
    """
    if dialect is None:
        text = text.replace("^", "\n")
    else:
        text = text.replace(_SEPARATORS[dialect], "\n")
    nodes = []
    counts: dict[str, int] = {}
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        name, tags = fields[0], fields[1:]
        ntype = chem.node_types.get(name)
        if ntype is None:
            raise UnknownNodeType(f"unknown node type {name!r}", line=lineno)
        if len(tags) != ntype.valence:
            raise ArityMismatch(
                f"{name} is {ntype.valence}-valent, got {len(tags)} ports",
                line=lineno,
            )
        for tag in tags:
            counts[tag] = counts.get(tag, 0) + 1
            if counts[tag] > 2:
                raise TagOveruse(f"tag {tag!r} occurs more than twice", line=lineno)
        nodes.append(MolNode(ntype, tuple(tags)))
    pattern = MolPattern(nodes)
    if chem.oriented:
        validate_orientation(pattern)
    return pattern


def parse_molecule(text: str, chem, dialect: str | None = None) -> Molecule:
    pattern = parse_mol(text, chem, dialect)
    return Molecule(pattern.nodes)


def serialize_mol(pattern: MolPattern, dialect: str = NEWLINE) -> str:
    """Render a pattern as mol text; parse_mol round-trips node-for-node."""
    return _SEPARATORS[dialect].join(node.line() for node in pattern.nodes)


def free_tags(pattern: MolPattern) -> frozenset[str]:
    return pattern.free_tags()


def bound_tags(pattern: MolPattern) -> frozenset[str]:
    return pattern.bound_tags()


# ---------------------------------------------------------------------------
# Capping

def cap(pattern: MolPattern, chem) -> Molecule:
    """Close every free half-edge with a 1-valent cap node.

    Oriented chemistries cap an "in"-side half-edge with FRIN (whose single
    port is "out") and an "out"-side one with FROUT; unoriented chemistries
    use FREE for both.  A molecule caps to itself.
    """
    if pattern.is_molecule():
        return pattern if isinstance(pattern, Molecule) else Molecule(pattern.nodes)
    free = pattern.free_tags()
    caps = []
    for node in pattern.nodes:
        for p, tag in enumerate(node.ports):
            if tag not in free:
                continue
            if chem.oriented:
                want = "FRIN" if node.node_type.valence_bits[p] == 0 else "FROUT"
            else:
                want = "FREE"
            cap_type = chem.node_types.get(want)
            if cap_type is None or cap_type.valence != 1:
                raise MissingCapType(
                    f"chemistry {chem.name!r} lacks 1-valent cap type {want!r}"
                )
            caps.append(MolNode(cap_type, (tag,)))
    return Molecule(pattern.nodes + tuple(caps))


# ---------------------------------------------------------------------------
# Port graphs

@dataclass(frozen=True)
class PortNode:
    id: int
    port_index: int
    kind: str  # in / middle / out
    center: int


@dataclass(frozen=True)
class PortGraph:
    """The expanded graph of a molecule: one center node per mol node, one
    port node per port, internal center-port edges and external port-port
    edges (one per mol edge)."""

    centers: tuple[tuple[int, NodeType], ...]
    ports: tuple[PortNode, ...]
    internal_edges: tuple[tuple[int, int], ...]  # (center id, port id)
    external_edges: tuple[tuple[int, int], ...]  # (port id, port id)


def port_kinds(valence: int) -> list[str]:
    """Port kinds by position: first is "in", last is "out", rest "middle"."""
    if valence == 1:
        return [PORT_IN]
    return [PORT_IN] + [PORT_MIDDLE] * (valence - 2) + [PORT_OUT]


def to_port_graph(molecule: Molecule) -> PortGraph:
    """Expand a molecule into its center/port graph.

    An external edge always joins two distinct port nodes, even when a tag
    occurs twice inside a single mol node.
    """
    centers = []
    ports = []
    internal = []
    external = []
    tag_ends: dict[str, list[int]] = {}
    next_id = itertools.count()
    for node in molecule.nodes:
        cid = next(next_id)
        centers.append((cid, node.node_type))
        kinds = port_kinds(node.node_type.valence)
        for p, tag in enumerate(node.ports):
            pid = next(next_id)
            ports.append(PortNode(pid, p, kinds[p], cid))
            internal.append((cid, pid))
            tag_ends.setdefault(tag, []).append(pid)
    for tag, ends in sorted(tag_ends.items()):
        if len(ends) == 2:
            external.append((ends[0], ends[1]))
    return PortGraph(tuple(centers), tuple(ports), tuple(internal), tuple(external))


# ---------------------------------------------------------------------------
# Canonical form and isomorphism
#
# A canonical code is a byte string equal for two patterns exactly when they
# are isomorphic (type-preserving node bijection plus tag renaming; port
# order is rigid).  The algorithm is iterative color refinement over the
# nodes, with backtracking individualization on refinement-stable orbits;
# the lexicographically smallest serialization over all admissible node
# orderings wins.  Free half-edges are anonymous: patterns that differ only
# in free-tag names share a code.

def _connected_components(pattern: MolPattern) -> list[list[int]]:
    n = len(pattern.nodes)
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    first_owner: dict[str, int] = {}
    for i, node in enumerate(pattern.nodes):
        for tag in node.ports:
            if tag in first_owner:
                a, b = find(first_owner[tag]), find(i)
                if a != b:
                    parent[b] = a
            else:
                first_owner[tag] = i
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def _adjacency(pattern: MolPattern, members: list[int]):
    """Per local node: for each port, (partner local index, partner port) or
    None when the half-edge is free."""
    local = {g: i for i, g in enumerate(members)}
    positions: dict[str, list[tuple[int, int]]] = {}
    for li, g in enumerate(members):
        for p, tag in enumerate(pattern.nodes[g].ports):
            positions.setdefault(tag, []).append((li, p))
    adj: list[list[tuple[int, int] | None]] = [
        [None] * pattern.nodes[g].node_type.valence for g in members
    ]
    for ends in positions.values():
        if len(ends) == 2:
            (i1, p1), (i2, p2) = ends
            adj[i1][p1] = (i2, p2)
            adj[i2][p2] = (i1, p1)
    return adj


def _refine(colors: list[int], adj) -> list[int]:
    n = len(colors)
    while True:
        sigs = []
        for i in range(n):
            row = []
            for p, other in enumerate(adj[i]):
                if other is None:
                    row.append((p, -1, -1))
                else:
                    j, q = other
                    row.append((p, colors[j], q))
            sigs.append((colors[i], tuple(row)))
        order = {sig: k for k, sig in enumerate(sorted(set(sigs)))}
        new = [order[s] for s in sigs]
        if new == colors:
            return colors
        colors = new


def _component_code(pattern: MolPattern, members: list[int]) -> str:
    adj = _adjacency(pattern, members)
    names = sorted({pattern.nodes[g].type_name for g in members})
    name_color = {nm: k for k, nm in enumerate(names)}
    init = [name_color[pattern.nodes[g].type_name] for g in members]
    init = _refine(init, adj)
    best: list[str | None] = [None]

    def serialize_order(order: list[int]) -> str:
        rename: dict[tuple, str] = {}
        counter = itertools.count()
        pos_of = {li: k for k, li in enumerate(order)}
        lines = []
        for li in order:
            g = members[li]
            parts = [pattern.nodes[g].type_name]
            for p, other in enumerate(adj[li]):
                if other is None:
                    parts.append("_")
                    continue
                j, q = other
                a, b = (pos_of[li], p), (pos_of[j], q)
                ckey = (min(a, b), max(a, b))
                if ckey not in rename:
                    rename[ckey] = f"e{next(counter)}"
                parts.append(rename[ckey])
            lines.append(" ".join(parts))
        return "\n".join(lines)

    n = len(members)

    def search(colors: list[int]):
        classes: dict[int, list[int]] = {}
        for i, c in enumerate(colors):
            classes.setdefault(c, []).append(i)
        target = None
        for c in sorted(classes):
            if len(classes[c]) > 1:
                target = classes[c]
                break
        if target is None:
            order = sorted(range(n), key=lambda i: colors[i])
            cand = serialize_order(order)
            if best[0] is None or cand < best[0]:
                best[0] = cand
            return
        fresh = max(colors) + 1
        for pick in target:
            branched = list(colors)
            branched[pick] = fresh
            search(_refine(branched, adj))

    search(list(init))
    assert best[0] is not None
    return best[0]


def canonical_code(pattern: MolPattern) -> bytes:
    """Canonical byte-string encoding of a pattern's isomorphism class.

    The empty molecule maps to b"".  Connected components are canonicalized
    independently and joined in sorted order, so disjoint unions of
    isomorphic pieces stay cheap.
    """
    if not pattern.nodes:
        return b""
    codes = sorted(
        _component_code(pattern, comp) for comp in _connected_components(pattern)
    )
    return "\n|\n".join(codes).encode()


def is_isomorphic(a: MolPattern, b: MolPattern) -> bool:
    """Isomorphism: type-preserving node bijection plus tag renaming."""
    if len(a) != len(b) or a.type_counts() != b.type_counts():
        return False
    return canonical_code(a) == canonical_code(b)

"""Chemistry registry: node types plus rewrite rules.

A chemistry is loaded from a small sectioned config format:

    [chemistry]
    name my-chem
    oriented true

    [types]
    L 0 1 1          # name followed by one orientation bit per port
    T 0

    [rewrites]
    name L-A         # a new `name` key starts a new rewrite block
    left L
    right A
    contact 2 0      # port of the shared tag on the left node, then on the
                     # right node (the right node's contact is its port 0 in
                     # every packaged rule)
    action BETA
    kind BETA
    blocks FOE-A     # optional, comma separated contact-pattern names
    rhs Arrow 1 5 ^ Arrow 4 2

The LHS of a rewrite is implicit in (left, right, contact): the left node's
ports are the placeholder tags "1".."v", the right node shares the contact
placeholder and continues numbering.  The rhs is a mol pattern over those
placeholders; tags of the interface (free tags of the LHS) must reappear
exactly once, and any extra tags are fresh internal edges.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources

from . import molcore
from .errors import (
    BadValence,
    ChemistryConfigError,
    DuplicateRewriteName,
    InterfaceMismatch,
    UnknownChemistry,
    UnknownType,
)
from .molcore import MolNode, MolPattern, NodeType

BUILTIN_NAMES = ("chemlambda-v2", "ic", "chemlambda+ic")

KIND_WEIGHT_GROUPS = {
    "BETA": "BETA",
    "FAN-IN": "FAN-IN",
    "TERM": "TERM",
    "DIST": "DIST",
    "COMB": "COMB",
    "IC-ANNIHILATE": "IC-ANNIHILATE",
    "IC-COMMUTE": "IC-COMMUTE",
}


@dataclass(frozen=True)
class Rewrite:
    """A two-node contact rewrite.

    The LHS is a left-typed node sharing one tag with a right-typed node:
    `left_port` is the contact's port index on the right-typed node and
    `right_port` its port index on the left-typed node (the contact edge is
    pictured as running left-to-right, so each field names the side the
    port faces).  The RHS template is a mol pattern over placeholder tags;
    its free tags are exactly the LHS's free placeholders (the interface).
    """

    name: str
    left: str
    right: str
    left_port: int
    right_port: int
    action: str
    kind: str
    rhs_template: MolPattern
    rhs_types: tuple[str, ...]
    blocks: tuple[str, ...] = ()
    weight_group: str = ""

    @property
    def contact_placeholder(self) -> str:
        return str(self.right_port + 1)

    def lhs_template(self, chem: "Chemistry") -> MolPattern:
        """The implied LHS pattern: left node ports "1".."v", right node
        sharing the contact placeholder and numbering onward."""
        lt, rt = chem.node_types[self.left], chem.node_types[self.right]
        left_ports = tuple(str(i + 1) for i in range(lt.valence))
        nxt = lt.valence + 1
        right_ports = []
        for p in range(rt.valence):
            if p == self.left_port:
                right_ports.append(self.contact_placeholder)
            else:
                right_ports.append(str(nxt))
                nxt += 1
        return MolPattern(
            (MolNode(lt, left_ports), MolNode(rt, tuple(right_ports)))
        )

    def interface(self, chem: "Chemistry") -> frozenset[str]:
        return self.lhs_template(chem).free_tags()

    def node_delta(self) -> int:
        return len(self.rhs_template) - 2


@dataclass(frozen=True)
class Chemistry:
    name: str
    node_types: dict[str, NodeType]
    rewrites: tuple[Rewrite, ...]
    oriented: bool

    def rewrite(self, name: str) -> Rewrite:
        for rw in self.rewrites:
            if rw.name == name:
                return rw
        raise KeyError(name)

    def rewrites_for_left(self, type_name: str) -> tuple[Rewrite, ...]:
        return tuple(rw for rw in self.rewrites if rw.left == type_name)

    def parse(self, text: str, dialect: str | None = None) -> MolPattern:
        return molcore.parse_mol(text, self, dialect)

    def parse_molecule(self, text: str, dialect: str | None = None):
        return molcore.parse_molecule(text, self, dialect)


def validate_patterns(lhs: MolPattern, rhs: MolPattern) -> list[str]:
    """Interface check for an arbitrary LHS/RHS pattern pair: the free tags
    must coincide.  Covers shapes outside the two-node Rewrite container,
    like the Arrow self-loop eliminated by COMB (empty interface)."""
    problems = []
    if lhs.free_tags() != rhs.free_tags():
        problems.append(
            f"interface mismatch: LHS frees {sorted(lhs.free_tags())} "
            f"vs RHS frees {sorted(rhs.free_tags())}"
        )
    return problems


def validate_rewrite(rw: Rewrite, chem: Chemistry) -> list[str]:
    """Validation report for one rewrite; empty list means valid."""
    problems = []
    for side, tname in (("left", rw.left), ("right", rw.right)):
        if tname not in chem.node_types:
            problems.append(f"{rw.name}: unknown {side} type {tname!r}")
    if problems:
        return problems
    lt, rt = chem.node_types[rw.left], chem.node_types[rw.right]
    if not 0 <= rw.right_port < lt.valence:
        problems.append(f"{rw.name}: contact port {rw.right_port} outside {rw.left}")
    if not 0 <= rw.left_port < rt.valence:
        problems.append(f"{rw.name}: contact port {rw.left_port} outside {rw.right}")
    if problems:
        return problems
    lhs = rw.lhs_template(chem)
    interface = lhs.free_tags()
    rhs_free = rw.rhs_template.free_tags()
    if interface != rhs_free:
        problems.append(
            f"{rw.name}: interface mismatch, LHS frees {sorted(interface)} "
            f"vs RHS frees {sorted(rhs_free)}"
        )
    overlap = rw.rhs_template.bound_tags() & lhs.all_tags()
    if overlap:
        problems.append(
            f"{rw.name}: RHS internal tags {sorted(overlap)} collide with LHS"
        )
    for node in rw.rhs_template:
        if node.type_name not in chem.node_types:
            problems.append(f"{rw.name}: RHS uses unknown type {node.type_name!r}")
    for blocked in rw.blocks:
        l, _, r = blocked.partition("-")
        if l not in chem.node_types or r not in chem.node_types:
            problems.append(f"{rw.name}: blocks entry {blocked!r} does not resolve")
    return problems


def _validate_chemistry(chem: Chemistry) -> None:
    if not any(t.is_arrow for t in chem.node_types.values()):
        raise ChemistryConfigError(f"{chem.name}: no 2-valent Arrow* node type")
    if not any(t.is_free_cap for t in chem.node_types.values()):
        raise ChemistryConfigError(f"{chem.name}: no 1-valent FR* cap node type")
    problems = []
    for rw in chem.rewrites:
        problems += validate_rewrite(rw, chem)
    if problems:
        raise InterfaceMismatch("; ".join(problems))


# ---------------------------------------------------------------------------
# Config parsing

def _parse_bits(fields: list[str], where: str) -> tuple[int, ...]:
    try:
        bits = tuple(int(f) for f in fields)
    except ValueError:
        raise BadValence(f"{where}: bits must be integers") from None
    if not bits or any(b not in (0, 1) for b in bits):
        raise BadValence(f"{where}: bits must be a non-empty 0/1 vector")
    return bits


def _build_rewrite(block: dict[str, str], types: dict[str, NodeType]) -> Rewrite:
    for key in ("name", "left", "right", "contact", "action", "kind", "rhs"):
        if key not in block:
            raise ChemistryConfigError(
                f"rewrite block {block.get('name', '?')!r} missing key {key!r}"
            )
    name = block["name"]
    for side in ("left", "right"):
        if block[side] not in types:
            raise UnknownType(f"{name}: unknown node type {block[side]!r}")
    contact = block["contact"].split()
    if len(contact) != 2:
        raise ChemistryConfigError(f"{name}: contact wants two port indices")
    on_left, on_right = int(contact[0]), int(contact[1])
    registry = _Registry(types)
    rhs = molcore.parse_mol(block["rhs"], registry, molcore.CARET)
    blocks = tuple(b.strip() for b in block.get("blocks", "").split(",") if b.strip())
    kind = block["kind"]
    if kind not in KIND_WEIGHT_GROUPS:
        raise ChemistryConfigError(f"{name}: unknown kind {kind!r}")
    return Rewrite(
        name=name,
        left=block["left"],
        right=block["right"],
        left_port=on_right,
        right_port=on_left,
        action=block["action"],
        kind=kind,
        rhs_template=rhs,
        rhs_types=tuple(n.type_name for n in rhs),
        blocks=blocks,
        weight_group=block.get("weight_group", KIND_WEIGHT_GROUPS[kind]),
    )


class _Registry:
    """Just enough of a chemistry to parse rewrite templates."""

    def __init__(self, types: dict[str, NodeType]):
        self.node_types = types
        self.oriented = False
        self.name = "<template>"


def load_chemistry(config_text: str) -> Chemistry:
    """Parse and fully validate a chemistry config."""
    section = None
    meta: dict[str, str] = {}
    types: dict[str, NodeType] = {}
    blocks: list[dict[str, str]] = []
    current: dict[str, str] | None = None
    for raw in config_text.split("\n"):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip().lower()
            if section not in ("chemistry", "types", "rewrites"):
                raise ChemistryConfigError(f"unknown section {section!r}")
            continue
        if section == "chemistry":
            key, _, value = line.partition(" ")
            meta[key] = value.strip()
        elif section == "types":
            fields = line.split()
            name = fields[0]
            if name in types:
                raise ChemistryConfigError(f"duplicate node type {name!r}")
            types[name] = NodeType(name, _parse_bits(fields[1:], name))
        elif section == "rewrites":
            key, _, value = line.partition(" ")
            if key == "name":
                current = {"name": value.strip()}
                blocks.append(current)
            elif current is None:
                raise ChemistryConfigError("rewrite key before any `name`")
            else:
                current[key] = value.strip()
        else:
            raise ChemistryConfigError(f"content outside any section: {line!r}")
    rewrites = []
    seen = set()
    for block in blocks:
        rw = _build_rewrite(block, types)
        if rw.name in seen:
            raise DuplicateRewriteName(rw.name)
        seen.add(rw.name)
        rewrites.append(rw)
    chem = Chemistry(
        name=meta.get("name", "unnamed"),
        node_types=types,
        rewrites=tuple(rewrites),
        oriented=meta.get("oriented", "true").lower() in ("true", "1", "yes"),
    )
    _validate_chemistry(chem)
    return chem


def builtin(name: str) -> Chemistry:
    """One of the packaged chemistries: chemlambda-v2, ic, chemlambda+ic."""
    if name not in BUILTIN_NAMES:
        raise UnknownChemistry(
            f"unknown chemistry {name!r}; packaged: {', '.join(BUILTIN_NAMES)}"
        )
    fname = name.replace("+", "_plus_") + ".chem"
    text = resources.files("chemgraph").joinpath("chemistries", fname).read_text()
    return load_chemistry(text)

"""Match finding, rewrite application, COMB passes and reduction loops.

Matching anchors at the left-typed node of a rewrite: a match exists when
that node's contact port shares its tag with the contact port of a
right-typed node elsewhere.  Application is double-pushout style: the two
matched lines are spliced out, the RHS template is instantiated with
inherited interface tags and fresh internal tags, and appended.

Arrow bookkeeping nodes produced by rewrites are erased by comb_pass: an
Arrow whose first port is bound splices its second port's tag through, and
an Arrow looping to itself vanishes.

Hapax mode trades fresh-name generation for token conservation: each
application consumes a pre-minted Token1 (a frozen pattern with the RHS's
node types), recycles its tags for the new internal edges, and emits a
Token2 freezing the consumed LHS nodes, so per-type node counts of
molecule plus ledger never change.
"""

from __future__ import annotations

import random
from base64 import b32encode
from dataclasses import dataclass, field, replace

from .chemistry import Chemistry, Rewrite
from .errors import InsufficientTokens, StaleMatch
from .molcore import Molecule, MolNode, MolPattern, canonical_code, serialize_mol

KIND_PRIORITY = {
    "BETA": 0,
    "FAN-IN": 1,
    "IC-ANNIHILATE": 2,
    "TERM": 3,
    "DIST": 4,
    "IC-COMMUTE": 5,
    "COMB": 6,
}

RANDOM_POLICY = "random"
DETERMINISTIC_POLICY = "deterministic-priority"


def default_weight(group: str) -> float:
    return 0.5 if group == "DIST" else 1.0


@dataclass(frozen=True)
class ReductionConfig:
    seed: int = 0
    max_steps: int = 100
    weights: tuple[tuple[str, float], ...] = ()
    policy: str = RANDOM_POLICY
    comb: str = "after-each-step"
    hapax: bool = False

    def __post_init__(self):
        for group, w in self.weights:
            if not 0.0 <= w <= 1.0:
                raise ValueError(f"weight {group}={w} outside [0,1]")
        if self.policy not in (RANDOM_POLICY, DETERMINISTIC_POLICY):
            raise ValueError(f"unknown policy {self.policy!r}")

    def weight_of(self, group: str) -> float:
        for g, w in self.weights:
            if g == group:
                return w
        return default_weight(group)

    def with_weights(self, weights: dict[str, float]) -> "ReductionConfig":
        merged = dict(self.weights)
        merged.update(weights)
        return replace(self, weights=tuple(sorted(merged.items())))


@dataclass(frozen=True)
class Match:
    """A located LHS occurrence: which rewrite, where, and the tag renaming.

    node_map holds the molecule indices of the (left-typed, right-typed)
    LHS lines; tag_map sends LHS placeholder tags to molecule tags.  The
    matched lines are snapshotted so a stale application can be refused.
    """

    rewrite: Rewrite
    node_map: tuple[int, int]
    tag_map: dict[str, str]
    lines: tuple[str, str]

    @property
    def nodes(self) -> frozenset[int]:
        return frozenset(self.node_map)

    def describe(self) -> str:
        return f"{self.rewrite.name}@{self.node_map[0]}+{self.node_map[1]}"


class TagSource:
    """Fresh-tag generator: emits `g<nonce>.<k>` names.

    The nonce is chosen at construction so that no existing tag lives in
    the emitted namespace; molecules never grow new tags outside their own
    TagSource, so a single scan suffices.
    """

    def __init__(self, existing: frozenset[str]):
        nonce = 0
        while any(t.startswith(f"g{nonce}.") for t in existing):
            nonce += 1
        self.prefix = f"g{nonce}."
        self._next = 0

    @classmethod
    def for_pattern(cls, pattern: MolPattern) -> "TagSource":
        return cls(pattern.all_tags())

    def fresh(self) -> str:
        tag = f"{self.prefix}{self._next}"
        self._next += 1
        return tag


# ---------------------------------------------------------------------------
# Matching

def _match_from(pattern: MolPattern, i: int, rw: Rewrite, chem: Chemistry):
    left_node = pattern.nodes[i]
    if left_node.type_name != rw.left:
        return None
    if rw.right_port >= len(left_node.ports):
        return None
    contact = left_node.ports[rw.right_port]
    occ = pattern.occurrences(contact)
    if len(occ) != 2:
        return None
    other = occ[0] if occ[1] == (i, rw.right_port) else occ[1]
    j, q = other
    if j == i or q != rw.left_port:
        return None
    right_node = pattern.nodes[j]
    if right_node.type_name != rw.right:
        return None
    tag_map: dict[str, str] = {}
    for p, tag in enumerate(left_node.ports):
        tag_map[str(p + 1)] = tag
    nxt = len(left_node.ports) + 1
    for p, tag in enumerate(right_node.ports):
        if p == rw.left_port:
            if tag_map[rw.contact_placeholder] != tag:
                return None
        else:
            tag_map[str(nxt)] = tag
            nxt += 1
    return Match(
        rewrite=rw,
        node_map=(i, j),
        tag_map=tag_map,
        lines=(left_node.line(), right_node.line()),
    )


def find_matches(pattern: MolPattern, chem: Chemistry) -> list[Match]:
    """All matches of the chemistry's rewrites, ordered by (left-node
    index, rewrite name)."""
    found = []
    for i in range(len(pattern)):
        for rw in chem.rewrites:
            m = _match_from(pattern, i, rw, chem)
            if m is not None:
                found.append(m)
    found.sort(key=lambda m: (m.node_map[0], m.rewrite.name))
    return found


def match_at(pattern: MolPattern, node_index: int, chem: Chemistry) -> list[Match]:
    """Matches anchored at node_index (the image of the left-typed line)."""
    found = []
    for rw in chem.rewrites:
        m = _match_from(pattern, node_index, rw, chem)
        if m is not None:
            found.append(m)
    found.sort(key=lambda m: m.rewrite.name)
    return found


def conflicts(m1: Match, m2: Match) -> bool:
    """Two matches conflict when they share a molecule node."""
    return bool(m1.nodes & m2.nodes)


def select_matches(
    matches: list[Match], config: ReductionConfig, rng: random.Random
) -> list[Match]:
    """Pick a pairwise non-conflicting subset to fire this step.

    random policy: shuffle, then greedily keep each non-conflicting match
    with probability weight_of(its group).  deterministic-priority policy:
    sort by kind priority then position and keep everything that fits.
    """
    accepted: list[Match] = []
    if config.policy == RANDOM_POLICY:
        order = list(matches)
        rng.shuffle(order)
        for m in order:
            if any(conflicts(m, a) for a in accepted):
                continue
            if rng.random() < config.weight_of(m.rewrite.weight_group):
                accepted.append(m)
    else:
        order = sorted(
            matches,
            key=lambda m: (
                KIND_PRIORITY.get(m.rewrite.kind, 99),
                m.node_map[0],
                m.rewrite.name,
            ),
        )
        for m in order:
            if not any(conflicts(m, a) for a in accepted):
                accepted.append(m)
    return accepted


# ---------------------------------------------------------------------------
# Application

def _check_fresh_lines(pattern: MolPattern, match: Match) -> None:
    i, j = match.node_map
    if i >= len(pattern) or j >= len(pattern):
        raise StaleMatch(f"{match.describe()}: node indices out of range")
    if (pattern.nodes[i].line(), pattern.nodes[j].line()) != match.lines:
        raise StaleMatch(f"{match.describe()}: molecule changed since matching")


def _instantiate_rhs(
    rw: Rewrite, tag_map: dict[str, str], fresh_tags: dict[str, str], chem: Chemistry
) -> list[MolNode]:
    lines = []
    for node in rw.rhs_template:
        ports = []
        for placeholder in node.ports:
            if placeholder in tag_map:
                ports.append(tag_map[placeholder])
            else:
                ports.append(fresh_tags[placeholder])
        lines.append(MolNode(chem.node_types[node.type_name], tuple(ports)))
    return lines


def _rhs_internal_placeholders(rw: Rewrite) -> list[str]:
    """Bound tags of the RHS template in first-occurrence order."""
    bound = rw.rhs_template.bound_tags()
    seen: list[str] = []
    for node in rw.rhs_template:
        for tag in node.ports:
            if tag in bound and tag not in seen:
                seen.append(tag)
    return seen


def apply_matches(
    pattern: MolPattern, matches: list[Match], tags: TagSource, chem: Chemistry
) -> MolPattern:
    """Apply pairwise non-conflicting matches in parallel: splice all
    matched lines, append each RHS instance in order."""
    for m in matches:
        _check_fresh_lines(pattern, m)
    taken: set[int] = set()
    for m in matches:
        if m.nodes & taken:
            raise ValueError("conflicting matches passed to apply_matches")
        taken |= m.nodes
    kept = [node for k, node in enumerate(pattern.nodes) if k not in taken]
    added: list[MolNode] = []
    for m in matches:
        fresh = {p: tags.fresh() for p in _rhs_internal_placeholders(m.rewrite)}
        added += _instantiate_rhs(m.rewrite, m.tag_map, fresh, chem)
    return MolPattern(kept + added)


def apply_match(
    pattern: MolPattern, match: Match, tags: TagSource, chem: Chemistry
) -> MolPattern:
    """DPO application of a single match."""
    return apply_matches(pattern, [match], tags, chem)


def shift_match(match: Match, removed: frozenset[int]) -> Match:
    """Reindex a match after lines in `removed` were spliced out (none of
    them belonging to the match itself)."""
    assert not (match.nodes & removed)
    i, j = match.node_map
    ni = i - sum(1 for r in removed if r < i)
    nj = j - sum(1 for r in removed if r < j)
    return replace(match, node_map=(ni, nj))


# ---------------------------------------------------------------------------
# COMB passes

def comb_candidates(pattern: MolPattern) -> list[tuple[str, int]]:
    """Possible single Arrow eliminations, by arrow node index.

    ("loop", i): the arrow's two ports carry the same tag; delete it.
    ("splice", i) / ("splice2", i): a port of the arrow is bound; pull the
    opposite port's tag through to the partner and delete the arrow.  The
    first port wins when both are bound (the outcomes are isomorphic);
    splicing through the second port keeps elimination confluent when the
    first port dangles free, which only unoriented patterns can produce.
    """
    out = []
    for i, node in enumerate(pattern.nodes):
        if not node.node_type.is_arrow:
            continue
        if node.ports[0] == node.ports[1]:
            out.append(("loop", i))
        elif pattern.partner(i, 0) is not None:
            out.append(("splice", i))
        elif pattern.partner(i, 1) is not None:
            out.append(("splice2", i))
    return out


def comb_eliminate(pattern: MolPattern, candidate: tuple[str, int]) -> MolPattern:
    op, i = candidate
    nodes = list(pattern.nodes)
    arrow = nodes[i]
    assert arrow.node_type.is_arrow
    if op == "loop":
        assert arrow.ports[0] == arrow.ports[1]
        del nodes[i]
        return MolPattern(nodes)
    through = 0 if op == "splice" else 1
    j, q = pattern.partner(i, through)
    assert (j, q) != (i, through)
    ports = list(nodes[j].ports)
    ports[q] = arrow.ports[1 - through]
    nodes[j] = MolNode(nodes[j].node_type, tuple(ports))
    del nodes[i]
    return MolPattern(nodes)


def comb_pass(pattern: MolPattern) -> MolPattern:
    """Erase Arrow nodes to fixpoint (always the lowest-index candidate
    first; every elimination order lands on an isomorphic fixpoint)."""
    while True:
        cands = comb_candidates(pattern)
        if not cands:
            if pattern.is_molecule() and not isinstance(pattern, Molecule):
                return Molecule(pattern.nodes)
            return pattern
        pattern = comb_eliminate(pattern, cands[0])


# ---------------------------------------------------------------------------
# Reduction loop

@dataclass(frozen=True)
class StepRecord:
    step: int
    applied: tuple[str, ...]  # match descriptions, e.g. "L-A@0+3"
    nodes_before: int
    edges_before: int
    nodes_after: int
    edges_after: int
    counts: tuple[tuple[str, int], ...]  # post-COMB node counts by type

    def render(self) -> str:
        applied = ",".join(self.applied) if self.applied else "-"
        counts = ",".join(f"{t}:{n}" for t, n in self.counts)
        return (
            f"step={self.step} rewrites={applied} "
            f"nodes_before={self.nodes_before} nodes_after={self.nodes_after} "
            f"edges_before={self.edges_before} edges_after={self.edges_after} "
            f"counts={counts or '-'}"
        )


@dataclass(frozen=True)
class ReductionTrace:
    chemistry: str
    config: ReductionConfig
    initial_code: bytes
    records: tuple[StepRecord, ...]
    final: MolPattern
    termination: str
    snapshots: tuple[tuple[int, str], ...] = ()

    def render(self, chem: Chemistry | None = None) -> str:
        """The line-delimited trace export; byte-identical for identical
        (molecule, chemistry, config)."""
        groups = sorted(
            {rw.weight_group for rw in chem.rewrites} if chem else
            {g for g, _ in self.config.weights}
        )
        weights = ",".join(
            f"{g}:{format(self.config.weight_of(g), 'g')}" for g in groups
        )
        head = [
            f"chem={self.chemistry}",
            f"seed={self.config.seed}",
            f"policy={self.config.policy}",
            f"max_steps={self.config.max_steps}",
            f"hapax={'true' if self.config.hapax else 'false'}",
            f"weights={weights or '-'}",
            f"initial_code={b32encode(self.initial_code).decode()}",
        ]
        lines = head + [r.render() for r in self.records]
        for step, mol in self.snapshots:
            lines.append(f"snapshot step={step} mol={mol}")
        lines.append(f"termination={self.termination}")
        lines.append(f"final={serialize_mol(self.final, 'caret')}")
        return "\n".join(lines) + "\n"


def _counts_tuple(pattern: MolPattern) -> tuple[tuple[str, int], ...]:
    return tuple(sorted(pattern.type_counts().items()))


@dataclass
class EngineState:
    """One reduction in flight; owned by a single logical worker."""

    pattern: MolPattern
    chem: Chemistry
    config: ReductionConfig
    rng: random.Random
    tags: TagSource
    ledger: "TokenLedger | None" = None
    step_no: int = 0
    terminated: str | None = None
    records: list[StepRecord] = field(default_factory=list)

    @classmethod
    def start(cls, pattern: MolPattern, chem: Chemistry, config: ReductionConfig,
              ledger: "TokenLedger | None" = None) -> "EngineState":
        if config.hapax and ledger is None:
            # a default supply large enough that runs are bounded by
            # max_steps, not by token starvation
            ledger = TokenLedger.for_pattern(pattern)
            for rw in chem.rewrites:
                ledger.mint(rw, chem, count=max(config.max_steps, 1))
        return cls(
            pattern=pattern,
            chem=chem,
            config=config,
            rng=random.Random(config.seed),
            tags=TagSource.for_pattern(pattern),
            ledger=ledger,
        )


def step(state: EngineState) -> EngineState:
    """One engine step: find matches, select, apply in parallel, comb.

    Mutates and returns `state`.  Sets state.terminated when no match
    exists or the molecule is empty.
    """
    if state.terminated:
        return state
    pattern = state.pattern
    if not pattern.nodes:
        state.terminated = "empty"
        return state
    matches = find_matches(pattern, state.chem)
    if not matches:
        state.terminated = "no-matches"
        return state
    selected = select_matches(matches, state.config, state.rng)
    state.step_no += 1
    nodes_before, edges_before = len(pattern), len(pattern.bound_tags())
    applied: list[str] = []
    if state.config.hapax:
        removed: set[int] = set()
        for m in selected:
            live = shift_match(m, frozenset(removed))
            try:
                pattern, _ = hapax_apply(pattern, live, state.ledger, state.chem)
            except InsufficientTokens:
                continue
            # the two spliced lines sat at live.node_map; later matches
            # shift past them
            removed |= m.nodes
            applied.append(m.describe())
    else:
        pattern = apply_matches(pattern, selected, state.tags, state.chem)
        if state.config.comb == "after-each-step":
            pattern = comb_pass(pattern)
        applied = [m.describe() for m in selected]
    state.pattern = pattern
    state.records.append(
        StepRecord(
            step=state.step_no,
            applied=tuple(applied),
            nodes_before=nodes_before,
            edges_before=edges_before,
            nodes_after=len(pattern),
            edges_after=len(pattern.bound_tags()),
            counts=_counts_tuple(pattern),
        )
    )
    if not pattern.nodes:
        state.terminated = "empty"
    return state


def reduce(
    mol: MolPattern,
    chem: Chemistry,
    config: ReductionConfig,
    ledger: "TokenLedger | None" = None,
    snapshot_every: int = 0,
) -> ReductionTrace:
    """Run step() until no matches remain or max_steps is hit.

    The trace is replayable: identical inputs give a byte-identical
    render().
    """
    state = EngineState.start(mol, chem, config, ledger)
    initial_code = canonical_code(mol)
    snapshots = []
    while state.step_no < config.max_steps and not state.terminated:
        step(state)
        if snapshot_every and not state.terminated and \
                state.step_no % snapshot_every == 0:
            snapshots.append((state.step_no, serialize_mol(state.pattern, "caret")))
    return ReductionTrace(
        chemistry=chem.name,
        config=config,
        initial_code=initial_code,
        records=tuple(state.records),
        final=state.pattern,
        termination=state.terminated or "max-steps",
        snapshots=tuple(snapshots),
    )


# ---------------------------------------------------------------------------
# Hapax mode

class TokenLedger:
    """Holds minted Token1 instances and emitted Token2 remnants, keyed by
    rewrite name.  Token patterns are inert bookkeeping: they obey the tag
    discipline but not orientation."""

    def __init__(self, tag_prefix: str = "k0."):
        self.tag_prefix = tag_prefix
        self._minted = 0
        self.tokens1: dict[str, list[MolPattern]] = {}
        self.tokens2: dict[str, list[MolPattern]] = {}

    @classmethod
    def for_pattern(cls, pattern: MolPattern) -> "TokenLedger":
        nonce = 0
        while any(t.startswith(f"k{nonce}.") for t in pattern.all_tags()):
            nonce += 1
        return cls(f"k{nonce}.")

    def _fresh(self) -> str:
        tag = f"{self.tag_prefix}{self._minted}"
        self._minted += 1
        return tag

    def mint(self, rw: Rewrite, chem: Chemistry, count: int = 1) -> None:
        """Mint Token1 instances for a rewrite: a frozen pattern with
        exactly the RHS's node types, wired closed by pairing the k-th port
        slot with the (S-1-k)-th."""
        for _ in range(count):
            slots = []
            for tname in rw.rhs_types:
                ntype = chem.node_types[tname]
                slots.append([None] * ntype.valence)
            flat = [(i, p) for i, row in enumerate(slots) for p in range(len(row))]
            total = len(flat)
            for k in range(total // 2):
                tag = self._fresh()
                i1, p1 = flat[k]
                i2, p2 = flat[total - 1 - k]
                slots[i1][p1] = tag
                slots[i2][p2] = tag
            if total % 2:
                i1, p1 = flat[total // 2]
                slots[i1][p1] = self._fresh()
            nodes = [
                MolNode(chem.node_types[tname], tuple(row))
                for tname, row in zip(rw.rhs_types, slots)
            ]
            self.tokens1.setdefault(rw.name, []).append(MolPattern(nodes))

    def token1_count(self, name: str) -> int:
        return len(self.tokens1.get(name, []))

    def token2_count(self, name: str) -> int:
        return len(self.tokens2.get(name, []))

    def type_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for pool in (self.tokens1, self.tokens2):
            for patterns in pool.values():
                for pattern in patterns:
                    for tname, n in pattern.type_counts().items():
                        counts[tname] = counts.get(tname, 0) + n
        return counts


def _token_tags(pattern: MolPattern) -> list[str]:
    seen: list[str] = []
    for node in pattern:
        for tag in node.ports:
            if tag not in seen:
                seen.append(tag)
    return seen


def _freeze_token2(
    match: Match, chem: Chemistry, shared: str, pool: list[str]
) -> MolPattern:
    """The Token2 remnant: the LHS's node types, self-wired.  Each line
    carries the vacated contact tag on port 1 (port 0 when 1-valent) and
    pairs its remaining ports left-to-right with recycled tags."""
    rw = match.rewrite
    lines = []
    pool = list(pool)
    for tname in (rw.left, rw.right):
        ntype = chem.node_types[tname]
        v = ntype.valence
        ports: list[str | None] = [None] * v
        shared_at = 0 if v == 1 else 1
        ports[shared_at] = shared
        rest = [p for p in range(v) if p != shared_at]
        while rest:
            if len(rest) >= 2:
                tag = pool.pop(0)
                ports[rest[0]] = tag
                ports[rest[1]] = tag
                rest = rest[2:]
            else:
                ports[rest[0]] = pool.pop(0)
                rest = []
        lines.append(MolNode(ntype, tuple(ports)))
    return MolPattern(lines)


def hapax_apply(
    pattern: MolPattern, match: Match, ledger: TokenLedger, chem: Chemistry
) -> tuple[MolPattern, TokenLedger]:
    """Token-conservative application: LHS + Token1 -> RHS + Token2.

    Consumes one Token1 of the matched rewrite, recycles its tags (plus the
    vacated contact tag) for the RHS's internal edges and the Token2
    remnant, and never draws a fresh name.  Per-type node counts over
    molecule plus ledger are unchanged.
    """
    rw = match.rewrite
    supply = ledger.tokens1.get(rw.name)
    if not supply:
        raise InsufficientTokens(f"no Token1 left for {rw.name}")
    _check_fresh_lines(pattern, match)
    token1 = supply.pop(0)
    pool = _token_tags(token1)
    clash = set(pool) & pattern.all_tags()
    assert not clash, f"token tags collide with molecule: {sorted(clash)}"
    internals = _rhs_internal_placeholders(rw)
    recycled = {p: pool.pop(0) for p in internals}
    kept = [n for k, n in enumerate(pattern.nodes) if k not in match.nodes]
    added = _instantiate_rhs(rw, match.tag_map, recycled, chem)
    shared = match.tag_map[rw.contact_placeholder]
    token2 = _freeze_token2(match, chem, shared, pool)
    ledger.tokens2.setdefault(rw.name, []).append(token2)
    return MolPattern(kept + added), ledger

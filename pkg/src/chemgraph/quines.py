"""Quine-graph detection, empirical profiling, and random eggs.

A graph is a quine when some non-void inclusion-maximal collection of
pairwise non-conflicting matches, fired in parallel and combed, yields a
graph isomorphic to the original.  The detector enumerates maximal
collections (maximal independent sets of the match conflict graph),
replays each, and self-verifies any witness it reports.
"""

from __future__ import annotations

import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

from .chemistry import Chemistry
from .engine import (
    Match,
    ReductionConfig,
    TagSource,
    apply_matches,
    comb_pass,
    conflicts,
    find_matches,
    EngineState,
    step,
)
from .errors import ParityMismatch
from .molcore import Molecule, MolNode, MolPattern, canonical_code


@dataclass(frozen=True)
class QuineVerdict:
    status: str  # quine / not_quine / inconclusive
    witness: tuple[Match, ...] | None
    collections_examined: int
    limit: int

    @property
    def is_quine(self) -> bool:
        return self.status == "quine"


@dataclass(frozen=True)
class QuineProfile:
    trials: int
    horizon: int
    growth_bound: int
    lifespans: tuple[int, ...]  # steps until death, horizon when survived
    outcomes: dict[str, int]  # died / survived_horizon / grew_beyond_bound
    series: tuple[tuple[int, int, float, int], ...]  # step, min, mean, max

    def render(self) -> str:
        lines = [
            f"trials={self.trials}",
            f"horizon={self.horizon}",
            f"growth_bound={self.growth_bound}",
            f"died={self.outcomes['died']}",
            f"survived_horizon={self.outcomes['survived_horizon']}",
            f"grew_beyond_bound={self.outcomes['grew_beyond_bound']}",
            "lifespans=" + ",".join(str(x) for x in self.lifespans),
        ]
        for s, lo, mean, hi in self.series:
            lines.append(f"series step={s} min={lo} mean={mean:.2f} max={hi}")
        return "\n".join(lines) + "\n"


class MaximalCollections:
    """Iterator over the inclusion-maximal non-conflicting match sets, in a
    deterministic order, stopping after `limit` sets.  `truncated` is set
    once iteration ends early."""

    def __init__(self, matches: list[Match], limit: int):
        self.matches = matches
        self.limit = limit
        self.truncated = False
        self.yielded = 0

    def __iter__(self):
        if not self.matches:
            return
        n = len(self.matches)
        clash = [
            [conflicts(self.matches[i], self.matches[j]) for j in range(n)]
            for i in range(n)
        ]

        # classic maximal-independent-set enumeration: include/exclude the
        # first live candidate; excluded candidates are kept only while
        # they stay compatible with everything chosen, so a leaf with a
        # non-empty excluded set is not maximal.
        stack = [(tuple(range(n)), (), ())]  # live candidates, excluded, chosen
        while stack:
            live, excluded, chosen = stack.pop()
            if not live:
                if excluded:
                    continue  # not maximal: an excluded match still fits
                if chosen:
                    if self.yielded >= self.limit:
                        self.truncated = True
                        return
                    self.yielded += 1
                    yield tuple(self.matches[i] for i in chosen)
                continue
            v, rest = live[0], live[1:]
            # exclude v (pushed first so the include branch pops first)
            stack.append((rest, excluded + (v,), chosen))
            # include v
            stack.append(
                (
                    tuple(u for u in rest if not clash[v][u]),
                    tuple(x for x in excluded if not clash[v][x]),
                    chosen + (v,),
                )
            )


def maximal_collections(
    mol: MolPattern,
    chem: Chemistry,
    limit: int = 100_000,
    rules: frozenset[str] | None = None,
) -> MaximalCollections:
    """`rules`, when given, masks the chemistry down to the named rewrites
    before enumerating (a deliberate extension, not a fidelity claim)."""
    matches = find_matches(mol, chem)
    if rules is not None:
        matches = [m for m in matches if m.rewrite.name in rules]
    return MaximalCollections(matches, limit)


def replay_collection(
    mol: MolPattern, collection: tuple[Match, ...], chem: Chemistry
) -> MolPattern:
    """Parallel application of a non-conflicting collection plus a COMB
    pass; Arrows are bookkeeping, not structure."""
    return comb_pass(apply_matches(mol, list(collection), TagSource.for_pattern(mol), chem))


def is_quine(
    mol: MolPattern,
    chem: Chemistry,
    limit: int = 100_000,
    rules: frozenset[str] | None = None,
) -> QuineVerdict:
    """Decide quine-hood by exhaustive maximal-collection enumeration.

    A reported witness is replayed once more and asserted isomorphic; a
    failure there would be an engine bug, not an input problem.
    """
    base = canonical_code(mol)
    enum = maximal_collections(mol, chem, limit, rules)
    examined = 0
    for collection in enum:
        examined += 1
        result = replay_collection(mol, collection, chem)
        if canonical_code(result) == base:
            again = replay_collection(mol, collection, chem)
            assert canonical_code(again) == base, "witness replay diverged"
            return QuineVerdict("quine", collection, examined, limit)
    if enum.truncated:
        return QuineVerdict("inconclusive", None, examined, limit)
    return QuineVerdict("not_quine", None, examined, limit)


def _trial(args) -> tuple[int, int, str, list[int]]:
    mol, chem, config, growth_bound, index = args
    state = EngineState.start(mol, chem, config)
    series = [len(mol)]
    outcome = "survived_horizon"
    while state.step_no < config.max_steps and not state.terminated:
        step(state)
        series.append(len(state.pattern))
        if len(state.pattern) > growth_bound:
            outcome = "grew_beyond_bound"
            break
    if state.terminated:
        outcome = "died"
    return index, state.step_no, outcome, series


def empirical_profile(
    mol: MolPattern,
    chem: Chemistry,
    config: ReductionConfig,
    trials: int,
    growth_bound: int | None = None,
    threads: int = 1,
) -> QuineProfile:
    """Random-reduction survival statistics over independent seeded trials.

    Trial seeds derive from config.seed by trial index, so the profile is
    reproducible from the base seed regardless of thread count.
    """
    assert trials >= 1
    if growth_bound is None:
        growth_bound = max(4 * len(mol), 64)
    jobs = [
        (mol, chem, replace(config, seed=config.seed * 1_000_003 + t),
         growth_bound, t)
        for t in range(trials)
    ]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_trial, jobs))
    else:
        results = [_trial(job) for job in jobs]
    results.sort(key=lambda r: r[0])
    lifespans = tuple(r[1] for r in results)
    outcomes = {"died": 0, "survived_horizon": 0, "grew_beyond_bound": 0}
    for _, _, outcome, _ in results:
        outcomes[outcome] += 1
    length = max(len(r[3]) for r in results)
    series = []
    for s in range(length):
        col = [r[3][s] for r in results if s < len(r[3])]
        series.append((s, min(col), sum(col) / len(col), max(col)))
    return QuineProfile(
        trials=trials,
        horizon=config.max_steps,
        growth_bound=growth_bound,
        lifespans=lifespans,
        outcomes=outcomes,
        series=tuple(series),
    )


def random_egg(
    type_multiset: list[str], chem: Chemistry, rng: random.Random
) -> Molecule:
    """A molecule with exactly the given node types and a uniformly random
    port pairing (out-to-in halves when the chemistry is oriented)."""
    types = [chem.node_types[name] for name in type_multiset]
    tags = (f"e{k}" for k in range(10**9))
    slots: list[list[str | None]] = [[None] * t.valence for t in types]
    if chem.oriented:
        outs = [
            (i, p)
            for i, t in enumerate(types)
            for p in range(t.valence)
            if t.valence_bits[p] == 1
        ]
        ins = [
            (i, p)
            for i, t in enumerate(types)
            for p in range(t.valence)
            if t.valence_bits[p] == 0
        ]
        if len(outs) != len(ins):
            raise ParityMismatch(
                f"{len(outs)} out vs {len(ins)} in half-edges cannot pair"
            )
        rng.shuffle(ins)
        pairs = list(zip(outs, ins))
    else:
        flat = [(i, p) for i, t in enumerate(types) for p in range(t.valence)]
        if len(flat) % 2:
            raise ParityMismatch(f"odd number of half-edges ({len(flat)})")
        rng.shuffle(flat)
        pairs = [(flat[k], flat[k + 1]) for k in range(0, len(flat), 2)]
    for (i1, p1), (i2, p2) in pairs:
        tag = next(tags)
        slots[i1][p1] = tag
        slots[i2][p2] = tag
    return Molecule(
        MolNode(t, tuple(row)) for t, row in zip(types, slots)
    )

"""Untyped lambda terms and their compilation to chemlambda molecules.

Grammar (either backslash or the λ character):

    term := atom+                      applications associate left
    atom := name | "(" term ")" | "\\" name "." term

The compiler emits one L per abstraction, one A per application, a T for
each unused binder, a left-combed fan-out chain (n-1 nodes for a variable
used n times), one FRIN per distinct free variable and one FROUT at the
root.  Binding is resolved by de Bruijn conversion first, so emitted tags
never encode variable names.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .chemistry import Chemistry
from .engine import comb_pass
from .errors import LambdaSyntaxError
from .molcore import Molecule, MolNode, MolPattern


@dataclass(frozen=True)
class Term:
    span: tuple[int, int] = field(compare=False)


@dataclass(frozen=True)
class Var(Term):
    name: str


@dataclass(frozen=True)
class Lam(Term):
    binder: str
    body: Term


@dataclass(frozen=True)
class App(Term):
    fun: Term
    arg: Term


def _is_name_char(c: str) -> bool:
    return c.isalnum() or c in "_'"


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, message: str) -> LambdaSyntaxError:
        return LambdaSyntaxError(message, self.pos)

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str | None:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else None

    def name(self) -> str:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and _is_name_char(self.text[self.pos]):
            self.pos += 1
        if self.pos == start:
            raise self.error("expected a variable name")
        return self.text[start:self.pos]

    def term(self) -> Term:
        """One term: a variable, an abstraction, or a parenthesized
        application group.  Application is written explicitly inside
        parentheses; a group of three or more terms associates left."""
        c = self.peek()
        start = self.pos
        if c is None:
            raise self.error("unexpected end of input")
        if c in ("\\", "λ"):
            self.pos += 1
            binder = self.name()
            if self.peek() != ".":
                raise self.error("expected '.' after binder")
            self.pos += 1
            body = self.term()
            return Lam((start, self.pos), binder, body)
        if c == "(":
            self.pos += 1
            parts = [self.term()]
            while self.peek() != ")":
                if self.peek() is None:
                    raise self.error("expected ')'")
                parts.append(self.term())
            self.pos += 1
            t = parts[0]
            for nxt in parts[1:]:
                t = App((start, self.pos), t, nxt)
            return t
        if _is_name_char(c):
            nm = self.name()
            return Var((start, self.pos), nm)
        raise self.error(f"unexpected character {c!r}")


def parse_lambda(text: str) -> Term:
    p = _Parser(text)
    t = p.term()
    if p.peek() is not None:
        raise p.error("trailing input")
    return t


def free_variables(term: Term, bound: frozenset[str] = frozenset()) -> list[str]:
    """Distinct free variable names, in first-occurrence order."""
    if isinstance(term, Var):
        return [] if term.name in bound else [term.name]
    if isinstance(term, Lam):
        return free_variables(term.body, bound | {term.binder})
    out = free_variables(term.fun, bound)
    for name in free_variables(term.arg, bound):
        if name not in out:
            out.append(name)
    return out


def term_size(term: Term) -> int:
    if isinstance(term, Var):
        return 1
    if isinstance(term, Lam):
        return 1 + term_size(term.body)
    return 1 + term_size(term.fun) + term_size(term.arg)


# ---------------------------------------------------------------------------
# Compilation

class _Emitter:
    def __init__(self, chem: Chemistry, fanout: str):
        self.chem = chem
        self.fan_type = chem.node_types[fanout]
        self.counter = itertools.count()
        self.nodes: list[MolNode] = []

    def fresh(self) -> str:
        return f"t{next(self.counter)}"

    def node(self, type_name: str, *ports: str) -> None:
        self.nodes.append(MolNode(self.chem.node_types[type_name], ports))

    def fan_out(self, source: str, n: int) -> list[str]:
        """Split `source` into n wires with a left-combed chain of n-1 fan
        nodes; n = 0 terminates the wire, n = 1 passes it through."""
        if n == 0:
            self.node("T", source)
            return []
        if n == 1:
            return [source]
        outs = []
        current = source
        for k in range(n - 1):
            first = self.fresh()
            if k < n - 2:
                rest = self.fresh()
                self.nodes.append(MolNode(self.fan_type, (current, first, rest)))
                outs.append(first)
                current = rest
            else:
                last = self.fresh()
                self.nodes.append(MolNode(self.fan_type, (current, first, last)))
                outs.append(first)
                outs.append(last)
        return outs


def _count_uses(term: Term, depth_of: dict[str, list[int]], counts: list[int],
                free_counts: dict[str, int]) -> None:
    if isinstance(term, Var):
        stack = depth_of.get(term.name)
        if stack:
            counts[stack[-1]] += 1
        else:
            free_counts[term.name] = free_counts.get(term.name, 0) + 1
    elif isinstance(term, Lam):
        counts.append(0)
        depth_of.setdefault(term.binder, []).append(len(counts) - 1)
        _count_uses(term.body, depth_of, counts, free_counts)
        depth_of[term.binder].pop()
    else:
        _count_uses(term.fun, depth_of, counts, free_counts)
        _count_uses(term.arg, depth_of, counts, free_counts)


def term_to_mol(
    term: Term, chem: Chemistry | None = None, fanout: str = "FO"
) -> Molecule:
    """Compile a term to a closed chemlambda molecule.

    Node census: #L = abstractions, #A = applications, #T = unused
    binders, #fan = sum over variables used n >= 2 times of n-1, #FRIN =
    distinct free variables, #FROUT = 1.
    """
    if chem is None:
        from .chemistry import builtin

        chem = builtin("chemlambda-v2")
    if fanout not in ("FO", "FOE"):
        raise ValueError("fanout must be FO or FOE")

    # first pass: occurrence counts per binder (in pre-order of Lam nodes)
    # and per free variable
    counts: list[int] = []
    free_counts: dict[str, int] = {}
    _count_uses(term, {}, counts, free_counts)

    em = _Emitter(chem, fanout)

    # free variables enter through FRIN, fanned to their use sites
    free_queues: dict[str, list[str]] = {}
    for name in free_variables(term):
        source = em.fresh()
        em.node("FRIN", source)
        free_queues[name] = em.fan_out(source, free_counts[name])

    lam_index = itertools.count()
    env: dict[str, list[list[str]]] = {}

    def emit(t: Term) -> str:
        if isinstance(t, Var):
            stack = env.get(t.name)
            if stack:
                return stack[-1].pop(0)
            return free_queues[t.name].pop(0)
        if isinstance(t, Lam):
            k = next(lam_index)
            binder_wire = em.fresh()
            occurrences = em.fan_out(binder_wire, counts[k])
            env.setdefault(t.binder, []).append(occurrences)
            body_wire = emit(t.body)
            env[t.binder].pop()
            root = em.fresh()
            em.node("L", body_wire, binder_wire, root)
            return root
        fun_wire = emit(t.fun)
        arg_wire = emit(t.arg)
        out = em.fresh()
        em.node("A", fun_wire, arg_wire, out)
        return out

    top = emit(term)
    em.node("FROUT", top)
    combed = comb_pass(MolPattern(em.nodes))
    return Molecule(combed.nodes)

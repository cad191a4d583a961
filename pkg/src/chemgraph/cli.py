"""Command-line front door.

Inputs are mol files, `-` for stdin, or `lib:NAME` for a packaged library
entry.  Exit codes: 0 ok, 1 bad input, 2 internal assertion failure.
"""

from __future__ import annotations

import json
import random
import sys
from base64 import b32encode

import click

from . import engine, quines
from .chemistry import BUILTIN_NAMES, builtin, load_chemistry
from .d3 import d3_document
from .errors import ChemGraphError
from .lambda_terms import parse_lambda, term_to_mol
from .library import get_entry, load_library
from .molcore import Molecule, canonical_code, cap, parse_mol, serialize_mol


def _fail(message: str, code: int = 1):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _chem(name: str, config_path: str | None):
    if config_path:
        with open(config_path) as handle:
            return load_chemistry(handle.read())
    return builtin(name)


def _read_input(source: str, libdir: str | None = None) -> str:
    if source == "-":
        return sys.stdin.read()
    if source.startswith("lib:"):
        return get_entry(source[4:], libdir).mol_text
    with open(source) as handle:
        return handle.read()


def _parse_weights(text: str | None):
    if not text:
        return ()
    weights = []
    for part in text.split(","):
        group, _, value = part.partition("=")
        if not value:
            raise ChemGraphError(f"bad weight {part!r}, want GROUP=VALUE")
        weights.append((group.strip(), float(value)))
    return tuple(sorted(weights))


def _config(seed, steps, policy, weights, hapax) -> engine.ReductionConfig:
    return engine.ReductionConfig(
        seed=seed,
        max_steps=steps,
        policy=policy,
        weights=_parse_weights(weights),
        hapax=hapax,
    )


@click.group()
def main():
    """Artificial chemistry over mol-notation port graphs."""


def chem_options(fn):
    fn = click.option(
        "--chem", default="chemlambda-v2", show_default=True,
        type=click.Choice(BUILTIN_NAMES), help="packaged chemistry"
    )(fn)
    return click.option(
        "--chem-config", default=None, type=click.Path(exists=True),
        help="load chemistry from a config file instead"
    )(fn)


@main.command()
@click.argument("source")
@chem_options
def validate(source, chem, chem_config):
    """Parse and validate a mol file; exit 0 when clean."""
    try:
        chemistry = _chem(chem, chem_config)
        pattern = parse_mol(_read_input(source), chemistry)
    except ChemGraphError as err:
        _fail(str(err))
    click.echo(
        f"ok: {len(pattern)} nodes, {len(pattern.bound_tags())} edges, "
        f"{len(pattern.free_tags())} free half-edges"
    )


@main.command("reduce")
@click.argument("source")
@chem_options
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--steps", default=100, show_default=True, type=int)
@click.option(
    "--policy", default=engine.RANDOM_POLICY, show_default=True,
    type=click.Choice([engine.RANDOM_POLICY, engine.DETERMINISTIC_POLICY]),
)
@click.option("--weights", default=None, help="e.g. DIST=0.2,BETA=1")
@click.option("--hapax", is_flag=True, help="token-conservative mode")
@click.option("--trace", "trace_out", default=None, type=click.Path(),
              help="write the line-delimited trace here ('-' for stdout)")
@click.option("--snapshot-every", default=0, show_default=True, type=int)
@click.option("--figures", default=None, type=click.Path(),
              help="render matplotlib figures into this directory")
@click.option("--no-cap", is_flag=True, help="refuse patterns with free tags")
def cmd_reduce(source, chem, chem_config, seed, steps, policy, weights, hapax,
               trace_out, snapshot_every, figures, no_cap):
    """Reduce a molecule; print the final mol text."""
    try:
        chemistry = _chem(chem, chem_config)
        pattern = parse_mol(_read_input(source), chemistry)
        if pattern.free_tags():
            if no_cap:
                raise ChemGraphError("input has free half-edges")
            pattern = cap(pattern, chemistry)
        config = _config(seed, steps, policy, weights, hapax)
    except ChemGraphError as err:
        _fail(str(err))
    trace = engine.reduce(pattern, chemistry, config, snapshot_every=snapshot_every)
    rendered = trace.render(chemistry)
    if trace_out == "-":
        click.echo(rendered, nl=False)
    elif trace_out:
        with open(trace_out, "w") as handle:
            handle.write(rendered)
    if figures:
        from .report import render_trace_figures

        for path in render_trace_figures(trace, figures):
            click.echo(f"figure: {path}", err=True)
    if trace_out != "-":
        click.echo(serialize_mol(trace.final))


@main.command()
@click.argument("source")
@chem_options
@click.option("--exact/--empirical", default=True,
              help="exact decision or random-reduction profile")
@click.option("--trials", default=100, show_default=True, type=int)
@click.option("--limit", default=100_000, show_default=True, type=int,
              help="maximal-collection enumeration bound")
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--steps", default=1000, show_default=True, type=int)
@click.option("--figures", default=None, type=click.Path())
@click.option("--libdir", default=None, type=click.Path(exists=True))
@click.option("--rules", default=None,
              help="mask the detector to these rewrites, e.g. L-A,A-FO")
def quine(source, chem, chem_config, exact, trials, limit, seed, steps,
          figures, libdir, rules):
    """Decide quine-hood exactly, or profile survival empirically."""
    try:
        chemistry = _chem(chem, chem_config)
        mol = parse_mol(_read_input(source, libdir), chemistry)
        if mol.free_tags():
            mol = cap(mol, chemistry)
        mask = None
        if rules:
            mask = frozenset(r.strip() for r in rules.split(",") if r.strip())
            known = {rw.name for rw in chemistry.rewrites}
            if not mask <= known:
                raise ChemGraphError(f"unknown rewrites: {sorted(mask - known)}")
    except ChemGraphError as err:
        _fail(str(err))
    if exact:
        verdict = quines.is_quine(mol, chemistry, limit=limit, rules=mask)
        click.echo(f"status={verdict.status}")
        click.echo(f"collections_examined={verdict.collections_examined}")
        if verdict.status == "inconclusive":
            click.echo(f"limit={verdict.limit}")
        if verdict.witness:
            names = ",".join(m.describe() for m in verdict.witness)
            click.echo(f"witness={names}")
    else:
        config = engine.ReductionConfig(seed=seed, max_steps=steps)
        profile = quines.empirical_profile(mol, chemistry, config, trials)
        click.echo(profile.render(), nl=False)
        if figures:
            from .report import render_profile_figures

            for path in render_profile_figures(profile, figures):
                click.echo(f"figure: {path}", err=True)


@main.command()
@click.option("--types", required=True, help="e.g. A,L,FI,FO")
@chem_options
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--count", default=1, show_default=True, type=int)
def egg(types, chem, chem_config, seed, count):
    """Emit random eggs: uniformly wired molecules over the given types."""
    try:
        chemistry = _chem(chem, chem_config)
        multiset = [t.strip() for t in types.split(",") if t.strip()]
        for name in multiset:
            if name not in chemistry.node_types:
                raise ChemGraphError(f"unknown node type {name!r}")
        rng = random.Random(seed)
        for k in range(count):
            mol = quines.random_egg(multiset, chemistry, rng)
            if count > 1:
                # keep the stream's eggs tag-disjoint so the concatenation
                # is itself a valid (multi-component) mol
                rename = {t: f"e{k}.{i}" for i, t in enumerate(sorted(mol.all_tags()))}
                mol = Molecule(
                    type(n)(n.node_type, tuple(rename[t] for t in n.ports))
                    for n in mol
                )
            if k:
                click.echo("")
            click.echo(serialize_mol(mol))
    except ChemGraphError as err:
        _fail(str(err))


@main.command()
@click.argument("term", required=False)
@click.option("--fanout", default="FO", show_default=True,
              type=click.Choice(["FO", "FOE"]))
def lambda2mol(term, fanout):
    """Compile an untyped lambda term to a chemlambda molecule."""
    text = term if term is not None else sys.stdin.read()
    try:
        mol = term_to_mol(parse_lambda(text), builtin("chemlambda-v2"), fanout)
    except ChemGraphError as err:
        _fail(str(err))
    click.echo(serialize_mol(mol))


@main.command("export-d3")
@click.argument("source")
@chem_options
def export_d3(source, chem, chem_config):
    """Emit the force-graph interchange document as JSON."""
    try:
        chemistry = _chem(chem, chem_config)
        pattern = parse_mol(_read_input(source), chemistry)
        mol = cap(pattern, chemistry)
    except ChemGraphError as err:
        _fail(str(err))
    click.echo(json.dumps(d3_document(mol), indent=2))


@main.command()
@click.argument("source")
@chem_options
def code(source, chem, chem_config):
    """Print the canonical share code (base32) of a molecule."""
    try:
        chemistry = _chem(chem, chem_config)
        mol = cap(parse_mol(_read_input(source), chemistry), chemistry)
    except ChemGraphError as err:
        _fail(str(err))
    click.echo(b32encode(canonical_code(mol)).decode())


@main.command()
@click.argument("action", type=click.Choice(["list", "show"]))
@click.argument("entry_id", required=False)
@click.option("--libdir", default=None, type=click.Path(exists=True))
def library(action, entry_id, libdir):
    """List packaged graphs or show one entry."""
    try:
        if action == "list":
            for entry in load_library(libdir).values():
                first = entry.comment.splitlines()[0] if entry.comment else ""
                click.echo(f"{entry.id}\t{entry.chemistry}\t{first}")
        else:
            if not entry_id:
                raise ChemGraphError("library show needs an entry id")
            entry = get_entry(entry_id, libdir)
            click.echo(entry.mol_text, nl=False)
    except (ChemGraphError, KeyError) as err:
        _fail(str(err))


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8753, show_default=True, type=int)
@click.option("--libdir", default=None, type=click.Path(exists=True))
def serve(host, port, libdir):
    """Run the lab server (HTTP API plus step-stream WebSocket)."""
    from .serve import run_server

    run_server(host, port, libdir)


@main.command()
@click.argument("script_file")
@click.option("--url", required=True, help="base URL of a running serve")
def script(script_file, url):
    """Drive a serve session from a JSON-lines command script and print
    the resulting server trace."""
    from .client import run_script

    with open(script_file) as handle:
        lines = [json.loads(line) for line in handle if line.strip()]
    try:
        output = run_script(url, lines)
    except ChemGraphError as err:
        _fail(str(err))
    click.echo(output, nl=False)


if __name__ == "__main__":
    main()

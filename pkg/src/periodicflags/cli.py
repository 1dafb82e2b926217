"""Command-line driver: run verification suites, query codistance, export
apartment graphs, and build flags and frames as JSON files.

All output is deterministic for a fixed seed: reports are JSON with sorted
keys and a schema_version field, so identical invocations produce
byte-identical files.

Exit codes: 0 success, 1 failed checks, 2 bad configuration or parse
errors, 3 no common (twin) apartment, 4 I/O errors.
"""

from __future__ import annotations

import json
import random
import sys

import click

from .apartments import (
    NoCommonApartment,
    common_apartment,
    export_dot,
    standard_frame,
)
from .exactfield import is_prime
from .flags import flag_from_json, make_flag
from .laurent_model import Ambient
from .verify import all_checks, codistance
from .weyl import length, reduced_word

SCHEMA_VERSION = 1

AMBIENT_OF_TYPE = {
    "A": lambda n, q: Ambient(n, q, "linear"),
    "C": lambda n, q: Ambient(2 * n, q, "symplectic"),
    "B": lambda n, q: Ambient(2 * n + 1, q, "orthogonal_odd"),
    "D": lambda n, q: Ambient(2 * n, q, "orthogonal_even"),
}

VARIANT_OF_TYPE = {
    "A": "linear",
    "C": "symplectic",
    "B": "oriflamme_single",
    "D": "oriflamme_double",
}


def _ambient(type_tag: str, n: int, q: int) -> Ambient:
    if not is_prime(q):
        raise click.UsageError(f"q={q} is not prime")
    if type_tag != "A" and q == 2:
        raise click.UsageError(f"type {type_tag} needs an odd modulus")
    if n < 2 or (type_tag == "D" and n < 3):
        raise click.UsageError(f"n={n} too small for type {type_tag}")
    try:
        return AMBIENT_OF_TYPE[type_tag](n, q)
    except ValueError as e:
        raise click.UsageError(str(e))


def _emit(payload, out):
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if out is None:
        click.echo(text, nl=False)
        return
    try:
        with open(out, "w") as fh:
            fh.write(text)
    except OSError as e:
        click.echo(f"cannot write {out}: {e}", err=True)
        sys.exit(4)


def _load_flag(path):
    try:
        with open(path) as fh:
            data = json.load(fh)
        return flag_from_json(data)
    except OSError as e:
        click.echo(f"cannot read {path}: {e}", err=True)
        sys.exit(4)
    except (ValueError, KeyError, TypeError) as e:
        click.echo(f"{path}: {e}", err=True)
        sys.exit(2)


def _type_options(f):
    f = click.option("--type", "type_tag", required=True,
                     type=click.Choice(["A", "B", "C", "D"]),
                     help="Affine type of the flag complex.")(f)
    f = click.option("--n", required=True, type=int,
                     help="Weyl rank (A: rank n; B/C/D: rank 2n or 2n+1).")(f)
    f = click.option("--q", required=True, type=int,
                     help="Prime field size (odd for B/C/D).")(f)
    return f


@click.group()
def main():
    """Periodic flags of lattices: buildings, twin buildings, reports."""


@main.command()
@_type_options
@click.option("--radius", default=2, type=int, show_default=True,
              help="Weyl ball radius for sampled chambers.")
@click.option("--samples", default=8, type=int, show_default=True,
              help="Sample count per check.")
@click.option("--window", default=1, type=int, show_default=True,
              help="Window exponent of the completion vertex.")
@click.option("--seed", default=0, type=int, show_default=True)
@click.option("--out", default=None, type=click.Path(),
              help="Report file (stdout when omitted).")
def verify(type_tag, n, q, radius, samples, window, seed, out):
    """Run the building and twin-building checks, write a JSON report."""
    amb = _ambient(type_tag, n, q)
    if window < 1:
        raise click.UsageError("window must be at least 1")
    reports = all_checks(amb, VARIANT_OF_TYPE[type_tag], radius=radius,
                         samples=samples, seed=seed, window=window)
    payload = {
        "schema_version": SCHEMA_VERSION,
        "config": {"type": type_tag, "n": n, "q": q, "radius": radius,
                   "samples": samples, "seed": seed, "window": window},
        "reports": reports,
        "passed": all(r["passed"] for r in reports),
    }
    _emit(payload, out)
    sys.exit(0 if payload["passed"] else 1)


@main.command("codistance")
@click.argument("flag_plus", type=click.Path(exists=True))
@click.argument("flag_minus", type=click.Path(exists=True))
def codistance_cmd(flag_plus, flag_minus):
    """Weyl-valued codistance between a positive and a negative chamber,
    printed as a generator word."""
    cpos = _load_flag(flag_plus)
    cneg = _load_flag(flag_minus)
    if cpos.side != "positive" or cneg.side != "negative":
        click.echo("expected a positive flag then a negative flag", err=True)
        sys.exit(2)
    if not (cpos.is_full() and cneg.is_full()):
        click.echo("codistance is defined between chambers (full flags)",
                   err=True)
        sys.exit(2)
    try:
        delta = codistance(cpos, cneg)
    except NoCommonApartment as e:
        click.echo(f"no common twin apartment: {e}", err=True)
        sys.exit(3)
    word = reduced_word(delta)
    click.echo(delta.word_str(word) if word else "1")
    click.echo(f"length {length(delta)}")


@main.command()
@_type_options
@click.option("--radius", default=2, type=int, show_default=True)
@click.option("--out", default=None, type=click.Path())
def export(type_tag, n, q, radius, out):
    """DOT graph of the standard apartment ball."""
    amb = _ambient(type_tag, n, q)
    text = export_dot(standard_frame(amb), radius) + "\n"
    if out is None:
        click.echo(text, nl=False)
        return
    try:
        with open(out, "w") as fh:
            fh.write(text)
    except OSError as e:
        click.echo(f"cannot write {out}: {e}", err=True)
        sys.exit(4)


@main.command()
@_type_options
@click.option("--seed", default=0, type=int, show_default=True)
@click.option("--window", default=1, type=int, show_default=True,
              help="Window exponent of the starting vertex lattice.")
@click.option("--side", default="positive", show_default=True,
              type=click.Choice(["positive", "negative"]))
@click.option("--out", default=None, type=click.Path())
def complete(type_tag, n, q, seed, window, side, out):
    """Complete the standard vertex to a seeded random chamber (JSON)."""
    from .flags import complete as complete_flag
    from .laurent_model import involute, standard_positive

    amb = _ambient(type_tag, n, q)
    if window < 1:
        raise click.UsageError("window must be at least 1")
    top = standard_positive(amb, window)
    if side == "negative":
        top = involute(top)
    vertex = make_flag([top], variant=VARIANT_OF_TYPE[type_tag])
    chamber = complete_flag(vertex, random.Random(seed))
    payload = dict(chamber.to_json(), schema_version=SCHEMA_VERSION)
    _emit(payload, out)


@main.command()
@click.argument("flag1", type=click.Path(exists=True))
@click.argument("flag2", type=click.Path(exists=True))
@click.option("--out", default=None, type=click.Path())
def frame(flag1, flag2, out):
    """Common apartment frame of two chambers (JSON)."""
    f1 = _load_flag(flag1)
    f2 = _load_flag(flag2)
    if not (f1.is_full() and f2.is_full()):
        click.echo("common apartments are computed for chambers", err=True)
        sys.exit(2)
    try:
        fr = common_apartment(f1, f2)
    except NoCommonApartment as e:
        click.echo(f"no common apartment: {e}", err=True)
        sys.exit(3)
    except ValueError as e:
        click.echo(str(e), err=True)
        sys.exit(2)
    amb = fr.ambient
    payload = dict(fr.to_json(), schema_version=SCHEMA_VERSION,
                   rank=amb.rank, q=amb.q, variant=amb.variant)
    _emit(payload, out)


if __name__ == "__main__":
    main()

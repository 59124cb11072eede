"""power-ops command line.

    power-ops derive <target> [--order K] [--terms M] [--prec N] [--format text|json]
    power-ops verify [scope] [--golden-dir DIR]
    power-ops normalize "<gamma expression>"

Exit codes: 0 success, 1 formula mismatch, 2 usage error.
"""

from __future__ import annotations

import json
import sys

import click

from .polyring import to_text

TARGETS = ("torsion", "isogeny", "psi3", "relations", "gamma", "k1")


def _emit(records: list[tuple[str, str]], fmt: str, banner: str | None = None) -> None:
    if fmt == "json":
        payload = {"records": dict(records)}
        if banner:
            payload["banner"] = banner
        click.echo(json.dumps(payload, indent=2, sort_keys=False))
        return
    if banner:
        click.echo(f"# {banner}")
    for name, text in records:
        click.echo(f"{name} = {text}")


# extra series records that belong with each derivation target
_EXTRAS = {
    "torsion": ("series.v",),
    "isogeny": ("series.u_prime", "series.v_prime"),
}


def _registry_records(target: str) -> list[tuple[str, str]]:
    from .corpus import registry

    reg = registry()
    ids = sorted(k for k in reg if k.startswith(target + ".")) + list(_EXTRAS.get(target, ()))
    return [(rid, reg[rid][0]()) for rid in ids]


def _with_order(target: str, records: list[tuple[str, str]], order: int | None):
    if order is None:
        return records
    out = dict(records)
    if target == "torsion":
        from .curve import v_series
        out["series.v"] = to_text(v_series(order).to_poly())
    elif target == "isogeny":
        from .isogeny import build_isogeny
        data = build_isogeny(order, order + 3)
        out["series.u_prime"] = to_text(data.u_prime.to_poly())
        out["series.v_prime"] = to_text(data.v_prime.to_poly())
    elif target == "gamma":
        from .dyerlashof import rank_in_degree
        for d in range(order + 1):
            out[f"gamma.rank.{d}"] = str(rank_in_degree(d, bound=max(order, 6)))
    return list(out.items())


def _term(coeff: int, name: str, e: int) -> str:
    if e == 0:
        return str(coeff)
    mono = name if e == 1 else f"{name}^{e}"
    if coeff in (1, -1):
        return ("-" if coeff < 0 else "") + mono
    return f"{coeff}*{mono}"


def _k1(terms: int, prec: int) -> tuple[list[tuple[str, str]], str]:
    from .k1local import (PSI_F_C_PRINTED, PSI_F_H_PRINTED, certified_expansion)

    out = []
    # h^-terms needs alpha through h^-(terms + 3); c^-(2 terms - 1) needs c^-2(terms + 1)
    series = {
        "h": (certified_expansion("h", terms + 3, prec), PSI_F_H_PRINTED, -terms),
        "c": (certified_expansion("c", terms + 1, prec), PSI_F_C_PRINTED, -(2 * terms - 1)),
    }
    for name, (coeffs, printed, lowest) in series.items():
        for e in sorted(coeffs, reverse=True):
            if e < lowest or (name == "c" and e % 2 == 0):
                continue
            tag = "" if e in printed else "  [derived]"
            out.append((f"psiF({name})[{name}^{e}]", _term(coeffs[e], name, e) + tag))
    banner = (f"exact integers through h^-{terms} and c^-{2 * terms - 1}; "
              f"lifts agree at 3^{prec} and 3^{2 * prec}")
    return out, banner


@click.group()
@click.version_option(package_name="artifact")
def main() -> None:
    """Derive and check total power operations at the prime 3."""


@main.command()
@click.argument("target", type=click.Choice(TARGETS))
@click.option("--order", type=click.IntRange(min=1), default=None,
              help="Series order (torsion: v-series, isogeny: u'-order, gamma: max rank degree).")
@click.option("--terms", type=click.IntRange(min=1), default=8, show_default=True,
              help="Number of negative-power terms in the K(1) expansions.")
@click.option("--prec", type=click.IntRange(min=2), default=24, show_default=True,
              help="3-adic digits for the K(1) computation.")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text",
              show_default=True)
def derive(target: str, order: int | None, terms: int, prec: int, fmt: str) -> None:
    """Run a derivation and print canonical formulas."""
    banner = None
    if target == "k1":
        records, banner = _k1(terms, prec)
    else:
        records = _with_order(target, _registry_records(target), order)
    _emit(records, fmt, banner)


@main.command()
@click.argument("scope", default="all")
@click.option("--golden-dir", type=click.Path(exists=True, file_okay=False), default=None,
              help="Read the corpus from this directory instead of the packaged one.")
def verify(scope: str, golden_dir: str | None) -> None:
    """Re-derive every golden record in SCOPE and compare canonical text."""
    from .corpus import CorpusError, report
    from .corpus import verify as run_verify

    try:
        results = run_verify(scope, golden_dir)
    except CorpusError as exc:
        raise click.UsageError(str(exc))
    click.echo(report(results))
    if not all(r.passed for r in results):
        sys.exit(1)


@main.command()
@click.argument("expression")
def normalize(expression: str) -> None:
    """Rewrite a Dyer-Lashof algebra expression to the admissible basis."""
    from .dyerlashof import GammaSyntaxError, normalize_text

    try:
        click.echo(normalize_text(expression))
    except GammaSyntaxError as exc:
        raise click.UsageError(str(exc))


if __name__ == "__main__":
    main()

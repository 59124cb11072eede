"""Write every derivation target to an output directory, in text and JSON."""

import argparse
from pathlib import Path

from click.testing import CliRunner

from power_ops.cli import TARGETS, main


def run(outdir: Path, terms: int) -> None:
    outdir.mkdir(parents=True, exist_ok=True)
    runner = CliRunner()
    for target in TARGETS:
        extra = ["--terms", str(terms)] if target == "k1" else []
        for fmt, suffix in (("text", "txt"), ("json", "json")):
            res = runner.invoke(main, ["derive", target, "--format", fmt, *extra])
            if res.exit_code:
                raise SystemExit(f"derive {target} failed:\n{res.output}")
            (outdir / f"{target}.{suffix}").write_text(res.output)
        print(f"{target}: {len(res.output.splitlines())} lines")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("outdir", type=Path, nargs="?", default=Path("derived"))
    ap.add_argument("--terms", type=int, default=8)
    args = ap.parse_args()
    run(args.outdir, args.terms)

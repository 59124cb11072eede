"""Verify the golden corpus twice and check the reports are byte-identical."""

import subprocess
import sys


def main() -> int:
    cmd = [sys.executable, "-m", "power_ops.cli", "verify", *sys.argv[1:]]
    first = subprocess.run(cmd, capture_output=True)
    second = subprocess.run(cmd, capture_output=True)
    sys.stdout.write(first.stdout.decode())
    if first.stdout != second.stdout:
        print("reports differ between runs", file=sys.stderr)
        return 1
    return first.returncode


if __name__ == "__main__":
    sys.exit(main())

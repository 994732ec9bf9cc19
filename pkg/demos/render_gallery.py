#!/usr/bin/env python3
"""Render SVG box diagrams for catalog systems and tagged coverings."""

import argparse
import pathlib
import subprocess
import sys


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="gallery", help="output directory")
    args = ap.parse_args()
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    jobs = [
        (["render", "--name", "sierpinski", "--m", "5"], "sierpinski_m5.svg"),
        (["render", "--name", "hilbert-square", "--m", "4"], "hilbert_m4.svg"),
        (["render", "--name", "koch", "--m", "4"], "koch_m4.svg"),
        (["render", "--name", "minkowski", "--m", "3"], "minkowski_m3.svg"),
        (["render", "--name", "sierpinski", "--s", "1"], "sierpinski_tagged_s1.svg"),
        (["render", "--name", "arrowhead-pseudo:6", "--m", "6"], "arrowhead_m6.svg"),
    ]
    for argv, fname in jobs:
        dest = out / fname
        cmd = [sys.executable, "-m", "orderedcover.cli"] + argv + ["--out", str(dest)]
        rc = subprocess.run(cmd).returncode
        if rc != 0:
            print(f"render failed ({rc}): {' '.join(argv)}", file=sys.stderr)
            return rc
        print(f"wrote {dest} ({dest.stat().st_size} bytes)")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

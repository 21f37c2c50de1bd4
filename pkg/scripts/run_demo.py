"""Run every config in configs/ through the full pipeline and tabulate the outcome."""

import glob
import json
import logging
import os
import sys

from ufhc.cli import run_pipeline
from ufhc.config import load_config

NAMES = {0: "pass", 1: "construction error", 2: "certificate failure", 3: "not applicable", 4: "budget", 6: "not summable"}


def main(pattern="configs/*.json"):
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(message)s")
    rows = []
    for path in sorted(glob.glob(pattern)):
        cfg = load_config(path)
        out = cfg.output_dir or os.path.join("runs", os.path.splitext(os.path.basename(path))[0])
        status = run_pipeline(cfg, out)
        with open(os.path.join(out, "manifest.json")) as fh:
            man = json.load(fh)
        derived = man.get("derived", {})
        rows.append((os.path.basename(path), status, NAMES.get(status, "?"), derived.get("tau"), derived.get("s0"), man.get("seconds")))
    print(f"{'config':32} {'exit':>4}  {'outcome':20} {'tau':>4} {'s0':>4} {'sec':>8}")
    for name, status, label, tau, s0, sec in rows:
        print(f"{name:32} {status:>4}  {label:20} {str(tau):>4} {str(s0):>4} {str(sec):>8}")


if __name__ == "__main__":
    main(*sys.argv[1:])

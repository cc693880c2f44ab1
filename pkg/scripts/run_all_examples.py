#!/usr/bin/env python3
"""Solve every bundled example scenario and print a one-line summary each.

Artifacts (menu.csv, summary.json) land in out/<scenario-name>/ next to this
script.  Run from anywhere: paths are resolved relative to this file.
"""

import json
import pathlib
import sys

from remenu.cli import main as cli_main

HERE = pathlib.Path(__file__).resolve().parent


def run() -> int:
    failures = 0
    for config in sorted(HERE.glob("*.json")):
        out = HERE / "out" / config.stem
        code = cli_main(["solve", "--config", str(config), "--out", str(out)])
        if code != 0:
            print(f"{config.name}: exit {code}")
            failures += 1
            continue
        summary = json.loads((out / "summary.json").read_text())
        print(
            f"{config.name}: class={summary['contract_class']} "
            f"tau*={summary['tau_star']:.2f} J={summary['objective_value']:.2f} "
            f"assumption_holds={summary['assumption_holds']}"
        )
    return failures


if __name__ == "__main__":
    sys.exit(run())

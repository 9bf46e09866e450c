"""Batch command-line surface: load a scenario, run one command, emit a
deterministic JSON report.

Exit codes: 0 when every check in the report passed, 1 when a check
failed, 2 on input errors (unparseable scenario, violated invariant,
missing fields, or an operation blocked by a point mass).
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .densities import (
    conditionally_atomless,
    density_partition,
    density_vectors,
    mixture,
    null_cells,
    site_witness,
)
from .kernel import hat_family, kernel_atom_scan, pushforward_uniformity_check, system_nodes
from .scenario import (
    Scenario,
    ScenarioError,
    event_to_json,
    format_scalar,
    parse_scenario,
)
from .selftest import report_data, run_all
from .space import InvariantError, MismatchError
from .splitting import (
    AtomObstruction,
    atom_witness,
    is_conditionally_atomless,
    shrink_sequence,
    split,
)
from .uniform import build_dyadic_family, build_uniform, level_scan, level_set

COMMANDS = (
    "check",
    "split",
    "shrink",
    "family",
    "uniform",
    "scan",
    "kernel",
    "densities",
    "selftest",
)


class InputError(ValueError):
    """Scenario is missing something the command needs."""


def _named_set(scenario: Scenario, params: dict, default: str, whole_ok: bool = True):
    explicit = "set" in params
    name = params.get("set", default)
    if name in scenario.sets:
        return name, scenario.sets[name]
    if whole_ok and not explicit:
        return "whole-space", scenario.space.whole_event()
    raise InputError(f"scenario does not define set {name!r}")


def _witness_json(w):
    if w is None:
        return None
    return {
        "fiber": w.fiber,
        "location": format_scalar(w.location),
        "weight": format_scalar(w.weight),
    }


def _cmd_check(scenario: Scenario, opts: dict) -> dict:
    space = scenario.space
    w = atom_witness(space)
    scan = kernel_atom_scan(space)
    return {
        "verdict": "atomless" if w is None else "atom",
        "witness": _witness_json(w),
        "checks": {"kernel-agreement": scan.atomless == (w is None)},
    }


def _cmd_split(scenario: Scenario, opts: dict) -> dict:
    if scenario.h is None:
        raise InputError("split needs an 'h' section")
    name, c = _named_set(scenario, scenario.params, "C")
    b = split(scenario.space, c, scenario.h)
    cond_c = scenario.space.cond_expectation(c)
    cond_b = scenario.space.cond_expectation(b)
    exact = cond_b == tuple(h * v for h, v in zip(scenario.h, cond_c))
    return {
        "set": name,
        "result": event_to_json(b),
        "conditional": [format_scalar(v) for v in cond_b],
        "checks": {"subset": b.is_subset(c), "exact-proportion": exact},
    }


def _cmd_shrink(scenario: Scenario, opts: dict) -> dict:
    name, c = _named_set(scenario, scenario.params, "C")
    n = opts.get("count") or scenario.params.get("n", 5)
    fibers = frozenset(scenario.params.get("fibers", range(scenario.space.n_fibers)))
    chain = shrink_sequence(scenario.space, c, fibers, n)
    conds = [scenario.space.cond_expectation(e) for e in chain]
    nested = all(b.is_subset(a) for a, b in zip(chain, chain[1:]))
    bounded = all(
        0 < cond[i] <= Fraction(1, 2**k) for k, cond in enumerate(conds) for i in fibers
    )
    return {
        "set": name,
        "fibers": sorted(fibers),
        "conditional": [[format_scalar(v) for v in cond] for cond in conds],
        "checks": {"nested": nested, "halving-bounds": bounded},
    }


def _cmd_family(scenario: Scenario, opts: dict) -> dict:
    depth = opts.get("depth") or scenario.params.get("depth", 3)
    family = build_dyadic_family(scenario.space, depth)
    exact = all(
        all(c == t for c in scenario.space.cond_expectation(family.sets[t]))
        for t in family.grid()
    )
    nested = all(
        family.sets[a].is_subset(family.sets[b])
        for a, b in zip(family.grid(), family.grid()[1:])
    )
    return {
        "depth": depth,
        "levels": {
            format_scalar(t): event_to_json(family.sets[t]) for t in family.grid()
        },
        "checks": {"exact-levels": exact, "nested": nested},
    }


def _cmd_uniform(scenario: Scenario, opts: dict) -> dict:
    space = scenario.space
    rv = build_uniform(space)
    grid = opts.get("count") or scenario.params.get("count", 64)
    exact = all(
        all(c == Fraction(k, grid) for c in space.cond_expectation(level_set(rv, Fraction(k, grid))))
        for k in range(1, grid + 1)
    )
    return {
        "cdfs": [
            {"xs": [format_scalar(x) for x in u.xs], "ys": [format_scalar(y) for y in u.ys]}
            for u in rv.cdfs
        ],
        "grid": grid,
        "checks": {"level-masses-exact": exact},
    }


def _cmd_scan(scenario: Scenario, opts: dict) -> dict:
    name, a = _named_set(scenario, scenario.params, "A", whole_ok=False)
    res = level_scan(scenario.space, a)
    if res is None:
        return {"set": name, "level": None, "fibers": [], "checks": {"strict-sandwich": True}}
    t, fibers = res
    from .uniform import set_at_level

    cond_a = scenario.space.cond_expectation(a)
    cond_i = scenario.space.cond_expectation(a.intersect(set_at_level(scenario.space, t)))
    strict = bool(fibers) and all(0 < cond_i[i] < cond_a[i] for i in fibers)
    return {
        "set": name,
        "level": format_scalar(t),
        "fibers": sorted(fibers),
        "checks": {"strict-sandwich": strict},
    }


def _cmd_kernel(scenario: Scenario, opts: dict) -> dict:
    space = scenario.space
    scan = kernel_atom_scan(space)
    out = {
        "verdict": "atomless" if scan.atomless else "atom",
        "atoms": [
            [
                {"location": format_scalar(l), "weight": format_scalar(w)}
                for l, w in fiber_atoms
            ]
            for fiber_atoms in scan.fiber_atoms
        ],
        "checks": {"conditional-agreement": scan.atomless == is_conditionally_atomless(space)},
    }
    if scan.atomless:
        rv = build_uniform(space)
        residuals = pushforward_uniformity_check(space, rv, hat_family(system_nodes(rv)))
        out["checks"]["zero-residuals"] = all(r == 0 for row in residuals for r in row)
    return out


def _cmd_densities(scenario: Scenario, opts: dict) -> dict:
    if scenario.measures is None:
        raise InputError("densities needs a 'measures' section")
    fam = scenario.measures
    base = mixture(fam)
    vectors = density_vectors(fam)
    partition = density_partition(vectors)
    nulls = null_cells(fam)
    normalized = all(
        sum((w * v for w, v in zip(fam.weights, vec)), Fraction(0)) == 1
        for c, vec in enumerate(vectors)
        if c not in nulls
    )
    witness = site_witness(fam)
    return {
        "mixture": [format_scalar(b) for b in base],
        "vectors": [[format_scalar(v) for v in vec] for vec in vectors],
        "blocks": list(partition.blocks),
        "null_cells": sorted(nulls),
        "verdict": "atomless" if conditionally_atomless(fam) else "atom",
        "witness_cell": witness,
        "checks": {"weighted-vectors-normalized": normalized},
    }


def run(command: str, scenario: Scenario | None, **opts) -> dict:
    """Dispatch one command and return the report dictionary."""
    if command == "selftest":
        seed = opts.get("seed")
        seed = 42 if seed is None else seed
        count = opts.get("count") or 200
        return report_data(run_all(seed, count=count), seed=seed, count=count)
    if command not in COMMANDS:
        raise InputError(f"unknown command {command!r}")
    if scenario is None:
        raise InputError(f"command {command!r} needs --scenario")
    handler = {
        "check": _cmd_check,
        "split": _cmd_split,
        "shrink": _cmd_shrink,
        "family": _cmd_family,
        "uniform": _cmd_uniform,
        "scan": _cmd_scan,
        "kernel": _cmd_kernel,
        "densities": _cmd_densities,
    }[command]
    data = handler(scenario, opts)
    data["command"] = command
    data["status"] = "pass" if all(data.get("checks", {}).values()) else "fail"
    return data


def report_to_text(data: dict) -> str:
    return json.dumps(data, sort_keys=True, indent=2) + "\n"


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="condatom",
        description="Exact conditional-atomlessness toolkit over scenario files.",
    )
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--scenario", help="path to a scenario JSON file")
    p.add_argument("--seed", type=int, help="seed for selftest and generators")
    p.add_argument("--depth", type=int, help="dyadic depth for the family command")
    p.add_argument("--count", type=int, help="instance count / grid size / chain length")
    p.add_argument("--out", help="write the report here instead of stdout")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    scenario = None
    try:
        if args.scenario is not None:
            with open(args.scenario, encoding="utf-8") as fh:
                scenario = parse_scenario(fh.read())
        data = run(
            args.command,
            scenario,
            seed=args.seed,
            depth=args.depth,
            count=args.count,
        )
    except (ScenarioError, InvariantError, MismatchError, InputError) as e:
        print(f"condatom: {e}", file=sys.stderr)
        return 2
    except AtomObstruction as e:
        print(f"condatom: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"condatom: {e}", file=sys.stderr)
        return 2
    text = report_to_text(data)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if data["status"] == "pass" else 1


if __name__ == "__main__":
    sys.exit(main())

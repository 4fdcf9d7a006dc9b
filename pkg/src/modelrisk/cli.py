"""Command-line interface: validate configs, run the risk pipeline.

``modelrisk run CONFIG.json [--out DIR]`` executes the five pipeline
steps (discretize, embed, neighbourhood, kernel, risk) and writes a JSON
report plus one CSV of node diagnostics per direction.  All outputs are
bitwise deterministic: rerunning the same config reproduces identical
files.

Exit codes: 0 success, 2 configuration error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass

from .densities import (
    DEFAULT_GRID_N,
    DEFAULT_SPAN,
    FamilyParams,
    OutputFunctional,
    discretize,
    shared_grid,
)
from .errors import ConfigError, ModelRiskError
from .kernel import make_profile, pull_forward
from .neighbourhood import DEFAULT_T_SAMPLES, from_targets
from .risk import RiskReport, RiskRequest, evaluate_risk, norm_key

__all__ = ["RunConfig", "load_config", "run", "write_outputs", "main"]


@dataclass(frozen=True)
class RunConfig:
    """A fully validated run description."""

    base: FamilyParams
    targets: tuple
    profile_kind: str
    profile_t0: float
    profile_width: float
    request: RiskRequest
    span: float
    grid_n: int
    t_samples: int
    out_dir: str


def _need(obj: dict, key: str, ctx: str):
    if key not in obj:
        raise ConfigError(f"{ctx}: missing key {key!r}")
    return obj[key]


def _number(x, ctx: str) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise ConfigError(f"{ctx}: expected a number, got {x!r}")
    return float(x)


def _params(obj, ctx: str) -> FamilyParams:
    if not isinstance(obj, dict):
        raise ConfigError(f"{ctx}: expected an object, got {obj!r}")
    fam = _need(obj, "family", ctx)
    extra = set(obj) - {"family", "mu", "sigma", "s"}
    if extra:
        raise ConfigError(f"{ctx}: unknown keys {sorted(extra)}")
    try:
        return FamilyParams(
            fam,
            _number(_need(obj, "mu", ctx), f"{ctx}.mu"),
            _number(_need(obj, "sigma", ctx), f"{ctx}.sigma"),
            _number(obj["s"], f"{ctx}.s") if "s" in obj else None,
        )
    except ModelRiskError as e:
        raise ConfigError(f"{ctx}: {e}") from e


def _functional(obj) -> OutputFunctional:
    ctx = "functional"
    if not isinstance(obj, dict):
        raise ConfigError(f"{ctx}: expected an object")
    kind = _need(obj, "kind", ctx)
    if kind not in ("var", "mean", "std_dev"):
        raise ConfigError(f"{ctx}: unknown kind {kind!r}")
    extra = set(obj) - {"kind", "beta"}
    if extra:
        raise ConfigError(f"{ctx}: unknown keys {sorted(extra)}")
    try:
        if kind == "var":
            return OutputFunctional("var", beta=_number(_need(obj, "beta", ctx), f"{ctx}.beta"))
        if "beta" in obj:
            raise ConfigError(f"{ctx}: {kind} takes no beta")
        return OutputFunctional(kind)
    except ModelRiskError as e:
        raise ConfigError(f"{ctx}: {e}") from e


def _norms(obj) -> tuple:
    if not isinstance(obj, list) or not obj:
        raise ConfigError("norms: expected a non-empty list")
    out = []
    for n in obj:
        if isinstance(n, str):
            out.append(n)
        elif isinstance(n, dict):
            if n.get("kind") != "sobolev":
                raise ConfigError(f"norms: unknown entry {n!r}")
            extra = set(n) - {"kind", "s", "p"}
            if extra:
                raise ConfigError(f"norms: unknown keys {sorted(extra)}")
            out.append(("sobolev", int(_number(_need(n, "s", "norms"), "norms.s")),
                        _number(_need(n, "p", "norms"), "norms.p")))
        else:
            raise ConfigError(f"norms: unknown entry {n!r}")
    return tuple(out)


def validate_config(doc) -> RunConfig:
    """Validate a parsed JSON document into a :class:`RunConfig`."""
    if not isinstance(doc, dict):
        raise ConfigError("config root must be an object")
    known = {"base", "targets", "kernel", "functional", "norms", "grid", "form", "output"}
    extra = set(doc) - known
    if extra:
        raise ConfigError(f"unknown top-level keys {sorted(extra)}")

    base = _params(_need(doc, "base", "config"), "base")
    raw_targets = _need(doc, "targets", "config")
    if not isinstance(raw_targets, list) or not raw_targets:
        raise ConfigError("targets: need at least one perturbation target")
    targets = tuple(_params(t, f"targets[{i}]") for i, t in enumerate(raw_targets))

    kobj = doc.get("kernel", {"kind": "linear_decreasing"})
    if not isinstance(kobj, dict):
        raise ConfigError("kernel: expected an object")
    extra = set(kobj) - {"kind", "t0", "width"}
    if extra:
        raise ConfigError(f"kernel: unknown keys {sorted(extra)}")
    kind = kobj.get("kind", "linear_decreasing")
    if kind not in ("linear_decreasing", "constant", "gaussian_bump"):
        raise ConfigError(f"kernel: unknown kind {kind!r}")
    t0 = _number(kobj.get("t0", 0.5), "kernel.t0")
    width = _number(kobj.get("width", 0.2), "kernel.width")

    functional = _functional(_need(doc, "functional", "config"))

    try:
        request = RiskRequest(
            functional, _norms(_need(doc, "norms", "config")), doc.get("form", "absolute")
        )
    except ModelRiskError as e:
        raise ConfigError(str(e)) from e

    gobj = doc.get("grid", {})
    if not isinstance(gobj, dict):
        raise ConfigError("grid: expected an object")
    extra = set(gobj) - {"span", "n", "t_samples"}
    if extra:
        raise ConfigError(f"grid: unknown keys {sorted(extra)}")
    span = _number(gobj.get("span", DEFAULT_SPAN), "grid.span")
    if span < DEFAULT_SPAN:
        raise ConfigError(f"grid.span must be >= {DEFAULT_SPAN}, got {span:g}")
    grid_n = gobj.get("n", DEFAULT_GRID_N)
    t_samples = gobj.get("t_samples", DEFAULT_T_SAMPLES)
    for name, val, lo in (("grid.n", grid_n, 16), ("grid.t_samples", t_samples, 2)):
        if isinstance(val, bool) or not isinstance(val, int):
            raise ConfigError(f"{name} must be an integer")
        if val < lo:
            raise ConfigError(f"{name} must be >= {lo}, got {val}")

    oobj = doc.get("output", {})
    if not isinstance(oobj, dict) or set(oobj) - {"dir"}:
        raise ConfigError("output: expected an object with at most a 'dir' key")
    out_dir = oobj.get("dir", "out")
    if not isinstance(out_dir, str) or not out_dir:
        raise ConfigError("output.dir must be a non-empty string")

    return RunConfig(
        base=base,
        targets=targets,
        profile_kind=kind,
        profile_t0=t0,
        profile_width=width,
        request=request,
        span=span,
        grid_n=grid_n,
        t_samples=t_samples,
        out_dir=out_dir,
    )


def load_config(path: str) -> RunConfig:
    """Read and validate a JSON config file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as e:
        raise ConfigError(f"cannot read config {path!r}: {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"config {path!r} is not valid JSON: {e}") from e
    return validate_config(doc)


def run(config: RunConfig) -> RiskReport:
    """Execute the pipeline for a validated config."""
    everyone = (config.base,) + config.targets
    grid = shared_grid(everyone, config.span, config.grid_n)
    p0 = discretize(config.base, grid)
    targets = [discretize(t, grid) for t in config.targets]
    nb = from_targets(p0, targets, config.t_samples)
    profile = make_profile(config.profile_kind, config.profile_t0, config.profile_width)
    kern = pull_forward(profile, nb)
    return evaluate_risk(config.request, p0, kern)


def _report_doc(report: RiskReport, config: RunConfig) -> dict:
    doc = {
        "f_p0": report.f_p0,
        "risk": {norm_key(n): report.values[norm_key(n)] for n in config.request.norms},
        "linf_argmax": None,
        "kernel_residual": report.kernel_residual,
        "distances": list(report.distances),
        "directions": [
            {"index": i, "rho": report.distances[i], "k_at_zero": float(ray.k[0])}
            for i, ray in enumerate(report.rays)
        ],
    }
    if report.linf_argmax is not None:
        doc["linf_argmax"] = {
            "direction": report.linf_argmax[0],
            "t": report.linf_argmax[1],
        }
    return doc


def write_outputs(report: RiskReport, config: RunConfig, out_dir: str) -> list:
    """Write report.json and one CSV per direction; returns the paths."""
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    rpath = os.path.join(out_dir, "report.json")
    with open(rpath, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(_report_doc(report, config), fh, indent=2)
        fh.write("\n")
    paths.append(rpath)
    for i, ray in enumerate(report.rays):
        cpath = os.path.join(out_dir, f"direction_{i:03d}.csv")
        with open(cpath, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("t,d,f,K,w\n")
            for row in zip(ray.t, ray.d, ray.f, ray.k, ray.w):
                fh.write(",".join(repr(float(x)) for x in row) + "\n")
        paths.append(cpath)
    return paths


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="modelrisk",
        description="Norm-based model risk over Fisher-Rao neighbourhoods",
    )
    sub = ap.add_subparsers(dest="command", required=True)
    v = sub.add_parser("validate", help="validate a config file and exit")
    v.add_argument("config")
    r = sub.add_parser("run", help="run the pipeline and write outputs")
    r.add_argument("config")
    r.add_argument("--out", default=None, help="output directory (default: config output.dir)")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2

    if args.command == "validate":
        print("ok")
        return 0

    try:
        report = run(config)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except ModelRiskError as e:
        print(f"numeric error: {e}", file=sys.stderr)
        return 3

    out_dir = args.out if args.out is not None else config.out_dir
    paths = write_outputs(report, config, out_dir)
    print(f"f(p0) = {report.f_p0!r}")
    for n in config.request.norms:
        key = norm_key(n)
        print(f"Z_{key} = {report.values[key]!r}")
    if report.linf_argmax is not None:
        print(f"linf argmax: direction {report.linf_argmax[0]}, t = {report.linf_argmax[1]!r}")
    for p in paths:
        print(f"wrote {p}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Batch verification front end.

Verbs: ``scenario`` (one state, chosen relations), ``sweep`` (parameter
ranges or seeded random states), ``validate`` (config file diagnostics),
``schema`` (the JSON schema for configs and reports).

Exit codes: 0 the run completed (inequality verdicts are data, not
failures), 1 configuration error, 2 a non-finite value was produced.

Random sweeps draw from numpy's PCG64 (``np.random.default_rng(seed)``)
with a fixed draw order, so a seed pins the byte content of the report.
"""

import argparse
import concurrent.futures
import csv
import io
import json
import sys

import numpy as np

from . import operators, oracle, relations, states
from .operators import COS_PHI, LZ, PHI, SIN_PHI, UnsupportedObservable
from .relations import TOL_COMMUTATOR, TOL_IDENTITY, identity_report

SCHEMA_VERSION = 1

RELATION_REGISTRY = (
    "csf",
    "rsur",
    "condition19",
    "decomposition",
    "boundary",
    "gram",
    "eq8-sin",
    "eq8-cos",
    "eq9-trig",
    "eq22",
    "eq23",
    "eq24",
    "moments",
    "commutator",
)

FAMILIES = ("scr", "qtp", "sphere", "custom")

GRAM_SET = (LZ, PHI, SIN_PHI, COS_PHI)


class ConfigError(Exception):
    pass


# -- state construction --------------------------------------------------------


def _build_state(family, params):
    if family == "scr":
        return states.scr_eigenstate(
            int(params.get("m", 0)),
            truncation=int(params.get("truncation", 64)),
            hbar=float(params.get("hbar", 1.0)),
        )
    if family == "qtp":
        return states.qtp_eigenstate(
            int(params.get("n", 0)),
            inertia=float(params.get("J", 1.0)),
            frequency=float(params.get("omega", 1.0)),
            truncation=int(params.get("truncation", 64)),
            hbar=float(params.get("hbar", 1.0)),
        )
    if family == "sphere":
        if "l" not in params:
            raise ConfigError("missing parameter 'l' for the sphere family")
        if "coefficients" in params:
            coeffs = {int(k): complex(v[0], v[1]) for k, v in params["coefficients"].items()}
        else:
            coeffs = {int(params.get("m", 0)): 1.0}
        try:
            return states.sphere_state(int(params["l"]), coeffs, hbar=float(params.get("hbar", 1.0)))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    if family == "custom":
        path = params.get("coeffs")
        if not path:
            raise ConfigError("custom family needs --coeffs <json-file>")
        try:
            return states.load(path)
        except (OSError, ValueError, KeyError) as exc:
            raise ConfigError(f"cannot load state from {path}: {exc}") from None
    raise ConfigError(f"unknown family {family!r}")


# -- relation evaluation -------------------------------------------------------


def _not_applicable(name, reason):
    return {"relation": name, "status": "not-applicable", "reason": reason}


def evaluate_relation(name, state, resolution=None):
    """One registry relation on one state.

    Returns (entry, mismatch_json) where mismatch_json is set only for
    condition19.
    """
    try:
        if name == "csf":
            return relations.csf(LZ, PHI, state).to_json(), None
        if name == "rsur":
            return relations.rsur(LZ, PHI, state).to_json(), None
        if name == "condition19":
            mm = relations.adjointness_mismatch(LZ, PHI, state)
            entry = identity_report(
                "condition19",
                mm.max_modulus,
                TOL_IDENTITY,
                {"mismatch_ab": complex(mm.entries[0, 1])},
            ).to_json()
            return entry, mm.to_json()
        if name == "decomposition":
            res = relations.covariance_decomposition(LZ, PHI, state)
            details = {
                "symmetric": res.symmetric,
                "antisymmetric": res.antisymmetric,
                "mismatch_max": res.mismatch_max,
            }
            if not res.applicable:
                entry = _not_applicable(name, "adjointness mismatch above threshold")
                entry["details"] = details
                return entry, None
            return identity_report(name, res.residual, TOL_IDENTITY, details).to_json(), None
        if name == "boundary":
            return relations.boundary_bound(state).to_json(), None
        if name == "gram":
            return relations.gram_det(GRAM_SET, state).to_json(), None
        if name in relations.ADJUSTED_PRESETS:
            return relations.adjusted_relation(name, state).to_json(), None
        if name == "eq22":
            if state.family != "periodic":
                return _not_applicable(name, "sharp-rotation identity, circle family only"), None
            mm = relations.adjointness_mismatch(LZ, PHI, state)
            dev = abs(mm.entries[0, 1] - 1j * state.hbar)
            details = {"mismatch_ab": complex(mm.entries[0, 1]), "target": 1j * state.hbar}
            return identity_report(name, dev, TOL_IDENTITY, details).to_json(), None
        if name == "eq23":
            if state.family != "oscillator":
                return _not_applicable(name, "pendulum identity, line family only"), None
            mm = relations.adjointness_mismatch(LZ, PHI, state)
            details = {"mismatch_ab": complex(mm.entries[0, 1])}
            return identity_report(name, abs(mm.entries[0, 1]), TOL_IDENTITY, details).to_json(), None
        if name == "eq24":
            if state.family != "sphere":
                return _not_applicable(name, "sphere family only"), None
            info = relations.sphere_anomaly(state)
            entry = {
                "relation": name,
                "lhs": 0.0,
                "rhs": 0.0,
                "slack": 0.0,
                "satisfied": True,
                "tolerance": 0.0,
                "details": {
                    "direct_mismatch": relations._cnum(info["direct_mismatch"]),
                    "bracket_formula": relations._cnum(info["bracket_formula"]),
                    "discrepancy": info["discrepancy"],
                },
            }
            return entry, None
        if name == "moments":
            details = {
                "mean_Lz": operators.mean(LZ, state),
                "std_Lz": operators.std_dev(LZ, state),
                "mean_Phi": operators.mean(PHI, state),
                "std_Phi": operators.std_dev(PHI, state),
            }
            if state.family == "oscillator":
                details["mean_energy"] = operators.qtp_energy_mean(state)
            entry = {
                "relation": name,
                "lhs": 0.0,
                "rhs": 0.0,
                "slack": 0.0,
                "satisfied": True,
                "tolerance": 0.0,
                "details": details,
            }
            return entry, None
        if name == "commutator":
            if state.family not in ("periodic", "oscillator"):
                return _not_applicable(name, "1D families only"), None
            residual = operators.commutator_residual(state, resolution or 1024)
            return (
                identity_report(name, residual, TOL_COMMUTATOR, {"residual": residual}).to_json(),
                None,
            )
    except (UnsupportedObservable, TypeError) as exc:
        return _not_applicable(name, str(exc)), None
    raise ConfigError(f"unknown relation {name!r}")


def _jsonable(value):
    if isinstance(value, complex):
        return relations._cnum(value)
    if isinstance(value, np.ndarray):
        return [[relations._cnum(z) for z in row] for row in value]
    if isinstance(value, (np.floating, np.integer)):
        return float(value)
    return value


def _oracle_annotate(entry, state, name, resolution=None):
    """Attach the oracle's parallel values and their maximum deviation."""
    if entry.get("status") == "not-applicable":
        return entry
    try:
        ovals = oracle.relation_values(state, name, resolution=resolution)
    except (ValueError, TypeError) as exc:
        entry["oracle"] = {"unavailable": str(exc)}
        return entry
    delta = 0.0
    if name in ("csf", "rsur", "boundary", "gram", "eq8-sin", "eq8-cos", "eq9-trig"):
        delta = max(abs(entry["lhs"] - ovals["lhs"]), abs(entry["rhs"] - ovals["rhs"]))
    elif name == "condition19":
        spectral = entry["details"]["mismatch_ab"]
        delta = abs(complex(spectral["re"], spectral["im"]) - ovals["mismatch_ab"])
    elif name in ("eq22", "eq23"):
        spectral = entry["details"]["mismatch_ab"]
        delta = abs(complex(spectral["re"], spectral["im"]) - ovals["mismatch_ab"])
    elif name == "eq24":
        spectral = entry["details"]["direct_mismatch"]
        delta = abs(complex(spectral["re"], spectral["im"]) - ovals["direct_mismatch"])
    elif name == "moments":
        for key, val in ovals.items():
            if key in entry["details"]:
                delta = max(delta, abs(entry["details"][key] - val))
    elif name == "decomposition":
        for key in ("symmetric", "antisymmetric"):
            delta = max(delta, abs(entry["details"][key] - ovals[key]))
    elif name == "commutator":
        delta = abs(entry["details"]["residual"] - ovals["residual"])
    entry["oracle"] = {k: _jsonable(v) for k, v in ovals.items()}
    entry["oracle_delta"] = float(delta)
    return entry


def run_scenario(config):
    """Evaluate one configured scenario into a report document."""
    family = config["family"]
    params = config.get("parameters", {})
    names = config.get("relations") or ["csf", "rsur", "condition19", "moments"]
    for name in names:
        if name not in RELATION_REGISTRY:
            raise ConfigError(f"unknown relation {name!r}")
    state = _build_state(family, params)
    reports = []
    mismatch = None
    for name in names:
        entry, mm = evaluate_relation(name, state, resolution=config.get("resolution"))
        if config.get("oracle"):
            entry = _oracle_annotate(entry, state, name, resolution=config.get("resolution"))
        reports.append(entry)
        if mm is not None:
            mismatch = mm
    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": "scenario",
        "family": family,
        "params": {k: v for k, v in sorted(params.items()) if k != "coefficients"},
        "state": states.to_json(state),
        "reports": reports,
        "mismatch": mismatch,
    }
    return doc


# -- CLI plumbing ---------------------------------------------------------------


def _parse_range(text):
    if ".." in text:
        lo, hi = text.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(text)]


def _add_common(sub):
    sub.add_argument("--hbar", type=float, default=1.0)
    sub.add_argument("--J", dest="J", type=float, default=1.0, help="moment of inertia")
    sub.add_argument("--omega", type=float, default=1.0, help="oscillation frequency")
    sub.add_argument("--coeffs", help="state coefficient file (JSON)")
    sub.add_argument("--relations", default="csf,rsur,condition19,moments")
    sub.add_argument("--oracle", action="store_true", help="attach grid-oracle cross checks")
    sub.add_argument("--format", choices=("json", "csv"), default="json")
    sub.add_argument("--seed", type=int, default=0, help="PCG64 seed for random states")
    sub.add_argument("--jobs", type=int, default=1)
    sub.add_argument("--resolution", type=int, default=None, help="grid resolution override")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="angulab",
        description="Uncertainty-relation checks for the angular momentum / azimuthal angle pair",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    sc = subs.add_parser("scenario", help="run the named relations on one state")
    sc.add_argument("family", nargs="?", choices=FAMILIES)
    sc.add_argument("--config", help="scenario config file (JSON)")
    sc.add_argument("--m", type=str, default=None, help="circle mode index / sphere mode")
    sc.add_argument("--n", type=str, default=None, help="pendulum quantum number")
    sc.add_argument("--l", type=int, default=None, help="orbital number")
    _add_common(sc)

    sw = subs.add_parser("sweep", help="run relations across a parameter range or random states")
    sw.add_argument("family", choices=FAMILIES)
    sw.add_argument("--m", type=str, default=None, help="range a..b of circle modes")
    sw.add_argument("--n", type=str, default=None, help="range a..b of pendulum numbers")
    sw.add_argument("--l", type=int, default=None)
    sw.add_argument("--random", type=int, default=None, help="number of seeded random states")
    _add_common(sw)

    va = subs.add_parser("validate", help="check a scenario config file")
    va.add_argument("path")

    subs.add_parser("schema", help="print the config/report JSON schema")
    return parser


def _config_from_args(args):
    if getattr(args, "config", None):
        try:
            with open(args.config, encoding="utf-8") as fh:
                config = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
        diags = validate_config_doc(config)
        if diags:
            raise ConfigError("; ".join(diags))
        return config
    if args.family is None:
        raise ConfigError("scenario needs a family or --config")
    params = {"hbar": args.hbar}
    if args.family == "scr":
        params["m"] = int(args.m) if args.m is not None else 0
    elif args.family == "qtp":
        params["n"] = int(args.n) if args.n is not None else 0
        params["J"] = args.J
        params["omega"] = args.omega
    elif args.family == "sphere":
        if args.l is None:
            raise ConfigError("sphere scenarios need --l")
        params["l"] = args.l
        if args.coeffs:
            doc = _read_coeff_file(args.coeffs)
            params["coefficients"] = doc
        elif args.m is not None:
            params["m"] = int(args.m)
        else:
            params["m"] = 0
    elif args.family == "custom":
        params["coeffs"] = args.coeffs
    return {
        "family": args.family,
        "parameters": params,
        "relations": [r.strip() for r in args.relations.split(",") if r.strip()],
        "oracle": bool(args.oracle),
        "resolution": args.resolution,
        "format": args.format,
        "seed": args.seed,
    }


def _read_coeff_file(path):
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read coefficients {path}: {exc}") from None
    if isinstance(doc, dict) and "coefficients" in doc:
        entries = doc["coefficients"]
    else:
        entries = doc
    return {str(int(k)): [float(re), float(im)] for k, re, im in entries}


def validate_config(path):
    """Diagnostics for a config file; an empty list means well-formed."""
    try:
        with open(path, encoding="utf-8") as fh:
            config = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        return [f"unreadable config: {exc}"]
    return validate_config_doc(config)


def validate_config_doc(config):
    """Human-readable diagnostics for a scenario config document."""
    diags = []
    if not isinstance(config, dict):
        return ["config must be a JSON object"]
    family = config.get("family")
    if family not in FAMILIES:
        diags.append(f"unknown family {family!r}")
        return diags
    params = config.get("parameters")
    if not isinstance(params, dict):
        diags.append("missing parameter block")
        return diags
    required = {
        "scr": ("m", "hbar"),
        "qtp": ("n", "J", "omega", "hbar"),
        "sphere": ("l", "hbar"),
        "custom": ("coeffs",),
    }[family]
    for key in required:
        if key not in params:
            diags.append(f"missing parameter {key!r} for family {family!r}")
    if family == "sphere" and "l" in params and "coefficients" in params:
        l = int(params["l"])
        bad = [k for k in params["coefficients"] if abs(int(k)) > l]
        if bad:
            diags.append(f"coefficient indices exceed l={l}: {sorted(bad)}")
    for name in config.get("relations", []):
        if name not in RELATION_REGISTRY:
            diags.append(f"unknown relation {name!r}")
    fmt = config.get("format", "json")
    if fmt not in ("json", "csv"):
        diags.append(f"unknown format {fmt!r}")
    return diags


def emit_schema():
    number = {"type": "number"}
    cnum = {
        "type": "object",
        "properties": {"re": number, "im": number},
        "required": ["re", "im"],
    }
    report = {
        "type": "object",
        "properties": {
            "relation": {"type": "string", "enum": list(RELATION_REGISTRY)},
            "lhs": number,
            "rhs": number,
            "slack": number,
            "satisfied": {"type": "boolean"},
            "tolerance": number,
            "details": {"type": "object", "additionalProperties": True},
            "status": {"type": "string", "enum": ["not-applicable"]},
            "reason": {"type": "string"},
            "oracle": {"type": "object"},
            "oracle_delta": number,
        },
        "required": ["relation"],
    }
    config = {
        "type": "object",
        "properties": {
            "family": {"type": "string", "enum": list(FAMILIES)},
            "parameters": {"type": "object"},
            "relations": {"type": "array", "items": {"type": "string"}},
            "oracle": {"type": "boolean"},
            "resolution": {"type": ["integer", "null"]},
            "format": {"type": "string", "enum": ["json", "csv"]},
            "seed": {"type": "integer"},
        },
        "required": ["family", "parameters"],
    }
    return {
        "schema_version": SCHEMA_VERSION,
        "complex_number": cnum,
        "config": config,
        "relation_report": report,
    }


def _sweep_items(args):
    """(params, state) pairs in deterministic order."""
    items = []
    if args.random is not None:
        rng = np.random.default_rng(args.seed)
        for i in range(args.random):
            if args.family == "scr":
                state = states.random_periodic(rng, hbar=args.hbar)
            elif args.family == "qtp":
                state = states.random_oscillator(
                    rng, inertia=args.J, frequency=args.omega, hbar=args.hbar
                )
            elif args.family == "sphere":
                if args.l is None:
                    raise ConfigError("random sphere sweeps need --l")
                state = states.random_sphere(rng, args.l, hbar=args.hbar)
            else:
                raise ConfigError("random sweeps support scr, qtp, and sphere")
            items.append(({"random": i, "seed": args.seed}, state))
        return items
    if args.family == "scr":
        if args.m is None:
            raise ConfigError("scr sweeps need --m a..b or --random")
        for m in _parse_range(args.m):
            items.append(({"m": m}, states.scr_eigenstate(m, hbar=args.hbar)))
    elif args.family == "qtp":
        if args.n is None:
            raise ConfigError("qtp sweeps need --n a..b or --random")
        for n in _parse_range(args.n):
            items.append(
                (
                    {"n": n},
                    states.qtp_eigenstate(
                        n, inertia=args.J, frequency=args.omega, hbar=args.hbar
                    ),
                )
            )
    elif args.family == "sphere":
        if args.l is None or args.m is None:
            raise ConfigError("sphere sweeps need --l and --m a..b, or --random")
        for m in _parse_range(args.m):
            items.append(({"l": args.l, "m": m}, states.sphere_state(args.l, {m: 1.0}, hbar=args.hbar)))
    else:
        raise ConfigError("custom states are for scenario runs")
    return items


def _evaluate_item(index, params, state, names, args):
    reports = []
    mismatch = None
    for name in names:
        entry, mm = evaluate_relation(name, state, resolution=args.resolution)
        if args.oracle:
            entry = _oracle_annotate(entry, state, name, resolution=args.resolution)
        reports.append(entry)
        if mm is not None:
            mismatch = mm
    return {"index": index, "params": params, "reports": reports, "mismatch": mismatch}


def run_sweep(args):
    names = [r.strip() for r in args.relations.split(",") if r.strip()]
    for name in names:
        if name not in RELATION_REGISTRY:
            raise ConfigError(f"unknown relation {name!r}")
    items = _sweep_items(args)
    jobs = max(1, args.jobs)
    if jobs == 1:
        entries = [
            _evaluate_item(i, params, state, names, args)
            for i, (params, state) in enumerate(items)
        ]
    else:
        with concurrent.futures.ThreadPoolExecutor(max_workers=jobs) as pool:
            futures = [
                pool.submit(_evaluate_item, i, params, state, names, args)
                for i, (params, state) in enumerate(items)
            ]
            entries = [f.result() for f in futures]
    entries.sort(key=lambda e: e["index"])
    return {
        "schema_version": SCHEMA_VERSION,
        "command": "sweep",
        "family": args.family,
        "seed": args.seed,
        "count": len(entries),
        "items": entries,
    }


def _sweep_csv(doc, oracle_enabled):
    buf = io.StringIO()
    cols = ["index", "family", "params", "relation", "lhs", "rhs", "slack", "satisfied"]
    if oracle_enabled:
        cols.append("oracle_delta")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(cols)
    for item in doc["items"]:
        ptext = ";".join(f"{k}={v}" for k, v in sorted(item["params"].items()))
        for entry in item["reports"]:
            if entry.get("status") == "not-applicable":
                row = [item["index"], doc["family"], ptext, entry["relation"], "", "", "", "not-applicable"]
            else:
                row = [
                    item["index"],
                    doc["family"],
                    ptext,
                    entry["relation"],
                    repr(entry["lhs"]),
                    repr(entry["rhs"]),
                    repr(entry["slack"]),
                    entry["satisfied"],
                ]
            if oracle_enabled:
                row.append(repr(entry.get("oracle_delta", "")) if entry.get("oracle_delta") is not None else "")
            writer.writerow(row)
    return buf.getvalue()


def _check_finite(obj, path="report"):
    if isinstance(obj, dict):
        for key, val in obj.items():
            _check_finite(val, f"{path}.{key}")
    elif isinstance(obj, (list, tuple)):
        for i, val in enumerate(obj):
            _check_finite(val, f"{path}[{i}]")
    elif isinstance(obj, float) and not np.isfinite(obj):
        raise ArithmeticError(f"non-finite value at {path}")


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "scenario":
            config = _config_from_args(args)
            doc = run_scenario(config)
            _check_finite(doc)
            print(json.dumps(doc, sort_keys=True, indent=2))
            return 0
        if args.command == "sweep":
            doc = run_sweep(args)
            _check_finite(doc)
            if args.format == "csv":
                sys.stdout.write(_sweep_csv(doc, args.oracle))
            else:
                print(json.dumps(doc, sort_keys=True, indent=2))
            return 0
        if args.command == "validate":
            diags = validate_config(args.path)
            for diag in diags:
                print(diag)
            return 1 if diags else 0
        if args.command == "schema":
            print(json.dumps(emit_schema(), sort_keys=True, indent=2))
            return 0
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ArithmeticError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())

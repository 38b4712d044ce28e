"""Scenario runner: config ingestion, verdicts, CSV/SVG artifacts.

Usage:
    rootlift run <config.json> [--samples N] [--out DIR] [--seed S]
                 [--svg] [--stability]
    rootlift builtin <example1|example2|example3|torus|graphdemo> [flags]

Exit codes: 0 on success, 2 when a verdict contradicts the scenario's
declared expectation (or fails resolution-stability), 1 on runtime or
config errors.  Outputs are byte-deterministic for a fixed config+seed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import _kernels, figures, monodromy, scenarios
from .base import identity_selfmap, make_circle, make_graph, make_interval, make_torus2, sample_selfmap
from .bundle import (DEFAULT_TOL, Tolerances, build_bundle, is_admissible,
                     poly_from_exprs, poly_from_roots, pullback_polynomial)
from .closedness import closedness_report, has_root
from .extend import LiftProblem, decide_lift, decide_subalgebra
from ._kernels import residuals

SCHEMA = {
    "type": "object",
    "required": ["name", "base"],
    "additionalProperties": False,
    "properties": {
        "name": {"type": "string"},
        "seed": {"type": "integer"},
        "base": {
            "type": "object",
            "required": ["kind"],
            "additionalProperties": False,
            "properties": {
                "kind": {"enum": ["interval", "circle", "torus2", "graph"]},
                "samples": {"type": "integer", "minimum": 2},
                "shape": {"type": "array", "minItems": 2, "maxItems": 2,
                          "items": {"type": "integer", "minimum": 3}},
                "vertices": {"type": "integer", "minimum": 1},
                "edges": {"type": "array",
                          "items": {"type": "array", "minItems": 2, "maxItems": 2,
                                    "items": {"type": "integer", "minimum": 0}}},
                "samples_per_edge": {"type": "integer", "minimum": 2},
            },
        },
        "polynomial": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "coefficients": {"type": "array", "minItems": 2,
                                 "items": {"type": "string"}},
                "roots": {"type": "array", "minItems": 2,
                          "items": {"type": "string"}},
            },
        },
        "selfmap": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "expr": {"type": "string"},
                "exprs": {"type": "array", "minItems": 2, "maxItems": 2,
                          "items": {"type": "string"}},
                "identity": {"type": "boolean"},
                "continuity_bound": {"type": "number"},
            },
        },
        "analyses": {
            "type": "array",
            "items": {"enum": ["bundle", "strips", "cole", "ah",
                               "cross_checks", "closedness", "torus_controls"]},
        },
        "assertions": {"enum": ["crossing_quintic"]},
        "expect": {"type": "object",
                   "additionalProperties": {"type": "string"}},
        "resolutions": {"type": "array", "minItems": 1,
                        "items": {"type": "integer", "minimum": 2}},
    },
}


class ScenarioError(ValueError):
    pass


def validate_config(config: dict) -> None:
    import jsonschema

    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(config), key=lambda e: e.json_path)
    if errors:
        lines = [f"  {e.json_path}: {e.message}" for e in errors]
        raise ScenarioError("config does not match the scenario schema:\n"
                            + "\n".join(lines))
    analyses = config.get("analyses", [])
    kind = config["base"]["kind"]
    if "strips" in analyses and kind != "circle":
        raise ScenarioError("$.analyses: 'strips' needs a circle base")
    if "closedness" in analyses and kind != "graph":
        raise ScenarioError("$.analyses: 'closedness' needs a graph base")
    if "torus_controls" in analyses and kind != "torus2":
        raise ScenarioError("$.analyses: 'torus_controls' needs a torus2 base")
    if any(a in analyses for a in ("cole", "ah", "cross_checks")):
        if "polynomial" not in config or "selfmap" not in config:
            raise ScenarioError(
                "$.analyses: extension analyses need 'polynomial' and 'selfmap'")


def _scaled_base(spec: dict, factor: int, override: int | None):
    kind = spec["kind"]
    if kind == "interval":
        n = override or spec.get("samples", 201)
        n = (n - 1) * factor + 1
        return make_interval(n), n
    if kind == "circle":
        n = override or spec.get("samples", 240)
        n = n * factor
        return make_circle(n), n
    if kind == "torus2":
        shape = spec.get("shape", [16, 16])
        n = (override or shape[0]) * factor
        m = (override or shape[1]) * factor
        return make_torus2(n, m), n * m
    if kind == "graph":
        k = (override or spec.get("samples_per_edge", 8)) * factor
        edges = [tuple(e) for e in spec.get("edges", [])]
        base = make_graph(spec.get("vertices", 1), edges, k)
        return base, base.n_samples
    raise ScenarioError(f"unknown base kind {kind!r}")


def _check_coefficient_continuity(poly):
    """Factored scenarios must expand to continuous sampled coefficients.

    Root curves that fail to close up (the multiset at the seam differs)
    leave an O(1) coefficient jump that would silently corrupt every
    downstream verdict; reject them at load time instead.
    """
    pv = poly.coeff_values
    edges = np.asarray(poly.base.edges, dtype=np.intp)
    jumps = np.max(np.abs(pv[edges[:, 1]] - pv[edges[:, 0]]), axis=1)
    scale = 1.0 + float(np.max(np.abs(pv)))
    typical = float(np.quantile(jumps, 0.9))
    worst = int(np.argmax(jumps))
    if jumps[worst] > max(25.0 * typical, 1e-6 * scale):
        raise ScenarioError(
            f"$.polynomial.roots: expanded coefficients jump by "
            f"{jumps[worst]:.3g} across edge {worst} (typical {typical:.3g}); "
            "the root curves do not close up into continuous coefficients")


def _build_selfmap(base, spec: dict):
    if spec.get("identity"):
        return identity_selfmap(base)
    bound = spec.get("continuity_bound", 2.0)
    if base.kind == "circle" and "expr" in spec:
        # square-root-steep warps need a resolution-scaled bound
        bound = max(bound, scenarios.time_warp_bound(base.n_samples)
                    if "sqrt" in spec["expr"] else bound)
    if "exprs" in spec:
        return sample_selfmap(base, tuple(spec["exprs"]), continuity_bound=bound)
    return sample_selfmap(base, spec["expr"], continuity_bound=bound)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.complexfloating, complex)):
        z = complex(obj)
        return [z.real, z.imag]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def _trim_certificate(cert):
    if cert is None:
        return None
    cert = dict(cert)
    if cert.get("kind") == "all_lifts_refused":
        refusals = cert.get("refusals", [])
        cert["refusal_count"] = len(refusals)
        cert["refusals"] = refusals[:12]
    return _jsonable(cert)


def _verdict_block(verdict, witness_ref=None):
    return {
        "answer": verdict.answer,
        "certificate_kind": None if verdict.certificate is None
        else verdict.certificate.get("kind"),
        "certificate_data": _trim_certificate(verdict.certificate),
        "witness_ref": witness_ref,
        "tolerances": verdict.diagnostics.get("tolerances"),
        "resolution": verdict.diagnostics.get("resolution"),
        "solution_count": verdict.diagnostics.get("solution_count"),
    }


def _coord_columns(base):
    if base.kind in ("interval", "circle"):
        return ["coord"]
    return ["coord1", "coord2"]


def write_bundle_csv(bundle, path):
    base = bundle.base
    cols = _coord_columns(base)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(["sample_index", *cols,
                           "sheet_index", "root_re", "root_im", "branch_flag"])
                 + "\n")
        for s in range(base.n_samples):
            coord = np.atleast_1d(base.coords[s])
            cvals = [repr(float(c)) for c in coord[: len(cols)]]
            flag = int(bool(bundle.branch_flags[s]))
            for i in range(bundle.degree):
                z = bundle.fibers[s, i]
                fh.write(",".join([str(s), *cvals, str(i),
                                   repr(float(z.real)), repr(float(z.imag)),
                                   str(flag)]) + "\n")


def write_lift_csv(witness, path):
    values = witness.values
    assigns = witness.assignments
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("sample_index,sheet_index,target_sheet,f_re,f_im\n")
        S, n = values.shape
        for s in range(S):
            for i in range(n):
                z = values[s, i]
                fh.write(f"{s},{i},{int(assigns[s, i])},"
                         f"{z.real!r},{z.imag!r}\n")


def _analyze(config: dict, factor: int, override: int | None,
             out_dir: str | None, svg: bool, tol: Tolerances):
    """One resolution pass; artifacts are written only when out_dir is set."""
    base, _ = _scaled_base(config["base"], factor, override)
    results: dict = {"resolution": base.n_samples}
    analyses = config.get("analyses", [])

    if config.get("assertions") == "crossing_quintic":
        scenarios.verify_crossing_configuration()
        results["assertions"] = "crossing_quintic: all checks passed"

    poly = smap = None
    if "polynomial" in config:
        pspec = config["polynomial"]
        if "roots" in pspec:
            poly = poly_from_roots(base, pspec["roots"])
            _check_coefficient_continuity(poly)
        else:
            poly = poly_from_exprs(base, pspec["coefficients"])
    if "selfmap" in config:
        smap = _build_selfmap(base, config["selfmap"])

    problem = None
    bundle_a = bundle_b = None
    if poly is not None and smap is not None and any(
            a in analyses for a in ("bundle", "strips", "cole", "ah", "cross_checks")):
        report = is_admissible(poly, zero_tol=tol.admissible_zero_tol)
        results["admissible"] = report.admissible
        if not report.admissible:
            raise ScenarioError("scenario polynomial is not admissible")
        bundle_a = build_bundle(poly, tol)
        pt = pullback_polynomial(poly, smap)
        bundle_b = build_bundle(pt, tol)
        problem = LiftProblem(bundle_a, bundle_b, tol)

    if "bundle" in analyses and bundle_a is not None:
        res_a = float(np.max(residuals(poly.coeff_values, bundle_a.fibers)))
        results["bundle"] = {
            "degree": bundle_a.degree,
            "samples": base.n_samples,
            "branch_samples": [int(s) for s in
                               np.flatnonzero(bundle_a.branch_flags)],
            "residual_max": res_a,
            "components": len(monodromy.components(bundle_a)),
        }
        if out_dir:
            write_bundle_csv(bundle_a, os.path.join(out_dir, "bundle_p.csv"))
            write_bundle_csv(bundle_b, os.path.join(out_dir, "bundle_pT.csv"))
            if svg and base.kind in ("interval", "circle"):
                figdir = os.path.join(out_dir, "figures")
                os.makedirs(figdir, exist_ok=True)
                figures.emit_bundle_svg(
                    bundle_a, os.path.join(figdir, "bundle_p.svg"),
                    f"{config['name']}: root curves")
                figures.emit_bundle_svg(
                    bundle_b, os.path.join(figdir, "bundle_pT.svg"),
                    f"{config['name']}: pulled-back root curves")

    if "strips" in analyses and bundle_a is not None:
        results["strips"] = {
            "p": monodromy.strips(bundle_a).windings,
            "pT": monodromy.strips(bundle_b).windings,
        }

    cole = ah = None
    if "cole" in analyses and problem is not None:
        cole = decide_lift(problem)
        ref = None
        if cole.witness is not None and out_dir:
            ref = "lift_f.csv"
            write_lift_csv(cole.witness, os.path.join(out_dir, ref))
        results["cole"] = _verdict_block(cole, ref)
    if "ah" in analyses and problem is not None:
        ah = decide_subalgebra(problem, tol)
        results["ah"] = _verdict_block(ah)
    if "cross_checks" in analyses and problem is not None:
        if cole is None:
            cole = decide_lift(problem)
        if ah is None:
            ah = decide_subalgebra(problem, tol)
        root = has_root(pullback_polynomial(poly, smap), tol,
                        require_admissible=False)
        results["cross_checks"] = {
            "ah_implies_cole": {
                "ah": ah.answer,
                "cole": cole.answer,
                "consistent": not (ah.answer == "yes" and cole.answer == "no"),
            },
            "root_implies_ah": {
                "pullback_has_root": root.answer,
                "ah": ah.answer,
                "consistent": not (root.answer == "yes" and ah.answer != "yes"),
            },
        }

    if "torus_controls" in analyses and poly is not None:
        ident = identity_selfmap(base)
        prob_id = LiftProblem(bundle_a or build_bundle(poly, tol),
                              build_bundle(pullback_polynomial(poly, ident), tol),
                              tol)
        results["torus_controls"] = {
            "identity_cole": _verdict_block(decide_lift(prob_id)),
        }

    if "closedness" in analyses:
        report = closedness_report(base, trials=20,
                                   seed=config.get("seed", 0), tol=tol)
        results["closedness"] = report.to_json()

    return results


def _observed_answers(results: dict) -> dict:
    out = {}
    if "cole" in results:
        out["cole"] = results["cole"]["answer"]
    if "ah" in results:
        out["ah"] = results["ah"]["answer"]
    if "strips" in results:
        out["strips"] = results["strips"]
    if "closedness" in results:
        out["algebraically_closed"] = (
            "yes" if results["closedness"]["algebraically_closed_verdict"]
            else "no")
    return out


def run_scenario(config: dict, out_dir: str, samples: int | None = None,
                 seed: int | None = None, svg: bool = False,
                 stability: bool = False,
                 tol: Tolerances = DEFAULT_TOL) -> int:
    """Execute a validated scenario; writes verdict.json and artifacts.

    Returns the process exit code (0 ok, 2 expectation/stability mismatch).
    """
    validate_config(config)
    if seed is not None:
        config = dict(config)
        config["seed"] = seed
    os.makedirs(out_dir, exist_ok=True)
    results = _analyze(config, 1, samples, out_dir, svg, tol)

    doc = {
        "scenario": config["name"],
        "seed": config.get("seed", 0),
        "backend": _kernels.BACKEND,
        "tolerances": tol.as_dict(),
        "analyses": _jsonable(results),
    }
    code = 0
    expect = config.get("expect")
    if expect:
        observed = _observed_answers(results)
        matched = all(observed.get(k) == v for k, v in expect.items()
                      if k in observed)
        doc["expectations"] = {"expected": expect,
                               "observed": _jsonable(observed),
                               "matched": matched}
        if not matched:
            code = 2
    if stability:
        answers = [_jsonable(_observed_answers(results))]
        if "resolutions" in config:
            reruns = [("n=" + str(n), 1, n) for n in config["resolutions"]]
        else:
            reruns = [("2n", 2, samples), ("4n", 4, samples)]
        for _, factor, override in reruns:
            more = _analyze(config, factor, override, None, False, tol)
            answers.append(_jsonable(_observed_answers(more)))
        stable = all(a == answers[0] for a in answers[1:])
        doc["stability"] = {"runs": ["base"] + [r[0] for r in reruns],
                            "answers": answers, "stable": stable}
        if not stable:
            code = 2

    with open(os.path.join(out_dir, "verdict.json"), "w", encoding="utf-8") as fh:
        json.dump(doc, fh, sort_keys=True, indent=2)
        fh.write("\n")
    return code


def run_torus_scenario(samples: int = 64, tol: Tolerances = DEFAULT_TOL) -> dict:
    """Quadratic with first-coordinate constant term over the torus grid:
    the coordinate-swap endomorphism admits no full-surface extension,
    while the identity control does."""
    base = make_torus2(samples, samples)
    poly = poly_from_exprs(base, ["-exp(1i*theta1)", "0"])
    swap = sample_selfmap(base, ("theta2", "theta1"))
    ident = identity_selfmap(base)
    A = build_bundle(poly, tol)
    swap_verdict = decide_lift(LiftProblem(
        A, build_bundle(pullback_polynomial(poly, swap), tol), tol))
    id_verdict = decide_lift(LiftProblem(
        A, build_bundle(pullback_polynomial(poly, ident), tol), tol))
    return {"swap": swap_verdict, "identity": id_verdict}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="rootlift",
        description="root-surface construction and endomorphism-extension "
                    "verdicts on discretized compact bases")
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run a scenario config file")
    p_run.add_argument("config", help="path to a scenario JSON file")
    p_builtin = sub.add_parser("builtin", help="run a builtin scenario")
    p_builtin.add_argument("scenario", choices=scenarios.BUILTIN_NAMES)
    for p in (p_run, p_builtin):
        p.add_argument("--samples", type=int, default=None)
        p.add_argument("--out", default="out")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--svg", action="store_true")
        p.add_argument("--stability", action="store_true")
    args = parser.parse_args(argv)

    try:
        if args.command == "run":
            with open(args.config, "r", encoding="utf-8") as fh:
                config = json.load(fh)
        else:
            config = scenarios.builtin_scenario(args.scenario, args.samples)
        return run_scenario(config, args.out, samples=args.samples,
                            seed=args.seed, svg=args.svg,
                            stability=args.stability)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - contract: runtime errors exit 1
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

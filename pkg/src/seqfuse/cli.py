"""Configuration-driven entry point.

Loads a scenario (built-in preset or JSON file), runs simulation and/or the
analytical approximations, and writes one flat table per invocation. Output
is deterministic byte-for-byte for a fixed (scenario, mode, seed, trials):
floats are rendered with repr, rows are emitted in a fixed order, and the
Monte Carlo layer is worker-count independent.

Exit codes: 0 success, 2 usage, 3 config/schema, 4 numeric failure,
5 invariant violation in an otherwise well-formed scenario.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import io
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass

from . import analysis, montecarlo
from .channel import ChannelConfig, RayleighFading
from .distributions import GaussianModel, Hypothesis, HypothesisPair
from .errors import NumericError, SchemaError
from .fusion import FusionConfig
from .local_node import (
    BinaryEmission,
    GlrNodeConfig,
    IntervalQuantizedEmission,
    QuantizedEmission,
    SprtNodeConfig,
    solve_theta_star,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CONFIG = 3
EXIT_NUMERIC = 4
EXIT_INVARIANT = 5

_ALGORITHMS = {
    # algorithm -> (node test, fusion algorithm, required emission kind)
    "dualsprt": ("sprt", "dual_sprt", "binary"),
    "sprt-csprt": ("sprt", "csprt", "quantized"),
    "dual-csprt": ("cusum", "csprt", "quantized"),
    "glr-sprt": ("glr", "dual_sprt", "binary"),
    "glr-csprt": ("glr", "csprt", "interval"),
}


@dataclass(frozen=True)
class RunSpec:
    scenario_path: str
    mode: str
    hypothesis: str = "both"
    n_trials: int = 1000
    seed: int = 0
    beta_grid: tuple = ()
    output_path: str | None = None
    fmt: str = "csv"
    workers: int = 1


# ---------------------------------------------------------------------------
# scenario documents

def _expect(cond: bool, msg: str) -> None:
    if not cond:
        raise SchemaError(msg)


def _num(doc, key, path, required=True, default=None):
    if key not in doc:
        _expect(not required, f"{path}: missing required number '{key}'")
        return default
    v = doc[key]
    _expect(
        isinstance(v, (int, float)) and not isinstance(v, bool),
        f"{path}.{key}: expected a number, got {type(v).__name__}",
    )
    return float(v)


def _obj(doc, key, path, required=True):
    if key not in doc:
        _expect(not required, f"{path}: missing required object '{key}'")
        return None
    v = doc[key]
    _expect(isinstance(v, dict), f"{path}.{key}: expected an object")
    return v


def _num_list(doc, key, path, length=None):
    _expect(key in doc, f"{path}: missing required array '{key}'")
    v = doc[key]
    _expect(isinstance(v, list), f"{path}.{key}: expected an array")
    for i, x in enumerate(v):
        _expect(
            isinstance(x, (int, float)) and not isinstance(x, bool),
            f"{path}.{key}[{i}]: expected a number",
        )
    if length is not None:
        _expect(len(v) == length, f"{path}.{key}: expected {length} entries, got {len(v)}")
    return [float(x) for x in v]


def _gaussian_from(doc, key, path):
    g = _obj(doc, key, path)
    return GaussianModel(
        mean=_num(g, "mean", f"{path}.{key}"),
        variance=_num(g, "variance", f"{path}.{key}"),
    )


def _emission_from(doc, want_kind, pair, path):
    e = _obj(doc, "emission", path)
    kind = e.get("kind")
    _expect(isinstance(kind, str), f"{path}.emission: missing string 'kind'")
    _expect(
        kind == want_kind,
        f"{path}.emission.kind: algorithm requires '{want_kind}', got '{kind}'",
    )
    p = f"{path}.emission"
    if kind == "binary":
        return BinaryEmission(b1=_num(e, "b1", p), b0=_num(e, "b0", p))
    if kind == "quantized":
        d1 = _num(e, "delta1", p, required=False)
        d0 = _num(e, "delta0", p, required=False)
        return QuantizedEmission(
            levels_up=tuple(_num_list(e, "levels_up", p, 4)),
            levels_down=tuple(_num_list(e, "levels_down", p, 4)),
            delta1=pair.delta1 if d1 is None else d1,
            delta0=abs(pair.delta0) if d0 is None else d0,
        )
    return IntervalQuantizedEmission(
        levels_up=tuple(_num_list(e, "levels_up", p, 4)),
        levels_down=tuple(_num_list(e, "levels_down", p, 4)),
        delta=_num(e, "delta", p),
    )


def scenario_from_dict(doc) -> montecarlo.Scenario:
    """Build a validated Scenario from a schema-shaped dict.

    Shape problems raise SchemaError; value problems (negative variances,
    bad thresholds and so on) surface as ValueError from the domain types.
    """
    _expect(isinstance(doc, dict), "top level: expected an object")
    algorithm = doc.get("algorithm")
    _expect(isinstance(algorithm, str), "top level: missing string 'algorithm'")
    _expect(
        algorithm in _ALGORITHMS,
        f"algorithm: unknown '{algorithm}' (choices: {', '.join(sorted(_ALGORITHMS))})",
    )
    node_test, fc_algorithm, emission_kind = _ALGORITHMS[algorithm]

    nodes = doc.get("nodes")
    _expect(isinstance(nodes, list) and len(nodes) >= 1, "nodes: expected a nonempty array")
    for i, nd in enumerate(nodes):
        _expect(isinstance(nd, dict), f"nodes[{i}]: expected an object")

    channel = _obj(doc, "channel", "top level")
    noise = _gaussian_from(channel, "noise", "channel")
    has_gains = "gains" in channel or "gains_db" in channel
    has_fading = "fading" in channel
    _expect(
        has_gains != has_fading,
        "channel: exactly one of gains/gains_db or fading must be given",
    )
    if has_fading:
        fad = _obj(channel, "fading", "channel")
        chan = ChannelConfig(
            fc_noise=noise,
            fading=RayleighFading(mean_power=_num(fad, "mean_power", "channel.fading")),
        )
    else:
        if "gains" in channel:
            gains = _num_list(channel, "gains", "channel")
        else:
            gains = [10.0 ** (db / 20.0) for db in _num_list(channel, "gains_db", "channel")]
        _expect(
            len(gains) == len(nodes),
            f"channel gains list {len(gains)} entries for {len(nodes)} nodes",
        )
        chan = ChannelConfig(fc_noise=noise, gains=tuple(gains))

    thresholds = _obj(doc, "thresholds", "top level")
    beta1 = _num(thresholds, "beta1", "thresholds")
    beta0 = _num(thresholds, "beta0", "thresholds")
    fus_doc = _obj(doc, "fusion", "top level")
    fusion = FusionConfig(
        mu1=_num(fus_doc, "mu1", "fusion"),
        mu0=_num(fus_doc, "mu0", "fusion"),
        beta1=beta1,
        beta0=beta0,
        noise=noise,
        algorithm=fc_algorithm,
    )

    pairs = []
    configs = []
    for i, nd in enumerate(nodes):
        path = f"nodes[{i}]"
        pair = HypothesisPair(
            f0=_gaussian_from(nd, "f0", path), f1=_gaussian_from(nd, "f1", path)
        )
        emission = _emission_from(nd, emission_kind, pair, path)
        if node_test == "glr":
            g = _obj(nd, "glr", path)
            theta1 = _num(g, "theta1", f"{path}.glr")
            theta_star = _num(g, "theta_star", f"{path}.glr", required=False)
            if theta_star is None:
                theta_star = solve_theta_star(0.0, theta1, pair.f0.variance)
            cfg = GlrNodeConfig(
                theta1=theta1,
                a1=_num(g, "a1", f"{path}.glr"),
                a2=_num(g, "a2", f"{path}.glr"),
                c=_num(g, "c", f"{path}.glr"),
                theta_star=theta_star,
                emission=emission,
            )
        else:
            cfg = SprtNodeConfig(
                gamma1=_num(thresholds, "gamma1", "thresholds"),
                gamma0=_num(thresholds, "gamma0", "thresholds"),
                emission=emission,
            )
        pairs.append(pair)
        configs.append(cfg)

    max_steps = doc.get("max_steps", 2000)
    _expect(
        isinstance(max_steps, int) and not isinstance(max_steps, bool),
        "max_steps: expected an integer",
    )
    return montecarlo.Scenario(
        channel=chan,
        node_configs=tuple(configs),
        fusion=fusion,
        pairs=tuple(pairs),
        max_steps=max_steps,
        node_test="cusum" if node_test == "cusum" else "sprt",
    )


def _preset_example1():
    node = {
        "f0": {"mean": 0.0, "variance": 1.0},
        "f1": {"mean": 1.0, "variance": 1.0},
        "emission": {"kind": "binary", "b1": 1.0, "b0": -1.0},
    }
    return {
        "algorithm": "dualsprt",
        "nodes": [dict(node) for _ in range(5)],
        "thresholds": {"gamma1": 10.0, "gamma0": 10.0, "beta1": 10.0, "beta0": 10.0},
        "fusion": {"mu1": 1.0, "mu0": 1.0},
        "channel": {"noise": {"mean": 0.0, "variance": 5.0}, "gains": [1.0] * 5},
        "max_steps": 2000,
    }


_EXAMPLE2_MEANS = (1.0, 0.84, 0.75, 0.63, 0.5)


def _preset_example2():
    doc = _preset_example1()
    for nd, m in zip(doc["nodes"], _EXAMPLE2_MEANS):
        nd["f1"] = {"mean": m, "variance": 1.0}
    doc["max_steps"] = 4000
    return doc


def _preset_csprt_fig3():
    doc = _preset_example2()
    doc["algorithm"] = "sprt-csprt"
    for nd, m in zip(doc["nodes"], _EXAMPLE2_MEANS):
        # band width = the node's own llr drift magnitude, one band per slot
        nd["emission"] = {
            "kind": "quantized",
            "levels_up": [1.0, 2.0, 3.0, 4.0],
            "levels_down": [-1.0, -2.0, -3.0, -4.0],
            "delta1": m * m / 2.0,
            "delta0": m * m / 2.0,
        }
    return doc


def _preset_glr_fading():
    theta1 = math.log(2.0)
    node = {
        "f0": {"mean": 0.0, "variance": 1.0},
        "f1": {"mean": theta1, "variance": 1.0},
        "emission": {
            "kind": "interval",
            "levels_up": [1.0, 2.0, 3.0, 4.0],
            "levels_down": [-1.0, -2.0, -3.0, -4.0],
            "delta": 0.25,
        },
        "glr": {"theta1": theta1, "a1": 0.0, "a2": 3.0, "c": 0.01},
    }
    return {
        "algorithm": "glr-csprt",
        "nodes": [json.loads(json.dumps(node)) for _ in range(5)],
        "thresholds": {"beta1": 10.0, "beta0": 10.0},
        "fusion": {"mu1": 1.0, "mu0": 1.0},
        "channel": {"noise": {"mean": 0.0, "variance": 1.0}, "fading": {"mean_power": 1.0}},
        "max_steps": 3000,
    }


PRESETS = {
    "example1": _preset_example1,
    "example2": _preset_example2,
    "csprt-fig3": _preset_csprt_fig3,
    "glr-fading": _preset_glr_fading,
}


def load_scenario(path_or_preset: str) -> montecarlo.Scenario:
    """Resolve a preset name or load and validate a JSON scenario file."""
    if path_or_preset in PRESETS:
        return scenario_from_dict(PRESETS[path_or_preset]())
    if not os.path.exists(path_or_preset):
        raise SchemaError(
            f"scenario '{path_or_preset}' is neither a preset "
            f"({', '.join(sorted(PRESETS))}) nor an existing file"
        )
    with open(path_or_preset, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(
                f"{path_or_preset}: invalid JSON at line {exc.lineno}, "
                f"column {exc.colno}: {exc.msg}"
            ) from None
    return scenario_from_dict(doc)


# ---------------------------------------------------------------------------
# row generation

def _hypotheses(spec: RunSpec):
    if spec.hypothesis == "h0":
        return [Hypothesis.H0]
    if spec.hypothesis == "h1":
        return [Hypothesis.H1]
    return [Hypothesis.H0, Hypothesis.H1]


def _hyp_name(h: Hypothesis) -> str:
    return "h1" if h == Hypothesis.H1 else "h0"


def _decision_beta(scenario, h: Hypothesis) -> float:
    return scenario.fusion.beta1 if h == Hypothesis.H1 else scenario.fusion.beta0


def _error_beta(scenario, h: Hypothesis) -> float:
    # the boundary a wrong decision crosses: the opposite side's threshold
    return scenario.fusion.beta0 if h == Hypothesis.H1 else scenario.fusion.beta1


SIMULATE_COLUMNS = (
    "algorithm",
    "hypothesis",
    "beta1",
    "beta0",
    "n_trials",
    "seed",
    "edd",
    "edd_se",
    "p_error",
    "p_error_se",
    "truncation_rate",
)

SWEEP_COLUMNS = (
    "algorithm",
    "hypothesis",
    "beta",
    "n_trials",
    "seed",
    "edd",
    "edd_se",
    "p_error",
    "p_error_se",
    "truncation_rate",
)

ANALYZE_COLUMNS = ("tag", "quantity", "hypothesis", "beta", "node", "value")

COMPARE_COLUMNS = (
    "algorithm",
    "hypothesis",
    "beta",
    "n_trials",
    "seed",
    "edd_sim",
    "edd_sim_se",
    "edd_theory",
    "edd_rel_err",
    "p_error_sim",
    "p_error_sim_se",
    "p_error_theory_lower",
    "p_error_theory_upper",
    "p_error_theory",
    "p_error_rel_err",
)


def _simulate_rows(scenario, spec: RunSpec):
    label = scenario.algorithm_label()
    rows = []
    for h in _hypotheses(spec):
        est = montecarlo.estimate(scenario, h, spec.n_trials, spec.seed, spec.workers)
        rows.append(
            {
                "algorithm": label,
                "hypothesis": _hyp_name(h),
                "beta1": scenario.fusion.beta1,
                "beta0": scenario.fusion.beta0,
                "n_trials": est.n_trials,
                "seed": spec.seed,
                "edd": est.edd,
                "edd_se": est.edd_se,
                "p_error": est.p_error,
                "p_error_se": est.p_error_se,
                "truncation_rate": est.truncation_rate,
            }
        )
    return rows


def _sweep_rows(scenario, spec: RunSpec):
    label = scenario.algorithm_label()
    rows = []
    for h in _hypotheses(spec):
        for beta, est in montecarlo.sweep(
            scenario, h, spec.beta_grid, spec.n_trials, spec.seed, spec.workers
        ):
            rows.append(
                {
                    "algorithm": label,
                    "hypothesis": _hyp_name(h),
                    "beta": beta,
                    "n_trials": est.n_trials,
                    "seed": spec.seed,
                    "edd": est.edd,
                    "edd_se": est.edd_se,
                    "p_error": est.p_error,
                    "p_error_se": est.p_error_se,
                    "truncation_rate": est.truncation_rate,
                }
            )
    return rows


def _require_analyzable(scenario, mode: str) -> None:
    if scenario.is_glr:
        raise SchemaError(f"{mode} mode has no analytical routines for GLR scenarios")
    if scenario.channel.fading is not None:
        raise SchemaError(f"{mode} mode requires fixed channel gains, not fading")


def _theory_dual(scenario, h: Hypothesis):
    table = analysis.dualsprt_epochs(scenario, h)
    edd = analysis.dualsprt_edd_approx(table, _decision_beta(scenario, h))
    lower, upper = analysis.dualsprt_pmd_bounds(
        scenario, _error_beta(scenario, h), hypothesis=h
    )
    return table, edd, lower, upper


def _theory_csprt(scenario, h: Hypothesis):
    table = analysis.csprt_epochs(scenario, h)
    edd = analysis.csprt_edd_approx(table, _decision_beta(scenario, h))
    inc = analysis.csprt_noise_increment(scenario, h)
    l0, lam = analysis.fredholm_lambda(_error_beta(scenario, h), inc)
    dists = analysis.node_passage_distributions(scenario, h)
    series = analysis.csprt_pmd_approx(lam, dists)
    return table, edd, l0, lam, series


def _analyze_rows(scenario, spec: RunSpec):
    _require_analyzable(scenario, "analyze")
    rows = []

    def add(tag, quantity, hypothesis="", beta="", node="", value=""):
        rows.append(
            {
                "tag": tag,
                "quantity": quantity,
                "hypothesis": hypothesis,
                "beta": beta,
                "node": node,
                "value": value,
            }
        )

    is_dual = scenario.fusion.algorithm == "dual_sprt"
    epoch_tag = "Eq4" if is_dual else "Eq10"
    for h in _hypotheses(spec):
        name = _hyp_name(h)
        dists = analysis.node_passage_distributions(scenario, h)
        for l, d in enumerate(dists):
            add("Eq3", "passage_mean", name, "", l, d.mean)
            add("Eq3", "passage_variance", name, "", l, d.variance)
        if is_dual:
            table, edd, lower, upper = _theory_dual(scenario, h)
        else:
            table, edd, l0, lam, series = _theory_csprt(scenario, h)
        for j, (t, drift, fbar) in enumerate(table.epochs, start=1):
            add(epoch_tag, "epoch_time", name, "", j, t)
            add(epoch_tag, "fc_drift", name, "", j, drift)
            add(epoch_tag, "fc_mean_before", name, "", j, fbar)
        beta_dec = _decision_beta(scenario, h)
        beta_err = _error_beta(scenario, h)
        if is_dual:
            add("Eq5", "edd_approx", name, beta_dec, "", edd)
            add("PmdBound", "error_lower", name, beta_err, "", lower)
            add("PmdBound", "error_upper", name, beta_err, "", upper)
        else:
            add("Eq10", "edd_approx", name, beta_dec, "", edd)
            add("Fredholm", "mean_passage", name, beta_err, "", l0)
            add("Fredholm", "lambda_beta", name, beta_err, "", lam)
            add("PmdSeries", "error_approx", name, beta_err, "", series)
    if is_dual:
        consts = analysis.asymptotic_constants(scenario)
        for quantity in (
            "d_tot0",
            "d_tot1",
            "delta_a0",
            "delta_a1",
            "exi_star0",
            "exi_star1",
            "m0",
            "m1",
        ):
            add("Thm1", quantity, "", "", "", getattr(consts, quantity))
        for l, (r, rho) in enumerate(zip(consts.r, consts.rho)):
            add("Thm1", "r", "", "", l, r)
            add("Thm1", "rho", "", "", l, rho)
        add("Thm1", "edd_slope_bound_h0", "", "", "", 1.0 / consts.d_tot0 + consts.m0)
        add("Thm1", "edd_slope_bound_h1", "", "", "", 1.0 / consts.d_tot1 + consts.m1)
        holds, witness = analysis.theorem2_check_gaussian(scenario)
        add("Thm2", "holds", "", "", "", bool(holds))
        add("Thm2", "witness_eta", "", "", "", "" if witness is None else witness)
    return rows


def _compare_rows(scenario, spec: RunSpec):
    _require_analyzable(scenario, "compare")
    label = scenario.algorithm_label()
    is_dual = scenario.fusion.algorithm == "dual_sprt"
    grid = spec.beta_grid if spec.beta_grid else (None,)
    rows = []
    for h in _hypotheses(spec):
        name = _hyp_name(h)
        for b in grid:
            scen = scenario if b is None else scenario.with_beta(float(b))
            est = montecarlo.estimate(scen, h, spec.n_trials, spec.seed, spec.workers)
            if is_dual:
                _, edd_th, lower, upper = _theory_dual(scen, h)
                theory = ""
                point = lower
            else:
                _, edd_th, _, _, series = _theory_csprt(scen, h)
                lower = upper = ""
                theory = point = series
            edd_rel = (
                (edd_th - est.edd) / est.edd
                if math.isfinite(est.edd) and est.edd > 0
                else ""
            )
            p_rel = (
                (point - est.p_error) / est.p_error if est.p_error > 0 else ""
            )
            rows.append(
                {
                    "algorithm": label,
                    "hypothesis": name,
                    "beta": _decision_beta(scen, h),
                    "n_trials": est.n_trials,
                    "seed": spec.seed,
                    "edd_sim": est.edd,
                    "edd_sim_se": est.edd_se,
                    "edd_theory": edd_th,
                    "edd_rel_err": edd_rel,
                    "p_error_sim": est.p_error,
                    "p_error_sim_se": est.p_error_se,
                    "p_error_theory_lower": lower,
                    "p_error_theory_upper": upper,
                    "p_error_theory": theory,
                    "p_error_rel_err": p_rel,
                }
            )
    return rows


# ---------------------------------------------------------------------------
# rendering

def _cell(v) -> str:
    if v is None or v == "":
        return ""
    if isinstance(v, str):
        return v
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, int):
        return str(v)
    return repr(float(v))


def _render_csv(columns, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(row[c]) for c in columns])
    return buf.getvalue()


def _render_json(columns, rows) -> str:
    def jsonable(v):
        if v is None or v == "":
            return None
        if isinstance(v, (bool, int, str)):
            return v
        v = float(v)
        return None if math.isnan(v) else v

    out = [{c: jsonable(row[c]) for c in columns} for row in rows]
    return json.dumps(out, indent=2) + "\n"


def _write_atomic(path: str, text: str) -> None:
    target = os.path.abspath(path)
    fd, tmp = tempfile.mkstemp(
        dir=os.path.dirname(target), prefix=".seqfuse-", suffix=".tmp"
    )
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        with contextlib.suppress(OSError):
            os.unlink(tmp)
        raise


def run(spec: RunSpec) -> int:
    """Execute one mode end to end; raises on failure, returns 0 on success."""
    scenario = load_scenario(spec.scenario_path)
    if spec.mode == "simulate":
        columns, rows = SIMULATE_COLUMNS, _simulate_rows(scenario, spec)
    elif spec.mode == "sweep":
        columns, rows = SWEEP_COLUMNS, _sweep_rows(scenario, spec)
    elif spec.mode == "analyze":
        columns, rows = ANALYZE_COLUMNS, _analyze_rows(scenario, spec)
    elif spec.mode == "compare":
        columns, rows = COMPARE_COLUMNS, _compare_rows(scenario, spec)
    else:
        raise SchemaError(f"unknown mode {spec.mode!r}")
    text = _render_csv(columns, rows) if spec.fmt == "csv" else _render_json(columns, rows)
    if spec.output_path is None:
        sys.stdout.write(text)
    else:
        _write_atomic(spec.output_path, text)
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument handling

def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="seqfuse",
        description="Simulate and analyze decentralized sequential detection "
        "over a noisy reporting channel.",
    )
    p.add_argument("mode", choices=("simulate", "analyze", "compare", "sweep"))
    p.add_argument(
        "--scenario",
        required=True,
        metavar="PATH|PRESET",
        help=f"JSON scenario file or preset: {', '.join(sorted(PRESETS))}",
    )
    p.add_argument("--hypothesis", choices=("h0", "h1", "both"), default="both")
    p.add_argument("--trials", type=int, default=1000, metavar="N")
    p.add_argument("--seed", type=int, default=0, metavar="S")
    p.add_argument(
        "--beta-grid",
        default=None,
        metavar="a,b,c",
        help="comma-separated fusion thresholds; required for sweep, optional for compare",
    )
    p.add_argument("--out", default=None, metavar="PATH", help="default: stdout")
    p.add_argument("--format", choices=("csv", "json"), default="csv", dest="fmt")
    p.add_argument("--workers", type=int, default=1, metavar="W")
    return p


def _parse_beta_grid(parser, args) -> tuple:
    if args.beta_grid is None:
        if args.mode == "sweep":
            parser.error("sweep mode requires --beta-grid")
        return ()
    if args.mode not in ("sweep", "compare"):
        parser.error("--beta-grid applies to sweep and compare modes only")
    parts = [s.strip() for s in args.beta_grid.split(",") if s.strip()]
    if not parts:
        parser.error("--beta-grid must list at least one threshold")
    try:
        grid = tuple(float(s) for s in parts)
    except ValueError:
        parser.error(f"--beta-grid: could not parse {args.beta_grid!r} as numbers")
    if any(not (b > 0) for b in grid):
        parser.error("--beta-grid thresholds must be positive")
    return grid


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    grid = _parse_beta_grid(parser, args)
    if args.trials < 1:
        parser.error("--trials must be >= 1")
    if args.workers < 1:
        parser.error("--workers must be >= 1")
    spec = RunSpec(
        scenario_path=args.scenario,
        mode=args.mode,
        hypothesis=args.hypothesis,
        n_trials=args.trials,
        seed=args.seed,
        beta_grid=grid,
        output_path=args.out,
        fmt=args.fmt,
        workers=args.workers,
    )
    try:
        return run(spec)
    except SchemaError as exc:
        print(f"seqfuse: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericError as exc:
        print(f"seqfuse: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"seqfuse: invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())

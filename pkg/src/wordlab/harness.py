"""Experiment harness: flat-file configs, deterministic runs, auditable reports.

A config is a flat text file of `key = value` lines (comments with `#`).
Unknown keys are rejected and `seed` is always required: every random
draw in a run is derived from the seed through named substreams, so a
report is a pure function of its config and rerunning it, with any worker
count, reproduces the same bytes.

Reports are JSON with sorted keys.  Every aggregate is recomputable from
the per-record data in the same file; `audit_report` does exactly that
and returns the list of discrepancies (empty for an intact report).
Wall-clock time is returned to callers in memory but kept out of the
written JSON so that byte-identity across reruns is meaningful.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from . import __version__
from .errors import (
    BudgetExceededError,
    ConfigError,
    NotInCatalogError,
    WordlabError,
)
from .generation import count_generating_tuples, hall_max_power
from .group_walks import StepSet, cyclic_obstruction, mixing_profile
from .groups import (
    PermutationGroup,
    center,
    commutator_subgroup,
    construct_group,
    load_cayley_table,
)
from .lattice_walks import (
    exact_mod_law,
    gcd_tail_estimate,
    predicted_tail_probability,
    sample_endpoints,
)
from .measure import (
    exact_distribution,
    family_trend,
    image_and_power_coverage,
    l1_uniform_distance,
    monte_carlo_distribution,
)
from .rng import stream
from .words import Word, abelianize, gcd_of_vector, parse_word, sample_word

EXPERIMENTS = ("density", "trend", "walk-gcd", "mixing", "generation")

# key -> (type tag, short description)
KNOWN_KEYS = {
    "experiment": ("str", "one of " + ", ".join(EXPERIMENTS)),
    "seed": ("int", "root seed; mandatory everywhere"),
    "model": ("str", "word sampling model: positive | symmetric"),
    "d": ("int", "word rank / lattice dimension / tuple length"),
    "n": ("int", "word length / step count / profile horizon"),
    "words": ("int", "number of sampled words (density)"),
    "word": ("str", "explicit word text, e.g. 'x1 x2 X1 X2' (trend)"),
    "groups": ("str", "comma-separated group specs (density, trend)"),
    "group": ("str", "single group spec (mixing, generation)"),
    "mode": ("str", "distribution mode: exact | sampled"),
    "samples": ("int", "sample count for sampled mode / walks"),
    "tau": ("float", "closeness threshold on the L1 distance (proxy)"),
    "gcd_cap": ("int", "gcd histogram cap M"),
    "steps": ("str", "comma-separated element indices (mixing)"),
    "cycles": ("str", "semicolon-separated cycles, e.g. (1 2 3);(1 2) (mixing)"),
    "out": ("str", "output directory"),
    "workers": ("int", "worker threads for independent cells"),
    "table": ("str", "Cayley-table file path (ingest)"),
}

DEFAULTS = {
    "model": "symmetric",
    "mode": "exact",
    "tau": 0.1,
    "workers": 1,
    "out": ".",
}

VOLATILE_REPORT_KEYS = ("wall_clock_seconds", "_witness_labels")


@dataclass
class ExperimentConfig:
    """Validated flat configuration; unset optional keys are None."""

    experiment: str
    seed: int
    values: dict

    def get(self, key: str, default=None):
        return self.values.get(key, default)

    def require(self, *keys: str):
        missing = [k for k in keys if self.values.get(k) is None]
        if missing:
            raise ConfigError(
                f"{self.experiment}: missing required key(s): {', '.join(missing)}"
            )
        return [self.values[k] for k in keys]

    # Keys that steer execution but cannot change any computed value; they
    # are kept out of the config echo so reports stay byte-identical across
    # worker counts and output locations.
    EXECUTION_KEYS = ("out", "workers")

    def echo(self) -> dict:
        out = {"experiment": self.experiment, "seed": str(self.seed)}
        for k, v in sorted(self.values.items()):
            if v is not None and k not in ("experiment", "seed") + self.EXECUTION_KEYS:
                out[k] = str(v)
        return out


def _convert(key: str, raw: str):
    kind = KNOWN_KEYS[key][0]
    try:
        if kind == "int":
            return int(raw)
        if kind == "float":
            return float(raw)
        return str(raw)
    except ValueError as exc:
        raise ConfigError(f"key {key}: cannot parse {raw!r} as {kind}") from exc


def parse_config_file(path: Union[str, Path]) -> dict:
    """Read a flat key=value file into a raw-string mapping."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    raw = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value, got {line!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key in raw:
            raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
        raw[key] = value
    return raw


def build_config(experiment: str, *sources: dict) -> ExperimentConfig:
    """Merge raw mappings (later sources win), validate keys and types.

    `experiment` comes from the caller (the CLI subcommand); a conflicting
    `experiment` key inside a source is an error.
    """
    if experiment not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {experiment!r}")
    merged = {}
    for src in sources:
        for key, value in src.items():
            if value is None:
                continue
            merged[key] = value
    unknown = sorted(set(merged) - set(KNOWN_KEYS))
    if unknown:
        raise ConfigError(
            "unknown config key(s): " + ", ".join(unknown)
            + "; known keys: " + ", ".join(sorted(KNOWN_KEYS))
        )
    values = {}
    for key, value in merged.items():
        values[key] = _convert(key, str(value))
    declared = values.pop("experiment", None)
    if declared is not None and declared != experiment:
        raise ConfigError(
            f"config says experiment={declared!r} but {experiment!r} was requested"
        )
    if "seed" not in values:
        raise ConfigError("seed is mandatory and has no default")
    seed = values.pop("seed")
    for key, default in DEFAULTS.items():
        values.setdefault(key, default)
    if values.get("model") not in (None, "positive", "symmetric"):
        raise ConfigError(f"model must be positive or symmetric, got {values['model']!r}")
    if values.get("mode") not in (None, "exact", "sampled"):
        raise ConfigError(f"mode must be exact or sampled, got {values['mode']!r}")
    return ExperimentConfig(experiment=experiment, seed=seed, values=values)


# ---------------------------------------------------------------------------
# Canonical JSON
# ---------------------------------------------------------------------------


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (frozenset, set)):
        return sorted(_jsonable(v) for v in obj)
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    return obj


def canonical_report_bytes(report: dict) -> bytes:
    """Deterministic JSON encoding with volatile fields stripped."""
    clean = {k: v for k, v in report.items() if k not in VOLATILE_REPORT_KEYS}
    text = json.dumps(_jsonable(clean), sort_keys=True, indent=2)
    return (text + "\n").encode("utf-8")


def write_report(report: dict, out_dir: Union[str, Path],
                 name: str = "report.json") -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / name
    path.write_bytes(canonical_report_bytes(report))
    return path


def _fraction_fields(value) -> dict:
    """A distance as a float plus, when exact, the full rational."""
    if isinstance(value, Fraction):
        return {"l1": float(value), "l1_exact": f"{value.numerator}/{value.denominator}"}
    return {"l1": float(value), "l1_exact": None}


# ---------------------------------------------------------------------------
# Density experiment
# ---------------------------------------------------------------------------


def _density_cell(word: Word, gamma: int, group, mode: str, samples: Optional[int],
                  seed: int, word_index: int, group_index: int) -> dict:
    record = {
        "group": group.spec_text if hasattr(group, "spec_text") else group.name,
        "order": group.order,
        "l1": None,
        "l1_exact": None,
        "covers_powers": None,
        "m": None,
        "error": None,
    }
    try:
        if mode == "exact":
            dist = exact_distribution(word, group)
        else:
            dist = monte_carlo_distribution(
                word, group, samples, stream(seed, 11, word_index, group_index)
            )
        record.update(_fraction_fields(l1_uniform_distance(dist)))
        if gamma != 0:
            cov = image_and_power_coverage(
                word, group, mode,
                samples=samples,
                rng=stream(seed, 13, word_index, group_index) if mode == "sampled" else None,
            )
            record["covers_powers"] = bool(cov.covers_powers)
            record["m"] = int(cov.m)
    except BudgetExceededError as exc:
        record["error"] = f"budget: {exc}"
    except WordlabError as exc:
        record["error"] = f"{type(exc).__name__}: {exc}"
    return record


def density_aggregates(word_records: Sequence[dict], tau: float, gcd_cap: int) -> dict:
    """Aggregates derived purely from per-word records (auditable)."""
    total = len(word_records)
    histogram = {}
    in_range = 0
    all_below = 0
    errors = 0
    budget_errors = 0
    for rec in word_records:
        gamma = rec["gamma"]
        histogram[str(gamma)] = histogram.get(str(gamma), 0) + 1
        if 1 <= gamma <= gcd_cap:
            in_range += 1
        cells = rec["groups"]
        cell_errors = [c for c in cells if c["error"] is not None]
        errors += len(cell_errors)
        budget_errors += sum(1 for c in cell_errors if c["error"].startswith("budget:"))
        if cells and not cell_errors and all(c["l1"] < tau for c in cells):
            all_below += 1
    return {
        "word_count": total,
        "gamma_histogram": histogram,
        "fraction_gamma_in_cap_range": (in_range / total) if total else 0.0,
        "fraction_gamma_zero_or_above_cap": ((total - in_range) / total) if total else 0.0,
        "fraction_words_all_below_tau": (all_below / total) if total else 0.0,
        "cell_error_count": errors,
        "budget_error_count": budget_errors,
        "tau": tau,
        "gcd_cap": gcd_cap,
    }


def run_density(config: ExperimentConfig) -> dict:
    """Sample R words, push them through every group, aggregate the results.

    Cells (word x group) are independent; `workers` > 1 evaluates them in a
    thread pool, and the report is assembled in (word, group) order either
    way, so output bytes do not depend on the worker count.
    """
    t0 = time.perf_counter()
    model, d, n, r, group_text, gcd_cap = config.require(
        "model", "d", "n", "words", "groups", "gcd_cap"
    )
    mode = config.get("mode", "exact")
    tau = config.get("tau", 0.1)
    workers = config.get("workers", 1)
    samples = config.get("samples")
    if mode == "sampled" and samples is None:
        raise ConfigError("sampled mode requires samples")
    specs = [s.strip() for s in group_text.split(",") if s.strip()]
    if not specs:
        raise ConfigError("groups must name at least one group spec")
    groups = [construct_group(s) for s in specs]
    for g, s in zip(groups, specs):
        g.spec_text = s
        if g.has_table:
            g.mul_table()  # prebuild so threads share the cached table

    seed = config.seed
    sampled_words = [sample_word(model, d, n, stream(seed, 7, i)) for i in range(r)]
    gammas = [gcd_of_vector(abelianize(w)) for w in sampled_words]

    def cell(i: int, j: int) -> dict:
        return _density_cell(
            sampled_words[i], gammas[i], groups[j], mode, samples, seed, i, j
        )

    pairs = [(i, j) for i in range(r) for j in range(len(groups))]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda p: cell(*p), pairs))
        cells = dict(zip(pairs, results))
    else:
        cells = {p: cell(*p) for p in pairs}

    word_records = []
    for i, w in enumerate(sampled_words):
        word_records.append({
            "index": i,
            "word": w.to_text(),
            "reduced_length": len(w),
            "exponent_vector": list(abelianize(w)),
            "gamma": gammas[i],
            "groups": [cells[(i, j)] for j in range(len(groups))],
        })
    report = {
        "experiment": "density",
        "version": __version__,
        "config": config.echo(),
        "group_specs": specs,
        "words": word_records,
        "aggregates": density_aggregates(word_records, tau, gcd_cap),
        "wall_clock_seconds": time.perf_counter() - t0,
    }
    return report


def write_density_csv(report: dict, out_dir: Union[str, Path],
                      name: str = "words.csv") -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / name
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([
            "word_index", "word", "reduced_length", "gamma",
            "group", "l1", "l1_exact", "covers_powers", "error",
        ])
        for rec in report["words"]:
            for cell in rec["groups"]:
                writer.writerow([
                    rec["index"], rec["word"], rec["reduced_length"], rec["gamma"],
                    cell["group"],
                    "" if cell["l1"] is None else repr(cell["l1"]),
                    cell["l1_exact"] or "",
                    "" if cell["covers_powers"] is None else cell["covers_powers"],
                    cell["error"] or "",
                ])
    return path


# ---------------------------------------------------------------------------
# Trend experiment
# ---------------------------------------------------------------------------


def run_trend(config: ExperimentConfig) -> dict:
    t0 = time.perf_counter()
    word_text, group_text = config.require("word", "groups")
    mode = config.get("mode", "exact")
    samples = config.get("samples")
    if mode == "sampled" and samples is None:
        raise ConfigError("sampled mode requires samples")
    word = parse_word(word_text)
    specs = [s.strip() for s in group_text.split(",") if s.strip()]
    if not specs:
        raise ConfigError("groups must name at least one group spec")
    rows = family_trend(word, specs, mode=mode,
                        samples=samples or 10_000, seed=config.seed)
    out_rows = []
    for row in rows:
        entry = {
            "spec": row.spec,
            "order": row.order,
            "mode": row.mode,
            "error": row.error,
        }
        if row.distance is None:
            entry.update({"l1": None, "l1_exact": None})
        else:
            entry.update(_fraction_fields(row.distance))
        out_rows.append(entry)
    return {
        "experiment": "trend",
        "version": __version__,
        "config": config.echo(),
        "word": word.to_text(),
        "gamma": gcd_of_vector(abelianize(word)),
        "rows": out_rows,
        "wall_clock_seconds": time.perf_counter() - t0,
    }


def write_trend_csv(report: dict, out_dir: Union[str, Path],
                    name: str = "trend.csv") -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / name
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["spec", "order", "l1", "l1_exact", "error"])
        for row in report["rows"]:
            writer.writerow([
                row["spec"],
                "" if row["order"] is None else row["order"],
                "" if row["l1"] is None else repr(row["l1"]),
                row["l1_exact"] or "",
                row["error"] or "",
            ])
    return path


# ---------------------------------------------------------------------------
# Lattice gcd experiment
# ---------------------------------------------------------------------------


def _prime_powers_up_to(cap: int) -> list:
    """(p, k, p**k) for primes p and k >= 1 with p**k <= cap."""
    out = []
    for p in range(2, cap + 1):
        if any(p % q == 0 for q in range(2, int(math.isqrt(p)) + 1)):
            continue
        q, k = p, 1
        while q <= cap:
            out.append((p, k, q))
            q *= p
            k += 1
    return out


def run_walk_gcd(config: ExperimentConfig) -> dict:
    """Sampled endpoint-gcd statistics with two sampling-free cross-checks.

    The DP prediction block restates the tail probability from an exact
    boxed convolution; its zero probability must match the combinatorial
    return probability (dual-route identity carried in the report).  The
    mod-law block compares, for every prime power q <= M, the exact
    probability that the endpoint vanishes mod q with the sampled fraction
    of endpoints whose gcd q divides.
    """
    t0 = time.perf_counter()
    d, n, samples, gcd_cap = config.require("d", "n", "samples", "gcd_cap")
    seed = config.seed
    est = gcd_tail_estimate(d, n, gcd_cap, samples, stream(seed, 3))
    pred = predicted_tail_probability(d, n, gcd_cap)
    se = math.sqrt(max(pred.probability * (1 - pred.probability), 1e-300) / samples)
    z = (est.tail_probability - pred.probability) / se
    # Same substream as gcd_tail_estimate, so these are the same endpoints;
    # redrawing keeps the estimate API self-contained.
    ends = sample_endpoints(d, n, samples, stream(seed, 3))
    gammas = np.gcd.reduce(np.abs(ends), axis=1)
    mod_rows = []
    for p, k, q in _prime_powers_up_to(min(gcd_cap, 64)):
        law = exact_mod_law(d, p, k, n, exact=False)
        # q divides the endpoint gcd exactly when the endpoint is 0 mod q
        # (gamma = 0, the true origin, counts as divisible on both routes).
        divisible = int(np.count_nonzero(gammas % q == 0))
        mod_rows.append({
            "p": p, "k": k, "modulus": q,
            "dp_prob_zero": float(law.prob_zero()),
            "mc_fraction": divisible / samples,
            "mc_count": divisible,
        })
    report = {
        "experiment": "walk-gcd",
        "version": __version__,
        "config": config.echo(),
        "estimate": {
            "d": est.d, "n": est.n, "gcd_cap": est.gcd_cap, "samples": est.samples,
            "tail_count": est.tail_count, "zero_count": est.zero_count,
            "tail_probability": est.tail_probability,
            "zero_probability": est.zero_probability,
            "tail_ci": list(est.tail_ci), "zero_ci": list(est.zero_ci),
            "gamma_counts": dict(est.gamma_counts),
        },
        "prediction": {
            "box_radius": pred.box_radius,
            "tail_probability": pred.probability,
            "zero_probability_dp": pred.zero_probability,
            "return_probability_exact": pred.return_probability,
            "zero_route_gap": abs(pred.zero_probability - pred.return_probability),
            "gcd_law_head": dict(pred.gcd_law_head),
        },
        "agreement_z": z,
        "mod_laws": mod_rows,
        "wall_clock_seconds": time.perf_counter() - t0,
    }
    return report


def write_walk_gcd_csv(report: dict, out_dir: Union[str, Path],
                       name: str = "gcd_law.csv") -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / name
    est = report["estimate"]
    pred = report["prediction"]["gcd_law_head"]
    samples = est["samples"]
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["gamma", "mc_count", "mc_fraction", "dp_probability"])
        for v in range(est["gcd_cap"] + 1):
            c = est["gamma_counts"].get(str(v), 0)
            writer.writerow([v, c, repr(c / samples), repr(pred.get(str(v), 0.0))])
    return path


def write_mod_law_csv(report: dict, out_dir: Union[str, Path],
                      name: str = "mod_laws.csv") -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / name
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["p", "k", "modulus", "dp_prob_zero", "mc_fraction", "mc_count"])
        for row in report["mod_laws"]:
            writer.writerow([row["p"], row["k"], row["modulus"],
                             repr(row["dp_prob_zero"]), repr(row["mc_fraction"]),
                             row["mc_count"]])
    return path


# ---------------------------------------------------------------------------
# Mixing experiment
# ---------------------------------------------------------------------------


def _parse_cycles_text(text: str) -> list:
    """Parse '(1 2 3)(4 5);(1 2)' into lists of cycles (1-based points)."""
    steps = []
    for part in text.split(";"):
        part = part.strip()
        if not part:
            continue
        cycles = []
        buf = part
        while "(" in buf:
            start = buf.index("(")
            end = buf.index(")", start)
            inner = buf[start + 1:end].replace(",", " ").split()
            cycles.append(tuple(int(x) for x in inner))
            buf = buf[end + 1:]
        if not cycles:
            raise ConfigError(f"cannot parse cycle step {part!r}")
        steps.append(cycles)
    if not steps:
        raise ConfigError("cycles text contains no steps")
    return steps


def run_mixing(config: ExperimentConfig) -> dict:
    t0 = time.perf_counter()
    group_text, n_max = config.require("group", "n")
    tau = config.get("tau", 0.1)
    group = construct_group(group_text)
    steps_text = config.get("steps")
    cycles_text = config.get("cycles")
    if (steps_text is None) == (cycles_text is None):
        raise ConfigError("mixing needs exactly one of steps or cycles")
    if steps_text is not None:
        try:
            indices = [int(s) for s in steps_text.split(",") if s.strip()]
        except ValueError as exc:
            raise ConfigError(f"steps must be comma-separated indices: {exc}") from exc
    else:
        if not isinstance(group, PermutationGroup):
            raise ConfigError("cycles syntax only applies to permutation groups")
        try:
            indices = [group.index_of_cycles(c) for c in _parse_cycles_text(cycles_text)]
        except (KeyError, ValueError, IndexError) as exc:
            raise ConfigError(f"bad cycles for {group.name}: {exc}") from exc
    step_set = StepSet.uniform(group, indices)
    witness = cyclic_obstruction(group, step_set)
    profile = mixing_profile(group, step_set, n_max)
    floats = [float(v) for v in profile]
    # Compared on floats so the audit can reproduce the cut from the report.
    below = [i for i, v in enumerate(floats) if v < tau]
    first_below = below[0] if below else None
    obstruction = None
    witness_digest = None
    if witness is not None:
        label_bytes = json.dumps(list(witness.labels)).encode()
        witness_digest = hashlib.sha256(label_bytes).hexdigest()
        obstruction = {
            "modulus": witness.modulus,
            "labels_sha256": witness_digest,
            "distance_floor": _fraction_fields(witness.distance_floor()),
        }
    report = {
        "experiment": "mixing",
        "version": __version__,
        "config": config.echo(),
        "group": group.name,
        "order": group.order,
        "step_indices": list(step_set.support),
        "step_elements": [group.element_repr(i) for i in step_set.support],
        "profile_l1": floats,
        "final_l1": floats[-1],
        "first_n_below_tau": first_below,
        "obstruction": obstruction,
        "wall_clock_seconds": time.perf_counter() - t0,
    }
    if witness is not None:
        report["witness_file"] = "witness.json"
        report["_witness_labels"] = list(witness.labels)
    return report


def write_mixing_outputs(report: dict, out_dir: Union[str, Path]) -> list:
    """Profile CSV plus, when an obstruction exists, the full witness JSON."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    csv_path = out / "profile.csv"
    with csv_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n", "l1"])
        for i, v in enumerate(report["profile_l1"]):
            writer.writerow([i, repr(v)])
    paths.append(csv_path)
    labels = report.get("_witness_labels")
    if report.get("obstruction") is not None and labels is not None:
        wpath = out / report["witness_file"]
        payload = {
            "group": report["group"],
            "modulus": report["obstruction"]["modulus"],
            "labels": list(labels),
            "labels_sha256": report["obstruction"]["labels_sha256"],
        }
        wpath.write_bytes(canonical_report_bytes(payload))
        paths.append(wpath)
    return paths


# ---------------------------------------------------------------------------
# Generation experiment
# ---------------------------------------------------------------------------


def run_generation(config: ExperimentConfig) -> dict:
    t0 = time.perf_counter()
    group_text, d = config.require("group", "d")
    group = construct_group(group_text)
    body = {
        "group": group.name,
        "order": group.order,
        "d": d,
    }
    try:
        hall = hall_max_power(group, d)
        body.update({
            "tuple_count": hall.tuple_count,
            "aut_order": hall.aut_order,
            "max_power": hall.max_power,
            "sqrt_bound": hall.sqrt_bound,
            "consistent": hall.consistent,
        })
    except NotInCatalogError:
        body.update({
            "tuple_count": count_generating_tuples(group, d),
            "aut_order": None,
            "max_power": None,
            "sqrt_bound": math.isqrt(4 * group.order),
            "consistent": None,
        })
    return {
        "experiment": "generation",
        "version": __version__,
        "config": config.echo(),
        **body,
        "wall_clock_seconds": time.perf_counter() - t0,
    }


# ---------------------------------------------------------------------------
# Audit
# ---------------------------------------------------------------------------


def _compare(diffs: list, label: str, stored, recomputed) -> None:
    a = json.dumps(_jsonable(stored), sort_keys=True)
    b = json.dumps(_jsonable(recomputed), sort_keys=True)
    if a != b:
        diffs.append(f"{label}: stored {a} != recomputed {b}")


def audit_report(path: Union[str, Path]) -> list:
    """Recompute every derived field of a report from its own records.

    Returns the list of discrepancies; an empty list means the aggregates
    are exactly the function of the raw records that the harness claims.
    """
    path = Path(path)
    try:
        report = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read report {path}: {exc}") from exc
    diffs = []
    kind = report.get("experiment")
    if kind is None:
        raise ConfigError(f"{path}: no experiment field")
    config = report.get("config", {})
    if "seed" not in config:
        diffs.append("config echo lacks seed")
    if kind == "density":
        agg = report.get("aggregates", {})
        tau = agg.get("tau")
        gcd_cap = agg.get("gcd_cap")
        if tau is None or gcd_cap is None:
            diffs.append("aggregates lack tau/gcd_cap echo")
        else:
            recomputed = density_aggregates(report["words"], tau, gcd_cap)
            _compare(diffs, "aggregates", agg, recomputed)
        for rec in report.get("words", []):
            vec = rec["exponent_vector"]
            gamma = 0
            for v in vec:
                gamma = math.gcd(gamma, v)
            if gamma != rec["gamma"]:
                diffs.append(f"word {rec['index']}: gamma {rec['gamma']} != {gamma}")
    elif kind == "trend":
        rows = report.get("rows", [])
        keys = [(r["order"] is None, r["order"] or 0, r["spec"]) for r in rows]
        if keys != sorted(keys):
            diffs.append("trend rows not sorted by (order, spec)")
    elif kind == "walk-gcd":
        est = report["estimate"]
        samples = est["samples"]
        _compare(diffs, "estimate.tail_probability",
                 est["tail_probability"], est["tail_count"] / samples)
        _compare(diffs, "estimate.zero_probability",
                 est["zero_probability"], est["zero_count"] / samples)
        pred = report["prediction"]
        _compare(diffs, "prediction.zero_route_gap",
                 pred["zero_route_gap"],
                 abs(pred["zero_probability_dp"] - pred["return_probability_exact"]))
        p = pred["tail_probability"]
        se = math.sqrt(max(p * (1 - p), 1e-300) / samples)
        _compare(diffs, "agreement_z", report["agreement_z"],
                 (est["tail_probability"] - p) / se)
        for row in report.get("mod_laws", []):
            _compare(diffs, f"mod_laws[{row['modulus']}].mc_fraction",
                     row["mc_fraction"], row["mc_count"] / samples)
    elif kind == "mixing":
        floats = report["profile_l1"]
        _compare(diffs, "final_l1", report["final_l1"], floats[-1])
        tau = float(report["config"].get("tau", DEFAULTS["tau"]))
        below = [i for i, v in enumerate(floats) if v < tau]
        _compare(diffs, "first_n_below_tau", report["first_n_below_tau"],
                 below[0] if below else None)
        ob = report.get("obstruction")
        if ob is not None and report.get("witness_file"):
            wpath = path.parent / report["witness_file"]
            if wpath.exists():
                witness = json.loads(wpath.read_text())
                digest = hashlib.sha256(
                    json.dumps(list(witness["labels"])).encode()
                ).hexdigest()
                _compare(diffs, "witness digest", ob["labels_sha256"], digest)
            else:
                diffs.append(f"witness file {wpath} missing")
    elif kind == "generation":
        if report.get("aut_order") is not None:
            _compare(diffs, "max_power", report["max_power"],
                     report["tuple_count"] // report["aut_order"])
            _compare(diffs, "consistent", report["consistent"],
                     report["sqrt_bound"] <= report["max_power"])
        _compare(diffs, "sqrt_bound", report["sqrt_bound"],
                 math.isqrt(4 * report["order"]))
    else:
        raise ConfigError(f"{path}: unknown experiment {kind!r}")
    return diffs


# ---------------------------------------------------------------------------
# Cayley-table ingestion
# ---------------------------------------------------------------------------

# Structural characterizations are computed only for tables up to this order.
INGEST_STRUCTURE_CAP = 2048


def ingest_cayley_table(path: Union[str, Path],
                        out_dir: Optional[Union[str, Path]] = None) -> dict:
    """Validate an external Cayley-table file and summarize the group.

    Raises MalformedCayleyTableError (via the loader) for anything that is
    not a group table.  When `out_dir` is given, a summary JSON is written
    there.
    """
    group = load_cayley_table(path)
    summary = {
        "source": str(path),
        "order": group.order,
        "abelian": None,
        "center_size": None,
        "perfect": None,
    }
    if group.order <= INGEST_STRUCTURE_CAP:
        z = center(group)
        summary["center_size"] = len(z)
        summary["abelian"] = len(z) == group.order
        summary["perfect"] = len(commutator_subgroup(group)) == group.order
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "ingest.json").write_bytes(canonical_report_bytes(summary))
    return summary

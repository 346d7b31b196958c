"""Named parameter sweeps, CSV emitters and run summaries.

Every CSV starts with a header line, writes floats with 17 significant
digits and carries a ``config_hash`` column, so re-running a Landauer sweep
with the same configuration reproduces the file byte for byte. Bead labels
in output files are 1-based.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import partial
from itertools import product
from pathlib import Path

import numpy as np

from . import __version__
from .config import ConfigError, fk_from_config, md_from_config, quad_from_config
from .md import FKPotentialSpec, MDConfig, run_fk_rectification
from .model import BathSpec, ChainSpec, QuadratureSpec, linear_gradient_profile
from .transport import CurrentReport, TransmissionMatrix, compute_M, rectification

FIG3_TEMPS = (1.0, 0.5, 0.2, 0.1)
#: FK sweep geometry: lattice period 2 pi (onsite curvature V) with the potential
#: minima on the lattice sites; the library default is period 1, phase 0
FK_SWEEP_OPTIONS = {"period": 2 * math.pi, "phase": math.pi, "form": "cosine"}


def tgho5(k_left: float, k_right: float, temps=FIG3_TEMPS, k_inner: float = 1.0, gamma: float = 1.0):
    """Five beads, baths on 1, 2 (hot) and 4, 5 (cold); k0 = k1 = k_left, k4 = k5 = k_right."""
    chain = ChainSpec.from_springs([k_left, k_left, k_inner, k_inner, k_right, k_right])
    baths = BathSpec.edges(5, temps[:2], temps[2:], gamma=gamma)
    return chain, baths


def gradient_temps(dt_hot: float, dt_cold: float, top: float = 10.0):
    """T = (top, top - dT_H, dT_C, 0) as used for the gradient maps."""
    return (top, top - dt_hot, dt_cold, 0.0)


def zoned_chain(n_b: int, n_i: int, k_left: float = 1.0, k_right: float = 0.1, k_other: float = 1.0,
                temps=FIG3_TEMPS, gamma: float = 1.0):
    """n_b baths per side with linear in-zone temperature gradients.

    Springs inside the left zone (wall to the last hot bead) are ``k_left``,
    inside the right zone ``k_right``, everything else ``k_other``.
    """
    n = 2 * n_b + n_i
    springs = [k_other] * (n + 1)
    for i in range(n_b):
        springs[i] = k_left
        springs[n - i] = k_right
    hot = linear_gradient_profile(temps[0], temps[1], n_b)
    cold = linear_gradient_profile(temps[2], temps[3], n_b)
    return ChainSpec.from_springs(springs), BathSpec.edges(n, hot, cold, gamma=gamma)


def fk_chain(v_left: float, v_right: float = 1.0, k_left: float = 0.1, k_right: float = 1.0, n_left: int = 2,
             n: int = 5, **fk_options):
    """FK five-bead chain: springs from the left wall through the left group are ``k_left``.

    ``fk_options`` (period, phase, form) default to ``FK_SWEEP_OPTIONS``.
    """
    options = {**FK_SWEEP_OPTIONS, **fk_options}
    springs = [k_left] * n_left + [k_right] * (n + 1 - n_left)
    chain = ChainSpec.from_springs(springs, spacing=options["period"])
    return chain, FKPotentialSpec.split(n, v_left, v_right, n_left, **options)


# ---------------------------------------------------------------- point kernels

def _report_values(rep: CurrentReport) -> dict:
    return {
        "R": rep.ratio,
        "R_max": rep.rectification,
        "J": rep.total_forward,
        "J_rev": rep.total_reverse,
        "delta": rep.delta,
        "conservation": rep.conservation_residual,
    }


def _fig3_point(quad, regime, k_left, k_right):
    return _report_values(rectification(*tgho5(k_left, k_right), quad, regime))


def _fig4_point(quad, regime, k_left, k_right):
    chain, baths = tgho5(k_left, k_right)
    M = compute_M(chain, baths, quad)
    return {f"M{l + 1}{m + 1}": M[l, m] for l, m in ((0, 3), (1, 4), (0, 4), (1, 3), (0, 1), (3, 4))}


def _fig5_point(quad, regime, dT_H, dT_C):
    chain, _ = tgho5(2.0, 0.1)
    baths = BathSpec.edges(5, *_split(gradient_temps(dT_H, dT_C)))
    return _report_values(rectification(chain, baths, quad, regime))


def _fig6_point(quad, regime, dT):
    chain, _ = tgho5(2.0, 0.1)
    baths = BathSpec.edges(5, *_split(gradient_temps(dT, dT)))
    q = rectification(chain, baths, quad, "quantum")
    c = rectification(chain, baths, quad, "classical")
    return {
        "R": q.ratio,
        "delta": q.delta,
        "J": q.total_forward,
        "J_rev": q.total_reverse,
        "delta_classical": c.delta,
        "J_classical": c.total_forward,
        "conservation": max(q.conservation_residual, c.conservation_residual),
    }


def _split(temps):
    return temps[:2], temps[2:]


def _nb_point(quad, regime, n_b):
    return _report_values(rectification(*zoned_chain(int(n_b), 1), quad, regime))


def _ni_point(quad, regime, n_i):
    return _report_values(rectification(*zoned_chain(2, int(n_i)), quad, regime))


def _fk_point(md, fk_options, v_left):
    chain, fk = fk_chain(v_left, **fk_options)
    fwd, rev, r, err = run_fk_rectification(chain, fk, 1.0, 0.1, md)
    return {"J": fwd.mean_current, "J_err": fwd.stderr, "J_rev": rev.mean_current, "J_rev_err": rev.stderr,
            "R": r, "R_err": err}


@dataclass(frozen=True)
class Experiment:
    axes: dict
    kernel: object
    regimes: tuple = ("classical", "quantum")
    md: bool = False


EXPERIMENTS = {
    "fig3_contour": Experiment({"k_left": (0.1, 2.0, 21), "k_right": (0.1, 2.0, 21)}, _fig3_point),
    "fig4_M_elements": Experiment({"k_left": (0.1, 2.0, 21), "k_right": (0.1, 2.0, 21)}, _fig4_point,
                                  regimes=("classical",)),
    "fig5_gradient_map": Experiment({"dT_H": (0.0, 5.0, 21), "dT_C": (0.0, 5.0, 21)}, _fig5_point),
    "fig6_quantum_diagonal": Experiment({"dT": (0.0, 5.0, 21)}, _fig6_point, regimes=("quantum",)),
    "lengthdep_NB": Experiment({"n_b": list(range(1, 11))}, _nb_point),
    "lengthdep_NI": Experiment({"n_i": list(range(1, 41))}, _ni_point),
    "fig7_fk_sweep": Experiment({"v_left": [0.0, 0.25, 0.5, 1.0, 1.5, 2.0]}, _fk_point, regimes=("md",), md=True),
}
NAMES = tuple(EXPERIMENTS) + ("custom",)


@dataclass
class ExperimentSpec:
    name: str
    overrides: dict = field(default_factory=dict)
    output_dir: Path | None = None
    regime: str | None = None
    seed: int | None = None
    workers: int = 1
    config: dict = field(default_factory=dict)


@dataclass
class SweepResult:
    name: str
    axes: dict[str, list]
    values: dict[str, np.ndarray]
    provenance: dict
    files: list[str] = field(default_factory=list)

    def peak(self, key: str = "R_max"):
        """(value, axis point) of the largest finite ``key`` entry."""
        arr = np.where(np.isfinite(self.values[key]), self.values[key], -np.inf)
        idx = np.unravel_index(int(np.argmax(arr)), arr.shape)
        point = {name: self.axes[name][i] for name, i in zip(self.axes, idx)}
        return float(arr[idx]), point


def _axis(name, default, override):
    spec = default if override is None else override
    if isinstance(spec, dict):
        try:
            spec = (spec["start"], spec["stop"], spec["num"])
        except KeyError as exc:
            raise ConfigError(f"axis {name} needs start, stop and num") from exc
        return [float(x) for x in np.linspace(spec[0], spec[1], int(spec[2]))]
    if isinstance(spec, tuple):
        return [float(x) for x in np.linspace(spec[0], spec[1], int(spec[2]))]
    if isinstance(spec, list) and spec and all(isinstance(x, (int, float)) for x in spec):
        return list(spec)
    raise ConfigError(f"axis {name} must be a list of numbers or {{start, stop, num}}")


def config_hash(payload: dict) -> str:
    text = json.dumps(payload, sort_keys=True, default=str)
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.17g}"
    if x is None:
        return ""
    return str(x)


def write_csv(path: Path, header, rows) -> str:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(x) for x in row])
    return str(path)


def write_sweep_csv(result: SweepResult, path: Path) -> str:
    names = list(result.axes)
    keys = list(result.values)
    grid = product(*(range(len(result.axes[a])) for a in names))
    rows = []
    for idx in grid:
        axis_vals = [result.axes[a][i] for a, i in zip(names, idx)]
        rows.append(axis_vals + [result.values[k][idx] for k in keys] + [result.provenance["config_hash"]])
    return write_csv(path, names + keys + ["config_hash"], rows)


def write_m_csv(M: TransmissionMatrix, path: Path, chash: str) -> str:
    n = M.values.shape[0]
    rows = [(l + 1, m + 1, M.values[l, m], chash) for l in range(n) for m in range(n) if l != m and M.values[l, m] > 0]
    return write_csv(path, ["l", "m", "M_lm", "config_hash"], rows)


def write_report_csv(rep: CurrentReport, path: Path, chash: str) -> str:
    rows = []
    for direction, per_bath, total in (
        ("forward", rep.per_bath, rep.total_forward),
        ("reverse", rep.per_bath_reverse, rep.total_reverse),
    ):
        if per_bath is None:
            continue
        for bead, j in sorted(per_bath.items()):
            rows.append((direction, bead + 1, j, total, rep.delta, rep.ratio, rep.regime, chash))
    header = ["direction", "bath", "J_l", "total", "delta", "ratio", "regime", "config_hash"]
    return write_csv(path, header, rows)


def _map(func, items, workers: int):
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            return list(pool.map(func, items))
    return [func(x) for x in items]


def _run_named(spec: ExperimentSpec) -> SweepResult:
    exp = EXPERIMENTS[spec.name]
    pinned = {"chain", "baths", "effective"} & set(spec.config)
    if not exp.md:
        pinned |= {"md", "fk"} & set(spec.config)
    if pinned:
        raise ConfigError(f"{spec.name} pins the model; [{', '.join(sorted(pinned))}] does not apply to it")
    unknown = set(spec.overrides) - set(exp.axes)
    if unknown:
        raise ConfigError(f"{spec.name} does not expose {sorted(unknown)}; use 'custom' for other parameters")
    regime = spec.regime or exp.regimes[0]
    if regime not in exp.regimes:
        raise ConfigError(f"{spec.name} supports regimes {exp.regimes}, not {regime!r}")
    axes = {name: _axis(name, default, spec.overrides.get(name)) for name, default in exp.axes.items()}

    payload = {"experiment": spec.name, "axes": axes, "regime": regime}
    if exp.md:
        md = md_from_config(spec.config, spec.seed)
        fk_sec = spec.config.get("fk", {})
        extra = set(fk_sec) - set(FK_SWEEP_OPTIONS)
        if extra:
            raise ConfigError(f"{spec.name} pins FK amplitudes; only period/phase/form may be set, got {sorted(extra)}")
        fk_options = {**FK_SWEEP_OPTIONS, **fk_sec}
        payload.update(md=asdict(md), fk=fk_options)
        kernel = partial(exp.kernel, md, fk_options)
    else:
        quad = quad_from_config(spec.config)
        payload["quadrature"] = asdict(quad)
        kernel = partial(exp.kernel, quad, regime)
    chash = config_hash(payload)

    points = list(product(*axes.values()))
    outputs = _map(_Star(kernel), points, spec.workers)
    shape = tuple(len(v) for v in axes.values())
    keys = list(outputs[0])
    values = {k: np.array([o[k] for o in outputs], dtype=float).reshape(shape) for k in keys}
    provenance = {"experiment": spec.name, "config_hash": chash, "code_version": __version__, "regime": regime}
    if exp.md:
        provenance["seed"] = payload["md"]["base_seed"]
    result = SweepResult(spec.name, axes, values, provenance)
    if spec.output_dir is not None:
        result.files.append(write_sweep_csv(result, Path(spec.output_dir) / f"{spec.name}.csv"))
    return result


class _Star:
    """Picklable ``lambda args: func(*args)``."""

    def __init__(self, func):
        self.func = func

    def __call__(self, args):
        return self.func(*args)


def _run_custom(spec: ExperimentSpec) -> SweepResult:
    from .config import baths_from_config, chain_from_config, effective_from_config
    from .md import run_md
    from .transport import effective_diode

    cfg = spec.config
    if spec.overrides:
        raise ConfigError("custom runs take the full model from the config, not [sweep] overrides")
    run = cfg.get("run", {})
    regime = spec.regime or run.get("regime", "classical")
    chain = chain_from_config(cfg)
    quad = quad_from_config(cfg)
    payload = {"experiment": "custom", "config": cfg, "regime": regime, "seed": spec.seed}
    chash = config_hash(payload)
    out = Path(spec.output_dir) if spec.output_dir is not None else None
    provenance = {"experiment": "custom", "config_hash": chash, "code_version": __version__, "regime": regime}
    files = []

    if regime == "effective":
        eff, t_hot, t_cold = effective_from_config(cfg)
        rep = effective_diode(chain, eff, t_hot, t_cold, quad)
    elif regime in ("classical", "quantum"):
        baths = baths_from_config(cfg)
        rep = rectification(chain, baths, quad, regime, run.get("reversal", "mirror"))
        if out is not None and regime == "classical":
            files.append(write_m_csv(compute_M(chain, baths, quad), out / "custom_M.csv", chash))
    elif regime == "md":
        baths = baths_from_config(cfg)
        md = md_from_config(cfg, spec.seed)
        provenance["seed"] = md.base_seed
        res = run_md(chain, baths, fk_from_config(cfg), md, workers=spec.workers,
                     dump_every=cfg.get("run", {}).get("dump_every"))
        values = {"J": np.array(res.mean_current), "J_err": np.array(res.stderr)}
        if out is not None:
            rows = [(r, j, chash) for r, j in enumerate(res.per_realization)]
            files.append(write_csv(out / "custom_md_realizations.csv", ["realization", "current", "config_hash"], rows))
            if res.trajectory is not None:
                rows = [(int(s), int(b) + 1, x, v, chash) for s, b, x, v in res.trajectory]
                files.append(write_csv(out / "custom_trajectory.csv",
                                       ["step", "bead", "position", "velocity", "config_hash"], rows))
        return SweepResult("custom", {}, values, provenance, files)
    else:
        raise ConfigError(f"unknown regime {regime!r}")

    if out is not None:
        files.append(write_report_csv(rep, out / "custom_currents.csv", chash))
    values = {k: np.array(v, dtype=float) for k, v in _report_values(rep).items()}
    return SweepResult("custom", {}, values, provenance, files)


def run_experiment(spec: ExperimentSpec) -> SweepResult:
    if spec.name == "custom":
        return _run_custom(spec)
    if spec.name not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {spec.name!r}; choose from {NAMES}")
    return _run_named(spec)


# ---------------------------------------------------------------- summaries

@dataclass
class CheckLine:
    name: str
    passed: bool
    detail: str

    def __str__(self):
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.detail}"


def sweep_checks(result: SweepResult) -> list[CheckLine]:
    """Known expectations that can be read off a single sweep."""
    v, name = result.values, result.name
    regime = result.provenance.get("regime")
    lines = []
    if name == "fig3_contour" and regime == "classical":
        peak, at = result.peak()
        lines.append(CheckLine("fig3 peak R", abs(peak - 1.4) <= 0.1, f"max(R,1/R) = {peak:.4f} at {at}"))
    elif name == "fig6_quantum_diagonal":
        r = v["R"]
        rel = np.abs(v["delta_classical"]) / np.abs(v["J_classical"])
        lines.append(CheckLine("fig6 classical delta J = 0", bool(np.all(rel < 1e-8)), f"max |dJ|/|J| = {rel.max():.2e}"))
        lines.append(CheckLine("fig6 R(0) = 1", abs(r[0] - 1) < 1e-8, f"R(0) = {r[0]:.12f}"))
        dev = np.abs(r[1:] - 1)
        lines.append(CheckLine("fig6 quantum R != 1", bool(np.all(dev > 1e-7)), f"min |R-1| = {dev.min():.3e}"))
    elif name == "lengthdep_NB":
        r = v["R_max"][np.array(result.axes["n_b"]) >= 2]
        ok = bool(np.all(np.diff(r) < 0) and np.all(r > 1))
        lines.append(CheckLine("R decays with N_B", ok, "R = " + ", ".join(f"{x:.4f}" for x in r)))
    elif name == "lengthdep_NI":
        n_i = np.array(result.axes["n_i"])
        r = v["R_max"]
        tail = np.abs(np.diff(r)) / r[:-1]
        tail = tail[n_i[:-1] >= 20]
        ok = bool(tail.size and np.all(tail < 0.01))
        lines.append(CheckLine("R saturates with N_I", ok, f"max successive change beyond N_I=20: {tail.max() if tail.size else math.nan:.2e}"))
    elif name == "fig7_fk_sweep":
        for vl, r, e in zip(result.axes["v_left"], v["R"], v["R_err"]):
            lines.append(CheckLine(f"fk R at V_L={vl:g}", True, f"R = {r:.4f} +/- {e:.4f}"))
        off = int(np.sum(np.abs(v["R"] - 1) > 2 * v["R_err"]))
        lines.append(CheckLine("fk R != 1 beyond 2 stderr", off >= 2, f"{off} of {v['R'].size} V_L values"))
    return lines


def summarize(results, out_dir=None, checks=()) -> dict:
    """Peak R and its location per sweep plus pass/fail lines.

    Raises ValueError when two results of the same experiment carry
    different config hashes.
    """
    seen = {}
    for res in results:
        h = res.provenance["config_hash"]
        if seen.setdefault(res.name, h) != h:
            raise ValueError(f"refusing to merge {res.name} results with different config hashes")

    entries, lines = [], list(checks)
    for res in results:
        entry = {"experiment": res.name, "provenance": res.provenance, "files": [Path(f).name for f in res.files]}
        key = "R_max" if "R_max" in res.values else ("R" if "R" in res.values else None)
        if key is not None and res.axes:
            peak, at = res.peak(key)
            entry.update(peak_R=peak, argmax=at)
        elif key is not None:
            entry["R"] = float(res.values[key])
        if res.name == "fig7_fk_sweep":
            entry["R_by_v_left"] = [
                {"v_left": vl, "R": float(r), "R_err": float(e)}
                for vl, r, e in zip(res.axes["v_left"], res.values["R"], res.values["R_err"])
            ]
        entries.append(entry)
        lines.extend(sweep_checks(res))

    summary = {
        "results": entries,
        "checks": [{"name": c.name, "passed": bool(c.passed), "detail": c.detail} for c in lines],
        "all_passed": bool(all(c.passed for c in lines)),
    }
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "summary.json", "w") as fh:
            json.dump(summary, fh, indent=2, sort_keys=True, default=fmt)
            fh.write("\n")
        text = []
        for e in entries:
            peak = e.get("peak_R", e.get("R"))
            peak_txt = f"{peak:.6g}" if isinstance(peak, float) else "-"
            text.append(f"{e['experiment']:<24} peak R = {peak_txt:<12} at {e.get('argmax', '-')}  [{e['provenance']['config_hash']}]")
        text += [str(c) for c in lines]
        (out / "summary.txt").write_text("\n".join(text) + ("\n" if text else ""))
    return summary

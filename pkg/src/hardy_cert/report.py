"""Run configuration, CSV/JSON artifacts and figure reproduction.

Every artifact starts with the schema version and the full RunConfig, so two
runs with the same configuration write identical bytes.  CSV files carry the
header as ``#`` comment lines followed by an ordinary CSV table.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

SCHEMA_VERSION = 1


@dataclass
class RunConfig:
    """Command, its arguments and the solver settings that produced an artifact."""

    command: str
    args: dict = field(default_factory=dict)
    solver: str = "CLARABEL"
    tolerances: dict = field(default_factory=dict)
    seed: int = 0
    outputs: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        return cls(**json.loads(text))


# --- CSV ---------------------------------------------------------------------------

def _fmt(v: Any) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if v == 0:
            v = 0.0  # drop negative zero
        return repr(v)
    return str(v)


def _parse(text: str) -> Any:
    if text == "true":
        return True
    if text == "false":
        return False
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def format_csv(config: RunConfig, columns: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buf = io.StringIO()
    buf.write(f"# schema_version={SCHEMA_VERSION}\n")
    buf.write(f"# config={config.to_json()}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        if len(r) != len(columns):
            raise ValueError(f"row has {len(r)} fields, expected {len(columns)}")
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


def write_csv(path, config: RunConfig, columns, rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_csv(config, columns, rows))
    return path


@dataclass
class Table:
    schema_version: int
    config: RunConfig
    columns: list[str]
    rows: list[list[Any]]

    def column(self, name: str) -> list[Any]:
        k = self.columns.index(name)
        return [r[k] for r in self.rows]


def parse_csv(text: str) -> Table:
    lines = text.splitlines()
    meta = {}
    body_start = 0
    for i, line in enumerate(lines):
        if not line.startswith("#"):
            body_start = i
            break
        key, _, val = line[1:].strip().partition("=")
        meta[key] = val
    else:
        body_start = len(lines)
    if "schema_version" not in meta or "config" not in meta:
        raise ValueError("missing schema_version or config header")
    version = int(meta["schema_version"])
    if version != SCHEMA_VERSION:
        raise ValueError(f"unsupported schema version {version}")
    reader = csv.reader(lines[body_start:])
    columns = next(reader)
    rows = [[_parse(c) for c in r] for r in reader]
    return Table(version, RunConfig.from_json(meta["config"]), columns, rows)


def read_csv(path) -> Table:
    return parse_csv(Path(path).read_text())


# --- JSON --------------------------------------------------------------------------

def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def format_json(config: RunConfig, result: dict) -> str:
    doc = {"schema_version": SCHEMA_VERSION, "config": json.loads(config.to_json()),
           "result": _jsonable(result)}
    return json.dumps(doc, sort_keys=True, indent=1)


def parse_json(text: str) -> tuple[RunConfig, dict]:
    doc = json.loads(text)
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise ValueError(f"unsupported schema version {doc.get('schema_version')}")
    return RunConfig(**doc["config"]), doc["result"]


# --- figures -----------------------------------------------------------------------

FIG1_W = 0.44
FIG2_WS = (0.0, 0.44)
RULES = ("sum", "third")


def fig2_l_grid(steps: int) -> np.ndarray:
    """``steps`` equally spaced seed bounds ending at the uniform point ``l = 1/4``."""
    return np.linspace(0.25 / steps, 0.25, steps)


def fig1_rows(points: int = 12, w: float = FIG1_W, solver=None) -> list[list[float]]:
    """``I_w`` from the classical bound to the quantum maximum, with guess and min-entropy."""
    from .iw import iw_classical, iw_quantum
    from .npa.programs import guess_prob_vs_iw

    lo, hi = iw_classical(w), iw_quantum(w)
    rows = []
    for v in np.linspace(lo, hi, points):
        g = guess_prob_vs_iw(w, float(v), (1, 1), solver=solver)
        rows.append([float(v), g.guess_prob, g.h_bits, g.sdp.status])
    return rows


def fig2_rows(steps: int = 20, solver=None) -> tuple[list[str], list[list[Any]]]:
    from .npa.programs import mdl_rate_curve

    ls = fig2_l_grid(steps)
    cols, curves = ["l"], []
    for rule in RULES:
        for w in FIG2_WS:
            cols.append(f"h_{rule}_w{w:g}")
            curves.append([p.h_bits for p in mdl_rate_curve(w, ls, rule, solver=solver)])
    rows = [[float(l)] + [c[i] for c in curves] for i, l in enumerate(ls)]
    return cols, rows


def summary_rows() -> list[list[Any]]:
    """Reference constants, recomputed, with absolute deviations."""
    from .colored import ColoredModel, theta_w0
    from .iw import iw_quantum
    from .ladder import ladder_optimal_t
    from .npa.programs import guess_prob_vs_iw
    from .tilted import breakpoints, quantum_max, randomness

    w0, w1 = breakpoints()
    cm = ColoredModel(w0)
    ref = [
        ("quantum_max(0)", 0.0901699, quantum_max(0.0)),
        ("w0", -0.1546, w0),
        ("w1", -0.1054, w1),
        ("h_global(w0)", 1.6806, randomness(w0).h_global),
        ("p_k", 0.01563, cm.pk),
        ("p_0", 0.01366, cm.p0),
        ("theta_w0", 1.1356, theta_w0()),
        ("ladder_opt(N=1)", 0.0901699, ladder_optimal_t(1)[1]),
        ("H_max_I_0.44", 1.5860, guess_prob_vs_iw(FIG1_W, iw_quantum(FIG1_W)).h_bits),
    ]
    return [[name, ref_value, float(val), abs(float(val) - ref_value)] for name, ref_value, val in ref]


def render_plots(outdir: Path, fig1: list[list[Any]], fig2_cols: list[str],
                 fig2: list[list[Any]]) -> list[Path]:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    outdir = Path(outdir)
    paths = []
    fig, ax = plt.subplots(figsize=(5, 3.5))
    x = [r[0] for r in fig1]
    ax.plot(x, [r[1] for r in fig1], "o-", label="guess probability")
    ax.plot(x, [r[2] for r in fig1], "s-", label="min-entropy (bits)")
    ax.set_xlabel(r"$I_{w=0.44}$")
    ax.legend()
    fig.tight_layout()
    p = outdir / "fig1.png"
    fig.savefig(p, dpi=120, metadata={"Software": None})
    plt.close(fig)
    paths.append(p)

    fig, ax = plt.subplots(figsize=(5, 3.5))
    ls = [r[0] for r in fig2]
    for k, name in enumerate(fig2_cols[1:], start=1):
        ax.plot(ls, [r[k] for r in fig2], label=name)
    ax.set_xlabel("l")
    ax.set_ylabel("min-entropy (bits)")
    ax.legend()
    fig.tight_layout()
    p = outdir / "fig2.png"
    fig.savefig(p, dpi=120, metadata={"Software": None})
    plt.close(fig)
    paths.append(p)
    return paths


def reproduce_figures(outdir, config: RunConfig, steps: int = 20, fig1_points: int = 12,
                      plots: bool = True, solver=None) -> dict[str, Path]:
    """Write fig1.csv, fig2.csv, summary.csv and, unless disabled, PNG renderings."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    f1 = fig1_rows(fig1_points, solver=solver)
    c2, f2 = fig2_rows(steps, solver=solver)
    out = {
        "fig1": write_csv(outdir / "fig1.csv", config, ["iw_value", "guess_prob", "h_bits", "status"], f1),
        "fig2": write_csv(outdir / "fig2.csv", config, c2, f2),
        "summary": write_csv(outdir / "summary.csv", config,
                             ["constant", "reference", "computed", "deviation"], summary_rows()),
    }
    if plots:
        p1, p2 = render_plots(outdir, f1, c2, f2)
        out["fig1_png"], out["fig2_png"] = p1, p2
    return out

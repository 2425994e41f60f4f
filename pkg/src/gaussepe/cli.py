"""
Command-line driver.

    gaussepe chain-scan  --betas 8,16,32,64 --ells 1:256 --out chain.csv
    gaussepe ssh-scan    --ratios 0.5,2 --temperatures 0.05,0.2
    gaussepe piflux-scan --Lx 200 --Ly 100 --betas 4,8,16
    gaussepe toy
    gaussepe fit chain.csv --x l_eff --log-x --y epe

Parameters come from ``--config FILE.json`` (keys are the long flag names with
dashes replaced by underscores) and are overridden by explicit flags.

Exit codes: 0 success, 2 configuration error, 3 numerical failure, 4 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from dataclasses import dataclass, field, fields
from typing import Dict, List, Optional, Sequence

import numpy as np

from . import __version__
from .analysis import (
    fit_line,
    toy_pair_epe,
    toy_pair_mi_exact,
    toy_pair_mi_leading,
    toy_pair_weight,
)
from .epe import DEFAULT_TAU
from .errors import EPEError, NumericalError
from .gaussian import binary_entropy
from .scans import chain_scan, piflux_scan, ssh_scan

log = logging.getLogger("gaussepe")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_IO = 0, 2, 3, 4

COLUMNS = {
    "chain-scan": ["model", "beta", "ell", "epe", "vne", "l_eff"],
    "ssh-scan": ["model", "temperature", "t2_over_t1", "epe", "half_mi"],
    "piflux-scan": ["model", "beta", "ell_x", "epe_density", "inv_l_dirac", "collapse_ordinate"],
    "toy": ["lambda", "c", "weight", "epe", "mi", "mi_leading", "epe_over_mi_s"],
    "fit": ["x", "y", "window", "n_points", "slope", "intercept", "r_squared"],
}


class ConfigError(Exception):
    pass


# -----------------------------------------------------------------------------
# Configuration
# -----------------------------------------------------------------------------


@dataclass
class RunConfig:
    command: str
    out: Optional[str] = None
    format: str = "csv"
    threads: Optional[int] = None
    tau: float = DEFAULT_TAU
    # chain
    L: int = 1024
    bc: str = "antiperiodic"
    kernel: str = "finite"
    # ssh
    L_cells: int = 60
    t1: float = 1.0
    ratios: List[float] = field(default_factory=lambda: [0.5, 1.2, 1.5, 2.0, 2.5, 3.0])
    temperatures: List[float] = field(default_factory=lambda: [0.05, 0.1, 0.2, 0.3, 0.5])
    # pi-flux
    Lx: int = 200
    Ly: int = 100
    bc_x: str = "periodic"
    bc_y: str = "antiperiodic"
    full_matrix: bool = False
    # shared model parameters
    t: float = 1.0
    betas: Optional[List[float]] = None
    ells: Optional[List[int]] = None
    # toy
    lambdas: List[float] = field(default_factory=lambda: [0.0, 0.3, 0.5, 0.7, 0.9])
    cs: List[float] = field(default_factory=lambda: [0.001, 0.01])
    # fit
    input: Optional[str] = None
    x: str = "l_eff"
    y: str = "epe"
    log_x: bool = False
    window: Optional[List[float]] = None

    def __post_init__(self):
        if self.betas is None:
            self.betas = [8.0, 16.0, 32.0, 64.0] if self.command == "chain-scan" else [4.0, 8.0, 16.0]
        if self.ells is None:
            if self.command == "chain-scan":
                self.ells = list(range(1, min(256, self.L - 1) + 1))
            else:
                self.ells = [w for w in (2, 3, 4, 6, 8, 12, 16, 24, 32, 48, 64, 100) if w <= self.Lx // 2]

    def validate(self) -> "RunConfig":
        if self.format not in ("csv", "jsonl"):
            raise ConfigError(f"--format must be csv or jsonl, got {self.format!r}")
        if self.threads is not None and self.threads < 1:
            raise ConfigError("--threads must be >= 1")
        if not 0 < self.tau <= 1e-6:
            raise ConfigError("--tau must lie in (0, 1e-6]")
        if self.command in ("chain-scan", "piflux-scan"):
            if not self.betas:
                raise ConfigError("beta list is empty")
            if any(not (b > 0 and math.isfinite(b)) for b in self.betas):
                raise ConfigError("betas must be finite and > 0")
            if not self.ells or any(e < 1 for e in self.ells):
                raise ConfigError("subsystem widths must be >= 1")
        if self.command == "chain-scan":
            if self.L < 2:
                raise ConfigError("--L must be >= 2")
            if self.kernel == "finite" and max(self.ells) >= self.L:
                raise ConfigError("interval lengths must be < L")
        if self.command == "ssh-scan":
            if self.L_cells < 2:
                raise ConfigError("--L-cells must be >= 2")
            if not self.temperatures or any(T <= 0 for T in self.temperatures):
                raise ConfigError("temperatures must be nonempty and > 0")
            if not self.ratios:
                raise ConfigError("ratio list is empty")
        if self.command == "piflux-scan":
            if self.Ly % 2:
                raise ConfigError("--Ly must be even")
            if self.Lx < 2 or self.Ly < 2:
                raise ConfigError("lattice sizes must be >= 2")
            if max(self.ells) > self.Lx:
                raise ConfigError("strip widths must be <= Lx")
        if self.command == "fit":
            if not self.input:
                raise ConfigError("fit needs an input file")
            if self.window is not None and len(self.window) != 2:
                raise ConfigError("--window takes two numbers")
            if self.window is not None and self.window[0] > self.window[1]:
                raise ConfigError("--window needs LO <= HI")
        return self


def parse_float_list(text: str) -> List[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad number list {text!r}") from exc


def parse_int_grid(text: str) -> List[int]:
    """``"1,2,5"`` or ``"start:stop[:step]"`` with ``stop`` inclusive."""
    try:
        if ":" in text:
            parts = [int(p) for p in text.split(":")]
            if len(parts) not in (2, 3):
                raise ValueError
            step = parts[2] if len(parts) == 3 else 1
            return list(range(parts[0], parts[1] + 1, step))
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad integer grid {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with parameters; flags override it")
    common.add_argument("--out", help="output path (default stdout)")
    common.add_argument("--format", choices=["csv", "jsonl"])
    common.add_argument("--threads", type=int, help="parallel width (default: all cores)")
    common.add_argument("--tau", type=float, help="cutoff on 1 - lambda^2 for locally pure channels")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="gaussepe", description=__doc__.split("\n\n")[0].strip())
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("chain-scan", parents=[common], help="1D chain EPE and entropy vs interval length")
    p.add_argument("--L", type=int)
    p.add_argument("--t", type=float)
    p.add_argument("--bc", choices=["periodic", "antiperiodic"])
    p.add_argument("--betas", type=parse_float_list)
    p.add_argument("--ells", type=parse_int_grid)
    p.add_argument("--kernel", choices=["finite", "infinite"])

    p = sub.add_parser("ssh-scan", parents=[common], help="SSH half-chain EPE and I/2")
    p.add_argument("--L-cells", dest="L_cells", type=int)
    p.add_argument("--t1", type=float)
    p.add_argument("--ratios", type=parse_float_list, help="t2/t1 values")
    p.add_argument("--temperatures", type=parse_float_list)

    p = sub.add_parser("piflux-scan", parents=[common], help="pi-flux strip EPE and collapse coordinates")
    p.add_argument("--Lx", type=int)
    p.add_argument("--Ly", type=int)
    p.add_argument("--t", type=float)
    p.add_argument("--bc-x", dest="bc_x", choices=["periodic", "antiperiodic", "open"])
    p.add_argument("--bc-y", dest="bc_y", choices=["periodic", "antiperiodic"])
    p.add_argument("--betas", type=parse_float_list)
    p.add_argument("--ells", type=parse_int_grid, help="strip widths ell_x")
    p.add_argument("--full-matrix", dest="full_matrix", action="store_true", default=None)

    p = sub.add_parser("toy", parents=[common], help="two-mode toy model closed forms")
    p.add_argument("--lambdas", type=parse_float_list)
    p.add_argument("--cs", type=parse_float_list)

    p = sub.add_parser("fit", parents=[common], help="least-squares line through two columns of a scan")
    p.add_argument("input")
    p.add_argument("--x")
    p.add_argument("--y")
    p.add_argument("--log-x", dest="log_x", action="store_true", default=None)
    p.add_argument("--window", type=float, nargs=2, metavar=("LO", "HI"))
    return parser


_NON_PARAMS = {"config", "verbose", "command"}


def resolve_config(args: argparse.Namespace) -> RunConfig:
    params: Dict = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                loaded = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file is not valid JSON: {exc}") from exc
        if not isinstance(loaded, dict):
            raise ConfigError("config file must hold a JSON object")
        known = {f.name for f in fields(RunConfig)}
        unknown = set(loaded) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        params.update(loaded)
    for key, value in vars(args).items():
        if key in _NON_PARAMS or value is None:
            continue
        params[key] = value
    params.pop("command", None)
    try:
        cfg = RunConfig(command=args.command, **params)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    return cfg.validate()


# -----------------------------------------------------------------------------
# Output
# -----------------------------------------------------------------------------


def fmt(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    v = float(value)
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return f"{v:.12g}"


def render(rows: Sequence[Dict], columns: Sequence[str], form: str) -> str:
    buf = io.StringIO()
    if form == "csv":
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([fmt(r[c]) for c in columns])
    else:
        for r in rows:
            rec = {}
            for c in columns:
                v = r[c]
                s = fmt(v)
                if isinstance(v, str):
                    rec[c] = v
                elif s in ("inf", "-inf"):
                    rec[c] = s
                elif isinstance(v, (int, np.integer)) and not isinstance(v, bool):
                    rec[c] = int(v)
                else:
                    rec[c] = float(s)
            buf.write(json.dumps(rec) + "\n")
    return buf.getvalue()


def write_output(text: str, path: Optional[str]) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def read_table(path: str) -> List[Dict[str, str]]:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ConfigError(f"{path} is empty")
    if lines[0].lstrip().startswith("{"):
        return [{k: str(v) for k, v in json.loads(ln).items()} for ln in lines]
    return list(csv.DictReader(lines))


# -----------------------------------------------------------------------------
# Commands
# -----------------------------------------------------------------------------


def cmd_chain_scan(cfg: RunConfig) -> List[Dict]:
    records = chain_scan(cfg.L, cfg.betas, cfg.ells, cfg.t, cfg.bc, cfg.tau, cfg.threads, cfg.kernel)
    rows: Dict = {}
    for r in records:
        row = rows.setdefault((r.beta, r.ell), {"model": "chain", "beta": r.beta, "ell": r.ell, "l_eff": r.scaling})
        row[r.quantity] = r.value
    return list(rows.values())


def cmd_ssh_scan(cfg: RunConfig) -> List[Dict]:
    points = ssh_scan(cfg.L_cells, cfg.ratios, cfg.temperatures, cfg.t1, cfg.tau, cfg.threads)
    return [
        {"model": "ssh", "temperature": p.temperature, "t2_over_t1": p.t2_over_t1, "epe": p.epe, "half_mi": p.half_mi}
        for p in points
    ]


def cmd_piflux_scan(cfg: RunConfig) -> List[Dict]:
    scan = piflux_scan(
        cfg.Lx, cfg.Ly, cfg.betas, cfg.ells, cfg.t, cfg.bc_x, cfg.bc_y, cfg.tau, cfg.threads, cfg.full_matrix
    )
    n_cut = scan.spec.n_cut
    rows = []
    # ground-state calibration: one row per width in the fit window, then the intercept
    for w, d in zip(scan.eps_widths, scan.eps_densities):
        rows.append(
            {
                "model": "pi_flux_ground",
                "beta": math.inf,
                "ell_x": int(w),
                "epe_density": float(d),
                "inv_l_dirac": 1.0 / float(w),
                "collapse_ordinate": scan.eps - float(d),
            }
        )
    rows.append(
        {"model": "pi_flux_eps", "beta": math.inf, "ell_x": 0, "epe_density": scan.eps, "inv_l_dirac": 0.0, "collapse_ordinate": 0.0}
    )
    for r, (x, y) in zip(scan.records, scan.collapse()):
        rows.append(
            {
                "model": "pi_flux",
                "beta": r.beta,
                "ell_x": r.ell,
                "epe_density": r.value / n_cut,
                "inv_l_dirac": x,
                "collapse_ordinate": y,
            }
        )
    return rows


def cmd_toy(cfg: RunConfig) -> List[Dict]:
    rows = []
    for lam in cfg.lambdas:
        for c in cfg.cs:
            e = toy_pair_epe(lam, c)
            mi = toy_pair_mi_exact(lam, c)
            s = binary_entropy(lam)
            rows.append(
                {
                    "lambda": lam,
                    "c": c,
                    "weight": toy_pair_weight(lam, c),
                    "epe": e,
                    "mi": mi,
                    "mi_leading": toy_pair_mi_leading(lam, c),
                    "epe_over_mi_s": e / (mi * s) if mi * s > 0 else math.nan,
                }
            )
    return rows


def cmd_fit(cfg: RunConfig):
    table = read_table(cfg.input)
    if not table:
        raise ConfigError(f"{cfg.input} has no data rows")
    for col in (cfg.x, cfg.y):
        if col not in table[0]:
            raise ConfigError(f"column {col!r} not in {cfg.input}; have {list(table[0])}")
    x = np.array([float(r[cfg.x]) for r in table])
    y = np.array([float(r[cfg.y]) for r in table])
    if cfg.log_x:
        if np.any(x <= 0):
            raise ConfigError("--log-x needs positive x values")
        x = np.log(x)
    ok = np.isfinite(x) & np.isfinite(y)
    result = fit_line(np.column_stack([x[ok], y[ok]]), tuple(cfg.window) if cfg.window else None)
    xlabel = f"ln({cfg.x})" if cfg.log_x else cfg.x
    return result, [
        {
            "x": xlabel,
            "y": cfg.y,
            "window": result.window,
            "n_points": result.n_points,
            "slope": result.slope,
            "intercept": result.intercept,
            "r_squared": result.r_squared,
        }
    ]


COMMANDS = {
    "chain-scan": cmd_chain_scan,
    "ssh-scan": cmd_ssh_scan,
    "piflux-scan": cmd_piflux_scan,
    "toy": cmd_toy,
}


def run(cfg: RunConfig) -> str:
    if cfg.command == "fit":
        _, rows = cmd_fit(cfg)
    else:
        rows = COMMANDS[cfg.command](cfg)
    return render(rows, COLUMNS[cfg.command], cfg.format)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        cfg = resolve_config(args)
        log.info("running %s", cfg.command)
        text = run(cfg)
        write_output(text, cfg.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except EPEError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end: parse a run configuration, execute the walk, and
emit deterministic CSV / JSON / SVG artifacts.

Output conventions: CSV with one header line, %.12e numbers, comma
separator, LF endings; JSON manifest with sorted keys, written last, listing
every emitted file with its sha256.  Exit codes: 0 success, 2 configuration
error, 3 numerical-invariant violation, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
import time
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .coherent import SiteIndexing
from .render import render_heatmap_svg
from .su2 import SpinQuantum
from .walk import (CoinPulse, WalkSchedule, evolve, ideal_sigma, ideal_walk,
                   initial_state)
from .wigner import (NumericalInvariantError, kernel_weights, marginal_phi,
                     sigma_from_marginal, wigner_grid)

__all__ = ["RunConfig", "RunManifest", "ConfigError", "parse_config",
           "run_experiment", "main"]

ALL_OUTPUTS = ("wigner", "marginal", "sites", "sigma", "ideal")

DEFAULTS = {
    "sites": 6,
    "spins": 50,
    "steps": 2,
    "coin": ("hadamard",),
    "theta0": math.pi / 2.0,
    "grid_theta": None,      # 2J + 2 when unset
    "grid_phi": None,        # 8L when unset
    "outputs": set(ALL_OUTPUTS),
    "out": "out",
    "svg": True,
}


class ConfigError(ValueError):
    """Bad flag, config key or value; maps to exit code 2."""


@dataclass(frozen=True)
class RunConfig:
    sites: int
    spins: int
    steps: int
    coin: tuple          # ("hadamard",) or ("custom", hx, hy, hz)
    theta0: float
    grid_theta: int
    grid_phi: int
    outputs: frozenset
    out_dir: Path
    svg: bool

    def pulse(self) -> CoinPulse:
        if self.coin[0] == "hadamard":
            return CoinPulse.hadamard()
        return CoinPulse(tuple(self.coin[1:]))

    def as_dict(self) -> dict:
        return {
            "sites": self.sites,
            "spins": self.spins,
            "steps": self.steps,
            "coin": list(self.coin),
            "theta0": self.theta0,
            "grid_theta": self.grid_theta,
            "grid_phi": self.grid_phi,
            "outputs": sorted(self.outputs),
            "out": str(self.out_dir),
            "svg": self.svg,
        }


@dataclass
class RunManifest:
    config: dict
    version: str
    duration_seconds: float
    normalization_residuals: list[float]
    files: dict[str, str] = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "config": self.config,
            "version": self.version,
            "duration_seconds": self.duration_seconds,
            "normalization_residuals": self.normalization_residuals,
            "files": self.files,
        }


def _parse_coin(tokens) -> tuple:
    if len(tokens) == 1 and tokens[0] == "hadamard":
        return ("hadamard",)
    if len(tokens) == 4 and tokens[0] == "custom":
        try:
            return ("custom",) + tuple(float(t) for t in tokens[1:])
        except ValueError as exc:
            raise ConfigError(f"--coin custom: malformed number in "
                              f"{tokens[1:]!r}") from exc
    raise ConfigError(
        f"--coin expects 'hadamard' or 'custom hx hy hz', got {tokens!r}")


def _parse_outputs(text: str) -> set[str]:
    parts = {p.strip() for p in text.split(",") if p.strip()}
    unknown = parts - set(ALL_OUTPUTS)
    if unknown:
        raise ConfigError(f"unknown outputs {sorted(unknown)!r}; "
                          f"valid: {','.join(ALL_OUTPUTS)}")
    return parts


def _read_config_file(path: str) -> dict:
    """Flat `key = value` file, same keys as the CLI flags."""
    known = {"sites", "spins", "steps", "coin", "theta0", "grid-theta",
             "grid-phi", "outputs", "out", "svg"}
    values: dict = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', "
                              f"got {raw!r}")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if key not in known:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        dest = key.replace("-", "_")
        try:
            if key in ("sites", "spins", "steps", "grid-theta", "grid-phi"):
                values[dest] = int(val)
            elif key == "theta0":
                values[dest] = float(val)
            elif key == "coin":
                values[dest] = _parse_coin(val.split())
            elif key == "outputs":
                values[dest] = _parse_outputs(val)
            elif key == "svg":
                if val.lower() not in ("true", "false", "0", "1"):
                    raise ValueError(val)
                values[dest] = val.lower() in ("true", "1")
            else:
                values[dest] = val
        except ValueError as exc:
            raise ConfigError(
                f"{path}:{lineno}: malformed value {val!r} for {key}") from exc
    return values


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="blochwalk",
        description="Discrete-time quantum walk on the Bloch sphere")
    p.add_argument("--sites", type=int, help="number of ring sites L")
    p.add_argument("--spins", type=int, help="spins N in the walker cluster")
    p.add_argument("--steps", type=int, help="walk steps k")
    p.add_argument("--coin", nargs="+", metavar="SPEC",
                   help="'hadamard' or 'custom hx hy hz'")
    p.add_argument("--theta0", type=float, help="walk latitude (radians)")
    p.add_argument("--grid-theta", type=int, dest="grid_theta",
                   help="theta quadrature nodes (default 2J+2)")
    p.add_argument("--grid-phi", type=int, dest="grid_phi",
                   help="phi grid points (default 8L)")
    p.add_argument("--outputs", help="comma list of "
                   + ",".join(ALL_OUTPUTS))
    p.add_argument("--out", help="output directory (default ./out)")
    p.add_argument("--config", help="flat key = value config file")
    p.add_argument("--svg", dest="svg", action="store_true", default=None,
                   help="render Wigner heatmaps as SVG (default)")
    p.add_argument("--no-svg", dest="svg", action="store_false", default=None)
    p.add_argument("--version", action="version", version=__version__)
    return p


def parse_config(argv=None) -> RunConfig:
    """CLI flags override config-file keys override built-in defaults."""
    ns = _build_parser().parse_args(argv)

    merged = dict(DEFAULTS)
    if ns.config is not None:
        merged.update(_read_config_file(ns.config))
    for key in ("sites", "spins", "steps", "theta0", "grid_theta",
                "grid_phi", "out", "svg"):
        val = getattr(ns, key)
        if val is not None:
            merged[key] = val
    if ns.coin is not None:
        merged["coin"] = _parse_coin(ns.coin)
    if ns.outputs is not None:
        merged["outputs"] = _parse_outputs(ns.outputs)
    if isinstance(merged["coin"], (list, tuple)) and merged["coin"] \
            and merged["coin"][0] not in ("hadamard", "custom"):
        raise ConfigError(f"bad coin spec {merged['coin']!r}")

    sites, spins, steps = merged["sites"], merged["spins"], merged["steps"]
    if sites < 2:
        raise ConfigError(f"--sites must be >= 2, got {sites}")
    if spins < 1:
        raise ConfigError(f"--spins must be >= 1, got {spins}")
    if steps < 0:
        raise ConfigError(f"--steps must be >= 0, got {steps}")
    theta0 = merged["theta0"]
    if not 0.0 < theta0 < math.pi:
        raise ConfigError(f"--theta0 must lie in (0, pi), got {theta0}")
    grid_theta = merged["grid_theta"]
    if grid_theta is None:
        grid_theta = spins + 2            # 2J + 2 with 2J = N
    if grid_theta < 2:
        raise ConfigError(f"--grid-theta must be >= 2, got {grid_theta}")
    grid_phi = merged["grid_phi"]
    if grid_phi is None:
        grid_phi = 8 * sites
    if grid_phi < sites:
        raise ConfigError(f"--grid-phi must be >= sites, got {grid_phi}")

    if steps >= sites / 2:
        warnings.warn(
            f"steps k={steps} reaches the wrap-around regime (k >= L/2); "
            "the reported standard deviation uses unwrapped angles and is "
            "only meaningful for short times", stacklevel=2)

    return RunConfig(
        sites=sites, spins=spins, steps=steps,
        coin=tuple(merged["coin"]), theta0=theta0,
        grid_theta=grid_theta, grid_phi=grid_phi,
        outputs=frozenset(merged["outputs"]),
        out_dir=Path(merged["out"]), svg=bool(merged["svg"]),
    )


# ---------------------------------------------------------------------------
# CSV emitters
# ---------------------------------------------------------------------------

def _fmt(x: float) -> str:
    return "%.12e" % x


def write_wigner_csv(grid, path) -> None:
    lines = ["theta,phi,weight_theta,W"]
    for i, (t, w) in enumerate(zip(grid.theta_nodes, grid.theta_weights)):
        row = grid.values[i]
        for p, val in zip(grid.phi_nodes, row):
            lines.append(",".join((_fmt(t), _fmt(p), _fmt(w), _fmt(val))))
    Path(path).write_text("\n".join(lines) + "\n", newline="\n")


def write_marginal_csv(dist, indexing: SiteIndexing, path) -> None:
    lines = ["phi,P,site_index,site_prob"]
    dphi = indexing.delta_phi
    offset = int(dist.site_numbers[0])
    for p, rho in zip(dist.phi_nodes, dist.density):
        u = p / dphi
        n = round(u)
        if abs(u - n) < 1e-9:           # bin-center row
            n = indexing.wrap(n)
            lines.append(",".join((_fmt(p), _fmt(rho), str(n),
                                   _fmt(dist.site_probabilities[n - offset]))))
        else:
            lines.append(",".join((_fmt(p), _fmt(rho), "", "")))
    Path(path).write_text("\n".join(lines) + "\n", newline="\n")


def write_sigma_csv(rows, path) -> None:
    lines = ["k,sigma_coherent,sigma_ideal"]
    for k, sc, si in rows:
        lines.append(",".join((str(k), _fmt(sc), _fmt(si))))
    Path(path).write_text("\n".join(lines) + "\n", newline="\n")


def write_sites_csv(per_step, indexing: SiteIndexing, path,
                    header="k,site_index,phi,site_prob") -> None:
    lines = [header]
    dphi = indexing.delta_phi
    for k, probs in per_step:
        for n, pr in zip(indexing.site_numbers, probs):
            lines.append(",".join((str(k), str(int(n)), _fmt(n * dphi),
                                   _fmt(pr))))
    Path(path).write_text("\n".join(lines) + "\n", newline="\n")


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


# ---------------------------------------------------------------------------
# Experiment runner
# ---------------------------------------------------------------------------

def run_experiment(config: RunConfig) -> RunManifest:
    """Evolve the walk and write every requested artifact.

    Deterministic: identical configs produce byte-identical CSV/SVG files
    and identical checksums in the manifest.
    """
    start = time.monotonic()
    out = config.out_dir
    out.mkdir(parents=True, exist_ok=True)

    indexing = SiteIndexing(config.sites, config.theta0)
    spin = SpinQuantum(config.spins)
    schedule = WalkSchedule.site_aligned(indexing, config.steps)
    states = evolve(initial_state(indexing, spin), config.pulse(), schedule)

    need_grids = bool(config.outputs & {"wigner", "marginal", "sites", "sigma"})
    need_ideal = bool(config.outputs & {"ideal", "sigma"})

    ideal = None
    if need_ideal:
        coin2 = np.array([[1, 1], [1, -1]]) / math.sqrt(2.0) \
            if config.coin[0] == "hadamard" else None
        if coin2 is None:
            from .walk import coin_unitary
            coin2 = coin_unitary(config.pulse())
        ideal = ideal_walk(config.sites, config.steps, coin2)

    written: list[Path] = []
    residuals: list[float] = []
    sigma_rows = []
    site_rows = []
    weights = kernel_weights(spin) if need_grids else None

    for k, state in enumerate(states):
        if not need_grids:
            break
        grid = wigner_grid(state, (config.grid_theta, config.grid_phi),
                           weights)
        residual = abs(grid.normalization() - 1.0)
        residuals.append(residual)
        if residual > 1e-4:
            raise NumericalInvariantError(
                f"step {k}: Wigner normalization off by {residual:.2e} "
                f"at resolution ({config.grid_theta}, {config.grid_phi})")
        try:
            dist = marginal_phi(grid, indexing)
            if "wigner" in config.outputs:
                p = out / f"wigner_k{k}.csv"
                write_wigner_csv(grid, p)
                written.append(p)
                if config.svg:
                    p = out / f"wigner_k{k}.svg"
                    render_heatmap_svg(grid, p, indexing)
                    written.append(p)
            if "marginal" in config.outputs:
                p = out / f"marginal_k{k}.csv"
                write_marginal_csv(dist, indexing, p)
                written.append(p)
            if "sites" in config.outputs:
                site_rows.append((k, dist.site_probabilities))
            if "sigma" in config.outputs:
                sigma_rows.append((k, sigma_from_marginal(dist),
                                   ideal_sigma(ideal[k], indexing)))
        except OSError as exc:
            raise OSError(f"step {k}: failed writing outputs: {exc}") from exc

    try:
        if site_rows:
            p = out / "sites.csv"
            write_sites_csv(site_rows, indexing, p)
            written.append(p)
        if sigma_rows:
            p = out / "sigma.csv"
            write_sigma_csv(sigma_rows, p)
            written.append(p)
        if "ideal" in config.outputs:
            p = out / "ideal.csv"
            write_sites_csv(list(enumerate(ideal)), indexing, p,
                            header="k,site_index,phi,P")
            written.append(p)

        manifest = RunManifest(
            config=config.as_dict(),
            version=__version__,
            duration_seconds=round(time.monotonic() - start, 3),
            normalization_residuals=residuals,
            files={p.name: _sha256(p) for p in sorted(written)},
        )
        (out / "manifest.json").write_text(
            json.dumps(manifest.as_dict(), sort_keys=True, indent=2) + "\n",
            newline="\n")
    except OSError as exc:
        raise OSError(f"failed writing outputs: {exc}") from exc
    return manifest


def main(argv=None) -> int:
    try:
        config = parse_config(argv)
    except ConfigError as exc:
        print(f"blochwalk: error: {exc}", file=sys.stderr)
        return 2
    try:
        manifest = run_experiment(config)
    except NumericalInvariantError as exc:
        print(f"blochwalk: numerical invariant violated: {exc}",
              file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"blochwalk: I/O error: {exc}", file=sys.stderr)
        return 4
    print(f"wrote {len(manifest.files)} files to {config.out_dir} "
          f"in {manifest.duration_seconds}s")
    return 0


if __name__ == "__main__":
    sys.exit(main())

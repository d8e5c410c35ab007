"""Problem configuration: JSON schema, validation, resolution.

A config names the synthesis target, the expansion basis, the sampled mode,
exactly one source of sample points (an explicit list, "equal", or
"optimized"), optional multiplicative noise, and the iteration options.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from .basis import Basis, Potential
from .errors import ConfigError
from .inversion import InversionOptions
from . import potentials

ENV_OUTPUT_DIR = "EIGENFIT_OUT"


@dataclass
class ProblemConfig:
    potential_desc: object
    basis: Basis
    mode: int = 1
    points_spec: object = "optimized"   # "equal" | "optimized" | list
    noise: tuple[float, int] | None = None
    options: InversionOptions = field(default_factory=InversionOptions)
    budget: int = 800
    seed: int = 0
    modes: int = 10
    output_dir: str | None = None

    def potential(self) -> Callable:
        return resolve_potential(self.potential_desc)

    def explicit_points(self) -> np.ndarray | None:
        if isinstance(self.points_spec, (list, tuple, np.ndarray)):
            return np.asarray(self.points_spec, dtype=float)
        return None

    def to_json(self) -> dict:
        out = {
            "potential": self.potential_desc,
            "basis": self.basis.to_json(),
            "mode": self.mode,
            "points": (list(self.explicit_points())
                       if self.explicit_points() is not None
                       else self.points_spec),
            "options": self.options.to_json(),
            "budget": self.budget,
            "seed": self.seed,
            "modes": self.modes,
        }
        if self.noise is not None:
            out["noise"] = {"sigma": self.noise[0], "seed": self.noise[1]}
        if self.output_dir is not None:
            out["output_dir"] = self.output_dir
        return out

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json(), fh, indent=2, sort_keys=True)
            fh.write("\n")


def resolve_potential(desc) -> Callable:
    """A callable from a built-in name, an expression, an inline expansion
    descriptor, or a coefficient file reference."""
    if callable(desc):
        return desc
    if isinstance(desc, str):
        try:
            return potentials.resolve(desc)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    if isinstance(desc, dict):
        try:
            if "file" in desc:
                with open(desc["file"], "r", encoding="utf-8") as fh:
                    return Potential.from_json(json.load(fh))
            if "coefficients" in desc:
                return Potential.from_json(desc)
        except (OSError, KeyError, ValueError) as exc:
            raise ConfigError(f"bad potential descriptor: {exc}") from exc
    raise ConfigError(f"cannot interpret potential descriptor {desc!r}")


def parse_config(obj: dict) -> ProblemConfig:
    if not isinstance(obj, dict):
        raise ConfigError("config root must be a JSON object")
    try:
        basis = Basis.from_json(obj["basis"])
    except KeyError as exc:
        raise ConfigError("config is missing the 'basis' entry") from exc
    except ValueError as exc:
        raise ConfigError(f"bad basis descriptor: {exc}") from exc

    if "potential" not in obj:
        raise ConfigError("config is missing the 'potential' entry")

    points_spec = obj.get("points", "optimized")
    if isinstance(points_spec, str):
        if points_spec not in ("equal", "optimized"):
            raise ConfigError(
                f"points must be 'equal', 'optimized' or an explicit list, "
                f"got {points_spec!r}")
    elif isinstance(points_spec, list):
        pts = np.asarray(points_spec, dtype=float)
        if pts.ndim != 1 or pts.size == 0:
            raise ConfigError("explicit points must be a flat list")
        if np.any(np.diff(pts) <= 0) or pts[0] <= 0 or pts[-1] > 1:
            raise ConfigError("explicit points must be strictly increasing "
                              "inside (0, 1]")
    else:
        raise ConfigError(f"cannot interpret points {points_spec!r}")

    noise = None
    if "noise" in obj and obj["noise"] is not None:
        nd = obj["noise"]
        try:
            noise = (float(nd["sigma"]), int(nd.get("seed", 0)))
        except (TypeError, KeyError, ValueError) as exc:
            raise ConfigError(f"bad noise descriptor {nd!r}") from exc
        if noise[0] < 0:
            raise ConfigError("noise sigma must be nonnegative")

    try:
        options = InversionOptions.from_json(obj.get("options", {}))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad options: {exc}") from exc

    mode = int(obj.get("mode", 1))
    if mode < 1:
        raise ConfigError(f"mode must be >= 1, got {mode}")
    modes = int(obj.get("modes", 10))
    if modes < 1:
        raise ConfigError(f"modes must be >= 1, got {modes}")
    budget = int(obj.get("budget", 800))
    if budget < 1:
        raise ConfigError(f"budget must be >= 1, got {budget}")

    return ProblemConfig(
        potential_desc=obj["potential"],
        basis=basis,
        mode=mode,
        points_spec=points_spec,
        noise=noise,
        options=options,
        budget=budget,
        seed=int(obj.get("seed", 0)),
        modes=modes,
        output_dir=obj.get("output_dir"),
    )


def load_config(path) -> ProblemConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return parse_config(obj)


def resolve_output_dir(cli_out: str | None,
                       config: ProblemConfig | None = None) -> Path:
    """--out beats the environment override beats the config entry."""
    if cli_out:
        path = Path(cli_out)
    elif os.environ.get(ENV_OUTPUT_DIR):
        path = Path(os.environ[ENV_OUTPUT_DIR])
    elif config is not None and config.output_dir:
        path = Path(config.output_dir)
    else:
        path = Path(".")
    path.mkdir(parents=True, exist_ok=True)
    return path

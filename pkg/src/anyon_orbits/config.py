"""Run configuration: units, tolerances, truncations and seeds.

A config file is an INI file with a single ``[run]`` section, for example::

    [run]
    seed = 7
    k_max = 2000
    eta = 0.01
    tol_orthosymplectic = 1e-10

Every key matches a :class:`RunConfig` field name. Flags passed on the command
line override values from the file.
"""

from __future__ import annotations

import configparser
import dataclasses
import os
from dataclasses import dataclass, field, fields
from pathlib import Path

OUTPUT_DIR_ENV = "ANYON_ORBITS_OUTPUT_DIR"


@dataclass(frozen=True)
class Tolerances:
    orthosymplectic: float = 1e-10
    projector: float = 1e-12
    conservation: float = 1e-10
    degeneracy: float = 1e-9
    integrator_rtol: float = 1e-10
    event_time: float = 1e-12
    pole_location: float = 1e-9

    def __post_init__(self):
        for f in fields(self):
            if not getattr(self, f.name) > 0:
                raise ValueError(f"tolerance {f.name} must be positive")


DEFAULT_TOLERANCES = Tolerances()


@dataclass(frozen=True)
class RunConfig:
    hbar: float = 1.0
    omega: float = 1.0
    tolerances: Tolerances = field(default_factory=Tolerances)
    k_max: int = 2000
    eta: float = 0.01
    n_max: int = 10
    e_max: float = 20.0
    seed: int = 0
    output_dir: str = "."

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


def load_config(path: str | os.PathLike | None = None, **overrides) -> RunConfig:
    """Build a RunConfig from an optional INI file plus keyword overrides.

    Tolerance keys carry a ``tol_`` prefix in the file and in ``overrides``.
    ``None`` overrides are ignored so argparse namespaces can be passed through.
    """
    values: dict = {}
    if path is not None:
        parser = configparser.ConfigParser()
        if not parser.read(path):
            raise FileNotFoundError(path)
        if "run" in parser:
            values.update(parser["run"])
    values.update({k: v for k, v in overrides.items() if v is not None})

    tol_kwargs = {}
    run_kwargs = {}
    tol_names = {f.name: f.type for f in fields(Tolerances)}
    run_fields = {f.name for f in fields(RunConfig)} - {"tolerances"}
    for key, raw in values.items():
        if key.startswith("tol_") and key[4:] in tol_names:
            tol_kwargs[key[4:]] = float(raw)
        elif key in run_fields:
            run_kwargs[key] = raw
        else:
            raise KeyError(f"unknown config key {key!r}")

    for key in ("hbar", "omega", "eta", "e_max"):
        if key in run_kwargs:
            run_kwargs[key] = float(run_kwargs[key])
    for key in ("k_max", "n_max", "seed"):
        if key in run_kwargs:
            run_kwargs[key] = int(run_kwargs[key])
    if "output_dir" not in run_kwargs and os.environ.get(OUTPUT_DIR_ENV):
        run_kwargs["output_dir"] = os.environ[OUTPUT_DIR_ENV]
    if "output_dir" in run_kwargs:
        run_kwargs["output_dir"] = str(Path(run_kwargs["output_dir"]))
    return RunConfig(tolerances=Tolerances(**tol_kwargs), **run_kwargs)

"""Monte-Carlo power experiments and distance-matrix timing benchmarks.

``run_power_experiment`` rebuilds the two-group pipeline end to end: group 1
is drawn at the experiment's baseline parameter, group 2 at each requested
level; diagrams go through the configured filtration, one distance matrix
per repetition feeds the permutation test, and the power at a level is the
fraction of repetitions rejecting at alpha = 0.05.  A repetition's random
draws depend only on (seed, repetition, group, member), never on the level
or the method, so runs with different methods or mixings are directly
comparable and the level effect is isolated from sampling noise.
"""

from __future__ import annotations

import json
import statistics
import time
from dataclasses import asdict, dataclass, fields
from typing import Optional, Tuple

import numpy as np

from .distances import DISTANCE_METHODS, distance_matrix
from .errors import ResourceCapError, ValidationError
from .filtration import DEFAULT_SIMPLEX_CAP, build_lower_star, build_rips
from .generators import PdProcessSpec, RdpgSpec, ShapeSpec, generate_pd_process, generate_rdpg, sample_shape
from .permutation import GroupLabels, permutation_pvalue
from .persistence import compute_persistence

__all__ = [
    "EXPERIMENTS",
    "ALPHA",
    "ExperimentConfig",
    "PowerRow",
    "PowerReport",
    "run_power_experiment",
    "run_benchmark",
]

EXPERIMENTS = ("circle-ellipse", "sphere-ellipsoid", "pd-process", "rdpg")
ALPHA = 0.05

# per-experiment defaults: baseline level, hom_dim, points/nodes, noise sigma
_DEFAULTS = {
    "circle-ellipse": (0.0, 1, 50, 0.05),
    "sphere-ellipsoid": (0.0, 2, 60, 0.05),
    "pd-process": (1.0, 0, 50, 0.1),
    "rdpg": (1.5, 1, 100, 0.1),
}


@dataclass(frozen=True)
class ExperimentConfig:
    """Full description of one power experiment.

    ``levels`` parametrize group 2 (compression r for shapes, the second
    Beta parameter for the diagram process, the third Dirichlet weight for
    graphs); group 1 always sits at the experiment's baseline.  Fields left
    as None fall back to per-experiment defaults.
    """

    experiment: str
    levels: Tuple[float, ...]
    reps: int = 200
    group_size: int = 10
    method: str = "vab"
    mixing: str = "standard"
    n_perms: int = 1000
    hom_dim: Optional[int] = None
    n_points: Optional[int] = None
    noise_sigma: Optional[float] = None
    grid_size: int = 100
    image_cells: int = 20
    k: int = 1
    n_directions: int = 10
    p: float = 1
    q: float = 1
    seed: int = 0
    rips_threshold: Optional[float] = None
    simplex_cap: int = DEFAULT_SIMPLEX_CAP

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ValidationError(f"experiment must be one of {EXPERIMENTS}, got {self.experiment!r}")
        if not self.levels:
            raise ValidationError("levels must be nonempty")
        object.__setattr__(self, "levels", tuple(float(x) for x in self.levels))
        if self.reps < 1:
            raise ValidationError(f"reps must be at least 1, got {self.reps}")
        if self.n_perms < 1:
            raise ValidationError(f"n_perms must be at least 1, got {self.n_perms}")
        if self.group_size < 2:
            raise ValidationError(f"group_size must be at least 2, got {self.group_size}")
        if self.method not in DISTANCE_METHODS:
            raise ValidationError(f"method must be one of {DISTANCE_METHODS}, got {self.method!r}")
        if self.mixing not in ("standard", "strong", "both"):
            raise ValidationError(f"mixing must be standard, strong or both, got {self.mixing!r}")
        if self.experiment.endswith("ellipse") or self.experiment.endswith("ellipsoid"):
            for lv in self.levels:
                if not (0.0 <= lv < 1.0):
                    raise ValidationError(f"shape level must lie in [0, 1), got {lv}")

    @property
    def baseline(self):
        return _DEFAULTS[self.experiment][0]

    @property
    def resolved_hom_dim(self):
        return _DEFAULTS[self.experiment][1] if self.hom_dim is None else self.hom_dim

    @property
    def resolved_n_points(self):
        return _DEFAULTS[self.experiment][2] if self.n_points is None else self.n_points

    @property
    def resolved_noise_sigma(self):
        return _DEFAULTS[self.experiment][3] if self.noise_sigma is None else self.noise_sigma

    def to_json(self):
        obj = asdict(self)
        obj["levels"] = list(self.levels)
        return json.dumps(obj, sort_keys=True)

    @classmethod
    def from_json(cls, text):
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"invalid experiment config JSON: {exc}") from None
        if not isinstance(obj, dict):
            raise ValidationError("experiment config must be a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = set(obj) - known
        if unknown:
            raise ValidationError(f"unknown config keys: {sorted(unknown)}")
        if "levels" in obj:
            obj["levels"] = tuple(obj["levels"])
        return cls(**obj)


@dataclass(frozen=True)
class PowerRow:
    experiment: str
    method: str
    mixing: str
    r: float
    power: float
    reps: int
    seed: int

    def __post_init__(self):
        if not (0.0 <= self.power <= 1.0):
            raise ValidationError(f"power must lie in [0, 1], got {self.power}")


class PowerReport:
    """Rows of estimated rejection rates, one per (level, mixing)."""

    __slots__ = ("rows",)

    CSV_HEADER = "experiment,method,mixing,r,power,reps,seed"

    def __init__(self, rows):
        object.__setattr__(self, "rows", tuple(rows))

    def __setattr__(self, name, value):
        raise AttributeError("PowerReport is immutable")

    def power_at(self, r, mixing):
        for row in self.rows:
            if row.r == r and row.mixing == mixing:
                return row.power
        raise KeyError(f"no row for r={r}, mixing={mixing}")

    def to_csv(self):
        lines = [self.CSV_HEADER]
        for row in self.rows:
            lines.append(f"{row.experiment},{row.method},{row.mixing},"
                         f"{repr(float(row.r))},{repr(float(row.power))},{row.reps},{row.seed}")
        return "\n".join(lines) + "\n"

    def save_csv(self, path_or_buf):
        out = self.to_csv()
        if hasattr(path_or_buf, "write"):
            path_or_buf.write(out)
        else:
            with open(path_or_buf, "w", encoding="utf-8") as fh:
                fh.write(out)


def _member_seed(seed, rep, group, member):
    return int(np.random.SeedSequence(
        [int(seed), int(rep), int(group), int(member)]
    ).generate_state(1)[0])


def _perm_seed(seed, rep):
    return int(np.random.SeedSequence([int(seed), 2, int(rep)]).generate_state(1)[0])


def _filtration_top(filt):
    return max(float(filt.values(d).max()) for d in range(filt.dimension + 1))


def _instance_diagram(cfg, level, rep, group, member):
    """One diagram for one group member; group 0 uses the baseline level."""
    param = cfg.baseline if group == 0 else level
    seed = _member_seed(cfg.seed, rep, group, member)
    hom = cfg.resolved_hom_dim
    if cfg.experiment in ("circle-ellipse", "sphere-ellipsoid"):
        spec = ShapeSpec(cfg.experiment, r=param, n_points=cfg.resolved_n_points,
                         noise_sigma=cfg.resolved_noise_sigma, seed=seed)
        filt = build_rips(sample_shape(spec), max_dim=hom + 1,
                          threshold=cfg.rips_threshold, simplex_cap=cfg.simplex_cap)
    elif cfg.experiment == "pd-process":
        spec = PdProcessSpec(n_points=cfg.resolved_n_points, z_beta=(1.0, param),
                             noise_sigma=cfg.resolved_noise_sigma, seed=seed)
        return generate_pd_process(spec, hom_dim=hom)
    else:
        spec = RdpgSpec(n_nodes=cfg.resolved_n_points,
                        dirichlet_alpha=(1.5, 1.5, param),
                        node_noise_sigma=cfg.resolved_noise_sigma, seed=seed)
        filt = build_lower_star(generate_rdpg(spec), fill_triangles=True,
                                simplex_cap=cfg.simplex_cap)
    dgm = compute_persistence(filt, max_hom_dim=hom)[hom]
    # features alive at the end of the filtration are cut off at its top value
    return dgm.truncate_deaths(_filtration_top(filt))


def run_power_experiment(cfg):
    """Estimated rejection rate of the permutation test per level and mixing."""
    mixings = ("standard", "strong") if cfg.mixing == "both" else (cfg.mixing,)
    labels = GroupLabels.contiguous(cfg.group_size, cfg.group_size)
    rows = []
    for level in cfg.levels:
        rejections = {mx: 0 for mx in mixings}
        for rep in range(cfg.reps):
            try:
                diagrams = [
                    _instance_diagram(cfg, level, rep, group, member)
                    for group in (0, 1)
                    for member in range(cfg.group_size)
                ]
            except ResourceCapError as exc:
                raise ResourceCapError(
                    f"level {level}, repetition {rep}: {exc}"
                ) from exc
            dm = distance_matrix(
                diagrams, cfg.method, p=cfg.p, q=cfg.q,
                n_directions=cfg.n_directions, grid_size=cfg.grid_size,
                image_cells=cfg.image_cells, k=cfg.k,
            )
            seed = _perm_seed(cfg.seed, rep)
            for mx in mixings:
                result = permutation_pvalue(dm, labels, n_perms=cfg.n_perms,
                                            mixing=mx, q=cfg.q, seed=seed)
                if result.p_value < ALPHA:
                    rejections[mx] += 1
        for mx in mixings:
            rows.append(PowerRow(
                experiment=cfg.experiment, method=cfg.method, mixing=mx,
                r=level, power=rejections[mx] / cfg.reps,
                reps=cfg.reps, seed=cfg.seed,
            ))
    return PowerReport(rows)


def run_benchmark(n_diagrams, diagram_size, methods, repeats=3, seed=0):
    """Median wall-clock seconds to assemble one distance matrix per method.

    Diagrams come from the synthetic persistence process with
    ``diagram_size`` points each; every method sees the same diagrams and
    the timing includes vectorization.  Rows are dicts with keys
    method / n / diagram_size / median_seconds.
    """
    if repeats < 3:
        raise ValidationError(f"repeats must be at least 3, got {repeats}")
    if n_diagrams < 2:
        raise ValidationError(f"n_diagrams must be at least 2, got {n_diagrams}")
    methods = list(methods)
    for m in methods:
        if m not in DISTANCE_METHODS:
            raise ValidationError(f"method must be one of {DISTANCE_METHODS}, got {m!r}")
    diagrams = [
        generate_pd_process(PdProcessSpec(
            n_points=int(diagram_size),
            seed=_member_seed(seed, 0, 0, i),
        ))
        for i in range(int(n_diagrams))
    ]
    rows = []
    for method in methods:
        times = []
        for _ in range(int(repeats)):
            start = time.perf_counter()
            distance_matrix(diagrams, method)
            times.append(time.perf_counter() - start)
        rows.append({
            "method": method,
            "n": int(n_diagrams),
            "diagram_size": int(diagram_size),
            "median_seconds": statistics.median(times),
        })
    return rows

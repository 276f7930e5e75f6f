"""End-to-end pipeline: load -> downsample -> LBO -> harmonic basis -> F_M^(a)."""
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field
from functools import cached_property
import hashlib
import logging

import numpy as np

from . import kernels
from .errors import ConfigError, FracHarmError, InputError
from .fractional import COND_LIMIT, operator_from_basis
from .harmonic import DENSE_LIMIT, solve_harmonic_basis
from .lbo import assemble_lbo, default_t
from .ply_io import downsample, read_ply
from .spatial import build_index, estimate_epsilon
from .tangent import all_area_weights

log = logging.getLogger(__name__)

COORDS = ("x", "y", "z")


@dataclass
class PipelineConfig:
    input: str
    out: str | None = None
    target_points: int | None = None
    epsilon: float | None = None
    r_scale: float = 10.0
    delta_scale: float = 10.0
    clip_scale: float = 0.5
    t: float | None = None
    t_exponent: float = 0.5
    orders: tuple = (1.0,)
    filter_kind: str = "lowpass"
    cutoff_lo: int = 0
    cutoff_hi: int | None = None
    rolloff: int = 0
    modes: tuple = (1, 2, 3, 4, 5, 6)
    plot: str = "magnitude"
    ply_format: str = "binary_little_endian"
    colormap: str = "bwr"
    channels: tuple = COORDS
    seed: int = 0
    dump_matrices: bool = False
    dense_limit: int = DENSE_LIMIT
    cond_limit: float = COND_LIMIT
    extra: dict = field(default_factory=dict)

    def validate(self):
        if not self.input:
            raise ConfigError("input path is empty")
        if self.out is not None and not self.out:
            raise ConfigError("output directory is empty")
        for name in ("r_scale", "delta_scale", "clip_scale"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0):
                raise ConfigError(f"{name} must be positive, got {v}")
        if self.epsilon is not None and not (np.isfinite(self.epsilon) and self.epsilon > 0):
            raise ConfigError(f"epsilon must be positive, got {self.epsilon}")
        if self.t is not None and not (np.isfinite(self.t) and self.t > 0):
            raise ConfigError(f"t must be positive, got {self.t}")
        if not np.isfinite(self.t_exponent):
            raise ConfigError("t exponent must be finite")
        if self.target_points is not None and self.target_points < 4:
            raise ConfigError("target points must be >= 4")
        if not self.orders or not all(np.isfinite(a) for a in self.orders):
            raise ConfigError("orders must be finite")
        if any(m < 0 for m in self.modes):
            raise ConfigError("mode indices must be >= 0")
        if not self.channels:
            raise ConfigError("at least one channel is required")
        return self

    def to_dict(self):
        d = asdict(self)
        d.pop("out")
        for k, v in d.items():
            if isinstance(v, tuple):
                d[k] = list(v)
        return d


@contextmanager
def stage(name):
    try:
        yield
    except FracHarmError as exc:
        if getattr(exc, "stage", None) is None:
            exc.stage = name
        raise


def file_sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


class Pipeline:
    """Lazily evaluated stages for one config; each stage runs at most once."""

    def __init__(self, config):
        self.config = config.validate()

    @cached_property
    def raw_cloud(self):
        with stage("load"):
            extra = [c for c in self.config.channels if c not in COORDS]
            try:
                return read_ply(self.config.input, scalars=extra)
            except OSError as exc:
                raise InputError(f"cannot read {self.config.input}: {exc}") from exc

    @cached_property
    def input_sha256(self):
        return file_sha256(self.config.input)

    @cached_property
    def cloud(self):
        with stage("downsample"):
            if self.config.target_points is None:
                return self.raw_cloud
            return downsample(self.raw_cloud, self.config.target_points, self.config.seed)

    @cached_property
    def index(self):
        return build_index(self.cloud)

    @cached_property
    def epsilon(self):
        with stage("sampling"):
            if self.config.epsilon is not None:
                return float(self.config.epsilon)
            return estimate_epsilon(self.index).epsilon

    @property
    def r(self):
        return self.config.r_scale * self.epsilon

    @property
    def delta(self):
        return self.config.delta_scale * self.epsilon

    @property
    def t(self):
        if self.config.t is not None:
            return float(self.config.t)
        return default_t(self.epsilon, self.config.t_exponent)

    @property
    def feasible(self):
        return len(self.cloud) <= self.config.dense_limit

    @cached_property
    def weights(self):
        with stage("area-weights"):
            return all_area_weights(self.cloud, self.index, self.r, self.delta,
                                    self.config.clip_scale, self.config.seed)

    @cached_property
    def lbo(self):
        with stage("lbo"):
            log.info("assembling LBO: N=%d r=%g delta=%g t=%g", len(self.cloud), self.r,
                     self.delta, self.t)
            return assemble_lbo(self.cloud, self.index, self.weights, self.t, self.delta)

    @cached_property
    def basis(self):
        with stage("eigenbasis"):
            return solve_harmonic_basis(self.lbo, self.config.dense_limit)

    @cached_property
    def operator(self):
        with stage("fractional"):
            return operator_from_basis(self.basis, self.config.cond_limit)

    @cached_property
    def signal(self):
        """(N, C) matrix of the configured channels."""
        with stage("load"):
            cols = []
            for name in self.config.channels:
                if name in COORDS:
                    cols.append(self.cloud.points[:, COORDS.index(name)])
                else:
                    cols.append(self.cloud.scalars[name])
            return np.column_stack(cols)

    def parameters(self):
        """Resolved numeric parameters for manifests and reports."""
        return {
            "n_input": len(self.raw_cloud),
            "n": len(self.cloud),
            "epsilon": self.epsilon,
            "r": self.r,
            "delta": self.delta,
            "t": self.t,
            "clip_radius": self.config.clip_scale * self.delta,
            "kernel_backend": kernels.BACKEND,
        }

    def manifest(self, command, outputs, **extra):
        return {
            "command": command,
            "config": self.config.to_dict(),
            "input": {"path": str(self.config.input), "sha256": self.input_sha256},
            "parameters": self.parameters(),
            "outputs": sorted(outputs),
            **extra,
        }

"""Fractional manifold harmonic transforms on raw point clouds.

Typical use::

    cloud = read_ply("bunny.ply")
    pipe = Pipeline(PipelineConfig("bunny.ply", target_points=1000))
    sig = pmfht_forward(pipe.operator, pipe.signal, 0.5)
"""
from .errors import (
    BranchCutWarning,
    ConfigError,
    DefectiveOperatorError,
    FracHarmError,
    GeometryError,
    ImaginaryResidueWarning,
    InputError,
    PlyFormatError,
)
from .filtering import FilterSpec, apply_filter, smoothness_energy
from .fractional import (
    FractionalOperator,
    decompose_fourier_matrix,
    fractional_matrix,
    operator_from_basis,
    pmfht_forward,
    pmfht_inverse,
)
from .harmonic import (
    HarmonicBasis,
    SpectralSignal,
    manifold_fourier_matrix,
    pmht_forward,
    pmht_inverse,
    solve_harmonic_basis,
)
from .kernels import BACKEND
from .lbo import LboPair, apply_lbo, assemble_lbo, default_t
from .pipeline import Pipeline, PipelineConfig
from .ply_io import PointCloud, downsample, read_ply, write_ply
from .spatial import NeighborIndex, SamplingEstimate, build_index, estimate_epsilon, radius_query
from .tangent import (
    AreaWeights,
    TangentFrame,
    all_area_weights,
    estimate_tangent_plane,
    voronoi_cell_area,
)

__version__ = "0.1.0"

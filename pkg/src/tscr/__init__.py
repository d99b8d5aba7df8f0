"""Time-scale-chirp-rate analysis of multicomponent non-stationary signals."""

from .kernels import BACKEND as kernel_backend
from .signal_model import (
    ComponentTruth,
    GroundTruth,
    Signal,
    add_noise,
    gen_linear_chirp,
    gen_sinusoidal_fm,
    mix,
    normalized_mse,
)
from .transform import (
    PointEvaluator,
    TscrGrid,
    TscrVolume,
    WindowSpec,
    compute_tscr,
    cwlt_slice,
    gaussian_window,
    pft_gaussian,
    window_moment,
)

__version__ = "0.1.0"

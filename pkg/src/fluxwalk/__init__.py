"""Two-dimensional discrete-time quantum walks under an artificial magnetic field.

The flux ratio alpha (magnetic flux per plaquette over the flux quantum)
attaches the hop factor exp(+-i 2 pi alpha n) to every move along y,
turning the free ballistic walk into a tunable interference problem:
rational ratios keep the long-run spreading ballistic while irrational
ones make it diffusive and pin probability near the origin.
"""

from .core import (
    BlochAngles,
    BoundaryOverflowError,
    FluxRatio,
    GOLDEN_RATIO,
    PhaseTable,
    SYMMETRIC_COIN,
    WalkerState,
    apply_coin,
    evolve,
    new_state,
    shift_x,
    shift_y,
    step,
)
from .observables import (
    CoinDensity,
    ObservableSeries,
    ProbabilityMap,
    coin_density,
    entanglement_entropy,
    measure,
    origin_region_probability,
    participation_ratio,
    probability_map,
    variance,
)
from .analysis import (
    Convergent,
    ScalingFit,
    SweepResult,
    convergents,
    entanglement_surface,
    gaussian_smooth,
    peak_alpha,
    scaling_fit,
    sweep_alpha,
    time_series,
)

__version__ = "0.1.0"

__all__ = [
    "BlochAngles",
    "BoundaryOverflowError",
    "CoinDensity",
    "Convergent",
    "FluxRatio",
    "GOLDEN_RATIO",
    "ObservableSeries",
    "PhaseTable",
    "ProbabilityMap",
    "ScalingFit",
    "SweepResult",
    "SYMMETRIC_COIN",
    "WalkerState",
    "apply_coin",
    "coin_density",
    "convergents",
    "entanglement_entropy",
    "entanglement_surface",
    "evolve",
    "gaussian_smooth",
    "measure",
    "new_state",
    "origin_region_probability",
    "participation_ratio",
    "peak_alpha",
    "probability_map",
    "scaling_fit",
    "shift_x",
    "shift_y",
    "step",
    "sweep_alpha",
    "time_series",
    "variance",
]

"""Spin decoherence of a spin-1/2 wave packet moving through curved spacetime."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    DegenerateMetricError,
    HorizonError,
    InvalidInputError,
    InvalidStateError,
    MassShellError,
    StepSizeError,
    WignerDriftError,
)
from .evolution import (  # noqa: E402
    DecoherenceParams,
    ReducedSpinState,
    SimulationResult,
    circular_packet,
    decoherence_time,
    dephasing_rate_oracle,
    entropy,
    reduce_density,
    run_simulation,
)
from .kinematics import CircularOrbit, Trajectory, lambda_generator, orbit_state  # noqa: E402
from .spacetime import SpacetimePoint, metric_at, static_tetrad_at  # noqa: E402
from .wavepacket import PacketSpec, discretize_packet  # noqa: E402

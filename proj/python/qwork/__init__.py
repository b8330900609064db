"""Measured quantum work statistics: closed-form and numeric engines."""

from ._qwork import (
    ApparatusSpec,
    DrivenQubit,
    ProtocolSchedule,
    SpectralSystem,
    __version__,
    analytic,
    default_config,
    numeric,
    oracle,
    run,
    sigma_width,
    thermo,
)

__all__ = [
    "ApparatusSpec",
    "DrivenQubit",
    "ProtocolSchedule",
    "SpectralSystem",
    "__version__",
    "analytic",
    "default_config",
    "numeric",
    "oracle",
    "run",
    "sigma_width",
    "thermo",
]

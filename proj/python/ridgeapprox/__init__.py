"""Sparse ReLU and squared-ReLU ridge approximations of spectral targets."""

from ._ridgeapprox import (
    BuildFailure,
    Combination,
    Target,
    UsageError,
    __version__,
    build,
    fit_rate,
    l2_error,
    linf_error,
    lower_bound_floor,
    packing_cardinality,
    rate_sweep,
    resolve_target,
    select_packing,
    sine_family_size,
    verify,
)

__all__ = [
    "BuildFailure",
    "Combination",
    "Target",
    "UsageError",
    "__version__",
    "build",
    "fit_rate",
    "l2_error",
    "linf_error",
    "lower_bound_floor",
    "packing_cardinality",
    "rate_sweep",
    "resolve_target",
    "select_packing",
    "sine_family_size",
    "verify",
]

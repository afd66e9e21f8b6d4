"""Twist maps, periodic minimizers, Peierls barriers and minimal measures."""

from ._core import (
    GOLDEN_MEAN,
    GeneratingFunction,
    MomentumOutOfRange,
    NumericalFailure,
    UsageError,
    WindowExceeded,
    alpha,
    beta_grid,
    check_twist,
    circle_test,
    cli,
    connect,
    convergents,
    derivative_selfcheck,
    forward,
    iterate,
    minimize_periodic,
    peierls_barrier,
    rotation_number,
)

__version__ = "0.1.0"

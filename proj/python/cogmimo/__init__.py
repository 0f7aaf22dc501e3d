# SPDX-License-Identifier: Apache-2.0
"""Iterative waterfilling games for MIMO cognitive radio."""

from ._core import (
    Error,
    Game,
    capped_mimo_waterfill,
    gap_factor,
    mimo_waterfill,
    steering_matrix,
    steering_vector,
    uniqueness_mimo,
    uniqueness_siso,
    water_level,
    waterfill_powers,
)

__all__ = [
    "Error",
    "Game",
    "capped_mimo_waterfill",
    "gap_factor",
    "mimo_waterfill",
    "steering_matrix",
    "steering_vector",
    "uniqueness_mimo",
    "uniqueness_siso",
    "water_level",
    "waterfill_powers",
]

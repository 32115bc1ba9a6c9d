"""Constants and enums for ringcore-sim."""

from enum import Enum


class RunState(Enum):
    """Run state constants for the channel job runner."""

    PENDING = "pending"
    RUNNING = "running"
    DONE = "done"
    FAILED = "failed"


class Direction(Enum):
    """Propagation direction of a spatial channel."""

    FORWARD = "forward"
    BACKWARD = "backward"


class Polarization(Enum):
    """Circular polarization of an OAM mode."""

    R = "R"
    L = "L"


class EqualizerStage(Enum):
    """Adaptation stage of the MIMO equalizer."""

    CMA = "cma"
    RDE = "rde"


# 20% overhead soft-decision FEC threshold
FEC_THRESHOLD = 2.4e-2

# Pre-amplifier EDFA sensitivity in dBm
PREAMP_SENSITIVITY_DBM = -37.0

# Mode groups |l| = 0 and |l| = 1 never carry data
EXCLUDED_MODE_GROUPS = frozenset({0, 1})

MODES_PER_GROUP = 4
PRBS_DEGREE = 18
PRBS_PERIOD = (1 << PRBS_DEGREE) - 1
BITS_PER_SYMBOL = 3

# Hexagonal 7-core layout, core 1 in the centre
HEX7_NEIGHBOURS = {
    1: (2, 3, 4, 5, 6, 7),
    2: (1, 3, 7),
    3: (1, 2, 4),
    4: (1, 3, 5),
    5: (1, 4, 6),
    6: (1, 5, 7),
    7: (1, 2, 6),
}
HEX7_MAX_NEIGHBOURS = 6

# Published budget rows: (|l|, launch dBm, MUX IL, split, fiber loss, DEMUX IL)
PUBLISHED_BUDGET_ROWS = (
    (2, 1.98, -13.0, -3.0, -1.57, -9.0),
    (3, 1.98, -13.0, -3.0, -1.58, -9.0),
    (4, 2.98, -14.0, -3.0, -1.72, -9.0),
)

# Status colors for result rows and the run status bar
STATUS_COLORS = {
    "pass": "green",
    "fail": "red",
    "no_lock": "magenta",
    "diverged": "magenta",
}

MODE_GROUP_COLORS = {
    2: (61, 116, 219),
    3: (255, 194, 39),
    4: (108, 95, 199),
}

# Group index of the ring-core modes, sets backscatter round-trip delays
FIBER_GROUP_INDEX = 1.47

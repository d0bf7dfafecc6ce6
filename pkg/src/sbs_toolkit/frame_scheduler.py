"""TDD frame construction and TSF-DMA user allocation.

Each 10 ms frame holds two 5 ms half frames of three intervals: downlink
(DI), guard (GI) and uplink (UI).  During DI subarray 1 transmits the
downlink ISAC signal while subarray 2 receives the echo; during GI subarray
1 idles so late echoes land clear of uplink traffic; during UI both
subarrays receive uplink signals.  Interval boundaries are integer
nanoseconds, so frame arithmetic is exact at any horizon.

Users are separated in space (one DCB each), time (subframes) and frequency
(subcarrier blocks): users in different DCBs may reuse the same
time-frequency cells, users within one DCB may not.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .array_geometry import C_LIGHT, Direction, angular_distance_deg

HALF_FRAME_NS = 5_000_000
FRAME_NS = 2 * HALF_FRAME_NS

ROLE_TX_DOWNLINK = "transmit downlink ISAC signal"
ROLE_RX_ECHO = "receive ISAC echo signal"
ROLE_IDLE = "idle"
ROLE_RX_UPLINK = "receive uplink signal"

# interval label -> (subarray-1 role, subarray-2 role)
ROLE_MATRIX = {
    "DI": (ROLE_TX_DOWNLINK, ROLE_RX_ECHO),
    "GI": (ROLE_IDLE, ROLE_RX_ECHO),
    "UI": (ROLE_RX_UPLINK, ROLE_RX_UPLINK),
}


@dataclass(frozen=True)
class FrameConfig:
    """Durations of the three half-frame intervals in milliseconds."""

    t_d_ms: float = 3.5
    t_g_ms: float = 0.5
    t_u_ms: float = 1.0

    def __post_init__(self):
        for name in ("t_d_ms", "t_g_ms", "t_u_ms"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if sum(self.interval_ns) != HALF_FRAME_NS:
            raise ValueError(
                f"interval durations must sum to exactly 5 ms, got "
                f"{self.t_d_ms} + {self.t_g_ms} + {self.t_u_ms} ms"
            )

    @property
    def interval_ns(self) -> tuple:
        """Integer-nanosecond durations of (DI, GI, UI)."""
        return (
            round(self.t_d_ms * 1e6),
            round(self.t_g_ms * 1e6),
            round(self.t_u_ms * 1e6),
        )

    def guard_covers_range(self, r_max_s_m: float) -> bool:
        """True when echoes from r_max_s return within DI+GI, i.e. the guard
        exceeds the maximum round-trip time."""
        round_trip_s = 2.0 * r_max_s_m / C_LIGHT
        return self.interval_ns[1] >= round_trip_s * 1e9


@dataclass(frozen=True)
class FrameInterval:
    label: str          # DI / GI / UI
    start_ns: int       # offset from the frame start
    end_ns: int
    sbsa1_role: str
    sbsa2_role: str
    half_frame: int     # 0 or 1


def build_frame(cfg: FrameConfig, frame_index: int = 0) -> list:
    """Timeline of one 10 ms frame: six intervals with exact ns boundaries."""
    base = frame_index * FRAME_NS
    intervals = []
    for half in (0, 1):
        t = base + half * HALF_FRAME_NS
        for label, dur in zip(("DI", "GI", "UI"), cfg.interval_ns):
            r1, r2 = ROLE_MATRIX[label]
            intervals.append(FrameInterval(label, t, t + dur, r1, r2, half))
            t += dur
    return intervals


@dataclass(frozen=True)
class UserRequest:
    user_id: str
    beam_id: str        # the DCB the user sits in
    demand: int         # block-subframes requested

    def __post_init__(self):
        if self.demand < 1:
            raise ValueError(f"demand must be >= 1, got {self.demand}")


@dataclass
class ResourceGrid:
    """Beams x subframes x subcarrier-blocks allocation map.

    The first beam id is the FDB and never carries directed-communication
    users.  Cells are keyed (beam, subframe, block); each maps to the list
    of user ids claiming it, which a sound allocation keeps at length one.
    """

    fdb_beam: str
    dcb_beams: tuple
    n_subframes: int
    n_blocks: int
    cells: dict = field(default_factory=dict)

    def __post_init__(self):
        self.dcb_beams = tuple(self.dcb_beams)
        if self.n_subframes < 1 or self.n_blocks < 1:
            raise ValueError("subframe and block counts must be >= 1")
        ids = (self.fdb_beam,) + self.dcb_beams
        if len(set(ids)) != len(ids):
            raise ValueError(f"beam ids must be unique, got {ids}")

    @property
    def beams(self) -> tuple:
        return (self.fdb_beam,) + self.dcb_beams

    def capacity_per_beam(self) -> int:
        return self.n_subframes * self.n_blocks


@dataclass(frozen=True)
class Assignment:
    user_id: str
    beam_id: str
    subframe: int
    block: int


@dataclass(frozen=True)
class AllocationReport:
    assignments: tuple
    shortfalls: tuple   # (user_id, unmet demand) pairs, empty when all fit

    @property
    def fully_served(self) -> bool:
        return not self.shortfalls


def allocate(grid: ResourceGrid, requests) -> AllocationReport:
    """Greedy first-fit of user demands onto (subframe, block) cells per beam.

    Users in different DCBs may occupy identical time-frequency coordinates;
    within one DCB every cell holds at most one user.  Unmet demand is
    reported, never raised.
    """
    assignments = []
    shortfalls = []
    for req in requests:
        if req.beam_id == grid.fdb_beam:
            raise ValueError(
                f"user {req.user_id} requests the FDB; directed communication "
                f"runs on DCBs only"
            )
        if req.beam_id not in grid.dcb_beams:
            raise ValueError(f"unknown beam id {req.beam_id!r}")
        granted = 0
        for subframe in range(grid.n_subframes):
            for block in range(grid.n_blocks):
                if granted == req.demand:
                    break
                key = (req.beam_id, subframe, block)
                if not grid.cells.get(key):
                    grid.cells.setdefault(key, []).append(req.user_id)
                    assignments.append(
                        Assignment(req.user_id, req.beam_id, subframe, block)
                    )
                    granted += 1
            if granted == req.demand:
                break
        if granted < req.demand:
            shortfalls.append((req.user_id, req.demand - granted))
    return AllocationReport(tuple(assignments), tuple(shortfalls))


@dataclass(frozen=True)
class InterferenceReport:
    ok: bool
    violations: tuple   # human-readable descriptions

    def __bool__(self) -> bool:
        return self.ok


def check_interference_free(
    grid: ResourceGrid,
    fdb_schedule=(),
    dcb_dirs=(),
    widths_deg: tuple = (2.0, 3.0),
) -> InterferenceReport:
    """Verify the two interference-freedom conditions.

    (a) no two users share a (beam, subframe, block) cell, and (b) no
    scanning dwell points the FDB within half the larger beamwidth of an
    active DCB direction.
    """
    violations = []
    for key, users in sorted(grid.cells.items()):
        if len(users) > 1:
            violations.append(f"cell {key} double-booked by {sorted(users)}")

    exclusion = max(widths_deg) / 2.0
    for dwell in fdb_schedule:
        for dcb in dcb_dirs:
            if angular_distance_deg(dwell, dcb) <= exclusion:
                violations.append(
                    f"FDB dwell at ({dwell.phi_deg:.2f}, {dwell.theta_deg:.2f}) deg "
                    f"hits DCB at ({dcb.phi_deg:.2f}, {dcb.theta_deg:.2f}) deg"
                )
    return InterferenceReport(not violations, tuple(violations))

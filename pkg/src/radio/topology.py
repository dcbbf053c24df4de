"""
Square-grid geometry and placement ensembles.

A grid G(M, step) holds the (K+1)^2 points [k1 step, k2 step] with K = M / step. The
reader sits at the grid center; carrier emitters default to the quarter points, each
moved to the nearest free grid point when the grid does not contain it. Tags
are drawn uniformly without replacement from the remaining points.

Sub-reference distances (closer than d0 to the reader or to a CE) are handled by a
DistancePolicy: RESAMPLE rejects the whole draw and tries again, CLAMP keeps it and
floors the distance at d0 when path gains are computed.
"""

import itertools
import math
from collections.abc import Iterator, Sequence
from dataclasses import dataclass, field
from enum import StrEnum

import numpy as np
from tenacity import RetryError, Retrying, retry_if_exception_type, stop_after_attempt

from config import MAX_EXHAUSTIVE_PLACEMENTS, MAX_TOPOLOGY_ATTEMPTS, REFERENCE_DISTANCE_M
from utils.logging import get_logger

logger = get_logger(__name__)

Point = tuple[float, float]

# Relative tolerance when matching coordinates to grid points
_GRID_TOL = 1e-9


class TopologyError(ValueError):
    """Raised on invalid grids, infeasible placements or exhausted sampling attempts."""

    pass


class _RejectedDraw(Exception):
    """A sampled topology put a tag closer than d0 to the reader or a CE."""


class DistancePolicy(StrEnum):
    RESAMPLE = "resample"
    CLAMP = "clamp"


@dataclass(frozen=True)
class Grid:
    """Square grid of side M and resolution step, both in meters."""

    side: float
    step: float

    def __post_init__(self):
        if not self.side > 0 or not self.step > 0:
            raise TopologyError("grid side and step must be > 0")
        k = self.side / self.step
        if abs(k - round(k)) > _GRID_TOL * max(1.0, k):
            raise TopologyError(
                f"grid side {self.side} m is not an integer multiple of step {self.step} m"
            )

    @property
    def k(self) -> int:
        return int(round(self.side / self.step))

    @property
    def n_points(self) -> int:
        return (self.k + 1) ** 2

    def check_capacity(self, n_tags: int, n_emitters: int) -> None:
        """(K+1)^2 must exceed tags + emitters + reader."""
        if n_tags < 1:
            raise TopologyError(f"need at least one tag, got {n_tags}")
        needed = n_tags + n_emitters + 1
        if self.n_points < needed:
            raise TopologyError(
                f"grid has {self.n_points} points, {needed} needed for "
                f"{n_tags} tags, {n_emitters} emitters and the reader"
            )

    def index_of(self, point: Sequence[float]) -> tuple[int, int]:
        """Integer grid coordinates of a point; raises if the point is off-grid."""
        idx = []
        for coord in point:
            k = coord / self.step
            if abs(k - round(k)) > _GRID_TOL * max(1.0, abs(k)) or not 0 <= round(k) <= self.k:
                raise TopologyError(f"point {tuple(point)} is not on the grid")
            idx.append(int(round(k)))
        return idx[0], idx[1]

    def point(self, index: tuple[int, int]) -> Point:
        return (index[0] * self.step, index[1] * self.step)


def grid_points(side: float, step: float) -> np.ndarray:
    """All (K+1)^2 grid points, lexicographically ordered, shape (P, 2)."""
    grid = Grid(side, step)
    coords = np.arange(grid.k + 1) * grid.step
    xs, ys = np.meshgrid(coords, coords, indexing="ij")
    return np.column_stack([xs.ravel(), ys.ravel()])


def canonical_positions(side: float, n_emitters: int) -> tuple[Point, list[Point]]:
    """Reader at the center, CEs on the first n_emitters quarter points."""
    quarter = [
        (side / 4, side / 4),
        (3 * side / 4, side / 4),
        (3 * side / 4, 3 * side / 4),
        (side / 4, 3 * side / 4),
    ]
    if n_emitters > len(quarter):
        raise TopologyError(
            f"only {len(quarter)} canonical emitter positions; pass emitters explicitly"
        )
    return (side / 2, side / 2), quarter[:n_emitters]


@dataclass
class Topology:
    """
    Positions of reader, carrier emitters and tags, plus per-link path-loss exponents.

    ple_tag_reader has one entry per tag, ple_ce_tag one row per emitter. An empty
    emitter list is a monostatic layout.
    """

    reader: Point
    emitters: list[Point] = field(default_factory=list)
    tags: list[Point] = field(default_factory=list)
    ple_tag_reader: list[float] = field(default_factory=list)
    ple_ce_tag: list[list[float]] = field(default_factory=list)

    def __post_init__(self):
        self.reader = tuple(float(c) for c in self.reader)
        self.emitters = [tuple(float(c) for c in p) for p in self.emitters]
        self.tags = [tuple(float(c) for c in p) for p in self.tags]
        if not self.tags:
            raise TopologyError("a topology needs at least one tag")
        positions = [self.reader, *self.emitters, *self.tags]
        if len(set(positions)) != len(positions):
            raise TopologyError("reader, emitter and tag positions must be distinct")
        if self.ple_tag_reader and len(self.ple_tag_reader) != self.n_tags:
            raise TopologyError("one tag-to-reader path-loss exponent per tag is required")
        if self.ple_ce_tag and (
            len(self.ple_ce_tag) != self.n_emitters
            or any(len(row) != self.n_tags for row in self.ple_ce_tag)
        ):
            raise TopologyError("ple_ce_tag must have one row per emitter and one entry per tag")

    @property
    def n_tags(self) -> int:
        return len(self.tags)

    @property
    def n_emitters(self) -> int:
        return len(self.emitters)

    @property
    def is_monostatic(self) -> bool:
        return not self.emitters

    def exponents(self, default: float) -> tuple[np.ndarray, np.ndarray]:
        """(tag-reader (N,), CE-tag (L, N)) exponents, filled with default where unset."""
        tag_reader = (
            np.asarray(self.ple_tag_reader, dtype=float)
            if self.ple_tag_reader
            else np.full(self.n_tags, default)
        )
        ce_tag = (
            np.asarray(self.ple_ce_tag, dtype=float).reshape(self.n_emitters, self.n_tags)
            if self.ple_ce_tag
            else np.full((self.n_emitters, self.n_tags), default)
        )
        return tag_reader, ce_tag

    def validate(self, grid: Grid) -> None:
        for point in [self.reader, *self.emitters, *self.tags]:
            grid.index_of(point)

    def to_dict(self) -> dict:
        return {
            "reader": list(self.reader),
            "emitters": [list(p) for p in self.emitters],
            "tags": [list(p) for p in self.tags],
            "ple_tag_reader": list(self.ple_tag_reader),
            "ple_ce_tag": [list(row) for row in self.ple_ce_tag],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Topology":
        try:
            return cls(
                reader=tuple(data["reader"]),
                emitters=[tuple(p) for p in data.get("emitters", [])],
                tags=[tuple(p) for p in data["tags"]],
                ple_tag_reader=[float(v) for v in data.get("ple_tag_reader", [])],
                ple_ce_tag=[[float(v) for v in row] for row in data.get("ple_ce_tag", [])],
            )
        except (KeyError, TypeError) as e:
            raise TopologyError(f"malformed topology record: {e}") from e


@dataclass
class LinkDistances:
    """Euclidean link lengths in meters; clamped counts the links floored at d0."""

    ce_tag: np.ndarray
    tag_reader: np.ndarray
    ce_reader: np.ndarray
    clamped: int = 0


def _too_close(topology: Topology, reference_distance: float) -> bool:
    tags = np.asarray(topology.tags)
    anchors = np.asarray([topology.reader, *topology.emitters])
    dist = np.linalg.norm(tags[:, None, :] - anchors[None, :, :], axis=-1)
    return bool(np.any(dist < reference_distance))


def link_distances(
    topology: Topology,
    reference_distance: float = REFERENCE_DISTANCE_M,
    clamp: bool = False,
) -> LinkDistances:
    """
    d(C_l, T_n) with shape (L, N), d(T_n, R) with shape (N,) and d(C_l, R) with shape (L,).

    With clamp=True distances below d0 are floored at d0 and counted.
    """
    tags = np.asarray(topology.tags, dtype=float)
    reader = np.asarray(topology.reader, dtype=float)
    emitters = np.asarray(topology.emitters, dtype=float).reshape(-1, 2)

    ce_tag = np.linalg.norm(emitters[:, None, :] - tags[None, :, :], axis=-1)
    tag_reader = np.linalg.norm(tags - reader, axis=-1)
    ce_reader = np.linalg.norm(emitters - reader, axis=-1)

    clamped = 0
    if clamp:
        clamped = int(np.sum(ce_tag < reference_distance) + np.sum(tag_reader < reference_distance))
        ce_tag = np.maximum(ce_tag, reference_distance)
        tag_reader = np.maximum(tag_reader, reference_distance)
    return LinkDistances(ce_tag=ce_tag, tag_reader=tag_reader, ce_reader=ce_reader, clamped=clamped)


def _nearest_free(grid: Grid, target: Point, taken: set[tuple[int, int]]) -> Point:
    points = grid_points(grid.side, grid.step)
    dist = np.linalg.norm(points - np.asarray(target, dtype=float), axis=1)
    # Equidistant points resolve to the lexicographically first one
    for i in np.argsort(dist, kind="stable"):
        point = (float(points[i, 0]), float(points[i, 1]))
        if grid.index_of(point) not in taken:
            return point
    raise TopologyError(f"no free grid point left for an anchor near {target}")


def anchor_positions(
    grid: Grid,
    n_emitters: int,
    reader: Point | None = None,
    emitters: Sequence[Point] | None = None,
) -> tuple[Point, list[Point]]:
    """
    Reader and emitter positions on the grid.

    Explicit positions must be grid points. Defaults are the canonical positions moved
    to the nearest free grid point, reader first, so a 3x3 grid still gets distinct CEs.

    Raises:
        TopologyError: On off-grid explicit positions or a wrong number of emitters
    """
    default_reader, default_emitters = canonical_positions(
        grid.side, n_emitters if emitters is None else 0
    )
    taken: set[tuple[int, int]] = set()
    if reader is None:
        reader = _nearest_free(grid, default_reader, taken)
    else:
        reader = (float(reader[0]), float(reader[1]))
    taken.add(grid.index_of(reader))

    if emitters is None:
        resolved = []
        for target in default_emitters:
            point = _nearest_free(grid, target, taken)
            taken.add(grid.index_of(point))
            resolved.append(point)
    else:
        resolved = [(float(p[0]), float(p[1])) for p in emitters]
        for point in resolved:
            grid.index_of(point)
    if len(resolved) != n_emitters:
        raise TopologyError(f"expected {n_emitters} emitter positions, got {len(resolved)}")
    return reader, resolved


def _free_points(grid: Grid, occupied: Sequence[Point]) -> np.ndarray:
    points = grid_points(grid.side, grid.step)
    taken = {grid.index_of(p) for p in occupied}
    keep = [i for i, p in enumerate(points) if grid.index_of(p) not in taken]
    return points[keep]


def _sample_exponents(
    ple_range: tuple[float, float] | None, n_tags: int, n_emitters: int, rng: np.random.Generator
) -> tuple[list[float], list[list[float]]]:
    if ple_range is None:
        return [], []
    lo, hi = ple_range
    if not 0 < lo <= hi:
        raise TopologyError(f"invalid path-loss exponent range {ple_range}")
    tag_reader = rng.uniform(lo, hi, size=n_tags)
    ce_tag = rng.uniform(lo, hi, size=(n_emitters, n_tags))
    return tag_reader.tolist(), ce_tag.tolist()


def sample_topology(
    grid: Grid,
    n_tags: int,
    n_emitters: int,
    rng: np.random.Generator,
    reader: Point | None = None,
    emitters: Sequence[Point] | None = None,
    ple_range: tuple[float, float] | None = None,
    distance_policy: DistancePolicy = DistancePolicy.RESAMPLE,
    reference_distance: float = REFERENCE_DISTANCE_M,
    max_attempts: int = MAX_TOPOLOGY_ATTEMPTS,
) -> Topology:
    """
    Draw one topology uniformly from the placement ensemble.

    Reader and emitters default to the canonical positions (n_emitters = 0 is monostatic).
    Path-loss exponents are drawn U[ple_range] per link when a range is given.

    Raises:
        TopologyError: On capacity violations or when RESAMPLE exhausts max_attempts
    """
    grid.check_capacity(n_tags, n_emitters)
    reader, emitters = anchor_positions(grid, n_emitters, reader, emitters)
    free = _free_points(grid, [reader, *emitters])

    def draw() -> Topology:
        chosen = rng.choice(len(free), size=n_tags, replace=False)
        ple_tag_reader, ple_ce_tag = _sample_exponents(ple_range, n_tags, n_emitters, rng)
        topology = Topology(
            reader=reader,
            emitters=emitters,
            tags=[tuple(p) for p in free[chosen]],
            ple_tag_reader=ple_tag_reader,
            ple_ce_tag=ple_ce_tag,
        )
        if distance_policy == DistancePolicy.RESAMPLE and _too_close(topology, reference_distance):
            raise _RejectedDraw()
        return topology

    try:
        for attempt in Retrying(
            retry=retry_if_exception_type(_RejectedDraw),
            stop=stop_after_attempt(max_attempts),
        ):
            with attempt:
                topology = draw()
    except RetryError as e:
        raise TopologyError(
            f"no topology with all tags >= {reference_distance} m from reader and emitters "
            f"after {max_attempts} attempts; use distance_policy 'clamp' for this grid"
        ) from e

    attempts = attempt.retry_state.attempt_number
    if attempts > 1:
        logger.debug("Topology accepted after %d attempts", attempts)
    return topology


def tag_candidates(
    grid: Grid,
    reader: Point,
    emitters: Sequence[Point],
    distance_policy: DistancePolicy = DistancePolicy.RESAMPLE,
    reference_distance: float = REFERENCE_DISTANCE_M,
) -> np.ndarray:
    """
    Grid points a single tag may occupy, shape (P', 2).

    Drawing one index uniformly from this set is the single-tag case of sample_topology:
    under RESAMPLE the points closer than d0 to an anchor are removed up front.
    """
    free = _free_points(grid, [reader, *emitters])
    if distance_policy == DistancePolicy.RESAMPLE:
        anchors = np.asarray([reader, *emitters], dtype=float)
        dist = np.linalg.norm(free[:, None, :] - anchors[None, :, :], axis=-1)
        free = free[np.all(dist >= reference_distance, axis=1)]
    if len(free) == 0:
        raise TopologyError(f"no grid point lies >= {reference_distance} m from every anchor")
    return free


def ensemble_size(grid: Grid, n_tags: int, n_emitters: int) -> int:
    """Number of tag placements: C((K+1)^2 - 1 - L, N)."""
    grid.check_capacity(n_tags, n_emitters)
    return math.comb(grid.n_points - 1 - n_emitters, n_tags)


def enumerate_topologies(
    grid: Grid,
    n_tags: int,
    n_emitters: int,
    reader: Point | None = None,
    emitters: Sequence[Point] | None = None,
    limit: int = MAX_EXHAUSTIVE_PLACEMENTS,
) -> Iterator[Topology]:
    """Every tag placement of the ensemble in lexicographic order (small grids only)."""
    size = ensemble_size(grid, n_tags, n_emitters)
    if size > limit:
        raise TopologyError(f"ensemble of {size} placements exceeds the limit of {limit}")
    reader, emitters = anchor_positions(grid, n_emitters, reader, emitters)
    free = _free_points(grid, [reader, *emitters])
    for combo in itertools.combinations(range(len(free)), n_tags):
        yield Topology(reader=reader, emitters=emitters, tags=[tuple(free[i]) for i in combo])


def emitter_placement_count(grid: Grid, n_emitters: int, n_tags: int) -> int:
    """Number of CE placements that leave room for the tags: C((K+1)^2 - 1, L)."""
    grid.check_capacity(n_tags, n_emitters)
    return math.comb(grid.n_points - 1, n_emitters)


def sample_emitter_placement(
    grid: Grid, n_emitters: int, reader: Point, rng: np.random.Generator
) -> list[Point]:
    """L distinct emitter positions drawn uniformly among the non-reader points."""
    free = _free_points(grid, [reader])
    chosen = rng.choice(len(free), size=n_emitters, replace=False)
    return [tuple(p) for p in free[np.sort(chosen)]]


def enumerate_emitter_placements(
    grid: Grid, n_emitters: int, reader: Point, limit: int = MAX_EXHAUSTIVE_PLACEMENTS
) -> Iterator[list[Point]]:
    """Every set of L emitter positions in lexicographic order."""
    free = _free_points(grid, [reader])
    size = math.comb(len(free), n_emitters)
    if size > limit:
        raise TopologyError(f"{size} emitter placements exceed the limit of {limit}")
    for combo in itertools.combinations(range(len(free)), n_emitters):
        yield [tuple(free[i]) for i in combo]

"""Indoor 3-D geometry: node placement, Euclidean distances, azimuth angles."""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConfigurationError, DegenerateGeometryError, InvalidInputError


@dataclass(frozen=True)
class Position3D:
    x: float
    y: float
    z: float

    def __post_init__(self):
        for c in (self.x, self.y, self.z):
            if not math.isfinite(c):
                raise InvalidInputError(f"non-finite coordinate in {(self.x, self.y, self.z)}")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)


@dataclass(frozen=True)
class IndoorArea:
    """Axis-aligned room the network lives in, default 10 m x 17 m x 3 m."""

    x_range: tuple = (0.0, 10.0)
    y_range: tuple = (0.0, 17.0)
    z_range: tuple = (0.0, 3.0)

    def __post_init__(self):
        for axis, (lo, hi) in zip("xyz", (self.x_range, self.y_range, self.z_range)):
            if not (math.isfinite(lo) and math.isfinite(hi) and lo <= hi):
                raise ConfigurationError(f"empty or non-finite {axis}_range {(lo, hi)}")

    def contains(self, p: Position3D) -> bool:
        return (
            self.x_range[0] <= p.x <= self.x_range[1]
            and self.y_range[0] <= p.y <= self.y_range[1]
            and self.z_range[0] <= p.z <= self.z_range[1]
        )

    def sample(self, rng: np.random.Generator) -> Position3D:
        """Uniform-random position inside the room."""
        return Position3D(
            rng.uniform(*self.x_range),
            rng.uniform(*self.y_range),
            rng.uniform(*self.z_range),
        )


@dataclass(frozen=True)
class AccessPoint:
    ap_id: int
    position: Position3D
    power_w: float       # DL transmit power budget
    service_rate: float  # mu, requests/s


@dataclass(frozen=True)
class UserNode:
    user_id: int
    position: Position3D
    power_w: float            # UL transmit power
    arrival_rate: float       # lambda, requests/s
    delay_tolerance_s: float  # gamma_D
    reference_position: Optional[Position3D] = None  # tracking anchor, defaults to own position

    @property
    def anchor(self) -> Position3D:
        return self.reference_position if self.reference_position is not None else self.position


@dataclass(frozen=True)
class NetworkTopology:
    """Immutable AP/user layout. Indexing order of the tuples is the canonical
    (user, ap) index order used by every downstream array."""

    area: IndoorArea
    aps: tuple
    users: tuple

    def __post_init__(self):
        if len(self.aps) < 1 or len(self.users) < 1:
            raise ConfigurationError("topology needs at least one AP and one user")
        ap_ids = [a.ap_id for a in self.aps]
        user_ids = [u.user_id for u in self.users]
        if len(set(ap_ids)) != len(ap_ids) or len(set(user_ids)) != len(user_ids):
            raise ConfigurationError("duplicate node ids in topology")
        for node in list(self.aps) + list(self.users):
            if not self.area.contains(node.position):
                raise ConfigurationError(
                    f"node at {node.position} lies outside the indoor area"
                )
        # every (user, AP) pairing may enter the queue-delay model
        for ap in self.aps:
            for user in self.users:
                if not ap.service_rate > user.arrival_rate:
                    raise ConfigurationError(
                        f"service rate {ap.service_rate} of AP {ap.ap_id} must exceed "
                        f"arrival rate {user.arrival_rate} of user {user.user_id}"
                    )

    @property
    def n_aps(self) -> int:
        return len(self.aps)

    @property
    def n_users(self) -> int:
        return len(self.users)


def distance(p: Position3D, q: Position3D) -> float:
    """Euclidean distance in meters."""
    return math.sqrt((p.x - q.x) ** 2 + (p.y - q.y) ** 2 + (p.z - q.z) ** 2)


def departure_arrival_angles(tx: Position3D, rx: Position3D) -> tuple:
    """Azimuth angle of departure and arrival, degrees in [0, 360).

    Departure direction is rx - tx; arrival is its negation, so the arrival
    azimuth is exactly the departure azimuth rotated by 180 degrees. The
    two-argument arctangent keeps the quadrant, which a plain ratio loses.
    """
    dx = rx.x - tx.x
    dy = rx.y - tx.y
    if dx == 0.0 and dy == 0.0:
        raise DegenerateGeometryError(
            f"tx {(tx.x, tx.y)} and rx {(rx.x, rx.y)} coincide in the xy plane"
        )
    aod_az = math.degrees(math.atan2(dy, dx)) % 360.0
    aoa_az = (aod_az + 180.0) % 360.0
    return aod_az, aoa_az


def random_topology(
    area: IndoorArea,
    n_aps: int,
    n_users: int,
    rng: np.random.Generator,
    ap_power_w: float,
    user_power_w: float,
    service_rate: float,
    arrival_rate: float,
    delay_tolerance_s: float,
) -> NetworkTopology:
    """Seeded uniform placement inside the room for when no explicit positions
    are configured."""
    aps = tuple(
        AccessPoint(j, area.sample(rng), ap_power_w, service_rate) for j in range(n_aps)
    )
    users = tuple(
        UserNode(i, area.sample(rng), user_power_w, arrival_rate, delay_tolerance_s)
        for i in range(n_users)
    )
    return NetworkTopology(area=area, aps=aps, users=users)

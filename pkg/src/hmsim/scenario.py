"""2-D room geometry, link budgets and the multi-armed beam search.

The surface sits on a wall segment; the access point and users live in
the plane.  A user across the wall is served in lens (transmissive)
mode, a user on the access point's side in mirror (reflective) mode.
The relay is treated as refocusing: free-space spreading accrues over
the total path length through the surface, while the direct through-wall
path pays the configured wall attenuation instead.
"""

import math
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from .beams import ArrayLayout, array_factor
from .constants import C_LIGHT
from .errors import DegenerateGeometryError, GeometryError, SearchFailedError
from .modulation import ModulationSettings, per_element_spectra
from .optimizer import WaveformGenome, consequence_angle, synthesize_surface
from .sheet import ElementModel

Mode = Literal["lens", "mirror"]
PathType = Literal["direct", "lens", "mirror", "blocked"]

MIN_HOP_DISTANCE_M = 0.1
DEFAULT_WALL_ATTEN_DB = 15.0
DEFAULT_BLOCKAGE_DB = 20.0
DEFAULT_TX_POWER_DBM = 10.0
DEFAULT_ANTENNA_GAIN_DBI = 20.0
DEFAULT_SWEEP_SPAN_DEG = 60.0
DEFAULT_SWEEP_STEP_DEG = 2.0
DEFAULT_SENSITIVITY_DBM = -90.0

_PATTERN_FLOOR = 1e-12


def _as_point(p) -> np.ndarray:
    arr = np.asarray(p, dtype=float)
    if arr.shape != (2,):
        raise GeometryError(f"expected a 2-D point, got {p!r}")
    return arr


@dataclass(frozen=True)
class SceneGeometry:
    """Access point, wall-mounted surface, users and blocking segments."""

    ap: tuple
    surface_center: tuple
    surface_normal: tuple
    users: tuple
    blockers: tuple = ()
    wall_atten_db: float = DEFAULT_WALL_ATTEN_DB
    blockage_db: float = DEFAULT_BLOCKAGE_DB
    tx_power_dbm: float = DEFAULT_TX_POWER_DBM
    ap_gain_dbi: float = DEFAULT_ANTENNA_GAIN_DBI
    user_gain_dbi: float = DEFAULT_ANTENNA_GAIN_DBI

    def __post_init__(self):
        ap = _as_point(self.ap)
        center = _as_point(self.surface_center)
        normal = _as_point(self.surface_normal)
        norm = float(np.hypot(*normal))
        if norm == 0:
            raise GeometryError("surface normal must be non-zero")
        normal = normal / norm
        users = tuple(tuple(_as_point(u)) for u in self.users)
        blockers = tuple(
            (tuple(_as_point(a)), tuple(_as_point(b))) for a, b in self.blockers
        )
        points = [tuple(ap), tuple(center), *users]
        if len(set(points)) != len(points):
            raise GeometryError("AP, surface and users must not coincide")
        object.__setattr__(self, "ap", tuple(ap))
        object.__setattr__(self, "surface_center", tuple(center))
        object.__setattr__(self, "surface_normal", tuple(normal))
        object.__setattr__(self, "users", users)
        object.__setattr__(self, "blockers", blockers)

    @property
    def tangent(self) -> np.ndarray:
        nx, ny = self.surface_normal
        return np.array([-ny, nx])


@dataclass(frozen=True)
class GeometryAngles:
    incident_rad: float
    departure_rad: float
    mode: Mode


def compute_geometry_angles(scene: SceneGeometry, user_index: int) -> GeometryAngles:
    """Signed incidence/departure angles (from the normal) and relay mode.

    The departure frame mirrors the tangent so that both specular
    reflection and straight-through transmission read as departure ==
    incidence.  A point on the surface plane has no defined side and
    raises DegenerateGeometryError.
    """
    center = np.asarray(scene.surface_center)
    normal = np.asarray(scene.surface_normal)
    tangent = scene.tangent
    ap_vec = np.asarray(scene.ap) - center
    user_vec = np.asarray(scene.users[user_index]) - center

    ap_side = float(ap_vec @ normal)
    user_side = float(user_vec @ normal)
    scale = max(np.linalg.norm(ap_vec), np.linalg.norm(user_vec))
    if abs(ap_side) < 1e-12 * scale:
        raise DegenerateGeometryError("access point lies on the surface plane")
    if abs(user_side) < 1e-12 * scale:
        raise DegenerateGeometryError(f"user {user_index} lies on the surface plane")

    n_ap = normal * math.copysign(1.0, ap_side)
    mode: Mode = "lens" if ap_side * user_side < 0 else "mirror"
    incident = math.atan2(float(ap_vec @ tangent), float(ap_vec @ n_ap))
    n_out = n_ap if mode == "mirror" else -n_ap
    departure = math.atan2(float(user_vec @ -tangent), float(user_vec @ n_out))
    return GeometryAngles(incident, departure, mode)


def _orient(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> float:
    return float((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))


def _on_segment(a: np.ndarray, b: np.ndarray, p: np.ndarray) -> bool:
    return (
        min(a[0], b[0]) - 1e-12 <= p[0] <= max(a[0], b[0]) + 1e-12
        and min(a[1], b[1]) - 1e-12 <= p[1] <= max(a[1], b[1]) + 1e-12
    )


def _segments_intersect(a1, a2, b1, b2) -> bool:
    """Closed-segment intersection: touching endpoints count as blocked."""
    d1 = _orient(b1, b2, a1)
    d2 = _orient(b1, b2, a2)
    d3 = _orient(a1, a2, b1)
    d4 = _orient(a1, a2, b2)
    if ((d1 > 0 and d2 < 0) or (d1 < 0 and d2 > 0)) and (
        (d3 > 0 and d4 < 0) or (d3 < 0 and d4 > 0)
    ):
        return True
    if d1 == 0 and _on_segment(b1, b2, a1):
        return True
    if d2 == 0 and _on_segment(b1, b2, a2):
        return True
    if d3 == 0 and _on_segment(a1, a2, b1):
        return True
    if d4 == 0 and _on_segment(a1, a2, b2):
        return True
    return False


@dataclass(frozen=True)
class BlockageResult:
    blocked: bool
    blocker_index: int | None = None


def blockage_check(scene: SceneGeometry, p_from, p_to) -> BlockageResult:
    """First blocker segment crossing the closed segment p_from -> p_to."""
    a1 = _as_point(p_from)
    a2 = _as_point(p_to)
    for i, (b1, b2) in enumerate(scene.blockers):
        if _segments_intersect(a1, a2, np.asarray(b1), np.asarray(b2)):
            return BlockageResult(True, i)
    return BlockageResult(False, None)


def free_space_loss_db(distance_m: float, frequency_hz: float) -> float:
    """Friis free-space loss 20*log10(4*pi*d*f/c); distances under
    MIN_HOP_DISTANCE_M are clamped to keep the budget finite."""
    d = max(distance_m, MIN_HOP_DISTANCE_M)
    return 20.0 * math.log10(4.0 * math.pi * d * frequency_hz / C_LIGHT)


@dataclass(frozen=True)
class LinkEntry:
    """One user's budget entry for one path through the scene."""

    user_index: int
    path: PathType
    mode: Mode | None
    received_dbm: float
    harmonic: int | None
    steer_deg: float | None
    blocker_index: int | None = None


def link_budget(
    scene: SceneGeometry,
    user_index: int,
    efficiency: float,
    harmonic: int,
    carrier_hz: float,
    mod_freq_hz: float,
    pattern_gain: float = 1.0,
) -> LinkEntry:
    """Relay-path budget for one user via the surface.

    The beam spreads over the total AP -> surface -> user length at the
    sideband frequency; the surface contributes its insertion loss
    (-10*log10 of the harmonic efficiency) plus any pattern misalignment
    factor, and blocked hops pay the human-blockage penalty.
    """
    if not 0.0 < efficiency <= 1.0 + 1e-9:
        raise GeometryError(f"efficiency must lie in (0, 1], got {efficiency!r}")
    angles = compute_geometry_angles(scene, user_index)
    ap = np.asarray(scene.ap)
    user = np.asarray(scene.users[user_index])
    center = np.asarray(scene.surface_center)
    d1 = float(np.linalg.norm(ap - center))
    d2 = float(np.linalg.norm(user - center))
    f_rx = carrier_hz + harmonic * mod_freq_hz

    power = scene.tx_power_dbm + scene.ap_gain_dbi + scene.user_gain_dbi
    power -= free_space_loss_db(d1 + d2, f_rx)
    power += 10.0 * math.log10(efficiency * max(pattern_gain, _PATTERN_FLOOR))

    blocked = blockage_check(scene, scene.ap, scene.surface_center)
    if not blocked.blocked:
        blocked = blockage_check(scene, scene.surface_center, scene.users[user_index])
    if blocked.blocked:
        power -= scene.blockage_db
    return LinkEntry(
        user_index,
        "blocked" if blocked.blocked else angles.mode,
        angles.mode,
        power,
        harmonic,
        math.degrees(angles.departure_rad),
        blocked.blocker_index,
    )


def direct_budget(scene: SceneGeometry, user_index: int, carrier_hz: float) -> LinkEntry:
    """Unaided AP -> user budget; through-wall paths pay the wall loss."""
    angles = compute_geometry_angles(scene, user_index)
    ap = np.asarray(scene.ap)
    user = np.asarray(scene.users[user_index])
    power = scene.tx_power_dbm + scene.ap_gain_dbi + scene.user_gain_dbi
    power -= free_space_loss_db(float(np.linalg.norm(user - ap)), carrier_hz)
    if angles.mode == "lens":  # opposite sides of the wall
        power -= scene.wall_atten_db
    blocked = blockage_check(scene, scene.ap, scene.users[user_index])
    if blocked.blocked:
        power -= scene.blockage_db
    return LinkEntry(
        user_index,
        "blocked" if blocked.blocked else "direct",
        None,
        power,
        None,
        None,
        blocked.blocker_index,
    )


@dataclass(frozen=True)
class UserBest:
    user_index: int
    angle_deg: float
    harmonic: int
    received_dbm: float
    mode: Mode


@dataclass(frozen=True)
class BeamSearchResult:
    best: tuple
    pattern_evaluations: int
    split: int


def beam_search(
    scene: SceneGeometry,
    genome: WaveformGenome,
    layout: ArrayLayout,
    model: ElementModel,
    settings: ModulationSettings,
    split: int = 1,
    step_deg: float = DEFAULT_SWEEP_STEP_DEG,
    span_deg: float = DEFAULT_SWEEP_SPAN_DEG,
    sensitivity_dbm: float = DEFAULT_SENSITIVITY_DBM,
) -> BeamSearchResult:
    """Sweep the steered pattern and lock each user to its best angle.

    split=1 scans one beam over the whole range; split=2 scans the -1
    and +1 arms together (the +1 arm mirrors the -1 arm under the shared
    gradient), halving the number of pattern evaluations.  Raises
    SearchFailedError (with the best attempt attached) when no user
    clears the sensitivity threshold.
    """
    if split not in (1, 2):
        raise GeometryError("split must be 1 or 2")
    if step_deg <= 0:
        raise GeometryError("sweep step must be positive")
    total_steps = math.ceil(2.0 * span_deg / step_deg)
    positions = -span_deg + step_deg * np.arange(total_steps)
    if split == 2:
        positions = positions[: math.ceil(total_steps / 2)]

    user_angles = [compute_geometry_angles(scene, i) for i in range(len(scene.users))]
    best: dict[int, UserBest] = {}
    evaluations = 0
    for angle_deg in positions:
        theta = math.radians(float(angle_deg))
        pairs = synthesize_surface(genome, layout, model, primary=(-1, theta))
        spectra = per_element_spectra(
            pairs, model, settings.carrier_hz, settings.max_harmonic, settings.samples_per_period
        )
        evaluations += 1
        arms = [(-1, theta)]
        if split == 2:
            mirror_theta = consequence_angle(+1, -1, theta)
            if mirror_theta is not None:
                arms.append((+1, mirror_theta))
        for harmonic, arm_theta in arms:
            for i, geo in enumerate(user_angles):
                side = "forward" if geo.mode == "lens" else "backward"
                exc = spectra.excitation(harmonic, side)
                gain = abs(array_factor(layout, exc, geo.departure_rad)) ** 2
                entry = link_budget(
                    scene,
                    i,
                    efficiency=1.0,
                    harmonic=harmonic,
                    carrier_hz=settings.carrier_hz,
                    mod_freq_hz=settings.mod_freq_hz,
                    pattern_gain=gain,
                )
                if i not in best or entry.received_dbm > best[i].received_dbm:
                    best[i] = UserBest(
                        i, math.degrees(arm_theta), harmonic, entry.received_dbm, geo.mode
                    )

    result = BeamSearchResult(tuple(best[i] for i in sorted(best)), evaluations, split)
    if all(b.received_dbm < sensitivity_dbm for b in result.best):
        raise SearchFailedError(
            f"no user above {sensitivity_dbm:g} dBm", best_attempt=result
        )
    return result

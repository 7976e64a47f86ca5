"""Network geometry, channel gains, SINR and the sum-rate utility tensor.

Random draw order (part of the reproducibility contract), all from
``numpy.random.default_rng(config.rng_seed)``:

1. user positions, user by user in index order. User ``u`` lives in cell
   ``u % C``; each position is rejection-sampled as pairs of uniforms over
   the hexagon's bounding box until one lands inside the cell.
2. lognormal shadowing in dB, ``standard_normal`` of shape ``(C, U, B)``
   (C-order, i.e. clouds, then users, then BSs), scaled by sigma.
3. Rayleigh power fading, ``standard_exponential`` of shape
   ``(C, U, B, Z)``; skipped entirely when ``fading == "none"``.

Units: powers in mW (linear), distances in meters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from enum import Enum

import numpy as np

SQRT3 = math.sqrt(3.0)


class Fading(str, Enum):
    NONE = "none"
    RAYLEIGH = "rayleigh"


def db_to_linear(db):
    return 10.0 ** (np.asarray(db, dtype=float) / 10.0)


@dataclass(frozen=True)
class NetworkConfig:
    """Dimensions and radio parameters of a multi-cloud network.

    Defaults follow the usual simulation table: hexagonal layout with 500 m
    cell-to-cell distance, -42.60 dBm/Hz transmit PSD, -168.60 dBm/Hz noise
    PSD, 0 dB SINR gap and 10 MHz bandwidth. The log-distance pathloss,
    shadowing and fading parameters are generic stand-ins for SUI-3.
    """

    num_clouds: int
    num_bs_per_cloud: int
    num_pz_per_bs: int
    num_users: int
    cell_distance: float = 500.0
    tx_psd_dbm_hz: float = -42.60
    noise_psd_dbm_hz: float = -168.60
    sinr_gap_db: float = 0.0
    bandwidth_hz: float = 1.0e7
    pathloss_exponent: float = 3.5
    pathloss_ref_db: float = 40.0
    shadowing_sigma_db: float = 8.0
    fading: Fading = Fading.RAYLEIGH
    rng_seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "fading", Fading(self.fading))
        for name in ("num_clouds", "num_bs_per_cloud", "num_pz_per_bs", "num_users"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < 1:
                raise ValueError(f"{name} must be a positive integer, got {value!r}")
        if not self.bandwidth_hz > 0:
            raise ValueError("bandwidth_hz must be > 0")
        if not self.cell_distance > 0:
            raise ValueError("cell_distance must be > 0")
        if not self.pathloss_exponent >= 2:
            raise ValueError("pathloss_exponent must be >= 2")
        if not self.shadowing_sigma_db >= 0:
            raise ValueError("shadowing_sigma_db must be >= 0")
        if not 0 <= int(self.rng_seed) < 2**64:
            raise ValueError("rng_seed must fit in 64 unsigned bits")

    @property
    def shape(self) -> tuple[int, int, int, int]:
        """``(C, U, B, Z)``, the axis order of gain and utility tensors."""
        return (self.num_clouds, self.num_users, self.num_bs_per_cloud, self.num_pz_per_bs)

    @property
    def z_tot(self) -> int:
        return self.num_clouds * self.num_bs_per_cloud * self.num_pz_per_bs

    def replace(self, **changes) -> NetworkConfig:
        values = {f.name: getattr(self, f.name) for f in fields(self)}
        values.update(changes)
        return NetworkConfig(**values)


@dataclass(frozen=True, eq=False)
class NetworkInstance:
    config: NetworkConfig
    bs_positions: np.ndarray  # (C, B, 2)
    user_positions: np.ndarray  # (U, 2)
    power: np.ndarray  # (C, B, Z) mW
    noise_power: float  # mW
    sinr_gap: float  # linear
    channel_gain: np.ndarray  # (C, U, B, Z) power gain |h|^2

    def __post_init__(self):
        for arr in (self.bs_positions, self.user_positions, self.power, self.channel_gain):
            arr.setflags(write=False)

    def __eq__(self, other):
        if not isinstance(other, NetworkInstance):
            return NotImplemented
        return (
            self.config == other.config
            and self.noise_power == other.noise_power
            and self.sinr_gap == other.sinr_gap
            and all(
                np.array_equal(getattr(self, name), getattr(other, name))
                for name in ("bs_positions", "user_positions", "power", "channel_gain")
            )
        )


@dataclass(frozen=True, eq=False)
class UtilityTensor:
    value: np.ndarray  # (C, U, B, Z)

    def __post_init__(self):
        self.value.setflags(write=False)

    @property
    def shape(self):
        return self.value.shape


def hex_cell_centers(n: int, distance: float) -> np.ndarray:
    """Centers of the first ``n`` cells of a hexagonal grid, spiralling out
    ring by ring from the origin. Neighbouring centers are ``distance`` apart."""
    directions = [(1, 0), (1, -1), (0, -1), (-1, 0), (-1, 1), (0, 1)]
    axial = [(0, 0)]
    ring = 1
    while len(axial) < n:
        q, r = -ring, ring  # start at direction 4 scaled by ring
        for dq, dr in directions:
            for _ in range(ring):
                axial.append((q, r))
                q, r = q + dq, r + dr
        ring += 1
    axial = np.array(axial[:n], dtype=float)
    x = distance * (axial[:, 0] + axial[:, 1] / 2.0)
    y = distance * (SQRT3 / 2.0) * axial[:, 1]
    return np.stack([x, y], axis=1)


def bs_layout(num_clouds: int, num_bs: int, distance: float) -> np.ndarray:
    """BS coordinates ``(C, B, 2)``: ``num_bs`` sites evenly spaced on a circle
    of radius ``distance / 4`` around each cell center."""
    centers = hex_cell_centers(num_clouds, distance)
    angles = 2.0 * np.pi * np.arange(num_bs) / num_bs
    offsets = (distance / 4.0) * np.stack([np.cos(angles), np.sin(angles)], axis=1)
    return centers[:, None, :] + offsets[None, :, :]


def _in_hexagon(dx: float, dy: float, distance: float) -> bool:
    half = distance / 2.0
    for nx, ny in ((1.0, 0.0), (0.5, SQRT3 / 2.0), (-0.5, SQRT3 / 2.0)):
        if abs(dx * nx + dy * ny) > half:
            return False
    return True


def _draw_users(rng: np.random.Generator, config: NetworkConfig) -> np.ndarray:
    d = config.cell_distance
    centers = hex_cell_centers(config.num_clouds, d)
    circumradius = d / SQRT3
    pos = np.empty((config.num_users, 2))
    for u in range(config.num_users):
        while True:
            dx, dy = rng.uniform(-d / 2.0, d / 2.0), rng.uniform(-circumradius, circumradius)
            if _in_hexagon(dx, dy, d):
                break
        pos[u] = centers[u % config.num_clouds] + (dx, dy)
    return pos


def pathloss_db(distance, config: NetworkConfig):
    """Log-distance pathloss, referenced to 1 m; distances under 1 m clamp to 1 m."""
    d = np.maximum(np.asarray(distance, dtype=float), 1.0)
    return config.pathloss_ref_db + 10.0 * config.pathloss_exponent * np.log10(d)


def instance_from_positions(
    config: NetworkConfig,
    user_positions: np.ndarray,
    rng: np.random.Generator | None = None,
    bs_positions: np.ndarray | None = None,
) -> NetworkInstance:
    """Build an instance for given user positions.

    ``rng`` supplies shadowing and fading (steps 2 and 3 of the draw order);
    it may be omitted only when both are switched off.
    """
    C, U, B, Z = config.shape
    user_positions = np.array(user_positions, dtype=float).reshape(U, 2)
    if bs_positions is None:
        bs_positions = bs_layout(C, B, config.cell_distance)
    bs_positions = np.array(bs_positions, dtype=float).reshape(C, B, 2)

    # distance[c, u, b]
    delta = user_positions[None, :, None, :] - bs_positions[:, None, :, :]
    distance = np.hypot(delta[..., 0], delta[..., 1])
    loss_db = pathloss_db(distance, config)

    need_rng = config.shadowing_sigma_db > 0 or config.fading is Fading.RAYLEIGH
    if need_rng and rng is None:
        raise ValueError("an rng is required when shadowing or fading is enabled")
    if config.shadowing_sigma_db > 0:
        loss_db = loss_db + config.shadowing_sigma_db * rng.standard_normal((C, U, B))
    gain = np.broadcast_to(db_to_linear(-loss_db)[..., None], (C, U, B, Z))
    if config.fading is Fading.RAYLEIGH:
        gain = gain * rng.standard_exponential((C, U, B, Z))
    gain = np.ascontiguousarray(gain, dtype=float)

    pz_power = float(db_to_linear(config.tx_psd_dbm_hz)) * config.bandwidth_hz / Z
    return NetworkInstance(
        config=config,
        bs_positions=bs_positions,
        user_positions=user_positions,
        power=np.full((C, B, Z), pz_power),
        noise_power=float(db_to_linear(config.noise_psd_dbm_hz)) * config.bandwidth_hz,
        sinr_gap=float(db_to_linear(config.sinr_gap_db)),
        channel_gain=gain,
    )


def generate_instance(config: NetworkConfig) -> NetworkInstance:
    """Draw a reproducible network instance from ``config.rng_seed``."""
    rng = np.random.default_rng(int(config.rng_seed))
    users = _draw_users(rng, config)
    return instance_from_positions(config, users, rng)


def _check_index(inst: NetworkInstance, c, u, b, z):
    C, U, B, Z = inst.config.shape
    for name, idx, size in (("c", c, C), ("u", u, U), ("b", b, B), ("z", z, Z)):
        if not 0 <= idx < size:
            raise IndexError(f"{name}={idx} out of range [0, {size})")


def sinr(inst: NetworkInstance, c: int, u: int, b: int, z: int) -> float:
    """SINR of user ``u`` on PZ ``z`` of BS ``(c, b)``.

    Interference sums every other BS in the network on the same PZ index.
    """
    _check_index(inst, c, u, b, z)
    C, _, B, _ = inst.config.shape
    p, g = inst.power, inst.channel_gain
    interference = 0.0
    for c2 in range(C):
        for b2 in range(B):
            if (c2, b2) != (c, b):
                interference += p[c2, b2, z] * g[c2, u, b2, z]
    signal = p[c, b, z] * g[c, u, b, z]
    return float(signal / (inst.sinr_gap * (inst.noise_power + interference)))


def sinr_tensor(inst: NetworkInstance) -> np.ndarray:
    """Vectorized :func:`sinr` over every association, shape ``(C, U, B, Z)``."""
    C, U, B, Z = inst.config.shape
    rx = inst.power[:, None, :, :] * inst.channel_gain  # (C, U, B, Z)
    rx_flat = rx.transpose(0, 2, 1, 3).reshape(C * B, U, Z)
    others = 1.0 - np.eye(C * B)
    # explicit exclusion keeps precision when the serving link dominates
    interference = np.einsum("kj,juz->kuz", others, rx_flat)
    interference = interference.reshape(C, B, U, Z).transpose(0, 2, 1, 3)
    return rx / (inst.sinr_gap * (inst.noise_power + interference))


def rate_from_sinr(s):
    """Sum-rate utility ``log2(1 + SINR)`` in bits/s/Hz."""
    return np.log1p(s) / math.log(2.0)


def utility_tensor(inst: NetworkInstance) -> UtilityTensor:
    return UtilityTensor(np.ascontiguousarray(rate_from_sinr(sinr_tensor(inst))))

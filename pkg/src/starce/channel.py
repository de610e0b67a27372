"""System geometry, path loss, and Rician fading for the two-user uplink.

One user sits on each side of the surface (the transmission side "t" and
the reflection side "r"). Channels are drawn at sub-surface granularity:
every link vector has one entry per sub-surface, and the cascaded vector is
the elementwise product of the user-to-surface and surface-to-BS links.
"""

from dataclasses import dataclass

import numpy as np

__all__ = [
    "SystemConfig",
    "ChannelRealization",
    "path_loss",
    "rician_vector",
    "generate_realization",
    "composite_vector",
    "mean_composite_power",
]


@dataclass(frozen=True)
class SystemConfig:
    """Static system parameters, all in linear units (watts, meters).

    The defaults are the reference operating point used throughout the
    tests: 80 elements grouped into 20 sub-surfaces, 1 W transmit power,
    1e-14 W noise power, Rician factor 10, and the usual node geometry.
    Decibel conversions belong to the config file parser, not here.
    """

    num_elements: int = 80
    num_subsurfaces: int = 20
    power_w: float = 1.0
    noise_power_w: float = 1e-14
    rician_k: float = 10.0
    ref_pathloss: float = 1e-3
    ref_distance_m: float = 1.0
    bs_pos_m: tuple[float, float] = (0.0, 0.0)
    ris_pos_m: tuple[float, float] = (50.0, 0.0)
    t_user_pos_m: tuple[float, float] = (54.0, 3.0)
    r_user_pos_m: tuple[float, float] = (46.0, -3.0)
    exponent_user_bs: float = 3.5
    exponent_user_ris: float = 2.8
    exponent_bs_ris: float = 2.2

    def __post_init__(self):
        if self.num_subsurfaces < 1:
            raise ValueError("num_subsurfaces must be at least 1")
        if self.num_elements % self.num_subsurfaces != 0:
            raise ValueError(
                f"num_subsurfaces ({self.num_subsurfaces}) must divide "
                f"num_elements ({self.num_elements})"
            )
        if self.power_w <= 0:
            raise ValueError("power_w must be positive")
        # Zero noise is allowed: it is the noiseless debugging case.
        if self.noise_power_w < 0:
            raise ValueError("noise_power_w must be nonnegative")
        if self.rician_k < 0:
            raise ValueError("rician_k must be nonnegative")
        if self.ref_pathloss <= 0:
            raise ValueError("ref_pathloss must be positive")
        if self.ref_distance_m <= 0:
            raise ValueError("ref_distance_m must be positive")
        for name in ("exponent_user_bs", "exponent_user_ris", "exponent_bs_ris"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True, eq=False)
class ChannelRealization:
    """One independent draw of all five links.

    ``cascaded_*`` holds the elementwise product of the surface-to-BS link
    with the respective user-to-surface link; it is computed once at
    construction so both protocols estimate the same ground truth.
    """

    direct_t: complex
    direct_r: complex
    user_ris_t: np.ndarray
    user_ris_r: np.ndarray
    ris_bs: np.ndarray
    cascaded_t: np.ndarray
    cascaded_r: np.ndarray

    @classmethod
    def from_links(cls, direct_t, direct_r, user_ris_t, user_ris_r, ris_bs):
        """Build a realization, deriving the cascaded vectors."""
        user_ris_t = np.asarray(user_ris_t, dtype=np.complex128)
        user_ris_r = np.asarray(user_ris_r, dtype=np.complex128)
        ris_bs = np.asarray(ris_bs, dtype=np.complex128)
        if not (user_ris_t.shape == user_ris_r.shape == ris_bs.shape):
            raise ValueError("link vectors must share one length")
        return cls(
            direct_t=complex(direct_t),
            direct_r=complex(direct_r),
            user_ris_t=user_ris_t,
            user_ris_r=user_ris_r,
            ris_bs=ris_bs,
            cascaded_t=ris_bs * user_ris_t,
            cascaded_r=ris_bs * user_ris_r,
        )

    @property
    def num_subsurfaces(self):
        return self.ris_bs.shape[0]


def path_loss(distance_m, exponent, cfg):
    """Power-law channel gain at a given distance.

    Returns ``cfg.ref_pathloss * (d / d0) ** (-exponent)``; the reference
    gain applies at distance ``cfg.ref_distance_m``. Nonpositive distances
    are outside the model.
    """
    if distance_m <= 0:
        raise ValueError(f"distance must be positive, got {distance_m}")
    return cfg.ref_pathloss * (distance_m / cfg.ref_distance_m) ** (-exponent)


def rician_vector(dim, k_factor, gain, rng):
    """Draw a Rician fading vector with mean power ``gain`` per entry.

    The deterministic-path component carries a uniform random phase per
    entry; the scattered component is circularly symmetric complex
    Gaussian. Consumes the generator in a fixed order (phases, then real
    scatter, then imaginary scatter), which reproducibility relies on.
    """
    if k_factor < 0:
        raise ValueError("k_factor must be nonnegative")
    if gain < 0:
        raise ValueError("gain must be nonnegative")
    phase = rng.uniform(0.0, 2.0 * np.pi, dim)
    scatter = (rng.standard_normal(dim) + 1j * rng.standard_normal(dim)) / np.sqrt(2.0)
    los = np.sqrt(k_factor / (k_factor + 1.0)) * np.exp(1j * phase)
    nlos = np.sqrt(1.0 / (k_factor + 1.0)) * scatter
    return np.sqrt(gain) * (los + nlos)


def _distance(a, b):
    return float(np.hypot(a[0] - b[0], a[1] - b[1]))


def _link_gains(cfg):
    """Mean power of each link at the configured geometry."""
    return {
        "direct_t": path_loss(_distance(cfg.t_user_pos_m, cfg.bs_pos_m), cfg.exponent_user_bs, cfg),
        "direct_r": path_loss(_distance(cfg.r_user_pos_m, cfg.bs_pos_m), cfg.exponent_user_bs, cfg),
        "user_ris_t": path_loss(_distance(cfg.t_user_pos_m, cfg.ris_pos_m), cfg.exponent_user_ris, cfg),
        "user_ris_r": path_loss(_distance(cfg.r_user_pos_m, cfg.ris_pos_m), cfg.exponent_user_ris, cfg),
        "ris_bs": path_loss(_distance(cfg.ris_pos_m, cfg.bs_pos_m), cfg.exponent_bs_ris, cfg),
    }


def generate_realization(cfg, rng):
    """Draw one independent channel realization.

    Draw order is fixed (direct t, direct r, user-surface t, user-surface
    r, surface-BS) so that a given generator state always yields the same
    realization.
    """
    gains = _link_gains(cfg)
    m = cfg.num_subsurfaces
    k = cfg.rician_k
    direct_t = rician_vector(1, k, gains["direct_t"], rng)[0]
    direct_r = rician_vector(1, k, gains["direct_r"], rng)[0]
    user_ris_t = rician_vector(m, k, gains["user_ris_t"], rng)
    user_ris_r = rician_vector(m, k, gains["user_ris_r"], rng)
    ris_bs = rician_vector(m, k, gains["ris_bs"], rng)
    return ChannelRealization.from_links(direct_t, direct_r, user_ris_t, user_ris_r, ris_bs)


def composite_vector(realization, protocol):
    """Stack direct and cascaded coefficients in estimation order.

    ``"ts-t"`` / ``"ts-r"`` give one user's block ``[direct, cascaded]``
    (length M+1); ``"es"`` concatenates the t-user block then the r-user
    block (length 2M+2). Every estimator in the package emits this layout.
    """
    if protocol == "ts-t":
        return np.concatenate(([realization.direct_t], realization.cascaded_t))
    if protocol == "ts-r":
        return np.concatenate(([realization.direct_r], realization.cascaded_r))
    if protocol == "es":
        return np.concatenate(
            (
                [realization.direct_t],
                realization.cascaded_t,
                [realization.direct_r],
                realization.cascaded_r,
            )
        )
    raise ValueError(f"unknown protocol {protocol!r}")


def mean_composite_power(cfg):
    """Closed-form mean squared norm of the stacked truth vector.

    Returns ``(total, t_user, r_user)``. Each cascaded coefficient has mean
    power equal to the product of its two link gains, since the links are
    independent with unit-power fading.
    """
    gains = _link_gains(cfg)
    m = cfg.num_subsurfaces
    t_user = gains["direct_t"] + m * gains["user_ris_t"] * gains["ris_bs"]
    r_user = gains["direct_r"] + m * gains["user_ris_r"] * gains["ris_bs"]
    return t_user + r_user, t_user, r_user

"""Reception simulation, least-squares estimators, and closed-form errors.

All estimators emit the stacked coefficient layout of
``composite_vector(real, "es")``: t-user direct, t-user cascaded, r-user
direct, r-user cascaded. The squared estimation error of that stack, summed
over both users, is what the closed forms below predict.
"""

from dataclasses import dataclass

import numpy as np

from .channel import composite_vector
from .matrixkit import SingularMatrixError, numerical_rank, pseudo_inverse, trace_inverse_gram
from .training import (
    EsDesign,
    OnOffSchedule,
    TsDesign,
    TwoPhaseDesign,
    assemble_observation_matrix,
    cascaded_observation_columns,
)

__all__ = [
    "EstimationReport",
    "simulate_reception",
    "ls_estimate",
    "onoff_estimate",
    "two_phase_estimate",
    "theoretical_mse",
    "theoretical_mse_split",
    "es_mse_lower_bound",
]


@dataclass(frozen=True, eq=False)
class EstimationReport:
    """Outcome of one scheme over one or more Monte Carlo trials.

    ``squared_errors`` holds one summed squared error per trial;
    ``estimate`` and ``truth`` are kept from the final trial for
    inspection. ``theoretical_mse`` is NaN when no closed form is wired up
    for the scheme.
    """

    scheme: str
    estimate: np.ndarray
    truth: np.ndarray
    squared_errors: np.ndarray
    empirical_mse: float
    empirical_nmse: float
    theoretical_mse: float

    @property
    def trials(self):
        return int(self.squared_errors.shape[0])

    @property
    def stderr_mse(self):
        """Standard error of the empirical MSE (0.0 for a single trial)."""
        n = self.trials
        if n < 2:
            return 0.0
        return float(np.std(self.squared_errors, ddof=1) / np.sqrt(n))


def _noise(dim, noise_power_w, rng):
    z = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return np.sqrt(noise_power_w / 2.0) * z


def _onoff_period_matrix(schedule, mode):
    """Observation matrix of one ON/OFF user period: rows [1, e_active]."""
    m = schedule.num_subsurfaces
    start = 0 if mode == "t" else m + 1
    period = schedule.slots[start : start + m + 1]
    mat = np.zeros((m + 1, m + 1), dtype=np.complex128)
    for i, (slot_mode, index) in enumerate(period):
        mat[i, 0] = 1.0
        if slot_mode != "off":
            mat[i, 1 + index] = 1.0
        mat[i, :] *= schedule.pilots[start + i]
    return mat


def simulate_reception(design, realization, power_w, noise_power_w, rng):
    """Received pilot samples for one realization of one design.

    TS designs return both user periods stacked (t period first); the ES
    design returns its single simultaneous window; the two-phase design
    returns phase one followed by phase two. Noise is drawn after the
    signal is formed, in slot order, so zero noise power gives the exact
    noiseless product.
    """
    sp = np.sqrt(power_w)
    if isinstance(design, TsDesign):
        theta = assemble_observation_matrix(design)
        x_t = composite_vector(realization, "ts-t")
        x_r = composite_vector(realization, "ts-r")
        n = theta.shape[0]
        y_t = sp * (theta @ x_t) + _noise(n, noise_power_w, rng)
        y_r = sp * (theta @ x_r) + _noise(n, noise_power_w, rng)
        return np.concatenate((y_t, y_r))
    if isinstance(design, EsDesign):
        v = assemble_observation_matrix(design)
        x = composite_vector(realization, "es")
        return np.sqrt(power_w / 2.0) * (v @ x) + _noise(v.shape[0], noise_power_w, rng)
    if isinstance(design, OnOffSchedule):
        x_t = composite_vector(realization, "ts-t")
        x_r = composite_vector(realization, "ts-r")
        b_t = _onoff_period_matrix(design, "t")
        b_r = _onoff_period_matrix(design, "r")
        n = b_t.shape[0]
        y_t = sp * (b_t @ x_t) + _noise(n, noise_power_w, rng)
        y_r = sp * (b_r @ x_r) + _noise(n, noise_power_w, rng)
        return np.concatenate((y_t, y_r))
    if isinstance(design, TwoPhaseDesign):
        direct = np.array([realization.direct_t, realization.direct_r])
        x = composite_vector(realization, "es")
        v_full = assemble_observation_matrix(design.cascade)
        amp = np.sqrt(power_w / 2.0)
        y_direct = amp * (design.direct_pilots @ direct) + _noise(2, noise_power_w, rng)
        y_cascade = amp * (v_full @ x) + _noise(v_full.shape[0], noise_power_w, rng)
        return np.concatenate((y_direct, y_cascade))
    raise TypeError(f"cannot simulate a {type(design).__name__}")


def ls_estimate(received, design, power_w, *, pinv_matrix=None):
    """Least-squares estimate of the stacked coefficients.

    For a TS design ``received`` is both periods stacked and each period is
    solved with the same pattern at scaling 1/sqrt(p); for an ES design the
    scaling is sqrt(2/p). ``pinv_matrix`` optionally supplies the
    precomputed pseudo-inverse of the assembled observation matrix for use
    in tight loops.
    """
    received = np.asarray(received, dtype=np.complex128)
    if isinstance(design, TsDesign):
        pin = pseudo_inverse(assemble_observation_matrix(design)) if pinv_matrix is None else pinv_matrix
        n = design.slots_per_period
        if received.shape != (2 * n,):
            raise ValueError(f"expected {2 * n} stacked samples, got {received.shape}")
        scale = 1.0 / np.sqrt(power_w)
        return np.concatenate((scale * (pin @ received[:n]), scale * (pin @ received[n:])))
    if isinstance(design, EsDesign):
        pin = pseudo_inverse(assemble_observation_matrix(design)) if pinv_matrix is None else pinv_matrix
        if received.shape != (design.total_slots,):
            raise ValueError(f"expected {design.total_slots} samples, got {received.shape}")
        return np.sqrt(2.0 / power_w) * (pin @ received)
    raise TypeError(f"no least-squares path for a {type(design).__name__}")


def onoff_estimate(received, schedule, power_w):
    """Difference-form estimates from one-at-a-time activations.

    The all-off slot gives the direct link; each activation slot minus the
    all-off slot gives one cascaded coefficient. This coincides with the
    exact LS solution because the activation pattern is square and
    invertible.
    """
    received = np.asarray(received, dtype=np.complex128)
    m = schedule.num_subsurfaces
    n = m + 1
    if received.shape != (2 * n,):
        raise ValueError(f"expected {2 * n} stacked samples, got {received.shape}")
    sp = np.sqrt(power_w)
    out = np.empty(2 * n, dtype=np.complex128)
    for half in range(2):
        y = received[half * n : (half + 1) * n]
        direct = y[0] / sp
        out[half * n] = direct
        out[half * n + 1 : (half + 1) * n] = y[1:] / sp - direct
    return out


def two_phase_estimate(received_direct, received_cascade, design, power_w, *,
                       direct_pinv=None, cascade_pinv=None):
    """Two-stage estimate: direct links first, cascaded links after removal.

    Phase one solves the 2x2 pilot system. Phase two subtracts the
    estimated direct-link contribution from the second window and solves
    for the cascaded coefficients alone, so phase-one errors propagate into
    phase two.
    """
    received_direct = np.asarray(received_direct, dtype=np.complex128)
    received_cascade = np.asarray(received_cascade, dtype=np.complex128)
    cas = design.cascade
    m = cas.num_subsurfaces
    if received_direct.shape != (2,):
        raise ValueError("phase one delivers two samples")
    if received_cascade.shape != (cas.total_slots,):
        raise ValueError(f"phase two delivers {cas.total_slots} samples")
    s_pin = pseudo_inverse(design.direct_pilots) if direct_pinv is None else direct_pinv
    c_pin = (
        pseudo_inverse(cascaded_observation_columns(cas))
        if cascade_pinv is None
        else cascade_pinv
    )
    scale = np.sqrt(2.0 / power_w)
    amp = np.sqrt(power_w / 2.0)
    direct_hat = scale * (s_pin @ received_direct)
    resid = received_cascade - amp * (
        direct_hat[0] * cas.pilots_t + direct_hat[1] * cas.pilots_r
    )
    cascaded_hat = scale * (c_pin @ resid)
    return np.concatenate(
        ([direct_hat[0]], cascaded_hat[:m], [direct_hat[1]], cascaded_hat[m:])
    )


def theoretical_mse(scheme, num_subsurfaces, power_w, noise_power_w, design=None):
    """Closed-form sum MSE of the least-squares estimate.

    ``"ts"``: two orthogonal square periods give 2 sigma^2 / p.
    ``"es-ideal"``: the orthogonal splitting design gives
    (4M+2)/(M+1) sigma^2 / p.
    ``"pattern-general"``: trace form for any supplied design; the factor
    2 sigma^2 / p covers both cases (two periods under TS, half power
    under ES).
    """
    if power_w <= 0:
        raise ValueError("power must be positive")
    if noise_power_w < 0:
        raise ValueError("noise power must be nonnegative")
    if scheme == "ts":
        return 2.0 * noise_power_w / power_w
    if scheme == "es-ideal":
        m = num_subsurfaces
        if m < 1:
            raise ValueError("need at least one sub-surface")
        return (4.0 * m + 2.0) / (m + 1.0) * noise_power_w / power_w
    if scheme == "pattern-general":
        if design is None:
            raise ValueError("pattern-general needs the design")
        mat = assemble_observation_matrix(design)
        return 2.0 * (noise_power_w / power_w) * trace_inverse_gram(mat)
    raise ValueError(f"unknown scheme {scheme!r}")


def theoretical_mse_split(design, power_w, noise_power_w):
    """Per-user portions of the trace-form MSE of an ES design.

    Returns ``(total, t_user, r_user)``: the diagonal of the inverse gram
    split at the user boundary, scaled by 2 sigma^2 / p.
    """
    if not isinstance(design, EsDesign):
        raise TypeError("per-user split applies to ES designs")
    v = assemble_observation_matrix(design)
    if numerical_rank(v) < v.shape[1]:
        raise SingularMatrixError("gram matrix is singular")
    inv_diag = np.diag(np.linalg.inv(v.conj().T @ v)).real
    m = design.num_subsurfaces
    factor = 2.0 * noise_power_w / power_w
    t_part = factor * float(np.sum(inv_diag[: m + 1]))
    r_part = factor * float(np.sum(inv_diag[m + 1 :]))
    return t_part + r_part, t_part, r_part


def es_mse_lower_bound(split_t, split_r, total_slots, power_w, noise_power_w):
    """Smallest sum MSE any unit-modulus ES design can reach.

    Evaluates ``(2 sigma^2 / p) * (sum_m (1/split_t_m + 1/split_r_m) / tau
    + 2 / tau)``; any vanishing split makes a coefficient unobservable.
    """
    st = np.asarray(split_t, dtype=np.float64)
    sr = np.asarray(split_r, dtype=np.float64)
    if st.shape != sr.shape or st.ndim != 1 or st.size < 1:
        raise ValueError("splits must be two equal-length vectors")
    if np.any(st <= 0) or np.any(sr <= 0):
        raise ValueError("splitting ratios must be positive")
    if total_slots < 1:
        raise ValueError("total_slots must be positive")
    if power_w <= 0:
        raise ValueError("power must be positive")
    tau = float(total_slots)
    ratio_sum = float(np.sum(1.0 / st + 1.0 / sr))
    return 2.0 * noise_power_w / power_w * (ratio_sum / tau + 2.0 / tau)

"""Monte Carlo NMSE experiments with reproducible per-trial random streams.

Every unit of work draws its randomness from a stream derived from the
master seed and a structural key (grid point, scheme ordinal, trial index),
never from shared mutable state. Aggregation stores one value per trial
index before reducing, so results do not depend on execution order and a
sweep rerun with the same seed reproduces its CSV byte for byte.
"""

import math
from dataclasses import dataclass, replace

import numpy as np

from .channel import composite_vector, generate_realization
from .estimation import (
    EstimationReport,
    ls_estimate,
    onoff_estimate,
    simulate_reception,
    theoretical_mse,
    theoretical_mse_split,
    two_phase_estimate,
)
from .matrixkit import pseudo_inverse
from .training import (
    EsDesign,
    TwoPhaseDesign,
    assemble_observation_matrix,
    cascaded_observation_columns,
    es_coupled_design,
    es_ideal_design,
    onoff_schedule,
    ts_pattern,
    two_phase_design,
)

__all__ = [
    "SCHEMES",
    "ALL_SCHEMES",
    "SweepRow",
    "SweepResult",
    "trial_generator",
    "run_trials",
    "scheme_theory_mse",
    "sweep_beta",
    "sweep_power",
    "sweep_subsurfaces",
    "dbm_to_watts",
]

SCHEMES = ("ts", "es-ideal", "es-coupled", "onoff", "two-phase")
# Opt-in variants; the coupled Hadamard one exists to exercise the
# infeasible-design path.
ALL_SCHEMES = SCHEMES + ("es-ideal-hadamard", "es-coupled-hadamard")

CSV_HEADER = "sweep_var,value,scheme,nmse,mse,theory_mse,trials,stderr,seed"


def dbm_to_watts(value_dbm):
    return 10.0 ** ((value_dbm - 30.0) / 10.0)


def trial_generator(seed, *key):
    """Independent random stream for one unit of work under a master seed."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=tuple(key)))


def _scheme_ordinal(scheme):
    try:
        return ALL_SCHEMES.index(scheme)
    except ValueError:
        raise ValueError(f"unknown scheme {scheme!r}, expected one of {ALL_SCHEMES}") from None


class _Bundle:
    """A scheme's design plus the factorizations reused across trials."""

    def __init__(self, scheme, cfg, split_t=None):
        self.scheme = scheme
        m = cfg.num_subsurfaces
        base = "hadamard" if scheme.endswith("-hadamard") else "dft"
        kind = scheme.removesuffix("-hadamard")
        self.pinv = None
        self.direct_pinv = None
        self.cascade_pinv = None
        if kind == "ts":
            self.design = ts_pattern(m)
            self.pinv = pseudo_inverse(assemble_observation_matrix(self.design))
        elif kind in ("es-ideal", "es-coupled"):
            if kind == "es-ideal":
                design = es_ideal_design(m, base)
            else:
                design = es_coupled_design(m, base)
            if split_t is not None:
                design = replace(
                    design,
                    split_t=np.full(m, split_t),
                    split_r=np.full(m, 1.0 - split_t),
                )
            self.design = design
            self.pinv = pseudo_inverse(assemble_observation_matrix(design))
        elif kind == "onoff":
            self.design = onoff_schedule(m)
        elif kind == "two-phase":
            self.design = two_phase_design(m)
            self.direct_pinv = pseudo_inverse(self.design.direct_pilots)
            self.cascade_pinv = pseudo_inverse(
                cascaded_observation_columns(self.design.cascade)
            )
        else:
            raise ValueError(f"unknown scheme {scheme!r}, expected one of {ALL_SCHEMES}")

    def estimate(self, received, cfg):
        if isinstance(self.design, TwoPhaseDesign):
            return two_phase_estimate(
                received[:2],
                received[2:],
                self.design,
                cfg.power_w,
                direct_pinv=self.direct_pinv,
                cascade_pinv=self.cascade_pinv,
            )
        if self.scheme == "onoff":
            return onoff_estimate(received, self.design, cfg.power_w)
        return ls_estimate(received, self.design, cfg.power_w, pinv_matrix=self.pinv)


@dataclass(frozen=True, eq=False)
class _TrialData:
    """Per-trial arrays of one Monte Carlo run, indexed by trial number."""

    scheme: str
    se: np.ndarray
    se_t: np.ndarray
    se_r: np.ndarray
    power: np.ndarray
    power_t: np.ndarray
    power_r: np.ndarray
    last_estimate: np.ndarray
    last_truth: np.ndarray

    @property
    def trials(self):
        return int(self.se.shape[0])

    def mse(self, part="total"):
        arr = {"total": self.se, "t": self.se_t, "r": self.se_r}[part]
        return float(np.mean(arr))

    def stderr(self, part="total"):
        arr = {"total": self.se, "t": self.se_t, "r": self.se_r}[part]
        n = arr.shape[0]
        if n < 2:
            return 0.0
        return float(np.std(arr, ddof=1) / math.sqrt(n))

    def nmse(self, part="total", normalizer="matched"):
        """Empirical NMSE; ``normalizer="joint"`` divides a per-user error
        by the total truth power instead of that user's own."""
        num = {"total": self.se, "t": self.se_t, "r": self.se_r}[part]
        if normalizer == "joint":
            den = self.power
        else:
            den = {"total": self.power, "t": self.power_t, "r": self.power_r}[part]
        return float(np.mean(num) / np.mean(den))

    def nmse_stderr(self, part="total", normalizer="matched"):
        num = {"total": self.se, "t": self.se_t, "r": self.se_r}[part]
        if normalizer == "joint":
            den = self.power
        else:
            den = {"total": self.power, "t": self.power_t, "r": self.power_r}[part]
        n = num.shape[0]
        if n < 2:
            return 0.0
        return float(np.std(num, ddof=1) / math.sqrt(n) / np.mean(den))


def _collect(bundle, cfg, trials, seed, key_prefix=(), order=None):
    """Run trials in any order, filling per-trial slots by index."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    m = cfg.num_subsurfaces
    split = m + 1
    se = np.empty(trials)
    se_t = np.empty(trials)
    se_r = np.empty(trials)
    power = np.empty(trials)
    power_t = np.empty(trials)
    power_r = np.empty(trials)
    last_estimate = last_truth = None
    for t in range(trials) if order is None else order:
        rng = trial_generator(seed, *key_prefix, t)
        real = generate_realization(cfg, rng)
        received = simulate_reception(
            bundle.design, real, cfg.power_w, cfg.noise_power_w, rng
        )
        estimate = bundle.estimate(received, cfg)
        truth = composite_vector(real, "es")
        err = np.abs(estimate - truth) ** 2
        pw = np.abs(truth) ** 2
        se_t[t] = np.sum(err[:split])
        se_r[t] = np.sum(err[split:])
        se[t] = se_t[t] + se_r[t]
        power_t[t] = np.sum(pw[:split])
        power_r[t] = np.sum(pw[split:])
        power[t] = power_t[t] + power_r[t]
        if t == trials - 1:
            last_estimate, last_truth = estimate, truth
    return _TrialData(
        bundle.scheme, se, se_t, se_r, power, power_t, power_r, last_estimate, last_truth
    )


def scheme_theory_mse(scheme, cfg, design=None):
    """Closed-form sum MSE for a scheme id, NaN where none is wired up.

    The two benchmarks carry their own forms: the activation benchmark sums
    to (4M+2) sigma^2/p, and the two-phase benchmark to 10 sigma^2/p
    (2 direct + 4 cascaded-noise + 4 propagated-error parts, the latter
    concentrated on the first cascaded coefficient whose pattern column is
    all ones).
    """
    m = cfg.num_subsurfaces
    kind = scheme.removesuffix("-hadamard")
    if kind == "ts":
        return theoretical_mse("ts", m, cfg.power_w, cfg.noise_power_w)
    if kind == "es-ideal":
        return theoretical_mse("es-ideal", m, cfg.power_w, cfg.noise_power_w)
    if kind == "es-coupled":
        if design is None:
            design = es_coupled_design(m, "hadamard" if scheme.endswith("-hadamard") else "dft")
        return theoretical_mse(
            "pattern-general", m, cfg.power_w, cfg.noise_power_w, design=design
        )
    if kind == "onoff":
        return (4.0 * m + 2.0) * cfg.noise_power_w / cfg.power_w
    if kind == "two-phase":
        return 10.0 * cfg.noise_power_w / cfg.power_w
    raise ValueError(f"unknown scheme {scheme!r}, expected one of {ALL_SCHEMES}")


def run_trials(scheme, cfg, trials, seed):
    """Monte Carlo aggregate for one scheme at one operating point."""
    bundle = _Bundle(scheme, cfg)
    data = _collect(bundle, cfg, trials, seed, key_prefix=(_scheme_ordinal(scheme),))
    theory = scheme_theory_mse(
        scheme, cfg, design=bundle.design if isinstance(bundle.design, EsDesign) else None
    )
    return EstimationReport(
        scheme=scheme,
        estimate=data.last_estimate,
        truth=data.last_truth,
        squared_errors=data.se,
        empirical_mse=data.mse(),
        empirical_nmse=data.nmse(),
        theoretical_mse=theory,
    )


@dataclass(frozen=True)
class SweepRow:
    """One (grid point, scheme) record of a sweep."""

    sweep_var: str
    value: float
    scheme: str
    nmse: float
    mse: float
    theory_mse: float
    trials: int
    stderr: float
    seed: int

    def as_csv_line(self):
        return ",".join(
            (
                self.sweep_var,
                repr(float(self.value)),
                self.scheme,
                repr(float(self.nmse)),
                repr(float(self.mse)),
                repr(float(self.theory_mse)),
                str(int(self.trials)),
                repr(float(self.stderr)),
                str(int(self.seed)),
            )
        )


@dataclass(frozen=True)
class SweepResult:
    """All rows of one sweep, with a stable CSV serialization."""

    sweep_var: str
    grid: tuple
    rows: tuple

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            fh.write(CSV_HEADER + "\n")
            for row in self.rows:
                fh.write(row.as_csv_line() + "\n")

    def rows_for(self, scheme):
        return [r for r in self.rows if r.scheme == scheme]


def _check_grid(grid, name):
    arr = [float(v) for v in grid]
    if not arr:
        raise ValueError(f"{name} grid is empty")
    if any(b <= a for a, b in zip(arr, arr[1:])):
        raise ValueError(f"{name} grid must be strictly increasing")
    return arr


def sweep_beta(cfg, grid, trials, seed):
    """Per-user NMSE of the coupled ES design across energy splits.

    Every grid point runs the coupled design with uniform splits
    (beta, 1-beta) plus a TS reference, and emits the per-user errors under
    both normalizations: ``...-user`` rows divide by that user's own truth
    power, ``...-joint`` rows by the total. The theory column carries the
    trace-form per-user MSE.
    """
    grid = _check_grid(grid, "beta")
    if any(not 0.0 < b < 1.0 for b in grid):
        raise ValueError("beta grid values must lie strictly inside (0, 1)")
    rows = []
    ts_ord = _scheme_ordinal("ts")
    es_ord = _scheme_ordinal("es-coupled")
    for i, beta in enumerate(grid):
        es_bundle = _Bundle("es-coupled", cfg, split_t=beta)
        data = _collect(es_bundle, cfg, trials, seed, key_prefix=(i, es_ord))
        _, theory_t, theory_r = theoretical_mse_split(
            es_bundle.design, cfg.power_w, cfg.noise_power_w
        )
        for part, theory in (("t", theory_t), ("r", theory_r)):
            for norm in ("user", "joint"):
                rows.append(
                    SweepRow(
                        sweep_var="beta_t",
                        value=beta,
                        scheme=f"es-coupled-{part}-{norm}",
                        nmse=data.nmse(part, "matched" if norm == "user" else "joint"),
                        mse=data.mse(part),
                        theory_mse=theory,
                        trials=trials,
                        stderr=data.stderr(part),
                        seed=seed,
                    )
                )
        ts_data = _collect(_Bundle("ts", cfg), cfg, trials, seed, key_prefix=(i, ts_ord))
        rows.append(
            SweepRow(
                sweep_var="beta_t",
                value=beta,
                scheme="ts",
                nmse=ts_data.nmse(),
                mse=ts_data.mse(),
                theory_mse=scheme_theory_mse("ts", cfg),
                trials=trials,
                stderr=ts_data.stderr(),
                seed=seed,
            )
        )
    return SweepResult("beta_t", tuple(grid), tuple(rows))


def _sweep_points(cfg, sweep_var, grid, trials, seed, schemes):
    rows = []
    for scheme in schemes:
        _scheme_ordinal(scheme)
    for i, value in enumerate(grid):
        cfg_i = _config_at(cfg, sweep_var, value)
        for scheme in schemes:
            bundle = _Bundle(scheme, cfg_i)
            data = _collect(
                bundle, cfg_i, trials, seed, key_prefix=(i, _scheme_ordinal(scheme))
            )
            theory = scheme_theory_mse(
                scheme,
                cfg_i,
                design=bundle.design if isinstance(bundle.design, EsDesign) else None,
            )
            rows.append(
                SweepRow(
                    sweep_var=sweep_var,
                    value=float(value),
                    scheme=scheme,
                    nmse=data.nmse(),
                    mse=data.mse(),
                    theory_mse=theory,
                    trials=trials,
                    stderr=data.stderr(),
                    seed=seed,
                )
            )
    return SweepResult(sweep_var, tuple(float(v) for v in grid), tuple(rows))


def _config_at(cfg, sweep_var, value):
    if sweep_var == "power_dbm":
        return replace(cfg, power_w=dbm_to_watts(value))
    if sweep_var == "num_subsurfaces":
        m = int(value)
        if m != value or m < 1:
            raise ValueError("sub-surface counts must be positive integers")
        # Keep the element grouping ratio so M always divides the element count.
        ratio = cfg.num_elements // cfg.num_subsurfaces
        return replace(cfg, num_subsurfaces=m, num_elements=ratio * m)
    raise ValueError(f"unknown sweep variable {sweep_var!r}")


def sweep_power(cfg, grid_dbm, trials, seed, schemes=SCHEMES):
    """NMSE versus transmit power (dBm grid) for the requested schemes."""
    grid = _check_grid(grid_dbm, "power")
    return _sweep_points(cfg, "power_dbm", grid, trials, seed, tuple(schemes))


def sweep_subsurfaces(cfg, grid_m, trials, seed, schemes=SCHEMES):
    """NMSE versus sub-surface count for the requested schemes."""
    grid = _check_grid(grid_m, "num_subsurfaces")
    return _sweep_points(cfg, "num_subsurfaces", grid, trials, seed, tuple(schemes))

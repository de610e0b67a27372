"""Training designs: pilot sequences and surface patterns for every scheme.

Two protocols are covered. Under time switching (TS) the surface serves one
user at a time and the pattern matrix is square. Under energy splitting (ES)
both users train simultaneously; each sub-surface splits its power between a
transmission-mode and a reflection-mode pattern, and the stacked observation
matrix interleaves pilot columns with amplitude-scaled pattern columns.
"""

import csv
from dataclasses import dataclass

import numpy as np

from .matrixkit import dft_matrix, hadamard_matrix, numerical_rank

__all__ = [
    "InfeasibleDesignError",
    "TsDesign",
    "EsDesign",
    "OnOffSchedule",
    "TwoPhaseDesign",
    "ts_pattern",
    "es_ideal_design",
    "es_coupled_design",
    "onoff_schedule",
    "two_phase_design",
    "assemble_observation_matrix",
    "cascaded_observation_columns",
    "verify_coupled_constraint",
    "export_design_csv",
    "write_complex_matrix_csv",
    "read_complex_matrix_csv",
]

_UNIT_TOL = 1e-9


class InfeasibleDesignError(RuntimeError):
    """A requested design cannot satisfy its structural constraints."""


def _check_unit_modulus(arr, what):
    if arr.size and np.max(np.abs(np.abs(arr) - 1.0)) > _UNIT_TOL:
        raise ValueError(f"{what} entries must be unit modulus")


@dataclass(frozen=True, eq=False)
class TsDesign:
    """Square training pattern for one TS user period, reused by both users.

    ``pattern`` rows are [1, phase entries]: the first column is all ones
    because the direct link is always observed. ``pilots`` holds one unit
    modulus symbol per slot of a period.
    """

    pattern: np.ndarray
    pilots: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "pattern", np.asarray(self.pattern, dtype=np.complex128))
        object.__setattr__(self, "pilots", np.asarray(self.pilots, dtype=np.complex128))
        n = self.pattern.shape[0]
        if self.pattern.ndim != 2 or self.pattern.shape != (n, n):
            raise ValueError("pattern must be square")
        if self.pilots.shape != (n,):
            raise ValueError("pilots length must match the pattern order")
        _check_unit_modulus(self.pattern, "pattern")
        _check_unit_modulus(self.pilots, "pilot")
        if np.max(np.abs(self.pattern[:, 0] - 1.0)) > _UNIT_TOL:
            raise ValueError("first pattern column must be all ones")

    @property
    def num_subsurfaces(self):
        return self.pattern.shape[1] - 1

    @property
    def slots_per_period(self):
        return self.pattern.shape[0]

    @property
    def total_slots(self):
        # both user periods
        return 2 * self.pattern.shape[0]


@dataclass(frozen=True, eq=False)
class EsDesign:
    """Simultaneous two-user design with per-sub-surface energy splits.

    ``pattern_t`` / ``pattern_r`` are tau x M unit-modulus phase matrices
    (transmission and reflection modes). ``split_t`` / ``split_r`` are the
    energy fractions assigned to each mode; the observation matrix applies
    their square roots as column amplitudes.
    """

    pilots_t: np.ndarray
    pilots_r: np.ndarray
    pattern_t: np.ndarray
    pattern_r: np.ndarray
    split_t: np.ndarray
    split_r: np.ndarray
    base: str = "dft"

    def __post_init__(self):
        for name in ("pilots_t", "pilots_r"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=np.complex128))
        for name in ("pattern_t", "pattern_r"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=np.complex128))
        for name in ("split_t", "split_r"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=np.float64))
        tau = self.pilots_t.shape[0]
        m = self.pattern_t.shape[1] if self.pattern_t.ndim == 2 else -1
        if self.pilots_r.shape != (tau,):
            raise ValueError("pilot sequences must share one length")
        if self.pattern_t.shape != (tau, m) or self.pattern_r.shape != (tau, m):
            raise ValueError("patterns must be tau x M and share their shape")
        if self.split_t.shape != (m,) or self.split_r.shape != (m,):
            raise ValueError("splits must hold one ratio per sub-surface")
        _check_unit_modulus(self.pilots_t, "pilot")
        _check_unit_modulus(self.pilots_r, "pilot")
        _check_unit_modulus(self.pattern_t, "pattern")
        _check_unit_modulus(self.pattern_r, "pattern")
        if np.any(self.split_t < 0) or np.any(self.split_r < 0):
            raise ValueError("energy splits must be nonnegative")
        if np.any(self.split_t + self.split_r > 1.0 + 1e-12):
            raise ValueError("split_t + split_r must not exceed 1 per sub-surface")

    @property
    def num_subsurfaces(self):
        return self.pattern_t.shape[1]

    @property
    def total_slots(self):
        return self.pilots_t.shape[0]


@dataclass(frozen=True, eq=False)
class OnOffSchedule:
    """One-at-a-time activation plan under the TS protocol.

    ``slots`` holds ``(mode, index)`` pairs over both user periods: mode is
    "off", "t", or "r"; index is the activated sub-surface or None. The
    first slot of each period is all-off and measures the direct link.
    """

    num_subsurfaces: int
    slots: tuple
    pilots: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "pilots", np.asarray(self.pilots, dtype=np.complex128))
        m = self.num_subsurfaces
        if len(self.slots) != 2 * m + 2 or self.pilots.shape != (2 * m + 2,):
            raise ValueError("schedule must cover 2M+2 slots")
        _check_unit_modulus(self.pilots, "pilot")
        for mode, index in self.slots:
            if mode == "off":
                if index is not None:
                    raise ValueError("off slots carry no active index")
            elif mode in ("t", "r"):
                if not 0 <= index < m:
                    raise ValueError("active index out of range")
            else:
                raise ValueError(f"unknown slot mode {mode!r}")

    @property
    def total_slots(self):
        return 2 * self.num_subsurfaces + 2


@dataclass(frozen=True, eq=False)
class TwoPhaseDesign:
    """Benchmark that estimates direct links first, cascaded links second.

    Phase one uses two slots with the surface off and orthogonal user
    pilots (``direct_pilots`` columns are the t-user then r-user sequence).
    Phase two is an EsDesign over 2M slots whose direct-link columns get
    subtracted using the phase-one estimates before solving for the
    cascaded coefficients.
    """

    direct_pilots: np.ndarray
    cascade: EsDesign

    def __post_init__(self):
        object.__setattr__(
            self, "direct_pilots", np.asarray(self.direct_pilots, dtype=np.complex128)
        )
        if self.direct_pilots.shape != (2, 2):
            raise ValueError("phase one uses two slots and two users")
        _check_unit_modulus(self.direct_pilots, "pilot")

    @property
    def num_subsurfaces(self):
        return self.cascade.num_subsurfaces

    @property
    def total_slots(self):
        return 2 + self.cascade.total_slots


def ts_pattern(num_subsurfaces):
    """Orthogonal TS design: square DFT pattern with all-ones pilots."""
    if num_subsurfaces < 1:
        raise ValueError("need at least one sub-surface")
    n = num_subsurfaces + 1
    return TsDesign(pattern=dft_matrix(n), pilots=np.ones(n, dtype=np.complex128))


def _base_matrix(base, order):
    if base == "dft":
        return dft_matrix(order)
    if base == "hadamard":
        return hadamard_matrix(order)
    raise ValueError(f"unknown base {base!r}, expected 'dft' or 'hadamard'")


def es_ideal_design(num_subsurfaces, base="dft"):
    """Orthogonal ES design carved out of a DFT or Hadamard seed matrix.

    Pilots take seed columns 0 and M+1; the transmission pattern absorbs
    columns 1..M and the reflection pattern columns M+2..2M+1, each divided
    by its pilot so the assembled observation matrix reproduces the seed's
    columns (pattern columns at amplitude sqrt(1/2)). Splits are 1/2
    everywhere, which meets the optimality conditions for this overhead.
    """
    m = num_subsurfaces
    if m < 1:
        raise ValueError("need at least one sub-surface")
    tau = 2 * m + 2
    seed = _base_matrix(base, tau)
    pilots_t = seed[:, 0].copy()
    pilots_r = seed[:, m + 1].copy()
    pattern_t = seed[:, 1 : m + 1] / pilots_t[:, None]
    pattern_r = seed[:, m + 2 :] / pilots_r[:, None]
    half = np.full(m, 0.5)
    return EsDesign(pilots_t, pilots_r, pattern_t, pattern_r, half, half, base)


def es_coupled_design(num_subsurfaces, base="dft", check=True):
    """ES design whose mode phases differ by a quarter turn everywhere.

    Same pattern recipe as the ideal design, but the reflection-side pilots
    alternate between +j and -j and the reflection pattern absorbs them.
    Each transmission/reflection phase pair then satisfies
    cos(theta - phi) = 0 exactly, which a phase-coupled surface requires.

    With the DFT seed the new pilot column is a unit scalar multiple of the
    seed column it replaces, so the design stays fully orthogonal. With a
    Hadamard seed the alternating column is already spent inside the
    transmission pattern and the observation matrix loses rank; the default
    rank check rejects that case with InfeasibleDesignError. Pass
    ``check=False`` to inspect such a design anyway.
    """
    m = num_subsurfaces
    if m < 1:
        raise ValueError("need at least one sub-surface")
    tau = 2 * m + 2
    seed = _base_matrix(base, tau)
    pilots_t = seed[:, 0].copy()
    signs = np.where(np.arange(tau) % 2 == 0, 1.0, -1.0)
    pilots_r = 1j * signs.astype(np.complex128)
    pattern_t = seed[:, 1 : m + 1] / pilots_t[:, None]
    pattern_r = seed[:, m + 2 :] / pilots_r[:, None]
    half = np.full(m, 0.5)
    design = EsDesign(pilots_t, pilots_r, pattern_t, pattern_r, half, half, base)
    if check:
        ok, worst = verify_coupled_constraint(design)
        if not ok:
            raise InfeasibleDesignError(
                f"phase coupling violated, max |cos(theta-phi)| = {worst:.3e}"
            )
        v = assemble_observation_matrix(design)
        if numerical_rank(v) != tau:
            raise InfeasibleDesignError(
                f"coupled design over base {base!r} is rank deficient at M={m}: "
                "the alternating pilot column collides with a pattern column"
            )
    return design


def onoff_schedule(num_subsurfaces):
    """Activation benchmark: an all-off slot, then one sub-surface per slot.

    Runs under TS, so the plan repeats per user period: slot 0 off, slots
    1..M activate sub-surface m-1 in transmission mode, then the same again
    in reflection mode for the other user. Pilots are all ones.
    """
    m = num_subsurfaces
    if m < 1:
        raise ValueError("need at least one sub-surface")
    slots = (
        [("off", None)]
        + [("t", i) for i in range(m)]
        + [("off", None)]
        + [("r", i) for i in range(m)]
    )
    return OnOffSchedule(m, tuple(slots), np.ones(2 * m + 2, dtype=np.complex128))


def two_phase_design(num_subsurfaces):
    """Benchmark design with 2 direct-link slots plus 2M cascaded slots.

    Phase one sends orthogonal user pilots [1,1] and [1,-1] with the
    surface off. Phase two sends all-ones pilots while the patterns sweep
    the columns of a 2M-point DFT (first half transmission mode, second
    half reflection mode) at splits of one half, so the cascaded columns
    alone are orthogonal with squared norm M.
    """
    m = num_subsurfaces
    if m < 1:
        raise ValueError("need at least one sub-surface")
    direct = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=np.complex128)
    seed = dft_matrix(2 * m)
    ones = np.ones(2 * m, dtype=np.complex128)
    half = np.full(m, 0.5)
    cascade = EsDesign(ones, ones, seed[:, :m], seed[:, m:], half, half, "dft")
    return TwoPhaseDesign(direct, cascade)


def assemble_observation_matrix(design):
    """Stack a design into its least-squares observation matrix.

    TS: the pattern with each row scaled by its pilot (tau x (M+1)).
    ES: ``[s_t, diag(s_t) P_t sqrt(split_t), s_r, diag(s_r) P_r sqrt(split_r)]``
    of shape tau x (2M+2), direct columns at 0 and M+1.
    """
    if isinstance(design, TsDesign):
        return design.pilots[:, None] * design.pattern
    if isinstance(design, EsDesign):
        t_block = design.pilots_t[:, None] * design.pattern_t * np.sqrt(design.split_t)
        r_block = design.pilots_r[:, None] * design.pattern_r * np.sqrt(design.split_r)
        return np.column_stack([design.pilots_t, t_block, design.pilots_r, r_block])
    raise TypeError(f"cannot assemble a {type(design).__name__}")


def cascaded_observation_columns(design):
    """The ES observation columns belonging to cascaded coefficients only."""
    if not isinstance(design, EsDesign):
        raise TypeError(f"cannot assemble a {type(design).__name__}")
    t_block = design.pilots_t[:, None] * design.pattern_t * np.sqrt(design.split_t)
    r_block = design.pilots_r[:, None] * design.pattern_r * np.sqrt(design.split_r)
    return np.hstack([t_block, r_block])


def verify_coupled_constraint(design, tol=1e-9):
    """Check that paired mode phases are a quarter turn apart everywhere.

    Returns ``(ok, worst)`` where ``worst`` is the largest absolute value
    of cos(theta - phi) over all slots and sub-surfaces.
    """
    if not isinstance(design, EsDesign):
        raise TypeError("constraint applies to ES designs")
    theta = np.angle(design.pattern_t)
    phi = np.angle(design.pattern_r)
    worst = float(np.max(np.abs(np.cos(theta - phi)))) if theta.size else 0.0
    return worst <= tol, worst


def write_complex_matrix_csv(matrix, path):
    """Write a complex matrix as CSV, one quoted "re,im" pair per cell."""
    arr = np.atleast_2d(np.asarray(matrix, dtype=np.complex128))
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        for row in arr:
            writer.writerow([f"{float(z.real)!r},{float(z.imag)!r}" for z in row])


def read_complex_matrix_csv(path):
    """Read a matrix written by write_complex_matrix_csv."""
    rows = []
    with open(path, newline="") as fh:
        for record in csv.reader(fh):
            parsed = []
            for cell in record:
                re_s, im_s = cell.split(",")
                parsed.append(complex(float(re_s), float(im_s)))
            rows.append(parsed)
    return np.asarray(rows, dtype=np.complex128)


def export_design_csv(design, directory):
    """Write every matrix of a design to ``directory``, one file each.

    Returns the list of written paths. File names reflect the design's own
    field names.
    """
    import os

    os.makedirs(directory, exist_ok=True)
    if isinstance(design, TsDesign):
        parts = {"pattern": design.pattern, "pilots": design.pilots}
    elif isinstance(design, EsDesign):
        parts = {
            "pilots_t": design.pilots_t,
            "pilots_r": design.pilots_r,
            "pattern_t": design.pattern_t,
            "pattern_r": design.pattern_r,
            "split_t": design.split_t.astype(np.complex128),
            "split_r": design.split_r.astype(np.complex128),
        }
    elif isinstance(design, TwoPhaseDesign):
        parts = {"direct_pilots": design.direct_pilots}
        written = [_write_part(directory, name, mat) for name, mat in parts.items()]
        written += export_design_csv(design.cascade, os.path.join(directory, "cascade"))
        return written
    elif isinstance(design, OnOffSchedule):
        parts = {"pilots": design.pilots}
    else:
        raise TypeError(f"cannot export a {type(design).__name__}")
    return [_write_part(directory, name, mat) for name, mat in parts.items()]


def _write_part(directory, name, matrix):
    import os

    path = os.path.join(directory, f"{name}.csv")
    write_complex_matrix_csv(matrix, path)
    return path

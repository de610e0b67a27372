"""Command line harness: design validation, closed forms, and NMSE sweeps.

Exit codes: 0 success, 1 usage error, 2 invalid configuration, 3 infeasible
design. Config files are flat ``key = value`` text with decibel units;
conversion to linear units happens here and nowhere else.
"""

import argparse
import math
import sys
from dataclasses import replace

from .channel import SystemConfig
from .matrixkit import (
    UnsupportedOrderError,
    gram_orthogonality_defect,
    numerical_rank,
    trace_inverse_gram,
)
from .simulator import (
    ALL_SCHEMES,
    SCHEMES,
    dbm_to_watts,
    scheme_theory_mse,
    sweep_beta,
    sweep_power,
    sweep_subsurfaces,
)
from .training import (
    InfeasibleDesignError,
    assemble_observation_matrix,
    cascaded_observation_columns,
    es_coupled_design,
    es_ideal_design,
    onoff_schedule,
    ts_pattern,
    two_phase_design,
    verify_coupled_constraint,
)

__all__ = ["ConfigError", "run_command", "main", "load_config", "parse_config_text"]

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3

COUPLING_TOL = 1e-9

DEFAULT_CONFIG_TEXT = """\
# Reference operating point. Decibel values are converted at ingestion.
num_elements = 80
num_subsurfaces = 20
power_dbm = 30
noise_power_dbm = -110
rician_k_db = 10
ref_pathloss_db = -30
ref_distance_m = 1
bs_pos_m = 0,0
ris_pos_m = 50,0
t_user_pos_m = 54,3
r_user_pos_m = 46,-3
exponent_user_bs = 3.5
exponent_user_ris = 2.8
exponent_bs_ris = 2.2
"""

_INT_KEYS = ("num_elements", "num_subsurfaces")
_DB_KEYS = ("power_dbm", "noise_power_dbm", "rician_k_db", "ref_pathloss_db")
_FLOAT_KEYS = (
    "ref_distance_m",
    "exponent_user_bs",
    "exponent_user_ris",
    "exponent_bs_ris",
)
_PAIR_KEYS = ("bs_pos_m", "ris_pos_m", "t_user_pos_m", "r_user_pos_m")


class ConfigError(ValueError):
    """The configuration file is malformed or violates an invariant."""


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def db_to_linear(value_db):
    return 10.0 ** (value_db / 10.0)


def parse_config_text(text):
    """Parse flat key = value config text into a SystemConfig."""
    raw = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, value = (part.strip() for part in body.split("=", 1))
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        raw[key] = value

    known = set(_INT_KEYS) | set(_DB_KEYS) | set(_FLOAT_KEYS) | set(_PAIR_KEYS)
    unknown = sorted(set(raw) - known)
    if unknown:
        raise ConfigError(f"unknown keys: {', '.join(unknown)}")
    missing = sorted(known - set(raw))
    if missing:
        raise ConfigError(f"missing keys: {', '.join(missing)}")

    def number(key, conv):
        try:
            return conv(raw[key])
        except ValueError:
            raise ConfigError(f"key {key!r}: cannot parse {raw[key]!r}") from None

    def pair(key):
        parts = raw[key].split(",")
        if len(parts) != 2:
            raise ConfigError(f"key {key!r}: expected 'x,y', got {raw[key]!r}")
        try:
            return (float(parts[0]), float(parts[1]))
        except ValueError:
            raise ConfigError(f"key {key!r}: cannot parse {raw[key]!r}") from None

    try:
        return SystemConfig(
            num_elements=number("num_elements", int),
            num_subsurfaces=number("num_subsurfaces", int),
            power_w=dbm_to_watts(number("power_dbm", float)),
            noise_power_w=dbm_to_watts(number("noise_power_dbm", float)),
            rician_k=db_to_linear(number("rician_k_db", float)),
            ref_pathloss=db_to_linear(number("ref_pathloss_db", float)),
            ref_distance_m=number("ref_distance_m", float),
            bs_pos_m=pair("bs_pos_m"),
            ris_pos_m=pair("ris_pos_m"),
            t_user_pos_m=pair("t_user_pos_m"),
            r_user_pos_m=pair("r_user_pos_m"),
            exponent_user_bs=number("exponent_user_bs", float),
            exponent_user_ris=number("exponent_user_ris", float),
            exponent_bs_ris=number("exponent_bs_ris", float),
        )
    except ValueError as exc:
        raise ConfigError(f"invalid configuration: {exc}") from exc


def load_config(path):
    """Load a config file; the literal name "default" loads the built-in."""
    if path == "default":
        return parse_config_text(DEFAULT_CONFIG_TEXT)
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
    return parse_config_text(text)


def build_parser():
    parser = _Parser(prog="starce", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command")

    def common(p, default_out=None):
        p.add_argument("--config", default="default",
                       help="config file path, or 'default' for the built-in")
        p.add_argument("--sigma2", type=float, default=None,
                       help="override noise power in watts (0 allowed)")
        if default_out is not None:
            p.add_argument("--out", default=default_out, help="output CSV path")
            p.add_argument("--trials", type=int, default=10_000)
            p.add_argument("--seed", type=int, default=12_345)
            p.add_argument("--grid-start", type=float, default=None)
            p.add_argument("--grid-stop", type=float, default=None)
            p.add_argument("--grid-step", type=float, default=None)

    common(sub.add_parser("validate", help="check every design at the configured size"))
    common(sub.add_parser("mse-table", help="print closed-form MSEs per scheme"))
    common(sub.add_parser("sweep-beta", help="per-user NMSE across energy splits"),
           default_out="sweep_beta.csv")
    p_power = sub.add_parser("sweep-power", help="NMSE across transmit power (dBm)")
    common(p_power, default_out="sweep_power.csv")
    p_power.add_argument("--schemes", default=",".join(SCHEMES),
                         help=f"comma list from {', '.join(ALL_SCHEMES)}")
    p_m = sub.add_parser("sweep-m", help="NMSE across sub-surface counts")
    common(p_m, default_out="sweep_m.csv")
    p_m.add_argument("--schemes", default=",".join(SCHEMES),
                     help=f"comma list from {', '.join(ALL_SCHEMES)}")
    return parser


def _grid(args, start, stop, step):
    if args.grid_start is not None:
        start = args.grid_start
    if args.grid_stop is not None:
        stop = args.grid_stop
    if args.grid_step is not None:
        step = args.grid_step
    if step <= 0:
        raise _UsageError("--grid-step must be positive")
    if stop < start:
        raise _UsageError("--grid-stop must not precede --grid-start")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + k * step, 12) for k in range(count)]


def _schemes(args):
    names = tuple(s.strip() for s in args.schemes.split(",") if s.strip())
    if not names:
        raise _UsageError("--schemes must name at least one scheme")
    for name in names:
        if name not in ALL_SCHEMES:
            raise _UsageError(
                f"unknown scheme {name!r}, expected names from {', '.join(ALL_SCHEMES)}"
            )
    return names


def _cmd_validate(cfg):
    m = cfg.num_subsurfaces
    tau = 2 * m + 2
    failures = []

    def report(line, ok=True):
        print(line)
        if not ok:
            failures.append(line)

    ts = ts_pattern(m)
    mat = assemble_observation_matrix(ts)
    rank = numerical_rank(mat)
    defect = gram_orthogonality_defect(mat)
    trace = trace_inverse_gram(mat)
    ok = rank == m + 1 and defect <= COUPLING_TOL and abs(trace - 1.0) <= 1e-9
    report(f"ts: {'PASS' if ok else 'FAIL'} rank {rank}/{m + 1} "
           f"defect {defect:.2e} trace_inv_gram {trace:.6f}", ok)

    ideal_trace = (4.0 * m + 2.0) / (2.0 * m + 2.0)
    for base in ("dft", "hadamard"):
        label_i = f"es-ideal[{base}]"
        label_c = f"es-coupled[{base}]"
        if base == "hadamard" and (tau & (tau - 1)):
            report(f"{label_i}: SKIP order {tau} is not a power of two")
            report(f"{label_c}: SKIP order {tau} is not a power of two")
            continue
        design = es_ideal_design(m, base)
        v = assemble_observation_matrix(design)
        rank = numerical_rank(v)
        defect = gram_orthogonality_defect(v)
        trace = trace_inverse_gram(v)
        ok = rank == tau and defect <= COUPLING_TOL and abs(trace - ideal_trace) <= 1e-9
        report(f"{label_i}: {'PASS' if ok else 'FAIL'} rank {rank}/{tau} "
               f"defect {defect:.2e} trace_inv_gram {trace:.6f} "
               f"(closed form {ideal_trace:.6f})", ok)
        try:
            coupled = es_coupled_design(m, base)
        except InfeasibleDesignError as exc:
            if base == "hadamard":
                # Known collision of the alternating pilot column; informational.
                report(f"{label_c}: INFO infeasible as expected ({exc})")
            else:
                report(f"{label_c}: FAIL {exc}", ok=False)
            continue
        v = assemble_observation_matrix(coupled)
        _, worst = verify_coupled_constraint(coupled, COUPLING_TOL)
        rank = numerical_rank(v)
        trace = trace_inverse_gram(v)
        defect = gram_orthogonality_defect(v)
        ok = worst <= COUPLING_TOL and rank == tau
        report(f"{label_c}: {'PASS' if ok else 'FAIL'} max|cos(theta-phi)| {worst:.2e} "
               f"(tol {COUPLING_TOL:.0e}) rank {rank}/{tau} defect {defect:.2e} "
               f"trace_inv_gram {trace:.6f}", ok)

    schedule = onoff_schedule(m)
    seen = {"t": set(), "r": set()}
    for mode, index in schedule.slots:
        if mode != "off":
            seen[mode].add(index)
    ok = (
        schedule.slots[0][0] == "off"
        and schedule.slots[m + 1][0] == "off"
        and seen["t"] == set(range(m))
        and seen["r"] == set(range(m))
    )
    report(f"onoff: {'PASS' if ok else 'FAIL'} {schedule.total_slots} slots, "
           "one activation per sub-surface per mode", ok)

    pair = two_phase_design(m)
    direct_defect = gram_orthogonality_defect(pair.direct_pilots)
    cols = cascaded_observation_columns(pair.cascade)
    cas_defect = gram_orthogonality_defect(cols)
    norm2 = float((cols[:, 0].conj() @ cols[:, 0]).real)
    ok = direct_defect <= COUPLING_TOL and cas_defect <= COUPLING_TOL and abs(norm2 - m) <= 1e-9
    report(f"two-phase: {'PASS' if ok else 'FAIL'} direct defect {direct_defect:.2e}, "
           f"cascade defect {cas_defect:.2e}, cascade column norm^2 {norm2:.3f}", ok)

    if failures:
        print(f"validate: FAIL ({len(failures)} failing checks)")
        return EXIT_INFEASIBLE
    print("validate: PASS")
    return EXIT_OK


_TABLE_FORMS = (
    ("ts", "2*sigma2/p"),
    ("es-ideal", "(4M+2)/(M+1)*sigma2/p"),
    ("es-coupled", "2*sigma2/p*tr[inv(V^H V)]"),
    ("onoff", "(4M+2)*sigma2/p"),
    ("two-phase", "10*sigma2/p"),
)


def _cmd_mse_table(cfg):
    print(f"closed-form sum MSE at M={cfg.num_subsurfaces}, "
          f"p={cfg.power_w:.6g} W, sigma2={cfg.noise_power_w:.6g} W")
    print(f"{'scheme':<12} {'closed_form':<28} {'mse_w':<14}")
    for scheme, form in _TABLE_FORMS:
        value = scheme_theory_mse(scheme, cfg)
        print(f"{scheme:<12} {form:<28} {value:.6e}")
    return EXIT_OK


def run_command(argv):
    """Run one CLI invocation; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    if args.command is None:
        print("error: a command is required (see --help)", file=sys.stderr)
        return EXIT_USAGE

    try:
        cfg = load_config(args.config)
        if args.sigma2 is not None:
            if args.sigma2 < 0:
                raise ConfigError("--sigma2 must be nonnegative")
            cfg = replace(cfg, noise_power_w=args.sigma2)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        if args.command == "validate":
            return _cmd_validate(cfg)
        if args.command == "mse-table":
            return _cmd_mse_table(cfg)
        if args.command == "sweep-beta":
            grid = _grid(args, 0.05, 0.95, 0.05)
            if any(not 0.0 < b < 1.0 for b in grid):
                raise _UsageError("beta grid must lie strictly inside (0, 1)")
            result = sweep_beta(cfg, grid, args.trials, args.seed)
        elif args.command == "sweep-power":
            grid = _grid(args, 20.0, 40.0, 5.0)
            result = sweep_power(cfg, grid, args.trials, args.seed, _schemes(args))
        elif args.command == "sweep-m":
            grid = _grid(args, 10.0, 40.0, 10.0)
            if any(v != int(v) or v < 1 for v in grid):
                raise _UsageError("sub-surface grid must hold positive integers")
            result = sweep_subsurfaces(
                cfg, [int(v) for v in grid], args.trials, args.seed, _schemes(args)
            )
        else:
            print(f"error: unknown command {args.command!r}", file=sys.stderr)
            return EXIT_USAGE
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InfeasibleDesignError, UnsupportedOrderError) as exc:
        print(f"error: infeasible design: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    result.to_csv(args.out)
    print(f"wrote {len(result.rows)} rows to {args.out}")
    return EXIT_OK


def main():
    return run_command(sys.argv[1:])

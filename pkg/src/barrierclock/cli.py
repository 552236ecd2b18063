"""barrierclock command line.

Exit codes: 0 ok, 1 an invariant or oracle check failed, 2 bad input.
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import __version__
from ._parallel import ENV_THREADS, ordered_map
from .clock import (
    ClockError,
    coherent_spin_state,
    larmor_spin_S,
    larmor_spin_half,
    pointer_measurement,
    squeezed_spin_state,
)
from .oracle import OracleError
from .scattering import PotentialProfile, UnitSystem, solve_stationary
from .serialize import csv_text, dumps, plot_text
from .verify import DEFAULT_CASES, DEFAULT_SEED, run
from .weaktimes import (
    GROUP_DELAY_REFERENCE,
    Region,
    UndefinedChannelTime,
    channel_times,
    dwell_density,
    group_delay,
    opaque_asymptotics,
)

UNITS = UnitSystem()
IDENTITY_TOL = 1e-10
UNITARITY_TOL = 1e-12

TIMES_FIELDS = """\
times output (JSON object; --format csv gives one header row and one data row
with complex values split into _re/_im columns, region into region_x1/region_x2,
opaque into opaque_<name> columns, and undefined into a reason column):
  E                    energy
  k                    incident wavenumber sqrt(2 m E) / hbar
  region               [x1, x2] the times refer to (default: potential support)
  t, r                 [re, im] transmission / reflection amplitudes
  transmission         |t|^2 (weight w_T)
  reflection           |r|^2 (weight w_R)
  unitarity_residual   |t|^2 + |r|^2 - 1
  unitarity_ok         |unitarity_residual| < 1e-12
  tau_T, tau_R         [re, im] weak-value conditional times, or null
  undefined            {channel: reason} for null times (e.g. zero_reflection_amplitude)
  tau_d                dwell time (real)
  identity_residual    |w_T tau_T + w_R tau_R - tau_d| / tau_d
  identity_ok          identity_residual < 1e-10
  real_part_spread     max - min of (Re tau_T, Re tau_R, tau_d), relative to tau_d
  tau_g                group delay, reference given in group_delay_reference
  group_delay_reference
  opaque               {re_limit, im_limit, modulus, dwell_limit} for a --barrier
                       with E < V0, else null
  opaque_reason        why opaque is null (not_rectangular, energy_not_below_barrier)
"""

SWEEP_FIELDS = """\
sweep columns: <param> (E, d or V0), t_re, t_im, transmission, tau_T_re, tau_T_im,
  tau_R_re, tau_R_im, tau_d, tau_g, reason.  Undefined times leave empty cells and
  name the cause in reason.
"""

DENSITY_FIELDS = """\
density columns: x, then per selected channel density_T_re, density_T_im,
  density_R_re, density_R_im, density_d (time per unit length), then reason.
"""

CLOCK_FIELDS = """\
clock columns: omega_L or width (the swept quantity), S, tau_y, tau_z,
  in_plane_angle, out_of_plane, norm.  tau_y -> Re tau and tau_z -> -Im tau.
"""

POINTER_FIELDS = """\
pointer columns: sigma, g0, dQ, dP, dQ_over_g0, dP_2sigma2_over_g0, norm.
  dQ/g0 -> Re tau and dP 2 sigma^2 / g0 -> Im tau in the weak limit.
"""

VERIFY_FIELDS = """\
verify output: one JSON object per line with quantity, primary, oracle,
  abs_error, rel_error, tolerance, metric (rel or abs), passed.  Complex values
  are [re, im].  Failures are also named on stderr.
"""


class InputError(ValueError):
    pass


def _floats(text: str, n: int, what: str) -> list[float]:
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise InputError(f"{what}: expected {n} comma-separated numbers, got {text!r}") from None
    if len(vals) != n or not all(math.isfinite(v) for v in vals):
        raise InputError(f"{what}: expected {n} finite comma-separated numbers, got {text!r}")
    return vals


def parse_range(text: str, log: bool = False, what: str = "range") -> np.ndarray:
    """start:stop:count, linear or geometric, endpoints included."""
    parts = text.split(":")
    if len(parts) != 3:
        raise InputError(f"{what}: expected start:stop:count, got {text!r}")
    try:
        a, b, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise InputError(f"{what}: expected start:stop:count, got {text!r}") from None
    if n < 1:
        raise InputError(f"{what}: count must be >= 1")
    if not (math.isfinite(a) and math.isfinite(b)):
        raise InputError(f"{what}: bounds must be finite")
    if log:
        if a <= 0 or b <= 0:
            raise InputError(f"{what}: --log needs positive bounds")
        return np.geomspace(a, b, n) if n > 1 else np.array([a])
    return np.linspace(a, b, n) if n > 1 else np.array([a])


def _profile(args) -> tuple[PotentialProfile, tuple[float, float] | None]:
    if args.profile:
        try:
            return PotentialProfile.load(args.profile), None
        except OSError as exc:
            raise InputError(f"cannot read profile: {exc}") from None
        except (ValueError, KeyError, TypeError) as exc:
            raise InputError(f"bad profile file: {exc}") from None
    V0, d = _floats(args.barrier or "1,1", 2, "--barrier")
    if d <= 0:
        raise InputError("--barrier: width must be positive")
    return PotentialProfile.rectangular(V0, d), (V0, d)


def _energy(args, profile: PotentialProfile) -> float:
    if args.energy is not None:
        E = args.energy
    else:
        frac = 0.5 if args.energy_frac is None else args.energy_frac
        vmax = float(np.max(profile.potentials)) if profile.segments else 0.0
        if vmax <= 0:
            raise InputError("--energy-frac needs a profile with positive maximum potential")
        E = frac * vmax
    if not (math.isfinite(E) and E > 0):
        raise InputError("energy must be positive")
    return E


def _region(args, profile: PotentialProfile) -> Region:
    if args.region:
        x1, x2 = _floats(args.region, 2, "--region")
        if x2 < x1:
            raise InputError("--region needs x1 <= x2")
        return Region(x1, x2)
    return Region.of(profile)


def _cplx(z) -> list[float] | None:
    return None if z is None else [float(z.real), float(z.imag)]


def times_report(profile: PotentialProfile, E: float, region: Region, barrier=None) -> dict:
    sol = solve_stationary(profile, E, UNITS)
    ct = channel_times(sol, region)
    tau_d = ct.tau_d
    resid = abs(ct.weighted_residual())
    ident = resid / tau_d if tau_d > 0 else resid
    reals = [tau.real for tau in (ct.tau_T, ct.tau_R) if tau is not None] + [tau_d]
    spread = (max(reals) - min(reals)) / tau_d if tau_d > 0 else max(reals) - min(reals)
    unit_res = sol.transmission + sol.reflection - 1.0
    opaque, reason = None, None
    if barrier is None:
        reason = "not_rectangular"
    elif not 0 < E < barrier[0]:
        reason = "energy_not_below_barrier"
    else:
        lim = opaque_asymptotics(barrier[0], barrier[1], E, UNITS)
        opaque = {"re_limit": lim.re_limit, "im_limit": lim.im_limit, "modulus": lim.modulus, "dwell_limit": lim.dwell_limit}
    return {
        "E": E,
        "k": sol.k,
        "region": [region.x1, region.x2],
        "t": _cplx(sol.t),
        "r": _cplx(sol.r),
        "transmission": sol.transmission,
        "reflection": sol.reflection,
        "unitarity_residual": unit_res,
        "unitarity_ok": abs(unit_res) < UNITARITY_TOL,
        "tau_T": _cplx(ct.tau_T and ct.tau_T.value),
        "tau_R": _cplx(ct.tau_R and ct.tau_R.value),
        "undefined": dict(ct.undefined),
        "tau_d": tau_d,
        "identity_residual": ident,
        "identity_ok": ident < IDENTITY_TOL,
        "real_part_spread": spread,
        "tau_g": group_delay(profile, E, UNITS),
        "group_delay_reference": GROUP_DELAY_REFERENCE,
        "opaque": opaque,
        "opaque_reason": reason,
    }


def _flatten(report: dict) -> tuple[list[str], list]:
    header, row = [], []
    for key, val in report.items():
        if key in ("t", "r", "tau_T", "tau_R", "region"):
            names = ("x1", "x2") if key == "region" else ("re", "im")
            for j, n in enumerate(names):
                header.append(f"{key}_{n}")
                row.append(None if val is None else val[j])
        elif key == "undefined":
            header.append("reason")
            row.append(";".join(f"{c}:{r}" for c, r in val.items()))
        elif key == "opaque":
            for n in ("re_limit", "im_limit", "modulus", "dwell_limit"):
                header.append(f"opaque_{n}")
                row.append(None if val is None else val[n])
        else:
            header.append(key)
            row.append(val)
    return header, row


def _emit(args, header: list[str], rows: list[list], metadata: dict | None = None) -> None:
    if args.format == "json":
        doc = {"columns": header, "rows": [dict(zip(header, r)) for r in rows]}
        if metadata:
            doc = {"metadata": metadata, **doc}
        text = dumps(doc) + "\n"
    else:
        text = csv_text(header, rows)
    _write(args.output, text)
    if args.plot_data:
        _write(args.plot_data, plot_text(header, rows))


def _write(path, text: str) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def cmd_times(args) -> int:
    profile, barrier = _profile(args)
    E = _energy(args, profile)
    report = times_report(profile, E, _region(args, profile), barrier)
    if args.format == "csv":
        header, row = _flatten(report)
        _write(args.output, csv_text(header, [row]))
    else:
        _write(args.output, dumps(report) + "\n")
    return 0


def _sweep_row(param, value, profile, E, region_arg):
    region = region_arg or Region.of(profile)
    sol = solve_stationary(profile, E, UNITS)
    ct = channel_times(sol, region)
    reasons = ";".join(f"{c}:{r}" for c, r in ct.undefined.items())
    tT, tR = ct.tau_T, ct.tau_R
    return [
        value,
        sol.t.real,
        sol.t.imag,
        sol.transmission,
        None if tT is None else tT.real,
        None if tT is None else tT.imag,
        None if tR is None else tR.real,
        None if tR is None else tR.imag,
        ct.tau_d,
        group_delay(profile, E, UNITS),
        reasons,
    ]


def cmd_sweep(args) -> int:
    values = parse_range(args.range or "0.05:2:40", args.log, "--range")
    param = args.param
    region_arg = _region(args, PotentialProfile()) if args.region else None
    if param == "E":
        profile, _ = _profile(args)
        if np.any(values <= 0):
            raise InputError("energies must be positive")
        points = [(v, profile, float(v)) for v in values]
    else:
        if args.profile:
            raise InputError(f"--param {param} needs a rectangular --barrier")
        V0, d = _floats(args.barrier or "1,1", 2, "--barrier")
        base = PotentialProfile.rectangular(V0, d)
        E = _energy(args, base)
        points = []
        for v in values:
            V0_i, d_i = (V0, float(v)) if param == "d" else (float(v), d)
            if d_i <= 0:
                raise InputError("barrier widths must be positive")
            points.append((v, PotentialProfile.rectangular(V0_i, d_i), E))
    rows = ordered_map(lambda p: _sweep_row(param, p[0], p[1], p[2], region_arg), points)
    header = [param, "t_re", "t_im", "transmission", "tau_T_re", "tau_T_im", "tau_R_re", "tau_R_im", "tau_d", "tau_g", "reason"]
    _emit(args, header, rows, {"group_delay_reference": GROUP_DELAY_REFERENCE})
    return 0


def cmd_density(args) -> int:
    profile, _ = _profile(args)
    E = _energy(args, profile)
    if args.xrange:
        x = parse_range(args.xrange, False, "--xrange")
    else:
        lo, hi = profile.support
        pad = max(hi - lo, 1.0)
        x = np.linspace(lo - pad, hi + pad, 401)
    sol = solve_stationary(profile, E, UNITS)
    chans = ["T", "R", "dwell"] if args.channel in (None, "all") else [args.channel]
    if args.channel not in (None, "all", "T", "R", "dwell"):
        raise InputError("--channel must be T, R, dwell or all")
    dens = dwell_density(sol, x)
    header, cols, reasons = ["x"], [list(x)], []
    for ch in chans:
        if ch == "dwell":
            header.append("density_d")
            cols.append(list(dens.density_d))
            continue
        val = dens.density_T if ch == "T" else dens.density_R
        header += [f"density_{ch}_re", f"density_{ch}_im"]
        if val is None:
            cols += [[None] * len(x)] * 2
            reasons.append(f"{ch}:zero_{'transmission' if ch == 'T' else 'reflection'}_amplitude")
        else:
            cols += [list(val.real), list(val.imag)]
    header.append("reason")
    cols.append([";".join(reasons)] * len(x))
    _emit(args, header, [list(r) for r in zip(*cols)])
    return 0


def _spin_state(S: float, width: float | None):
    if width is None:
        return coherent_spin_state(S)
    return squeezed_spin_state(S, width)


def cmd_clock(args) -> int:
    profile, _ = _profile(args)
    E = _energy(args, profile)
    region = _region(args, profile)
    S = args.spin
    if 2 * S != int(2 * S) or S < 0.5:
        raise InputError("--spin must be a positive half-integer")
    if args.squeeze_sweep:
        swept = "width"
        widths = parse_range(args.squeeze_sweep, args.log, "--squeeze-sweep")
        points = [(float(w), args.omega, float(w)) for w in widths]
    else:
        swept = "omega_L"
        omegas = parse_range(args.range, args.log, "--range") if args.range else np.array([args.omega])
        points = [(float(w), float(w), None) for w in omegas]

    def one(p):
        value, omega, width = p
        if S == 0.5 and width is None:
            res = larmor_spin_half(profile, region, E, omega, args.channel, UNITS)
        else:
            res = larmor_spin_S(profile, region, E, omega, _spin_state(S, width), args.channel, UNITS)
        return [value, S, res.tau_y, res.tau_z, res.in_plane_angle, res.out_of_plane, res.norm]

    rows = ordered_map(one, points)
    _emit(args, [swept, "S", "tau_y", "tau_z", "in_plane_angle", "out_of_plane", "norm"], rows)
    return 0


def cmd_pointer(args) -> int:
    profile, _ = _profile(args)
    E = _energy(args, profile)
    region = _region(args, profile)
    if args.sigma_sweep:
        sigmas = parse_range(args.sigma_sweep, args.log, "--sigma-sweep")
    else:
        sigmas = np.array([args.sigma])

    def one(sigma):
        out = pointer_measurement(profile, region, E, args.g0, float(sigma), args.channel, UNITS)
        g = out.g0
        return [
            out.sigma,
            g,
            out.dQ,
            out.dP,
            out.dQ / g if g else 0.0,
            out.dP * 2 * out.sigma**2 / g if g else 0.0,
            out.norm,
        ]

    rows = ordered_map(one, sigmas)
    _emit(args, ["sigma", "g0", "dQ", "dP", "dQ_over_g0", "dP_2sigma2_over_g0", "norm"], rows)
    return 0


def cmd_verify(args) -> int:
    if args.cases < 1:
        raise InputError("--cases must be >= 1")
    if args.tolerance is not None and not args.tolerance >= 0:
        raise InputError("--tolerance must be >= 0")
    reports = run(args.seed, args.cases, args.tolerance)
    _write(args.output, "".join(r.to_json() + "\n" for r in reports))
    failed = [r for r in reports if not r.passed]
    for r in failed:
        print(f"FAIL {r.quantity}: primary={r.primary!r} oracle={r.oracle!r} ({r.metric} error "
              f"{r.rel_error if r.metric == 'rel' else r.abs_error:.3g} > {r.tolerance:.3g})", file=sys.stderr)
    print(f"{len(reports) - len(failed)}/{len(reports)} checks passed", file=sys.stderr)
    return 1 if failed else 0


def _common(p: argparse.ArgumentParser, energy=True, channel=None, fmt="csv") -> None:
    src = p.add_mutually_exclusive_group()
    src.add_argument("--barrier", metavar="V0,d", help="rectangular barrier V0 on [-d/2, d/2] (default 1,1)")
    src.add_argument("--profile", metavar="FILE", help='JSON list of {"x_left", "x_right", "V"} or {"V0", "d"}')
    if energy:
        e = p.add_mutually_exclusive_group()
        e.add_argument("--energy", type=float, help="incident energy")
        e.add_argument("--energy-frac", type=float, help="energy as a fraction of the maximum potential (default 0.5)")
    if channel:
        p.add_argument("--channel", default=channel[0], choices=channel[1], help=f"post-selected channel (default {channel[0]})")
    p.add_argument("--format", choices=["csv", "json"], default=fmt, help=f"output format (default {fmt})")
    p.add_argument("--output", metavar="FILE", help="write here instead of stdout")
    p.add_argument("--plot-data", metavar="FILE", help="also write whitespace-separated columns for plotting")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="barrierclock",
        description="Weak-value traversal times for 1D piecewise-constant barriers (hbar = m = 1).",
        epilog=f"Exit codes: 0 ok, 1 failed check, 2 bad input.  {ENV_THREADS} caps worker threads for sweeps. "
        "CSV: ',' separator, LF line endings, 17 significant digits, empty cell for undefined values.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")
    fmt = argparse.RawDescriptionHelpFormatter

    p = sub.add_parser("times", help="all times at one energy", description=TIMES_FIELDS, formatter_class=fmt)
    _common(p, fmt="json")
    p.add_argument("--region", metavar="x1,x2", help="region for the times (default: support)")
    p.set_defaults(func=cmd_times)

    p = sub.add_parser("sweep", help="times over a parameter grid", description=SWEEP_FIELDS, formatter_class=fmt)
    _common(p)
    p.add_argument("--param", choices=["E", "d", "V0"], default="E", help="swept parameter (default E)")
    p.add_argument("--range", metavar="START:STOP:COUNT", help="grid for the swept parameter (default 0.05:2:40)")
    p.add_argument("--log", action="store_true", help="geometric instead of linear spacing")
    p.add_argument("--region", metavar="x1,x2", help="region for the times (default: support of each profile)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("density", help="dwell densities along x", description=DENSITY_FIELDS, formatter_class=fmt)
    _common(p)
    p.add_argument("--channel", default="all", help="T, R, dwell or all (default all)")
    p.add_argument("--xrange", metavar="START:STOP:COUNT", help="sample points (default: support padded by its width)")
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("clock", help="Larmor spin clock", description=CLOCK_FIELDS, formatter_class=fmt)
    _common(p, channel=("T", ["T", "R"]))
    p.add_argument("--region", metavar="x1,x2", help="field region (default: support)")
    p.add_argument("--spin", type=float, default=0.5, help="spin S (default 0.5)")
    p.add_argument("--omega", type=float, default=1e-4, help="Larmor frequency (default 1e-4)")
    p.add_argument("--range", metavar="START:STOP:COUNT", help="sweep omega_L instead of a single --omega")
    p.add_argument("--squeeze-sweep", metavar="START:STOP:COUNT", help="sweep the S_z width of a squeezed state at fixed --omega")
    p.add_argument("--log", action="store_true", help="geometric spacing for the sweep")
    p.set_defaults(func=cmd_clock)

    p = sub.add_parser("pointer", help="Gaussian von Neumann pointer", description=POINTER_FIELDS, formatter_class=fmt)
    _common(p, channel=("T", ["T", "R"]))
    p.add_argument("--region", metavar="x1,x2", help="coupling region (default: support)")
    p.add_argument("--g0", type=float, default=1e-4, help="coupling strength (default 1e-4)")
    p.add_argument("--sigma", type=float, default=1.0, help="initial pointer position spread (default 1)")
    p.add_argument("--sigma-sweep", metavar="START:STOP:COUNT", help="sweep sigma")
    p.add_argument("--log", action="store_true", help="geometric spacing for the sweep")
    p.set_defaults(func=cmd_pointer)

    p = sub.add_parser("verify", help="seeded invariant and oracle suite", description=VERIFY_FIELDS, formatter_class=fmt)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED, help=f"random seed (default {DEFAULT_SEED})")
    p.add_argument("--cases", type=int, default=DEFAULT_CASES, help=f"number of random cases (default {DEFAULT_CASES})")
    p.add_argument("--tolerance", type=float, help="override every check tolerance")
    p.add_argument("--output", metavar="FILE", help="write JSON lines here instead of stdout")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, UndefinedChannelTime, ClockError, OracleError, ValueError) as exc:
        print(f"barrierclock {args.command}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

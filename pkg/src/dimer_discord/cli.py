"""Command-line front end.

Seven subcommands: ``theory`` (sweep the exact curves), ``landmarks``
(characteristic temperatures and maxima), ``from-chi`` / ``from-cm`` /
``from-neutron`` (the three experimental inversion channels), ``fit``
(Bleaney-Bowers least squares), and ``figure`` (re-plottable curve data).

Conventions: machine-readable output on stdout, notes and warnings on
stderr; exit 0 on success, 1 when a computation fails, 2 on usage errors.
Identical invocations produce byte-identical stdout.  The environment
variable ``DIMER_DISCORD_PRECISION`` overrides the printed number of
significant digits (default 6).
"""

import argparse
import math
import os
import sys

import numpy as np

from . import dataio, dimer_core, numerics, thermo
from .dataio import (
    PRESETS,
    ResultRecord,
    load_series,
    parse_value_with_uncertainty,
    result_from_correlator,
    write_results,
)
from .dimer_core import DimerParameters
from .errors import DimerDiscordError
from .numerics import TailModel, ValueWithUncertainty

__all__ = ["main", "build_parser"]


class _UsageError(Exception):
    """Bad arguments detected after argparse; maps to exit code 2."""


def _fmt(x: float, precision: int) -> str:
    return f"%.{precision}g" % x


# ---------------------------------------------------------------------------
# shared flags


def _add_parameter_flags(sub: argparse.ArgumentParser, *, coupling: bool = True) -> None:
    group = sub.add_argument_group("model parameters")
    group.add_argument(
        "--preset",
        choices=sorted(PRESETS),
        help="material preset supplying the coupling (and usually the g factor)",
    )
    if coupling:
        ex = group.add_mutually_exclusive_group()
        ex.add_argument(
            "--J-over-kB",
            dest="j_over_kb",
            type=float,
            metavar="K",
            help="exchange coupling J/k_B in kelvin (negative = antiferro)",
        )
        ex.add_argument(
            "--2J-over-kB",
            dest="j2_over_kb",
            type=float,
            metavar="K",
            help="the same coupling quoted as 2J/k_B",
        )
    gx = group.add_mutually_exclusive_group()
    gx.add_argument("--g-factor", dest="g_factor", type=float, help="scalar g factor")
    gx.add_argument(
        "--g-tensor",
        dest="g_tensor",
        type=float,
        nargs=3,
        metavar=("GX", "GY", "GZ"),
        help="g tensor principal values; powder-averaged to a scalar",
    )


def _resolve_parameters(
    args: argparse.Namespace, *, need_coupling: bool = True, need_g: bool = False
) -> DimerParameters:
    preset = dataio.preset(args.preset) if args.preset else None
    j_flag = getattr(args, "j_over_kb", None)
    j2_flag = getattr(args, "j2_over_kb", None)
    if preset is not None and (j_flag is not None or j2_flag is not None):
        raise _UsageError("give either --preset or an explicit coupling, not both")
    if j_flag is not None:
        j = j_flag
    elif j2_flag is not None:
        j = 0.5 * j2_flag
    elif preset is not None:
        j = preset.j_over_kb
    else:
        j = None
    if j is None:
        if need_coupling:
            raise _UsageError(
                "a coupling is required: --preset, --J-over-kB, or --2J-over-kB"
            )
        j = -1.0  # placeholder; commands that allow this never read the coupling
    if args.g_tensor is not None:
        g = tuple(args.g_tensor)
    elif args.g_factor is not None:
        g = args.g_factor
    else:
        g = preset.g_factor if preset is not None else None
    if need_g and g is None:
        raise _UsageError(
            "a g factor is required: --g-factor, --g-tensor, or a preset that has one"
        )
    return DimerParameters(j, g)


def _emit(records: list[ResultRecord], args: argparse.Namespace, precision: int) -> None:
    data = write_results(
        records,
        args.format,
        preset_name=getattr(args, "preset", None),
        precision=precision,
    )
    sys.stdout.write(data.decode("utf-8"))


def _note(text: str) -> None:
    print(f"note: {text}", file=sys.stderr)


# ---------------------------------------------------------------------------
# subcommands


def _cmd_theory(args: argparse.Namespace, precision: int) -> int:
    params = _resolve_parameters(args)
    j_abs = abs(params.j_over_kb)
    t_min = args.t_min if args.t_min is not None else 0.02 * j_abs
    t_max = args.t_max if args.t_max is not None else 6.0 * j_abs
    if not (0.0 < t_min < t_max):
        raise _UsageError(f"need 0 < t-min < t-max, got {t_min:g} and {t_max:g}")
    if args.n_points < 2:
        raise _UsageError(f"need at least 2 grid points, got {args.n_points}")
    if args.grid == "log":
        grid = np.geomspace(t_min, t_max, args.n_points)
    else:
        grid = np.linspace(t_min, t_max, args.n_points)
    records = []
    for t in grid:
        g = dimer_core.correlator_from_temperature(params, float(t))
        records.append(
            result_from_correlator(float(t), ValueWithUncertainty(g), "theory")
        )
    _emit(records, args, precision)
    return 0


def _cmd_landmarks(args: argparse.Namespace, precision: int) -> int:
    params = _resolve_parameters(args)
    j_abs = abs(params.j_over_kb)
    lines: list[tuple[str, object]] = [
        ("branch", "antiferro" if params.antiferro else "ferro"),
        ("J_over_kB_K", params.j_over_kb),
    ]
    g_scalar = None
    if params.g_factor is not None:
        g_scalar = (
            thermo.powder_g(*params.g_factor)
            if isinstance(params.g_factor, tuple)
            else params.g_factor
        )
        lines.append(("g_factor", g_scalar))

    if params.antiferro:
        t_death = dimer_core.entanglement_death_temperature(params)
        # the correlator is exactly -1/3 where the concurrence dies
        at_death = dimer_core.measures_from_correlator(-1.0 / 3.0)
        lines += [
            ("entanglement_death_kT_over_absJ", dimer_core.DEATH_TEMPERATURE_SCALE),
            ("entanglement_death_T_K", t_death),
            ("mutual_information_at_death_bits", at_death.mutual_information),
            ("discord_at_death_bits", at_death.discord),
        ]

        def q_of(t: float) -> float:
            return dimer_core.correlation_set(params, t).discord

        def c_of(t: float) -> float:
            return dimer_core.correlation_set(params, t).classical

        def e_of(t: float) -> float:
            return dimer_core.correlation_set(params, t).entanglement

        t_qe, v_qe = numerics.find_crossing(q_of, e_of, 0.2 * j_abs, 1.0 * j_abs)
        t_ce, v_ce = numerics.find_crossing(c_of, e_of, 0.2 * j_abs, 1.2 * j_abs)
        lines += [
            ("QE_crossing_kT_over_absJ", t_qe / j_abs),
            ("QE_crossing_T_K", t_qe),
            ("QE_crossing_bits", v_qe),
            ("CE_crossing_kT_over_absJ", t_ce / j_abs),
            ("CE_crossing_T_K", t_ce),
            ("CE_crossing_bits", v_ce),
            # the discord does not pass through this crossing; report it too
            ("CE_crossing_discord_bits", q_of(t_ce)),
        ]
    else:
        at_zero = dimer_core.measures_from_correlator(dimer_core.G_MAX)
        lines += [
            ("discord_T0_bits", at_zero.discord),
            ("classical_T0_bits", at_zero.classical),
            ("discord_to_classical_T0", at_zero.discord / at_zero.classical),
        ]

    t_peak, cm_peak = thermo.schottky_maximum(params)
    lines += [
        ("schottky_peak_kT_over_absJ", t_peak / j_abs),
        ("schottky_peak_T_K", t_peak),
        ("schottky_peak_cm_over_R", cm_peak),
    ]
    if params.antiferro and g_scalar is not None:
        t_chi, chi_max = thermo.susceptibility_maximum(params)
        reduced = chi_max * j_abs / (thermo.CODATA.curie_prefactor * g_scalar**2)
        lines += [
            ("chi_peak_kT_over_absJ", t_chi / j_abs),
            ("chi_peak_T_K", t_chi),
            ("chi_peak_emu_per_mol", chi_max),
            ("chi_peak_reduced", reduced),
        ]

    for key, value in lines:
        out = value if isinstance(value, str) else _fmt(float(value), precision)
        print(f"{key} = {out}")
    return 0


def _cmd_from_neutron(args: argparse.Namespace, precision: int) -> int:
    if (args.g_value is None) == (args.input is None):
        raise _UsageError("give exactly one of --G or --input")
    points: list[tuple[float, ValueWithUncertainty]] = []
    if args.g_value is not None:
        v = parse_value_with_uncertainty(args.g_value)
        t = args.temperature if args.temperature is not None else math.nan
        points.append((t, v))
    else:
        series = load_series(args.input, "correlator")
        for i in range(len(series)):
            s = float(series.sigmas[i]) if series.sigmas is not None else 0.0
            points.append(
                (float(series.temperatures[i]), ValueWithUncertainty(float(series.values[i]), s))
            )
    records = []
    failures = 0
    for i, (t, v) in enumerate(points):
        try:
            g = thermo.clamp_measured_correlator(v.value, "neutron point")
            records.append(result_from_correlator(t, ValueWithUncertainty(g, v.sigma), "neutron"))
        except DimerDiscordError as exc:
            if args.g_value is not None:
                raise  # a single explicit point has nothing to fall back on
            failures += 1
            print(f"row {i + 1} (T = {t:g} K): {exc}", file=sys.stderr)
    if points and failures == len(points):
        return 1
    _emit(records, args, precision)
    return 0


def _cmd_from_chi(args: argparse.Namespace, precision: int) -> int:
    # the inversion reads only the g factor; the coupling may stay unset
    params = _resolve_parameters(args, need_coupling=False, need_g=True)
    series = load_series(args.input, "susceptibility", normalization=f"per_{args.per}")
    records = []
    failures = 0
    for i in range(len(series)):
        t = float(series.temperatures[i])
        chi = float(series.values[i])
        sig = float(series.sigmas[i]) if series.sigmas is not None else 0.0
        try:
            g_vwu = numerics.propagate_uncertainty(
                lambda c: thermo.correlator_from_susceptibility(params, c, t),
                ValueWithUncertainty(chi, sig),
            )
            records.append(result_from_correlator(t, g_vwu, "magnetometric"))
        except DimerDiscordError as exc:
            failures += 1
            print(f"row {i + 1} (T = {t:g} K): {exc}", file=sys.stderr)
    if len(series) and failures == len(series):
        return 1
    _emit(records, args, precision)
    return 0


def _cmd_from_cm(args: argparse.Namespace, precision: int) -> int:
    params = _resolve_parameters(args)
    if args.route == "invert":
        if args.temperature is None or args.cm_over_r is None:
            raise _UsageError("route invert needs --T and --cm-over-R")
        t_peak, _ = thermo.schottky_maximum(params)
        side = "hot" if args.temperature >= t_peak else "cold"
        _note(
            f"T = {args.temperature:g} K is on the {side} side of the Schottky peak "
            f"({_fmt(t_peak, precision)} K)"
        )
        g = thermo.correlator_from_specific_heat(params, args.cm_over_r, side=side)
        records = [
            result_from_correlator(args.temperature, ValueWithUncertainty(g), "calorimetric")
        ]
        _emit(records, args, precision)
        return 0

    # integrate route
    if args.input is None and args.tail_a is None:
        raise _UsageError("route integrate needs --input and/or --tail-a/--tail-from")
    if (args.tail_a is None) != (args.tail_from is None):
        raise _UsageError("--tail-a and --tail-from go together")
    tail = TailModel(args.tail_a, args.tail_from) if args.tail_a is not None else None
    if args.input is not None:
        series = load_series(args.input, "specific_heat", normalization=f"per_{args.per}")
        t_arr, v_arr = series.temperatures, series.values
    else:
        t_arr = np.array([])
        v_arr = np.array([])
    if t_arr.size == 0 and args.u0_over_r is not None:
        _note(
            "tail-only record: the energy anchors at u(infinity) = 0, "
            "so --u0-over-R is ignored"
        )
    t_end, u = thermo.internal_energy_from_specific_heat(
        t_arr, v_arr, tail=tail, u0_over_r=args.u0_over_r
    )
    _note(f"u({_fmt(t_end, precision)} K)/R = {_fmt(u, precision)} K")
    g = thermo.correlator_from_internal_energy(params, u)
    records = [result_from_correlator(t_end, ValueWithUncertainty(g), "calorimetric")]
    _emit(records, args, precision)
    return 0


def _cmd_fit(args: argparse.Namespace, precision: int) -> int:
    init = _resolve_parameters(args, need_g=True)
    series = load_series(args.input, "susceptibility", normalization=f"per_{args.per}")
    if len(series) < 3:
        raise _UsageError(f"fitting needs at least 3 points, file has {len(series)}")
    result = numerics.fit_bleaney_bowers(
        series.temperatures, series.values, init, sigma=series.sigmas
    )
    fitted = result.parameters
    chi_model = np.array(
        [thermo.susceptibility(fitted, float(t)) for t in series.temperatures]
    )
    residual = chi_model - series.values
    if args.format == "json":
        import json

        doc = {
            "converged": result.converged,
            "J_over_kB_K": float(_fmt(fitted.j_over_kb, precision)),
            "twoJ_over_kB_K": float(_fmt(2.0 * fitted.j_over_kb, precision)),
            "g_factor": float(_fmt(fitted.g_factor, precision)),
            "residual_norm": float(_fmt(result.residual_norm, precision)),
            "evaluations": result.evaluations,
            "n_points": len(series),
            "rows": [
                {
                    "T_K": float(_fmt(float(series.temperatures[i]), precision)),
                    "chi_emu_per_mol": float(_fmt(float(series.values[i]), precision)),
                    "chi_model": float(_fmt(float(chi_model[i]), precision)),
                    "residual": float(_fmt(float(residual[i]), precision)),
                }
                for i in range(len(series))
            ],
        }
        print(json.dumps(doc, indent=2))
    else:
        print(f"converged = {'true' if result.converged else 'false'}")
        print(f"J_over_kB_K = {_fmt(fitted.j_over_kb, precision)}")
        print(f"twoJ_over_kB_K = {_fmt(2.0 * fitted.j_over_kb, precision)}")
        print(f"g_factor = {_fmt(fitted.g_factor, precision)}")
        print(f"residual_norm = {_fmt(result.residual_norm, precision)}")
        print(f"evaluations = {result.evaluations}")
        print(f"n_points = {len(series)}")
        print("T_K,chi_emu_per_mol,chi_model,residual")
        for i in range(len(series)):
            print(
                ",".join(
                    _fmt(float(x), precision)
                    for x in (series.temperatures[i], series.values[i], chi_model[i], residual[i])
                )
            )
    if not result.converged:
        print("fit did not converge; best parameters so far reported", file=sys.stderr)
        return 1
    return 0


def _figure_data(fig: int, n: int) -> tuple[str, list[str], list[list[float]]]:
    if fig in (1, 2):
        params = DimerParameters(-1.0 if fig == 1 else 1.0)
        grid = np.geomspace(0.01, 5.0, n)
        rows = []
        for tau in grid:
            m = dimer_core.correlation_set(params, float(tau))
            g = dimer_core.correlator_from_temperature(params, float(tau))
            x = abs(g) if fig == 1 else g
            rows.append([float(tau), x, m.discord, m.classical, m.entanglement])
        label = "antiferro" if fig == 1 else "ferro"
        g_col = "absG" if fig == 1 else "G"
        return (
            f"{label} dimer correlations vs reduced temperature",
            ["kT_over_absJ", g_col, "Q", "C", "E"],
            rows,
        )
    if fig == 3:
        grid = np.linspace(dimer_core.G_MIN, dimer_core.G_MAX, n)
        rows = [[float(g), dimer_core.discord(float(g))] for g in grid]
        return "discord vs correlator", ["G", "Q"], rows
    if fig == 4:
        grid = np.linspace(dimer_core.G_MIN, dimer_core.G_MAX, n)
        rows = [[float(g), thermo.specific_heat_from_correlator(float(g))] for g in grid]
        return "magnetic specific heat vs correlator", ["G", "cm_over_R"], rows
    if fig == 5:
        hydrate = dataio.preset("copper-acetate-hydrate").parameters
        anhydrous = dataio.preset("copper-acetate-anhydrous").parameters
        grid = np.geomspace(1.0, 500.0, n)
        rows = []
        for t in grid:
            qh = dimer_core.correlation_set(hydrate, float(t)).discord
            qa = dimer_core.correlation_set(anhydrous, float(t)).discord
            rows.append([float(t), qh, qa])
        return (
            "copper acetate discord vs temperature",
            ["T_K", "Q_copper_acetate_hydrate", "Q_copper_acetate_anhydrous"],
            rows,
        )
    # fig == 6
    params = dataio.preset("cu2l-oac-ferro").parameters
    grid = np.geomspace(1.0, 500.0, n)
    rows = []
    for t in grid:
        g = dimer_core.correlator_from_temperature(params, float(t))
        m = dimer_core.correlation_set(params, float(t))
        rows.append([float(t), g, m.discord, m.classical, m.entanglement])
    return (
        "ferro complex correlations vs temperature",
        ["T_K", "G", "Q", "C", "E"],
        rows,
    )


def _cmd_figure(args: argparse.Namespace, precision: int) -> int:
    if args.n_points < 2:
        raise _UsageError(f"need at least 2 grid points, got {args.n_points}")
    title, columns, rows = _figure_data(args.id, args.n_points)
    if args.format == "json":
        import json

        doc = {
            "figure": args.id,
            "title": title,
            "columns": columns,
            "rows": [[float(_fmt(v, precision)) for v in row] for row in rows],
        }
        print(json.dumps(doc, indent=2))
    else:
        print(f"# figure {args.id}: {title}")
        print(",".join(columns))
        for row in rows:
            print(",".join(_fmt(v, precision) for v in row))
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dimer-discord",
        description=(
            "Quantum discord and related correlations of a spin-1/2 Heisenberg "
            "dimer, from theory or from measured susceptibility, specific heat, "
            "or neutron correlator data."
        ),
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    fmt_kwargs = dict(choices=["csv", "json"], default="csv", help="output format")

    p = sub.add_parser("theory", help="sweep the exact correlation curves over T")
    _add_parameter_flags(p)
    p.add_argument("--t-min", type=float, metavar="K", help="grid start (default 0.02 |J|/kB)")
    p.add_argument("--t-max", type=float, metavar="K", help="grid end (default 6 |J|/kB)")
    p.add_argument("--n-points", type=int, default=400, help="grid size (default 400)")
    p.add_argument("--grid", choices=["log", "linear"], default="log", help="grid spacing")
    p.add_argument("--format", **fmt_kwargs)
    p.set_defaults(func=_cmd_theory)

    p = sub.add_parser("landmarks", help="characteristic temperatures and maxima")
    _add_parameter_flags(p)
    p.set_defaults(func=_cmd_landmarks)

    p = sub.add_parser("from-neutron", help="discord from a measured spin correlator")
    p.add_argument(
        "--G",
        dest="g_value",
        metavar="VALUE",
        help='correlator with optional error, e.g. --G="-0.54(9)" (mind the =)',
    )
    p.add_argument("--T", dest="temperature", type=float, metavar="K",
                   help="temperature label for the single-point form")
    p.add_argument("--input", metavar="FILE", help="correlator series CSV (T_K,G[,sigma_G])")
    p.add_argument("--format", **fmt_kwargs)
    p.set_defaults(func=_cmd_from_neutron)

    p = sub.add_parser("from-chi", help="discord from susceptibility data")
    _add_parameter_flags(p)
    p.add_argument("--input", required=True, metavar="FILE",
                   help="susceptibility CSV (T_K,chi_emu_per_mol[,sigma_chi])")
    p.add_argument("--per", choices=["dimer", "monomer"], default="dimer",
                   help="normalization of the input file (default dimer)")
    p.add_argument("--format", **fmt_kwargs)
    p.set_defaults(func=_cmd_from_chi)

    p = sub.add_parser("from-cm", help="discord from magnetic specific heat")
    _add_parameter_flags(p)
    p.add_argument("--route", choices=["invert", "integrate"], required=True,
                   help="invert one (T, c_m/R) point or integrate a record to u(T)")
    p.add_argument("--T", dest="temperature", type=float, metavar="K",
                   help="invert route: temperature of the measured point")
    p.add_argument("--cm-over-R", dest="cm_over_r", type=float, metavar="X",
                   help="invert route: measured c_m/R")
    p.add_argument("--input", metavar="FILE",
                   help="integrate route: specific heat CSV (T_K,cm_over_R[,sigma])")
    p.add_argument("--tail-a", dest="tail_a", type=float, metavar="A",
                   help="integrate route: high-T tail coefficient, c_m/R = A/T^2")
    p.add_argument("--tail-from", dest="tail_from", type=float, metavar="K",
                   help="integrate route: temperature the tail takes over")
    p.add_argument("--u0-over-R", dest="u0_over_r", type=float, metavar="K",
                   help="integrate route: ground state energy u(0)/R, else estimated")
    p.add_argument("--per", choices=["dimer", "monomer"], default="dimer",
                   help="normalization of the input file (default dimer)")
    p.add_argument("--format", **fmt_kwargs)
    p.set_defaults(func=_cmd_from_cm)

    p = sub.add_parser("fit", help="least-squares Bleaney-Bowers fit of chi(T)")
    _add_parameter_flags(p)
    p.add_argument("--input", required=True, metavar="FILE",
                   help="susceptibility CSV (T_K,chi_emu_per_mol[,sigma_chi])")
    p.add_argument("--per", choices=["dimer", "monomer"], default="dimer",
                   help="normalization of the input file (default dimer)")
    p.add_argument("--format", **fmt_kwargs)
    p.set_defaults(func=_cmd_fit)

    p = sub.add_parser("figure", help="emit re-plottable curve data")
    p.add_argument("id", type=int, choices=[1, 2, 3, 4, 5, 6], help="figure number")
    p.add_argument("--n-points", type=int, default=400, help="grid size (default 400)")
    p.add_argument("--format", **fmt_kwargs)
    p.set_defaults(func=_cmd_figure)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    raw = os.environ.get("DIMER_DISCORD_PRECISION", "6")
    try:
        precision = int(raw)
    except ValueError:
        print(f"usage error: DIMER_DISCORD_PRECISION must be an integer, got {raw!r}",
              file=sys.stderr)
        return 2
    if not (1 <= precision <= 17):
        print(f"usage error: DIMER_DISCORD_PRECISION must be in [1, 17], got {precision}",
              file=sys.stderr)
        return 2
    try:
        return args.func(args, precision)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except DimerDiscordError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

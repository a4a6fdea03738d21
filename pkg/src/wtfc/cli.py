"""Command-line front end.

Subcommands: derive | pe | capacity | sweep | compare-shadowing. Settings
come from defaults, then --config file, then WTFC_* environment variables,
then repeated --set key=value, then dedicated flags; later sources win.
Output files start with a ``# config:`` comment holding the fully resolved
configuration, from which the run can be reproduced byte for byte.

Exit codes: 0 success, 1 I/O or internal failure, 2 invalid configuration,
3 sweep produced skipped rows without --allow-skips.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .capacity import awgn_capacity, dmc_capacity, ifsk_variant
from .config import (
    ConfigError,
    RunConfig,
    build_run_config,
    config_items,
    env_overrides,
    format_value,
    merge_sources,
    parse_value,
    read_config_file,
)
from .detector import estimate_pe
from .scheme import amplitude, derive_scheme
from .sweep import SweepResult, SweepSpec, compare_shadowing, run_sweep

CSV_COLUMNS = [
    "axis_name",
    "axis_value",
    "variant",
    "p_e",
    "ci_half_width_95",
    "capacity_bps",
    "ceiling_bps",
    "awgn_bps",
    "shadowing_enabled",
    "seed",
    "iterations",
    "skipped_reason",
]


def _format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def header_line(config: RunConfig, extra: list[tuple[str, str]]) -> str:
    """Single ``# config:`` line with every result-determining setting."""
    items = config_items(config) + extra
    return "# config: " + " ".join(f"{key}={value}" for key, value in items)


def header_to_config_text(line: str) -> str:
    """Turn a ``# config:`` header back into config-file text."""
    prefix = "# config: "
    if not line.startswith(prefix):
        raise ValueError("not a config header line")
    return "\n".join(line[len(prefix):].split(" ")) + "\n"


def _sweep_extra_items(values: dict, sigma_db: float | None) -> list[tuple[str, str]]:
    items = [
        ("axis", values["axis"]),
        ("grid", format_value(tuple(values["grid"]))),
        ("variants", format_value(tuple(values["variants"]))),
        ("include_awgn", format_value(values["include_awgn"])),
        ("awgn_power", values["awgn_power"]),
        ("snr_columns", format_value(values["snr_columns"])),
    ]
    if sigma_db is not None:
        items.append(("sigma_db", format_value(sigma_db)))
    return items


def write_sweep_csv(
    path: str,
    result: SweepResult,
    header: str,
    snr_columns: bool = False,
    loss_column: bool = False,
) -> None:
    columns = list(CSV_COLUMNS)
    if loss_column:
        columns.append("capacity_loss_pct")
    if snr_columns:
        columns += ["snr_db_bw", "snr_db_n0"]
    lines = [header, ",".join(columns)]
    for row in result.rows:
        cells = [_format_cell(getattr(row, name)) for name in columns]
        lines.append(",".join(cells))
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write("\n".join(lines) + "\n")


def _sweep_rows_json(result: SweepResult, snr_columns: bool, loss_column: bool):
    columns = list(CSV_COLUMNS)
    if loss_column:
        columns.append("capacity_loss_pct")
    if snr_columns:
        columns += ["snr_db_bw", "snr_db_n0"]
    return [{name: getattr(row, name) for name in columns} for row in result.rows]


def _collect_values(args) -> dict:
    sources = [{}]
    if args.config:
        sources.append(read_config_file(args.config))
    sources.append(env_overrides())
    overrides: dict = {}
    for assignment in args.set or []:
        if "=" not in assignment:
            raise ConfigError(assignment, "expected key=value after --set")
        key, _, text = assignment.partition("=")
        key = key.strip()
        overrides[key] = parse_value(key, text, "--set")
    sources.append(overrides)
    flags: dict = {}
    if args.seed is not None:
        flags["seed"] = args.seed
    if args.iters is not None:
        flags["iterations"] = args.iters
    sources.append(flags)
    return merge_sources(*sources)


def _derive_report(config: RunConfig) -> dict:
    params = derive_scheme(config.inputs)
    config.require_power()
    p_t = config.resolved_p_t()
    p_r = config.resolved_p_r()
    return {
        "q": params.q,
        "delta_f_hz": params.delta_f_hz,
        "tone_count": params.tone_count,
        "slots_per_cycle": params.slots_per_cycle,
        "alphabet_size": params.alphabet_size,
        "bits_per_symbol": params.bits_per_symbol,
        "amplitude": amplitude(p_t, params),
        "ceiling_bps": params.ceiling_bps(),
        "p_t": p_t,
        "p_r": p_r,
    }


def _print_report(report: dict, fmt: str) -> None:
    if fmt == "json":
        print(json.dumps(report, indent=2, sort_keys=True))
    else:
        for key, value in report.items():
            print(f"{key} = {_format_cell(value)}")


def cmd_derive(args) -> int:
    values = _collect_values(args)
    config = build_run_config(values)
    report = _derive_report(config)
    _print_report(report, args.format)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            if args.format == "json":
                json.dump(report, handle, indent=2, sort_keys=True)
                handle.write("\n")
            else:
                handle.write(header_line(config, []) + "\n")
                for key, value in report.items():
                    handle.write(f"{key} = {_format_cell(value)}\n")
    return 0


def cmd_pe(args) -> int:
    values = _collect_values(args)
    config = build_run_config(values)
    config.require_power()
    params = derive_scheme(config.inputs)
    if args.variant == "ifsk":
        params = ifsk_variant(params)
    estimate = estimate_pe(
        params,
        config.model,
        config.resolved_p_t(),
        config.n_0,
        config.iterations,
        config.seed,
        threads=args.threads,
        hold_mean_rx_power=config.hold_mean_rx_power,
    )
    report = {
        "variant": params.variant,
        "p_e": estimate.p_e,
        "ci_half_width_95": estimate.half_width_95,
        "iterations": estimate.iterations,
        "seed": estimate.seed,
        "alphabet_size": params.alphabet_size,
    }
    _print_report(report, args.format)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(header_line(config, [("variant", params.variant)]) + "\n")
            handle.write("variant,p_e,ci_half_width_95,iterations,seed\n")
            handle.write(
                ",".join(
                    _format_cell(report[key])
                    for key in ("variant", "p_e", "ci_half_width_95", "iterations", "seed")
                )
                + "\n"
            )
    return 0


def cmd_capacity(args) -> int:
    values = _collect_values(args)
    config = build_run_config(values)
    config.require_power()
    params = derive_scheme(config.inputs)
    if args.variant == "ifsk":
        params = ifsk_variant(params)
    if args.pe is not None:
        p_e = args.pe
        report_pe = {"p_e": p_e, "iterations": None, "seed": None}
    else:
        estimate = estimate_pe(
            params,
            config.model,
            config.resolved_p_t(),
            config.n_0,
            config.iterations,
            config.seed,
            threads=args.threads,
            hold_mean_rx_power=config.hold_mean_rx_power,
        )
        p_e = estimate.p_e
        report_pe = {
            "p_e": estimate.p_e,
            "iterations": estimate.iterations,
            "seed": estimate.seed,
        }
    result = dmc_capacity(
        p_e,
        params.alphabet_size,
        config.inputs.duty_cycle,
        config.inputs.symbol_time_s,
        scheme_tag=params.variant,
    )
    report = {
        "variant": params.variant,
        "capacity_bps": result.capacity_bps,
        "ceiling_bps": result.ceiling_bps,
        "alphabet_size": params.alphabet_size,
        "awgn_bps": awgn_capacity(
            config.resolved_p_r(), config.n_0, config.inputs.bandwidth_hz
        ),
        **report_pe,
    }
    _print_report(report, args.format)
    return 0


def _run_sweep_command(args, paired: bool) -> int:
    values = _collect_values(args)
    if args.axis:
        values["axis"] = args.axis
    if args.grid:
        values["grid"] = parse_value("grid", args.grid, "--grid")
    if args.variants:
        values["variants"] = parse_value("variants", args.variants, "--variants")
    if args.allow_skips:
        values["allow_skips"] = True
    for key in ("axis", "grid"):
        if key not in values:
            raise ConfigError(key, "required for sweeps")
    if not args.out:
        raise ConfigError("out", "sweeps write a results file; pass --out PATH")
    sigma_db = None
    if paired:
        if args.sigma_db is not None:
            values["sigma_db"] = args.sigma_db
        if "sigma_db" not in values:
            raise ConfigError("sigma_db", "required for compare-shadowing")
        sigma_db = values["sigma_db"]

    config = build_run_config(values)
    spec = SweepSpec(
        base=config,
        axis=values["axis"],
        grid=tuple(values["grid"]),
        variants=tuple(values["variants"]),
        include_awgn=values["include_awgn"],
        awgn_power=values["awgn_power"],
    )
    if paired:
        result = compare_shadowing(spec, sigma_db, threads=args.threads)
    else:
        result = run_sweep(spec, threads=args.threads)

    header = header_line(config, _sweep_extra_items(values, sigma_db))
    snr_columns = values["snr_columns"]
    if args.format == "json":
        payload = {
            "config": dict(
                config_items(config) + _sweep_extra_items(values, sigma_db)
            ),
            "rows": _sweep_rows_json(result, snr_columns, paired),
        }
        with open(args.out, "w", encoding="utf-8") as handle:
            json.dump(payload, handle, indent=2)
            handle.write("\n")
    else:
        write_sweep_csv(
            args.out, result, header,
            snr_columns=snr_columns, loss_column=paired,
        )

    for variant in spec.variants:
        rows = [r for r in result.rows if r.variant == variant]
        done = [r for r in rows if r.skipped_reason is None]
        capacities = [r.capacity_bps for r in done]
        span = (
            f"capacity {min(capacities):.6g}..{max(capacities):.6g} bps"
            if capacities
            else "no completed rows"
        )
        print(
            f"{variant}: {len(done)}/{len(rows)} rows, "
            f"{len(rows) - len(done)} skipped, {span}"
        )

    skipped = sum(1 for r in result.rows if r.skipped_reason is not None)
    if skipped and not values["allow_skips"]:
        print(
            f"error: {skipped} grid point row(s) skipped; pass --allow-skips "
            "to accept a partial grid",
            file=sys.stderr,
        )
        return 3
    return 0


def _add_common_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="path to a key = value config file")
    parser.add_argument(
        "--set",
        action="append",
        metavar="KEY=VALUE",
        help="override any config key (repeatable)",
    )
    parser.add_argument("--seed", type=int, help="rng seed")
    parser.add_argument("--iters", type=int, help="Monte Carlo iterations")
    parser.add_argument("--out", help="output file path")
    parser.add_argument(
        "--format", choices=("csv", "json"), default="csv", help="output format"
    )
    parser.add_argument(
        "--threads",
        type=int,
        default=1,
        help="worker threads; changes speed, never results",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wtfc",
        description="Wideband time-frequency coding link-level simulator",
    )
    parser.add_argument("--version", action="version", version=__version__)
    commands = parser.add_subparsers(dest="command", required=True)

    derive = commands.add_parser("derive", help="derive and print scheme parameters")
    _add_common_arguments(derive)
    derive.set_defaults(handler=cmd_derive)

    pe = commands.add_parser("pe", help="estimate the symbol error probability")
    _add_common_arguments(pe)
    pe.add_argument("--variant", choices=("wtfc", "ifsk"), default="wtfc")
    pe.set_defaults(handler=cmd_pe)

    cap = commands.add_parser("capacity", help="estimate capacity in bits/s")
    _add_common_arguments(cap)
    cap.add_argument("--variant", choices=("wtfc", "ifsk"), default="wtfc")
    cap.add_argument(
        "--pe",
        type=float,
        help="skip simulation and convert this error probability directly",
    )
    cap.set_defaults(handler=cmd_capacity)

    sweep = commands.add_parser("sweep", help="run a parameter sweep to CSV/JSON")
    _add_common_arguments(sweep)
    sweep.add_argument("--axis", help="swept variable")
    sweep.add_argument("--grid", help="comma-separated axis values")
    sweep.add_argument("--variants", help="comma-separated: wtfc,ifsk")
    sweep.add_argument("--allow-skips", action="store_true")
    sweep.set_defaults(handler=lambda args: _run_sweep_command(args, paired=False))

    compare = commands.add_parser(
        "compare-shadowing",
        help="run a sweep with shadowing off and on, same seeds",
    )
    _add_common_arguments(compare)
    compare.add_argument("--axis", help="swept variable")
    compare.add_argument("--grid", help="comma-separated axis values")
    compare.add_argument("--variants", help="comma-separated: wtfc,ifsk")
    compare.add_argument("--allow-skips", action="store_true")
    compare.add_argument("--sigma-db", type=float, help="shadowing std dev in dB")
    compare.set_defaults(handler=lambda args: _run_sweep_command(args, paired=True))

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

"""Command-line entry point: ``elastica {simulate,campaign,analyze,plot,dump-field}``."""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

from .beam import ConfigError, dump_field
from .campaign import (
    CampaignConfig, CampaignError, SchemaError, analyze, draw_p, execute_trial,
    load_config, read_records, records_to_csv, run_campaign,
)
from .complexity import serialize_system

log = logging.getLogger("elastica")

EXIT_USAGE = 2
EXIT_FAILURE = 1


class UsageError(Exception):
    """Bad arguments or unreadable inputs; exits with status 2."""


def _u64(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError(f"{text} is not an unsigned 64-bit integer")
    return value


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {text}")
    return value


def _probability(text: str) -> float:
    value = float(text)
    if not 0.0 < value <= 1.0:
        raise argparse.ArgumentTypeError(f"p must lie in (0, 1], got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="elastica",
        description="Vibrating-beam complexity experiments: simulate, run campaigns, analyze.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress details")
    sub = parser.add_subparsers(dest="verb", metavar="VERB", required=True)

    def config_opt(p):
        p.add_argument("--config", metavar="PATH",
                       help="key=value config file (defaults to the reference setup)")

    def trial_opts(p):
        config_opt(p)
        p.add_argument("--seed", type=_u64, default=0, metavar="U64", help="trial seed (default 0)")
        p.add_argument("--p", type=_probability, default=None,
                       help="system probability; drawn from the seed when omitted")
        p.add_argument("--no-input", action="store_true", help="do not apply the input force")

    p = sub.add_parser("simulate", help="run one trial; write field table and record row")
    trial_opts(p)
    p.add_argument("--out", required=True, metavar="PATH",
                   help="field table path; the record row goes to PATH.record.csv")
    p.add_argument("--system-out", metavar="PATH", help="also write the serialized system description")

    p = sub.add_parser("dump-field", help="write the displacement grid of one trial")
    trial_opts(p)
    p.add_argument("--out", metavar="PATH", help="output path (default: stdout)")

    p = sub.add_parser("campaign", help="run seeded trials and write the CSV")
    config_opt(p)
    p.add_argument("--trials", type=_positive, default=None, metavar="N")
    p.add_argument("--seed", type=_u64, default=None, metavar="U64", help="master seed")
    p.add_argument("--no-input", action="store_true", help="run the no-input campaign")
    p.add_argument("--out", required=True, metavar="PATH", help="CSV output path")

    p = sub.add_parser("analyze", help="fit the campaign regressions and write the report")
    p.add_argument("csv", nargs="+", metavar="CSV",
                   help="campaign CSVs (with-input first, then optionally no-input)")
    p.add_argument("--k", type=_positive, default=7, metavar="N", help="neighbourhood size")
    p.add_argument("--report", required=True, metavar="DIR", help="report directory")
    p.add_argument("--no-figures", action="store_true", help="skip SVG rendering")

    p = sub.add_parser("plot", help="re-render SVG figures from a report directory")
    p.add_argument("--report", required=True, metavar="DIR")
    return parser


def _campaign_config(path) -> CampaignConfig:
    if path is None:
        return CampaignConfig()
    if not Path(path).is_file():
        raise UsageError(f"config file not found: {path}")
    try:
        return load_config(path)
    except (ValueError, ConfigError) as exc:
        raise UsageError(f"bad config file {path}: {exc}") from exc


def _run_single(args):
    config = replace(_campaign_config(args.config), with_input=not args.no_input)
    p = args.p if args.p is not None else draw_p(args.seed)
    return config, execute_trial(config, args.seed, p)


def cmd_simulate(args) -> int:
    config, result = _run_single(args)
    out = Path(args.out)
    with open(out, "w") as fh:
        dump_field(result.field, config.beam, fh)
    record_path = out.with_name(out.name + ".record.csv")
    record_path.write_text(records_to_csv([result.record]))
    if args.system_out:
        Path(args.system_out).write_bytes(serialize_system(result.force, config.beam).to_bytes())
    rec = result.record
    freq = "null" if rec.freq_ones is None else f"{rec.freq_ones:.9g}"
    print(f"M={rec.m_ratio:.9g} O={rec.o_ratio:.9g} freq_ones={freq}")
    return 0


def cmd_dump_field(args) -> int:
    config, result = _run_single(args)
    if args.out:
        with open(args.out, "w") as fh:
            dump_field(result.field, config.beam, fh)
    else:
        dump_field(result.field, config.beam, sys.stdout)
    return 0


def cmd_campaign(args) -> int:
    config = _campaign_config(args.config)
    changes = {"with_input": False} if args.no_input else {}
    if args.trials is not None:
        changes["trials"] = args.trials
    if args.seed is not None:
        changes["master_seed"] = args.seed
    config = replace(config, **changes)
    step = max(1, config.trials // 20)

    def progress(done, total):
        if done % step == 0 or done == total:
            print(f"{done}/{total} trials", file=sys.stderr, flush=True)

    run_campaign(config, csv_path=args.out, progress=progress)
    return 0


def cmd_analyze(args) -> int:
    from .report import write_report

    if len(args.csv) > 2:
        raise UsageError("analyze takes at most two CSVs (with-input, no-input)")
    records = []
    for path in args.csv:
        if not Path(path).is_file():
            raise UsageError(f"CSV not found: {path}")
        try:
            records.extend(read_records(path))
        except SchemaError as exc:
            raise UsageError(f"{path}: schema mismatch in column {exc.column!r}: {exc}") from exc
    report = analyze(records, k=args.k)
    for name, reason in report.absent.items():
        log.warning("%s absent: %s", name, reason)
    write_report(report, args.report, figures=not args.no_figures)
    fit = report.fit_Y_on_X
    if fit is not None:
        print(f"O = {fit.intercept:.6g} {fit.slope:+.6g} M  (R^2={fit.r_squared:.4g}, p={fit.p_value:.3g})")
    return 0


def cmd_plot(args) -> int:
    from .report import render_figures

    outdir = Path(args.report)
    if not outdir.is_dir():
        raise UsageError(f"report directory not found: {outdir}")
    written = render_figures(outdir)
    print(f"{len(written)} figures written to {outdir}")
    return 0


COMMANDS = {
    "simulate": cmd_simulate,
    "dump-field": cmd_dump_field,
    "campaign": cmd_campaign,
    "analyze": cmd_analyze,
    "plot": cmd_plot,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.verb](args)
    except UsageError as exc:
        print(f"elastica {args.verb}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CampaignError, ConfigError, ValueError, OSError) as exc:
        print(f"elastica {args.verb}: error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())

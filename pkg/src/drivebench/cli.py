"""Command-line entry point wiring all modules together.

Subcommands: validate, metrics, map, roads, spectrum, synth, report. Every
report embeds the effective configuration under a `config` key and all
numeric output uses fixed six-decimal formatting, so published numbers are
reproducible byte for byte.

Exit codes: 0 success, 1 validation failure, 2 I/O or parse error.
"""
from __future__ import annotations

import argparse
import json
import re
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields
from pathlib import Path

from . import figures, reporting
from .errors import DrivebenchError
from .gridmap import build_grid_multi, export_grid, parse_region, region_metrics
from .ingest import parse_log_file, serialize_log
from .metrics import compute_metrics, group_key_for, log_totals, segment_totals
from .roads import classify_trip, load_network, per_type_metrics, speed_compliance
from .segmentation import build_segments
from .spectrum import compare_modes
from .synth import parse_scenario, synth_log
from .telemetry import validate_log


@dataclass(frozen=True)
class RunConfig:
    """Tunable knobs shared by the subcommands; defaults centralized here."""

    distance_method: str = "path"
    min_dwell: float = 0.0
    cell_size: float = 1.0
    count_mode: str = "sample"
    match_tolerance: float = 5.0
    resample_rate: float = 10.0
    window: str = "hann"
    grouping: str = "log"

    def to_obj(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def _load_config(args: argparse.Namespace) -> RunConfig:
    """Flags override config-file values, which override the defaults."""
    values: dict = {}
    if getattr(args, "config", None):
        raw = json.loads(Path(args.config).read_text(encoding="utf-8"))
        known = {f.name for f in fields(RunConfig)}
        unknown = set(raw) - known
        if unknown:
            raise DrivebenchError(f"unknown config key(s): {', '.join(sorted(unknown))}")
        values.update(raw)
    flag_names = {
        "distance_method": "distance_method",
        "min_dwell": "min_dwell",
        "cell_size": "cell_size",
        "count_mode": "count_mode",
        "match_tolerance": "match_tolerance",
        "rate": "resample_rate",
        "window": "window",
        "group_by": "grouping",
    }
    for flag, key in flag_names.items():
        value = getattr(args, flag, None)
        if value is not None:
            values[key] = value
    config = RunConfig(**values)
    for name in ("min_dwell",):
        if getattr(config, name) < 0:
            raise DrivebenchError(f"{name} must be >= 0")
    for name in ("cell_size", "match_tolerance", "resample_rate"):
        if getattr(config, name) <= 0:
            raise DrivebenchError(f"{name} must be > 0")
    return config


def _add_common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON config file with RunConfig keys")
    parser.add_argument("--distance-method", dest="distance_method", choices=("path", "speed"))
    parser.add_argument("--min-dwell", dest="min_dwell", type=float, help="debounce dwell in seconds")
    parser.add_argument("--cell-size", dest="cell_size", type=float, help="grid cell size in meters")
    parser.add_argument("--count-mode", dest="count_mode", choices=("sample", "edge"))
    parser.add_argument("--match-tolerance", dest="match_tolerance", type=float, help="map-match tolerance in meters")
    parser.add_argument("--rate", dest="rate", type=float, help="spectrum resample rate in Hz")
    parser.add_argument("--window", dest="window", choices=("rect", "hann"))
    parser.add_argument("--group-by", dest="group_by", help="log | period[:quarter|month|year] | route")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="drivebench", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check log invariants")
    p.add_argument("logs", nargs="+")

    p = sub.add_parser("metrics", help="MDBI/MTBI reports per log, group and overall")
    p.add_argument("logs", nargs="+")
    p.add_argument("--region", help="polygon file for region-scoped reports")
    p.add_argument("--out", help="write the JSON document here instead of stdout")
    p.add_argument("--jobs", type=int, default=1)
    _add_common_flags(p)

    p = sub.add_parser("map", help="intervention occupancy grid as CSV and PGM")
    p.add_argument("logs", nargs="+")
    p.add_argument("--out", required=True, help="output directory")
    _add_common_flags(p)

    p = sub.add_parser("roads", help="trip composition and per-road-type reports")
    p.add_argument("log")
    p.add_argument("--network", required=True)
    p.add_argument("--out", help="write the JSON document here instead of stdout")
    _add_common_flags(p)

    p = sub.add_parser("spectrum", help="autonomous vs manual control spectra")
    p.add_argument("log")
    p.add_argument("--channel", default="speed", choices=("speed", "acceleration", "brake", "steering"))
    p.add_argument("--out", required=True, help="output directory")
    _add_common_flags(p)

    p = sub.add_parser("synth", help="generate a synthetic log and its ground truth")
    p.add_argument("scenario")
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("report", help="combined report with figures")
    p.add_argument("logs", nargs="+")
    p.add_argument("--network")
    p.add_argument("--region")
    p.add_argument("--channel", default="speed", choices=("speed", "acceleration", "brake", "steering"))
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--no-figures", action="store_true", help="skip PNG rendering")
    _add_common_flags(p)

    return parser


def _parse_logs(paths, jobs: int = 1):
    """Parse logs (optionally in parallel) and return them sorted by log_id."""
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            logs = list(pool.map(parse_log_file, paths))
    else:
        logs = [parse_log_file(path) for path in paths]
    return sorted(logs, key=lambda log: log.log_id)


def _safe_name(log_id: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]", "_", log_id) or "log"


def _emit_doc(doc: dict, out: str | None) -> None:
    text = reporting.dumps(doc)
    if out:
        reporting.atomic_write_text(out, text)
    else:
        sys.stdout.write(text)


def _cmd_validate(args) -> int:
    failed = False
    for path in args.logs:
        log = parse_log_file(path)
        issues = validate_log(log)
        if issues:
            failed = True
            for issue in issues:
                print(f"{path}: {issue}")
        else:
            print(f"{path}: OK")
    return 1 if failed else 0


def _metrics_doc(logs, config: RunConfig, region_path: str | None) -> dict:
    per_log = []
    for log in logs:
        totals = log_totals(log, config.distance_method, config.min_dwell)
        per_log.append((log, totals))

    sums: dict[str, object] = {}
    for log, totals in per_log:
        key = group_key_for(log, config.grouping)
        sums[key] = sums[key] + totals if key in sums else totals

    overall = None
    for _, totals in per_log:
        overall = totals if overall is None else overall + totals

    doc = {
        "config": config.to_obj(),
        "logs": [reporting.report_to_obj(compute_metrics(t, log.log_id)) for log, t in per_log],
        "groups": [reporting.report_to_obj(compute_metrics(sums[k], k)) for k in sorted(sums)],
        "overall": reporting.report_to_obj(compute_metrics(overall, "overall")),
    }
    if region_path:
        region = parse_region(Path(region_path).read_text(encoding="utf-8"))
        regional = []
        for log, _ in per_log:
            segments = build_segments(log.engagement, config.min_dwell)
            regional.append(reporting.report_to_obj(region_metrics(log, segments, region, config.distance_method, log.log_id)))
        doc["regions"] = regional
    return doc


def _cmd_metrics(args) -> int:
    config = _load_config(args)
    logs = _parse_logs(args.logs, args.jobs)
    _emit_doc(_metrics_doc(logs, config, args.region), args.out)
    return 0


def _write_map_files(logs, config: RunConfig, out_dir: Path) -> dict:
    grid = build_grid_multi(logs, config.cell_size, config.count_mode)
    reporting.atomic_write_bytes(out_dir / "map.csv", export_grid(grid, "csv"))
    reporting.atomic_write_bytes(out_dir / "map.pgm", export_grid(grid, "pgm"))
    summary = {
        "cell_size": grid.cell_size,
        "count_mode": grid.count_mode,
        "origin": [grid.origin[0], grid.origin[1]],
        "width": grid.width,
        "height": grid.height,
        "total_count": int(grid.counts.sum()),
        "csv": "map.csv",
        "pgm": "map.pgm",
    }
    return {"grid": grid, "summary": summary}


def _cmd_map(args) -> int:
    config = _load_config(args)
    logs = _parse_logs(args.logs)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_map_files(logs, config, out_dir)
    return 0


def _roads_doc(log, network, config: RunConfig) -> dict:
    segments = build_segments(log.engagement, config.min_dwell)
    composition = classify_trip(log, network, config.match_tolerance)
    reports = per_type_metrics(log, segments, network, config.match_tolerance, config.distance_method)
    compliance = speed_compliance(log, network, config.match_tolerance)
    return {
        "log_id": log.log_id,
        "composition": reporting.composition_to_obj(composition),
        "per_type": [reporting.report_to_obj(r) for r in reports],
        "speed_compliance": {
            "violations": [{"t": t, "v": v, "limit": limit} for t, v, limit in compliance.violations],
            "skipped": compliance.skipped,
        },
    }


def _cmd_roads(args) -> int:
    config = _load_config(args)
    log = parse_log_file(args.log)
    network = load_network(Path(args.network).read_text(encoding="utf-8"))
    doc = {"config": config.to_obj(), **_roads_doc(log, network, config)}
    _emit_doc(doc, args.out)
    return 0


def _cmd_spectrum(args) -> int:
    config = _load_config(args)
    log = parse_log_file(args.log)
    segments = build_segments(log.engagement, config.min_dwell)
    auto, manual = compare_modes(log, segments, args.channel, config.resample_rate, config.window)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    reporting.atomic_write_text(out_dir / f"spectrum_{args.channel}_auto.csv", reporting.spectrum_to_csv(auto))
    reporting.atomic_write_text(out_dir / f"spectrum_{args.channel}_manual.csv", reporting.spectrum_to_csv(manual))
    return 0


def _cmd_synth(args) -> int:
    scenario = parse_scenario(Path(args.scenario).read_text(encoding="utf-8"))
    log, truth = synth_log(scenario)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    reporting.atomic_write_bytes(out_dir / "drive.log", serialize_log(log))
    truth_doc = {
        "auto_distance": truth.auto_distance,
        "manual_distance": truth.manual_distance,
        "auto_uptime": truth.auto_uptime,
        "manual_uptime": truth.manual_uptime,
        "n_interventions": truth.n_interventions,
        "segments": [
            {"mode": s.mode, "t_start": s.t_start, "t_end": s.t_end, "uptime": s.uptime, "distance": s.distance}
            for s in truth.segments
        ],
    }
    reporting.atomic_write_text(out_dir / "ground_truth.json", reporting.dumps(truth_doc))
    return 0


def _cmd_report(args) -> int:
    config = _load_config(args)
    logs = _parse_logs(args.logs, args.jobs)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    doc: dict = {"config": config.to_obj(), "inputs": [log.log_id for log in logs]}
    doc["validation"] = [
        {"log_id": log.log_id, "issues": [str(issue) for issue in validate_log(log)]} for log in logs
    ]

    metrics_doc = _metrics_doc(logs, config, args.region)
    doc["metrics"] = {key: metrics_doc[key] for key in metrics_doc if key != "config"}

    map_result = _write_map_files(logs, config, out_dir)
    doc["map"] = map_result["summary"]

    network = None
    if args.network:
        network = load_network(Path(args.network).read_text(encoding="utf-8"))
        per_log_docs = [_roads_doc(log, network, config) for log in logs]
        overall_by_type: dict[str, object] = {}
        for log in logs:
            segments = build_segments(log.engagement, config.min_dwell)
            for report in per_type_metrics(log, segments, network, config.match_tolerance, config.distance_method):
                key = report.group_key
                overall_by_type[key] = overall_by_type[key] + report.totals if key in overall_by_type else report.totals
        doc["roads"] = {
            "per_log": per_log_docs,
            "overall_per_type": [
                reporting.report_to_obj(compute_metrics(overall_by_type[k], k)) for k in sorted(overall_by_type)
            ],
        }

    spectra = []
    spectrum_figs = []
    for log in logs:
        name = _safe_name(log.log_id)
        segments = build_segments(log.engagement, config.min_dwell)
        try:
            auto, manual = compare_modes(log, segments, args.channel, config.resample_rate, config.window)
        except DrivebenchError as exc:
            spectra.append({"log_id": log.log_id, "error": str(exc)})
            continue
        auto_name = f"spectrum_{args.channel}_{name}_auto.csv"
        manual_name = f"spectrum_{args.channel}_{name}_manual.csv"
        reporting.atomic_write_text(out_dir / auto_name, reporting.spectrum_to_csv(auto))
        reporting.atomic_write_text(out_dir / manual_name, reporting.spectrum_to_csv(manual))
        spectra.append({"log_id": log.log_id, "auto_csv": auto_name, "manual_csv": manual_name})
        spectrum_figs.append((auto, manual, name))
    doc["spectrum"] = {"channel": args.channel, "per_log": spectra}

    if not args.no_figures:
        rendered = []
        figures.save_grid_figure(map_result["grid"], out_dir / "map.png")
        rendered.append("map.png")
        for auto, manual, name in spectrum_figs:
            fig_name = f"spectrum_{args.channel}_{name}.png"
            figures.save_spectrum_figure(auto, manual, args.channel, out_dir / fig_name)
            rendered.append(fig_name)
        if network is not None:
            compositions = {
                log.log_id: classify_trip(log, network, config.match_tolerance) for log in logs
            }
            figures.save_composition_figure(compositions, out_dir / "roads.png")
            rendered.append("roads.png")
        doc["figures"] = rendered

    reporting.atomic_write_text(out_dir / "report.json", reporting.dumps(doc))
    return 0


_COMMANDS = {
    "validate": _cmd_validate,
    "metrics": _cmd_metrics,
    "map": _cmd_map,
    "roads": _cmd_roads,
    "spectrum": _cmd_spectrum,
    "synth": _cmd_synth,
    "report": _cmd_report,
}


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except DrivebenchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())

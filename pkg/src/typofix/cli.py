"""Command-line surface: single runs, batches, corpus generation, evaluation,
and hosting the mock backends over the wire protocol.

Exit codes: 0 success, 2 stage/backend failure, 3 configuration or input
error.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from typofix import evalharness, pipeline
from typofix.backends.ports import PORT_NAMES, make_ports
from typofix.backends.server import MockBackendServer
from typofix.corpus import ErrorMix, write_corpus
from typofix.errors import ConfigError, StageError, TypofixError
from typofix.imaging import RasterImage

EXIT_OK = 0
EXIT_STAGE = 2
EXIT_CONFIG = 3


def _split_endpoint_flags(argv: list[str]) -> tuple[list[str], dict[str, str]]:
    """Pull ``--endpoint.<port>=VALUE`` flags out of argv."""
    remaining: list[str] = []
    endpoints: dict[str, str] = {}
    i = 0
    while i < len(argv):
        arg = argv[i]
        if arg.startswith("--endpoint."):
            name, sep, value = arg[len("--endpoint.") :].partition("=")
            if not sep:
                if i + 1 >= len(argv):
                    raise ConfigError(f"{arg} needs a value")
                value = argv[i + 1]
                i += 1
            if name not in PORT_NAMES:
                raise ConfigError(f"unknown port {name!r}; expected one of {PORT_NAMES}")
            endpoints[name] = value
            i += 1
            continue
        remaining.append(arg)
        i += 1
    return remaining, endpoints


def _load_config(args) -> tuple[pipeline.PipelineConfig, dict[str, str]]:
    data: dict = {}
    endpoints: dict[str, str] = {}
    if getattr(args, "config", None):
        try:
            raw = json.loads(Path(args.config).read_text())
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}")
        if not isinstance(raw, dict):
            raise ConfigError("config file must hold a JSON object")
        endpoints = dict(raw.pop("endpoints", {}) or {})
        data = raw
    for key in ("theta", "t_max", "pad_cost", "enlarge_factor", "seed", "planner_retries"):
        value = getattr(args, key, None)
        if value is not None:
            data[key] = value
    if getattr(args, "erase_all", None) is not None:
        data["erase_all"] = args.erase_all
    if getattr(args, "case_insensitive", None) is not None:
        data["case_insensitive"] = args.case_insensitive
    endpoints.update(getattr(args, "endpoints", {}) or {})
    for name in endpoints:
        if name not in PORT_NAMES:
            raise ConfigError(f"unknown port {name!r} in endpoints")
    return pipeline.PipelineConfig.from_dict(data), endpoints


def _run_one(
    image_path: Path,
    prompt: str,
    config: pipeline.PipelineConfig,
    endpoints: dict[str, str],
    out_png: Path,
    out_report: Path,
) -> pipeline.RunReport:
    image = RasterImage.from_png(image_path)
    image_id = image_path.stem
    ports = make_ports(endpoints, seed=config.seed, image_id=image_id)
    corrected, report = pipeline.run(image, prompt, config, ports, image_id=image_id)
    out_png.parent.mkdir(parents=True, exist_ok=True)
    corrected.to_png(out_png)
    out_report.write_text(json.dumps(report.to_dict(), sort_keys=True, indent=2) + "\n")
    return report


def cmd_run(args) -> int:
    try:
        config, endpoints = _load_config(args)
        image_path = Path(args.image)
        if not image_path.is_file():
            raise ConfigError(f"image not found: {image_path}")
        out_png = Path(args.out) if args.out else image_path.with_suffix(".corrected.png")
        out_report = Path(str(out_png).removesuffix(".png") + ".report.json")
    except (ConfigError, TypofixError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        _run_one(image_path, args.prompt, config, endpoints, out_png, out_report)
    except StageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_STAGE
    except (TypofixError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


def cmd_batch(args) -> int:
    try:
        config, endpoints = _load_config(args)
        manifest_path = Path(args.manifest)
        rows = _read_manifest(manifest_path)
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
    except (ConfigError, TypofixError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    def work(row: dict):
        image_path = (manifest_path.parent / row["image"]).resolve()
        stem = image_path.stem
        report = _run_one(
            image_path,
            row["prompt"],
            config,
            endpoints,
            out_dir / f"{stem}.png",
            out_dir / f"{stem}.report.json",
        )
        return report

    results: list[pipeline.RunReport | None] = [None] * len(rows)
    failures: list[dict] = []
    with ThreadPoolExecutor(max_workers=max(1, args.workers)) as pool:
        futures = {pool.submit(work, row): i for i, row in enumerate(rows)}
        for future, index in futures.items():
            try:
                results[index] = future.result()
            except (TypofixError, OSError) as exc:
                failures.append({"image": rows[index]["image"], "error": str(exc)})
                print(f"error: {rows[index]['image']}: {exc}", file=sys.stderr)

    with open(out_dir / "reports.jsonl", "w") as handle:
        for report in results:
            if report is not None:
                handle.write(report.canonical_json(include_timings=False) + "\n")
    if failures:
        (out_dir / "failures.json").write_text(json.dumps(failures, indent=2) + "\n")
        return EXIT_STAGE
    return EXIT_OK


def _read_manifest(path: Path) -> list[dict]:
    if not path.is_file():
        raise ConfigError(f"manifest not found: {path}")
    rows = []
    for line_no, line in enumerate(path.read_text().splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        try:
            row = json.loads(line)
        except ValueError as exc:
            raise ConfigError(f"{path}:{line_no}: invalid JSON: {exc}")
        if not isinstance(row, dict) or "image" not in row or "prompt" not in row:
            raise ConfigError(f"{path}:{line_no}: rows need 'image' and 'prompt'")
        if not str(row["prompt"]).strip():
            raise ConfigError(f"{path}:{line_no}: prompt must be non-empty")
        rows.append(row)
    if not rows:
        raise ConfigError(f"manifest {path} has no rows")
    return rows


def cmd_mock_scene(args) -> int:
    try:
        mix = ErrorMix(
            surplus_rate=args.surplus_rate,
            missing_rate=args.missing_rate,
            typo_rate=args.typo_rate,
        )
        write_corpus(args.out, args.count, args.seed, mix, size=args.size)
    except (OSError, TypofixError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


def cmd_eval(args) -> int:
    try:
        reports_path = Path(args.reports)
        if reports_path.is_dir():
            reports_path = reports_path / "reports.jsonl"
        if not reports_path.is_file():
            raise ConfigError(f"no reports at {reports_path}")
        reports = []
        for line in reports_path.read_text().splitlines():
            if line.strip():
                reports.append(json.loads(line))
        if not reports:
            raise ConfigError(f"no report rows in {reports_path}")
        images_dir = Path(args.images) if args.images else reports_path.parent
        out_dir = Path(args.out) if args.out else reports_path.parent
        out_dir.mkdir(parents=True, exist_ok=True)
        _, endpoints = _load_config(args)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    ports = make_ports(endpoints, seed=0, image_id="eval")
    records = []
    for report in reports:
        image_id = report.get("image_id", "image")
        image_path = images_dir / f"{image_id}.png"
        if not image_path.is_file():
            print(f"error: missing image {image_path}", file=sys.stderr)
            return EXIT_CONFIG
        image = RasterImage.from_png(image_path)
        targets = report.get("prompt", {}).get("targets", [])
        records.append(
            evalharness.evaluate_image(
                image,
                targets,
                ports.detector,
                ports.recognizer,
                case_insensitive=bool(args.case_insensitive),
                image_id=image_id,
            )
        )
    stats = evalharness.corpus_stats(reports)
    curve, skipped = evalharness.convergence_curve(reports)
    macro = sum(r.accuracy for r in records) / len(records)
    total_targets = sum(len(r.targets) for r in records)
    micro = (
        sum(r.accuracy * len(r.targets) for r in records) / total_targets
        if total_targets
        else 1.0
    )
    payload = {
        "images": len(records),
        "ocr_accuracy_macro": macro,
        "ocr_accuracy_micro": micro,
        "stats": stats.to_dict(),
        "curve_skipped": skipped,
        "per_image": [
            {
                "image_id": r.image_id,
                "accuracy": r.accuracy,
                "targets": list(r.targets),
                "recognized": list(r.recognized),
            }
            for r in records
        ],
    }
    (out_dir / "eval.json").write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")
    evalharness.write_curve_csv(curve, out_dir / "curve.csv")
    print(f"ocr_accuracy_macro={macro:.4f} over {len(records)} images")
    return EXIT_OK


def cmd_serve_mock(args) -> int:
    try:
        server = MockBackendServer(
            host=args.host, port=args.port, editor_p=args.editor_p, seed=args.seed
        )
    except (OSError, ValueError) as exc:
        print(f"error: cannot bind {args.host}:{args.port}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(f"mock backends listening on {server.address}", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="typofix", description="Detect and repair typographic errors in rendered images."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_config_flags(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", help="JSON config file (pipeline settings plus endpoints)")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--theta", type=float, default=None)
        p.add_argument("--t-max", dest="t_max", type=int, default=None)
        p.add_argument("--pad-cost", dest="pad_cost", type=int, default=None)
        p.add_argument("--enlarge-factor", dest="enlarge_factor", type=float, default=None)
        p.add_argument("--planner-retries", dest="planner_retries", type=int, default=None)
        p.add_argument(
            "--erase-all",
            dest="erase_all",
            action=argparse.BooleanOptionalAction,
            default=None,
        )
        p.add_argument(
            "--case-insensitive",
            dest="case_insensitive",
            action=argparse.BooleanOptionalAction,
            default=None,
        )

    p_run = sub.add_parser("run", help="correct one image")
    p_run.add_argument("image")
    p_run.add_argument("prompt")
    p_run.add_argument("--out", help="output PNG path (report goes next to it)")
    add_config_flags(p_run)
    p_run.set_defaults(func=cmd_run)

    p_batch = sub.add_parser("batch", help="correct every image in a JSON-Lines manifest")
    p_batch.add_argument("manifest")
    p_batch.add_argument("--out", required=True)
    p_batch.add_argument("--workers", type=int, default=4)
    add_config_flags(p_batch)
    p_batch.set_defaults(func=cmd_batch)

    p_scene = sub.add_parser("mock-scene", help="generate a seeded synthetic corpus")
    p_scene.add_argument("--count", type=int, default=50)
    p_scene.add_argument("--seed", type=int, default=7)
    p_scene.add_argument("--out", required=True)
    p_scene.add_argument("--size", type=int, default=256)
    p_scene.add_argument("--surplus-rate", type=float, default=0.5)
    p_scene.add_argument("--missing-rate", type=float, default=0.3)
    p_scene.add_argument("--typo-rate", type=float, default=0.5)
    p_scene.set_defaults(func=cmd_mock_scene)

    p_eval = sub.add_parser("eval", help="score batch outputs with the evaluation OCR stack")
    p_eval.add_argument("--reports", required=True, help="reports.jsonl file or its directory")
    p_eval.add_argument("--images", help="directory of corrected PNGs (default: next to reports)")
    p_eval.add_argument("--out", help="output directory (default: next to reports)")
    p_eval.add_argument(
        "--case-insensitive", action=argparse.BooleanOptionalAction, default=False
    )
    p_eval.add_argument("--config", help=argparse.SUPPRESS)
    p_eval.set_defaults(func=cmd_eval)

    p_serve = sub.add_parser("serve-mock", help="host the mock backends over HTTP")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8765)
    p_serve.add_argument("--editor-p", type=float, default=1.0)
    p_serve.add_argument("--seed", type=int, default=0)
    p_serve.set_defaults(func=cmd_serve_mock)

    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        argv, endpoints = _split_endpoint_flags(argv)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    parser = build_parser()
    args = parser.parse_args(argv)
    args.endpoints = endpoints
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

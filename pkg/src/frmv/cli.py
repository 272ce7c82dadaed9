"""Command-line front end.

Subcommands cover the whole workflow: detect regions in a chromatogram
CSV, generate synthetic data, run amplitude sweeps, match spectra, and
serve the HTTP API. Every command runs in-process by default; passing
--server URL routes the computation through a running service instead,
producing byte-identical artifacts.

Exit codes: 0 success, 1 I/O or server failure, 2 argument errors,
3 input parse errors, 4 numeric or configuration errors.
"""

import argparse
import sys

import httpx

from . import io
from .detect import DEFAULT_CUTOFF, DEFAULT_WINDOW, RoiConfig
from .io import CsvLayout, CsvParseError, read_chromatogram, read_spectra
from .plot import PlotStyle, render_plot
from .service import handlers
from .service.schemas import (
    ConfigModel,
    DetectRequest,
    DetectResponse,
    MatchRequest,
    MatchResponse,
    PeakModel,
    SweepRequest,
    SweepResponse,
    SynthRequest,
    SynthResponse,
)

EXIT_OK = 0
EXIT_IO = 1
EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_DOMAIN = 4

# Defaults for the sweep's built-in single-peak scenario.
SWEEP_ROWS = 300
SWEEP_COLS = 40
SWEEP_APEX = 150.0
SWEEP_SIGMA = 3.0
SWEEP_NOISE_SIGMA = 1.0

_ENDPOINTS = {
    "detect": (handlers.run_detect, DetectResponse),
    "synth": (handlers.run_synth, SynthResponse),
    "sweep": (handlers.run_sweep, SweepResponse),
    "match": (handlers.run_match, MatchResponse),
}


def default_client_factory(base_url):
    return httpx.Client(base_url=base_url, timeout=300.0)


# Test seam: replaced with an ASGI-transport client in the test suite.
client_factory = default_client_factory


def _dispatch(server, endpoint, request):
    handler, response_cls = _ENDPOINTS[endpoint]
    if server is None:
        return handler(request)
    with client_factory(server) as client:
        response = client.post(f"/{endpoint}", json=request.model_dump(mode="json"))
    if response.status_code in (400, 422):
        raise ValueError(f"server rejected the request: {response.text}")
    if response.status_code != 200:
        raise RuntimeError(f"server error {response.status_code}: {response.text}")
    return response_cls.model_validate(response.json())


def _peak_argument(text):
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(
            f"peak must be apex:sigma:amplitude, got {text!r}"
        )
    try:
        apex, sigma, amplitude = (float(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"peak fields must be numbers, got {text!r}"
        ) from None
    return apex, sigma, amplitude


def _amplitudes_argument(text):
    try:
        values = [float(p) for p in text.split(",") if p.strip() != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"amplitudes must be comma-separated numbers, got {text!r}"
        ) from None
    if not values:
        raise argparse.ArgumentTypeError("amplitudes list is empty")
    return values


def _delimiter_argument(text):
    try:
        CsvLayout(delimiter=text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    return text


def cmd_detect(args):
    layout = CsvLayout(
        has_header=args.header,
        has_time_column=args.time_column,
        delimiter=args.delimiter,
    )
    chromatogram = read_chromatogram(args.input, layout)
    config = RoiConfig(
        window=args.window, cutoff=args.cutoff, min_roi_len=args.min_roi_len
    )
    request = DetectRequest(
        intensities=chromatogram.intensities.tolist(),
        retention_times=(
            chromatogram.retention_times.tolist()
            if chromatogram.retention_times is not None
            else None
        ),
        mz_axis=(
            chromatogram.mz_axis.tolist() if chromatogram.mz_axis is not None else None
        ),
        config=ConfigModel.from_config(config),
    )
    result = _dispatch(args.server, "detect", request).to_result()
    paths = io.write_result(result, args.out_prefix)
    if args.plot is not None:
        render_plot(result, PlotStyle(), args.plot)
        paths["plot"] = args.plot
    print(f"{len(result.rois)} regions of interest; wrote {len(paths)} files")
    return EXIT_OK


def cmd_synth(args):
    request = SynthRequest(
        rows=args.rows,
        cols=args.cols,
        peaks=[
            PeakModel(apex=apex, sigma=sigma, amplitude=amplitude)
            for apex, sigma, amplitude in args.peaks
        ],
        noise_sigma=args.noise_sigma,
        seed=args.seed,
    )
    response = _dispatch(args.server, "synth", request)
    io.write_chromatogram_csv(response.to_chromatogram(), args.out)
    truth_path = (
        args.out[:-4] if args.out.endswith(".csv") else args.out
    ) + ".truth.json"
    io.write_synth_truth_json(response.to_spec(), truth_path)
    print(f"wrote {args.out} and {truth_path}")
    return EXIT_OK


def cmd_sweep(args):
    if args.seeds < 1:
        raise ValueError(f"--seeds must be a positive count, got {args.seeds}")
    template = SynthRequest(
        rows=SWEEP_ROWS,
        cols=SWEEP_COLS,
        peaks=[PeakModel(apex=SWEEP_APEX, sigma=SWEEP_SIGMA, amplitude=1.0)],
        noise_sigma=SWEEP_NOISE_SIGMA,
        seed=0,
    )
    config = RoiConfig(window=args.window, cutoff=args.cutoff)
    request = SweepRequest(
        template=template,
        amplitudes=args.amplitudes,
        seeds=list(range(args.seeds)),
        config=ConfigModel.from_config(config),
    )
    report = _dispatch(args.server, "sweep", request).to_report()
    csv_path = args.out_prefix + ".sweep.csv"
    json_path = args.out_prefix + ".sweep.json"
    io.write_sweep_csv(report, csv_path)
    io.write_sweep_json(report, json_path)
    print(f"wrote {csv_path} and {json_path}")
    return EXIT_OK


def cmd_match(args):
    queries = read_spectra(args.query)
    library = read_spectra(args.library)
    request = MatchRequest(
        queries=[q.tolist() for q in queries],
        library=[e.tolist() for e in library],
    )
    response = _dispatch(args.server, "match", request)
    payload = [
        {
            "query_index": index,
            "ranking": [
                {"library_index": e.library_index, "match_factor": e.match_factor}
                for e in ranking
            ],
        }
        for index, ranking in enumerate(response.rankings, start=1)
    ]
    io.write_json(payload, args.out)
    print(f"wrote {args.out}")
    return EXIT_OK


def cmd_serve(args):
    import uvicorn

    uvicorn.run("frmv.service.app:app", host=args.host, port=args.port)
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="frmv",
        description="Untargeted region-of-interest detection for GC-MS chromatograms.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    detect = sub.add_parser("detect", help="detect regions of interest in a CSV")
    detect.add_argument("--input", required=True, help="chromatogram CSV path")
    detect.add_argument("--window", type=int, default=DEFAULT_WINDOW)
    detect.add_argument("--cutoff", type=float, default=DEFAULT_CUTOFF)
    detect.add_argument("--out-prefix", required=True, help="output path prefix")
    detect.add_argument("--min-roi-len", type=int, default=0)
    detect.add_argument(
        "--header", action="store_true", help="first row is m/z labels"
    )
    detect.add_argument(
        "--time-column", action="store_true", help="first column is retention time"
    )
    detect.add_argument("--delimiter", type=_delimiter_argument, default=",")
    detect.add_argument("--plot", default=None, help="also render an SVG overlay here")
    detect.add_argument("--server", default=None, help="route through a running service")
    detect.set_defaults(func=cmd_detect)

    synth = sub.add_parser("synth", help="generate a synthetic chromatogram")
    synth.add_argument("--rows", type=int, default=SWEEP_ROWS)
    synth.add_argument("--cols", type=int, default=SWEEP_COLS)
    synth.add_argument(
        "--peaks",
        type=_peak_argument,
        action="append",
        default=[],
        metavar="APEX:SIGMA:AMPLITUDE",
        help="repeatable peak description",
    )
    synth.add_argument("--noise-sigma", type=float, default=1.0)
    synth.add_argument("--seed", type=int, default=0)
    synth.add_argument("--out", required=True, help="chromatogram CSV output path")
    synth.add_argument("--server", default=None)
    synth.set_defaults(func=cmd_synth)

    sweep = sub.add_parser("sweep", help="detection-rate sweep over amplitudes")
    sweep.add_argument(
        "--amplitudes", type=_amplitudes_argument, required=True, metavar="A,B,..."
    )
    sweep.add_argument("--seeds", type=int, required=True, help="number of seeds")
    sweep.add_argument("--window", type=int, default=DEFAULT_WINDOW)
    sweep.add_argument("--cutoff", type=float, default=DEFAULT_CUTOFF)
    sweep.add_argument("--out-prefix", required=True)
    sweep.add_argument("--server", default=None)
    sweep.set_defaults(func=cmd_sweep)

    match = sub.add_parser("match", help="rank library spectra against queries")
    match.add_argument("--query", required=True, help="query spectra CSV")
    match.add_argument("--library", required=True, help="library spectra CSV")
    match.add_argument("--out", required=True, help="rankings JSON output path")
    match.add_argument("--server", default=None)
    match.set_defaults(func=cmd_match)

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.set_defaults(func=cmd_serve)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CsvParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except RuntimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())

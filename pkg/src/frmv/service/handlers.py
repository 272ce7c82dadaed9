"""Request handlers shared by the HTTP service and the in-process CLI."""

from ..detect import detect_rois
from ..io import FLOAT_FORMAT
from ..spectra import match_factor
from ..synth import generate, peak_support, sweep
from .schemas import (
    DetectRequest,
    DetectResponse,
    MatchRequest,
    MatchResponse,
    RankingEntry,
    SweepRequest,
    SweepResponse,
    SweepCellModel,
    SynthRequest,
    SynthResponse,
    TruthPeakModel,
)


def run_detect(request: DetectRequest) -> DetectResponse:
    chromatogram = request.to_chromatogram()
    result = detect_rois(chromatogram, request.config.to_config())
    return DetectResponse.from_result(result)


def run_synth(request: SynthRequest) -> SynthResponse:
    spec = request.to_spec()
    chromatogram = generate(spec)
    peaks = [
        TruthPeakModel(
            apex=p.apex,
            sigma=p.sigma,
            amplitude=p.amplitude,
            support=peak_support(p, spec.rows),
        )
        for p in spec.peaks
    ]
    return SynthResponse(
        rows=spec.rows,
        cols=spec.cols,
        noise_sigma=spec.noise_sigma,
        seed=spec.seed,
        peaks=peaks,
        intensities=chromatogram.intensities.tolist(),
    )


def run_sweep(request: SweepRequest) -> SweepResponse:
    report = sweep(
        request.template.to_spec(),
        request.amplitudes,
        request.seeds,
        config=request.config.to_config(),
    )
    return SweepResponse(
        config=request.config,
        amplitudes=list(report.amplitudes),
        seeds=list(report.seeds),
        cells=[
            SweepCellModel(
                amplitude=c.amplitude,
                seed=c.seed,
                peak_id=c.peak_id,
                detected=c.detected,
            )
            for c in report.cells
        ],
        rates={FLOAT_FORMAT % a: report.rate(a) for a in report.amplitudes},
    )


def run_match(request: MatchRequest) -> MatchResponse:
    rankings = []
    for query in request.queries:
        scores = [
            (match_factor(query, entry), index)
            for index, entry in enumerate(request.library, start=1)
        ]
        # Highest score first; library order breaks ties.
        scores.sort(key=lambda pair: (-pair[0], pair[1]))
        rankings.append(
            [
                RankingEntry(library_index=index, match_factor=score)
                for score, index in scores
            ]
        )
    return MatchResponse(rankings=rankings)

"""Request and response models for the HTTP service.

Every response carries enough to rebuild the corresponding core object,
so a remote client can produce byte-identical artifacts to a local run;
the *_to_* helpers perform those conversions.
"""

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..detect import (
    DEFAULT_CUTOFF,
    DEFAULT_P_CLAMP,
    DEFAULT_WINDOW,
    Chromatogram,
    RoiConfig,
    RoiInterval,
    RoiResult,
)
from ..synth import GaussianPeak, SweepCell, SweepReport, SyntheticSpec


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ConfigModel(StrictModel):
    window: int = DEFAULT_WINDOW
    cutoff: float = DEFAULT_CUTOFF
    epsilon: float = 0.0
    p_clamp: float = DEFAULT_P_CLAMP
    min_roi_len: int = 0

    def to_config(self):
        return RoiConfig(
            window=self.window,
            cutoff=self.cutoff,
            epsilon=self.epsilon,
            p_clamp=self.p_clamp,
            min_roi_len=self.min_roi_len,
        )

    @classmethod
    def from_config(cls, config):
        return cls(
            window=config.window,
            cutoff=config.cutoff,
            epsilon=config.epsilon,
            p_clamp=config.p_clamp,
            min_roi_len=config.min_roi_len,
        )


class RoiModel(StrictModel):
    start_index: int
    end_index: int
    start_time: float | None = None
    end_time: float | None = None
    peak_probability: float

    def to_interval(self):
        return RoiInterval(
            start_index=self.start_index,
            end_index=self.end_index,
            start_time=self.start_time,
            end_time=self.end_time,
            peak_probability=self.peak_probability,
        )

    @classmethod
    def from_interval(cls, roi):
        return cls(
            start_index=roi.start_index,
            end_index=roi.end_index,
            start_time=roi.start_time,
            end_time=roi.end_time,
            peak_probability=roi.peak_probability,
        )


class DetectRequest(StrictModel):
    intensities: list[list[float]]
    retention_times: list[float] | None = None
    mz_axis: list[float] | None = None
    config: ConfigModel = Field(default_factory=ConfigModel)

    def to_chromatogram(self):
        return Chromatogram(
            np.array(self.intensities, dtype=float),
            retention_times=(
                np.array(self.retention_times, dtype=float)
                if self.retention_times is not None
                else None
            ),
            mz_axis=(
                np.array(self.mz_axis, dtype=float)
                if self.mz_axis is not None
                else None
            ),
        )


class DetectResponse(StrictModel):
    config: ConfigModel
    acquisition_probs: list[float]
    probs_above_cutoff: list[float]
    roi_mask: list[int]
    tic: list[float]
    tic_in_rois: list[float]
    intensities_in_rois: list[list[float]]
    rois: list[RoiModel]
    retention_times: list[float] | None = None
    mz_axis: list[float] | None = None

    @classmethod
    def from_result(cls, result):
        return cls(
            config=ConfigModel.from_config(result.config),
            acquisition_probs=result.acquisition_probs.tolist(),
            probs_above_cutoff=result.probs_above_cutoff.tolist(),
            roi_mask=[int(v) for v in result.roi_mask],
            tic=result.tic.tolist(),
            tic_in_rois=result.tic_in_rois.tolist(),
            intensities_in_rois=result.intensities_in_rois.tolist(),
            rois=[RoiModel.from_interval(r) for r in result.rois],
            retention_times=(
                result.retention_times.tolist()
                if result.retention_times is not None
                else None
            ),
            mz_axis=result.mz_axis.tolist() if result.mz_axis is not None else None,
        )

    def to_result(self):
        return RoiResult(
            config=self.config.to_config(),
            acquisition_probs=np.array(self.acquisition_probs, dtype=float),
            probs_above_cutoff=np.array(self.probs_above_cutoff, dtype=float),
            roi_mask=np.array(self.roi_mask, dtype=np.uint8),
            tic=np.array(self.tic, dtype=float),
            tic_in_rois=np.array(self.tic_in_rois, dtype=float),
            intensities_in_rois=np.array(self.intensities_in_rois, dtype=float),
            rois=[r.to_interval() for r in self.rois],
            retention_times=(
                np.array(self.retention_times, dtype=float)
                if self.retention_times is not None
                else None
            ),
            mz_axis=(
                np.array(self.mz_axis, dtype=float) if self.mz_axis is not None else None
            ),
        )


class PeakModel(StrictModel):
    apex: float
    sigma: float
    amplitude: float

    def to_peak(self):
        return GaussianPeak(apex=self.apex, sigma=self.sigma, amplitude=self.amplitude)


class SynthRequest(StrictModel):
    rows: int
    cols: int
    peaks: list[PeakModel] = Field(default_factory=list)
    noise_sigma: float = 1.0
    seed: int = 0

    def to_spec(self):
        return SyntheticSpec(
            rows=self.rows,
            cols=self.cols,
            peaks=tuple(p.to_peak() for p in self.peaks),
            noise_sigma=self.noise_sigma,
            seed=self.seed,
        )


class TruthPeakModel(PeakModel):
    support: tuple[int, int]


class SynthResponse(StrictModel):
    rows: int
    cols: int
    noise_sigma: float
    seed: int
    peaks: list[TruthPeakModel]
    intensities: list[list[float]]

    def to_spec(self):
        return SyntheticSpec(
            rows=self.rows,
            cols=self.cols,
            peaks=tuple(p.to_peak() for p in self.peaks),
            noise_sigma=self.noise_sigma,
            seed=self.seed,
        )

    def to_chromatogram(self):
        return Chromatogram(np.array(self.intensities, dtype=float))


class SweepRequest(StrictModel):
    template: SynthRequest
    amplitudes: list[float]
    seeds: list[int]
    config: ConfigModel = Field(default_factory=ConfigModel)


class SweepCellModel(StrictModel):
    amplitude: float
    seed: int
    peak_id: int
    detected: bool

    def to_cell(self):
        return SweepCell(
            amplitude=self.amplitude,
            seed=self.seed,
            peak_id=self.peak_id,
            detected=self.detected,
        )


class SweepResponse(StrictModel):
    config: ConfigModel
    amplitudes: list[float]
    seeds: list[int]
    cells: list[SweepCellModel]
    rates: dict[str, float]

    def to_report(self):
        return SweepReport(
            amplitudes=tuple(self.amplitudes),
            seeds=tuple(self.seeds),
            config=self.config.to_config(),
            cells=tuple(c.to_cell() for c in self.cells),
        )


class MatchRequest(StrictModel):
    queries: list[list[float]]
    library: list[list[float]] = Field(default_factory=list)


class RankingEntry(StrictModel):
    library_index: int
    match_factor: float


class MatchResponse(StrictModel):
    rankings: list[list[RankingEntry]]

"""Pipeline configuration: species presets, processing knobs, JSON I/O."""

from __future__ import annotations

from dataclasses import dataclass, field, asdict

from .spectral_cutoff import CHIMP_BAND, HUMAN_BAND, SpeciesBand

__all__ = ["PipelineConfig", "human_config", "chimp_config"]


@dataclass
class PipelineConfig:
    """Everything the processing chain needs beyond the cube itself.

    horizon_s bounds both the clutter-mean estimate and the localization
    integral (None means the full record). The noise low-pass is an
    anti-noise guard applied together with the selected high-pass; it sits
    well above the usable heartbeat harmonics.
    """

    species_band: SpeciesBand = field(default_factory=lambda: HUMAN_BAND)
    detrend_sigma_s: float = 1.0
    detrend_truncation: float = 4.0
    horizon_s: float | None = 120.0
    c0: float = 0.95
    m0: float = 0.8
    psd_smoothing_bw_hz: float = 0.1
    filter_order: int = 8
    noise_lowpass_hz: float | None = 12.0
    localization_window: tuple | None = None
    angle_span_deg: float = 60.0
    angle_step_deg: float = 1.0
    taylor_sidelobe_db: float = 25.0
    taylor_nbar: int = 4
    topo_window: int = 9
    corr_seg_len_s: float = 0.6
    min_swing_frac: float = 0.1
    ibi_widen_frac: float = 0.2
    literature_band_hz: tuple = (0.8, 2.0)

    def __post_init__(self):
        if self.detrend_sigma_s <= 0:
            raise ValueError("detrend sigma must be positive")
        if self.horizon_s is not None and self.horizon_s <= 0:
            raise ValueError("horizon must be positive")
        if not (0.0 <= self.m0 <= 1.0) or not (-1.0 <= self.c0 <= 1.0):
            raise ValueError("thresholds outside their valid ranges")
        if self.psd_smoothing_bw_hz <= 0:
            raise ValueError("PSD smoothing bandwidth must be positive")
        if self.filter_order < 1 or self.topo_window < 1:
            raise ValueError("filter order and topology window must be >= 1")

    def ibi_bounds(self) -> tuple[float, float]:
        band = self.species_band
        return (
            (1.0 - self.ibi_widen_frac) / band.f_hi,
            (1.0 + self.ibi_widen_frac) / band.f_lo,
        )

    def to_dict(self) -> dict:
        d = asdict(self)
        d["species_band"] = {
            "name": self.species_band.name,
            "f_lo": self.species_band.f_lo,
            "f_hi": self.species_band.f_hi,
        }
        d["literature_band_hz"] = list(self.literature_band_hz)
        if self.localization_window is not None:
            d["localization_window"] = [
                list(b) if b is not None else None for b in self.localization_window
            ]
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "PipelineConfig":
        data = dict(data)
        band = data.get("species_band")
        if isinstance(band, dict):
            data["species_band"] = SpeciesBand(
                name=band.get("name", "custom"),
                f_lo=float(band["f_lo"]),
                f_hi=float(band["f_hi"]),
            )
        if "literature_band_hz" in data and data["literature_band_hz"] is not None:
            data["literature_band_hz"] = tuple(data["literature_band_hz"])
        if data.get("localization_window") is not None:
            data["localization_window"] = tuple(
                tuple(b) if b is not None else None for b in data["localization_window"]
            )
        return cls(**data)


def human_config() -> PipelineConfig:
    return PipelineConfig(species_band=HUMAN_BAND, horizon_s=120.0)


def chimp_config() -> PipelineConfig:
    return PipelineConfig(species_band=CHIMP_BAND, horizon_s=60.0)

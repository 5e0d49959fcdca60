//! Polarization-resolved Raman spectra: detuning sweeps of the full model,
//! peak extraction, analytic line predictions and the motional-sideband
//! overlay.

mod peaks;
mod sidebands;
mod sweep;

pub use peaks::{
    compare_with_prediction, find_peaks, find_peaks_xy, predict_peaks, strongest_peak, Channel,
    Peak, PeakComparison, PredictedPeak,
};
pub use sidebands::{sideband_overlay, LineKind, OverlayLine, SidebandSpec};
pub use sweep::{solve_point, sweep_spectrum, SpectrumRecord, SweepSpec, SweptParameter};

use num_rational::Rational64;

use crate::atomic::{effective_lines, CavityPolarization, LineLabel};
use crate::dynamics::ModelParams;
use crate::spectrum::SpectrumRecord;

/// Detection channel of a spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Channel {
    H,
    V,
    Total,
}

impl Channel {
    pub fn value(self, record: &SpectrumRecord) -> f64 {
        match self {
            Channel::H => record.rate_h_cps,
            Channel::V => record.rate_v_cps,
            Channel::Total => record.rate_total_cps,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub position_mhz: f64,
    pub height: f64,
    pub prominence: f64,
}

/// Peaks of one channel of a detuning-sorted spectrum.
pub fn find_peaks(records: &[SpectrumRecord], channel: Channel, min_prominence: f64) -> Vec<Peak> {
    let x: Vec<f64> = records.iter().map(|r| r.detuning_mhz).collect();
    let y: Vec<f64> = records.iter().map(|r| channel.value(r)).collect();
    find_peaks_xy(&x, &y, min_prominence)
}

/// Interior local maxima whose topographic prominence is at least
/// `min_prominence`, located by a parabola through the three samples
/// around the maximum.
///
/// Prominence is the height above the higher of the two lowest points
/// reached on each side before meeting a higher sample (or the edge).
/// A flat top counts once, at its left sample.
pub fn find_peaks_xy(x: &[f64], y: &[f64], min_prominence: f64) -> Vec<Peak> {
    assert_eq!(x.len(), y.len(), "x and y must have equal length");
    let n = y.len();
    let mut peaks = Vec::new();
    if n < 3 {
        return peaks;
    }
    let mut i = 1;
    while i + 1 < n {
        if y[i] > y[i - 1] {
            let mut j = i;
            while j + 1 < n && y[j + 1] == y[i] {
                j += 1;
            }
            if j + 1 < n && y[j + 1] < y[i] {
                let prominence = prominence(y, i, j);
                if prominence >= min_prominence && prominence > 0.0 {
                    let (position_mhz, height) = if j == i {
                        parabola_vertex(&x[i - 1..=i + 1], &y[i - 1..=i + 1])
                    } else {
                        (0.5 * (x[i] + x[j]), y[i])
                    };
                    peaks.push(Peak {
                        position_mhz,
                        height,
                        prominence,
                    });
                }
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    peaks
}

/// The tallest peak of one channel, if any clears `min_prominence`.
pub fn strongest_peak(
    records: &[SpectrumRecord],
    channel: Channel,
    min_prominence: f64,
) -> Option<Peak> {
    find_peaks(records, channel, min_prominence)
        .into_iter()
        .max_by(|a, b| a.height.total_cmp(&b.height))
}

fn prominence(y: &[f64], left: usize, right: usize) -> f64 {
    let top = y[left];
    let mut left_min = top;
    for k in (0..left).rev() {
        if y[k] > top {
            break;
        }
        left_min = left_min.min(y[k]);
    }
    let mut right_min = top;
    for &v in &y[right + 1..] {
        if v > top {
            break;
        }
        right_min = right_min.min(v);
    }
    top - left_min.max(right_min)
}

fn parabola_vertex(x: &[f64], y: &[f64]) -> (f64, f64) {
    let (x0, x1, x2) = (x[0], x[1], x[2]);
    let (y0, y1, y2) = (y[0], y[1], y[2]);
    let d01 = (y1 - y0) / (x1 - x0);
    let d12 = (y2 - y1) / (x2 - x1);
    let a = (d12 - d01) / (x2 - x0);
    if a >= 0.0 {
        return (x1, y1);
    }
    let b = d01 - a * (x0 + x1);
    let xv = -b / (2.0 * a);
    let yv = y1 + (xv - x1) * (d01 + a * (xv - x0));
    (xv, yv)
}

/// An analytic Raman line to compare with simulated peaks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredictedPeak {
    pub label: LineLabel,
    pub position_mhz: f64,
    pub effective_strength: Rational64,
    pub polarization: CavityPolarization,
}

/// Lines addressed by the drive configuration of `params`, sorted by position.
pub fn predict_peaks(params: &ModelParams) -> Vec<PredictedPeak> {
    let mut peaks: Vec<PredictedPeak> = effective_lines(params.drive_config, params.field())
        .into_iter()
        .map(|l| PredictedPeak {
            label: l.line.label,
            position_mhz: l.position_mhz,
            effective_strength: l.effective_strength,
            polarization: l.cavity_polarization,
        })
        .collect();
    peaks.sort_by(|a, b| a.position_mhz.total_cmp(&b.position_mhz));
    peaks
}

/// Simulated peaks matched one-to-one, in order, with predicted lines
/// after removing one common offset.
#[derive(Debug, Clone, PartialEq)]
pub struct PeakComparison {
    /// Mean of (found − predicted).
    pub offset_mhz: f64,
    /// (label, predicted, found, found − predicted − offset).
    pub matches: Vec<(LineLabel, f64, f64, f64)>,
}

impl PeakComparison {
    pub fn max_abs_residual(&self) -> f64 {
        self.matches.iter().map(|m| m.3.abs()).fold(0.0, f64::max)
    }
}

/// Pairs sorted `found` positions with sorted `predicted` ones. Returns
/// `None` when the counts differ.
pub fn compare_with_prediction(
    found: &[Peak],
    predicted: &[PredictedPeak],
) -> Option<PeakComparison> {
    if found.len() != predicted.len() || found.is_empty() {
        return None;
    }
    let mut f: Vec<f64> = found.iter().map(|p| p.position_mhz).collect();
    f.sort_by(f64::total_cmp);
    let mut p = predicted.to_vec();
    p.sort_by(|a, b| a.position_mhz.total_cmp(&b.position_mhz));
    let offset_mhz = f
        .iter()
        .zip(&p)
        .map(|(fx, px)| fx - px.position_mhz)
        .sum::<f64>()
        / f.len() as f64;
    let matches = f
        .iter()
        .zip(&p)
        .map(|(&fx, px)| {
            (
                px.label,
                px.position_mhz,
                fx,
                fx - px.position_mhz - offset_mhz,
            )
        })
        .collect();
    Some(PeakComparison {
        offset_mhz,
        matches,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atomic::DriveConfig;

    fn lorentzian(x: f64, x0: f64, w: f64) -> f64 {
        1.0 / (1.0 + ((x - x0) / w).powi(2))
    }

    #[test]
    fn flat_input_has_no_peaks() {
        let x: Vec<f64> = (0..50).map(f64::from).collect();
        assert!(find_peaks_xy(&x, &vec![3.0; 50], 0.0).is_empty());
    }

    #[test]
    fn recovers_six_lorentzian_centres() {
        let centres = [-11.95, -5.12, -1.71, 1.71, 5.12, 11.95];
        let heights = [0.5, 1.0, 0.8, 0.7, 0.9, 0.45];
        let x: Vec<f64> = (0..241).map(|i| -15.0 + 0.125 * i as f64).collect();
        let y: Vec<f64> = x
            .iter()
            .map(|&xi| {
                0.01 + centres
                    .iter()
                    .zip(&heights)
                    .map(|(&c, &h)| h * lorentzian(xi, c, 0.4))
                    .sum::<f64>()
            })
            .collect();
        let peaks = find_peaks_xy(&x, &y, 0.05);
        assert_eq!(peaks.len(), 6);
        for (p, c) in peaks.iter().zip(centres) {
            assert!(
                (p.position_mhz - c).abs() < 0.125,
                "{} vs {c}",
                p.position_mhz
            );
        }
    }

    #[test]
    fn prominence_filters_shoulders() {
        let x: Vec<f64> = (0..9).map(f64::from).collect();
        let y = [0.0, 1.0, 0.9, 1.0, 5.0, 1.0, 0.0, 0.2, 0.0];
        let all = find_peaks_xy(&x, &y, 0.0);
        assert_eq!(all.len(), 3);
        let big = find_peaks_xy(&x, &y, 0.5);
        assert_eq!(big.len(), 1);
        assert!((big[0].prominence - 5.0).abs() < 1e-12);
        assert!((all[0].prominence - 0.1).abs() < 1e-12);
    }

    #[test]
    fn strongest_of_several() {
        let x: Vec<f64> = (0..101).map(|i| -5.0 + 0.1 * i as f64).collect();
        let records: Vec<SpectrumRecord> = x
            .iter()
            .map(|&d| SpectrumRecord {
                detuning_mhz: d,
                n_h: 0.0,
                n_v: 0.0,
                rate_h_cps: 2.0 * lorentzian(d, -2.0, 0.3),
                rate_v_cps: 3.0 * lorentzian(d, 1.5, 0.3),
                rate_total_cps: 2.0 * lorentzian(d, -2.0, 0.3) + 3.0 * lorentzian(d, 1.5, 0.3),
                residual: 0.0,
                top_fock_population: 0.0,
            })
            .collect();
        let p = strongest_peak(&records, Channel::Total, 0.1).unwrap();
        assert!((p.position_mhz - 1.5).abs() < 0.01);
        assert!(
            (strongest_peak(&records, Channel::H, 0.1)
                .unwrap()
                .position_mhz
                + 2.0)
                .abs()
                < 0.01
        );
        assert!(strongest_peak(&records, Channel::H, 10.0).is_none());
    }

    #[test]
    fn parabola_vertex_is_exact_for_parabolas() {
        let f = |x: f64| 2.0 - 3.0 * (x - 0.37).powi(2);
        let x = [0.0, 0.5, 1.1];
        let (xv, yv) = parabola_vertex(&x, &x.map(f));
        assert!((xv - 0.37).abs() < 1e-12 && (yv - 2.0).abs() < 1e-12);
    }

    #[test]
    fn predicted_positions() {
        let pi = ModelParams {
            b_mt: 0.61,
            ..ModelParams::default()
        };
        let peaks = predict_peaks(&pi);
        assert_eq!(peaks[0].label, LineLabel::A);
        assert!((peaks[0].position_mhz + 11.95).abs() < 0.01);
        let sigma = ModelParams {
            drive_config: DriveConfig::Sigma,
            ..pi.clone()
        };
        let l = predict_peaks(&sigma)
            .into_iter()
            .find(|p| p.label == LineLabel::L)
            .unwrap();
        assert!((l.position_mhz - 18.78).abs() < 0.01);
        let zero = ModelParams { b_mt: 0.0, ..pi };
        assert!(predict_peaks(&zero).iter().all(|p| p.position_mhz == 0.0));
    }

    #[test]
    fn common_offset_is_removed() {
        let params = ModelParams {
            b_mt: 0.61,
            ..ModelParams::default()
        };
        let predicted = predict_peaks(&params);
        let found: Vec<Peak> = predicted
            .iter()
            .map(|p| Peak {
                position_mhz: p.position_mhz + 4.2,
                height: 1.0,
                prominence: 1.0,
            })
            .collect();
        let cmp = compare_with_prediction(&found, &predicted).unwrap();
        assert!((cmp.offset_mhz - 4.2).abs() < 1e-12);
        assert!(cmp.max_abs_residual() < 1e-12);
        assert!(compare_with_prediction(&found[..5], &predicted).is_none());
    }
}

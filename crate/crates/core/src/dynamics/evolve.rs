use crate::error::{DomainError, NumericalError, Result};
use crate::operators::{DensityMatrix, SparseMatrix, C64};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        EvolveOptions {
            rtol: 1e-10,
            atol: 1e-12,
            max_steps: 5_000_000,
        }
    }
}

/// ρ(t) under dρ/dt = L ρ, `t` in µs, with default tolerances.
pub fn evolve(rho0: &DensityMatrix, l: &SparseMatrix, t: f64) -> Result<DensityMatrix> {
    evolve_with(rho0, l, t, EvolveOptions::default())
}

// Dormand-Prince 5(4) tableau. The generator is time independent, so the
// nodes c_i are not needed; the last row of A equals the fifth-order weights.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Adaptive Dormand-Prince 5(4) integration of the master equation.
///
/// The error norm is the RMS of |err_i| / (atol + rtol·max(|y_i|, |y_new,i|)).
/// The final state is Hermitized but not renormalized, so the returned
/// trace measures the integration error.
pub fn evolve_with(
    rho0: &DensityMatrix,
    l: &SparseMatrix,
    t: f64,
    options: EvolveOptions,
) -> Result<DensityMatrix> {
    let n = l.rows();
    if !l.is_square() || n != rho0.dim() * rho0.dim() {
        return Err(DomainError::DimensionMismatch {
            expected: rho0.dim() * rho0.dim(),
            got: n,
        }
        .into());
    }
    if !(t.is_finite() && t >= 0.0) {
        return Err(DomainError::InvalidParameter {
            name: "t",
            value: t,
            reason: "evolution time must be finite and non-negative",
        }
        .into());
    }
    let mut y = rho0.to_vec();
    if t == 0.0 || l.nnz() == 0 {
        return Ok(rho0.clone());
    }

    let zero = C64::new(0.0, 0.0);
    let mut k: Vec<Vec<C64>> = vec![vec![zero; n]; 7];
    let mut stage = vec![zero; n];
    let mut y_new = vec![zero; n];
    l.matvec_into(&y, &mut k[0]);

    let mut h = (0.5 / l.max_abs()).min(t);
    let mut time = 0.0;
    let mut steps = 0;
    while time < t {
        if steps >= options.max_steps {
            return Err(NumericalError::TooManySteps(options.max_steps).into());
        }
        steps += 1;
        let last = time + h >= t;
        if last {
            h = t - time;
        }
        for s in 1..7 {
            for i in 0..n {
                let mut acc = y[i];
                for (j, kj) in k.iter().enumerate().take(s) {
                    if A[s][j] != 0.0 {
                        acc += kj[i] * (h * A[s][j]);
                    }
                }
                stage[i] = acc;
            }
            l.matvec_into(&stage, &mut k[s]);
        }
        // The seventh stage is evaluated at y_new (first-same-as-last).
        y_new.copy_from_slice(&stage);
        let mut err_sq = 0.0;
        for i in 0..n {
            let mut e = zero;
            for (j, kj) in k.iter().enumerate() {
                if E[j] != 0.0 {
                    e += kj[i] * (h * E[j]);
                }
            }
            let sc = options.atol + options.rtol * y[i].norm().max(y_new[i].norm());
            err_sq += (e.norm() / sc).powi(2);
        }
        let err = (err_sq / n as f64).sqrt();

        if err <= 1.0 {
            time = if last { t } else { time + h };
            std::mem::swap(&mut y, &mut y_new);
            let (first, rest) = k.split_at_mut(1);
            first[0].copy_from_slice(&rest[5]);
        }
        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        h *= if err <= 1.0 { factor } else { factor.min(1.0) };
        if h < 1e-14 * time.max(1.0) {
            return Err(NumericalError::StepUnderflow {
                t: time,
                h,
                error: err,
            }
            .into());
        }
    }
    Ok(DensityMatrix::from_vec(&y)?.hermitized_unnormalized())
}

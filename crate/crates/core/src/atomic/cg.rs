//! Clebsch-Gordan coefficients in exact rational arithmetic (Racah's closed
//! form, Condon-Shortley phase).

use num_rational::Ratio;
use num_rational::Rational64;

use super::{AtomicLevel, HalfInt, Manifold};

type R128 = Ratio<i128>;

fn factorial(n: i32) -> i128 {
    debug_assert!(n >= 0);
    (1..=i128::from(n)).product()
}

/// Signed square sign(c)·c² of ⟨j1 m1; j2 m2 | J M⟩.
///
/// Returns zero for projection mismatch or a violated triangle condition.
pub fn cg_signed_square(
    j1: HalfInt,
    m1: HalfInt,
    j2: HalfInt,
    m2: HalfInt,
    j: HalfInt,
    m: HalfInt,
) -> Rational64 {
    let (j1, m1, j2, m2, j, m) = (
        j1.twice(),
        m1.twice(),
        j2.twice(),
        m2.twice(),
        j.twice(),
        m.twice(),
    );
    let zero = Rational64::from_integer(0);
    if m1 + m2 != m || m1.abs() > j1 || m2.abs() > j2 || m.abs() > j {
        return zero;
    }
    if (j1 + m1) % 2 != 0 || (j2 + m2) % 2 != 0 || (j + m) % 2 != 0 {
        return zero;
    }
    if j < (j1 - j2).abs() || j > j1 + j2 || (j1 + j2 + j) % 2 != 0 {
        return zero;
    }
    // All arguments below are integers: halve the doubled quantities.
    let h = |x: i32| x / 2;
    let a = h(j1 + j2 - j);
    let b = h(j1 - m1);
    let c = h(j2 + m2);
    let d = h(j - j2 + m1);
    let e = h(j - j1 - m2);

    let prefactor = R128::new(
        i128::from(j + 1)
            * factorial(h(j + j1 - j2))
            * factorial(h(j - j1 + j2))
            * factorial(a)
            * factorial(h(j + m))
            * factorial(h(j - m))
            * factorial(h(j1 - m1))
            * factorial(h(j1 + m1))
            * factorial(h(j2 - m2))
            * factorial(h(j2 + m2)),
        factorial(h(j1 + j2 + j) + 1),
    );

    let k_min = 0.max(-d).max(-e);
    let k_max = a.min(b).min(c);
    let mut sum = R128::from_integer(0);
    for k in k_min..=k_max {
        let denom = factorial(k)
            * factorial(a - k)
            * factorial(b - k)
            * factorial(c - k)
            * factorial(d + k)
            * factorial(e + k);
        let term = R128::new(1, denom);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    let sign = if sum < R128::from_integer(0) { -1 } else { 1 };
    let square = prefactor * sum * sum * R128::from_integer(sign);
    Rational64::new(
        i64::try_from(*square.numer()).expect("coefficient numerator overflow"),
        i64::try_from(*square.denom()).expect("coefficient denominator overflow"),
    )
}

/// ⟨j1 m1; 1 q | j2 m2⟩ as a float. Out-of-range projections give 0.
pub fn cg_amplitude(j1: HalfInt, m1: HalfInt, q: i32, j2: HalfInt, m2: HalfInt) -> f64 {
    if q.abs() > 1 {
        return 0.0;
    }
    let s = cg_signed_square(j1, m1, HalfInt::from_int(1), HalfInt::from_int(q), j2, m2);
    signed_sqrt(s)
}

pub(crate) fn signed_sqrt(s: Rational64) -> f64 {
    let v = *s.numer() as f64 / *s.denom() as f64;
    v.signum() * v.abs().sqrt()
}

/// Normalised dipole amplitude between a lower sublevel and a P1/2 sublevel,
/// ⟨J_low m_low; 1 q | 1/2 m_P⟩ with q = m_P - m_low, as a signed square.
///
/// Summed over the lower manifold and q, the squares give 1 for every P
/// sublevel, so the same weights serve as decay branching ratios.
pub(crate) fn dipole_signed_square(lower: AtomicLevel, upper: AtomicLevel) -> Rational64 {
    debug_assert_eq!(upper.manifold(), Manifold::P12);
    let q = upper.m().twice() - lower.m().twice();
    if q.abs() > 2 {
        return Rational64::from_integer(0);
    }
    cg_signed_square(
        lower.j(),
        lower.m(),
        HalfInt::from_int(1),
        HalfInt::from_twice(q),
        upper.j(),
        upper.m(),
    )
}

/// Float amplitude of [`dipole_signed_square`]; zero unless `upper` is a P
/// sublevel and `lower` an S or D sublevel reachable with |q| ≤ 1.
pub fn dipole_weight(lower: AtomicLevel, upper: AtomicLevel) -> f64 {
    if upper.manifold() != Manifold::P12 || lower.manifold() == Manifold::P12 {
        return 0.0;
    }
    signed_sqrt(dipole_signed_square(lower, upper))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use num_traits::Signed;

    fn h(t: i32) -> HalfInt {
        HalfInt::from_twice(t)
    }

    /// Brute-force coefficients from the lowering-operator construction of
    /// |J M⟩ states in the product basis of j1 ⊗ 1, independent of Racah's
    /// formula. Returns cg[(m1, q)] for a fixed J, M.
    fn lowering_table(j1_2: i32, big_j2: i32) -> Vec<((i32, i32, i32), f64)> {
        // Product basis |m1, q⟩ with m1 in doubled units, q in {-1, 0, 1}.
        let m1s: Vec<i32> = (-j1_2..=j1_2).step_by(2).collect();
        let basis: Vec<(i32, i32)> = m1s
            .iter()
            .flat_map(|&m1| (-1..=1).map(move |q| (m1, q)))
            .collect();
        let idx = |m1: i32, q: i32| basis.iter().position(|&b| b == (m1, q));
        let jminus = |j2: i32, m2: i32| -> f64 {
            // ⟨m-1|J-|m⟩ = sqrt(j(j+1) - m(m-1)) in doubled units.
            let (j, m) = (j2 as f64 / 2.0, m2 as f64 / 2.0);
            (j * (j + 1.0) - m * (m - 1.0)).sqrt()
        };
        let lower = |v: &Vec<f64>| -> Vec<f64> {
            let mut out = vec![0.0; basis.len()];
            for (k, &(m1, q)) in basis.iter().enumerate() {
                if v[k] == 0.0 {
                    continue;
                }
                if m1 - 2 >= -j1_2 {
                    out[idx(m1 - 2, q).unwrap()] += v[k] * jminus(j1_2, m1);
                }
                if q >= 0 {
                    out[idx(m1, q - 1).unwrap()] += v[k] * jminus(2, 2 * q);
                }
            }
            out
        };
        let normalize = |v: &mut Vec<f64>| {
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.iter_mut().for_each(|x| *x /= n);
        };
        // Highest-weight state of J: for J = j1 + 1 it is |j1, 1⟩; otherwise
        // orthogonalise against the higher multiplets' states with M = J.
        let mut multiplets: Vec<(i32, Vec<Vec<f64>>)> = Vec::new();
        let mut j2 = j1_2 + 2;
        while j2 >= (j1_2 - 2).abs() && j2 >= big_j2 {
            let mut top = vec![0.0; basis.len()];
            // Seed with any vector in the M = J subspace, then Gram-Schmidt.
            for (k, &(m1, q)) in basis.iter().enumerate() {
                if m1 + 2 * q == j2 {
                    top[k] = 1.0 + k as f64;
                }
            }
            for (_, states) in &multiplets {
                for s in states {
                    let proj: f64 = s.iter().zip(&top).map(|(a, b)| a * b).sum();
                    let m_of_s = basis
                        .iter()
                        .zip(s)
                        .find(|(_, &x)| x.abs() > 1e-14)
                        .map(|(&(m1, q), _)| m1 + 2 * q)
                        .unwrap();
                    if m_of_s == j2 {
                        top.iter_mut().zip(s).for_each(|(t, x)| *t -= proj * x);
                    }
                }
            }
            normalize(&mut top);
            // Condon-Shortley: ⟨j1 j1; 1 (J-j1) | J J⟩ > 0.
            if let Some(k) = basis
                .iter()
                .position(|&(m1, q)| m1 == j1_2 && 2 * q == j2 - j1_2)
            {
                if top[k] < 0.0 {
                    top.iter_mut().for_each(|x| *x = -*x);
                }
            }
            let mut states = vec![top.clone()];
            let mut cur = top;
            let mut m2 = j2;
            while m2 > -j2 {
                let mut next = lower(&cur);
                normalize(&mut next);
                states.push(next.clone());
                cur = next;
                m2 -= 2;
            }
            multiplets.push((j2, states));
            j2 -= 2;
        }
        let (_, states) = multiplets.iter().find(|(j, _)| *j == big_j2).unwrap();
        let mut out = Vec::new();
        for (i, s) in states.iter().enumerate() {
            let m2 = big_j2 - 2 * i as i32;
            for (k, &(m1, q)) in basis.iter().enumerate() {
                out.push(((m1, q, m2), s[k]));
            }
        }
        out
    }

    #[test]
    fn examples() {
        assert_abs_diff_eq!(
            cg_amplitude(h(1), h(1), 1, h(3), h(3)),
            1.0,
            epsilon = 1e-15
        );
        assert_eq!(cg_amplitude(h(1), h(1), 0, h(3), h(3)), 0.0);
        let s = cg_signed_square(h(1), h(-1), h(2), h(0), h(3), h(-1));
        assert_eq!(s.abs(), Rational64::new(2, 3));
        assert_eq!(cg_amplitude(h(1), h(1), 2, h(3), h(3)), 0.0);
    }

    #[test]
    fn racah_matches_lowering_construction() {
        for (j1, j2) in [(1, 1), (1, 3), (3, 1), (3, 3), (3, 5)] {
            for ((m1, q, m2), expected) in lowering_table(j1, j2) {
                let got = cg_amplitude(h(j1), h(m1), q, h(j2), h(m2));
                assert_abs_diff_eq!(got, expected, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn completeness_over_upper_manifolds() {
        // Σ_{J, M} |⟨1/2 m1; 1 q | J M⟩|² = 1 for every (m1, q).
        for m1 in [-1, 1] {
            for q in -1..=1 {
                let total: f64 = [1, 3]
                    .iter()
                    .flat_map(|&j2| (-j2..=j2).step_by(2).map(move |m2| (j2, m2)))
                    .map(|(j2, m2)| cg_amplitude(h(1), h(m1), q, h(j2), h(m2)).powi(2))
                    .sum();
                assert_abs_diff_eq!(total, 1.0, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn dipole_weights_are_branching_ratios() {
        for p in AtomicLevel::manifold_levels(Manifold::P12) {
            for lower in [Manifold::S12, Manifold::D32] {
                let total: Rational64 = AtomicLevel::manifold_levels(lower)
                    .map(|l| dipole_signed_square(l, p).abs())
                    .sum();
                assert_eq!(total, Rational64::from_integer(1));
            }
        }
        assert_eq!(dipole_weight(AtomicLevel::d(3), AtomicLevel::p(-1)), 0.0);
        assert_eq!(dipole_weight(AtomicLevel::p(1), AtomicLevel::p(1)), 0.0);
    }
}

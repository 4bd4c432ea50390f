//! Best N-term selection over coefficients listed in canonical basis order.

use std::cmp::Ordering;

use crate::error::{Error, Result};

/// Magnitudes closer than this fraction of the largest one compare equal.
///
/// Symmetric kernels produce coefficients that are equal in exact arithmetic
/// but differ in the last bits after quadrature, and the tie-break must not
/// depend on that noise.
pub const TIE_TOLERANCE: f64 = 1e-9;

/// Magnitudes snapped to a grid of `TIE_TOLERANCE × peak`, so near-equal
/// values share a key while the comparison stays a total order.
fn magnitude_keys(coeffs: &[f64]) -> Vec<f64> {
    let peak = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    if peak == 0.0 || !peak.is_finite() {
        return coeffs.iter().map(|c| c.abs()).collect();
    }
    let step = peak * TIE_TOLERANCE;
    coeffs.iter().map(|c| (c.abs() / step).round()).collect()
}

/// Orders indices by decreasing magnitude, ties going to the smaller index.
fn by_magnitude(keys: &[f64]) -> impl Fn(&usize, &usize) -> Ordering + '_ {
    move |&a, &b| keys[b].total_cmp(&keys[a]).then(a.cmp(&b))
}

/// Indices of the `n` largest-magnitude coefficients among the first `m`,
/// returned in canonical (ascending index) order.
pub fn best_n_terms(coeffs: &[f64], n: usize, m: usize) -> Result<Vec<usize>> {
    if n == 0 {
        return Err(Error::InvalidParameter("N must be at least 1".into()));
    }
    if m < n {
        return Err(Error::InvalidParameter(format!("M ({m}) must be at least N ({n})")));
    }
    let available = m.min(coeffs.len());
    if n > available {
        return Err(Error::NotEnoughCoefficients {
            requested: n,
            available,
        });
    }
    let mut idx: Vec<usize> = (0..available).collect();
    let keys = magnitude_keys(coeffs);
    idx.sort_by(by_magnitude(&keys));
    idx.truncate(n);
    idx.sort_unstable();
    Ok(idx)
}

/// Smallest `M` such that the global top-`n` set lies within the first `M`
/// coefficients.
pub fn min_m_for_top_n(coeffs: &[f64], n: usize) -> Result<usize> {
    let top = best_n_terms(coeffs, n, coeffs.len().max(n))?;
    Ok(top.last().map_or(0, |&i| i + 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn picks_largest_magnitude() {
        assert_eq!(best_n_terms(&[5.0, -7.0, 3.0], 1, 3).unwrap(), vec![1]);
    }

    #[test]
    fn ties_go_to_smaller_index() {
        assert_eq!(best_n_terms(&[1.0, -2.0, 2.0, 2.0], 2, 4).unwrap(), vec![1, 2]);
    }

    #[test]
    fn rounding_noise_counts_as_tie() {
        let c = 0.25;
        assert_eq!(best_n_terms(&[1.0, 0.0, c, c * (1.0 + 1e-14)], 1, 4).unwrap(), vec![0]);
        assert_eq!(
            best_n_terms(&[1.0, 0.0, c, c * (1.0 + 1e-14)], 2, 4).unwrap(),
            vec![0, 2]
        );
        assert_eq!(
            best_n_terms(&[1.0, 0.0, c, c * (1.0 + 1e-6)], 2, 4).unwrap(),
            vec![0, 3]
        );
    }

    #[test]
    fn only_first_m_are_candidates() {
        assert_eq!(best_n_terms(&[1.0, 0.5, 9.0], 1, 2).unwrap(), vec![0]);
    }

    #[test]
    fn contract_errors() {
        assert!(matches!(
            best_n_terms(&[1.0, 2.0], 3, 5),
            Err(Error::NotEnoughCoefficients {
                requested: 3,
                available: 2
            })
        ));
        assert!(best_n_terms(&[1.0], 0, 1).is_err());
        assert!(best_n_terms(&[1.0, 2.0], 2, 1).is_err());
    }

    #[test]
    fn min_m_examples() {
        let a = [0.41, 0.49, 0.095, 0.0078, -0.00065, 0.00059];
        let rows: Vec<usize> = (1..=6).map(|n| min_m_for_top_n(&a, n).unwrap()).collect();
        assert_eq!(rows, vec![2, 2, 3, 4, 5, 6]);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn selection_is_top_n(v in proptest::collection::vec(-100.0f64..100.0, 1..40), n in 1usize..10) {
                let n = n.min(v.len());
                let picked = best_n_terms(&v, n, v.len()).unwrap();
                prop_assert_eq!(picked.len(), n);
                prop_assert!(picked.windows(2).all(|w| w[0] < w[1]));
                let floor = picked.iter().map(|&i| v[i].abs()).fold(f64::INFINITY, f64::min);
                let slack = v.iter().fold(0.0f64, |m, x| m.max(x.abs())) * TIE_TOLERANCE;
                for (i, x) in v.iter().enumerate() {
                    if !picked.contains(&i) {
                        prop_assert!(x.abs() <= floor + slack);
                    }
                }
            }

            #[test]
            fn positive_scaling_keeps_selection(v in proptest::collection::vec(-100.0f64..100.0, 1..40), s in 0.01f64..100.0, n in 1usize..10) {
                let n = n.min(v.len());
                let scaled: Vec<f64> = v.iter().map(|x| x * s).collect();
                prop_assert_eq!(best_n_terms(&v, n, v.len()).unwrap(), best_n_terms(&scaled, n, v.len()).unwrap());
            }

            #[test]
            fn min_m_reproduces_global_top(v in proptest::collection::vec(-100.0f64..100.0, 1..40), n in 1usize..10) {
                let n = n.min(v.len());
                let m = min_m_for_top_n(&v, n).unwrap();
                prop_assert_eq!(best_n_terms(&v, n, m).unwrap(), best_n_terms(&v, n, v.len()).unwrap());
                if m > n {
                    prop_assert_ne!(best_n_terms(&v, n, m - 1).unwrap(), best_n_terms(&v, n, v.len()).unwrap());
                }
            }
        }
    }
}

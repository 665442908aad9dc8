//! Chi-square goodness-of-fit machinery for the simulator's statistical checks.

use crate::combinatorics::ln_gamma_half_integer;

/// Pearson statistic over cells with positive expectation.
pub fn chi_square_statistic(observed: &[f64], expected: &[f64]) -> f64 {
    assert_eq!(observed.len(), expected.len());
    observed
        .iter()
        .zip(expected)
        .filter(|(_, &e)| e > 0.0)
        .map(|(&o, &e)| {
            let diff = o - e;
            diff * diff / e
        })
        .sum()
}

/// Upper-tail p-value of the chi-square distribution with `dof` degrees of
/// freedom, i.e. `Q(dof/2, x/2)`.
pub fn chi_square_pvalue(statistic: f64, dof: u64) -> f64 {
    if dof == 0 {
        // Degenerate fit (single cell): any nonzero statistic is impossible.
        return if statistic <= 1e-9 { 1.0 } else { 0.0 };
    }
    regularized_gamma_upper_half(dof, statistic / 2.0)
}

/// `Q(a, x)` for half-integer `a = two_a / 2`: series for the lower tail,
/// Lentz continued fraction for the upper.
fn regularized_gamma_upper_half(two_a: u64, x: f64) -> f64 {
    let a = two_a as f64 / 2.0;
    if x <= 0.0 {
        return 1.0;
    }
    let log_scale = -x + a * x.ln() - ln_gamma_half_integer(two_a);
    if x < a + 1.0 {
        // P(a, x) by series, then complement.
        let mut ap = a;
        let mut del = 1.0 / a;
        let mut sum = del;
        for _ in 0..1000 {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if del.abs() < sum.abs() * 1e-16 {
                break;
            }
        }
        (1.0 - sum * log_scale.exp()).clamp(0.0, 1.0)
    } else {
        let tiny = 1e-300;
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..1000u32 {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < tiny {
                d = tiny;
            }
            c = b + an / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = 1.0 / d;
            let del = d * c;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                break;
            }
        }
        (log_scale.exp() * h).clamp(0.0, 1.0)
    }
}

/// Pool cells whose expectation is below `min_expected` into one bucket.
/// Returns (observed, expected) after pooling.
pub fn pool_sparse_cells(
    observed: &[f64],
    expected: &[f64],
    min_expected: f64,
) -> (Vec<f64>, Vec<f64>) {
    let mut obs = Vec::new();
    let mut exp = Vec::new();
    let mut pooled_obs = 0.0;
    let mut pooled_exp = 0.0;
    for (&o, &e) in observed.iter().zip(expected) {
        if e >= min_expected {
            obs.push(o);
            exp.push(e);
        } else {
            pooled_obs += o;
            pooled_exp += e;
        }
    }
    if pooled_exp > 0.0 {
        obs.push(pooled_obs);
        exp.push(pooled_exp);
    }
    (obs, exp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn pvalue_dof_two_is_exponential() {
        // Q(x; 2) = e^{-x/2} exactly.
        for x in [0.5, 2.0, 6.0, 13.8] {
            assert_abs_diff_eq!(chi_square_pvalue(x, 2), (-x / 2.0).exp(), epsilon = 1e-12);
        }
    }

    #[test]
    fn pvalue_dof_one_matches_erfc() {
        for x in [0.2, 1.0, 4.0, 9.0] {
            let expected = 1.0 - libm::erf((x / 2.0f64).sqrt());
            assert_abs_diff_eq!(chi_square_pvalue(x, 1), expected, epsilon = 1e-12);
        }
    }

    #[test]
    fn pvalue_anchors() {
        // Critical value tables: chi2(0.001; 23) ~ 49.728.
        assert!(chi_square_pvalue(49.0, 23) > 0.001);
        assert!(chi_square_pvalue(50.5, 23) < 0.001);
        assert_abs_diff_eq!(chi_square_pvalue(0.0, 5), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn statistic_and_pooling() {
        let obs = [9.0, 11.0, 1.0];
        let exp = [10.0, 10.0, 0.5];
        let (o, e) = pool_sparse_cells(&obs, &exp, 5.0);
        assert_eq!(o.len(), 3); // sparse cell pooled into its own bucket
        assert_eq!(e.len(), 3);
        let stat = chi_square_statistic(&o, &e);
        assert_abs_diff_eq!(stat, 0.1 + 0.1 + 0.25 / 0.5, epsilon = 1e-12);
    }
}

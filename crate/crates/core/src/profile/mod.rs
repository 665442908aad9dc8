//! The limiting Gaussian profile of the deck-vs-walk distance at deck ratio
//! `c = N/n`: radius `r(c)`, the radial density, closed forms for one and two
//! dimensions, and a general-d quadrature over the ball-hyperplane slice.
//!
//! Measure convention: the zero-sum hyperplane is parametrized by its first
//! `2d - 1` coordinates and integrals use Lebesgue measure on that chart. The
//! radial reduction below is verified against both closed forms in the tests.

use crate::combinatorics::ln_gamma_half_integer;
use crate::error::{Error, Result};

mod quad;

pub use quad::adaptive_gauss_kronrod;

/// Absolute tolerance requested from the radial quadrature.
pub const QUAD_ABS_TOL: f64 = 1e-10;
const QUAD_MAX_SEGMENTS: usize = 100_000;

/// Gauss error function `(2/sqrt(pi)) ∫_0^x e^{-t^2} dt`.
pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

/// Radius `r(c) = sqrt((4d^2 - 2d)(c - 1) ln(c/(c-1)))` of the region where
/// the deck law dominates, in the rescaled suit-count coordinates.
pub fn radius(c: f64, d: u32) -> Result<f64> {
    if d < 1 {
        return Err(Error::domain("dimension d must be at least 1"));
    }
    if c <= 1.0 || c.is_nan() {
        return Err(Error::domain(format!(
            "cards-per-step ratio must exceed 1 (got {c})"
        )));
    }
    let df = d as f64;
    Ok(((4.0 * df * df - 2.0 * df) * (c - 1.0) * (c / (c - 1.0)).ln()).sqrt())
}

/// Profile parameters: ratio `c`, dimension `d` and the derived radius.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProfileParams {
    c: f64,
    d: u32,
    r: f64,
}

impl ProfileParams {
    /// Any `c > 1` is accepted; callers can check `meets_hypothesis` when the
    /// limit statement itself (which needs `c >= 2d`) is what matters.
    pub fn new(c: f64, d: u32) -> Result<Self> {
        let r = radius(c, d)?;
        Ok(ProfileParams { c, d, r })
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn dimension(&self) -> u32 {
        self.d
    }

    pub fn radius(&self) -> f64 {
        self.r
    }

    /// Whether `c >= 2d`, the regime the limit theorem is stated for.
    pub fn meets_hypothesis(&self) -> bool {
        self.c >= 2.0 * self.d as f64
    }
}

/// A profile evaluation: the value and the quadrature error that produced it
/// (zero when a closed form was used).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProfileValue {
    pub value: f64,
    pub quadrature_error: f64,
}

fn density_unchecked(rho: f64, p: &ProfileParams) -> f64 {
    let d = p.d as f64;
    let c = p.c;
    let pref = std::f64::consts::PI.powf(0.5 - d) * 2.0f64.powf(1.5 - 2.0 * d) * d.powf(1.0 - d);
    let rho_sq = rho * rho;
    let first = ((d - 0.5) * (c / (c - 1.0)).ln() - c * rho_sq / (4.0 * d * (c - 1.0))).exp();
    let second = (-rho_sq / (4.0 * d)).exp();
    pref * (first - second)
}

/// The Gaussian profile density at radial distance `rho` from the origin of
/// the zero-sum hyperplane; zero exactly at `rho = r` by construction of `r`.
pub fn gaussian_profile_density(rho: f64, params: &ProfileParams) -> Result<f64> {
    if !(0.0..=params.r * (1.0 + 1e-12)).contains(&rho) {
        return Err(Error::domain(format!(
            "rho = {rho} outside the profile ball [0, {}]",
            params.r
        )));
    }
    Ok(density_unchecked(rho, params))
}

/// Surface area of the unit m-sphere, `2 pi^{(m+1)/2} / Γ((m+1)/2)`.
fn sphere_surface_area(m: u64) -> f64 {
    (2.0f64.ln() + (m as f64 + 1.0) / 2.0 * std::f64::consts::PI.ln()
        - ln_gamma_half_integer(m + 1))
    .exp()
}

/// Integral of the profile over the ball-hyperplane slice, by radial
/// reduction in the chart measure:
/// `(2d)^{-1/2} ω_{2d-2} ∫_0^r ρ^{2d-2} G(ρ) dρ`,
/// with `ω_m` the unit m-sphere area and `(2d)^{-1/2}` the chart Jacobian.
pub fn profile_integral(params: &ProfileParams) -> Result<ProfileValue> {
    let two_d = 2 * params.d as u64;
    let pref = (two_d as f64).powf(-0.5) * sphere_surface_area(two_d - 2);
    let power = (two_d - 2) as i32;
    let p = *params;
    let (integral, err) = adaptive_gauss_kronrod(
        move |rho| rho.powi(power) * density_unchecked(rho, &p),
        0.0,
        params.r,
        QUAD_ABS_TOL,
        QUAD_MAX_SEGMENTS,
    )?;
    Ok(ProfileValue {
        value: (pref * integral).clamp(0.0, 1.0),
        quadrature_error: pref * err,
    })
}

/// Closed form of the limit profile in one dimension (`c >= 2`):
/// `erf(sqrt(c L / 2)) - erf(sqrt((c-1) L / 2))` with `L = ln(c/(c-1))`.
pub fn profile_d1_closed(c: f64) -> Result<f64> {
    if c < 2.0 || c.is_nan() {
        return Err(Error::domain(format!(
            "one-dimensional closed form needs c >= 2 (got {c})"
        )));
    }
    let l = (c / (c - 1.0)).ln();
    Ok(erf((c * l / 2.0).sqrt()) - erf(((c - 1.0) * l / 2.0).sqrt()))
}

/// Closed form of the limit profile in two dimensions (`c >= 4`).
///
/// Radial reduction gives `2π ∫_0^r ρ² G(ρ) dρ`; with `p = 3cL/2` and
/// `q = 3(c-1)L/2` each piece is `∫_0^1 ρ² e^{-sρ²} dρ =
/// (sqrt(π)/4) s^{-3/2} erf(sqrt(s)) - e^{-s}/(2s)`, and the two boundary
/// terms combine through `(c/(c-1))^{3/2} e^{-p} = e^{-q}` into:
/// `erf(sqrt(p)) - erf(sqrt(q)) + sqrt(6(c-1)L/π) e^{-q} / c`.
pub fn profile_d2_closed(c: f64) -> Result<f64> {
    if c < 4.0 || c.is_nan() {
        return Err(Error::domain(format!(
            "two-dimensional closed form needs c >= 4 (got {c})"
        )));
    }
    let l = (c / (c - 1.0)).ln();
    let p = 1.5 * c * l;
    let q = 1.5 * (c - 1.0) * l;
    Ok(erf(p.sqrt()) - erf(q.sqrt())
        + (6.0 * (c - 1.0) * l / std::f64::consts::PI).sqrt() * (-q).exp() / c)
}

/// Limit profile for any dimension: closed forms where available, radial
/// quadrature otherwise.
pub fn asymptotic_profile(d: u32, c: f64) -> Result<f64> {
    match d {
        1 if c >= 2.0 => profile_d1_closed(c),
        2 if c >= 4.0 => profile_d2_closed(c),
        _ => Ok(profile_integral(&ProfileParams::new(c, d)?)?.value),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    // Test-only erf oracle: Maclaurin series near zero, Lentz continued
    // fraction for the complement further out.
    fn erf_oracle(x: f64) -> f64 {
        if x < 0.0 {
            return -erf_oracle(-x);
        }
        if x <= 2.5 {
            let mut term = x;
            let mut sum = x;
            let mut k = 0u32;
            while term.abs() > 1e-20 && k < 200 {
                k += 1;
                term *= -x * x / k as f64;
                sum += term / (2 * k + 1) as f64;
            }
            sum * 2.0 / std::f64::consts::PI.sqrt()
        } else {
            1.0 - erfc_cf(x)
        }
    }

    fn erfc_cf(x: f64) -> f64 {
        // erfc(x) = e^{-x^2}/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
        let tiny = 1e-300;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / x;
        let mut h = d;
        for i in 1..500 {
            let a = i as f64 / 2.0;
            d = x + a * d;
            if d.abs() < tiny {
                d = tiny;
            }
            c = x + a / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = 1.0 / d;
            let delta = c * d;
            h *= delta;
            if (delta - 1.0).abs() < 1e-17 {
                break;
            }
        }
        (-x * x).exp() / std::f64::consts::PI.sqrt() * h
    }

    #[test]
    fn erf_against_series_oracle() {
        let mut x = -6.0;
        while x <= 6.0 {
            assert!(
                (erf(x) - erf_oracle(x)).abs() <= 1e-14,
                "erf({x}) = {} vs oracle {}",
                erf(x),
                erf_oracle(x)
            );
            x += 0.125;
        }
    }

    #[test]
    fn erf_anchors() {
        assert_eq!(erf(0.0), 0.0);
        assert_abs_diff_eq!(erf(1.0), 0.8427007929497149, epsilon = 1e-15);
        assert!((erf(6.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn erf_odd_symmetry_is_exact() {
        let mut x = 0.0;
        while x <= 6.0 {
            assert_eq!(erf(-x), -erf(x), "asymmetry at {x}");
            x += 0.0625;
        }
    }

    #[test]
    fn radius_examples() {
        assert_abs_diff_eq!(
            radius(2.0, 1).unwrap(),
            (2.0 * 2.0f64.ln()).sqrt(),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(radius(2.0, 1).unwrap(), 1.1774100226, epsilon = 1e-9);
        assert_abs_diff_eq!(
            radius(4.0, 2).unwrap(),
            (36.0 * (4.0f64 / 3.0).ln()).sqrt(),
            epsilon = 1e-15
        );
        assert!((radius(4.0, 2).unwrap() - 3.2182).abs() < 1e-4);
        // (c-1) ln(c/(c-1)) -> 1, so r -> sqrt(4d^2 - 2d).
        for d in 1..=3u32 {
            let limit = (4.0 * (d as f64).powi(2) - 2.0 * d as f64).sqrt();
            assert_abs_diff_eq!(radius(1e8, d).unwrap(), limit, epsilon = 1e-6);
        }
        assert!(radius(1.0, 1).is_err());
        assert!(radius(0.5, 2).is_err());
    }

    #[test]
    fn density_zero_exactly_at_radius() {
        for (c, d) in [
            (2.0, 1u32),
            (3.5, 1),
            (4.0, 2),
            (9.0, 2),
            (6.0, 3),
            (40.0, 3),
        ] {
            let p = ProfileParams::new(c, d).unwrap();
            let at_edge = gaussian_profile_density(p.radius(), &p).unwrap();
            assert!(at_edge.abs() < 1e-14, "G(r) = {at_edge} at c={c}, d={d}");
            // strictly positive inside
            for frac in [0.1, 0.5, 0.9] {
                let v = gaussian_profile_density(frac * p.radius(), &p).unwrap();
                assert!(v > 0.0, "G not positive at {frac} r for c={c}, d={d}");
            }
        }
    }

    #[test]
    fn density_at_origin_matches_hand_value() {
        let p = ProfileParams::new(2.0, 1).unwrap();
        let v = gaussian_profile_density(0.0, &p).unwrap();
        let expected = (2.0f64.sqrt() - 1.0) / (2.0 * std::f64::consts::PI).sqrt();
        assert_abs_diff_eq!(v, expected, epsilon = 1e-15);
        assert!((v - 0.16525).abs() < 1e-5);
    }

    #[test]
    fn density_rejects_rho_outside_ball() {
        let p = ProfileParams::new(2.0, 1).unwrap();
        assert!(gaussian_profile_density(p.radius() * 1.01, &p).is_err());
        assert!(gaussian_profile_density(-0.1, &p).is_err());
    }

    #[test]
    fn quadrature_matches_d1_closed_form() {
        for c in [2.0, 2.94, 10.0, 100.0] {
            let q = profile_integral(&ProfileParams::new(c, 1).unwrap()).unwrap();
            let closed = profile_d1_closed(c).unwrap();
            assert!(
                (q.value - closed).abs() <= 1e-9,
                "c={c}: quad {} vs closed {closed}",
                q.value
            );
        }
    }

    #[test]
    fn quadrature_matches_d2_closed_form() {
        for c in [4.0, 13.0, 55.0] {
            let q = profile_integral(&ProfileParams::new(c, 2).unwrap()).unwrap();
            let closed = profile_d2_closed(c).unwrap();
            assert!(
                (q.value - closed).abs() <= 1e-9,
                "c={c}: quad {} vs closed {closed}",
                q.value
            );
        }
    }

    #[test]
    fn d1_closed_reference_values() {
        // Full-precision value at the smallest ratio; the often-quoted rounded
        // target 0.160 for this ratio is not what the formula evaluates to.
        assert_abs_diff_eq!(
            profile_d1_closed(2.0).unwrap(),
            0.16606407498351283,
            epsilon = 1e-12
        );
        for (c, target) in [
            (2.94, 0.100),
            (5.35, 0.050),
            (24.70, 0.010),
            (48.89, 0.005),
            (242.47, 0.001),
        ] {
            let v = profile_d1_closed(c).unwrap();
            assert!(
                (v - target).abs() <= 5e-4,
                "profile({c}) = {v}, expected ~{target}"
            );
        }
        assert!(profile_d1_closed(1.5).is_err());
    }

    #[test]
    fn d2_closed_domain_and_limit() {
        assert!(profile_d2_closed(3.9).is_err());
        assert!(profile_d2_closed(1e6).unwrap() < 1e-3);
        assert!(profile_d1_closed(1e6).unwrap() < 1e-3);
    }

    #[test]
    fn profile_vanishes_at_huge_ratio() {
        let v = profile_integral(&ProfileParams::new(1e6, 1).unwrap()).unwrap();
        assert!(v.value < 1e-3);
    }

    #[test]
    fn profile_decreasing_in_ratio() {
        for d in [1u32, 2, 3] {
            let mut prev = f64::INFINITY;
            let c_min = 2.0 * d as f64;
            for i in 0..20 {
                let c = c_min * (1e4f64 / c_min).powf(i as f64 / 19.0);
                let v = asymptotic_profile(d, c).unwrap();
                assert!(v < prev, "profile not decreasing at d={d}, c={c}");
                assert!((0.0..=1.0).contains(&v));
                prev = v;
            }
        }
    }

    #[test]
    fn params_hypothesis_flag() {
        assert!(ProfileParams::new(4.0, 2).unwrap().meets_hypothesis());
        assert!(!ProfileParams::new(3.0, 2).unwrap().meets_hypothesis());
        // below the hypothesis the integral is still defined
        let v = profile_integral(&ProfileParams::new(3.0, 2).unwrap()).unwrap();
        assert!(v.value > 0.0 && v.value <= 1.0);
    }
}

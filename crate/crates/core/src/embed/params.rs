use crate::error::{Error, Result, TauInequality};
use crate::scalar::{le_ulps, Scalar};

/// Validated construction parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params<T> {
    /// Snowflake exponent, in `(2/3, 1)`.
    pub alpha: T,
    /// Scale parameter; scales are `tau^(2k)`.
    pub tau: T,
    pub c0: u64,
    /// `log2(c0)`.
    pub n0: T,
    /// Dimension of each color component.
    pub m: usize,
    /// Realized palette size; zero until the levels are colored.
    pub chi: usize,
}

impl<T: Scalar> Params<T> {
    pub fn with_chi(mut self, chi: usize) -> Self {
        self.chi = chi;
        self
    }

    /// Output dimension `2 chi m`.
    pub fn dimension(&self) -> usize {
        2 * self.chi * self.m
    }

    /// `tau^5 / 8`.
    pub fn lower_constant(&self) -> T {
        self.tau.powi(5) / T::lit(8.0)
    }

    /// `5 N tau^(-2(1 - alpha))` with the realized dimension `N`.
    pub fn upper_constant(&self) -> T {
        let n = T::lit(self.dimension() as f64);
        T::lit(5.0) * n * self.tau.powf(-T::lit(2.0) * (T::one() - self.alpha))
    }
}

/// Checks every inequality the construction relies on; the error names the
/// first one that fails.
pub fn validate_params<T: Scalar>(alpha: T, tau: T, c0: u64, m: usize) -> Result<Params<T>> {
    let one = T::one();
    let two = T::lit(2.0);
    let half = T::lit(0.5);
    if !(alpha > two / T::lit(3.0) && alpha < one) {
        return Err(Error::AlphaOutOfRange(alpha.as_f64()));
    }
    if !(tau > T::zero()) {
        return Err(Error::BadTau(tau.as_f64()));
    }
    if c0 == 0 {
        return Err(Error::BadDoublingConstant);
    }
    let too_large = |inequality| Error::TauTooLarge { tau: tau.as_f64(), inequality };

    if !le_ulps(tau, one - alpha) {
        return Err(too_large(TauInequality::OneMinusAlpha));
    }
    if !(tau < half) {
        return Err(too_large(TauInequality::Half));
    }
    if !(tau.powf(two * alpha) < half) {
        return Err(too_large(TauInequality::Convergence));
    }
    let gain = one - tau.powf(two * (one - alpha));
    if !le_ulps(tau * (one / tau).ln(), gain) {
        return Err(too_large(TauInequality::Exponentiation));
    }
    if !le_ulps(tau.powf(two * alpha - one), T::lit(0.125)) {
        return Err(too_large(TauInequality::LowerBoundFactor));
    }

    let n0 = T::lit(c0 as f64).log2();
    if !(T::lit(m as f64) > T::lit(8.0) * n0) {
        return Err(Error::DimensionTooSmall { m, bound: 8.0 * n0.as_f64() });
    }
    Ok(Params { alpha, tau, c0, n0, m, chi: 0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_worked_example() {
        let p = validate_params(0.8, 0.03, 4, 17).unwrap();
        assert_eq!(p.n0, 2.0);
        assert_eq!(p.chi, 0);
    }

    #[test]
    fn rejects_tau_on_lower_bound_factor() {
        // 0.2 <= 1 - 0.8 holds in exact arithmetic; 0.2^0.6 ~ 0.381 > 1/8 does not
        let err = validate_params(0.8, 0.2, 4, 17).unwrap_err();
        assert!(
            matches!(err, Error::TauTooLarge { inequality: TauInequality::LowerBoundFactor, .. }),
            "{err}"
        );
    }

    #[test]
    fn rejects_small_alpha() {
        assert!(matches!(validate_params(0.6, 0.01, 4, 17), Err(Error::AlphaOutOfRange(_))));
        assert!(matches!(validate_params(1.0, 0.01, 4, 17), Err(Error::AlphaOutOfRange(_))));
    }

    #[test]
    fn rejects_each_tau_inequality() {
        let first = |alpha: f64, tau: f64| match validate_params(alpha, tau, 4, 17) {
            Err(Error::TauTooLarge { inequality, .. }) => Some(inequality),
            _ => None,
        };
        assert_eq!(first(0.8, 0.25), Some(TauInequality::OneMinusAlpha));
        assert_eq!(first(0.7, 0.3), Some(TauInequality::LowerBoundFactor));
        assert_eq!(first(0.9, 0.09), Some(TauInequality::LowerBoundFactor));
        assert_eq!(first(0.9, 0.05), None);
        assert!(matches!(validate_params(0.8, 0.0, 4, 17), Err(Error::BadTau(_))));
    }

    #[test]
    fn rejects_small_dimension() {
        assert!(matches!(
            validate_params(0.8, 0.03, 4, 16),
            Err(Error::DimensionTooSmall { m: 16, .. })
        ));
        assert!(validate_params(0.8, 0.03, 1, 1).is_ok());
    }

    #[test]
    fn bound_constants() {
        let p = validate_params(0.8, 0.02, 4, 17).unwrap().with_chi(3);
        assert_eq!(p.dimension(), 102);
        assert!((p.lower_constant() - 0.02f64.powi(5) / 8.0).abs() < 1e-25);
        let expected = 5.0 * 102.0 * 0.02f64.powf(-0.4);
        assert!((p.upper_constant() - expected).abs() < 1e-9 * expected);
    }
}

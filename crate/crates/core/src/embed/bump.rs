use crate::metric::FiniteMetricSpace;
use crate::scalar::Scalar;

/// Cutoff of the ball `B(x_j, r)` as a function of `d(x, x_j)`:
/// 1 on the ball, 0 outside the doubled ball, linear in between.
#[inline]
pub fn bump_profile<T: Scalar>(d: T, r: T) -> T {
    (T::lit(2.0) - d / r).max(T::zero()).min(T::one())
}

/// Bump of the ball `B(center, r)` evaluated at point `x`.
#[inline]
pub fn bump<T: Scalar>(space: &FiniteMetricSpace<T>, center: usize, r: T, x: usize) -> T {
    bump_profile(space.d(center, x), r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn profile_examples() {
        assert_eq!(bump_profile(1.0, 1.0), 1.0);
        assert_eq!(bump_profile(0.0, 1.0), 1.0);
        assert_eq!(bump_profile(2.0, 1.0), 0.0);
        assert_eq!(bump_profile(1.5, 1.0), 0.5);
        assert_eq!(bump_profile(7.5, 5.0), 0.5);
        assert_eq!(bump_profile(30.0, 5.0), 0.0);
    }

    proptest! {
        #[test]
        fn bounded_and_lipschitz(d1 in 0.0f64..10.0, d2 in 0.0f64..10.0, r in 0.01f64..5.0) {
            let (a, b) = (bump_profile(d1, r), bump_profile(d2, r));
            prop_assert!((0.0..=1.0).contains(&a));
            prop_assert!((a - b).abs() <= (d1 - d2).abs() / r * (1.0 + 1e-12) + 1e-15);
        }
    }
}

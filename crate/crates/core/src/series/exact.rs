//! Exact rational origin jets.

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use super::kernel::origin_jet;
use super::{check_origin_order, origin_precondition};
use crate::error::{HalfMapError, Result};

/// Coefficients `c1..c_order` of the origin jet, in exact arithmetic.
pub fn taylor_origin_exact(
    trace: &BigRational,
    det: &BigRational,
    offset: &BigRational,
    order: usize,
) -> Result<Vec<BigRational>> {
    check_origin_order(order)?;
    let four = BigRational::from_integer(4.into());
    let focus = four * det - trace * trace;
    origin_precondition(
        offset.signum().to_i8().unwrap_or(0),
        trace.is_zero(),
        focus.is_positive(),
    )?;
    let jet = origin_jet(trace.clone(), det.clone(), offset.clone(), order + 1).map_err(|n| {
        HalfMapError::PreconditionViolated(format!("degenerate recurrence at order {n}"))
    })?;
    Ok(jet.into_iter().skip(1).collect())
}

/// Rounds a rational to the nearest `f64`.
pub fn to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn printed_sixth_order_exactly() {
        // T = 1, D = 2, a = 1
        let c = taylor_origin_exact(&q(1, 1), &q(2, 1), &q(1, 1), 6).unwrap();
        assert_eq!(c[0], q(-1, 1));
        assert_eq!(c[1], q(-2, 3));
        assert_eq!(c[2], q(-4, 9));
        assert_eq!(c[3], q(2 * (18 - 22), 135));
        assert_eq!(c[4], q(4 * (54 - 26), 405));
        assert_eq!(c[5], q(-2 * (108 - 352 + 100), 945));
    }

    #[test]
    fn fractional_inputs() {
        // T = 1/2, D = 1/3, a = 3/4: c2 = -2T/(3a) = -4/9
        let c = taylor_origin_exact(&q(1, 2), &q(1, 3), &q(3, 4), 2).unwrap();
        assert_eq!(c[1], q(-4, 9));
        assert_eq!(to_f64(&c[1]), -4.0 / 9.0);
    }

    #[test]
    fn requires_tangency_fixed_point() {
        assert!(taylor_origin_exact(&q(1, 1), &q(1, 1), &q(-1, 1), 3).is_err());
        assert!(taylor_origin_exact(&q(0, 1), &q(1, 1), &q(0, 1), 3).is_err());
        let c = taylor_origin_exact(&q(0, 1), &q(1, 1), &q(-1, 1), 4).unwrap();
        assert_eq!(c, vec![q(-1, 1), q(0, 1), q(0, 1), q(0, 1)]);
    }
}

use num_rational::Ratio;

pub type Rational = Ratio<i64>;

/// Best rational approximation of `x` with denominator at most `max_den`
/// (continued fractions, with the semiconvergent check at the end).
pub fn approximate(x: f64, max_den: i64) -> Option<Rational> {
    if !x.is_finite() || max_den < 1 {
        return None;
    }
    let negative = x < 0.0;
    let x = x.abs();
    let (mut p0, mut q0, mut p1, mut q1) = (0i64, 1i64, 1i64, 0i64);
    let mut r = x;
    loop {
        let a = r.floor();
        if a > i64::MAX as f64 / 2.0 {
            break;
        }
        let a = a as i64;
        let p2 = a.checked_mul(p1).and_then(|v| v.checked_add(p0))?;
        let q2 = a.checked_mul(q1).and_then(|v| v.checked_add(q0))?;
        if q2 > max_den {
            // largest semiconvergent that still fits
            let k = (max_den - q0) / q1;
            let (ps, qs) = (k * p1 + p0, k * q1 + q0);
            if qs > 0 && (ps as f64 / qs as f64 - x).abs() < (p1 as f64 / q1 as f64 - x).abs() {
                p1 = ps;
                q1 = qs;
            }
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let frac = r - a as f64;
        if frac.abs() < 1e-15 * r.max(1.0) || (p1 as f64 / q1 as f64 - x).abs() <= f64::EPSILON * x {
            break;
        }
        r = 1.0 / frac;
    }
    if q1 == 0 {
        return None;
    }
    let p = if negative { -p1 } else { p1 };
    Some(Ratio::new(p, q1))
}

pub(crate) fn to_f64(r: &Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

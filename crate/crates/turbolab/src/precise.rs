//! Rigorous interval evaluation of logarithms over exact rationals.
//!
//! `ln` is computed from the atanh series after halving the argument into
//! [1, 2): all series terms are exact rationals and the truncation tail has
//! a closed geometric bound, so every result is a true enclosure. Endpoints
//! are rounded outward to dyadic rationals between operations to keep
//! denominators from exploding.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

#[derive(Clone, Debug)]
pub struct Interval {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl Interval {
    pub fn point(x: BigRational) -> Self {
        Self { lo: x.clone(), hi: x }
    }

    pub fn from_u64(x: u64) -> Self {
        Self::point(BigRational::from_integer(BigInt::from(x)))
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn add(&self, other: &Interval) -> Interval {
        Interval {
            lo: &self.lo + &other.lo,
            hi: &self.hi + &other.hi,
        }
    }

    pub fn sub(&self, other: &Interval) -> Interval {
        Interval {
            lo: &self.lo - &other.hi,
            hi: &self.hi - &other.lo,
        }
    }

    pub fn mul(&self, other: &Interval) -> Interval {
        let candidates = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let lo = candidates.iter().min().unwrap().clone();
        let hi = candidates.iter().max().unwrap().clone();
        Interval { lo, hi }
    }

    pub fn scale(&self, c: &BigRational) -> Interval {
        self.mul(&Interval::point(c.clone()))
    }

    /// Division by a strictly positive interval.
    pub fn div_pos(&self, other: &Interval) -> Interval {
        assert!(other.lo.is_positive(), "divisor must be positive");
        let candidates = [
            &self.lo / &other.lo,
            &self.lo / &other.hi,
            &self.hi / &other.lo,
            &self.hi / &other.hi,
        ];
        let lo = candidates.iter().min().unwrap().clone();
        let hi = candidates.iter().max().unwrap().clone();
        Interval { lo, hi }
    }

    /// Entirely below the other interval.
    pub fn surely_le(&self, other: &Interval) -> bool {
        self.hi <= other.lo
    }

    pub fn surely_gt(&self, other: &Interval) -> bool {
        self.lo > other.hi
    }

    /// Round outward to denominators 2^bits.
    pub fn round_out(&self, bits: u32) -> Interval {
        Interval {
            lo: round_down(&self.lo, bits),
            hi: round_up(&self.hi, bits),
        }
    }
}

fn round_down(x: &BigRational, bits: u32) -> BigRational {
    let scale = BigInt::from(1u8) << bits;
    let scaled = x * BigRational::from_integer(scale.clone());
    BigRational::new(scaled.floor().to_integer(), scale)
}

fn round_up(x: &BigRational, bits: u32) -> BigRational {
    let scale = BigInt::from(1u8) << bits;
    let scaled = x * BigRational::from_integer(scale.clone());
    BigRational::new(scaled.ceil().to_integer(), scale)
}

fn rat(n: u64, d: u64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

// The series run in fixed point at scale 2^f with directed rounding: floors
// for lower endpoints, ceilings for upper ones. That keeps the enclosure
// rigorous while the operands stay at a bounded bit size.

fn fx_floor(x: &BigRational, f: u32) -> BigInt {
    use num_integer::Integer;
    (x.numer() << f).div_floor(x.denom())
}

fn fx_ceil(x: &BigRational, f: u32) -> BigInt {
    div_ceil_big(&(x.numer() << f), x.denom())
}

fn fxmul_floor(a: &BigInt, b: &BigInt, f: u32) -> BigInt {
    (a * b) >> f
}

fn fxmul_ceil(a: &BigInt, b: &BigInt, f: u32) -> BigInt {
    let prod = a * b;
    let mask = (BigInt::one() << f) - BigInt::one();
    (prod + mask) >> f
}

fn div_ceil_big(a: &BigInt, b: &BigInt) -> BigInt {
    use num_integer::Integer;
    (a + (b - BigInt::one())).div_floor(b)
}

/// Fixed-point enclosure of `atanh(y)` for exact rational 0 <= y < 1/2,
/// returned at scale 2^f.
fn atanh_series_fp(y: &BigRational, f: u32) -> (BigInt, BigInt) {
    debug_assert!(!y.is_negative() && *y < rat(1, 2));
    let y_lo = fx_floor(y, f);
    let y_hi = fx_ceil(y, f);
    let y2_lo = fxmul_floor(&y_lo, &y_lo, f);
    let y2_hi = fxmul_ceil(&y_hi, &y_hi, f);
    let one = BigInt::one() << f;
    let mut term_lo = y_lo;
    let mut term_hi = y_hi;
    let mut sum_lo = BigInt::zero();
    let mut sum_hi = BigInt::zero();
    let mut j = 0u64;
    loop {
        let d = BigInt::from(2 * j + 1);
        sum_lo += {
            use num_integer::Integer;
            term_lo.div_floor(&d)
        };
        sum_hi += div_ceil_big(&term_hi, &d);
        term_lo = fxmul_floor(&term_lo, &y2_lo, f);
        term_hi = fxmul_ceil(&term_hi, &y2_hi, f);
        j += 1;
        // tail: sum_{i>=j} y^(2i+1)/(2i+1) <= y^(2j+1) / ((2j+1)(1-y^2))
        let denom = BigInt::from(2 * j + 1) * (&one - &y2_hi);
        debug_assert!(denom.is_positive());
        let tail_hi = div_ceil_big(&(&term_hi << f), &denom);
        if tail_hi <= BigInt::from(4u8) {
            // a few ulps of slack absorb the rounding of this last step
            return (sum_lo, sum_hi + tail_hi + BigInt::from(4u8));
        }
    }
}

/// Enclosure of `ln 2` at scale 2^f.
fn ln2_fp(f: u32) -> (BigInt, BigInt) {
    let (lo, hi) = atanh_series_fp(&rat(1, 3), f);
    (lo << 1, hi << 1)
}

/// Enclosure of `ln x` for exact rational x > 0.
pub fn ln_rational(x: &BigRational, bits: u32) -> Interval {
    assert!(x.is_positive(), "ln needs a positive argument");
    let f = bits + 8;
    // halve into [1, 2)
    let mut k: i64 = 0;
    let mut r = x.clone();
    let two = rat(2, 1);
    let one = BigRational::one();
    while r >= two {
        r /= &two;
        k += 1;
    }
    while r < one {
        r *= &two;
        k -= 1;
    }
    // ln r = 2 atanh((r-1)/(r+1)), argument in [0, 1/3)
    let y = (&r - &one) / (&r + &one);
    let (s_lo, s_hi) = atanh_series_fp(&y, f);
    let (l2_lo, l2_hi) = ln2_fp(f);
    let kk = BigInt::from(k);
    let (k_lo, k_hi) = if k >= 0 {
        (&kk * &l2_lo, &kk * &l2_hi)
    } else {
        (&kk * &l2_hi, &kk * &l2_lo)
    };
    let scale = BigInt::one() << f;
    Interval {
        lo: BigRational::new((s_lo << 1) + k_lo, scale.clone()),
        hi: BigRational::new((s_hi << 1) + k_hi, scale),
    }
    .round_out(bits)
}

/// Enclosure of `ln` over an interval of positive rationals.
pub fn ln_interval(x: &Interval, bits: u32) -> Interval {
    assert!(x.lo.is_positive());
    Interval {
        lo: ln_rational(&x.lo, bits).lo,
        hi: ln_rational(&x.hi, bits).hi,
    }
}

/// Enclosure of `llog N = ln N / ln ln N` for integer N >= 3.
pub fn llog(n: u64, bits: u32) -> Interval {
    let l1 = ln_rational(&BigRational::from_integer(BigInt::from(n)), bits);
    let l2 = ln_interval(&l1, bits);
    l1.div_pos(&l2).round_out(bits)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LlogVerdict {
    Holds,
    Fails,
    /// N below the domain threshold e^(e^t).
    NotApplicable,
}

/// Check `(t llog N)^(t llog N) <= N^t` by comparing `u ln u` against
/// `t ln N` with interval refinement. Domain: `N >= e^(e^t)`, equivalently
/// `ln ln N >= t`.
pub fn llog_check(t: &BigRational, n: u64, max_bits: u32) -> crate::Result<LlogVerdict> {
    assert!(t.is_positive());
    if n < 3 {
        return Ok(LlogVerdict::NotApplicable);
    }
    let mut bits = 96u32;
    loop {
        let l1 = ln_rational(&BigRational::from_integer(BigInt::from(n)), bits);
        let l2 = ln_interval(&l1, bits);
        let t_iv = Interval::point(t.clone());
        // domain: ln ln N >= t
        if l2.surely_le(&t_iv) && l2.hi < *t {
            return Ok(LlogVerdict::NotApplicable);
        }
        if !(l2.lo > *t) {
            // straddles the domain boundary; refine
            if bits >= max_bits {
                return Err(crate::Error::CheckFailed(format!(
                    "llog domain test undecided for t={t}, N={n} at {bits} bits"
                )));
            }
            bits *= 2;
            continue;
        }
        // u = t llog N; compare u ln u with t ln N
        let u = t_iv.mul(&l1).div_pos(&l2).round_out(bits);
        if !u.lo.is_positive() {
            bits *= 2;
            continue;
        }
        let lhs = u.mul(&ln_interval(&u, bits));
        let rhs = t_iv.mul(&l1);
        if lhs.surely_le(&rhs) {
            return Ok(LlogVerdict::Holds);
        }
        if lhs.surely_gt(&rhs) {
            return Ok(LlogVerdict::Fails);
        }
        if bits >= max_bits {
            return Err(crate::Error::CheckFailed(format!(
                "llog comparison undecided for t={t}, N={n} at {bits} bits"
            )));
        }
        bits *= 2;
    }
}

/// Smallest integer N with `ln ln N >= t` (the domain threshold of the
/// sublogarithmic growth inequality), by interval bisection.
pub fn llog_domain_start(t: &BigRational, max_bits: u32) -> crate::Result<u64> {
    let mut lo = 3u64;
    let mut hi = 16u64;
    while !domain_holds(t, hi, max_bits)? {
        lo = hi;
        hi = hi.saturating_mul(4);
    }
    while lo + 1 < hi {
        let mid = lo + (hi - lo) / 2;
        if domain_holds(t, mid, max_bits)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

fn domain_holds(t: &BigRational, n: u64, max_bits: u32) -> crate::Result<bool> {
    if n < 3 {
        return Ok(false);
    }
    let mut bits = 96u32;
    loop {
        let l1 = ln_rational(&BigRational::from_integer(BigInt::from(n)), bits);
        let l2 = ln_interval(&l1, bits);
        if l2.lo >= *t {
            return Ok(true);
        }
        if l2.hi < *t {
            return Ok(false);
        }
        if bits >= max_bits {
            return Err(crate::Error::CheckFailed(format!(
                "domain threshold undecided for t={t}, N={n}"
            )));
        }
        bits *= 2;
    }
}

/// Convenience: parse a decimal string ("0.33") into an exact rational.
pub fn parse_decimal(s: &str) -> crate::Result<BigRational> {
    let s = s.trim();
    let (sign, rest) = match s.strip_prefix('-') {
        Some(r) => (-1i32, r),
        None => (1, s),
    };
    let (int_part, frac_part) = match rest.split_once('.') {
        Some((a, b)) => (a, b),
        None => (rest, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(crate::Error::Spec(format!("invalid decimal {s:?}")));
    }
    let digits = format!("{int_part}{frac_part}");
    if !digits.chars().all(|c| c.is_ascii_digit()) {
        return Err(crate::Error::Spec(format!("invalid decimal {s:?}")));
    }
    let num: BigUint = digits.parse().map_err(|_| {
        crate::Error::Spec(format!("invalid decimal {s:?}"))
    })?;
    let den = BigUint::from(10u8).pow(frac_part.len() as u32);
    let q = BigRational::new(BigInt::from(num), BigInt::from(den));
    Ok(if sign < 0 { -q } else { q })
}

pub fn rational_to_f64(x: &BigRational) -> f64 {
    let num = x.numer();
    let den = x.denom();
    // good enough for reporting; exact values travel alongside
    let nf = num.to_string().parse::<f64>().unwrap_or(f64::NAN);
    let df = den.to_string().parse::<f64>().unwrap_or(f64::NAN);
    nf / df
}

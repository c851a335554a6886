//! Extended-precision reals and their log₂-domain companions.
//!
//! [`Real`] wraps a binary floating-point number with a configurable mantissa
//! width and a 32-bit binary exponent, so magnitudes up to roughly `2^(2^31)`
//! are representable. Every operation rounds to nearest, ties to even.
//! Binary operations run at the wider of the two operand precisions.
//!
//! [`Log2Real`] stores `log₂|x|` plus a sign and is what the engine falls back
//! to once round distances leave the linear exponent range.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use thiserror::Error;

/// Working precision used when callers do not ask for one.
pub const DEFAULT_PRECISION: usize = 256;

/// Smallest accepted mantissa width.
pub const MIN_PRECISION: usize = 64;

/// Largest binary exponent a linear-domain value may carry.
pub(crate) const EXPONENT_LIMIT: i64 = i32::MAX as i64 - 256;

const RM: RoundingMode = RoundingMode::ToEven;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NumericsError {
    #[error("precision of {0} bits is below the minimum of {MIN_PRECISION}")]
    PrecisionTooLow(usize),
    #[error("log-domain sum needs non-negative operands")]
    MixedSign,
    #[error("cannot parse `{0}` as a real number")]
    Parse(String),
}

thread_local! {
    // Memo of ln 2, π, etc. for the transcendental kernels. Holds no observable state.
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constants cache"));
}

fn with_consts<R>(f: impl FnOnce(&mut Consts) -> R) -> R {
    CONSTS.with(|cc| f(&mut cc.borrow_mut()))
}

/// Extended-precision real number.
#[derive(Clone)]
pub struct Real {
    value: BigFloat,
    precision: usize,
}

impl Real {
    fn wrap(value: BigFloat, precision: usize) -> Self {
        Real { value, precision }
    }

    pub fn zero(precision: usize) -> Self {
        Self::from_u64(0, precision)
    }

    pub fn one(precision: usize) -> Self {
        Self::from_u64(1, precision)
    }

    pub fn from_u64(n: u64, precision: usize) -> Self {
        Self::wrap(BigFloat::from_u64(n, precision), precision)
    }

    pub fn from_i64(n: i64, precision: usize) -> Self {
        Self::wrap(BigFloat::from_i64(n, precision), precision)
    }

    /// Exact conversion of a double.
    pub fn from_f64(x: f64, precision: usize) -> Self {
        Self::wrap(BigFloat::from_f64(x, precision), precision)
    }

    /// `num / den` rounded once.
    pub fn from_ratio(num: i64, den: i64, precision: usize) -> Self {
        Self::from_i64(num, precision) / Self::from_i64(den, precision)
    }

    /// `2^k` exactly.
    pub fn pow2(k: i64, precision: usize) -> Self {
        Self::one(precision).mul_pow2(k)
    }

    /// Parses a decimal literal (`-12.5`, `3e-7`, `1.79e+2`).
    pub fn parse(s: &str, precision: usize) -> Result<Self, NumericsError> {
        let t = s.trim();
        if t.is_empty() || parse_decimal(t).is_none() {
            return Err(NumericsError::Parse(s.to_string()));
        }
        let v = with_consts(|cc| BigFloat::parse(t, Radix::Dec, precision, RM, cc));
        if v.is_nan() {
            return Err(NumericsError::Parse(s.to_string()));
        }
        Ok(Self::wrap(v, precision))
    }

    pub fn precision(&self) -> usize {
        self.precision
    }

    /// Re-rounds to `bits` of mantissa (rounded up to a whole 64-bit word).
    pub fn with_precision(&self, bits: usize) -> Result<Self, NumericsError> {
        if bits < MIN_PRECISION {
            return Err(NumericsError::PrecisionTooLow(bits));
        }
        let mut v = self.value.clone();
        if !v.is_zero() && !v.is_inf() && !v.is_nan() {
            v.set_precision(bits, RM)
                .map_err(|_| NumericsError::PrecisionTooLow(bits))?;
        }
        Ok(Self::wrap(v, bits))
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        !self.value.is_zero() && self.value.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        !self.value.is_zero() && self.value.is_negative()
    }

    pub fn is_finite(&self) -> bool {
        !self.value.is_inf() && !self.value.is_nan()
    }

    pub fn sign(&self) -> Sign {
        if self.is_zero() {
            Sign::Zero
        } else if self.value.is_negative() {
            Sign::Negative
        } else {
            Sign::Positive
        }
    }

    pub fn abs(&self) -> Self {
        Self::wrap(self.value.abs(), self.precision)
    }

    pub fn sqrt(&self) -> Self {
        Self::wrap(self.value.sqrt(self.precision, RM), self.precision)
    }

    pub fn ln(&self) -> Self {
        let p = self.precision;
        Self::wrap(with_consts(|cc| self.value.ln(p, RM, cc)), p)
    }

    pub fn log2(&self) -> Self {
        let p = self.precision;
        Self::wrap(with_consts(|cc| self.value.log2(p, RM, cc)), p)
    }

    pub fn exp(&self) -> Self {
        let p = self.precision;
        Self::wrap(with_consts(|cc| self.value.exp(p, RM, cc)), p)
    }

    /// `2^self`. The integer part of the exponent is applied exactly; values
    /// beyond the exponent range come back infinite (or zero).
    pub fn exp2(&self) -> Self {
        let p = self.precision;
        let floor = self.floor();
        let Some(k) = floor.to_i64() else {
            let v = if self.is_negative() { BigFloat::from_u64(0, p) } else { astro_float::INF_POS };
            return Self::wrap(v, p);
        };
        let frac = self - &floor;
        let ln2 = Self::from_u64(2, p).ln();
        (frac * ln2).exp().mul_pow2(k)
    }

    /// `self^e` for a positive base.
    pub fn powf(&self, e: &Real) -> Self {
        (e * &self.log2()).exp2()
    }

    pub fn powi(&self, n: u64) -> Self {
        let p = self.precision;
        Self::wrap(self.value.powi(n as usize, p, RM), p)
    }

    pub fn recip(&self) -> Self {
        Self::one(self.precision) / self
    }

    pub fn floor(&self) -> Self {
        Self::wrap(self.value.floor(), self.precision)
    }

    /// Multiplies by `2^k` without rounding.
    pub fn mul_pow2(&self, k: i64) -> Self {
        if self.value.is_zero() || !self.is_finite() {
            return self.clone();
        }
        let e = self.value.exponent().unwrap_or(0) as i64 + k;
        if e > EXPONENT_LIMIT {
            let v = if self.is_negative() { astro_float::INF_NEG } else { astro_float::INF_POS };
            return Self::wrap(v, self.precision);
        }
        if e < -EXPONENT_LIMIT {
            return Self::zero(self.precision);
        }
        let mut v = self.value.clone();
        v.set_exponent(e as i32);
        Self::wrap(v, self.precision)
    }

    /// Binary exponent `e` with `|self| ∈ [2^(e-1), 2^e)`; `None` for zero and non-finite values.
    pub fn binary_exponent(&self) -> Option<i64> {
        if self.is_zero() || !self.is_finite() {
            return None;
        }
        self.value.exponent().map(i64::from)
    }

    /// Integer value if `self` is a finite integer that fits an `i64`.
    pub fn to_i64(&self) -> Option<i64> {
        if !self.is_finite() {
            return None;
        }
        if self.is_zero() {
            return Some(0);
        }
        if !self.value.is_int() || self.binary_exponent()? > 63 {
            return None;
        }
        self.to_decimal(40).parse::<i64>().ok()
    }

    /// Nearest double (saturating to ±∞).
    pub fn to_f64(&self) -> f64 {
        if self.value.is_nan() {
            return f64::NAN;
        }
        if self.value.is_inf() {
            return if self.value.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY };
        }
        match self.binary_exponent() {
            None => 0.0,
            Some(e) if e > 1100 => {
                if self.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY }
            }
            Some(e) if e < -1100 => 0.0,
            Some(_) => self.to_decimal(20).parse().unwrap_or(f64::NAN),
        }
    }

    pub fn max(&self, other: &Real) -> Real {
        if other > self { other.clone() } else { self.clone() }
    }

    pub fn min(&self, other: &Real) -> Real {
        if other < self { other.clone() } else { self.clone() }
    }

    /// Decimal rendering with at most `digits` significant digits, rounded half
    /// to even, trailing zeros trimmed. Positional notation for moderate
    /// magnitudes, `d.ddde±N` otherwise.
    pub fn to_decimal(&self, digits: usize) -> String {
        let digits = digits.max(1);
        if self.value.is_nan() {
            return "NaN".into();
        }
        if self.value.is_inf() {
            return if self.value.is_negative() { "-inf".into() } else { "inf".into() };
        }
        if self.is_zero() {
            return "0".into();
        }
        // Guard bits so the decimal expansion carries more digits than requested.
        let guard = (digits as f64 * std::f64::consts::LOG2_10).ceil() as usize + 64;
        let mut wide = self.value.clone();
        let _ = wide.set_precision(guard.max(self.precision), RM);
        let raw = with_consts(|cc| wide.format(Radix::Dec, RM, cc))
            .unwrap_or_else(|_| "NaN".to_string());
        let Some((negative, mantissa, exp10)) = parse_decimal(&raw) else {
            return raw;
        };
        let (rounded, exp10) = round_digits(&mantissa, exp10, digits);
        render(negative, &rounded, exp10)
    }

    /// Shortest decimal (≤ `max_digits` significant digits) that parses back to
    /// exactly this value at its own precision.
    pub fn to_shortest(&self, max_digits: usize) -> String {
        if self.is_zero() || !self.is_finite() {
            return self.to_decimal(1);
        }
        for n in 1..max_digits {
            let s = self.to_decimal(n);
            if let Ok(back) = Real::parse(&s, self.precision) {
                if back == *self {
                    return s;
                }
            }
        }
        self.to_decimal(max_digits)
    }
}

/// Splits a decimal literal into sign, significant digits and the power of ten
/// of the first digit.
fn parse_decimal(s: &str) -> Option<(bool, Vec<u8>, i64)> {
    let (negative, body) = match s.as_bytes().first()? {
        b'-' => (true, &s[1..]),
        b'+' => (false, &s[1..]),
        _ => (false, s),
    };
    let (mant, exp) = match body.find(['e', 'E']) {
        Some(pos) => (&body[..pos], body[pos + 1..].parse::<i64>().ok()?),
        None => (body, 0),
    };
    let (int_part, frac_part) = match mant.find('.') {
        Some(pos) => (&mant[..pos], &mant[pos + 1..]),
        None => (mant, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let all: Vec<u8> = int_part.bytes().chain(frac_part.bytes()).map(|b| b - b'0').collect();
    let Some(first) = all.iter().position(|&d| d != 0) else {
        return Some((negative, vec![0], 0));
    };
    let exp10 = exp + int_part.len() as i64 - 1 - first as i64;
    Some((negative, all[first..].to_vec(), exp10))
}

fn round_digits(mantissa: &[u8], exp10: i64, digits: usize) -> (Vec<u8>, i64) {
    if mantissa.len() <= digits {
        return (mantissa.to_vec(), exp10);
    }
    let mut kept = mantissa[..digits].to_vec();
    let next = mantissa[digits];
    let rest_nonzero = mantissa[digits + 1..].iter().any(|&d| d != 0);
    let round_up = next > 5 || (next == 5 && (rest_nonzero || kept[digits - 1] % 2 == 1));
    let mut exp10 = exp10;
    if round_up {
        let mut i = digits;
        loop {
            if i == 0 {
                kept.insert(0, 1);
                kept.pop();
                exp10 += 1;
                break;
            }
            i -= 1;
            if kept[i] == 9 {
                kept[i] = 0;
            } else {
                kept[i] += 1;
                break;
            }
        }
    }
    (kept, exp10)
}

fn render(negative: bool, digits: &[u8], exp10: i64) -> String {
    let mut digits: Vec<u8> = digits.to_vec();
    while digits.len() > 1 && *digits.last().unwrap() == 0 {
        digits.pop();
    }
    let text: String = digits.iter().map(|d| char::from(b'0' + d)).collect();
    let mut out = String::new();
    if negative {
        out.push('-');
    }
    if (-6..=30).contains(&exp10) {
        if exp10 < 0 {
            out.push_str("0.");
            out.push_str(&"0".repeat((-exp10 - 1) as usize));
            out.push_str(&text);
        } else {
            let int_len = exp10 as usize + 1;
            if text.len() <= int_len {
                out.push_str(&text);
                out.push_str(&"0".repeat(int_len - text.len()));
            } else {
                out.push_str(&text[..int_len]);
                out.push('.');
                out.push_str(&text[int_len..]);
            }
        }
    } else {
        out.push_str(&text[..1]);
        if text.len() > 1 {
            out.push('.');
            out.push_str(&text[1..]);
        }
        out.push_str(&format!("e{}{}", if exp10 < 0 { '-' } else { '+' }, exp10.abs()));
    }
    out
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match f.precision() {
            Some(d) => f.write_str(&self.to_decimal(d)),
            None => f.write_str(&self.to_shortest(50)),
        }
    }
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Real({} @{}b)", self.to_decimal(30), self.precision)
    }
}

impl PartialEq for Real {
    fn eq(&self, other: &Self) -> bool {
        self.partial_cmp(other) == Some(Ordering::Equal)
    }
}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.value.cmp(&other.value).map(|c| c.cmp(&0))
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $inner:ident) => {
        impl $trait<&Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                let p = self.precision.max(rhs.precision);
                Real::wrap(self.value.$inner(&rhs.value, p, RM), p)
            }
        }
        impl $trait<Real> for Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Real> for Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                (&self).$method(rhs)
            }
        }
        impl $trait<Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                self.$method(&rhs)
            }
        }
    };
}

binop!(Add, add, add);
binop!(Sub, sub, sub);
binop!(Mul, mul, mul);
binop!(Div, div, div);

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real::wrap(-&self.value, self.precision)
    }
}

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        -&self
    }
}

/// Free-function form of [`Real::with_precision`].
pub fn with_precision(x: &Real, bits: usize) -> Result<Real, NumericsError> {
    x.with_precision(bits)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

/// A real stored as `sign · 2^log2_magnitude`.
#[derive(Clone, Debug)]
pub struct Log2Real {
    log2_magnitude: Real,
    sign: Sign,
}

impl Log2Real {
    pub fn zero(precision: usize) -> Self {
        Log2Real { log2_magnitude: Real::zero(precision), sign: Sign::Zero }
    }

    /// Positive number `2^log2`.
    pub fn from_log2(log2: Real) -> Self {
        Log2Real { log2_magnitude: log2, sign: Sign::Positive }
    }

    pub fn from_real(x: &Real) -> Self {
        match x.sign() {
            Sign::Zero => Self::zero(x.precision()),
            sign => Log2Real { log2_magnitude: x.abs().log2(), sign },
        }
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn precision(&self) -> usize {
        self.log2_magnitude.precision()
    }

    /// `log₂|x|`, `None` for zero.
    pub fn log2(&self) -> Option<&Real> {
        (self.sign != Sign::Zero).then_some(&self.log2_magnitude)
    }

    /// Linear value, `None` when the magnitude leaves the exponent range.
    pub fn to_real(&self) -> Option<Real> {
        let p = self.precision();
        match self.sign {
            Sign::Zero => Some(Real::zero(p)),
            sign => {
                if self.log2_magnitude.abs() > Real::from_i64(EXPONENT_LIMIT - 64, p) {
                    return None;
                }
                let m = self.log2_magnitude.exp2();
                Some(if sign == Sign::Negative { -m } else { m })
            }
        }
    }

    pub fn mul(&self, other: &Log2Real) -> Log2Real {
        let sign = match (self.sign, other.sign) {
            (Sign::Zero, _) | (_, Sign::Zero) => return Self::zero(self.precision().max(other.precision())),
            (a, b) if a == b => Sign::Positive,
            _ => Sign::Negative,
        };
        Log2Real { log2_magnitude: &self.log2_magnitude + &other.log2_magnitude, sign }
    }

    /// Multiplies by `2^k`.
    pub fn scale_log2(&self, k: &Real) -> Log2Real {
        match self.sign {
            Sign::Zero => self.clone(),
            sign => Log2Real { log2_magnitude: &self.log2_magnitude + k, sign },
        }
    }
}

/// `log₂(2^a + 2^b)` for non-negative operands.
pub fn log_sum(a: &Log2Real, b: &Log2Real) -> Result<Log2Real, NumericsError> {
    if a.sign == Sign::Negative || b.sign == Sign::Negative {
        return Err(NumericsError::MixedSign);
    }
    let (la, lb) = match (a.log2(), b.log2()) {
        (None, _) => return Ok(b.clone()),
        (_, None) => return Ok(a.clone()),
        (Some(la), Some(lb)) => (la, lb),
    };
    let p = la.precision().max(lb.precision());
    let (hi, lo) = if la >= lb { (la, lb) } else { (lb, la) };
    let gap = hi - lo;
    if gap > Real::from_u64(p as u64 + 8, p) {
        return Ok(Log2Real::from_log2(hi.clone()));
    }
    let tail = (Real::one(p) + (-gap).exp2()).log2();
    Ok(Log2Real::from_log2(hi + tail))
}

/// `log₂(1 − 2^(−t))` for `t > 0`; zero once the correction drops below the precision.
pub fn log2_one_minus_pow2(t: &Real) -> Real {
    let p = t.precision();
    if *t > Real::from_u64(p as u64 + 8, p) {
        return Real::zero(p);
    }
    (Real::one(p) - (-t).exp2()).log2()
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: usize = DEFAULT_PRECISION;

    fn r(x: i64) -> Real {
        Real::from_i64(x, P)
    }

    #[test]
    fn log_sum_doubles_equal_operands() {
        let four = Log2Real::from_real(&r(4));
        let out = log_sum(&four, &four).unwrap();
        assert_eq!(*out.log2().unwrap(), r(3));
        let one = Log2Real::from_real(&r(1));
        assert_eq!(*log_sum(&one, &one).unwrap().log2().unwrap(), r(1));
    }

    #[test]
    fn log_sum_with_zero_operand_reproduces_first_round() {
        // log₂ s_0 = log_sum(log₂(u_0 d), log₂((2u_0 − 1)·s_{-1})) with s_{-1} = 0.
        let a = Log2Real::from_log2(r(2));
        let b = Log2Real::zero(P);
        assert_eq!(*log_sum(&a, &b).unwrap().log2().unwrap(), r(2));
        assert_eq!(*log_sum(&b, &a).unwrap().log2().unwrap(), r(2));
    }

    #[test]
    fn log_sum_rejects_negative() {
        let a = Log2Real::from_real(&r(-3));
        let b = Log2Real::from_real(&r(3));
        assert_eq!(log_sum(&a, &b).unwrap_err(), NumericsError::MixedSign);
    }

    #[test]
    fn log_sum_matches_linear_sum() {
        for (x, y) in [(3, 5), (1, 1000), (7, 7), (123456, 1)] {
            let got = log_sum(&Log2Real::from_real(&r(x)), &Log2Real::from_real(&r(y))).unwrap();
            let want = r(x + y).log2();
            let err = (got.log2().unwrap() - &want).abs();
            assert!(err < Real::pow2(-(P as i64 - 8), P), "{x}+{y}: {err:?}");
        }
    }

    #[test]
    fn log_sum_far_apart_returns_max() {
        let a = Log2Real::from_log2(r(1_000_000));
        let b = Log2Real::from_log2(r(3));
        assert_eq!(*log_sum(&a, &b).unwrap().log2().unwrap(), r(1_000_000));
    }

    #[test]
    fn with_precision_rejects_narrow() {
        assert_eq!(r(3).with_precision(32).unwrap_err(), NumericsError::PrecisionTooLow(32));
    }

    #[test]
    fn with_precision_rounds_like_native() {
        let pi256 = Real::parse("3.14159265358979323846264338327950288419716939937510582097494459", 256).unwrap();
        let down = pi256.with_precision(128).unwrap();
        let native = Real::parse("3.14159265358979323846264338327950288419716939937510582097494459", 128).unwrap();
        assert_eq!(down, native);
        assert_eq!(down.precision(), 128);
        // identity at the same width
        let x = (Real::from_u64(2, 512).sqrt() * Real::from_u64(6, 512) - Real::one(512)).exp2();
        assert_eq!(x.with_precision(512).unwrap(), x);
    }

    #[test]
    fn exp2_handles_integer_and_fraction() {
        assert_eq!(r(10).exp2(), r(1024));
        assert_eq!(r(-2).exp2(), Real::from_ratio(1, 4, P));
        let half = Real::from_ratio(1, 2, P).exp2();
        let err = (&half * &half - r(2)).abs();
        assert!(err < Real::pow2(-250, P));
        // 2^(2^20) is representable
        let huge = Real::pow2(20, P).exp2();
        assert!(huge.is_finite());
        assert_eq!(huge.binary_exponent(), Some((1 << 20) + 1));
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(r(4).to_decimal(40), "4");
        assert_eq!(r(-36).to_decimal(40), "-36");
        assert_eq!(Real::from_ratio(1, 8, P).to_decimal(10), "0.125");
        assert_eq!(Real::from_ratio(2, 3, P).to_decimal(5), "0.66667");
        assert_eq!(r(1000).to_decimal(2), "1000");
        assert_eq!(r(999_999).to_decimal(3), "1000000");
        assert_eq!(Real::pow2(200, P).to_decimal(5), "1.6069e+60");
        assert_eq!(Real::pow2(-40, P).to_decimal(3), "9.09e-13");
        // ties go to even
        assert_eq!(Real::from_ratio(25, 10, P).to_decimal(1), "2");
        assert_eq!(Real::from_ratio(35, 10, P).to_decimal(1), "4");
    }

    #[test]
    fn shortest_round_trips() {
        assert_eq!(r(4).to_shortest(50), "4");
        assert_eq!(Real::from_ratio(1, 4, P).to_shortest(50), "0.25");
        let third = Real::from_ratio(1, 3, 64);
        let s = third.to_shortest(50);
        assert_eq!(Real::parse(&s, 64).unwrap(), third);
        assert!(s.len() < 25, "{s}");
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(Real::parse("abc", P).is_err());
        assert!(Real::parse("", P).is_err());
        assert!(Real::parse("1.5.2", P).is_err());
        assert_eq!(Real::parse("-2.5e1", P).unwrap(), r(-25));
    }

    #[test]
    fn integer_and_double_conversion() {
        assert_eq!(r(123).to_i64(), Some(123));
        assert_eq!(Real::from_ratio(1, 2, P).to_i64(), None);
        assert!((Real::from_ratio(1, 3, P).to_f64() - 1.0 / 3.0).abs() < 1e-16);
        assert_eq!(Real::pow2(5000, P).to_f64(), f64::INFINITY);
    }

    #[test]
    fn log2_real_round_trip() {
        let x = Real::from_ratio(123_456_789, 1000, P);
        let back = Log2Real::from_real(&x).to_real().unwrap();
        let rel = ((&back - &x) / &x).abs();
        assert!(rel < Real::pow2(-(P as i64 - 8), P));
        assert!(Log2Real::from_log2(Real::from_u64(1 << 40, P)).to_real().is_none());
    }

    #[test]
    fn log2_one_minus_pow2_small_and_large() {
        let v = log2_one_minus_pow2(&r(1));
        assert_eq!(v, r(-1));
        assert!(log2_one_minus_pow2(&r(100_000)).is_zero());
    }
}

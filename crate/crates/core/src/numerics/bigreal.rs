//! Binary floating-point numbers with an explicit precision.
//!
//! A [`BigReal`] is `mant * 2^exp` with `|mant| < 2^prec`. Every arithmetic
//! result is rounded to nearest (ties to even) at the larger precision of its
//! operands. Transcendental routines work internally at the requested
//! precision plus [`GUARD_BITS`] and round once at the end, so results are
//! reproducible bit for bit for a given input and precision.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::constants;
use crate::error::{domain, Error, Result};

/// Extra bits carried by transcendental routines beyond the caller's
/// precision.
pub const GUARD_BITS: u32 = 32;

pub const MIN_PREC_BITS: u32 = 8;

const LOG10_2: f64 = std::f64::consts::LOG10_2;

#[derive(Clone)]
pub struct BigReal {
    mant: BigInt,
    exp: i64,
    prec: u32,
}

fn round_mag(mag: BigUint, exp: i64, prec: u32) -> (BigUint, i64) {
    let bits = mag.bits();
    if bits <= prec as u64 {
        return (mag, exp);
    }
    let shift = bits - prec as u64;
    let half_bit = mag.bit(shift - 1);
    let below_half = mag.trailing_zeros().is_some_and(|tz| tz < shift - 1);
    let mut q = mag >> shift;
    let mut e = exp + shift as i64;
    if half_bit && (below_half || q.is_odd()) {
        q += 1u32;
        if q.bits() > prec as u64 {
            q >>= 1u32;
            e += 1;
        }
    }
    (q, e)
}

impl BigReal {
    fn from_parts(mant: BigInt, exp: i64, prec: u32) -> Self {
        let prec = prec.max(MIN_PREC_BITS);
        if mant.is_zero() {
            return BigReal { mant, exp: 0, prec };
        }
        let (sign, mag) = mant.into_parts();
        let (mag, exp) = round_mag(mag, exp, prec);
        BigReal {
            mant: BigInt::from_biguint(sign, mag),
            exp,
            prec,
        }
    }

    pub fn zero(prec: u32) -> Self {
        Self::from_parts(BigInt::zero(), 0, prec)
    }

    pub fn one(prec: u32) -> Self {
        Self::from_i64(1, prec)
    }

    pub fn from_i64(n: i64, prec: u32) -> Self {
        Self::from_parts(BigInt::from(n), 0, prec)
    }

    pub fn from_bigint(n: &BigInt, prec: u32) -> Self {
        Self::from_parts(n.clone(), 0, prec)
    }

    /// Exact binary value of an `f64` (then rounded to `prec`).
    pub fn from_f64(v: f64, prec: u32) -> Self {
        assert!(v.is_finite(), "BigReal::from_f64 on non-finite value");
        if v == 0.0 {
            return Self::zero(prec);
        }
        let bits = v.to_bits();
        let negative = bits >> 63 == 1;
        let raw_exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (m, e) = if raw_exp == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), raw_exp - 1075)
        };
        let mant = BigInt::from(m);
        Self::from_parts(if negative { -mant } else { mant }, e, prec)
    }

    pub fn from_ratio(r: &BigRational, prec: u32) -> Self {
        let num = Self::from_bigint(r.numer(), prec + 2);
        let den = Self::from_bigint(r.denom(), prec + 2);
        (num / den).with_prec(prec)
    }

    /// Parses a decimal (`-0.25`, `1e-6`) or rational (`-1/4`) literal.
    pub fn parse(s: &str, prec: u32) -> Result<Self> {
        Ok(Self::from_ratio(&parse_rational(s)?, prec))
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    /// The same value rounded (or widened) to `prec` bits.
    pub fn with_prec(&self, prec: u32) -> Self {
        Self::from_parts(self.mant.clone(), self.exp, prec)
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.mant.is_positive()
    }

    pub fn abs(&self) -> Self {
        BigReal {
            mant: self.mant.abs(),
            exp: self.exp,
            prec: self.prec,
        }
    }

    /// Multiplies by `2^k` exactly.
    pub fn mul_pow2(&self, k: i64) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        BigReal {
            mant: self.mant.clone(),
            exp: self.exp + k,
            prec: self.prec,
        }
    }

    pub fn mul_int(&self, n: i64) -> Self {
        Self::from_parts(&self.mant * n, self.exp, self.prec)
    }

    pub fn div_int(&self, n: i64) -> Self {
        self / &Self::from_i64(n, self.prec)
    }

    /// `floor(log2|x|)`-ish magnitude; `-inf` for zero. Accurate to well
    /// under one unit, which is all callers use it for.
    pub fn log2_abs(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        let bits = self.mant.bits();
        let take = bits.min(60);
        let top = (self.mant.magnitude() >> (bits - take)).to_u64().unwrap_or(1) as f64;
        top.log2() + (bits - take) as f64 + self.exp as f64
    }

    /// Exponent of the leading bit: `2^(e-1) <= |x| < 2^e`.
    pub fn top_exponent(&self) -> i64 {
        self.exp + self.mant.bits() as i64
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.mant.bits();
        let shift = bits.saturating_sub(64);
        let top = (self.mant.magnitude() >> shift).to_u64().unwrap_or(0) as f64;
        let e = self.exp + shift as i64;
        let v = if e > 2000 {
            f64::INFINITY
        } else if e < -2200 {
            0.0
        } else {
            // split to stay inside the powi range for subnormal results
            top * 2f64.powi((e / 2) as i32) * 2f64.powi((e - e / 2) as i32)
        };
        if self.is_negative() {
            -v
        } else {
            v
        }
    }

    /// Exact rational value.
    pub fn to_ratio(&self) -> BigRational {
        if self.exp >= 0 {
            BigRational::from_integer(&self.mant << self.exp as u64)
        } else {
            BigRational::new(self.mant.clone(), BigInt::one() << (-self.exp) as u64)
        }
    }

    pub fn sqrt(&self) -> Result<Self> {
        if self.is_negative() {
            return Err(domain("square root of a negative number"));
        }
        if self.is_zero() {
            return Ok(self.clone());
        }
        let p = self.prec;
        let mag = self.mant.magnitude();
        let want = 2 * (p as i64 + 2);
        let mut s = (want - mag.bits() as i64).max(0);
        if (self.exp - s).rem_euclid(2) != 0 {
            s += 1;
        }
        let shifted: BigUint = mag << s as u64;
        let root = shifted.sqrt();
        let exact = &root * &root == shifted;
        let mut m = root << 1u32;
        if !exact {
            m += 1u32;
        }
        let e = (self.exp - s) / 2 - 1;
        Ok(Self::from_parts(BigInt::from_biguint(Sign::Plus, m), e, p))
    }

    /// Integer power by repeated squaring.
    pub fn powi(&self, n: i64) -> Self {
        let p = self.prec;
        if n == 0 {
            return Self::one(p);
        }
        let wp = p + GUARD_BITS + 64 - n.unsigned_abs().leading_zeros();
        let mut base = self.with_prec(wp);
        let mut acc = Self::one(wp);
        let mut k = n.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        if n < 0 {
            acc = &Self::one(wp) / &acc;
        }
        acc.with_prec(p)
    }

    pub fn exp(&self) -> Self {
        let p = self.prec;
        if self.is_zero() {
            return Self::one(p);
        }
        // scale into |r| < 2^-12, sum the Taylor series, square back
        let k = (self.top_exponent() + 12).max(0);
        let wp = p + GUARD_BITS + k as u32 + 8;
        let r = self.with_prec(wp).mul_pow2(-k);
        let cutoff = -(wp as f64) - 4.0;
        let mut sum = Self::one(wp);
        let mut term = Self::one(wp);
        let mut n = 1i64;
        loop {
            term = (&term * &r).div_int(n);
            if term.is_zero() || term.log2_abs() < cutoff {
                break;
            }
            sum += &term;
            n += 1;
        }
        for _ in 0..k {
            sum = &sum * &sum;
        }
        sum.with_prec(p)
    }

    /// Natural logarithm.
    pub fn ln(&self) -> Result<Self> {
        if !self.is_positive() {
            return Err(domain("logarithm of a non-positive number"));
        }
        let p = self.prec;
        let wp = p + GUARD_BITS + 16;
        let mut e = self.top_exponent() - 1;
        let mut m = self.with_prec(wp).mul_pow2(-e);
        if m > Self::from_f64(1.5, wp) {
            m = m.mul_pow2(-1);
            e += 1;
        }
        let one = Self::one(wp);
        let z = &(&m - &one) / &(&m + &one);
        let series = atanh_series(&z).mul_pow2(1);
        let scaled = ln2(wp)?.mul_int(e);
        Ok((series + scaled).with_prec(p))
    }

    /// Significant-digit count matching the precision, `floor(prec * log10 2)`.
    pub fn default_digits(&self) -> usize {
        ((self.prec as f64) * LOG10_2).floor().max(1.0) as usize
    }

    fn decimal_digits(&self, digits: usize) -> (bool, String, i64) {
        let digits = digits.max(1);
        let mut e10 = (self.log2_abs() * LOG10_2).floor() as i64;
        let mag = self.mant.magnitude();
        let ten = BigUint::from(10u32);
        let mut last = None;
        for _ in 0..6 {
            let s = digits as i64 - 1 - e10;
            let mut num = mag.clone();
            let mut den = BigUint::one();
            if s >= 0 {
                num *= num_traits::pow(ten.clone(), s as usize);
            } else {
                den *= num_traits::pow(ten.clone(), (-s) as usize);
            }
            if self.exp >= 0 {
                num <<= self.exp as u64;
            } else {
                den <<= (-self.exp) as u64;
            }
            let (mut q, r) = num.div_rem(&den);
            if (r << 1u32) >= den {
                q += 1u32;
            }
            let text = q.to_string();
            match text.len().cmp(&digits) {
                Ordering::Greater => e10 += 1,
                Ordering::Less => e10 -= 1,
                Ordering::Equal => return (self.is_negative(), text, e10),
            }
            last = Some(text);
        }
        let mut text = last.unwrap_or_default();
        text.truncate(digits);
        (self.is_negative(), text, e10)
    }

    /// Decimal rendering with exactly `digits` significant digits; positional
    /// for moderate exponents, scientific otherwise.
    pub fn to_decimal(&self, digits: usize) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let (neg, d, e10) = self.decimal_digits(digits);
        let sign = if neg { "-" } else { "" };
        let n = d.len() as i64;
        if (0..n).contains(&e10) {
            let (int, frac) = d.split_at(e10 as usize + 1);
            if frac.is_empty() {
                format!("{sign}{int}")
            } else {
                format!("{sign}{int}.{frac}")
            }
        } else if (-6..0).contains(&e10) {
            format!("{sign}0.{}{d}", "0".repeat((-e10 - 1) as usize))
        } else {
            format_scientific(sign, &d, e10)
        }
    }

    /// Always-scientific rendering, e.g. `1.2345e-9`.
    pub fn to_scientific(&self, digits: usize) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let (neg, d, e10) = self.decimal_digits(digits);
        format_scientific(if neg { "-" } else { "" }, &d, e10)
    }

    fn cmp_value(&self, other: &Self) -> Ordering {
        let (sa, sb) = (self.mant.sign(), other.mant.sign());
        if sa != sb || sa == Sign::NoSign {
            return sign_rank(sa).cmp(&sign_rank(sb));
        }
        let e = self.exp.min(other.exp);
        let a = &self.mant << (self.exp - e) as u64;
        let b = &other.mant << (other.exp - e) as u64;
        a.cmp(&b)
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }
}

fn sign_rank(s: Sign) -> i8 {
    match s {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

fn format_scientific(sign: &str, d: &str, e10: i64) -> String {
    let (head, tail) = d.split_at(1);
    if tail.is_empty() {
        format!("{sign}{head}e{e10}")
    } else {
        format!("{sign}{head}.{tail}e{e10}")
    }
}

/// `atanh(z) = z + z^3/3 + z^5/5 + ...` for `|z| <= 1/2`, at `z`'s precision.
pub(crate) fn atanh_series(z: &BigReal) -> BigReal {
    let wp = z.prec();
    let z2 = z * z;
    let cutoff = -(wp as f64) - 4.0;
    let mut power = z.clone();
    let mut sum = z.clone();
    let mut j = 1i64;
    loop {
        power = &power * &z2;
        let term = power.div_int(2 * j + 1);
        if term.is_zero() || term.log2_abs() < cutoff {
            break;
        }
        sum += &term;
        j += 1;
    }
    sum
}

fn check_const_prec(prec: u32) -> Result<()> {
    if prec > constants::MAX_CONSTANT_BITS {
        return Err(Error::Range(format!(
            "precision {prec} exceeds the {} bits of the stored constants",
            constants::MAX_CONSTANT_BITS
        )));
    }
    Ok(())
}

pub fn pi(prec: u32) -> Result<BigReal> {
    check_const_prec(prec)?;
    Ok(constants::pi(prec))
}

pub fn ln2(prec: u32) -> Result<BigReal> {
    check_const_prec(prec)?;
    Ok(constants::ln2(prec))
}

pub fn euler_gamma(prec: u32) -> Result<BigReal> {
    check_const_prec(prec)?;
    Ok(constants::euler_gamma(prec))
}

/// Parses `[-]digits[.digits][e[-]digits]` or `[-]p/q` exactly.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a number: {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(BigRational::new(p, q));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i64>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if int.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all: BigInt = format!("0{int}{frac}").parse().map_err(|_| bad())?;
    let scale = exponent - frac.len() as i64;
    if scale.abs() > 100_000 {
        return Err(bad());
    }
    let ten = BigInt::from(10);
    let mut r = if scale >= 0 {
        BigRational::from_integer(all * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(all, num_traits::pow(ten, (-scale) as usize))
    };
    if negative {
        r = -r;
    }
    Ok(r)
}

impl fmt::Display for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or_else(|| self.default_digits());
        f.write_str(&self.to_decimal(digits))
    }
}

impl fmt::Debug for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BigReal({} @{}b)", self.to_scientific(20), self.prec)
    }
}

impl PartialEq for BigReal {
    fn eq(&self, other: &Self) -> bool {
        self.cmp_value(other) == Ordering::Equal
    }
}

impl PartialOrd for BigReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp_value(other))
    }
}

fn add_ref(a: &BigReal, b: &BigReal) -> BigReal {
    let p = a.prec.max(b.prec);
    if b.is_zero() {
        return a.with_prec(p);
    }
    if a.is_zero() {
        return b.with_prec(p);
    }
    let (ta, tb) = (a.top_exponent(), b.top_exponent());
    let gap = p as i64 + 3;
    if ta > tb + gap {
        return a.with_prec(p);
    }
    if tb > ta + gap {
        return b.with_prec(p);
    }
    let e = a.exp.min(b.exp);
    let m = (&a.mant << (a.exp - e) as u64) + (&b.mant << (b.exp - e) as u64);
    BigReal::from_parts(m, e, p)
}

fn mul_ref(a: &BigReal, b: &BigReal) -> BigReal {
    let p = a.prec.max(b.prec);
    BigReal::from_parts(&a.mant * &b.mant, a.exp + b.exp, p)
}

fn div_ref(a: &BigReal, b: &BigReal) -> BigReal {
    assert!(!b.is_zero(), "BigReal division by zero");
    let p = a.prec.max(b.prec);
    if a.is_zero() {
        return BigReal::zero(p);
    }
    let s = (p as i64 + 2 + b.mant.bits() as i64 - a.mant.bits() as i64).max(0);
    let (q, r) = (a.mant.magnitude() << s as u64).div_rem(b.mant.magnitude());
    // one sticky bit keeps round-to-nearest honest on the truncated quotient
    let mut m = q << 1u32;
    if !r.is_zero() {
        m += 1u32;
    }
    let sign = if a.is_negative() != b.is_negative() {
        Sign::Minus
    } else {
        Sign::Plus
    };
    let m = BigInt::from_biguint(sign, m);
    BigReal::from_parts(m, a.exp - s - b.exp - 1, p)
}

impl Neg for BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        BigReal {
            mant: -self.mant,
            exp: self.exp,
            prec: self.prec,
        }
    }
}

impl Neg for &BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        -(self.clone())
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $f:expr) => {
        impl $tr<&BigReal> for &BigReal {
            type Output = BigReal;
            fn $method(self, rhs: &BigReal) -> BigReal {
                $f(self, rhs)
            }
        }
        impl $tr<BigReal> for BigReal {
            type Output = BigReal;
            fn $method(self, rhs: BigReal) -> BigReal {
                $f(&self, &rhs)
            }
        }
        impl $tr<&BigReal> for BigReal {
            type Output = BigReal;
            fn $method(self, rhs: &BigReal) -> BigReal {
                $f(&self, rhs)
            }
        }
        impl $tr<BigReal> for &BigReal {
            type Output = BigReal;
            fn $method(self, rhs: BigReal) -> BigReal {
                $f(self, &rhs)
            }
        }
    };
}

forward_binop!(Add, add, add_ref);
forward_binop!(Sub, sub, |a: &BigReal, b: &BigReal| add_ref(a, &-b));
forward_binop!(Mul, mul, mul_ref);
forward_binop!(Div, div, div_ref);

impl AddAssign<&BigReal> for BigReal {
    fn add_assign(&mut self, rhs: &BigReal) {
        *self = add_ref(self, rhs);
    }
}

impl AddAssign<BigReal> for BigReal {
    fn add_assign(&mut self, rhs: BigReal) {
        *self = add_ref(self, &rhs);
    }
}

impl SubAssign<&BigReal> for BigReal {
    fn sub_assign(&mut self, rhs: &BigReal) {
        *self = add_ref(self, &-rhs);
    }
}

impl MulAssign<&BigReal> for BigReal {
    fn mul_assign(&mut self, rhs: &BigReal) {
        *self = mul_ref(self, rhs);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_is_exact_on_small_values() {
        let a = BigReal::from_i64(3, 64);
        let b = BigReal::from_i64(4, 64);
        assert_eq!(&a * &b, BigReal::from_i64(12, 64));
        assert_eq!(&a - &b, BigReal::from_i64(-1, 64));
        assert_eq!((&b / &BigReal::from_i64(8, 64)).to_f64(), 0.5);
    }

    #[test]
    fn division_rounds_to_nearest() {
        let third = BigReal::from_i64(1, 53) / BigReal::from_i64(3, 53);
        assert_eq!(third.to_f64(), 1.0 / 3.0);
        let neg = BigReal::from_i64(-2, 53) / BigReal::from_i64(3, 53);
        assert_eq!(neg.to_f64(), -2.0 / 3.0);
    }

    #[test]
    fn sqrt_two_matches_f64() {
        let r = BigReal::from_i64(2, 53).sqrt().unwrap();
        assert_eq!(r.to_f64(), std::f64::consts::SQRT_2);
        let q = BigReal::from_i64(9, 200).sqrt().unwrap();
        assert_eq!(q, BigReal::from_i64(3, 200));
    }

    #[test]
    fn exp_and_ln_invert() {
        let x = BigReal::parse("0.7", 256).unwrap();
        let back = x.exp().ln().unwrap();
        assert!((&back - &x).abs().log2_abs() < -250.0);
        let e = BigReal::one(128).exp();
        assert!((e.to_f64() - std::f64::consts::E).abs() < 1e-15);
        let big = BigReal::from_i64(-40, 128).exp();
        assert!((big.to_f64() / (-40f64).exp() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn decimal_rendering() {
        let x = BigReal::parse("-0.2", 64).unwrap();
        assert_eq!(x.to_decimal(5), "-0.20000");
        assert_eq!(BigReal::from_i64(12345, 64).to_decimal(3), "1.23e4");
        assert_eq!(BigReal::from_i64(12345, 64).to_decimal(5), "12345");
        assert_eq!(BigReal::parse("1e-9", 64).unwrap().to_scientific(3), "1.00e-9");
        assert_eq!(BigReal::parse("9.9999", 64).unwrap().to_decimal(3), "10.0");
    }

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rational("-1/4").unwrap(), BigRational::new((-1).into(), 4.into()));
        assert_eq!(parse_rational("2.5e-1").unwrap(), BigRational::new(1.into(), 4.into()));
        assert_eq!(parse_rational(".5").unwrap(), BigRational::new(1.into(), 2.into()));
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("-").is_err());
    }

    #[test]
    fn negligible_addend_is_absorbed() {
        let one = BigReal::one(64);
        let tiny = BigReal::one(64).mul_pow2(-500);
        assert_eq!(&one + &tiny, one);
        assert!(tiny < one);
    }
}

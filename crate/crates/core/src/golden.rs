//! Exact arithmetic in `Q[τ]`, `τ = (1+√5)/2`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Result};

/// `u + v·τ` with rational `u`, `v`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct GoldenNumber {
    u: BigRational,
    v: BigRational,
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl GoldenNumber {
    pub fn new(u: BigRational, v: BigRational) -> Self {
        GoldenNumber { u, v }
    }

    pub fn from_ints(u: i64, v: i64) -> Self {
        GoldenNumber::new(rat(u), rat(v))
    }

    /// `(un/ud) + (vn/vd)·τ`.
    pub fn from_fracs(un: i64, ud: i64, vn: i64, vd: i64) -> Self {
        GoldenNumber::new(
            BigRational::new(un.into(), ud.into()),
            BigRational::new(vn.into(), vd.into()),
        )
    }

    pub fn rational(q: BigRational) -> Self {
        GoldenNumber::new(q, BigRational::zero())
    }

    pub fn integer(n: i64) -> Self {
        GoldenNumber::from_ints(n, 0)
    }

    pub fn tau() -> Self {
        GoldenNumber::from_ints(0, 1)
    }

    pub fn u(&self) -> &BigRational {
        &self.u
    }

    pub fn v(&self) -> &BigRational {
        &self.v
    }

    pub fn is_rational(&self) -> bool {
        self.v.is_zero()
    }

    /// Galois conjugate, `τ ↦ 1 − τ`.
    pub fn conjugate(&self) -> Self {
        GoldenNumber::new(&self.u + &self.v, -self.v.clone())
    }

    /// Field norm `x · conj(x) = u² + uv − v²`.
    pub fn norm(&self) -> BigRational {
        &self.u * &self.u + &self.u * &self.v - &self.v * &self.v
    }

    pub fn signum(&self) -> Ordering {
        // Float fast path, trusted only when well clear of rounding error.
        if let (Some(u), Some(v)) = (self.u.to_f64(), self.v.to_f64()) {
            let tau = (1.0 + 5f64.sqrt()) / 2.0;
            let x = u + v * tau;
            let scale = u.abs() + v.abs() * tau;
            if scale.is_finite() && x.abs() > scale * 1e-12 {
                return if x > 0.0 { Ordering::Greater } else { Ordering::Less };
            }
        }
        // u + vτ = A + B√5 with A = u + v/2, B = v/2.
        let half = BigRational::new(1.into(), 2.into());
        let a = &self.u + &self.v * &half;
        let b = &self.v * &half;
        let sa = a.cmp(&BigRational::zero());
        let sb = b.cmp(&BigRational::zero());
        match (sa, sb) {
            (Ordering::Equal, s) | (s, Ordering::Equal) => s,
            (x, y) if x == y => x,
            (sa, _) => {
                let a2 = &a * &a;
                let b2 = &b * &b * rat(5);
                // Signs differ: the term with the larger square wins.
                match a2.cmp(&b2) {
                    Ordering::Greater => sa,
                    Ordering::Less => sa.reverse(),
                    Ordering::Equal => Ordering::Equal,
                }
            }
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() == Ordering::Greater
    }

    pub fn is_negative(&self) -> bool {
        self.signum() == Ordering::Less
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    pub fn recip(&self) -> Result<Self> {
        let n = self.norm();
        if n.is_zero() {
            return Err(Error::Invalid("division by zero".into()));
        }
        let c = self.conjugate();
        Ok(GoldenNumber::new(c.u / &n, c.v / n))
    }

    /// `τ^k` for any integer `k`, using `τ⁻¹ = τ − 1`.
    pub fn tau_pow(k: i64) -> Self {
        let base = if k >= 0 {
            GoldenNumber::tau()
        } else {
            GoldenNumber::from_ints(-1, 1)
        };
        let mut out = GoldenNumber::one();
        let mut b = base;
        let mut e = k.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                out = &out * &b;
            }
            b = &b * &b;
            e >>= 1;
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = GoldenNumber::one();
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    pub fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    /// Largest integer `≤ self`.
    pub fn floor(&self) -> BigInt {
        let approx = self.to_f64().floor();
        let mut n = BigInt::from(approx as i64);
        // Correct the float guess exactly.
        while GoldenNumber::rational(BigRational::from_integer(n.clone())) > *self {
            n -= 1;
        }
        while GoldenNumber::rational(BigRational::from_integer(&n + 1)) <= *self {
            n += 1;
        }
        n
    }

    pub fn to_f64(&self) -> f64 {
        let tau = (1.0 + 5f64.sqrt()) / 2.0;
        let u = self.u.to_f64().unwrap_or(f64::NAN);
        let v = self.v.to_f64().unwrap_or(f64::NAN);
        u + v * tau
    }

    pub fn half(&self) -> Self {
        let h = BigRational::new(1.into(), 2.into());
        GoldenNumber::new(&self.u * &h, &self.v * h)
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        GoldenNumber::new(&self.u * q, &self.v * q)
    }
}

impl Zero for GoldenNumber {
    fn zero() -> Self {
        GoldenNumber::new(BigRational::zero(), BigRational::zero())
    }

    fn is_zero(&self) -> bool {
        self.u.is_zero() && self.v.is_zero()
    }
}

impl One for GoldenNumber {
    fn one() -> Self {
        GoldenNumber::from_ints(1, 0)
    }
}

impl PartialOrd for GoldenNumber {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for GoldenNumber {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum()
    }
}

impl<'a> Add<&'a GoldenNumber> for &'a GoldenNumber {
    type Output = GoldenNumber;
    fn add(self, o: &GoldenNumber) -> GoldenNumber {
        GoldenNumber::new(&self.u + &o.u, &self.v + &o.v)
    }
}

impl<'a> Sub<&'a GoldenNumber> for &'a GoldenNumber {
    type Output = GoldenNumber;
    fn sub(self, o: &GoldenNumber) -> GoldenNumber {
        GoldenNumber::new(&self.u - &o.u, &self.v - &o.v)
    }
}

impl<'a> Mul<&'a GoldenNumber> for &'a GoldenNumber {
    type Output = GoldenNumber;
    fn mul(self, o: &GoldenNumber) -> GoldenNumber {
        // (a + bτ)(c + dτ) = ac + bd + (ad + bc + bd)τ
        let bd = &self.v * &o.v;
        GoldenNumber::new(
            &self.u * &o.u + &bd,
            &self.u * &o.v + &self.v * &o.u + bd,
        )
    }
}

impl<'a> Div<&'a GoldenNumber> for &'a GoldenNumber {
    type Output = GoldenNumber;
    fn div(self, o: &GoldenNumber) -> GoldenNumber {
        self * &o.recip().expect("division by zero")
    }
}

macro_rules! owned_ops {
    ($($tr:ident $f:ident),*) => {$(
        impl $tr<GoldenNumber> for GoldenNumber {
            type Output = GoldenNumber;
            fn $f(self, o: GoldenNumber) -> GoldenNumber { (&self).$f(&o) }
        }
        impl<'a> $tr<&'a GoldenNumber> for GoldenNumber {
            type Output = GoldenNumber;
            fn $f(self, o: &GoldenNumber) -> GoldenNumber { (&self).$f(o) }
        }
        impl<'a> $tr<GoldenNumber> for &'a GoldenNumber {
            type Output = GoldenNumber;
            fn $f(self, o: GoldenNumber) -> GoldenNumber { self.$f(&o) }
        }
    )*};
}

owned_ops!(Add add, Sub sub, Mul mul, Div div);

impl Neg for GoldenNumber {
    type Output = GoldenNumber;
    fn neg(self) -> GoldenNumber {
        GoldenNumber::new(-self.u, -self.v)
    }
}

impl Neg for &GoldenNumber {
    type Output = GoldenNumber;
    fn neg(self) -> GoldenNumber {
        GoldenNumber::new(-self.u.clone(), -self.v.clone())
    }
}

impl AddAssign<&GoldenNumber> for GoldenNumber {
    fn add_assign(&mut self, o: &GoldenNumber) {
        self.u += &o.u;
        self.v += &o.v;
    }
}

impl SubAssign<&GoldenNumber> for GoldenNumber {
    fn sub_assign(&mut self, o: &GoldenNumber) {
        self.u -= &o.u;
        self.v -= &o.v;
    }
}

impl MulAssign<&GoldenNumber> for GoldenNumber {
    fn mul_assign(&mut self, o: &GoldenNumber) {
        *self = &*self * o;
    }
}

impl From<i64> for GoldenNumber {
    fn from(n: i64) -> Self {
        GoldenNumber::integer(n)
    }
}

impl From<BigRational> for GoldenNumber {
    fn from(q: BigRational) -> Self {
        GoldenNumber::rational(q)
    }
}

fn fmt_rat(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Renders as `u`, `vtau`, or `u+vtau`; the output round-trips via `FromStr`.
impl fmt::Display for GoldenNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let coef = |v: &BigRational| {
            if v.is_one() {
                String::new()
            } else if *v == -BigRational::one() {
                "-".to_string()
            } else {
                fmt_rat(v)
            }
        };
        match (self.u.is_zero(), self.v.is_zero()) {
            (_, true) => write!(f, "{}", fmt_rat(&self.u)),
            (true, false) => write!(f, "{}tau", coef(&self.v)),
            (false, false) => {
                let sign = if self.v.is_negative() { "-" } else { "+" };
                let v = self.v.abs();
                write!(f, "{}{}{}tau", fmt_rat(&self.u), sign, coef(&v))
            }
        }
    }
}

/// Exact decimal or fraction: `3`, `-2/7`, `0.125`, `1e-8`, `2.5E3`.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let t = text.trim();
    let bad = || Error::Invalid(format!("not a rational number: {text:?}"));
    if t.is_empty() {
        return Err(bad());
    }
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all: BigInt = format!("0{int_part}{frac_part}").parse().map_err(|_| bad())?;
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut q = BigRational::from_integer(all);
    if scale >= 0 {
        q *= BigRational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        q /= BigRational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Ok(if neg { -q } else { q })
}

impl FromStr for GoldenNumber {
    type Err = Error;

    /// Sums of rational terms and rational multiples of `tau` (or `τ`),
    /// e.g. `1`, `tau`, `3-tau`, `1/2+3/2tau`, `2*tau`.
    fn from_str(text: &str) -> Result<Self> {
        let s: String = text
            .replace('τ', "tau")
            .chars()
            .filter(|c| !c.is_whitespace())
            .collect();
        if s.is_empty() {
            return Err(Error::Invalid("empty number".into()));
        }
        let bytes = s.as_bytes();
        let mut terms = Vec::new();
        let mut start = 0;
        for i in 1..bytes.len() {
            let c = bytes[i];
            let prev = bytes[i - 1];
            if (c == b'+' || c == b'-') && prev != b'e' && prev != b'E' && prev != b'/' {
                terms.push(&s[start..i]);
                start = i;
            }
        }
        terms.push(&s[start..]);
        let mut out = GoldenNumber::zero();
        for term in terms {
            if let Some(c) = term.strip_suffix("tau") {
                let c = c.strip_suffix('*').unwrap_or(c);
                let q = match c {
                    "" | "+" => BigRational::one(),
                    "-" => -BigRational::one(),
                    _ => parse_rational(c)?,
                };
                out.v += q;
            } else {
                out.u += parse_rational(term)?;
            }
        }
        Ok(out)
    }
}

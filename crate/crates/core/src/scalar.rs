//! Scalar abstraction: the whole crate is generic over a real type `R: Real`.
//!
//! Two backends are provided: native `f64` (53-bit) and [`BigReal`], a wrapper
//! around `astro_float::BigFloat` for extended precision (256-bit by default
//! at orders N >= 3, overridable through `SolutionConfig`).
//!
//! `BigReal` values carry their precision with them; binary operations round
//! to the larger precision of the two operands, so constants created at low
//! precision are absorbed without contaminating a high-precision pipeline.

use astro_float::{BigFloat, Consts, RoundingMode, Sign};
use num_traits::{One, Zero};
use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constants cache"));
}

/// Real scalar operations needed by the solution pipeline.
pub trait Real:
    Sized
    + Clone
    + PartialEq
    + PartialOrd
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Zero
    + One
{
    fn from_f64_prec(v: f64, prec_bits: u32) -> Self;
    /// A value numerically equal to `v` carrying the same precision as `self`.
    fn lift(&self, v: f64) -> Self;
    fn to_f64(&self) -> f64;
    fn prec_bits(&self) -> u32;
    /// Pi at the precision of `self`.
    fn pi_like(&self) -> Self;
    fn abs(&self) -> Self;
    fn sqrt(&self) -> Self;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn sin_cos(&self) -> (Self, Self);
    fn sinh_cosh(&self) -> (Self, Self);
    fn atan(&self) -> Self;
    /// Four-quadrant arctangent of `self / x` (self is the ordinate).
    fn atan2(&self, x: &Self) -> Self;
    fn floor(&self) -> Self;
    fn hypot(&self, other: &Self) -> Self;
    fn neg_infinity(prec_bits: u32) -> Self;
    fn is_finite(&self) -> bool;
    fn is_neg_infinity(&self) -> bool;
}

impl Real for f64 {
    fn from_f64_prec(v: f64, _prec_bits: u32) -> Self {
        v
    }
    fn lift(&self, v: f64) -> Self {
        v
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn prec_bits(&self) -> u32 {
        53
    }
    fn pi_like(&self) -> Self {
        std::f64::consts::PI
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn ln(&self) -> Self {
        f64::ln(*self)
    }
    fn sin_cos(&self) -> (Self, Self) {
        f64::sin_cos(*self)
    }
    fn sinh_cosh(&self) -> (Self, Self) {
        (f64::sinh(*self), f64::cosh(*self))
    }
    fn atan(&self) -> Self {
        f64::atan(*self)
    }
    fn atan2(&self, x: &Self) -> Self {
        f64::atan2(*self, *x)
    }
    fn floor(&self) -> Self {
        f64::floor(*self)
    }
    fn hypot(&self, other: &Self) -> Self {
        f64::hypot(*self, *other)
    }
    fn neg_infinity(_prec_bits: u32) -> Self {
        f64::NEG_INFINITY
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
    fn is_neg_infinity(&self) -> bool {
        *self == f64::NEG_INFINITY
    }
}

/// Extended-precision real backed by `astro_float::BigFloat`.
///
/// The wrapper carries its working precision explicitly: a zero `BigFloat`
/// reports precision 0, which would otherwise silently downgrade constants
/// derived from zero-initialized accumulators.
#[derive(Clone, Debug)]
pub struct BigReal {
    v: BigFloat,
    prec: u32,
}

impl BigReal {
    fn wrap(v: BigFloat, prec: u32) -> Self {
        BigReal { v, prec }
    }

    pub fn inner(&self) -> &BigFloat {
        &self.v
    }

    fn p(&self) -> usize {
        self.prec.max(53) as usize
    }

    fn p2(&self, o: &Self) -> usize {
        self.p().max(o.p())
    }

    /// Parse a decimal string at the given precision (used by tests to embed
    /// frozen oracle values beyond f64 accuracy).
    pub fn parse_decimal(s: &str, prec_bits: u32) -> Self {
        CONSTS.with(|cc| {
            BigReal::wrap(
                BigFloat::parse(
                    s,
                    astro_float::Radix::Dec,
                    prec_bits as usize,
                    RM,
                    &mut cc.borrow_mut(),
                ),
                prec_bits,
            )
        })
    }
}

impl fmt::Display for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.v)
    }
}

impl PartialEq for BigReal {
    fn eq(&self, other: &Self) -> bool {
        matches!(self.v.cmp(&other.v), Some(0))
    }
}

impl PartialOrd for BigReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.v.cmp(&other.v).map(|s| s.cmp(&0))
    }
}

impl Add for BigReal {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let p = self.p2(&rhs);
        BigReal::wrap(self.v.add(&rhs.v, p, RM), p as u32)
    }
}

impl Sub for BigReal {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let p = self.p2(&rhs);
        BigReal::wrap(self.v.sub(&rhs.v, p, RM), p as u32)
    }
}

impl Mul for BigReal {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let p = self.p2(&rhs);
        BigReal::wrap(self.v.mul(&rhs.v, p, RM), p as u32)
    }
}

impl Div for BigReal {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let p = self.p2(&rhs);
        BigReal::wrap(self.v.div(&rhs.v, p, RM), p as u32)
    }
}

impl Neg for BigReal {
    type Output = Self;
    fn neg(self) -> Self {
        let p = self.prec;
        BigReal::wrap(self.v.neg(), p)
    }
}

impl Zero for BigReal {
    fn zero() -> Self {
        BigReal::wrap(BigFloat::from_f64(0.0, 53), 53)
    }
    fn is_zero(&self) -> bool {
        self.v.is_zero()
    }
}

impl One for BigReal {
    fn one() -> Self {
        BigReal::wrap(BigFloat::from_f64(1.0, 53), 53)
    }
}

impl Real for BigReal {
    fn from_f64_prec(v: f64, prec_bits: u32) -> Self {
        let p = prec_bits.max(53);
        BigReal::wrap(BigFloat::from_f64(v, p as usize), p)
    }

    fn lift(&self, v: f64) -> Self {
        BigReal::wrap(BigFloat::from_f64(v, self.p()), self.prec)
    }

    fn to_f64(&self) -> f64 {
        if self.v.is_nan() {
            return f64::NAN;
        }
        if self.v.is_inf_pos() {
            return f64::INFINITY;
        }
        if self.v.is_inf_neg() {
            return f64::NEG_INFINITY;
        }
        if self.v.is_zero() {
            return 0.0;
        }
        // value = sign * 0.mantissa * 2^exponent, mantissa normalized with the
        // top bit of the most significant word set
        match self.v.as_raw_parts() {
            Some((words, _len, sign, exp, _)) => {
                let msw = *words.last().unwrap_or(&0);
                let next = if words.len() >= 2 {
                    words[words.len() - 2]
                } else {
                    0
                };
                let frac = (msw as f64) / 18446744073709551616.0
                    + (next as f64) / 18446744073709551616.0 / 18446744073709551616.0;
                let mag = frac * f64::powi(2.0, exp);
                if sign == Sign::Neg {
                    -mag
                } else {
                    mag
                }
            }
            None => f64::NAN,
        }
    }

    fn prec_bits(&self) -> u32 {
        self.p() as u32
    }

    fn pi_like(&self) -> Self {
        let p = self.p();
        CONSTS.with(|cc| BigReal::wrap(cc.borrow_mut().pi(p, RM), p as u32))
    }

    fn abs(&self) -> Self {
        BigReal::wrap(self.v.abs(), self.prec)
    }

    fn sqrt(&self) -> Self {
        BigReal::wrap(self.v.sqrt(self.p(), RM), self.prec)
    }

    fn exp(&self) -> Self {
        let p = self.p();
        CONSTS.with(|cc| BigReal::wrap(self.v.exp(p, RM, &mut cc.borrow_mut()), self.prec))
    }

    fn ln(&self) -> Self {
        let p = self.p();
        CONSTS.with(|cc| BigReal::wrap(self.v.ln(p, RM, &mut cc.borrow_mut()), self.prec))
    }

    fn sin_cos(&self) -> (Self, Self) {
        let p = self.p();
        CONSTS.with(|cc| {
            let mut cc = cc.borrow_mut();
            (
                BigReal::wrap(self.v.sin(p, RM, &mut cc), self.prec),
                BigReal::wrap(self.v.cos(p, RM, &mut cc), self.prec),
            )
        })
    }

    fn sinh_cosh(&self) -> (Self, Self) {
        let p = self.p();
        CONSTS.with(|cc| {
            let mut cc = cc.borrow_mut();
            (
                BigReal::wrap(self.v.sinh(p, RM, &mut cc), self.prec),
                BigReal::wrap(self.v.cosh(p, RM, &mut cc), self.prec),
            )
        })
    }

    fn atan(&self) -> Self {
        let p = self.p();
        CONSTS.with(|cc| BigReal::wrap(self.v.atan(p, RM, &mut cc.borrow_mut()), self.prec))
    }

    fn atan2(&self, x: &Self) -> Self {
        let y = self;
        let pi = self.pi_like();
        if x.v.is_zero() {
            if y.v.is_zero() {
                return Self::zero();
            }
            let half = pi.lift(0.5) * pi;
            return if y.v.is_negative() { -half } else { half };
        }
        let base = (y.clone() / x.clone()).atan();
        if x.v.is_negative() {
            if y.v.is_negative() {
                base - pi
            } else {
                base + pi
            }
        } else {
            base
        }
    }

    fn floor(&self) -> Self {
        BigReal::wrap(self.v.floor(), self.prec)
    }

    fn hypot(&self, other: &Self) -> Self {
        // exponent range of BigFloat is huge, no overflow concern
        (self.clone() * self.clone() + other.clone() * other.clone()).sqrt()
    }

    fn neg_infinity(prec_bits: u32) -> Self {
        let p = prec_bits.max(53);
        BigReal::wrap(BigFloat::from_f64(f64::NEG_INFINITY, p as usize), p)
    }

    fn is_finite(&self) -> bool {
        !self.v.is_inf() && !self.v.is_nan()
    }

    fn is_neg_infinity(&self) -> bool {
        self.v.is_inf_neg()
    }
}

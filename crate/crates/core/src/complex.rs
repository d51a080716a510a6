//! Complex arithmetic over a generic real scalar, plus the log-domain
//! representation used for overflow-safe determinant ratios.

use crate::error::{Error, Result};
use crate::scalar::Real;
use num_traits::Zero;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Complex number with generic real/imaginary parts.
///
/// Hand-rolled rather than `num_complex::Complex` because the extended
/// precision backend is not `Copy`, which rules out `num_traits::Float`.
#[derive(Clone, Debug, PartialEq)]
pub struct Complex<R: Real> {
    pub re: R,
    pub im: R,
}

impl<R: Real> Complex<R> {
    pub fn new(re: R, im: R) -> Self {
        Complex { re, im }
    }

    pub fn from_re(re: R) -> Self {
        let im = re.lift(0.0);
        Complex { re, im }
    }

    pub fn zero_prec(prec: u32) -> Self {
        Complex::new(R::from_f64_prec(0.0, prec), R::from_f64_prec(0.0, prec))
    }

    pub fn from_f64s(re: f64, im: f64, prec: u32) -> Self {
        Complex::new(R::from_f64_prec(re, prec), R::from_f64_prec(im, prec))
    }

    pub fn conj(&self) -> Self {
        Complex::new(self.re.clone(), -self.im.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn abs_sq(&self) -> R {
        self.re.clone() * self.re.clone() + self.im.clone() * self.im.clone()
    }

    pub fn abs(&self) -> R {
        self.re.hypot(&self.im)
    }

    pub fn arg(&self) -> R {
        self.im.atan2(&self.re)
    }

    /// Multiply by the imaginary unit.
    pub fn mul_i(&self) -> Self {
        Complex::new(-self.im.clone(), self.re.clone())
    }

    pub fn scale(&self, s: &R) -> Self {
        Complex::new(self.re.clone() * s.clone(), self.im.clone() * s.clone())
    }

    pub fn scale_f64(&self, s: f64) -> Self {
        let f = self.re.lift(s);
        self.scale(&f)
    }

    pub fn recip(&self) -> Self {
        let d = self.abs_sq();
        Complex::new(self.re.clone() / d.clone(), -self.im.clone() / d)
    }

    pub fn exp(&self) -> Self {
        let m = self.re.exp();
        let (s, c) = self.im.sin_cos();
        Complex::new(m.clone() * c, m * s)
    }

    /// Principal natural logarithm.
    pub fn ln(&self) -> Self {
        Complex::new(self.abs().ln(), self.arg())
    }

    /// Principal square root (from polar form).
    pub fn sqrt(&self) -> Self {
        let r = self.abs().sqrt();
        let half = self.re.lift(0.5);
        let (s, c) = (self.arg() * half).sin_cos();
        Complex::new(r.clone() * c, r * s)
    }

    /// sin(a+bi) = sin a cosh b + i cos a sinh b
    pub fn sin(&self) -> Self {
        let (sa, ca) = self.re.sin_cos();
        let (shb, chb) = self.im.sinh_cosh();
        Complex::new(sa * chb, ca * shb)
    }

    /// cos(a+bi) = cos a cosh b - i sin a sinh b
    pub fn cos(&self) -> Self {
        let (sa, ca) = self.re.sin_cos();
        let (shb, chb) = self.im.sinh_cosh();
        Complex::new(ca * chb, -(sa * shb))
    }

    pub fn to_f64s(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }
}

impl<R: Real> fmt::Display for Complex<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} + {}i)", self.re, self.im)
    }
}

impl<R: Real> Add for Complex<R> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Complex::new(self.re + o.re, self.im + o.im)
    }
}

impl<R: Real> Sub for Complex<R> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Complex::new(self.re - o.re, self.im - o.im)
    }
}

impl<R: Real> Mul for Complex<R> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Complex::new(
            self.re.clone() * o.re.clone() - self.im.clone() * o.im.clone(),
            self.re * o.im + self.im * o.re,
        )
    }
}

impl<R: Real> Div for Complex<R> {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        // Smith's formula, robust against intermediate overflow at f64
        if o.re.abs() >= o.im.abs() {
            let r = o.im.clone() / o.re.clone();
            let d = o.re + o.im * r.clone();
            Complex::new(
                (self.re.clone() + self.im.clone() * r.clone()) / d.clone(),
                (self.im - self.re * r) / d,
            )
        } else {
            let r = o.re.clone() / o.im.clone();
            let d = o.re * r.clone() + o.im;
            Complex::new(
                (self.re.clone() * r.clone() + self.im.clone()) / d.clone(),
                (self.im * r - self.re) / d,
            )
        }
    }
}

impl<R: Real> Neg for Complex<R> {
    type Output = Self;
    fn neg(self) -> Self {
        Complex::new(-self.re, -self.im)
    }
}

impl<R: Real> Zero for Complex<R> {
    fn zero() -> Self {
        Complex::new(R::zero(), R::zero())
    }
    fn is_zero(&self) -> bool {
        Complex::is_zero(self)
    }
}

/// Complex value stored as (log-magnitude, phase). `log_mag = -inf` encodes
/// an exact zero, with phase 0 canonically. Products and ratios of values
/// spanning hundreds of orders of magnitude stay representable.
#[derive(Clone, Debug)]
pub struct LogComplex<R: Real> {
    log_mag: R,
    phase: R,
}

impl<R: Real> LogComplex<R> {
    pub fn new(log_mag: R, phase: R) -> Self {
        let lc = LogComplex { log_mag, phase };
        lc.normalized()
    }

    pub fn zero(prec: u32) -> Self {
        LogComplex {
            log_mag: R::neg_infinity(prec),
            phase: R::from_f64_prec(0.0, prec),
        }
    }

    pub fn one(prec: u32) -> Self {
        LogComplex {
            log_mag: R::from_f64_prec(0.0, prec),
            phase: R::from_f64_prec(0.0, prec),
        }
    }

    pub fn from_complex(z: &Complex<R>) -> Self {
        if z.is_zero() {
            return LogComplex::zero(z.re.prec_bits());
        }
        LogComplex::new(z.abs().ln(), z.arg())
    }

    pub fn log_mag(&self) -> &R {
        &self.log_mag
    }

    pub fn phase(&self) -> &R {
        &self.phase
    }

    pub fn is_zero(&self) -> bool {
        self.log_mag.is_neg_infinity()
    }

    /// Wrap the phase into (-pi, pi].
    fn normalized(mut self) -> Self {
        if self.is_zero() {
            self.phase = self.phase.lift(0.0);
            return self;
        }
        let pi = self.phase.pi_like();
        let two_pi = pi.clone() + pi.clone();
        // k = floor((pi - phase) / 2pi) turns of correction
        let k = ((pi.clone() - self.phase.clone()) / two_pi.clone()).floor();
        self.phase = self.phase + k * two_pi;
        self
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return LogComplex::zero(self.phase.prec_bits());
        }
        LogComplex::new(
            self.log_mag.clone() + o.log_mag.clone(),
            self.phase.clone() + o.phase.clone(),
        )
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        if o.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        if self.is_zero() {
            return Ok(LogComplex::zero(self.phase.prec_bits()));
        }
        Ok(LogComplex::new(
            self.log_mag.clone() - o.log_mag.clone(),
            self.phase.clone() - o.phase.clone(),
        ))
    }

    /// Multiply by a plain complex value.
    pub fn mul_complex(&self, z: &Complex<R>) -> Self {
        self.mul(&LogComplex::from_complex(z))
    }

    pub fn neg(&self) -> Self {
        let pi = self.phase.pi_like();
        LogComplex::new(self.log_mag.clone(), self.phase.clone() + pi)
    }

    /// Back to ordinary complex form; errors if the exponent is unrepresentable.
    pub fn to_complex(&self) -> Result<Complex<R>> {
        if self.is_zero() {
            return Ok(Complex::new(self.phase.lift(0.0), self.phase.lift(0.0)));
        }
        let m = self.log_mag.exp();
        if !m.is_finite() {
            return Err(Error::Range {
                exponent: self.log_mag.to_f64(),
            });
        }
        let (s, c) = self.phase.sin_cos();
        Ok(Complex::new(m.clone() * c, m * s))
    }
}

/// exp(a - b) as an ordinary complex value.
pub fn log_ratio<R: Real>(a: &LogComplex<R>, b: &LogComplex<R>) -> Result<Complex<R>> {
    a.div(b)?.to_complex()
}

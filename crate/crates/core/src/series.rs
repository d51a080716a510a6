//! Truncated Laurent/Taylor series in the degeneration parameter.
//!
//! A series holds complex coefficients for the exponent window
//! `[valuation, valuation + len)`; the represented function is guaranteed to
//! have no terms below the valuation. Arithmetic tracks windows
//! conservatively (intersection for sums, Cauchy-product bound for
//! products), so a coefficient is never fabricated from incomplete data.
//!
//! Negative valuations are first-class: the base column functions multiply
//! gamma powers with negative exponents against trig factors that vanish at
//! zero, and the cancellation must be explicit so that extracting a
//! derivative can assert analyticity instead of silently dividing.

use crate::complex::Complex;
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Debug)]
pub struct EpsSeries<R: Real> {
    val: i32,
    coeffs: Vec<Complex<R>>,
}

/// Elementary function selector for [`EpsSeries::elementary`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ElementaryFn {
    Sin,
    Cos,
    Exp,
    Ln,
    Sqrt,
}

/// Binary operation selector for [`EpsSeries::arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeriesOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl<R: Real> EpsSeries<R> {
    pub fn from_coeffs(val: i32, coeffs: Vec<Complex<R>>) -> Self {
        assert!(!coeffs.is_empty(), "series window must be non-empty");
        EpsSeries { val, coeffs }.canon()
    }

    pub fn zero(window: usize, prec: u32) -> Self {
        EpsSeries {
            val: 0,
            coeffs: vec![Complex::zero_prec(prec); window.max(1)],
        }
    }

    pub fn constant(c: Complex<R>, window: usize) -> Self {
        let prec = c.re.prec_bits();
        let mut coeffs = vec![Complex::zero_prec(prec); window.max(1)];
        coeffs[0] = c;
        EpsSeries { val: 0, coeffs }.canon()
    }

    /// c * eps^k
    pub fn monomial(c: Complex<R>, k: i32, window: usize) -> Self {
        let prec = c.re.prec_bits();
        let mut coeffs = vec![Complex::zero_prec(prec); window.max(1)];
        coeffs[0] = c;
        EpsSeries { val: k, coeffs }.canon()
    }

    fn canon(mut self) -> Self {
        let mut lead = 0;
        while lead + 1 < self.coeffs.len() && self.coeffs[lead].is_zero() {
            lead += 1;
        }
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.val += lead as i32;
        }
        self
    }

    pub fn valuation(&self) -> i32 {
        self.val
    }

    /// One past the last exponent with a known coefficient.
    pub fn window_end(&self) -> i32 {
        self.val + self.coeffs.len() as i32
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    fn prec(&self) -> u32 {
        self.coeffs[0].re.prec_bits()
    }

    /// Coefficient of eps^e; exponents below the valuation are genuinely zero.
    pub fn coeff(&self, e: i32) -> Complex<R> {
        if e < self.val {
            return Complex::zero_prec(self.prec());
        }
        let i = (e - self.val) as usize;
        self.coeffs
            .get(i)
            .cloned()
            .unwrap_or_else(|| Complex::zero_prec(self.prec()))
    }

    pub fn neg(&self) -> Self {
        EpsSeries {
            val: self.val,
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let val = self.val.min(o.val);
        let end = self.window_end().min(o.window_end());
        if end <= val {
            // disjoint-window degenerate case; keep the narrower information
            return EpsSeries {
                val,
                coeffs: vec![Complex::zero_prec(self.prec())],
            };
        }
        let mut coeffs = Vec::with_capacity((end - val) as usize);
        for e in val..end {
            coeffs.push(self.coeff(e) + o.coeff(e));
        }
        EpsSeries { val, coeffs }.canon()
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let n = self.coeffs.len().min(o.coeffs.len());
        let prec = self.prec();
        let mut coeffs = vec![Complex::zero_prec(prec); n];
        for (i, a) in self.coeffs.iter().enumerate().take(n) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if i + j >= n {
                    break;
                }
                coeffs[i + j] = coeffs[i + j].clone() + a.clone() * b.clone();
            }
        }
        EpsSeries {
            val: self.val + o.val,
            coeffs,
        }
        .canon()
    }

    /// Multiplicative inverse; errors on the identically-zero series.
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::SeriesArithmetic(
                "division by identically-zero series".into(),
            ));
        }
        let a0 = self.coeffs[0].clone();
        let n = self.coeffs.len();
        let mut out = vec![Complex::zero_prec(self.prec()); n];
        out[0] = a0.recip();
        for k in 1..n {
            let mut s = Complex::zero_prec(self.prec());
            for j in 1..=k {
                s = s + self.coeffs[j].clone() * out[k - j].clone();
            }
            out[k] = -(s / a0.clone());
        }
        Ok(EpsSeries {
            val: -self.val,
            coeffs: out,
        })
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        Ok(self.mul(&o.inv()?))
    }

    /// Integer power; negative powers go through the inverse.
    pub fn powi(&self, p: i32) -> Result<Self> {
        if p == 0 {
            return Ok(EpsSeries::constant(
                Complex::from_f64s(1.0, 0.0, self.prec()),
                self.coeffs.len(),
            ));
        }
        let base = if p > 0 { self.clone() } else { self.inv()? };
        let mut acc = base.clone();
        for _ in 1..p.abs() {
            acc = acc.mul(&base);
        }
        Ok(acc)
    }

    /// Multiply by eps^k (exact window shift).
    pub fn shift(&self, k: i32) -> Self {
        EpsSeries {
            val: self.val + k,
            coeffs: self.coeffs.clone(),
        }
    }

    pub fn scale(&self, c: &Complex<R>) -> Self {
        EpsSeries {
            val: self.val,
            coeffs: self.coeffs.iter().map(|a| a.clone() * c.clone()).collect(),
        }
        .canon()
    }

    /// Binary arithmetic through a runtime selector.
    pub fn arith(a: &Self, b: &Self, op: SeriesOp) -> Result<Self> {
        Ok(match op {
            SeriesOp::Add => a.add(b),
            SeriesOp::Sub => a.sub(b),
            SeriesOp::Mul => a.mul(b),
            SeriesOp::Div => a.div(b)?,
        })
    }

    /// Dense coefficient table on [0, end); requires valuation >= 0.
    fn dense(&self) -> Result<Vec<Complex<R>>> {
        if self.is_zero() {
            let end = self.window_end().max(1) as usize;
            return Ok(vec![Complex::zero_prec(self.prec()); end]);
        }
        if self.val < 0 {
            return Err(Error::NegativeValuation {
                valuation: self.val,
            });
        }
        let end = self.window_end() as usize;
        let mut u = vec![Complex::zero_prec(self.prec()); end];
        for (i, c) in self.coeffs.iter().enumerate() {
            u[self.val as usize + i] = c.clone();
        }
        Ok(u)
    }

    /// sin and cos of an analytic-at-zero series, computed together through
    /// the coupled derivative recurrence.
    pub fn sin_cos(&self) -> Result<(Self, Self)> {
        let u = self.dense()?;
        let n = u.len();
        let prec = self.prec();
        let mut s = vec![Complex::zero_prec(prec); n];
        let mut c = vec![Complex::zero_prec(prec); n];
        s[0] = u[0].sin();
        c[0] = u[0].cos();
        for k in 1..n {
            let mut ds = Complex::zero_prec(prec);
            let mut dc = Complex::zero_prec(prec);
            for j in 1..=k {
                let ju = u[j].scale_f64(j as f64);
                ds = ds + ju.clone() * c[k - j].clone();
                dc = dc + ju * s[k - j].clone();
            }
            let inv_k = 1.0 / k as f64;
            s[k] = ds.scale_f64(inv_k);
            c[k] = -dc.scale_f64(inv_k);
        }
        Ok((
            EpsSeries { val: 0, coeffs: s }.canon(),
            EpsSeries { val: 0, coeffs: c }.canon(),
        ))
    }

    pub fn exp(&self) -> Result<Self> {
        let u = self.dense()?;
        let n = u.len();
        let prec = self.prec();
        let mut e = vec![Complex::zero_prec(prec); n];
        e[0] = u[0].exp();
        for k in 1..n {
            let mut de = Complex::zero_prec(prec);
            for j in 1..=k {
                de = de + u[j].scale_f64(j as f64) * e[k - j].clone();
            }
            e[k] = de.scale_f64(1.0 / k as f64);
        }
        Ok(EpsSeries { val: 0, coeffs: e }.canon())
    }

    fn require_unit_constant(&self, what: &str) -> Result<()> {
        if self.is_zero() || self.val != 0 || self.coeffs[0].is_zero() {
            return Err(Error::Domain(format!(
                "{what} of a series with zero constant term (valuation {})",
                self.val
            )));
        }
        Ok(())
    }

    /// Principal branch logarithm around the (nonzero) constant term.
    pub fn ln(&self) -> Result<Self> {
        self.require_unit_constant("ln")?;
        let u = &self.coeffs;
        let n = u.len();
        let prec = self.prec();
        let mut l = vec![Complex::zero_prec(prec); n];
        l[0] = u[0].ln();
        for k in 1..n {
            // coefficient of eps^{k-1} in u * l' equals k * u_k
            let mut s = Complex::zero_prec(prec);
            for m in 1..k {
                s = s + l[m].scale_f64(m as f64) * u[k - m].clone();
            }
            l[k] = (u[k].scale_f64(k as f64) - s) / u[0].scale_f64(k as f64);
        }
        Ok(EpsSeries { val: 0, coeffs: l }.canon())
    }

    /// Principal branch square root around the (nonzero) constant term.
    pub fn sqrt(&self) -> Result<Self> {
        self.require_unit_constant("sqrt")?;
        let u = &self.coeffs;
        let n = u.len();
        let prec = self.prec();
        let mut r = vec![Complex::zero_prec(prec); n];
        r[0] = u[0].sqrt();
        for k in 1..n {
            let mut s = Complex::zero_prec(prec);
            for j in 1..k {
                s = s + r[j].clone() * r[k - j].clone();
            }
            r[k] = (u[k].clone() - s) / r[0].scale_f64(2.0);
        }
        Ok(EpsSeries { val: 0, coeffs: r }.canon())
    }

    /// Elementary functions through a runtime selector.
    pub fn elementary(&self, f: ElementaryFn) -> Result<Self> {
        match f {
            ElementaryFn::Sin => Ok(self.sin_cos()?.0),
            ElementaryFn::Cos => Ok(self.sin_cos()?.1),
            ElementaryFn::Exp => self.exp(),
            ElementaryFn::Ln => self.ln(),
            ElementaryFn::Sqrt => self.sqrt(),
        }
    }

    /// m-th derivative at zero: m! * c_m. Errors if the series has a pole or
    /// the window does not cover order m.
    pub fn derivative_at_zero(&self, m: usize) -> Result<Complex<R>> {
        if !self.is_zero() && self.val < 0 {
            return Err(Error::NegativeValuation {
                valuation: self.val,
            });
        }
        if (m as i32) >= self.window_end() {
            return Err(Error::WindowExceeded {
                order: m,
                window_end: self.window_end(),
            });
        }
        let mut fact = self.coeffs[0].re.lift(1.0);
        for i in 2..=m {
            fact = fact * self.coeffs[0].re.lift(i as f64);
        }
        Ok(self.coeff(m as i32).scale(&fact))
    }

    /// Evaluate the truncated series at a concrete eps.
    pub fn eval_at(&self, eps: &R) -> Complex<R> {
        let mut acc = Complex::zero_prec(self.prec());
        // Horner over the window, then shift by eps^val
        for c in self.coeffs.iter().rev() {
            acc = acc.scale(eps) + c.clone();
        }
        let mut shift = Complex::from_re(eps.lift(1.0));
        let e = Complex::from_re(eps.clone());
        for _ in 0..self.val.unsigned_abs() {
            if self.val > 0 {
                shift = shift * e.clone();
            } else {
                shift = shift / e.clone();
            }
        }
        acc * shift
    }

    /// Largest coefficient modulus difference against another series over the
    /// shared window (test helper).
    pub fn max_abs_diff(&self, o: &Self) -> f64 {
        let val = self.val.min(o.val);
        let end = self.window_end().min(o.window_end());
        let mut worst = 0.0f64;
        for e in val..end {
            let d = (self.coeff(e) - o.coeff(e)).abs().to_f64();
            if d > worst {
                worst = d;
            }
        }
        worst
    }
}

//! Spectral scheme: the 2N parameterized spectral points and the deformation
//! parameter encoding that drives the whole construction.
//!
//! Points come in mirrored pairs. For j = 1..N,
//!
//! ```text
//! lambda_j     = 1 - 2 j^2 eps^2          lambda_{N+j} = -lambda_j
//! kappa_nu     = 2 sqrt(1 - lambda_nu^2)
//! delta_nu     = kappa_nu * lambda_nu
//! gamma_nu     = sqrt((1 - lambda_nu) / (1 + lambda_nu))
//! x3_j         = 4 i atan(gamma_j)        x3_{N+j} = -x3_j
//! ```
//!
//! The j^2 in lambda_j makes every spectral function of point j equal the
//! base-point function evaluated at j*eps, which is what the degenerate
//! column structure requires.
//!
//! The complex logarithm inside x3 is fixed to the branch that vanishes with
//! eps and is odd under the pairing. exp(x3) is branch-independent, so the
//! theta and Fredholm forms are unaffected, while the trig-argument forms
//! (Wronskian, degenerate) get k_3(0) = k_1(0) exactly and therefore agree
//! with the determinant ratio without a parity factor.

use crate::complex::Complex;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::series::EpsSeries;

/// One spectral point.
#[derive(Clone, Debug)]
pub struct SpectralPoint<R: Real> {
    /// 1-based index nu in 1..=2N.
    pub index: usize,
    pub lambda: R,
    pub kappa: R,
    pub delta: R,
    pub gamma: R,
    /// x_{1,nu}: identically zero (r - 1 = 0).
    pub x1: Complex<R>,
    /// x_{3,nu}: purely imaginary under the fixed branch.
    pub x3: Complex<R>,
}

/// The 2N spectral points generated from (N, eps).
#[derive(Clone, Debug)]
pub struct SpectralScheme<R: Real> {
    order: usize,
    epsilon: R,
    points: Vec<SpectralPoint<R>>,
}

impl<R: Real> SpectralScheme<R> {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn epsilon(&self) -> &R {
        &self.epsilon
    }

    /// Point nu (1-based).
    pub fn point(&self, nu: usize) -> Result<&SpectralPoint<R>> {
        if nu == 0 || nu > 2 * self.order {
            return Err(Error::Index {
                index: nu,
                max: 2 * self.order,
            });
        }
        Ok(&self.points[nu - 1])
    }

    pub fn points(&self) -> &[SpectralPoint<R>] {
        &self.points
    }

    /// Sign exponent (-1)^{eps_nu}: eps_j = j on the lower half and
    /// eps_j = N + j on the upper half, taken literally.
    pub fn sign(&self, nu: usize) -> f64 {
        let e = if nu <= self.order {
            nu
        } else {
            self.order + nu
        };
        if e % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }
}

/// Admissible upper bound on eps for order n: keeps lambda_N positive and the
/// gamma ladder below 1.
pub fn epsilon_upper_bound(n: usize) -> f64 {
    1.0 / (std::f64::consts::SQRT_2 * n as f64)
}

/// Generate the spectral scheme for order `n` at finite `eps`.
pub fn build_spectral<R: Real>(n: usize, eps: R) -> Result<SpectralScheme<R>> {
    if n == 0 {
        return Err(Error::Domain("order N must be positive".into()));
    }
    let hi = epsilon_upper_bound(n);
    let e = eps.to_f64();
    if !(e > 0.0 && e < hi) {
        return Err(Error::Domain(format!(
            "epsilon {e} outside the admissible interval (0, {hi}) for N = {n}"
        )));
    }
    let one = eps.lift(1.0);
    let mut lower = Vec::with_capacity(n);
    for j in 1..=n {
        let je = eps.lift(j as f64) * eps.clone();
        let lambda = one.clone() - eps.lift(2.0) * je.clone() * je.clone();
        let kappa = eps.lift(2.0) * (one.clone() - lambda.clone() * lambda.clone()).sqrt();
        let delta = kappa.clone() * lambda.clone();
        let gamma = ((one.clone() - lambda.clone()) / (one.clone() + lambda.clone())).sqrt();
        let x3_im = eps.lift(4.0) * gamma.atan();
        lower.push(SpectralPoint {
            index: j,
            lambda,
            kappa,
            delta,
            gamma,
            x1: Complex::new(eps.lift(0.0), eps.lift(0.0)),
            x3: Complex::new(eps.lift(0.0), x3_im),
        });
    }
    let mut points = lower.clone();
    for p in &lower {
        points.push(SpectralPoint {
            index: n + p.index,
            lambda: -p.lambda.clone(),
            kappa: p.kappa.clone(),
            delta: -p.delta.clone(),
            gamma: one.clone() / p.gamma.clone(),
            x1: p.x1.clone(),
            x3: -p.x3.clone(),
        });
    }
    // gamma values must be pairwise distinct for the determinant forms
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            if points[i].gamma == points[j].gamma {
                return Err(Error::SingularConfiguration(i + 1, j + 1));
            }
        }
    }
    Ok(SpectralScheme {
        order: n,
        epsilon: eps,
        points,
    })
}

/// The 2N-2 real deformation parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct DeformationParams<R: Real> {
    order: usize,
    a_tilde: Vec<R>,
    b_tilde: Vec<R>,
}

impl<R: Real> DeformationParams<R> {
    /// Zero parameters (the Peregrine case).
    pub fn zero(order: usize, prec: u32) -> Self {
        DeformationParams {
            order,
            a_tilde: vec![R::from_f64_prec(0.0, prec); order.saturating_sub(1)],
            b_tilde: vec![R::from_f64_prec(0.0, prec); order.saturating_sub(1)],
        }
    }

    pub fn new(order: usize, a_tilde: Vec<R>, b_tilde: Vec<R>) -> Result<Self> {
        if order == 0 {
            return Err(Error::Domain("order N must be positive".into()));
        }
        if a_tilde.len() != order - 1 || b_tilde.len() != order - 1 {
            return Err(Error::Domain(format!(
                "parameter sequences must have length N-1 = {} (got {} and {})",
                order - 1,
                a_tilde.len(),
                b_tilde.len()
            )));
        }
        Ok(DeformationParams {
            order,
            a_tilde,
            b_tilde,
        })
    }

    /// Set a single parameter, 1-based index in 1..=N-1.
    pub fn with_a(mut self, k: usize, v: R) -> Result<Self> {
        if k == 0 || k > self.order - 1 {
            return Err(Error::Index {
                index: k,
                max: self.order - 1,
            });
        }
        self.a_tilde[k - 1] = v;
        Ok(self)
    }

    pub fn with_b(mut self, k: usize, v: R) -> Result<Self> {
        if k == 0 || k > self.order - 1 {
            return Err(Error::Index {
                index: k,
                max: self.order - 1,
            });
        }
        self.b_tilde[k - 1] = v;
        Ok(self)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn a_tilde(&self) -> &[R] {
        &self.a_tilde
    }

    pub fn b_tilde(&self) -> &[R] {
        &self.b_tilde
    }

    pub fn is_zero(&self) -> bool {
        self.a_tilde.iter().all(|v| v.is_zero()) && self.b_tilde.iter().all(|v| v.is_zero())
    }

    /// Indices (1-based) of nonzero parameters, as (kind, k, value) with kind
    /// 'a' or 'b'.
    pub fn nonzero(&self) -> Vec<(char, usize, f64)> {
        let mut out = Vec::new();
        for (i, v) in self.a_tilde.iter().enumerate() {
            if !v.is_zero() {
                out.push(('a', i + 1, v.to_f64()));
            }
        }
        for (i, v) in self.b_tilde.iter().enumerate() {
            if !v.is_zero() {
                out.push(('b', i + 1, v.to_f64()));
            }
        }
        out
    }
}

/// a_j and b_j of the parameter scaling: a_j = sum_k a~_k j^{2k+1} eps^{2k+1}.
fn scaled_ab<R: Real>(params: &DeformationParams<R>, eps: &R, j: usize) -> (R, R) {
    let mut a = eps.lift(0.0);
    let mut b = eps.lift(0.0);
    let je = eps.lift(j as f64) * eps.clone();
    // (j eps)^{2k+1}
    let mut pw = je.clone() * je.clone() * je.clone();
    for k in 1..params.order {
        a = a + params.a_tilde[k - 1].clone() * pw.clone();
        b = b + params.b_tilde[k - 1].clone() * pw.clone();
        pw = pw * je.clone() * je.clone();
    }
    (a, b)
}

/// e_nu at finite eps: e_j = i a_j - b_j, e_{N+j} = i a_j + b_j.
pub fn e_coefficient<R: Real>(
    params: &DeformationParams<R>,
    eps: &R,
    nu: usize,
) -> Result<Complex<R>> {
    let n = params.order;
    if nu == 0 || nu > 2 * n {
        return Err(Error::Index {
            index: nu,
            max: 2 * n,
        });
    }
    let j = if nu <= n { nu } else { nu - n };
    let (a, b) = scaled_ab(params, eps, j);
    Ok(if nu <= n {
        Complex::new(-b, a)
    } else {
        Complex::new(b, a)
    })
}

/// e_nu as a truncated series in eps: nonzero coefficients only at the odd
/// orders 3, 5, ..., 2N-1.
pub fn e_coefficient_series<R: Real>(
    params: &DeformationParams<R>,
    nu: usize,
    window: usize,
    prec: u32,
) -> Result<EpsSeries<R>> {
    let n = params.order;
    if nu == 0 || nu > 2 * n {
        return Err(Error::Index {
            index: nu,
            max: 2 * n,
        });
    }
    let j = if nu <= n { nu } else { nu - n };
    let mut s = EpsSeries::zero(window, prec);
    for k in 1..n {
        let a = &params.a_tilde[k - 1];
        let b = &params.b_tilde[k - 1];
        let jf = R::from_f64_prec(j as f64, prec);
        let mut jp = jf.clone();
        for _ in 1..(2 * k + 1) {
            jp = jp * jf.clone();
        }
        // e_j = i a_j - b_j (lower) or i a_j + b_j (upper)
        let coeff = if nu <= n {
            Complex::new(-b.clone() * jp.clone(), a.clone() * jp)
        } else {
            Complex::new(b.clone() * jp.clone(), a.clone() * jp)
        };
        s = s.add(&EpsSeries::monomial(coeff, (2 * k + 1) as i32, window));
    }
    Ok(s)
}

/// Which solution representation an evaluation should use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Representation {
    /// The eps -> 0 limit matrices (the production path).
    Degenerate,
    /// The finite-eps Wronskian oracle, for cross-validation.
    FiniteEps,
}

/// Everything needed to evaluate one solution family.
#[derive(Clone, Debug)]
pub struct SolutionConfig<R: Real> {
    pub order: usize,
    pub params: DeformationParams<R>,
    /// Global phase in exp(2it - i phase).
    pub phase: R,
    /// Mantissa bits for the working arithmetic.
    pub precision: u32,
    pub representation: Representation,
    /// eps for the finite-eps representation (ignored by the degenerate path).
    pub epsilon: Option<R>,
}

/// Default working precision: double for N <= 2, 256-bit software floats for
/// N >= 3 (the column-reduction cancellations grow with the order).
pub fn default_precision(order: usize) -> u32 {
    if order <= 2 {
        53
    } else {
        256
    }
}

impl<R: Real> SolutionConfig<R> {
    pub fn peregrine(order: usize, prec: u32) -> Result<Self> {
        if order == 0 {
            return Err(Error::Domain("order N must be positive".into()));
        }
        if prec < 53 {
            return Err(Error::Domain("precision must be at least 53 bits".into()));
        }
        Ok(SolutionConfig {
            order,
            params: DeformationParams::zero(order, prec),
            phase: R::from_f64_prec(0.0, prec),
            precision: prec,
            representation: Representation::Degenerate,
            epsilon: None,
        })
    }

    pub fn with_params(mut self, params: DeformationParams<R>) -> Result<Self> {
        if params.order() != self.order {
            return Err(Error::Domain(format!(
                "parameter order {} does not match solution order {}",
                params.order(),
                self.order
            )));
        }
        self.params = params;
        Ok(self)
    }

    pub fn with_phase(mut self, phase: R) -> Result<Self> {
        if !phase.is_finite() {
            return Err(Error::Domain("phase must be finite".into()));
        }
        self.phase = phase;
        Ok(self)
    }
}

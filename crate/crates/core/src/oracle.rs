//! The three finite-eps representations and their prefactor identity:
//! theta subset sums, Fredholm determinants det(I + C_r) / det(I + D_r), and
//! the Wronskian form with its k_r(0) prefactor. They are mutually
//! independent evaluation routes for the same solution and serve as the
//! ground truth for the degenerate path.

use crate::complex::{Complex, LogComplex};
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::scalar::Real;
use crate::spectral::{e_coefficient, DeformationParams, SpectralScheme};

/// Which exponent set x_{r,nu} enters the arguments.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rsel {
    R1,
    R3,
}

/// Fredholm matrix variant.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FredholmVariant {
    C,
    D,
}

/// Assembled arguments for the theta/Fredholm/Wronskian forms at one (x, t).
pub struct ThetaArgumentSet<'a, R: Real> {
    pub scheme: &'a SpectralScheme<R>,
    pub e: Vec<Complex<R>>,
    pub r: Rsel,
    pub x: R,
    pub t: R,
}

impl<'a, R: Real> ThetaArgumentSet<'a, R> {
    pub fn new(
        scheme: &'a SpectralScheme<R>,
        params: &DeformationParams<R>,
        r: Rsel,
        x: R,
        t: R,
    ) -> Result<Self> {
        if params.order() != scheme.order() {
            return Err(Error::Domain(
                "parameter order does not match scheme order".into(),
            ));
        }
        let mut e = Vec::with_capacity(2 * scheme.order());
        for nu in 1..=2 * scheme.order() {
            e.push(e_coefficient(params, scheme.epsilon(), nu)?);
        }
        Ok(ThetaArgumentSet { scheme, e, r, x, t })
    }

    fn x_r(&self, nu: usize) -> Complex<R> {
        let p = &self.scheme.points()[nu - 1];
        match self.r {
            Rsel::R1 => p.x1.clone(),
            Rsel::R3 => p.x3.clone(),
        }
    }

    /// Exponential factor exp(i kappa x - 2 delta t + x_r + e) of point nu.
    fn exp_factor(&self, nu: usize) -> Complex<R> {
        let p = &self.scheme.points()[nu - 1];
        let re = self.t.lift(-2.0) * p.delta.clone() * self.t.clone();
        let im = p.kappa.clone() * self.x.clone();
        let z = Complex::new(re, im) + self.x_r(nu) + self.e[nu - 1].clone();
        z.exp()
    }

    /// Theta argument of point nu at y = 0:
    /// kappa x / 2 + i delta t - i x_r / 2 - i e / 2.
    pub fn theta_argument(&self, nu: usize) -> Complex<R> {
        let p = &self.scheme.points()[nu - 1];
        let half = self.x.lift(0.5);
        let kx = Complex::from_re(p.kappa.clone() * self.x.clone() * half.clone());
        let dt = Complex::new(self.t.lift(0.0), p.delta.clone() * self.t.clone());
        let xr = self.x_r(nu).mul_i().scale(&half).neg_cplx();
        let ee = self.e[nu - 1].mul_i().scale(&half).neg_cplx();
        kx + dt + xr + ee
    }
}

trait NegCplx {
    fn neg_cplx(self) -> Self;
}

impl<R: Real> NegCplx for Complex<R> {
    fn neg_cplx(self) -> Self {
        -self
    }
}

/// The 2N theta arguments with their sin/cos selector: sin for nu <= N,
/// cos for nu > N.
pub struct PhiFunctionSet<R: Real> {
    pub thetas: Vec<Complex<R>>,
    pub order: usize,
}

impl<R: Real> PhiFunctionSet<R> {
    pub fn from_args(args: &ThetaArgumentSet<'_, R>) -> Result<Self> {
        let order = args.scheme.order();
        let thetas: Vec<Complex<R>> = (1..=2 * order).map(|nu| args.theta_argument(nu)).collect();
        for th in &thetas {
            if !th.is_finite() {
                return Err(Error::Input("non-finite theta argument".into()));
            }
        }
        Ok(PhiFunctionSet { thetas, order })
    }

    pub fn uses_sin(&self, nu: usize) -> bool {
        nu <= self.order
    }

    /// phi_{r,nu}(0) = sin or cos of the argument per the selector.
    pub fn value(&self, nu: usize) -> Complex<R> {
        let th = &self.thetas[nu - 1];
        if self.uses_sin(nu) {
            th.sin()
        } else {
            th.cos()
        }
    }
}

/// Hard cap for the brute-force subset enumeration (2^{2N} terms).
pub const SUBSET_SUM_MAX_ORDER: usize = 6;

/// theta_r(x, t) by direct summation over all subsets J of {1..2N}.
#[allow(clippy::needless_range_loop)] // indices pair with mask bit positions
pub fn theta_subset_sum<R: Real>(args: &ThetaArgumentSet<'_, R>) -> Result<Complex<R>> {
    let n = args.scheme.order();
    if n > SUBSET_SUM_MAX_ORDER {
        return Err(Error::Capacity(format!(
            "subset sum capped at N <= {SUBSET_SUM_MAX_ORDER} (2^{} terms); use the Fredholm form",
            2 * n
        )));
    }
    let m = 2 * n;
    let prec = args.x.prec_bits();

    // per-point signed exponential factors
    let factors: Vec<Complex<R>> = (1..=m)
        .map(|nu| args.exp_factor(nu).scale_f64(args.scheme.sign(nu)))
        .collect();
    // pairwise |(gamma_nu + gamma_mu)/(gamma_nu - gamma_mu)|
    let gammas: Vec<&R> = args.scheme.points().iter().map(|p| &p.gamma).collect();
    let mut cross = vec![vec![args.x.lift(1.0); m]; m];
    for nu in 0..m {
        for mu in 0..m {
            if nu != mu {
                let num = (gammas[nu].clone() + gammas[mu].clone()).abs();
                let den = (gammas[nu].clone() - gammas[mu].clone()).abs();
                cross[nu][mu] = num / den;
            }
        }
    }

    let mut total = Complex::zero_prec(prec);
    for mask in 0u32..(1u32 << m) {
        let mut term = Complex::from_f64s(1.0, 0.0, prec);
        for nu in 0..m {
            if mask & (1 << nu) != 0 {
                term = term * factors[nu].clone();
            }
        }
        let mut cr = args.x.lift(1.0);
        for nu in 0..m {
            if mask & (1 << nu) != 0 {
                for mu in 0..m {
                    if mask & (1 << mu) == 0 {
                        cr = cr * cross[nu][mu].clone();
                    }
                }
            }
        }
        total = total + term.scale(&cr);
    }
    Ok(total)
}

/// Build the 2N x 2N Fredholm matrix C_r or D_r.
pub fn fredholm_matrix<R: Real>(
    args: &ThetaArgumentSet<'_, R>,
    variant: FredholmVariant,
) -> Result<ComplexMatrix<R>> {
    let m = 2 * args.scheme.order();
    let gammas: Vec<R> = args
        .scheme
        .points()
        .iter()
        .map(|p| p.gamma.clone())
        .collect();
    for i in 0..m {
        for j in (i + 1)..m {
            if gammas[i] == gammas[j] {
                return Err(Error::SingularConfiguration(i + 1, j + 1));
            }
        }
    }
    let rows: Vec<Complex<R>> = (1..=m)
        .map(|nu| args.exp_factor(nu).scale_f64(args.scheme.sign(nu)))
        .collect();

    let mat = match variant {
        FredholmVariant::C => ComplexMatrix::from_fn(m, |r, c| {
            // prod_{eta != mu} |gamma_nu + gamma_eta| / prod_{eta != nu} |gamma_nu - gamma_eta|
            let nu = r;
            let mu = c;
            let mut num = args.x.lift(1.0);
            let mut den = args.x.lift(1.0);
            for eta in 0..m {
                if eta != mu {
                    num = num * (gammas[nu].clone() + gammas[eta].clone()).abs();
                }
                if eta != nu {
                    den = den * (gammas[nu].clone() - gammas[eta].clone()).abs();
                }
            }
            rows[nu].scale(&(num / den))
        }),
        FredholmVariant::D => ComplexMatrix::from_fn(m, |r, c| {
            // prod_{eta != mu} |(gamma_eta + gamma_nu)/(gamma_eta - gamma_mu)|
            let nu = r;
            let mu = c;
            let mut pr = args.x.lift(1.0);
            for eta in 0..m {
                if eta != mu {
                    let num = (gammas[eta].clone() + gammas[nu].clone()).abs();
                    let den = (gammas[eta].clone() - gammas[mu].clone()).abs();
                    pr = pr * (num / den);
                }
            }
            rows[nu].scale(&pr)
        }),
    };
    Ok(mat)
}

/// det(I + M_r) in log form.
pub fn fredholm_det<R: Real>(
    args: &ThetaArgumentSet<'_, R>,
    variant: FredholmVariant,
) -> Result<LogComplex<R>> {
    let m = fredholm_matrix(args, variant)?;
    let dim = m.dim();
    let one = Complex::from_f64s(1.0, 0.0, args.x.prec_bits());
    let mut ipm = m;
    for i in 0..dim {
        let v = ipm.get(i, i).clone() + one.clone();
        ipm.set(i, i, v);
    }
    ipm.logdet()
}

/// Wronskian W_r(0) of the phi functions: the (mu-1)-th y-derivative rotates
/// the trig selector and multiplies by gamma_nu, applied analytically.
pub fn wronskian_det<R: Real>(args: &ThetaArgumentSet<'_, R>) -> Result<LogComplex<R>> {
    let phis = PhiFunctionSet::from_args(args)?;
    let m = 2 * args.scheme.order();
    let prec = args.x.prec_bits();
    let mut mat = ComplexMatrix::zeros(m, prec);
    for nu in 1..=m {
        let th = &phis.thetas[nu - 1];
        let s = th.sin();
        let c = th.cos();
        let gamma = &args.scheme.points()[nu - 1].gamma;
        let mut gpow = args.x.lift(1.0);
        for mu in 1..=m {
            let k = mu - 1;
            let base = if phis.uses_sin(nu) {
                match k % 4 {
                    0 => s.clone(),
                    1 => c.clone(),
                    2 => -s.clone(),
                    _ => -c.clone(),
                }
            } else {
                match k % 4 {
                    0 => c.clone(),
                    1 => -s.clone(),
                    2 => -c.clone(),
                    _ => s.clone(),
                }
            };
            mat.set(nu - 1, mu - 1, base.scale(&gpow));
            gpow = gpow * gamma.clone();
        }
    }
    mat.logdet()
}

/// The prefactor k_r(0) = 2^{2N} exp(i sum Theta_{r,nu}(0)) / prod_{nu>mu} (gamma_nu - gamma_mu),
/// with the signed product taken in the fixed (nu, mu) ordering below.
pub fn k_prefactor<R: Real>(args: &ThetaArgumentSet<'_, R>) -> Result<LogComplex<R>> {
    let m = 2 * args.scheme.order();
    let prec = args.x.prec_bits();
    let mut sum = Complex::zero_prec(prec);
    for nu in 1..=m {
        sum = sum + args.theta_argument(nu);
    }
    // exp(i * sum) has log-magnitude -Im(sum) and phase Re(sum);
    // the 2^{2N} factor adds 2N ln 2
    let mut log_mag = -sum.im + args.x.lift(m as f64 * std::f64::consts::LN_2);
    let mut phase = sum.re;
    let gammas: Vec<R> = args
        .scheme
        .points()
        .iter()
        .map(|p| p.gamma.clone())
        .collect();
    let pi = args.x.pi_like();
    for nu in 1..m {
        for mu in 0..nu {
            let d = gammas[nu].clone() - gammas[mu].clone();
            log_mag = log_mag - d.abs().ln();
            if d < args.x.lift(0.0) {
                phase = phase - pi.clone();
            }
        }
    }
    Ok(LogComplex::new(log_mag, phase))
}

/// v(x, t) = [W_3(0) / W_1(0)] exp(2it - i phase) via the Wronskian route.
pub fn wronskian_solution<R: Real>(
    scheme: &SpectralScheme<R>,
    params: &DeformationParams<R>,
    phase: &R,
    x: &R,
    t: &R,
) -> Result<Complex<R>> {
    let args1 = ThetaArgumentSet::new(scheme, params, Rsel::R1, x.clone(), t.clone())?;
    let args3 = ThetaArgumentSet::new(scheme, params, Rsel::R3, x.clone(), t.clone())?;
    let w1 = wronskian_det(&args1)?;
    let w3 = wronskian_det(&args3)?;
    if w1.is_zero() {
        return Err(Error::ZeroDenominator);
    }
    // |W_1| underflow beyond working precision: report the log-magnitude
    let floor = -((x.prec_bits() as f64) * std::f64::consts::LN_2 * 4.0) - 700.0;
    if w1.log_mag().to_f64() < floor {
        return Err(Error::Underflow {
            log_mag: w1.log_mag().to_f64(),
        });
    }
    let ratio = crate::complex::log_ratio(&w3, &w1)?;
    let ang = x.lift(2.0) * t.clone() - phase.clone();
    let (s, c) = ang.sin_cos();
    Ok(ratio * Complex::new(c, s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::log_ratio;
    use crate::spectral::build_spectral;

    fn relerr(a: &Complex<f64>, b: &Complex<f64>) -> f64 {
        (a.clone() - b.clone()).abs() / b.abs().max(1e-300)
    }

    /// Second, independently coded enumerator following the original
    /// vector-sum form: iterate k in {0,1}^{2N} and exponentiate the full
    /// log-domain exponent, including the pairwise log terms.
    fn theta_vector_form(args: &ThetaArgumentSet<'_, f64>) -> Complex<f64> {
        let n = args.scheme.order();
        let m = 2 * n;
        let pts = args.scheme.points();
        let mut total = Complex::new(0.0, 0.0);
        for mask in 0u32..(1u32 << m) {
            let k = |nu: usize| -> f64 {
                if mask & (1 << (nu - 1)) != 0 {
                    1.0
                } else {
                    0.0
                }
            };
            let mut expo = Complex::new(0.0, 0.0);
            for mu in 2..=m {
                for nu in 1..mu {
                    let g = ((pts[nu - 1].gamma - pts[mu - 1].gamma)
                        / (pts[nu - 1].gamma + pts[mu - 1].gamma))
                        .powi(2)
                        .ln();
                    expo.re += g * k(mu) * k(nu);
                }
            }
            for nu in 1..=m {
                let p = &pts[nu - 1];
                let xr = match args.r {
                    Rsel::R1 => p.x1.clone(),
                    Rsel::R3 => p.x3.clone(),
                };
                let mut ln_sum = 0.0;
                for mu in 1..=m {
                    if mu != nu {
                        ln_sum += ((p.gamma + pts[mu - 1].gamma) / (p.gamma - pts[mu - 1].gamma))
                            .abs()
                            .ln();
                    }
                }
                let eps_nu = if nu <= n { nu } else { n + nu };
                let inner = Complex::new(
                    -2.0 * p.delta * args.t + ln_sum,
                    p.kappa * args.x + eps_nu as f64 * std::f64::consts::PI,
                ) + xr
                    + args.e[nu - 1].clone();
                expo = expo + inner.scale_f64(k(nu));
            }
            total = total + expo.exp();
        }
        total
    }

    #[test]
    fn subset_sum_has_unit_empty_term_and_matches_frozen_value() {
        // N = 1, eps = 0.1, zero params, origin: 4 subsets, J = {} gives 1;
        // frozen independent oracle values for both r
        let s = build_spectral(1, 0.1f64).unwrap();
        let params = DeformationParams::zero(1, 53);
        let a1 = ThetaArgumentSet::new(&s, &params, Rsel::R1, 0.0, 0.0).unwrap();
        let t1 = theta_subset_sum(&a1).unwrap();
        assert!((t1.re + 0.04081632653061224).abs() < 1e-15 && t1.im.abs() < 1e-18);
        let a3 = ThetaArgumentSet::new(&s, &params, Rsel::R3, 0.0, 0.0).unwrap();
        let t3 = theta_subset_sum(&a3).unwrap();
        assert!((t3.re - 0.12081632653061224).abs() < 1e-15 && t3.im.abs() < 1e-15);
    }

    #[test]
    fn subset_sum_matches_second_enumerator() {
        // N = 2, eps = 0.05, zero params, (0.3, -0.2), plus frozen values
        let s = build_spectral(2, 0.05f64).unwrap();
        let params = DeformationParams::zero(2, 53);
        let a1 = ThetaArgumentSet::new(&s, &params, Rsel::R1, 0.3, -0.2).unwrap();
        let t1 = theta_subset_sum(&a1).unwrap();
        let v1 = theta_vector_form(&a1);
        assert!(relerr(&t1, &v1) < 1e-8, "rel {}", relerr(&t1, &v1));
        let frozen1 = Complex::new(-8.937427123906187e-5, -1.62009329383495e-5);
        assert!(relerr(&t1, &frozen1) < 1e-8);
        let a3 = ThetaArgumentSet::new(&s, &params, Rsel::R3, 0.3, -0.2).unwrap();
        let t3 = theta_subset_sum(&a3).unwrap();
        let frozen3 = Complex::new(4.913578091633662e-5, 1.573526686537056e-4);
        assert!(relerr(&t3, &frozen3) < 1e-8);
    }

    #[test]
    fn subset_sum_capacity_cap() {
        let s = build_spectral(7, 0.05f64).unwrap();
        let params = DeformationParams::zero(7, 53);
        let a = ThetaArgumentSet::new(&s, &params, Rsel::R1, 0.0, 0.0).unwrap();
        assert!(matches!(theta_subset_sum(&a), Err(Error::Capacity(_))));
    }

    #[test]
    fn zero_matrix_det_is_one() {
        let m = ComplexMatrix::<f64>::zeros(4, 53);
        let mut ipm = m;
        for i in 0..4 {
            ipm.set(i, i, Complex::new(1.0, 0.0));
        }
        let ld = ipm.logdet().unwrap();
        assert!(ld.log_mag().abs() < 1e-14 && ld.phase().abs() < 1e-14);
    }

    #[test]
    fn identity_chain_at_f64() {
        // theta = det(I+C) = det(I+D) = k_r(0) W_r(0) for a mildly deformed
        // N = 2 configuration at double precision
        let s = build_spectral(2, 0.08f64).unwrap();
        let params = DeformationParams::new(2, vec![0.7], vec![-0.4]).unwrap();
        for r in [Rsel::R1, Rsel::R3] {
            let args = ThetaArgumentSet::new(&s, &params, r, 0.3, -0.2).unwrap();
            let th = theta_subset_sum(&args).unwrap();
            let dc = fredholm_det(&args, FredholmVariant::C)
                .unwrap()
                .to_complex()
                .unwrap();
            let dd = fredholm_det(&args, FredholmVariant::D)
                .unwrap()
                .to_complex()
                .unwrap();
            let kw = k_prefactor(&args)
                .unwrap()
                .mul(&wronskian_det(&args).unwrap())
                .to_complex()
                .unwrap();
            assert!(relerr(&th, &dc) < 1e-9, "theta vs C: {}", relerr(&th, &dc));
            assert!(relerr(&th, &dd) < 1e-9, "theta vs D: {}", relerr(&th, &dd));
            assert!(relerr(&th, &kw) < 1e-8, "theta vs kW: {}", relerr(&th, &kw));
        }
    }

    #[test]
    fn wronskian_ratio_equals_fredholm_ratio() {
        // k_3(0) = k_1(0) under the fixed branch, so the two solution forms
        // must coincide
        let s = build_spectral(2, 0.06f64).unwrap();
        let params = DeformationParams::new(2, vec![1.1], vec![0.6]).unwrap();
        for (x, t) in [(0.4, 0.1), (-0.9, 0.55), (1.3, -0.8)] {
            let a1 = ThetaArgumentSet::new(&s, &params, Rsel::R1, x, t).unwrap();
            let a3 = ThetaArgumentSet::new(&s, &params, Rsel::R3, x, t).unwrap();
            let fred = log_ratio(
                &fredholm_det(&a3, FredholmVariant::D).unwrap(),
                &fredholm_det(&a1, FredholmVariant::D).unwrap(),
            )
            .unwrap();
            let wron =
                log_ratio(&wronskian_det(&a3).unwrap(), &wronskian_det(&a1).unwrap()).unwrap();
            assert!(relerr(&wron, &fred) < 1e-10, "rel {}", relerr(&wron, &fred));
            let k1 = k_prefactor(&a1).unwrap();
            let k3 = k_prefactor(&a3).unwrap();
            let kr = log_ratio(&k3, &k1).unwrap();
            assert!((kr.re - 1.0).abs() < 1e-10 && kr.im.abs() < 1e-10);
        }
    }

    #[test]
    fn wronskian_entries_match_y_finite_differences() {
        // the analytic (gamma, sin<->cos) derivative recursion against
        // first-principles central differences in y at h = 1e-6
        let s = build_spectral(2, 0.07f64).unwrap();
        let params = DeformationParams::new(2, vec![0.4], vec![-0.9]).unwrap();
        let args = ThetaArgumentSet::new(&s, &params, Rsel::R3, 0.6, -0.35).unwrap();
        let h = 1e-6;
        for nu in 1..=4usize {
            let th0 = args.theta_argument(nu);
            let gamma = s.point(nu).unwrap().gamma;
            let phi_at = |y: f64| -> Complex<f64> {
                let th = th0.clone() + Complex::new(gamma * y, 0.0);
                if nu <= 2 {
                    th.sin()
                } else {
                    th.cos()
                }
            };
            // first derivative: central difference vs analytic column mu = 2
            let fd1 = (phi_at(h) - phi_at(-h)).scale_f64(0.5 / h);
            let an1 = if nu <= 2 {
                th0.cos().scale_f64(gamma)
            } else {
                -th0.sin().scale_f64(gamma)
            };
            assert!((fd1 - an1.clone()).abs() < 1e-9 * an1.abs().max(1.0));
            // second derivative vs analytic column mu = 3
            let fd2 =
                (phi_at(h) - phi_at(0.0).scale_f64(2.0) + phi_at(-h)).scale_f64(1.0 / (h * h));
            let an2 = if nu <= 2 {
                -th0.sin().scale_f64(gamma * gamma)
            } else {
                -th0.cos().scale_f64(gamma * gamma)
            };
            assert!((fd2 - an2.clone()).abs() < 1e-3 * an2.abs().max(1.0));
        }
    }

    #[test]
    fn finite_eps_solution_satisfies_nls() {
        // the finite-eps Wronskian solution satisfies the equation
        let s = build_spectral(1, 0.05f64).unwrap();
        let params = DeformationParams::zero(1, 53);
        let eval = |x: &f64, t: &f64| wronskian_solution(&s, &params, &0.0, x, t);
        let grid = crate::degenerate::GridSpec::new(-1.0, 1.0, 7, -1.0, 1.0, 7).unwrap();
        let rep = crate::verify::nls_residual::<f64>(
            &eval,
            &grid,
            1e-3,
            crate::verify::StencilOrder::Fourth,
            53,
        );
        assert_eq!(rep.flagged_points, 0);
        assert!(
            rep.max_relative_residual < 1e-5,
            "{}",
            rep.max_relative_residual
        );
    }

    #[test]
    fn background_limit_along_x() {
        // |v| -> 1 as |x| grows, zero params, in the small-eps regime the
        // oracle is used in (the finite-eps family is x-periodic with period
        // ~ pi/(2 eps), so the modulation at fixed x only dies off with eps)
        let s = build_spectral(1, 0.01f64).unwrap();
        let params = DeformationParams::zero(1, 53);
        let v = wronskian_solution(&s, &params, &0.0, &50.0, &0.0).unwrap();
        assert!((v.abs() - 1.0).abs() < 1e-3, "{}", v.abs());
    }
}

//! The production solution engine: the eps -> 0 limit of the Wronskian ratio,
//! built directly from series coefficients.
//!
//! At a fixed (x, t), the 2N base column functions of each family are
//! truncated series in eps. Column k of the limit matrix holds the
//! (2k-2)-th eps-derivative of the base column at zero, so
//!
//! ```text
//! v(x, t) = exp(2it - i phase) * det(n) / det(d)
//! ```
//!
//! with the two matrices built from the sin-argument (numerator) and
//! zero-argument (denominator) families. Determinants run through the
//! log-domain pipeline.

use crate::complex::{log_ratio, Complex};
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::scalar::Real;
use crate::series::EpsSeries;
use crate::spectral::{e_coefficient_series, Representation, SolutionConfig};

/// Which trig-argument family a column uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// Arguments contain the x3 logarithm term (numerator).
    Phi,
    /// Arguments with x1 = 0 (denominator).
    Psi,
}

/// Which base column: point 1 or point N+1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BaseIndex {
    Lower,
    Upper,
}

/// The 2N series of one base column family at a fixed (x, t).
pub struct ColumnFamily<R: Real> {
    pub family: Family,
    pub base: BaseIndex,
    pub rows: Vec<EpsSeries<R>>,
}

/// Both limit matrices at one point.
pub struct DegenerateMatrices<R: Real> {
    pub n: ComplexMatrix<R>,
    pub d: ComplexMatrix<R>,
    pub at: (R, R),
}

/// Shared eps-series ingredients at one (x, t).
struct BaseSeries<R: Real> {
    gamma: EpsSeries<R>,
    /// (sin, cos) of the argument series, per (family, base).
    trig: [(EpsSeries<R>, EpsSeries<R>); 4],
}

fn trig_slot(family: Family, base: BaseIndex) -> usize {
    match (family, base) {
        (Family::Phi, BaseIndex::Lower) => 0,
        (Family::Phi, BaseIndex::Upper) => 1,
        (Family::Psi, BaseIndex::Lower) => 2,
        (Family::Psi, BaseIndex::Upper) => 3,
    }
}

fn build_base_series<R: Real>(config: &SolutionConfig<R>, x: &R, t: &R) -> Result<BaseSeries<R>> {
    let n = config.order;
    let prec = config.precision;
    // window: derivatives up to eps^{2N-2} plus two guard coefficients,
    // and one more to keep the guard intact through the x3 logarithm
    let window = 2 * n + 3;

    let one = EpsSeries::constant(Complex::from_f64s(1.0, 0.0, prec), window);
    let eps1 = EpsSeries::monomial(Complex::from_f64s(1.0, 0.0, prec), 1, window);
    let eps2 = EpsSeries::monomial(Complex::from_f64s(1.0, 0.0, prec), 2, window);
    let om = one.sub(&eps2); // 1 - eps^2
    let sq = om.sqrt()?; // (1 - eps^2)^{1/2}

    // gamma_1 = eps (1 - eps^2)^{-1/2}
    let gamma = eps1.mul(&sq.inv()?);
    // kappa_1 / 2 = 2 eps (1 - eps^2)^{1/2}
    let kap_half = eps1.mul(&sq).scale(&Complex::from_f64s(2.0, 0.0, prec));
    // i delta_1 = 4 i eps (1 - eps^2)^{1/2} (1 - 2 eps^2)
    let idelta = eps1
        .mul(&sq)
        .mul(&one.sub(&eps2.scale(&Complex::from_f64s(2.0, 0.0, prec))))
        .scale(&Complex::from_f64s(0.0, 4.0, prec));
    // -i x3_1 / 2 = -i ln((1 + i gamma)/(1 - i gamma))
    let ig = gamma.scale(&Complex::from_f64s(0.0, 1.0, prec));
    let log_term = one
        .add(&ig)
        .ln()?
        .sub(&one.sub(&ig).ln()?)
        .scale(&Complex::from_f64s(0.0, -1.0, prec));

    // -i e_1 / 2 = (a_1 + i b_1)/2 and -i e_{N+1} / 2 = (a_1 - i b_1)/2,
    // obtained from the e series by rotation
    let e_lower = e_coefficient_series(&config.params, 1, window, prec)?;
    let e_upper = e_coefficient_series(&config.params, n + 1, window, prec)?;
    let half_neg_i = Complex::from_f64s(0.0, -0.5, prec);
    let me_lower = e_lower.scale(&half_neg_i);
    let me_upper = e_upper.scale(&half_neg_i);

    let xs = Complex::from_re(x.clone());
    let ts = Complex::from_re(t.clone());
    let x_kap = kap_half.scale(&xs);
    let t_del = idelta.scale(&ts);

    // lower: +i delta t + log term; upper: -i delta t - log term
    let arg_phi_lower = x_kap.add(&t_del).add(&log_term).add(&me_lower);
    let arg_phi_upper = x_kap.sub(&t_del).sub(&log_term).add(&me_upper);
    let arg_psi_lower = x_kap.add(&t_del).add(&me_lower);
    let arg_psi_upper = x_kap.sub(&t_del).add(&me_upper);

    Ok(BaseSeries {
        gamma,
        trig: [
            arg_phi_lower.sin_cos()?,
            arg_phi_upper.sin_cos()?,
            arg_psi_lower.sin_cos()?,
            arg_psi_upper.sin_cos()?,
        ],
    })
}

fn rows_from_base<R: Real>(
    base: &BaseSeries<R>,
    n: usize,
    family: Family,
    which: BaseIndex,
) -> Result<Vec<EpsSeries<R>>> {
    let (sin_a, cos_a) = &base.trig[trig_slot(family, which)];
    let mut rows = Vec::with_capacity(2 * n);
    for j in 1..=(2 * n) {
        let m = (j - 1) / 4;
        let case = (j - 1) % 4;
        // gamma powers of the four-row cycle; the upper base runs the
        // mirrored power ladder
        let row = match which {
            BaseIndex::Lower => match case {
                0 => base.gamma.powi(4 * m as i32 - 1)?.mul(sin_a),
                1 => base.gamma.powi(4 * m as i32)?.mul(cos_a),
                2 => base.gamma.powi(4 * m as i32 + 1)?.mul(sin_a).neg(),
                _ => base.gamma.powi(4 * m as i32 + 2)?.mul(cos_a).neg(),
            },
            BaseIndex::Upper => {
                let nn = 2 * n as i32;
                let mm = 4 * m as i32;
                match case {
                    0 => base.gamma.powi(nn - mm - 2)?.mul(cos_a),
                    1 => base.gamma.powi(nn - mm - 3)?.mul(sin_a).neg(),
                    2 => base.gamma.powi(nn - mm - 4)?.mul(cos_a).neg(),
                    _ => base.gamma.powi(nn - mm - 5)?.mul(sin_a),
                }
            }
        };
        if !row.is_zero() && row.valuation() < 0 {
            return Err(Error::NegativeValuation {
                valuation: row.valuation(),
            });
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Build one base column family; every row series must come out analytic at
/// zero (the gamma poles cancel against vanishing trig factors).
pub fn build_column_family<R: Real>(
    config: &SolutionConfig<R>,
    x: &R,
    t: &R,
    family: Family,
    base: BaseIndex,
) -> Result<ColumnFamily<R>> {
    let bs = build_base_series(config, x, t)?;
    Ok(ColumnFamily {
        family,
        base,
        rows: rows_from_base(&bs, config.order, family, base)?,
    })
}

/// Build both 2N x 2N limit matrices at (x, t).
pub fn build_matrices<R: Real>(
    config: &SolutionConfig<R>,
    x: &R,
    t: &R,
) -> Result<DegenerateMatrices<R>> {
    let n = config.order;
    let prec = config.precision;
    let bs = build_base_series(config, x, t)?;
    let phi_lower = rows_from_base(&bs, n, Family::Phi, BaseIndex::Lower)?;
    let phi_upper = rows_from_base(&bs, n, Family::Phi, BaseIndex::Upper)?;
    let psi_lower = rows_from_base(&bs, n, Family::Psi, BaseIndex::Lower)?;
    let psi_upper = rows_from_base(&bs, n, Family::Psi, BaseIndex::Upper)?;

    let mut nm = ComplexMatrix::zeros(2 * n, prec);
    let mut dm = ComplexMatrix::zeros(2 * n, prec);
    for j in 0..(2 * n) {
        for k in 1..=n {
            let ord = 2 * k - 2;
            nm.set(j, k - 1, phi_lower[j].derivative_at_zero(ord)?);
            nm.set(j, n + k - 1, phi_upper[j].derivative_at_zero(ord)?);
            dm.set(j, k - 1, psi_lower[j].derivative_at_zero(ord)?);
            dm.set(j, n + k - 1, psi_upper[j].derivative_at_zero(ord)?);
        }
    }
    Ok(DegenerateMatrices {
        n: nm,
        d: dm,
        at: (x.clone(), t.clone()),
    })
}

/// Bits of cancellation allowed in the denominator determinant before the
/// evaluation reports precision exhaustion: the working precision minus 40
/// guard bits, floored so routine structured cancellation at double
/// precision does not false-alarm.
fn loss_threshold_bits(prec: u32) -> f64 {
    ((prec as f64) - 40.0).max(45.0)
}

/// v(x, t) = exp(2it - i phase) det(n)/det(d).
pub fn evaluate<R: Real>(config: &SolutionConfig<R>, x: &R, t: &R) -> Result<Complex<R>> {
    let mats = build_matrices(config, x, t)?;
    let ld_n = mats.n.logdet()?;
    let (ld_d, lost_bits) = mats.d.logdet_with_loss()?;
    if ld_d.is_zero() || lost_bits > loss_threshold_bits(config.precision) {
        return Err(Error::PoleProximity {
            logdet_n: ld_n.log_mag().to_f64(),
            logdet_d: ld_d.log_mag().to_f64(),
            lost_bits,
        });
    }
    let ratio = log_ratio(&ld_n, &ld_d)?;
    let ang = x.lift(2.0) * t.clone() - config.phase.clone();
    let (s, c) = ang.sin_cos();
    Ok(ratio * Complex::new(c, s))
}

/// Evaluate through the representation selected in the config: the
/// degenerate path, or the finite-eps Wronskian oracle.
pub fn evaluate_solution<R: Real>(config: &SolutionConfig<R>, x: &R, t: &R) -> Result<Complex<R>> {
    match config.representation {
        Representation::Degenerate => evaluate(config, x, t),
        Representation::FiniteEps => {
            let eps = config.epsilon.clone().ok_or_else(|| {
                Error::Domain("finite-eps representation requires an epsilon".into())
            })?;
            let scheme = crate::spectral::build_spectral(config.order, eps)?;
            crate::oracle::wronskian_solution(&scheme, &config.params, &config.phase, x, t)
        }
    }
}

/// Inclusive sampling grid.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    pub t_min: f64,
    pub t_max: f64,
    pub nt: usize,
}

impl GridSpec {
    pub fn new(
        x_min: f64,
        x_max: f64,
        nx: usize,
        t_min: f64,
        t_max: f64,
        nt: usize,
    ) -> Result<Self> {
        if nx == 0 || nt == 0 {
            return Err(Error::Domain("grid resolution must be positive".into()));
        }
        if !(x_min.is_finite() && x_max.is_finite() && t_min.is_finite() && t_max.is_finite()) {
            return Err(Error::Domain("grid extents must be finite".into()));
        }
        if x_min > x_max || t_min > t_max {
            return Err(Error::Domain("grid extents must be ordered".into()));
        }
        Ok(GridSpec {
            x_min,
            x_max,
            nx,
            t_min,
            t_max,
            nt,
        })
    }

    pub fn x_values(&self) -> Vec<f64> {
        axis(self.x_min, self.x_max, self.nx)
    }

    pub fn t_values(&self) -> Vec<f64> {
        axis(self.t_min, self.t_max, self.nt)
    }
}

fn axis(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    // interpolated form so both endpoints are hit exactly
    let n = (count - 1) as f64;
    (0..count)
        .map(|i| {
            let w = i as f64 / n;
            lo * (1.0 - w) + hi * w
        })
        .collect()
}

/// Sample the solution over a grid. Per-point failures are flagged, not
/// fatal; failed samples carry NaN.
pub fn evaluate_grid<R: Real>(
    config: &SolutionConfig<R>,
    grid: &GridSpec,
) -> crate::field::WaveField<R> {
    evaluate_grid_threaded(config, grid, 1)
}

type RowResult<R> = Vec<std::result::Result<Complex<R>, ()>>;

/// Grid sampling with the rows distributed over worker threads. Points are
/// independent pure evaluations; assembly order is deterministic regardless
/// of the thread count.
pub fn evaluate_grid_threaded<R: Real>(
    config: &SolutionConfig<R>,
    grid: &GridSpec,
    threads: usize,
) -> crate::field::WaveField<R> {
    let xs = grid.x_values();
    let ts = grid.t_values();
    let prec = config.precision;
    let row = |t: f64| -> RowResult<R> {
        let tr = R::from_f64_prec(t, prec);
        xs.iter()
            .map(|x| {
                let xr = R::from_f64_prec(*x, prec);
                evaluate_solution(config, &xr, &tr).map_err(|_| ())
            })
            .collect()
    };
    let rows: Vec<RowResult<R>> = if threads <= 1 || ts.len() == 1 {
        ts.iter().map(|t| row(*t)).collect()
    } else {
        let workers = threads.min(ts.len());
        let next = std::sync::atomic::AtomicUsize::new(0);
        let mut slots: Vec<Option<RowResult<R>>> = (0..ts.len()).map(|_| None).collect();
        let slot_refs = std::sync::Mutex::new(&mut slots);
        std::thread::scope(|scope| {
            for _ in 0..workers {
                scope.spawn(|| loop {
                    let it = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                    if it >= ts.len() {
                        break;
                    }
                    let r = row(ts[it]);
                    slot_refs.lock().unwrap()[it] = Some(r);
                });
            }
        });
        slots
            .into_iter()
            .map(|s| s.expect("row computed"))
            .collect()
    };
    let mut values = Vec::with_capacity(xs.len() * ts.len());
    let mut flagged = Vec::new();
    for (it, r) in rows.into_iter().enumerate() {
        for (ix, v) in r.into_iter().enumerate() {
            match v {
                Ok(v) => values.push(v),
                Err(()) => {
                    flagged.push((ix, it));
                    values.push(Complex::from_f64s(f64::NAN, f64::NAN, prec));
                }
            }
        }
    }
    crate::field::WaveField::assemble(config, grid.clone(), values, flagged)
}

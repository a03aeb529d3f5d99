//! Sequence generators, contraction criteria, tameness proxies and the
//! multidimensional fourth-moment experiment.
//!
//! Limits cannot be observed numerically, so convergence is judged on a
//! finite grid of `k` values: every tracked gap must be non-increasing along
//! the grid and the largest gap at the last `k` must fall under a threshold.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{argument, Error, Result};
use crate::kernels::{GridSpec, StepKernel, SYMMETRY_TOL};
use crate::moments::{
    diagram_moment_by_class, expect_real, semicircular_family_moment, CovarianceMatrix,
    DEFAULT_BUDGET,
};
use crate::scalar::Real;

/// Slack allowed when comparing consecutive gaps for monotonicity.
pub const MONOTONE_SLACK: f64 = 1e-12;
/// Default threshold on the largest gap at the last `k`.
pub const DEFAULT_FINAL_GAP: f64 = 0.05;
/// Default cap on the mixed-moment word length.
pub const DEFAULT_MAX_WORD_LENGTH: usize = 6;

fn check_mirror<T: Real>(f: &StepKernel<T>) -> Result<()> {
    let tol = T::lit(SYMMETRY_TOL) * T::one().max(f.max_abs());
    if !f.is_mirror_symmetric(tol) {
        return Err(Error::Precondition("kernel is not mirror-symmetric".into()));
    }
    Ok(())
}

/// Norm of one contraction `contract(f, f, integrated, identified)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ContractionNorm<T: Real> {
    pub integrated: usize,
    pub identified: usize,
    pub norm: T,
}

/// The contraction norms whose vanishing characterises the semicircular
/// limit of `I_n(f_k)`: arcs `f ⌢_l f` for `1 <= l <= n-1` and stars
/// `contract(f, f, q, 1)` for `0 <= q <= n-1`, ordered by `(l, p)`.
pub fn contraction_criteria<T: Real>(f: &StepKernel<T>) -> Result<Vec<ContractionNorm<T>>> {
    let n = f.arity();
    if n == 0 {
        return argument("contraction criteria need arity at least 1");
    }
    check_mirror(f)?;
    let mut keys: Vec<(usize, usize)> = (1..n)
        .map(|l| (l, 0))
        .chain((0..n).map(|q| (q, 1)))
        .collect();
    keys.sort_unstable();
    keys.into_iter()
        .map(|(l, p)| {
            Ok(ContractionNorm {
                integrated: l,
                identified: p,
                norm: f.contract(f, l, p)?.norm(),
            })
        })
        .collect()
}

/// `k^{-1/2} 1_{[0,k)}` on unit cells; unit norm.
pub fn generate_indicator_family<T: Real>(k: usize) -> Result<StepKernel<T>> {
    if k == 0 {
        return argument("k must be at least 1");
    }
    let w = T::from_count(k).sqrt().recip();
    StepKernel::from_real_entries(1, GridSpec::unit(k)?, (0..k).map(|i| (vec![i], w)))
}

/// `(2k)^{-1/2} Σ_{j=1}^{k} (e_j ⊗ e_{j+k}^{⊗(n-1)} + e_{j+k}^{⊗(n-1)} ⊗ e_j)`
/// with `e_j = 1_{[j-1, j)}`, on `2k` unit cells. Mirror-symmetric with unit
/// norm; its contractions decay like `k^{-1/2}`.
pub fn generate_shifted_block_family<T: Real>(n: usize, k: usize) -> Result<StepKernel<T>> {
    if n < 2 {
        return argument("shifted-block family needs order at least 2");
    }
    if k == 0 {
        return argument("k must be at least 1");
    }
    let w = T::from_count(2 * k).sqrt().recip();
    let mut entries = Vec::with_capacity(2 * k);
    for j in 0..k {
        let mut fwd = vec![j + k; n];
        fwd[0] = j;
        let mut bwd = vec![j + k; n];
        bwd[n - 1] = j;
        entries.push((fwd, w));
        entries.push((bwd, w));
    }
    StepKernel::from_real_entries(n, GridSpec::unit(2 * k)?, entries)
}

/// `coeff · k^exponent`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct PowerLaw<T: Real> {
    pub coeff: T,
    pub exponent: T,
}

impl<T: Real> PowerLaw<T> {
    pub fn new(coeff: T, exponent: T) -> Self {
        Self { coeff, exponent }
    }

    pub fn constant(c: T) -> Self {
        Self::new(c, T::zero())
    }

    pub fn eval(&self, k: usize) -> T {
        self.coeff * T::from_count(k).powf(self.exponent)
    }
}

/// Sup bound `M_k`, support radius `z_k` and band width `α_k` of a
/// hyperdiagonal sequence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct TamedParams<T: Real> {
    #[serde(rename = "M")]
    pub sup_bound: PowerLaw<T>,
    #[serde(rename = "z")]
    pub support: PowerLaw<T>,
    #[serde(rename = "alpha")]
    pub band: PowerLaw<T>,
    #[serde(default = "default_p_max")]
    pub p_max: usize,
}

fn default_p_max() -> usize {
    6
}

/// Height `M(k)` on the diagonal cells `(c, .., c)` of a grid with cell
/// width `α(k)` and `floor(z(k)/α(k))` cells. The kernel vanishes whenever two
/// arguments are more than `α(k)` apart and is supported in `[0, z(k))^n`.
pub fn generate_hyperdiagonal_family<T: Real>(
    n: usize,
    params: &TamedParams<T>,
    k: usize,
) -> Result<StepKernel<T>> {
    if n == 0 {
        return argument("order must be at least 1");
    }
    let (m, z, alpha) = (
        params.sup_bound.eval(k),
        params.support.eval(k),
        params.band.eval(k),
    );
    if !(alpha > T::zero() && z > T::zero() && m > T::zero()) {
        return argument(format!("parameters must be positive at k={k}"));
    }
    if alpha > z {
        return argument(format!("band width {alpha} exceeds support {z} at k={k}"));
    }
    // tolerate rounding in z/α when the ratio is an integer
    let cells = (z / alpha * (T::one() + T::lit(1e-12)))
        .floor()
        .to_usize()
        .ok_or_else(|| Error::Argument("cell count overflow".into()))?;
    let grid = GridSpec::new(alpha, cells.max(1))?;
    StepKernel::from_real_entries(n, grid, (0..cells).map(|c| (vec![c; n], m)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct TamenessReport<T: Real> {
    pub k_values: Vec<usize>,
    /// `α(k)/z(k)` along the range.
    pub band_ratio: Vec<T>,
    pub band_ratio_decreasing: bool,
    /// `(p, M^p z α^{p-1} along the range)` for `p = 2..=p_max`.
    pub growth: Vec<(usize, Vec<T>)>,
    /// Log-log slope of each growth sequence over the upper half of the range.
    pub growth_slope: Vec<(usize, T)>,
    pub violations: Vec<String>,
    pub pass: bool,
    /// Always true: these are finite-range proxies, not certificates.
    pub proxy: bool,
}

/// Finite-range proxy for the hyperdiagonal sufficient condition: `α/z`
/// must decrease along the range and each `M^p z α^{p-1}` must not grow
/// (log-log slope over the upper half of the range at most `1e-9`).
pub fn check_tamed_sufficient<T: Real>(
    params: &TamedParams<T>,
    ks: &[usize],
) -> Result<TamenessReport<T>> {
    if ks.is_empty() {
        return argument("empty k range");
    }
    if ks.windows(2).any(|w| w[0] >= w[1]) || ks[0] == 0 {
        return argument("k range must be positive and strictly increasing");
    }
    let mut violations = Vec::new();
    let band_ratio: Vec<T> = ks
        .iter()
        .map(|&k| params.band.eval(k) / params.support.eval(k))
        .collect();
    let band_ratio_decreasing =
        band_ratio.windows(2).all(|w| w[1] < w[0]) && (ks.len() > 1 || band_ratio[0] <= T::one());
    if !band_ratio_decreasing {
        violations.push("alpha/z is not decreasing".to_string());
    }

    let lo = ks.len() / 2;
    let hi = ks.len() - 1;
    let mut growth = Vec::new();
    let mut growth_slope = Vec::new();
    for p in 2..=params.p_max.max(2) {
        let values: Vec<T> = ks
            .iter()
            .map(|&k| {
                let (m, z, a) = (
                    params.sup_bound.eval(k),
                    params.support.eval(k),
                    params.band.eval(k),
                );
                m.powi(p as i32) * z * a.powi(p as i32 - 1)
            })
            .collect();
        let slope = if hi > lo {
            (values[hi].ln() - values[lo].ln())
                / (T::from_count(ks[hi]).ln() - T::from_count(ks[lo]).ln())
        } else {
            T::zero()
        };
        if !(slope <= T::lit(1e-9)) || values.iter().any(|v| !v.is_finite()) {
            violations.push(format!("M^{p} z alpha^{} grows (slope {slope})", p - 1));
        }
        growth.push((p, values));
        growth_slope.push((p, slope));
    }
    Ok(TamenessReport {
        k_values: ks.to_vec(),
        band_ratio,
        band_ratio_decreasing,
        growth,
        growth_slope,
        pass: violations.is_empty(),
        violations,
        proxy: true,
    })
}

/// `φ[I_n(f)^4] - 2 σ^4`.
pub fn fourth_moment_gap<T: Real>(f: &StepKernel<T>, target_var: T) -> Result<T> {
    fourth_moment_gap_budgeted(f, target_var, DEFAULT_BUDGET)
}

fn fourth_moment_gap_budgeted<T: Real>(f: &StepKernel<T>, target_var: T, budget: u64) -> Result<T> {
    check_mirror(f)?;
    if f.arity() == 0 {
        return argument("fourth moment needs arity at least 1");
    }
    let ks = vec![f.clone(), f.clone(), f.clone(), f.clone()];
    let m = expect_real(diagram_moment_by_class(&ks, budget)?.value)?;
    Ok(m - T::lit(2.0) * target_var * target_var)
}

/// A named generator `k ↦ f_k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct SequenceFamily<T: Real> {
    pub name: String,
    pub order: usize,
    #[serde(default)]
    pub params: Option<TamedParams<T>>,
    /// Limit of `‖f_k‖²`.
    #[serde(default = "one")]
    pub variance: T,
}

fn one<T: Real>() -> T {
    T::one()
}

impl<T: Real> SequenceFamily<T> {
    pub fn indicator() -> Self {
        Self {
            name: "indicator".into(),
            order: 1,
            params: None,
            variance: T::one(),
        }
    }

    pub fn shifted_block(order: usize) -> Self {
        Self {
            name: "shifted_block".into(),
            order,
            params: None,
            variance: T::one(),
        }
    }

    pub fn hyperdiagonal(order: usize, params: TamedParams<T>, variance: T) -> Self {
        Self {
            name: "hyperdiagonal".into(),
            order,
            params: Some(params),
            variance,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.name.as_str() {
            "indicator" if self.order != 1 => argument("indicator family has order 1"),
            "shifted_block" if self.order < 2 => argument("shifted_block family needs order >= 2"),
            "hyperdiagonal" if self.params.is_none() => {
                argument("hyperdiagonal family needs params")
            }
            "indicator" | "shifted_block" | "hyperdiagonal" => Ok(()),
            other => argument(format!("unknown family '{other}'")),
        }
    }

    /// `f_k`, checked to be mirror-symmetric.
    pub fn generate(&self, k: usize) -> Result<StepKernel<T>> {
        self.validate()?;
        let f = match self.name.as_str() {
            "indicator" => generate_indicator_family(k)?,
            "shifted_block" => generate_shifted_block_family(self.order, k)?,
            _ => generate_hyperdiagonal_family(
                self.order,
                self.params.as_ref().expect("validated"),
                k,
            )?,
        };
        check_mirror(&f)?;
        Ok(f)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ExperimentConfig<T: Real> {
    pub families: Vec<SequenceFamily<T>>,
    pub covariance: CovarianceMatrix<T>,
    pub k_values: Vec<usize>,
    #[serde(default = "default_word_length")]
    pub max_word_length: usize,
    /// Threshold on the largest gap at the last `k`.
    #[serde(default = "default_final_gap")]
    pub final_gap: T,
    #[serde(default = "default_budget")]
    pub budget: u64,
}

fn default_word_length() -> usize {
    DEFAULT_MAX_WORD_LENGTH
}

fn default_final_gap<T: Real>() -> T {
    T::lit(DEFAULT_FINAL_GAP)
}

fn default_budget() -> u64 {
    DEFAULT_BUDGET
}

impl<T: Real> ExperimentConfig<T> {
    pub fn new(
        families: Vec<SequenceFamily<T>>,
        covariance: CovarianceMatrix<T>,
        k_values: Vec<usize>,
    ) -> Self {
        Self {
            families,
            covariance,
            k_values,
            max_word_length: DEFAULT_MAX_WORD_LENGTH,
            final_gap: T::lit(DEFAULT_FINAL_GAP),
            budget: DEFAULT_BUDGET,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.families.is_empty() {
            return argument("at least one family is required");
        }
        for f in &self.families {
            f.validate()?;
        }
        if self.covariance.dim() != self.families.len() {
            return argument(format!(
                "covariance is {}x{} for {} families",
                self.covariance.dim(),
                self.covariance.dim(),
                self.families.len()
            ));
        }
        if self.k_values.is_empty() {
            return argument("k_values is empty");
        }
        if self.k_values[0] == 0 || self.k_values.windows(2).any(|w| w[0] >= w[1]) {
            return argument("k_values must be positive and strictly increasing");
        }
        if self.max_word_length < 2 {
            return argument("max_word_length must be at least 2");
        }
        Ok(())
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(s)?;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Measured value, target and gap of one tracked quantity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Measurement<T: Real> {
    /// 1-based labels, e.g. `"1,2"` for a covariance or `"1,2,1,2"` for a word.
    pub key: String,
    pub measured: T,
    pub target: T,
    pub gap: T,
}

impl<T: Real> Measurement<T> {
    fn new(key: String, measured: T, target: T) -> Self {
        Self {
            key,
            measured,
            target,
            gap: (measured - target).abs(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ReportRow<T: Real> {
    pub k: usize,
    pub covariance: Vec<Measurement<T>>,
    pub fourth_moments: Vec<Measurement<T>>,
    /// Per family, the contraction-norm table (target 0).
    pub contractions: Vec<Vec<ContractionNorm<T>>>,
    pub mixed_moments: Vec<Measurement<T>>,
    pub max_gap: T,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Verdict<T: Real> {
    pub covariance_decreasing: bool,
    pub fourth_moment_decreasing: bool,
    pub mixed_moment_decreasing: bool,
    pub contractions_decreasing: bool,
    pub final_max_gap: T,
    pub final_gap_threshold: T,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ConvergenceReport<T: Real> {
    pub rows: Vec<ReportRow<T>>,
    pub verdict: Verdict<T>,
}

/// Header line of the CSV report.
pub const CSV_VERSION_LINE: &str = "# freechaos-report v1";

impl<T: Real> ConvergenceReport<T> {
    /// One line per `(k, quantity, key)` after a versioned comment line.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["k", "quantity", "key", "measured", "target", "gap"])?;
        for row in &self.rows {
            let k = row.k.to_string();
            let mut emit = |quantity: &str, m: &Measurement<T>| {
                w.write_record([
                    k.as_str(),
                    quantity,
                    m.key.as_str(),
                    &m.measured.to_string(),
                    &m.target.to_string(),
                    &m.gap.to_string(),
                ])
            };
            for m in &row.covariance {
                emit("covariance", m)?;
            }
            for m in &row.fourth_moments {
                emit("fourth_moment", m)?;
            }
            for (i, table) in row.contractions.iter().enumerate() {
                for c in table {
                    let m = Measurement::new(
                        format!("{}:{},{}", i + 1, c.integrated, c.identified),
                        c.norm,
                        T::zero(),
                    );
                    emit("contraction", &m)?;
                }
            }
            for m in &row.mixed_moments {
                emit("mixed_moment", m)?;
            }
            emit(
                "max_gap",
                &Measurement::new(String::new(), row.max_gap, T::zero()),
            )?;
        }
        let body = String::from_utf8(w.into_inner().map_err(|e| e.into_error())?)
            .expect("csv output is utf-8");
        let mut out = String::with_capacity(body.len() + CSV_VERSION_LINE.len() + 1);
        writeln!(out, "{CSV_VERSION_LINE}").expect("write to string");
        out.push_str(&body);
        Ok(out)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// All words over `0..d` of length `1..=max_len`, shortest first, each
/// length in lexicographic order.
pub fn words(d: usize, max_len: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut layer: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|w| {
                (0..d).map(move |i| {
                    let mut v = w.clone();
                    v.push(i);
                    v
                })
            })
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

fn key_of(word: &[usize]) -> String {
    word.iter()
        .map(|i| (i + 1).to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// Kernels of all families at `k`, moved onto the widest common grid.
/// Families must agree on the cell width.
pub fn family_kernels<T: Real>(
    families: &[SequenceFamily<T>],
    k: usize,
) -> Result<Vec<StepKernel<T>>> {
    let ks = families
        .iter()
        .map(|f| f.generate(k))
        .collect::<Result<Vec<_>>>()?;
    let h = ks[0].grid().cell_width();
    if let Some(bad) = ks.iter().find(|f| f.grid().cell_width() != h) {
        return Err(Error::GridMismatch(format!(
            "families at k={k} use cell widths {h} and {}",
            bad.grid().cell_width()
        )));
    }
    let m = ks
        .iter()
        .map(|f| f.grid().cell_count())
        .max()
        .expect("non-empty");
    ks.iter().map(|f| f.extend_grid(m)).collect()
}

fn real_moment<T: Real>(ks: &[StepKernel<T>], budget: u64) -> Result<T> {
    expect_real(diagram_moment_by_class(ks, budget)?.value)
}

/// Non-increasing along the sequence, up to [`MONOTONE_SLACK`].
pub fn non_increasing<T: Real>(gaps: &[T]) -> bool {
    gaps.windows(2)
        .all(|w| w[1] <= w[0] + T::lit(MONOTONE_SLACK))
}

/// Runs the experiment: at each `k`, covariances, fourth moments, contraction
/// norms and every mixed moment of word length up to `max_word_length`,
/// each compared with its semicircular target.
pub fn run_fmt_experiment<T: Real>(cfg: &ExperimentConfig<T>) -> Result<ConvergenceReport<T>> {
    cfg.validate()?;
    let d = cfg.families.len();
    let c = &cfg.covariance;
    let all_words = words(d, cfg.max_word_length);
    let mut rows = Vec::with_capacity(cfg.k_values.len());

    for &k in &cfg.k_values {
        let ks = family_kernels(&cfg.families, k)?;

        let mut covariance = Vec::new();
        for i in 0..d {
            for j in i..d {
                let v = real_moment(&[ks[i].clone(), ks[j].clone()], cfg.budget)?;
                covariance.push(Measurement::new(key_of(&[i, j]), v, c.get(i, j)));
            }
        }

        let mut fourth_moments = Vec::with_capacity(d);
        for (i, f) in ks.iter().enumerate() {
            let gap = fourth_moment_gap_budgeted(f, T::zero(), cfg.budget)?;
            let target = T::lit(2.0) * c.get(i, i) * c.get(i, i);
            fourth_moments.push(Measurement::new((i + 1).to_string(), gap, target));
        }

        let contractions = ks
            .iter()
            .map(contraction_criteria)
            .collect::<Result<Vec<_>>>()?;

        let mixed_moments = all_words
            .par_iter()
            .map(|word| {
                let word_kernels: Vec<StepKernel<T>> =
                    word.iter().map(|&i| ks[i].clone()).collect();
                let measured = real_moment(&word_kernels, cfg.budget)?;
                let target = semicircular_family_moment(c, word)?;
                Ok(Measurement::new(key_of(word), measured, target))
            })
            .collect::<Result<Vec<_>>>()?;

        let max_gap = covariance
            .iter()
            .chain(&fourth_moments)
            .chain(&mixed_moments)
            .fold(T::zero(), |m, x| m.max(x.gap));

        rows.push(ReportRow {
            k,
            covariance,
            fourth_moments,
            contractions,
            mixed_moments,
            max_gap,
        });
    }

    let series_ok = |pick: &dyn Fn(&ReportRow<T>) -> Vec<T>| {
        let per_row: Vec<Vec<T>> = rows.iter().map(pick).collect();
        (0..per_row[0].len()).all(|q| {
            let s: Vec<T> = per_row.iter().map(|r| r[q]).collect();
            non_increasing(&s)
        })
    };
    let covariance_decreasing = series_ok(&|r| r.covariance.iter().map(|m| m.gap).collect());
    let fourth_moment_decreasing = series_ok(&|r| r.fourth_moments.iter().map(|m| m.gap).collect());
    let mixed_moment_decreasing = series_ok(&|r| r.mixed_moments.iter().map(|m| m.gap).collect());
    let contractions_decreasing =
        series_ok(&|r| r.contractions.iter().flatten().map(|c| c.norm).collect());
    let final_max_gap = rows.last().expect("k_values non-empty").max_gap;
    let pass = covariance_decreasing
        && fourth_moment_decreasing
        && mixed_moment_decreasing
        && contractions_decreasing
        && final_max_gap <= cfg.final_gap;
    Ok(ConvergenceReport {
        rows,
        verdict: Verdict {
            covariance_decreasing,
            fourth_moment_decreasing,
            mixed_moment_decreasing,
            contractions_decreasing,
            final_max_gap,
            final_gap_threshold: cfg.final_gap,
            pass,
        },
    })
}

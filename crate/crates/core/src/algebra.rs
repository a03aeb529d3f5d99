//! Finite chaos expansions `Σ_n I_n(f_n)` with the free Poisson product
//! rule
//!
//! ```text
//! I_n(f) I_m(g) = Σ_{p=0}^{n∧m} I_{n+m-2p}(f ⌢_p g) + Σ_{p=1}^{n∧m} I_{n+m-2p+1}(f ⋆_p g)
//! ```
//!
//! and the state `φ`, which keeps the order-0 coefficient. Moments computed
//! here never touch partitions, so they serve as an independent check on the
//! diagram formula in [`crate::moments`].

use std::collections::BTreeMap;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{argument, Error, Result};
use crate::kernels::{GridFile, GridSpec, KernelFile, StepKernel};
use crate::scalar::Real;

/// Highest chaos order a product may reach.
pub const ORDER_CAPACITY: usize = 16;

#[derive(Clone, Debug, PartialEq)]
pub struct ChaosExpansion<T: Real> {
    grid: GridSpec<T>,
    terms: BTreeMap<usize, StepKernel<T>>,
}

impl<T: Real> ChaosExpansion<T> {
    pub fn zero(grid: GridSpec<T>) -> Self {
        Self {
            grid,
            terms: BTreeMap::new(),
        }
    }

    /// The unit `1 = I_0(1)`.
    pub fn one(grid: GridSpec<T>) -> Self {
        Self::constant(grid, Complex::new(T::one(), T::zero()))
    }

    pub fn constant(grid: GridSpec<T>, c: Complex<T>) -> Self {
        Self::from_kernel(StepKernel::scalar(grid, c))
    }

    /// The single term `I_n(f)`.
    pub fn from_kernel(f: StepKernel<T>) -> Self {
        let mut x = Self::zero(*f.grid());
        if !f.is_zero() {
            x.terms.insert(f.arity(), f);
        }
        x
    }

    pub fn grid(&self) -> &GridSpec<T> {
        &self.grid
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Highest order present; `None` for the zero expansion.
    pub fn max_order(&self) -> Option<usize> {
        self.terms.keys().next_back().copied()
    }

    pub fn term(&self, order: usize) -> Option<&StepKernel<T>> {
        self.terms.get(&order)
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, &StepKernel<T>)> + '_ {
        self.terms.iter().map(|(&n, f)| (n, f))
    }

    fn accumulate(&mut self, f: StepKernel<T>) -> Result<()> {
        if f.is_zero() {
            return Ok(());
        }
        let order = f.arity();
        let merged = match self.terms.remove(&order) {
            Some(existing) => existing.add(&f)?,
            None => f,
        };
        if !merged.is_zero() {
            self.terms.insert(order, merged);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        let mut out = self.clone();
        for f in other.terms.values() {
            out.accumulate(f.clone())?;
        }
        Ok(out)
    }

    pub fn scale(&self, c: Complex<T>) -> Self {
        let mut out = Self::zero(self.grid);
        for f in self.terms.values() {
            let g = f.scale(c);
            if !g.is_zero() {
                out.terms.insert(g.arity(), g);
            }
        }
        out
    }

    /// Drops every term of order above `max`.
    pub fn truncate(&self, max: usize) -> Self {
        Self {
            grid: self.grid,
            terms: self
                .terms
                .range(..=max)
                .map(|(&n, f)| (n, f.clone()))
                .collect(),
        }
    }

    /// Product by the bilinear extension of the product rule.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        if let (Some(a), Some(b)) = (self.max_order(), other.max_order()) {
            if a + b > ORDER_CAPACITY {
                return Err(Error::Capacity {
                    what: "product order",
                    size: a + b,
                    limit: ORDER_CAPACITY,
                });
            }
        }
        let mut out = Self::zero(self.grid);
        for (&n, f) in &self.terms {
            for (&m, g) in &other.terms {
                for h in product_terms(f, n, g, m)? {
                    out.accumulate(h)?;
                }
            }
        }
        Ok(out)
    }

    /// `I_n(f)* = I_n(f*)` term by term.
    pub fn involution(&self) -> Self {
        Self {
            grid: self.grid,
            terms: self.terms.iter().map(|(&n, f)| (n, f.adjoint())).collect(),
        }
    }

    /// The state: multiple integrals of order at least one are centred, so
    /// only the constant term survives.
    pub fn phi(&self) -> Complex<T> {
        self.terms
            .get(&0)
            .map(|f| f.get(&[]))
            .unwrap_or_else(|| Complex::new(T::zero(), T::zero()))
    }

    /// Largest coefficient distance between two expansions.
    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        self.grid.check_same(&other.grid)?;
        let mut d = T::zero();
        let orders: std::collections::BTreeSet<usize> = self
            .terms
            .keys()
            .chain(other.terms.keys())
            .copied()
            .collect();
        for n in orders {
            let zero = StepKernel::zero(n, self.grid);
            let a = self.terms.get(&n).unwrap_or(&zero);
            let b = other.terms.get(&n).unwrap_or(&zero);
            d = d.max(a.max_abs_diff(b)?);
        }
        Ok(d)
    }
}

impl<T: Real> ChaosExpansion<T> {
    pub fn to_file(&self) -> ExpansionFile {
        ExpansionFile {
            grid: GridFile {
                h: self.grid.cell_width().as_f64(),
                m: self.grid.cell_count(),
            },
            terms: self.terms.values().map(StepKernel::to_file).collect(),
        }
    }

    /// Every term must sit on the file's grid; repeated orders are summed.
    pub fn from_file(file: &ExpansionFile) -> Result<Self> {
        let grid = GridSpec::new(T::lit(file.grid.h), file.grid.m)?;
        let mut out = Self::zero(grid);
        for term in &file.terms {
            let f = StepKernel::from_file(term)?;
            grid.check_same(f.grid())?;
            out.accumulate(f)?;
        }
        Ok(out)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("expansion file serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Self::from_file(&serde_json::from_str(s)?)
    }
}

/// On-disk expansion: the shared grid and one kernel file per order,
/// `{"grid": {"h": h, "m": m}, "terms": [kernel, ..]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpansionFile {
    pub grid: GridFile,
    pub terms: Vec<KernelFile>,
}

/// Terms of `I_n(f) I_m(g)`; scalars multiply linearly.
fn product_terms<T: Real>(
    f: &StepKernel<T>,
    n: usize,
    g: &StepKernel<T>,
    m: usize,
) -> Result<Vec<StepKernel<T>>> {
    if n == 0 {
        return Ok(vec![g.scale(f.get(&[]))]);
    }
    if m == 0 {
        return Ok(vec![f.scale(g.get(&[]))]);
    }
    let mut out = Vec::with_capacity(2 * n.min(m) + 1);
    for p in 0..=n.min(m) {
        out.push(f.contract(g, p, 0)?);
    }
    for p in 1..=n.min(m) {
        out.push(f.contract(g, p - 1, 1)?);
    }
    Ok(out)
}

/// `φ[I_{n_1}(f_1) ⋯ I_{n_r}(f_r)]` by multiplying left to right and taking
/// the constant term.
///
/// Terms whose order exceeds the total order still to be multiplied in
/// cannot reach order zero and are dropped after each step.
pub fn moment_via_products<T: Real>(ks: &[StepKernel<T>]) -> Result<Complex<T>> {
    let Some(first) = ks.first() else {
        return argument("empty kernel list");
    };
    let total: usize = ks.iter().map(StepKernel::arity).sum();
    let mut remaining = total - first.arity();
    let mut acc = ChaosExpansion::from_kernel(first.clone()).truncate(remaining);
    for f in &ks[1..] {
        acc.grid.check_same(f.grid())?;
        remaining -= f.arity();
        acc = acc
            .multiply(&ChaosExpansion::from_kernel(f.clone()))?
            .truncate(remaining);
    }
    Ok(acc.phi())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn indicator(k: usize) -> StepKernel<f64> {
        let w = (k as f64).powf(-0.5);
        StepKernel::from_real_entries(1, GridSpec::unit(k).unwrap(), (0..k).map(|i| (vec![i], w)))
            .unwrap()
    }

    #[test]
    fn from_kernel_examples() {
        let g = GridSpec::unit(3).unwrap();
        let a = ChaosExpansion::from_kernel(StepKernel::scalar(g, c(2.5, 0.0)));
        assert_eq!(a.phi(), c(2.5, 0.0));
        assert_eq!(a.max_order(), Some(0));
        let f = indicator(3);
        let x = ChaosExpansion::from_kernel(f.clone());
        assert_eq!(x.term(1), Some(&f));
        assert_eq!(x.phi(), c(0.0, 0.0));
        assert!(ChaosExpansion::from_kernel(StepKernel::<f64>::zero(2, g)).is_zero());
    }

    #[test]
    fn first_order_product_rule() {
        let g = GridSpec::new(0.5, 3).unwrap();
        let f = StepKernel::from_real_entries(1, g, vec![(vec![0], 1.0), (vec![1], 2.0)]).unwrap();
        let h = StepKernel::from_real_entries(1, g, vec![(vec![1], 3.0), (vec![2], -1.0)]).unwrap();
        let prod = ChaosExpansion::from_kernel(f.clone())
            .multiply(&ChaosExpansion::from_kernel(h.clone()))
            .unwrap();
        assert_eq!(prod.term(2), Some(&f.tensor_product(&h).unwrap()));
        assert_eq!(prod.term(1), Some(&f.contract(&h, 0, 1).unwrap()));
        assert_eq!(prod.phi(), c(0.5 * 6.0, 0.0));
    }

    #[test]
    fn unit_is_neutral() {
        let f = indicator(4);
        let x = ChaosExpansion::from_kernel(f.tensor_product(&f).unwrap())
            .add(&ChaosExpansion::from_kernel(f))
            .unwrap();
        let one = ChaosExpansion::one(*x.grid());
        assert_eq!(x.multiply(&one).unwrap(), x);
        assert_eq!(one.multiply(&x).unwrap(), x);
    }

    #[test]
    fn second_moment_is_norm() {
        for k in [1usize, 7] {
            let f = indicator(k);
            let x = ChaosExpansion::from_kernel(f.clone());
            assert_relative_eq!(
                x.multiply(&x).unwrap().phi().re,
                f.norm_sqr(),
                epsilon = 1e-14
            );
        }
    }

    #[test]
    fn indicator_fourth_moment() {
        for k in [1usize, 3, 10] {
            let f = indicator(k);
            let m = moment_via_products(&vec![f.clone(); 4]).unwrap();
            assert_relative_eq!(m.re, 2.0 + 1.0 / k as f64, max_relative = 1e-13);
            assert_eq!(moment_via_products(&[f]).unwrap(), c(0.0, 0.0));
        }
    }

    #[test]
    fn involution_examples() {
        let g = GridSpec::unit(2).unwrap();
        let f = StepKernel::from_entries(
            2,
            g,
            vec![(vec![0, 1], c(0.0, 1.0)), (vec![1, 0], c(0.0, -1.0))],
        )
        .unwrap();
        let x = ChaosExpansion::from_kernel(f);
        assert_eq!(x.involution(), x);
        let y = ChaosExpansion::from_kernel(
            StepKernel::from_entries(2, g, vec![(vec![0, 1], c(1.0, 2.0))]).unwrap(),
        )
        .add(&ChaosExpansion::constant(g, c(0.0, 3.0)))
        .unwrap();
        assert_ne!(y.involution(), y);
        assert_eq!(y.involution().phi(), c(0.0, -3.0));
        assert_eq!(y.involution().involution(), y);
    }

    #[test]
    fn capacity_is_enforced() {
        let g = GridSpec::unit(1).unwrap();
        let e = StepKernel::from_real_entries(1, g, vec![(vec![0], 1.0)]).unwrap();
        let mut f = e.clone();
        for _ in 0..8 {
            f = f.tensor_product(&e).unwrap();
        }
        let x = ChaosExpansion::from_kernel(f);
        assert!(matches!(x.multiply(&x), Err(Error::Capacity { .. })));
    }

    #[test]
    fn json_round_trip() {
        let f = indicator(3);
        let x = ChaosExpansion::from_kernel(f.tensor_product(&f).unwrap())
            .add(&ChaosExpansion::constant(*f.grid(), c(0.5, -1.0)))
            .unwrap();
        assert_eq!(ChaosExpansion::from_json(&x.to_json()).unwrap(), x);
        let empty = ChaosExpansion::<f64>::zero(GridSpec::unit(2).unwrap());
        assert_eq!(ChaosExpansion::from_json(&empty.to_json()).unwrap(), empty);
        let mut file = x.to_file();
        file.grid.m = 4;
        assert!(matches!(
            ChaosExpansion::<f64>::from_file(&file),
            Err(Error::GridMismatch(_))
        ));
    }

    #[test]
    fn grid_mismatch() {
        let x = ChaosExpansion::from_kernel(indicator(2));
        let y = ChaosExpansion::from_kernel(indicator(3));
        assert!(matches!(x.multiply(&y), Err(Error::GridMismatch(_))));
        assert!(moment_via_products(&[indicator(2), indicator(3)]).is_err());
    }
}

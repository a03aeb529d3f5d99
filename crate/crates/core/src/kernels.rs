//! Step-function kernels on a uniform grid.
//!
//! A kernel of arity `n` is constant on each cell `[i_1 h, (i_1+1) h) × ... ×
//! [i_n h, (i_n+1) h)` of the grid `[0, m h)^n`, so every integral against it
//! is a finite sum. Coefficients are complex and stored sparsely in a sorted
//! map; zero coefficients are never stored.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use itertools::Itertools;
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{argument, Error, Result};
use crate::scalar::{complex_dist, CompensatedSum, ComplexSum, Real};

/// Default absolute tolerance for symmetry predicates.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Cell width `h` and cell count `m` of the grid `[0, m h)` on every axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct GridSpec<T: Real> {
    h: T,
    m: usize,
}

impl<T: Real> GridSpec<T> {
    pub fn new(h: T, m: usize) -> Result<Self> {
        if !(h > T::zero()) || !h.is_finite() {
            return argument(format!("cell width must be positive and finite, got {h}"));
        }
        if m == 0 {
            return argument("grid needs at least one cell");
        }
        Ok(Self { h, m })
    }

    /// Unit cells on `[0, m)`.
    pub fn unit(m: usize) -> Result<Self> {
        Self::new(T::one(), m)
    }

    pub fn cell_width(&self) -> T {
        self.h
    }

    pub fn cell_count(&self) -> usize {
        self.m
    }

    /// Lebesgue measure of one cell of dimension `dim`.
    pub fn cell_volume(&self, dim: usize) -> T {
        self.h.powi(dim as i32)
    }

    pub(crate) fn check_same(&self, other: &Self) -> Result<()> {
        if self != other {
            return Err(Error::GridMismatch(format!(
                "(h={}, m={}) vs (h={}, m={})",
                self.h, self.m, other.h, other.m
            )));
        }
        Ok(())
    }
}

pub type Index = Vec<usize>;

#[derive(Clone, Debug, PartialEq)]
pub struct StepKernel<T: Real> {
    arity: usize,
    grid: GridSpec<T>,
    entries: BTreeMap<Index, Complex<T>>,
}

fn czero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

impl<T: Real> StepKernel<T> {
    /// The zero kernel.
    pub fn zero(arity: usize, grid: GridSpec<T>) -> Self {
        Self {
            arity,
            grid,
            entries: BTreeMap::new(),
        }
    }

    /// Arity-0 kernel holding a single constant.
    pub fn scalar(grid: GridSpec<T>, value: Complex<T>) -> Self {
        let mut k = Self::zero(0, grid);
        if value != czero() {
            k.entries.insert(Vec::new(), value);
        }
        k
    }

    /// Builds a kernel from `(cell index, value)` pairs. Repeated indices are
    /// summed; zeros are pruned.
    pub fn from_entries<I>(arity: usize, grid: GridSpec<T>, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Index, Complex<T>)>,
    {
        let mut k = Self::zero(arity, grid);
        for (idx, v) in entries {
            if idx.len() != arity {
                return argument(format!(
                    "index {idx:?} has length {}, kernel arity is {arity}",
                    idx.len()
                ));
            }
            if let Some(&bad) = idx.iter().find(|&&i| i >= grid.m) {
                return argument(format!("cell index {bad} outside grid of {} cells", grid.m));
            }
            if !v.re.is_finite() || !v.im.is_finite() {
                return argument(format!("non-finite coefficient at {idx:?}"));
            }
            *k.entries.entry(idx).or_insert_with(czero) += v;
        }
        k.prune();
        Ok(k)
    }

    /// Real-valued variant of [`StepKernel::from_entries`].
    pub fn from_real_entries<I>(arity: usize, grid: GridSpec<T>, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Index, T)>,
    {
        Self::from_entries(
            arity,
            grid,
            entries
                .into_iter()
                .map(|(i, v)| (i, Complex::new(v, T::zero()))),
        )
    }

    fn from_map(arity: usize, grid: GridSpec<T>, entries: BTreeMap<Index, Complex<T>>) -> Self {
        let mut k = Self {
            arity,
            grid,
            entries,
        };
        k.prune();
        k
    }

    fn prune(&mut self) {
        self.entries.retain(|_, v| *v != czero());
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn grid(&self) -> &GridSpec<T> {
        &self.grid
    }

    /// Number of stored (non-zero) coefficients.
    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, idx: &[usize]) -> Complex<T> {
        self.entries.get(idx).copied().unwrap_or_else(czero)
    }

    /// Non-zero coefficients in lexicographic index order.
    pub fn entries(&self) -> impl Iterator<Item = (&Index, &Complex<T>)> + '_ {
        self.entries.iter()
    }

    /// Value of an arity-0 kernel.
    pub fn scalar_value(&self) -> Option<Complex<T>> {
        (self.arity == 0).then(|| self.get(&[]))
    }

    /// Largest coefficient modulus.
    pub fn max_abs(&self) -> T {
        self.entries
            .values()
            .fold(T::zero(), |m, v| m.max(v.norm()))
    }

    pub fn is_real(&self, tol: T) -> bool {
        self.entries.values().all(|v| v.im.abs() <= tol)
    }

    pub fn norm_sqr(&self) -> T {
        let mut s = CompensatedSum::default();
        for v in self.entries.values() {
            s.add(v.norm_sqr());
        }
        s.value() * self.grid.cell_volume(self.arity)
    }

    pub fn norm(&self) -> T {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, c: Complex<T>) -> Self {
        Self::from_map(
            self.arity,
            self.grid,
            self.entries
                .iter()
                .map(|(i, v)| (i.clone(), *v * c))
                .collect(),
        )
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        if self.arity != other.arity {
            return argument(format!("adding arity {} and {}", self.arity, other.arity));
        }
        let mut entries = self.entries.clone();
        for (i, v) in &other.entries {
            *entries.entry(i.clone()).or_insert_with(czero) += *v;
        }
        Ok(Self::from_map(self.arity, self.grid, entries))
    }

    /// The same function viewed on a grid with the same cell width and at
    /// least as many cells (zero outside the original extent).
    pub fn extend_grid(&self, m: usize) -> Result<Self> {
        if m < self.grid.m {
            return argument(format!(
                "cannot shrink grid from {} to {m} cells",
                self.grid.m
            ));
        }
        let mut k = self.clone();
        k.grid.m = m;
        Ok(k)
    }

    /// Largest coefficient distance to `other`, over the union of supports.
    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        self.grid.check_same(&other.grid)?;
        if self.arity != other.arity {
            return argument("arity mismatch");
        }
        let mut d = T::zero();
        for (i, v) in &self.entries {
            d = d.max(complex_dist(*v, other.get(i)));
        }
        for (i, v) in &other.entries {
            if !self.entries.contains_key(i) {
                d = d.max(v.norm());
            }
        }
        Ok(d)
    }

    /// `f*(t_1..t_n) = conj(f(t_n..t_1))`.
    pub fn adjoint(&self) -> Self {
        let entries = self
            .entries
            .iter()
            .map(|(i, v)| (i.iter().rev().copied().collect(), v.conj()))
            .collect();
        Self {
            arity: self.arity,
            grid: self.grid,
            entries,
        }
    }

    /// `f == f*` coefficient-wise within `tol`.
    pub fn is_mirror_symmetric(&self, tol: T) -> bool {
        self.entries.iter().all(|(i, v)| {
            let rev: Index = i.iter().rev().copied().collect();
            complex_dist(*v, self.get(&rev).conj()) <= tol
        })
    }

    /// Real within `tol` and invariant under every permutation of the
    /// arguments. Arities up to 8 check all permutations; larger arities
    /// check the generating transposition and cycle.
    pub fn is_fully_symmetric(&self, tol: T) -> bool {
        if !self.is_real(tol) {
            return false;
        }
        let n = self.arity;
        if n < 2 {
            return true;
        }
        let perms: Vec<Vec<usize>> = if n <= 8 {
            (0..n).permutations(n).collect()
        } else {
            let mut swap: Vec<usize> = (0..n).collect();
            swap.swap(0, 1);
            let cycle: Vec<usize> = (1..n).chain(std::iter::once(0)).collect();
            vec![swap, cycle]
        };
        self.entries.iter().all(|(idx, v)| {
            perms.iter().all(|perm| {
                let permuted: Index = perm.iter().map(|&j| idx[j]).collect();
                complex_dist(*v, self.get(&permuted)) <= tol
            })
        })
    }

    /// `<f, g> = ∫ f conj(g)`.
    pub fn inner_product(&self, other: &Self) -> Result<Complex<T>> {
        self.grid.check_same(&other.grid)?;
        if self.arity != other.arity {
            return argument(format!(
                "inner product of arity {} and {}",
                self.arity, other.arity
            ));
        }
        let (small, large, swapped) = if self.nnz() <= other.nnz() {
            (self, other, false)
        } else {
            (other, self, true)
        };
        let mut acc = ComplexSum::default();
        for (i, v) in &small.entries {
            if let Some(w) = large.entries.get(i) {
                acc.add(if swapped {
                    *w * v.conj()
                } else {
                    *v * w.conj()
                });
            }
        }
        Ok(acc.value() * self.grid.cell_volume(self.arity))
    }

    /// `(f ⊗ g)(a, b) = f(a) g(b)`.
    pub fn tensor_product(&self, other: &Self) -> Result<Self> {
        self.contract(other, 0, 0)
    }

    /// Generalised contraction with `integrated` nested integrations and
    /// `identified` (0 or 1) shared, non-integrated variable:
    ///
    /// ```text
    /// (f ⋆ g)(a, u, b) = ∫ f(a, u, s_1..s_l) g(s_l..s_1, u, b) ds
    /// ```
    ///
    /// `contract(f, g, p, 0)` is the arc contraction `f ⌢_p g` and
    /// `contract(f, g, p - 1, 1)` the star contraction `f ⋆_p g`.
    pub fn contract(&self, other: &Self, integrated: usize, identified: usize) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        if identified > 1 {
            return argument(format!("identified must be 0 or 1, got {identified}"));
        }
        let width = integrated + identified;
        if width > self.arity.min(other.arity) {
            return argument(format!(
                "contraction ({integrated},{identified}) of arities {} and {}",
                self.arity, other.arity
            ));
        }
        let free_f = self.arity - width;
        let arity = self.arity + other.arity - 2 * integrated - identified;

        // Key: (u?, s_1..s_l). In f these are the trailing `width` indices in
        // order; in g they are the leading ones, reversed after `u`.
        let mut by_key: HashMap<Index, Vec<(&[usize], Complex<T>)>> = HashMap::new();
        for (idx, v) in &other.entries {
            let (head, tail) = idx.split_at(width);
            let mut key = Vec::with_capacity(width);
            if identified == 1 {
                key.push(head[integrated]);
            }
            key.extend(head[..integrated].iter().rev());
            by_key.entry(key).or_default().push((tail, *v));
        }

        let mut out: BTreeMap<Index, Complex<T>> = BTreeMap::new();
        for (idx, v) in &self.entries {
            let (a, key) = idx.split_at(free_f);
            let Some(matches) = by_key.get(key) else {
                continue;
            };
            for (b, w) in matches {
                let mut o = Vec::with_capacity(arity);
                o.extend_from_slice(a);
                if identified == 1 {
                    o.push(key[0]);
                }
                o.extend_from_slice(b);
                *out.entry(o).or_insert_with(czero) += *v * *w;
            }
        }
        let vol = self.grid.cell_volume(integrated);
        for v in out.values_mut() {
            *v *= vol;
        }
        Ok(Self::from_map(arity, self.grid, out))
    }

    pub fn to_file(&self) -> KernelFile {
        KernelFile {
            arity: self.arity,
            grid: GridFile {
                h: self.grid.h.as_f64(),
                m: self.grid.m,
            },
            entries: self
                .entries
                .iter()
                .map(|(i, v)| (i.clone(), v.re.as_f64(), v.im.as_f64()))
                .collect(),
        }
    }

    pub fn from_file(file: &KernelFile) -> Result<Self> {
        let grid = GridSpec::new(T::lit(file.grid.h), file.grid.m)?;
        Self::from_entries(
            file.arity,
            grid,
            file.entries
                .iter()
                .map(|(i, re, im)| (i.clone(), Complex::new(T::lit(*re), T::lit(*im)))),
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("kernel file serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Self::from_file(&serde_json::from_str(s)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }
}

/// On-disk kernel: `{"arity": n, "grid": {"h": h, "m": m}, "entries":
/// [[[i1,..,in], re, im], ..]}` with 0-based cell indices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelFile {
    pub arity: usize,
    pub grid: GridFile,
    pub entries: Vec<(Vec<usize>, f64, f64)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridFile {
    pub h: f64,
    pub m: usize,
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
    fn grid_validation() {
        assert!(GridSpec::<f64>::new(0.0, 3).is_err());
        assert!(GridSpec::<f64>::new(f64::NAN, 3).is_err());
        assert!(GridSpec::<f64>::new(1.0, 0).is_err());
    }

    #[test]
    fn construction_prunes_and_validates() {
        let g = GridSpec::unit(3).unwrap();
        let k = StepKernel::from_entries(
            2,
            g,
            vec![
                (vec![0, 1], c(1.0, 0.0)),
                (vec![0, 1], c(-1.0, 0.0)),
                (vec![2, 2], c(0.5, 0.0)),
            ],
        )
        .unwrap();
        assert_eq!(k.nnz(), 1);
        assert!(StepKernel::from_entries(2, g, vec![(vec![0, 3], c(1.0, 0.0))]).is_err());
        assert!(StepKernel::from_entries(2, g, vec![(vec![0], c(1.0, 0.0))]).is_err());
        assert!(StepKernel::from_entries(1, g, vec![(vec![0], c(f64::INFINITY, 0.0))]).is_err());
    }

    #[test]
    fn adjoint_examples() {
        let g = GridSpec::unit(2).unwrap();
        let f = StepKernel::from_entries(2, g, vec![(vec![0, 1], c(0.0, 1.0))]).unwrap();
        let a = f.adjoint();
        assert_eq!(a.nnz(), 1);
        assert_eq!(a.get(&[1, 0]), c(0.0, -1.0));
        assert_eq!(a.adjoint(), f);
        assert_eq!(indicator(3).adjoint(), indicator(3));
    }

    #[test]
    fn mirror_symmetry_examples() {
        let g = GridSpec::unit(2).unwrap();
        assert!(indicator(4).is_mirror_symmetric(1e-12));
        let one_sided = StepKernel::from_entries(2, g, vec![(vec![0, 1], c(1.0, 0.0))]).unwrap();
        assert!(!one_sided.is_mirror_symmetric(1e-12));
        let hermitian = StepKernel::from_entries(
            2,
            g,
            vec![(vec![0, 1], c(0.0, 1.0)), (vec![1, 0], c(0.0, -1.0))],
        )
        .unwrap();
        assert!(hermitian.is_mirror_symmetric(1e-12));
    }

    #[test]
    fn full_symmetry_examples() {
        let g = GridSpec::unit(2).unwrap();
        let sym = StepKernel::from_real_entries(
            2,
            g,
            vec![(vec![0, 1], 2.0), (vec![1, 0], 2.0), (vec![1, 1], 1.0)],
        )
        .unwrap();
        assert!(sym.is_fully_symmetric(1e-12));
        let imag = StepKernel::from_entries(2, g, vec![(vec![0, 1], c(0.0, 1.0))]).unwrap();
        assert!(!imag.is_fully_symmetric(1e-12));
        let u = StepKernel::from_real_entries(
            1,
            GridSpec::unit(3).unwrap(),
            vec![(vec![0], 1.0), (vec![2], -2.0)],
        )
        .unwrap();
        let cube = u.tensor_product(&u).unwrap().tensor_product(&u).unwrap();
        assert!(cube.is_fully_symmetric(1e-12));
        // mirror-symmetric but not fully symmetric
        let mirror = StepKernel::from_real_entries(
            3,
            GridSpec::unit(3).unwrap(),
            vec![(vec![0, 1, 2], 1.0), (vec![2, 1, 0], 1.0)],
        )
        .unwrap();
        assert!(mirror.is_mirror_symmetric(1e-12));
        assert!(!mirror.is_fully_symmetric(1e-12));
    }

    #[test]
    fn inner_product_examples() {
        for k in [1, 5, 37] {
            assert_relative_eq!(
                indicator(k).inner_product(&indicator(k)).unwrap().re,
                1.0,
                epsilon = 1e-14
            );
        }
        let g = GridSpec::unit(4).unwrap();
        let a = StepKernel::from_real_entries(1, g, vec![(vec![0], 1.0), (vec![1], 1.0)]).unwrap();
        let b = StepKernel::from_real_entries(1, g, vec![(vec![2], 1.0), (vec![3], 1.0)]).unwrap();
        assert_eq!(a.inner_product(&b).unwrap(), c(0.0, 0.0));
        let f = indicator(4);
        let two_f = f.scale(c(2.0, 0.0));
        assert_relative_eq!(
            f.inner_product(&two_f).unwrap().re,
            2.0 * f.norm_sqr(),
            epsilon = 1e-14
        );
        assert!(a.inner_product(&a.tensor_product(&a).unwrap()).is_err());
        assert!(matches!(
            a.inner_product(&indicator(3)),
            Err(Error::GridMismatch(_))
        ));
    }

    #[test]
    fn inner_product_is_conjugate_symmetric() {
        let g = GridSpec::new(0.5, 3).unwrap();
        let f = StepKernel::from_entries(
            2,
            g,
            vec![(vec![0, 1], c(1.0, 2.0)), (vec![2, 2], c(-0.5, 0.25))],
        )
        .unwrap();
        let h = StepKernel::from_entries(
            2,
            g,
            vec![(vec![0, 1], c(0.5, -1.0)), (vec![2, 2], c(3.0, 1.0))],
        )
        .unwrap();
        assert_eq!(
            f.inner_product(&h).unwrap(),
            h.inner_product(&f).unwrap().conj()
        );
        let ff = f.inner_product(&f).unwrap();
        assert_eq!(ff.im, 0.0);
        assert_relative_eq!(ff.re, f.norm_sqr(), epsilon = 1e-15);
    }

    #[test]
    fn tensor_product_examples() {
        let g = GridSpec::unit(3).unwrap();
        let one = StepKernel::scalar(g, c(1.0, 0.0));
        let f = StepKernel::from_real_entries(1, g, vec![(vec![0], 1.0), (vec![2], 3.0)]).unwrap();
        assert_eq!(one.tensor_product(&f).unwrap(), f);
        let e = StepKernel::from_real_entries(1, g, vec![(vec![0], 1.0)]).unwrap();
        let square = StepKernel::from_real_entries(2, g, vec![(vec![0, 0], 1.0)]).unwrap();
        assert_eq!(e.tensor_product(&e).unwrap(), square);
        let ff = f.tensor_product(&f).unwrap();
        assert_relative_eq!(ff.norm(), f.norm() * f.norm(), epsilon = 1e-14);
    }

    #[test]
    fn contraction_small_cases() {
        let g = GridSpec::new(0.5, 3).unwrap();
        let f = StepKernel::from_real_entries(1, g, vec![(vec![0], 1.0), (vec![1], 2.0)]).unwrap();
        let h = StepKernel::from_real_entries(1, g, vec![(vec![1], 3.0), (vec![2], 4.0)]).unwrap();
        // (1,0): h Σ f g
        let arc = f.contract(&h, 1, 0).unwrap();
        assert_eq!(arc.arity(), 0);
        assert_eq!(arc.scalar_value().unwrap(), c(0.5 * 6.0, 0.0));
        // (0,1): pointwise product
        let star = f.contract(&h, 0, 1).unwrap();
        assert_eq!(
            star,
            StepKernel::from_real_entries(1, g, vec![(vec![1], 6.0)]).unwrap()
        );
        assert!(f.contract(&h, 1, 1).is_err());
        assert!(f.contract(&h, 0, 2).is_err());
    }

    #[test]
    fn contraction_index_layout() {
        // arity 3 with (1,1): result(a, u, b) = h Σ_s f(a,u,s) g(s,u,b)
        let g = GridSpec::unit(3).unwrap();
        let f = StepKernel::from_real_entries(3, g, vec![(vec![0, 1, 2], 2.0)]).unwrap();
        let h =
            StepKernel::from_real_entries(3, g, vec![(vec![2, 1, 0], 5.0), (vec![1, 1, 0], 7.0)])
                .unwrap();
        let r = f.contract(&h, 1, 1).unwrap();
        assert_eq!(
            r,
            StepKernel::from_real_entries(3, g, vec![(vec![0, 1, 0], 10.0)]).unwrap()
        );
        // arity 3 with (2,0): g's integrated indices are reversed
        let f2 = StepKernel::from_real_entries(3, g, vec![(vec![0, 1, 2], 1.0)]).unwrap();
        let h2 =
            StepKernel::from_real_entries(3, g, vec![(vec![2, 1, 1], 3.0), (vec![1, 2, 1], 9.0)])
                .unwrap();
        let r2 = f2.contract(&h2, 2, 0).unwrap();
        assert_eq!(
            r2,
            StepKernel::from_real_entries(2, g, vec![(vec![0, 1], 3.0)]).unwrap()
        );
    }

    #[test]
    fn indicator_pointwise_square_norm() {
        for k in [1usize, 4, 9, 100] {
            let f = indicator(k);
            let sq = f.contract(&f, 0, 1).unwrap();
            assert_relative_eq!(sq.norm(), (k as f64).powf(-0.5), max_relative = 1e-13);
        }
    }

    #[test]
    fn zero_contraction_is_tensor_product() {
        let g = GridSpec::unit(2).unwrap();
        let f = StepKernel::from_entries(
            2,
            g,
            vec![(vec![0, 1], c(1.0, -1.0)), (vec![1, 1], c(2.0, 0.0))],
        )
        .unwrap();
        let t = f.contract(&f, 0, 0).unwrap();
        assert_eq!(t.arity(), 4);
        assert_eq!(t.nnz(), 4);
        assert_eq!(t.get(&[0, 1, 1, 1]), c(2.0, -2.0));
    }

    #[test]
    fn file_round_trip() {
        let g = GridSpec::new(0.25, 5).unwrap();
        let f = StepKernel::from_entries(
            2,
            g,
            vec![
                (vec![0, 4], c(0.1, -3.5)),
                (vec![3, 2], c(1e-300, 7.0 / 3.0)),
            ],
        )
        .unwrap();
        let json = f.to_json();
        assert!(json.starts_with(
            "{\"arity\":2,\"grid\":{\"h\":0.25,\"m\":5},\"entries\":[[[0,4],0.1,-3.5]"
        ));
        assert_eq!(StepKernel::<f64>::from_json(&json).unwrap(), f);
        let scalar = StepKernel::scalar(g, c(2.0, 0.0));
        assert_eq!(
            StepKernel::<f64>::from_json(&scalar.to_json()).unwrap(),
            scalar
        );
        assert!(StepKernel::<f64>::from_json(
            "{\"arity\":1,\"grid\":{\"h\":1,\"m\":1},\"entries\":[[[1],1,0]]}"
        )
        .is_err());
    }

    #[test]
    fn single_precision_works() {
        let g = GridSpec::<f32>::unit(4).unwrap();
        let f = StepKernel::from_real_entries(1, g, (0..4).map(|i| (vec![i], 0.5f32))).unwrap();
        assert!((f.norm() - 1.0).abs() < 1e-6);
        assert!(f.is_mirror_symmetric(1e-6));
    }

    #[test]
    fn extend_grid_keeps_values() {
        let f = indicator(3);
        let e = f.extend_grid(6).unwrap();
        assert_eq!(e.grid().cell_count(), 6);
        assert_eq!(e.norm(), f.norm());
        assert!(f.extend_grid(2).is_err());
    }
}

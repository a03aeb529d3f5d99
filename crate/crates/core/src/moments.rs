//! Partition integrals, the free Poisson diagram formula, and closed-form
//! semicircular / free Poisson moments.

use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{argument, Error, Result};
use crate::kernels::{GridSpec, Index, StepKernel};
use crate::partitions::{
    catalan, enumerate, enumerate_respecting, BlockStructure, Partition, PartitionClass,
};
use crate::scalar::{pairwise_sum, ComplexSum, Real};

/// Default cap on the number of kernel entries visited by one partition
/// integral.
pub const DEFAULT_BUDGET: u64 = 100_000_000;

/// Relative tolerance for the imaginary residue of a moment that should be
/// real.
pub const REAL_RESIDUE_TOL: f64 = 1e-10;

fn czero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

fn common_grid<T: Real>(ks: &[StepKernel<T>]) -> Result<GridSpec<T>> {
    let Some(first) = ks.first() else {
        return argument("empty kernel list");
    };
    for k in &ks[1..] {
        first.grid().check_same(k.grid())?;
    }
    Ok(*first.grid())
}

/// `∫_π f_1 ⊗ ... ⊗ f_r` with the default budget.
pub fn partition_integral<T: Real>(p: &Partition, ks: &[StepKernel<T>]) -> Result<Complex<T>> {
    partition_integral_budgeted(p, ks, DEFAULT_BUDGET)
}

/// Integral of `f_1 ⊗ ... ⊗ f_r` over the diagonal where the legs in each
/// block of `p` coincide, one integration per block.
///
/// On a step grid this is `h^{|p|}` times the sum, over one cell per block,
/// of the product of kernel values at the induced indices. The sum is
/// driven by the kernels' non-zero entries, sparsest kernel first; `budget`
/// caps the number of entries visited.
pub fn partition_integral_budgeted<T: Real>(
    p: &Partition,
    ks: &[StepKernel<T>],
    budget: u64,
) -> Result<Complex<T>> {
    let grid = common_grid(ks)?;
    let total: usize = ks.iter().map(StepKernel::arity).sum();
    if p.n() != total {
        return argument(format!(
            "partition of {} elements for kernels of total arity {total}",
            p.n()
        ));
    }
    let plan = SearchPlan::new(p, ks);
    let mut search = Search {
        plan: &plan,
        cells: vec![usize::MAX; p.len()],
        visited: 0,
        budget,
        acc: ComplexSum::default(),
    };
    if plan.steps.iter().any(|s| s.kernel.is_zero()) || plan.scalar == czero() {
        return Ok(czero());
    }
    search.descend(0, plan.scalar)?;
    Ok(search.acc.value() * grid.cell_volume(p.len()))
}

#[derive(Clone, Copy)]
enum Slot {
    /// Block already fixed by an earlier kernel.
    Bound(usize),
    /// First occurrence of a block; fixes it.
    Fresh(usize),
    /// Same block as an earlier position of this kernel.
    Repeat(usize),
}

enum Access<'a, T: Real> {
    /// Every slot is bound: one lookup.
    Lookup,
    /// Entries bucketed by the cell at the given slot.
    Bucketed(usize, HashMap<usize, Vec<(&'a Index, Complex<T>)>>),
    Scan(Vec<(&'a Index, Complex<T>)>),
}

struct Step<'a, T: Real> {
    kernel: &'a StepKernel<T>,
    slots: Vec<Slot>,
    access: Access<'a, T>,
}

struct SearchPlan<'a, T: Real> {
    steps: Vec<Step<'a, T>>,
    scalar: Complex<T>,
}

impl<'a, T: Real> SearchPlan<'a, T> {
    fn new(p: &Partition, ks: &'a [StepKernel<T>]) -> Self {
        let labels = p.labels();
        let mut legs = Vec::with_capacity(ks.len());
        let mut offset = 0;
        for k in ks {
            legs.push(&labels[offset..offset + k.arity()]);
            offset += k.arity();
        }

        let mut scalar = Complex::new(T::one(), T::zero());
        let mut remaining: Vec<usize> = Vec::new();
        for (i, k) in ks.iter().enumerate() {
            if k.arity() == 0 {
                scalar *= k.get(&[]);
            } else {
                remaining.push(i);
            }
        }

        let mut assigned = vec![false; p.len()];
        let mut steps = Vec::with_capacity(remaining.len());
        while !remaining.is_empty() {
            // most already-bound legs first, then sparsest
            let (pos, &chosen) = remaining
                .iter()
                .enumerate()
                .max_by(|(_, &a), (_, &b)| {
                    let bound = |i: usize| legs[i].iter().filter(|&&bl| assigned[bl]).count();
                    bound(a)
                        .cmp(&bound(b))
                        .then(ks[b].nnz().cmp(&ks[a].nnz()))
                        .then(b.cmp(&a))
                })
                .expect("non-empty");
            remaining.remove(pos);

            let mut slots = Vec::with_capacity(legs[chosen].len());
            for (j, &block) in legs[chosen].iter().enumerate() {
                let slot = if assigned[block] {
                    Slot::Bound(block)
                } else if let Some(first) = legs[chosen][..j].iter().position(|&b| b == block) {
                    Slot::Repeat(first)
                } else {
                    Slot::Fresh(block)
                };
                slots.push(slot);
            }
            for &block in legs[chosen] {
                assigned[block] = true;
            }

            let kernel = &ks[chosen];
            let first_bound = slots.iter().position(|s| matches!(s, Slot::Bound(_)));
            let all_bound = slots.iter().all(|s| matches!(s, Slot::Bound(_)));
            let access = if all_bound {
                Access::Lookup
            } else if let Some(slot) = first_bound {
                let mut buckets: HashMap<usize, Vec<_>> = HashMap::new();
                for (idx, v) in kernel.entries() {
                    buckets.entry(idx[slot]).or_default().push((idx, *v));
                }
                Access::Bucketed(slot, buckets)
            } else {
                Access::Scan(kernel.entries().map(|(i, v)| (i, *v)).collect())
            };
            steps.push(Step {
                kernel,
                slots,
                access,
            });
        }
        Self { steps, scalar }
    }
}

struct Search<'p, 'a, T: Real> {
    plan: &'p SearchPlan<'a, T>,
    cells: Vec<usize>,
    visited: u64,
    budget: u64,
    acc: ComplexSum<T>,
}

impl<T: Real> Search<'_, '_, T> {
    fn descend(&mut self, depth: usize, weight: Complex<T>) -> Result<()> {
        if depth == self.plan.steps.len() {
            self.acc.add(weight);
            return Ok(());
        }
        let step = &self.plan.steps[depth];
        match &step.access {
            Access::Lookup => {
                self.tick(1)?;
                let key: Vec<usize> = step
                    .slots
                    .iter()
                    .map(|s| match s {
                        Slot::Bound(b) => self.cells[*b],
                        _ => unreachable!(),
                    })
                    .collect();
                let v = step.kernel.get(&key);
                if v != czero() {
                    self.descend(depth + 1, weight * v)?;
                }
            }
            Access::Bucketed(slot, buckets) => {
                let Slot::Bound(b) = step.slots[*slot] else {
                    unreachable!()
                };
                if let Some(bucket) = buckets.get(&self.cells[b]) {
                    self.try_entries(depth, weight, bucket)?;
                }
            }
            Access::Scan(all) => self.try_entries(depth, weight, all)?,
        }
        Ok(())
    }

    fn try_entries(
        &mut self,
        depth: usize,
        weight: Complex<T>,
        entries: &[(&Index, Complex<T>)],
    ) -> Result<()> {
        let step = &self.plan.steps[depth];
        self.tick(entries.len() as u64)?;
        for (idx, v) in entries {
            let consistent = step.slots.iter().enumerate().all(|(j, s)| match *s {
                Slot::Bound(b) => self.cells[b] == idx[j],
                Slot::Repeat(first) => idx[first] == idx[j],
                Slot::Fresh(_) => true,
            });
            if !consistent {
                continue;
            }
            for (j, s) in step.slots.iter().enumerate() {
                if let Slot::Fresh(b) = *s {
                    self.cells[b] = idx[j];
                }
            }
            self.descend(depth + 1, weight * *v)?;
        }
        for s in &step.slots {
            if let Slot::Fresh(b) = *s {
                self.cells[b] = usize::MAX;
            }
        }
        Ok(())
    }

    fn tick(&mut self, n: u64) -> Result<()> {
        self.visited += n;
        if self.visited > self.budget {
            return Err(Error::Budget {
                budget: self.budget,
            });
        }
        Ok(())
    }
}

/// A moment split into its pairing and big-block contributions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct DiagramMoment<T: Real> {
    pub value: Complex<T>,
    pub pairings: Complex<T>,
    pub big_blocks: Complex<T>,
    /// Number of partitions in the sum.
    pub partitions: usize,
}

/// `φ[I_{n_1}(f_1) ⋯ I_{n_r}(f_r)]` by the diagram formula.
pub fn diagram_moment<T: Real>(ks: &[StepKernel<T>]) -> Result<Complex<T>> {
    diagram_moment_by_class(ks, DEFAULT_BUDGET).map(|m| m.value)
}

/// Sum of partition integrals over the singleton-free non-crossing
/// partitions respecting `n_1 ⊗ ... ⊗ n_r`, reported by class.
///
/// The per-partition integrals run in parallel; each class is reduced by
/// pairwise summation in enumeration order, so the result does not depend on
/// the thread count.
pub fn diagram_moment_by_class<T: Real>(
    ks: &[StepKernel<T>],
    budget: u64,
) -> Result<DiagramMoment<T>> {
    common_grid(ks)?;
    let orders: Vec<usize> = ks.iter().map(StepKernel::arity).collect();
    if orders.contains(&0) {
        return argument("moment words need kernels of arity at least 1");
    }
    let structure = BlockStructure::new(orders)?;
    let parts = enumerate_respecting(&structure, PartitionClass::NoncrossingNoSingletons, false)?;
    let values = parts
        .par_iter()
        .map(|p| partition_integral_budgeted(p, ks, budget))
        .collect::<Result<Vec<_>>>()?;
    let (mut pairs, mut big) = (Vec::new(), Vec::new());
    for (p, v) in parts.iter().zip(values) {
        if p.is_pairing() {
            pairs.push(v);
        } else {
            big.push(v);
        }
    }
    let pairings = pairwise_sum(&pairs);
    let big_blocks = pairwise_sum(&big);
    Ok(DiagramMoment {
        value: pairings + big_blocks,
        pairings,
        big_blocks,
        partitions: parts.len(),
    })
}

/// Real part of `z`, or a precondition error when the imaginary residue
/// exceeds `REAL_RESIDUE_TOL · (1 + |z|)`.
pub fn expect_real<T: Real>(z: Complex<T>) -> Result<T> {
    if z.im.abs() > T::lit(REAL_RESIDUE_TOL) * (T::one() + z.norm()) {
        return Err(Error::Precondition(format!(
            "expected a real moment, imaginary part is {}",
            z.im
        )));
    }
    Ok(z.re)
}

/// Symmetric positive semidefinite `d × d` matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "", try_from = "Vec<Vec<T>>", into = "Vec<Vec<T>>")]
pub struct CovarianceMatrix<T: Real> {
    rows: Vec<Vec<T>>,
}

impl<T: Real> CovarianceMatrix<T> {
    /// Smallest eigenvalue accepted as "non-negative".
    pub const EIGEN_FLOOR: f64 = -1e-10;

    pub fn new(rows: Vec<Vec<T>>) -> Result<Self> {
        let d = rows.len();
        if d == 0 {
            return argument("empty covariance matrix");
        }
        if rows.iter().any(|r| r.len() != d) {
            return argument("covariance matrix must be square");
        }
        let tol = T::lit(1e-12);
        for i in 0..d {
            for j in 0..i {
                let (a, b) = (rows[i][j], rows[j][i]);
                if (a - b).abs() > tol * (T::one() + a.abs().max(b.abs())) {
                    return argument(format!(
                        "covariance not symmetric at ({}, {})",
                        i + 1,
                        j + 1
                    ));
                }
            }
            if rows[i].iter().any(|x| !x.is_finite()) {
                return argument("non-finite covariance entry");
            }
        }
        let m = DMatrix::from_fn(d, d, |i, j| rows[i][j].as_f64());
        let min_eig = m
            .symmetric_eigenvalues()
            .iter()
            .fold(f64::INFINITY, |a, &b| a.min(b));
        if min_eig < Self::EIGEN_FLOOR {
            return argument(format!(
                "covariance not positive semidefinite (eigenvalue {min_eig})"
            ));
        }
        Ok(Self { rows })
    }

    pub fn identity(d: usize) -> Self {
        let rows = (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| if i == j { T::one() } else { T::zero() })
                    .collect()
            })
            .collect();
        Self { rows }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.rows[i][j]
    }

    pub fn rows(&self) -> &[Vec<T>] {
        &self.rows
    }
}

impl<T: Real> TryFrom<Vec<Vec<T>>> for CovarianceMatrix<T> {
    type Error = Error;

    fn try_from(rows: Vec<Vec<T>>) -> Result<Self> {
        Self::new(rows)
    }
}

impl<T: Real> From<CovarianceMatrix<T>> for Vec<Vec<T>> {
    fn from(c: CovarianceMatrix<T>) -> Self {
        c.rows
    }
}

/// `φ(s_{i_1} ⋯ s_{i_n})` for a semicircular family with covariance `c`:
/// the sum over non-crossing pairings of the product of `c(i_a, i_b)`.
/// Indices are 0-based.
pub fn semicircular_family_moment<T: Real>(c: &CovarianceMatrix<T>, word: &[usize]) -> Result<T> {
    if word.is_empty() {
        return argument("empty word");
    }
    if let Some(&bad) = word.iter().find(|&&i| i >= c.dim()) {
        return argument(format!("index {} outside 1..={}", bad + 1, c.dim()));
    }
    if word.len() % 2 == 1 {
        return Ok(T::zero());
    }
    let terms: Vec<Complex<T>> = enumerate(word.len(), PartitionClass::NoncrossingPairings)?
        .iter()
        .map(|p| {
            let prod = p
                .blocks()
                .iter()
                .fold(T::one(), |acc, b| acc * c.get(word[b[0]], word[b[1]]));
            Complex::new(prod, T::zero())
        })
        .collect();
    Ok(pairwise_sum(&terms).re)
}

/// `φ(S(0,t)^{2m}) = C_m t^m`.
pub fn semicircular_even_moment<T: Real>(t: T, m: u32) -> T {
    T::from_u128(catalan(m)).expect("Catalan number representable") * t.powi(m as i32)
}

/// `n`-th moment of the free Poisson law of rate `λ`: the sum over
/// non-crossing partitions of `λ^{|π|}`.
pub fn free_poisson_moment<T: Real>(lambda: T, n: usize) -> Result<T> {
    let parts = enumerate(n, PartitionClass::NoncrossingAll)?;
    let mut by_blocks = vec![0u64; n + 1];
    for p in &parts {
        by_blocks[p.len()] += 1;
    }
    Ok(by_blocks
        .iter()
        .enumerate()
        .map(|(b, &count)| T::from_u64(count).expect("count representable") * lambda.powi(b as i32))
        .sum())
}

//! Test-side oracles and random inputs, written without reference to the
//! library's own enumeration or contraction code.
#![allow(dead_code)]

use std::collections::BTreeMap;

use freechaos::{Complex, GridSpec, Kernel};
use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Sparse kernel with `nnz` random cells and complex (or real) values in
/// `[-1, 1]`, made mirror-symmetric as `(g + g*)/2`.
pub fn random_mirror(
    rng: &mut ChaCha8Rng,
    arity: usize,
    grid: GridSpec<f64>,
    nnz: usize,
    complex: bool,
) -> Kernel {
    let m = grid.cell_count();
    let entries: Vec<(Vec<usize>, Complex<f64>)> = (0..nnz)
        .map(|_| {
            let idx = (0..arity).map(|_| rng.gen_range(0..m)).collect();
            let im = if complex {
                rng.gen_range(-1.0..1.0)
            } else {
                0.0
            };
            (idx, Complex::new(rng.gen_range(-1.0..1.0), im))
        })
        .collect();
    let g = Kernel::from_entries(arity, grid, entries).unwrap();
    g.add(&g.adjoint()).unwrap().scale(Complex::new(0.5, 0.0))
}

/// Every set partition of `0..n` as sorted blocks, by inserting each
/// element into an existing block or a new one.
pub fn brute_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    let mut acc: Vec<Vec<Vec<usize>>> = vec![Vec::new()];
    for x in 0..n {
        let mut next = Vec::new();
        for p in &acc {
            for b in 0..=p.len() {
                let mut q = p.clone();
                if b == p.len() {
                    q.push(vec![x]);
                } else {
                    q[b].push(x);
                }
                next.push(q);
            }
        }
        acc = next;
    }
    acc
}

/// Crossing iff some `a < b < c < d` has `a, c` in one block and `b, d` in
/// another.
pub fn brute_crossing(blocks: &[Vec<usize>]) -> bool {
    for (i, p) in blocks.iter().enumerate() {
        for (j, q) in blocks.iter().enumerate() {
            if i == j {
                continue;
            }
            for (&a, &c) in p.iter().tuple_combinations() {
                for (&b, &d) in q.iter().tuple_combinations() {
                    if a < b && b < c && c < d {
                        return true;
                    }
                }
            }
        }
    }
    false
}

pub fn canonical(mut blocks: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    for b in &mut blocks {
        b.sort_unstable();
    }
    blocks.sort();
    blocks
}

/// Dense evaluation of `∫ f(a, u, s_1..s_l) g(s_l..s_1, u, b) ds` by looping
/// over every output and integration cell.
pub fn dense_contract(
    f: &Kernel,
    g: &Kernel,
    l: usize,
    p: usize,
) -> BTreeMap<Vec<usize>, Complex<f64>> {
    let m = f.grid().cell_count();
    let h = f.grid().cell_width();
    let (n, k) = (f.arity(), g.arity());
    let (fa, gb) = (n - l - p, k - l - p);
    let mut out = BTreeMap::new();
    let cells = |d: usize| (0..d).map(|_| 0..m).multi_cartesian_product();
    let outer_dim = fa + p + gb;
    let outer: Vec<Vec<usize>> = if outer_dim == 0 {
        vec![vec![]]
    } else {
        cells(outer_dim).collect()
    };
    for o in outer {
        let (a, rest) = o.split_at(fa);
        let (u, b) = rest.split_at(p);
        let inner: Vec<Vec<usize>> = if l == 0 {
            vec![vec![]]
        } else {
            cells(l).collect()
        };
        let mut acc = Complex::new(0.0, 0.0);
        for s in inner {
            let fi: Vec<usize> = a.iter().chain(u).chain(&s).copied().collect();
            let gi: Vec<usize> = s.iter().rev().chain(u).chain(b).copied().collect();
            acc += f.get(&fi) * g.get(&gi);
        }
        acc *= h.powi(l as i32);
        if acc.norm() > 0.0 {
            out.insert(o, acc);
        }
    }
    out
}

pub fn dense_norm(k: &BTreeMap<Vec<usize>, Complex<f64>>, h: f64, arity: usize) -> f64 {
    (k.values().map(|v| v.norm_sqr()).sum::<f64>() * h.powi(arity as i32)).sqrt()
}

/// `∫ x^n dP(λ)` for the free Poisson law: the absolutely continuous part
/// by the trapezoid rule after `x = a + (b-a)(1-cos θ)/2`, which removes the
/// square-root endpoints, plus the atom `(1-λ)` at zero when `λ < 1`.
pub fn free_poisson_quadrature(lambda: f64, n: u32, nodes: usize) -> f64 {
    let (a, b) = ((1.0 - lambda.sqrt()).powi(2), (1.0 + lambda.sqrt()).powi(2));
    let r = (b - a) / 2.0;
    let integrand = |theta: f64| {
        let x = a + r * (1.0 - theta.cos());
        let s = theta.sin();
        // x^n / x, written to stay finite at x = 0
        let xn1 = if n == 0 {
            1.0 / x
        } else {
            x.powi(n as i32 - 1)
        };
        xn1 * r * r * s * s / (2.0 * std::f64::consts::PI)
    };
    let dt = std::f64::consts::PI / (nodes - 1) as f64;
    let mut acc = 0.0;
    for i in 0..nodes {
        let w = if i == 0 || i == nodes - 1 { 0.5 } else { 1.0 };
        let theta = i as f64 * dt;
        let v = integrand(theta);
        if v.is_finite() {
            acc += w * v;
        }
    }
    let atom = if lambda < 1.0 && n == 0 {
        1.0 - lambda
    } else {
        0.0
    };
    acc * dt + atom
}

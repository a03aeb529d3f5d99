//! Set partitions of `{0, .., n-1}`, non-crossing partitions, and the
//! respect/connect relations with respect to a block structure
//! `n_1 ⊗ ... ⊗ n_r`.
//!
//! Elements are 0-based inside the API. The JSON form (and `Display`) uses
//! 1-based labels, e.g. `[[1,4],[2,3]]`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{argument, Error, Result};

/// Largest ground set accepted for non-crossing classes.
pub const NONCROSSING_CAPACITY: usize = 16;
/// Largest ground set accepted for exhaustive (all-partition) classes.
pub const EXHAUSTIVE_CAPACITY: usize = 10;

/// A partition of `{0, .., n-1}` with blocks sorted internally and ordered
/// by least element.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<usize>>", into = "Vec<Vec<usize>>")]
pub struct Partition {
    n: usize,
    blocks: Vec<Vec<usize>>,
}

impl Partition {
    /// Builds a partition from 0-based blocks in any order.
    pub fn new(n: usize, mut blocks: Vec<Vec<usize>>) -> Result<Self> {
        if n == 0 {
            return argument("partition of an empty ground set");
        }
        let mut seen = vec![false; n];
        for block in &mut blocks {
            if block.is_empty() {
                return argument("empty block");
            }
            block.sort_unstable();
            for &x in block.iter() {
                if x >= n {
                    return argument(format!("element {} outside ground set of size {n}", x + 1));
                }
                if seen[x] {
                    return argument(format!("element {} appears twice", x + 1));
                }
                seen[x] = true;
            }
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return argument(format!("element {} is not covered", missing + 1));
        }
        blocks.sort_unstable_by_key(|b| b[0]);
        Ok(Self { n, blocks })
    }

    /// Builds a partition from 1-based blocks; the ground set is `1..=total`.
    pub fn from_one_based(blocks: Vec<Vec<usize>>) -> Result<Self> {
        let n = blocks.iter().map(Vec::len).sum();
        let mut zero_based = Vec::with_capacity(blocks.len());
        for block in blocks {
            if block.contains(&0) {
                return argument("1-based block contains 0");
            }
            zero_based.push(block.into_iter().map(|x| x - 1).collect());
        }
        Self::new(n, zero_based)
    }

    /// Builds a partition from a block-label vector (labels need not be a
    /// restricted growth string; equal labels mean equal blocks).
    pub fn from_labels(labels: &[usize]) -> Result<Self> {
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        let mut index_of: Vec<Option<usize>> = Vec::new();
        for (x, &l) in labels.iter().enumerate() {
            if index_of.len() <= l {
                index_of.resize(l + 1, None);
            }
            match index_of[l] {
                Some(b) => blocks[b].push(x),
                None => {
                    index_of[l] = Some(blocks.len());
                    blocks.push(vec![x]);
                }
            }
        }
        Self::new(labels.len(), blocks)
    }

    pub(crate) fn from_sorted_blocks_unchecked(n: usize, blocks: Vec<Vec<usize>>) -> Self {
        debug_assert!(Self::new(n, blocks.clone())
            .map(|p| p.blocks == blocks)
            .unwrap_or(false));
        Self { n, blocks }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// Number of blocks, `|π|`.
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Block index of every element; this is the restricted growth string.
    pub fn labels(&self) -> Vec<usize> {
        let mut labels = vec![0; self.n];
        for (b, block) in self.blocks.iter().enumerate() {
            for &x in block {
                labels[x] = b;
            }
        }
        labels
    }

    pub fn to_one_based(&self) -> Vec<Vec<usize>> {
        self.blocks
            .iter()
            .map(|b| b.iter().map(|x| x + 1).collect())
            .collect()
    }

    pub fn has_singleton(&self) -> bool {
        self.blocks.iter().any(|b| b.len() == 1)
    }

    pub fn is_pairing(&self) -> bool {
        self.blocks.iter().all(|b| b.len() == 2)
    }

    pub fn has_big_block(&self) -> bool {
        self.blocks.iter().any(|b| b.len() >= 3)
    }

    /// True iff two distinct blocks interleave as `x1 < x2 < y1 < y2`.
    pub fn is_crossing(&self) -> bool {
        let labels = self.labels();
        for (i, outer) in self.blocks.iter().enumerate() {
            if outer.len() < 2 {
                continue;
            }
            // region[x] = number of elements of `outer` below x, modulo |outer|;
            // another block crosses `outer` iff it touches two regions.
            let mut region_of_block: Vec<Option<usize>> = vec![None; self.blocks.len()];
            let mut below = 0;
            for x in 0..self.n {
                let b = labels[x];
                if b == i {
                    below += 1;
                    continue;
                }
                let region = below % outer.len();
                match region_of_block[b] {
                    None => region_of_block[b] = Some(region),
                    Some(r) if r != region => return true,
                    _ => {}
                }
            }
        }
        false
    }
}

impl TryFrom<Vec<Vec<usize>>> for Partition {
    type Error = Error;

    fn try_from(blocks: Vec<Vec<usize>>) -> Result<Self> {
        Self::from_one_based(blocks)
    }
}

impl From<Partition> for Vec<Vec<usize>> {
    fn from(p: Partition) -> Self {
        p.to_one_based()
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, block) in self.blocks.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str("{")?;
            for (j, x) in block.iter().enumerate() {
                if j > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{}", x + 1)?;
            }
            f.write_str("}")?;
        }
        f.write_str("}")
    }
}

/// The interval partition `n_1 ⊗ ... ⊗ n_r` grouping the legs of a tensor
/// product by factor.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct BlockStructure {
    orders: Vec<usize>,
    group_of: Vec<usize>,
    starts: Vec<usize>,
}

impl BlockStructure {
    pub fn new(orders: Vec<usize>) -> Result<Self> {
        if orders.is_empty() {
            return argument("block structure needs at least one group");
        }
        if orders.contains(&0) {
            return argument("block structure orders must be positive");
        }
        let mut group_of = Vec::with_capacity(orders.iter().sum());
        let mut starts = Vec::with_capacity(orders.len());
        for (g, &size) in orders.iter().enumerate() {
            starts.push(group_of.len());
            group_of.extend(std::iter::repeat_n(g, size));
        }
        Ok(Self {
            orders,
            group_of,
            starts,
        })
    }

    pub fn orders(&self) -> &[usize] {
        &self.orders
    }

    /// Number of groups `r`.
    pub fn groups(&self) -> usize {
        self.orders.len()
    }

    /// Total ground-set size `n_1 + ... + n_r`.
    pub fn total(&self) -> usize {
        self.group_of.len()
    }

    pub fn group_of(&self, element: usize) -> usize {
        self.group_of[element]
    }

    pub fn group_range(&self, group: usize) -> std::ops::Range<usize> {
        let start = self.starts[group];
        start..start + self.orders[group]
    }

    fn check_size(&self, p: &Partition) -> Result<()> {
        if p.n() != self.total() {
            return argument(format!(
                "partition of {} elements against structure {self} of total size {}",
                p.n(),
                self.total()
            ));
        }
        Ok(())
    }
}

impl TryFrom<Vec<usize>> for BlockStructure {
    type Error = Error;

    fn try_from(orders: Vec<usize>) -> Result<Self> {
        Self::new(orders)
    }
}

impl From<BlockStructure> for Vec<usize> {
    fn from(s: BlockStructure) -> Self {
        s.orders
    }
}

impl fmt::Display for BlockStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, n) in self.orders.iter().enumerate() {
            if i > 0 {
                f.write_str("⊗")?;
            }
            write!(f, "{n}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PartitionClass {
    All,
    Pairings,
    NoSingletons,
    /// No singletons and at least one block of size at least three.
    NoSingletonsWithBigBlock,
    NoncrossingAll,
    NoncrossingPairings,
    NoncrossingNoSingletons,
    NoncrossingNoSingletonsWithBigBlock,
}

impl PartitionClass {
    pub const ALL_CLASSES: [PartitionClass; 8] = [
        Self::All,
        Self::Pairings,
        Self::NoSingletons,
        Self::NoSingletonsWithBigBlock,
        Self::NoncrossingAll,
        Self::NoncrossingPairings,
        Self::NoncrossingNoSingletons,
        Self::NoncrossingNoSingletonsWithBigBlock,
    ];

    pub fn is_noncrossing(self) -> bool {
        matches!(
            self,
            Self::NoncrossingAll
                | Self::NoncrossingPairings
                | Self::NoncrossingNoSingletons
                | Self::NoncrossingNoSingletonsWithBigBlock
        )
    }

    /// The class with the same block-size constraint but no crossing
    /// constraint.
    pub fn size_class(self) -> Self {
        match self {
            Self::NoncrossingAll => Self::All,
            Self::NoncrossingPairings => Self::Pairings,
            Self::NoncrossingNoSingletons => Self::NoSingletons,
            Self::NoncrossingNoSingletonsWithBigBlock => Self::NoSingletonsWithBigBlock,
            other => other,
        }
    }

    fn forbids_singletons(self) -> bool {
        !matches!(self.size_class(), Self::All)
    }

    fn max_block(self) -> usize {
        if self.size_class() == Self::Pairings {
            2
        } else {
            usize::MAX
        }
    }

    fn needs_big_block(self) -> bool {
        self.size_class() == Self::NoSingletonsWithBigBlock
    }

    pub fn contains(self, p: &Partition) -> bool {
        let sizes_ok = match self.size_class() {
            Self::All => true,
            Self::Pairings => p.is_pairing(),
            Self::NoSingletons => !p.has_singleton(),
            Self::NoSingletonsWithBigBlock => !p.has_singleton() && p.has_big_block(),
            _ => unreachable!(),
        };
        sizes_ok && (!self.is_noncrossing() || !p.is_crossing())
    }

    /// Short name used on the command line.
    pub fn short_name(self) -> &'static str {
        match self {
            Self::All => "all",
            Self::Pairings => "p2",
            Self::NoSingletons => "ge2",
            Self::NoSingletonsWithBigBlock => "ge2plus",
            Self::NoncrossingAll => "nc",
            Self::NoncrossingPairings => "nc2",
            Self::NoncrossingNoSingletons => "nc-ge2",
            Self::NoncrossingNoSingletonsWithBigBlock => "nc-ge2plus",
        }
    }

    pub fn from_short_name(name: &str) -> Option<Self> {
        Self::ALL_CLASSES
            .into_iter()
            .find(|c| c.short_name() == name)
    }
}

impl fmt::Display for PartitionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

fn check_capacity(n: usize, class: PartitionClass) -> Result<()> {
    if n == 0 {
        return argument("ground set size must be at least 1");
    }
    let limit = if class.is_noncrossing() {
        NONCROSSING_CAPACITY
    } else {
        EXHAUSTIVE_CAPACITY
    };
    if n > limit {
        return Err(Error::Capacity {
            what: "ground set",
            size: n,
            limit,
        });
    }
    Ok(())
}

/// Every partition of `{0..n-1}` in `class`, lexicographically ordered by
/// restricted growth string.
///
/// Non-crossing classes are generated directly; the other classes filter the
/// exhaustive enumeration.
pub fn enumerate(n: usize, class: PartitionClass) -> Result<Vec<Partition>> {
    check_capacity(n, class)?;
    if class.is_noncrossing() {
        Ok(NoncrossingGenerator::new(n, class, None).run())
    } else {
        Ok(all_partitions(n)
            .into_iter()
            .filter(|p| class.contains(p))
            .collect())
    }
}

/// Non-crossing partitions in `class` that respect `structure`, optionally
/// only those that also connect it.
pub fn enumerate_respecting(
    structure: &BlockStructure,
    class: PartitionClass,
    connected_only: bool,
) -> Result<Vec<Partition>> {
    if !class.is_noncrossing() {
        return argument(format!(
            "respecting enumeration needs a non-crossing class, got {class}"
        ));
    }
    check_capacity(structure.total(), class)?;
    let mut out = NoncrossingGenerator::new(structure.total(), class, Some(structure)).run();
    if connected_only {
        out.retain(|p| connects_unchecked(p, structure));
    }
    Ok(out)
}

/// All partitions of `{0..n-1}` via restricted growth strings, in
/// lexicographic order. No capacity check.
pub(crate) fn all_partitions(n: usize) -> Vec<Partition> {
    let mut out = Vec::new();
    let mut labels = vec![0usize; n];
    // maxes[i] = max(labels[0..i]); first element is always block 0.
    fn rec(i: usize, n: usize, labels: &mut Vec<usize>, blocks: usize, out: &mut Vec<Partition>) {
        if i == n {
            let mut bs = vec![Vec::new(); blocks];
            for (x, &l) in labels.iter().enumerate() {
                bs[l].push(x);
            }
            out.push(Partition::from_sorted_blocks_unchecked(n, bs));
            return;
        }
        for l in 0..=blocks {
            labels[i] = l;
            rec(i + 1, n, labels, blocks.max(l + 1), out);
        }
    }
    if n > 0 {
        rec(1, n, &mut labels, 1, &mut out);
    }
    out
}

/// Direct generator of non-crossing partitions.
///
/// Elements are placed left to right. Open blocks live on a stack in
/// creation order; joining a block closes every block above it, which is
/// exactly the non-crossing condition. Block-size and respect constraints
/// are enforced while descending.
struct NoncrossingGenerator<'a> {
    n: usize,
    class: PartitionClass,
    structure: Option<&'a BlockStructure>,
    labels: Vec<usize>,
    sizes: Vec<usize>,
    last: Vec<usize>,
    stack: Vec<usize>,
    out: Vec<Partition>,
}

impl<'a> NoncrossingGenerator<'a> {
    fn new(n: usize, class: PartitionClass, structure: Option<&'a BlockStructure>) -> Self {
        Self {
            n,
            class,
            structure,
            labels: vec![0; n],
            sizes: Vec::new(),
            last: Vec::new(),
            stack: Vec::new(),
            out: Vec::new(),
        }
    }

    fn run(mut self) -> Vec<Partition> {
        self.descend(0);
        self.out
    }

    fn joinable(&self, block: usize, element: usize) -> bool {
        if self.sizes[block] >= self.class.max_block() {
            return false;
        }
        match self.structure {
            // Blocks grow left to right and groups are intervals, so only the
            // most recent element can share the new element's group.
            Some(s) => s.group_of(self.last[block]) != s.group_of(element),
            None => true,
        }
    }

    fn descend(&mut self, i: usize) {
        if self.class.forbids_singletons() {
            let open_singletons = self.stack.iter().filter(|&&b| self.sizes[b] == 1).count();
            if open_singletons > self.n - i {
                return;
            }
        }
        if i == self.n {
            self.emit();
            return;
        }
        for pos in 0..self.stack.len() {
            let block = self.stack[pos];
            if !self.joinable(block, i) {
                continue;
            }
            if self.class.forbids_singletons()
                && self.stack[pos + 1..].iter().any(|&b| self.sizes[b] == 1)
            {
                // closing the blocks above would freeze a singleton
                continue;
            }
            let closed: Vec<usize> = self.stack.drain(pos + 1..).collect();
            let prev_last = self.last[block];
            self.labels[i] = block;
            self.sizes[block] += 1;
            self.last[block] = i;
            self.descend(i + 1);
            self.last[block] = prev_last;
            self.sizes[block] -= 1;
            self.stack.extend(closed);
        }
        let block = self.sizes.len();
        self.labels[i] = block;
        self.sizes.push(1);
        self.last.push(i);
        self.stack.push(block);
        self.descend(i + 1);
        self.stack.pop();
        self.last.pop();
        self.sizes.pop();
    }

    fn emit(&mut self) {
        if self.class.forbids_singletons() && self.sizes.contains(&1) {
            return;
        }
        if self.class.needs_big_block() && !self.sizes.iter().any(|&s| s >= 3) {
            return;
        }
        let mut blocks = vec![Vec::new(); self.sizes.len()];
        for (x, &l) in self.labels.iter().enumerate() {
            blocks[l].push(x);
        }
        self.out
            .push(Partition::from_sorted_blocks_unchecked(self.n, blocks));
    }
}

/// True iff no block of `p` takes two elements from the same group.
pub fn respects(p: &Partition, structure: &BlockStructure) -> Result<bool> {
    structure.check_size(p)?;
    Ok(respects_unchecked(p, structure))
}

fn respects_unchecked(p: &Partition, s: &BlockStructure) -> bool {
    p.blocks().iter().all(|block| {
        // blocks are sorted and groups are intervals
        block
            .windows(2)
            .all(|w| s.group_of(w[0]) != s.group_of(w[1]))
    })
}

/// Connectivity of the graph on groups linked by blocks of `p`.
pub fn connects(p: &Partition, structure: &BlockStructure) -> Result<bool> {
    check_respects(p, structure)?;
    Ok(connects_unchecked(p, structure))
}

fn check_respects(p: &Partition, structure: &BlockStructure) -> Result<()> {
    if !respects(p, structure)? {
        return argument(format!("{p} does not respect {structure}"));
    }
    Ok(())
}

fn connects_unchecked(p: &Partition, s: &BlockStructure) -> bool {
    let mut uf = UnionFind::new(s.groups());
    link_groups(p, s, &mut uf);
    uf.components() == 1
}

fn link_groups(p: &Partition, s: &BlockStructure, uf: &mut UnionFind) {
    for block in p.blocks() {
        let g0 = s.group_of(block[0]);
        for &x in &block[1..] {
            uf.union(g0, s.group_of(x));
        }
    }
}

/// One piece of the decomposition of a respecting partition into connected
/// partitions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    /// 0-based group indices, increasing.
    pub groups: Vec<usize>,
    /// The sub-structure `⊗_{j ∈ groups} n_j`.
    pub structure: BlockStructure,
    /// The restriction of the partition, relabelled to local coordinates.
    pub partition: Partition,
}

/// Splits `p` into partitions that each connect their own sub-structure.
/// Components are ordered by their least group.
pub fn connected_components(p: &Partition, structure: &BlockStructure) -> Result<Vec<Component>> {
    check_respects(p, structure)?;
    let mut uf = UnionFind::new(structure.groups());
    link_groups(p, structure, &mut uf);

    let mut component_of_root = vec![usize::MAX; structure.groups()];
    let mut groups_by_component: Vec<Vec<usize>> = Vec::new();
    for g in 0..structure.groups() {
        let root = uf.find(g);
        if component_of_root[root] == usize::MAX {
            component_of_root[root] = groups_by_component.len();
            groups_by_component.push(Vec::new());
        }
        groups_by_component[component_of_root[root]].push(g);
    }

    let mut local = vec![0usize; structure.total()];
    let mut out = Vec::with_capacity(groups_by_component.len());
    for groups in groups_by_component {
        let mut next = 0;
        for &g in &groups {
            for x in structure.group_range(g) {
                local[x] = next;
                next += 1;
            }
        }
        let blocks: Vec<Vec<usize>> = p
            .blocks()
            .iter()
            .filter(|b| groups.binary_search(&structure.group_of(b[0])).is_ok())
            .map(|b| b.iter().map(|&x| local[x]).collect())
            .collect();
        let sub = BlockStructure::new(groups.iter().map(|&g| structure.orders()[g]).collect())?;
        out.push(Component {
            groups,
            structure: sub,
            partition: Partition::new(next, blocks)?,
        });
    }
    Ok(out)
}

/// Inverse of [`connected_components`]: embeds the local pieces back into
/// the global structure.
pub fn reassemble(components: &[Component], structure: &BlockStructure) -> Result<Partition> {
    let mut blocks = Vec::new();
    for c in components {
        let global: Vec<usize> = c
            .groups
            .iter()
            .flat_map(|&g| structure.group_range(g))
            .collect();
        if global.len() != c.partition.n() {
            return argument("component does not match its groups");
        }
        for block in c.partition.blocks() {
            blocks.push(block.iter().map(|&x| global[x]).collect());
        }
    }
    Partition::new(structure.total(), blocks)
}

/// `C_m = binom(2m, m) / (m + 1)`; exact for `m <= 60`.
pub fn catalan(m: u32) -> u128 {
    let mut c: u128 = 1;
    for k in 0..m as u128 {
        c = c * 2 * (2 * k + 1) / (k + 2);
    }
    c
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }

    fn components(&mut self) -> usize {
        (0..self.parent.len())
            .filter(|&x| self.find(x) == x)
            .count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(blocks: &[&[usize]]) -> Partition {
        Partition::from_one_based(blocks.iter().map(|b| b.to_vec()).collect()).unwrap()
    }

    fn s(orders: &[usize]) -> BlockStructure {
        BlockStructure::new(orders.to_vec()).unwrap()
    }

    #[test]
    fn crossing_examples() {
        assert!(p(&[&[1, 3], &[2, 4]]).is_crossing());
        assert!(!p(&[&[1, 4], &[2, 3]]).is_crossing());
        assert!(!p(&[&[1, 2, 3, 4]]).is_crossing());
        assert!(p(&[&[1, 3, 5], &[2, 6], &[4]]).is_crossing());
        assert!(!p(&[&[1, 5, 6], &[2, 4], &[3]]).is_crossing());
    }

    #[test]
    fn rejects_malformed_partitions() {
        assert!(Partition::new(3, vec![vec![0, 1]]).is_err());
        assert!(Partition::new(2, vec![vec![0, 1], vec![1]]).is_err());
        assert!(Partition::new(2, vec![vec![0, 1], vec![]]).is_err());
        assert!(Partition::new(2, vec![vec![0, 2]]).is_err());
        assert!(Partition::from_one_based(vec![vec![0, 1]]).is_err());
    }

    #[test]
    fn blocks_are_ordered_by_least_element() {
        let q = Partition::new(4, vec![vec![3, 1], vec![2, 0]]).unwrap();
        assert_eq!(q.blocks(), &[vec![0, 2], vec![1, 3]]);
        assert_eq!(q.labels(), vec![0, 1, 0, 1]);
        assert_eq!(q.to_string(), "{{1,3},{2,4}}");
    }

    #[test]
    fn json_is_one_based() {
        let q = p(&[&[1, 4], &[2, 3]]);
        assert_eq!(serde_json::to_string(&q).unwrap(), "[[1,4],[2,3]]");
        let back: Partition = serde_json::from_str("[[2,3],[4,1]]").unwrap();
        assert_eq!(back, q);
        assert!(serde_json::from_str::<Partition>("[[1,1]]").is_err());
    }

    #[test]
    fn small_enumerations() {
        assert_eq!(
            enumerate(4, PartitionClass::NoncrossingAll).unwrap().len(),
            14
        );
        assert_eq!(
            enumerate(4, PartitionClass::NoncrossingPairings).unwrap(),
            vec![p(&[&[1, 2], &[3, 4]]), p(&[&[1, 4], &[2, 3]])]
        );
        assert_eq!(
            enumerate(4, PartitionClass::NoncrossingNoSingletons).unwrap(),
            vec![
                p(&[&[1, 2, 3, 4]]),
                p(&[&[1, 2], &[3, 4]]),
                p(&[&[1, 4], &[2, 3]]),
            ]
        );
        assert!(enumerate(1, PartitionClass::NoncrossingNoSingletons)
            .unwrap()
            .is_empty());
        assert_eq!(enumerate(1, PartitionClass::All).unwrap().len(), 1);
        assert_eq!(enumerate(4, PartitionClass::All).unwrap().len(), 15);
        assert_eq!(enumerate(4, PartitionClass::Pairings).unwrap().len(), 3);
    }

    #[test]
    fn capacity_limits() {
        assert!(matches!(
            enumerate(11, PartitionClass::All),
            Err(Error::Capacity { limit: 10, .. })
        ));
        assert!(matches!(
            enumerate(17, PartitionClass::NoncrossingPairings),
            Err(Error::Capacity { limit: 16, .. })
        ));
        assert!(enumerate(0, PartitionClass::NoncrossingAll).is_err());
        assert!(enumerate(16, PartitionClass::NoncrossingPairings).is_ok());
    }

    #[test]
    fn output_is_lexicographic() {
        for class in [PartitionClass::NoncrossingAll, PartitionClass::All] {
            let parts = enumerate(6, class).unwrap();
            let labels: Vec<_> = parts.iter().map(Partition::labels).collect();
            assert!(labels.windows(2).all(|w| w[0] < w[1]), "{class}");
        }
    }

    #[test]
    fn catalan_numbers() {
        let expected = [1u128, 1, 2, 5, 14, 42, 132, 429, 1430, 4862, 16796];
        for (m, &c) in expected.iter().enumerate() {
            assert_eq!(catalan(m as u32), c);
        }
        assert_eq!(catalan(16), 35_357_670);
    }

    #[test]
    fn respects_examples() {
        assert!(respects(&p(&[&[1, 4], &[2, 3]]), &s(&[2, 2])).unwrap());
        assert!(!respects(&p(&[&[1, 2], &[3, 4]]), &s(&[2, 2])).unwrap());
        for q in enumerate(4, PartitionClass::All).unwrap() {
            assert!(respects(&q, &s(&[1, 1, 1, 1])).unwrap());
        }
        assert!(matches!(
            respects(&p(&[&[1, 2]]), &s(&[2, 2])),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn connects_examples() {
        assert!(connects(&p(&[&[1, 4], &[2, 3]]), &s(&[2, 2])).unwrap());
        assert!(!connects(&p(&[&[1, 2], &[3, 4]]), &s(&[1, 1, 1, 1])).unwrap());
        assert!(connects(&p(&[&[1], &[2], &[3]]), &s(&[3])).unwrap());
        assert!(connects(&p(&[&[1], &[2]]), &s(&[1, 1])).is_ok());
        assert!(connects(&p(&[&[1]]), &s(&[1])).unwrap());
        assert!(connects(&p(&[&[1, 2], &[3, 4]]), &s(&[2, 2])).is_err());
    }

    #[test]
    fn components_of_two_pairs() {
        let q = p(&[&[1, 2], &[3, 4]]);
        let st = s(&[1, 1, 1, 1]);
        let comps = connected_components(&q, &st).unwrap();
        assert_eq!(comps.len(), 2);
        assert_eq!(comps[0].groups, vec![0, 1]);
        assert_eq!(comps[0].partition, p(&[&[1, 2]]));
        assert_eq!(comps[1].groups, vec![2, 3]);
        assert_eq!(comps[1].partition, p(&[&[1, 2]]));
        assert_eq!(reassemble(&comps, &st).unwrap(), q);
    }

    #[test]
    fn components_of_three_cycle_is_single() {
        // {1,6} links groups 1 and 3, {2,3} links 1 and 2, {4,5} links 2 and 3.
        let q = p(&[&[1, 6], &[2, 3], &[4, 5]]);
        let st = s(&[2, 2, 2]);
        let comps = connected_components(&q, &st).unwrap();
        assert_eq!(comps.len(), 1);
        assert_eq!(comps[0].partition, q);
        assert_eq!(comps[0].structure, st);
    }

    #[test]
    fn components_interleaved_groups() {
        // nested pairs: {1,4} links groups 1 and 4, {2,3} links 2 and 3
        let st = s(&[1, 1, 1, 1]);
        let q = p(&[&[1, 4], &[2, 3]]);
        let comps = connected_components(&q, &st).unwrap();
        assert_eq!(comps.len(), 2);
        assert_eq!(comps[0].groups, vec![0, 3]);
        assert_eq!(comps[1].groups, vec![1, 2]);
        assert_eq!(reassemble(&comps, &st).unwrap(), q);
    }

    #[test]
    fn respecting_examples() {
        let nc2 = PartitionClass::NoncrossingNoSingletons;
        assert_eq!(
            enumerate_respecting(&s(&[2, 2]), nc2, false).unwrap(),
            vec![p(&[&[1, 4], &[2, 3]])]
        );
        assert_eq!(
            enumerate_respecting(&s(&[1, 1]), nc2, false).unwrap(),
            vec![p(&[&[1, 2]])]
        );
        assert!(enumerate_respecting(&s(&[1, 2]), nc2, false)
            .unwrap()
            .is_empty());
        assert!(enumerate_respecting(&s(&[1, 1]), PartitionClass::NoSingletons, false).is_err());
    }

    #[test]
    fn respecting_matches_filter() {
        for orders in [
            vec![1, 2, 1],
            vec![2, 2, 2],
            vec![1, 1, 1, 1, 1],
            vec![3, 1, 2],
        ] {
            let st = s(&orders);
            for class in [
                PartitionClass::NoncrossingAll,
                PartitionClass::NoncrossingPairings,
                PartitionClass::NoncrossingNoSingletons,
                PartitionClass::NoncrossingNoSingletonsWithBigBlock,
            ] {
                for connected in [false, true] {
                    let direct = enumerate_respecting(&st, class, connected).unwrap();
                    let filtered: Vec<_> = enumerate(st.total(), class)
                        .unwrap()
                        .into_iter()
                        .filter(|q| respects(q, &st).unwrap())
                        .filter(|q| !connected || connects(q, &st).unwrap())
                        .collect();
                    assert_eq!(direct, filtered, "{st} {class} {connected}");
                }
            }
        }
    }
}

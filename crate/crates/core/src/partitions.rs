//! Set partitions of `{1,…,g}`, their common refinement, and block-intersection
//! matrices taken up to independent row and column permutation.
//!
//! Partitions are stored as restricted growth strings: element `i` (0-based
//! internally) carries the index of its block, and blocks are numbered in order
//! of their least element. Every public interface speaks 1-based elements.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::ser::{Serialize, SerializeStruct, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PartitionError {
    #[error("ground set of size {0} admits no proper partition (need g >= 2)")]
    GroundTooSmall(usize),
    #[error("ground sizes differ: {0} vs {1}")]
    GroundMismatch(usize, usize),
    #[error("invalid blocks: {0}")]
    InvalidBlocks(String),
    #[error("invalid intersection matrix: {0}")]
    InvalidMatrix(String),
    #[error("cannot parse partition {0:?}")]
    Parse(String),
}

/// A partition of `{1,…,g}` into disjoint nonempty blocks.
///
/// Equality, hashing and ordering are those of the canonical restricted growth
/// string, so two partitions with the same blocks always compare equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SetPartition {
    labels: Vec<u32>,
    block_count: usize,
}

impl SetPartition {
    /// Builds a partition from arbitrary block labels, one per element.
    pub fn from_labels<L: Copy + Eq + std::hash::Hash>(labels: &[L]) -> Result<Self, PartitionError> {
        if labels.is_empty() {
            return Err(PartitionError::InvalidBlocks("empty ground set".into()));
        }
        let mut seen: Vec<L> = Vec::new();
        let mut rgs = Vec::with_capacity(labels.len());
        for l in labels {
            let idx = match seen.iter().position(|s| s == l) {
                Some(i) => i,
                None => {
                    seen.push(*l);
                    seen.len() - 1
                }
            };
            rgs.push(idx as u32);
        }
        Ok(Self { labels: rgs, block_count: seen.len() })
    }

    /// Builds a partition of `{1,…,ground_size}` from 1-based blocks.
    pub fn from_blocks(ground_size: usize, blocks: &[Vec<usize>]) -> Result<Self, PartitionError> {
        if ground_size == 0 {
            return Err(PartitionError::InvalidBlocks("empty ground set".into()));
        }
        let mut owner: Vec<Option<usize>> = vec![None; ground_size];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(PartitionError::InvalidBlocks(format!("block {} is empty", b + 1)));
            }
            for &e in block {
                if e == 0 || e > ground_size {
                    return Err(PartitionError::InvalidBlocks(format!(
                        "element {e} outside 1..={ground_size}"
                    )));
                }
                if owner[e - 1].replace(b).is_some() {
                    return Err(PartitionError::InvalidBlocks(format!("element {e} appears twice")));
                }
            }
        }
        let labels: Vec<usize> = owner
            .iter()
            .enumerate()
            .map(|(i, o)| o.ok_or_else(|| PartitionError::InvalidBlocks(format!("element {} is uncovered", i + 1))))
            .collect::<Result<_, _>>()?;
        Self::from_labels(&labels)
    }

    /// The partition into `g` singletons.
    pub fn singletons(g: usize) -> Self {
        assert!(g > 0, "empty ground set");
        Self { labels: (0..g as u32).collect(), block_count: g }
    }

    /// The one-block partition `(1⋯g)`.
    pub fn whole(g: usize) -> Self {
        assert!(g > 0, "empty ground set");
        Self { labels: vec![0; g], block_count: 1 }
    }

    /// Consecutive interval blocks with the given sizes, e.g. `[1, 3]` gives `{1|234}`.
    pub fn intervals(sizes: &[usize]) -> Result<Self, PartitionError> {
        if sizes.is_empty() || sizes.contains(&0) {
            return Err(PartitionError::InvalidBlocks(format!("bad block sizes {sizes:?}")));
        }
        let labels: Vec<usize> = sizes
            .iter()
            .enumerate()
            .flat_map(|(b, &n)| std::iter::repeat(b).take(n))
            .collect();
        Self::from_labels(&labels)
    }

    pub fn ground_size(&self) -> usize {
        self.labels.len()
    }

    pub fn num_blocks(&self) -> usize {
        self.block_count
    }

    pub fn is_proper(&self) -> bool {
        self.block_count >= 2
    }

    /// Restricted growth string (0-based block index of each element).
    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    /// Blocks as sorted lists of 1-based elements, ordered by least element.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut blocks = vec![Vec::new(); self.block_count];
        for (i, &b) in self.labels.iter().enumerate() {
            blocks[b as usize].push(i + 1);
        }
        blocks
    }

    /// Block lengths in canonical block order.
    pub fn block_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.block_count];
        for &b in &self.labels {
            sizes[b as usize] += 1;
        }
        sizes
    }

    /// Adjoins the element `g + 1`, either to the existing block `block`
    /// (0-based canonical index) or, for `None`, as a new singleton.
    pub fn with_element_inserted(&self, block: Option<usize>) -> Result<Self, PartitionError> {
        let label = match block {
            Some(b) if b < self.block_count => b as u32,
            Some(b) => {
                return Err(PartitionError::InvalidBlocks(format!(
                    "no block {b} in a partition with {} blocks",
                    self.block_count
                )))
            }
            None => self.block_count as u32,
        };
        let mut labels = self.labels.clone();
        labels.push(label);
        let block_count = self.block_count + usize::from(block.is_none());
        Ok(Self { labels, block_count })
    }

    /// Applies a relabelling `x ↦ perm[x-1]` of `{1,…,g}` (1-based images).
    pub fn relabel(&self, perm: &[usize]) -> Result<Self, PartitionError> {
        let g = self.ground_size();
        if perm.len() != g {
            return Err(PartitionError::GroundMismatch(g, perm.len()));
        }
        let mut labels = vec![u32::MAX; g];
        for (x, &image) in perm.iter().enumerate() {
            if image == 0 || image > g || labels[image - 1] != u32::MAX {
                return Err(PartitionError::InvalidBlocks(format!("{perm:?} is not a permutation")));
            }
            labels[image - 1] = self.labels[x];
        }
        Self::from_labels(&labels)
    }

    /// True when every block of `self` lies inside a block of `other`.
    pub fn refines(&self, other: &SetPartition) -> bool {
        if self.ground_size() != other.ground_size() {
            return false;
        }
        let mut image = vec![u32::MAX; self.block_count];
        self.labels.iter().zip(&other.labels).all(|(&a, &b)| {
            let slot = &mut image[a as usize];
            if *slot == u32::MAX {
                *slot = b;
            }
            *slot == b
        })
    }
}

impl fmt::Display for SetPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sep = if self.ground_size() > 9 { "," } else { "" };
        let rendered: Vec<String> = self
            .blocks()
            .iter()
            .map(|b| b.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(sep))
            .collect();
        write!(f, "{{{}}}", rendered.join("|"))
    }
}

impl FromStr for SetPartition {
    type Err = PartitionError;

    /// Parses `12|3`, `{12|3}` or, for larger ground sets, `1,2|3|10`.
    /// The ground size is the largest element mentioned.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || PartitionError::Parse(s.to_string());
        let body = s.trim().trim_start_matches('{').trim_end_matches('}');
        // a ground set of ten or more always mentions 10
        let numbers = body.contains(',') || body.contains('0');
        let mut blocks = Vec::new();
        for part in body.split('|') {
            let part = part.trim();
            let block: Vec<usize> = if numbers {
                part.split(',').map(|t| t.trim().parse().map_err(|_| bad())).collect::<Result<_, _>>()?
            } else {
                part.chars().map(|c| c.to_digit(10).map(|d| d as usize).ok_or_else(bad)).collect::<Result<_, _>>()?
            };
            blocks.push(block);
        }
        let g = blocks.iter().flatten().copied().max().ok_or_else(bad)?;
        Self::from_blocks(g, &blocks)
    }
}

impl Serialize for SetPartition {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.blocks())
    }
}

/// Iterator over all partitions of `{1,…,g}` in restricted-growth-string order,
/// starting from the one-block partition.
#[derive(Debug, Clone)]
pub struct Partitions {
    labels: Vec<u32>,
    // prefix_max[i] = max(labels[..i]), with prefix_max[0] unused
    prefix_max: Vec<u32>,
    done: bool,
}

impl Partitions {
    pub fn new(g: usize) -> Self {
        Self { labels: vec![0; g], prefix_max: vec![0; g], done: g == 0 }
    }
}

impl Iterator for Partitions {
    type Item = SetPartition;

    fn next(&mut self) -> Option<SetPartition> {
        if self.done {
            return None;
        }
        let block_count = self.prefix_max.last().map_or(0, |&m| m.max(*self.labels.last().unwrap())) as usize + 1;
        let current = SetPartition { labels: self.labels.clone(), block_count };

        let n = self.labels.len();
        let mut i = n - 1;
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            if self.labels[i] <= self.prefix_max[i] {
                self.labels[i] += 1;
                for j in i + 1..n {
                    self.labels[j] = 0;
                    self.prefix_max[j] = self.prefix_max[j - 1].max(self.labels[j - 1]);
                }
                break;
            }
            i -= 1;
        }
        Some(current)
    }
}

/// Every partition of `{1,…,g}` with at least two blocks, in restricted-growth
/// order. There are `Bell(g) − 1` of them.
pub fn enumerate_proper_partitions(g: usize) -> Result<Vec<SetPartition>, PartitionError> {
    if g < 2 {
        return Err(PartitionError::GroundTooSmall(g));
    }
    Ok(Partitions::new(g).filter(SetPartition::is_proper).collect())
}

/// Common refinement: blocks are the nonempty pairwise intersections.
pub fn meet(lambda: &SetPartition, mu: &SetPartition) -> Result<SetPartition, PartitionError> {
    check_ground(lambda, mu)?;
    let pairs: Vec<(u32, u32)> = lambda.labels.iter().copied().zip(mu.labels.iter().copied()).collect();
    SetPartition::from_labels(&pairs)
}

fn check_ground(lambda: &SetPartition, mu: &SetPartition) -> Result<(), PartitionError> {
    if lambda.ground_size() != mu.ground_size() {
        return Err(PartitionError::GroundMismatch(lambda.ground_size(), mu.ground_size()));
    }
    Ok(())
}

/// Block-intersection profile of a pair of partitions, stored in canonical form.
///
/// Rows are ordered by descending row sum and columns by descending column
/// sum; within those constraints the representative is the one whose
/// row-major flattening is lexicographically greatest. Two matrices that differ
/// by row and column permutations therefore have identical canonical forms.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntersectionMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<u32>,
    total: usize,
}

impl IntersectionMatrix {
    /// Canonicalizes a raw matrix given as rows.
    pub fn new(raw: &[Vec<u32>]) -> Result<Self, PartitionError> {
        let rows = raw.len();
        let cols = raw.first().map_or(0, Vec::len);
        if rows == 0 || cols == 0 {
            return Err(PartitionError::InvalidMatrix("matrix must be at least 1x1".into()));
        }
        if raw.iter().any(|r| r.len() != cols) {
            return Err(PartitionError::InvalidMatrix("ragged rows".into()));
        }
        let entries: Vec<u32> = raw.iter().flatten().copied().collect();
        Self::from_flat(rows, cols, entries)
    }

    fn from_flat(rows: usize, cols: usize, entries: Vec<u32>) -> Result<Self, PartitionError> {
        if rows > 64 {
            return Err(PartitionError::InvalidMatrix("more than 64 rows".into()));
        }
        if (0..rows).any(|i| entries[i * cols..(i + 1) * cols].iter().all(|&x| x == 0)) {
            return Err(PartitionError::InvalidMatrix("zero row".into()));
        }
        if (0..cols).any(|j| (0..rows).all(|i| entries[i * cols + j] == 0)) {
            return Err(PartitionError::InvalidMatrix("zero column".into()));
        }
        let total = entries.iter().map(|&x| x as usize).sum();
        let entries = canonical_form(rows, cols, &entries);
        Ok(Self { rows, cols, entries, total })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn entry(&self, row: usize, col: usize) -> u32 {
        self.entries[row * self.cols + col]
    }

    pub fn entries(&self) -> impl Iterator<Item = u32> + '_ {
        self.entries.iter().copied()
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        self.entries.chunks(self.cols).map(<[u32]>::to_vec).collect()
    }

    pub fn row_sums(&self) -> Vec<u32> {
        self.entries.chunks(self.cols).map(|r| r.iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<u32> {
        (0..self.cols).map(|j| (0..self.rows).map(|i| self.entry(i, j)).sum()).collect()
    }

    /// A pair of partitions realizing this profile: rows become the blocks of
    /// the first, columns the blocks of the second.
    pub fn realize(&self) -> (SetPartition, SetPartition) {
        let mut row_labels = Vec::with_capacity(self.total);
        let mut col_labels = Vec::with_capacity(self.total);
        for i in 0..self.rows {
            for j in 0..self.cols {
                for _ in 0..self.entry(i, j) {
                    row_labels.push(i);
                    col_labels.push(j);
                }
            }
        }
        (
            SetPartition::from_labels(&row_labels).expect("nonempty"),
            SetPartition::from_labels(&col_labels).expect("nonempty"),
        )
    }
}

impl fmt::Display for IntersectionMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .to_rows()
            .iter()
            .map(|r| format!("[{}]", r.iter().map(u32::to_string).collect::<Vec<_>>().join(",")))
            .collect();
        write!(f, "[{}]", rows.join(","))
    }
}

impl Serialize for IntersectionMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("IntersectionMatrix", 4)?;
        s.serialize_field("rows", &self.rows)?;
        s.serialize_field("cols", &self.cols)?;
        s.serialize_field("entries", &self.to_rows())?;
        s.serialize_field("total", &self.total)?;
        s.end()
    }
}

/// Entry `(j,k)` is `|λ_j ∩ μ_k|`; the result is canonicalized.
pub fn intersection_matrix(lambda: &SetPartition, mu: &SetPartition) -> Result<IntersectionMatrix, PartitionError> {
    check_ground(lambda, mu)?;
    let (rows, cols) = (lambda.num_blocks(), mu.num_blocks());
    let mut entries = vec![0u32; rows * cols];
    for (&a, &b) in lambda.labels.iter().zip(&mu.labels) {
        entries[a as usize * cols + b as usize] += 1;
    }
    IntersectionMatrix::from_flat(rows, cols, entries)
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct SearchState {
    remaining: u64,
    classes: Vec<Vec<usize>>,
}

/// Level-by-level search for the lexicographically greatest row-major
/// flattening, rows restricted to descending row sum and columns to
/// descending column sum. Once the first `k` rows are fixed, the first `k`
/// rows of the sorted result are fixed too, so each level only keeps the
/// partial orders that tie for the best row.
fn canonical_form(rows: usize, cols: usize, entries: &[u32]) -> Vec<u32> {
    let at = |i: usize, j: usize| entries[i * cols + j];
    let row_sum: Vec<u32> = (0..rows).map(|i| (0..cols).map(|j| at(i, j)).sum()).collect();
    let col_sum: Vec<u32> = (0..cols).map(|j| (0..rows).map(|i| at(i, j)).sum()).collect();

    let mut sorted_row_sums = row_sum.clone();
    sorted_row_sums.sort_unstable_by(|a, b| b.cmp(a));

    let mut col_order: Vec<usize> = (0..cols).collect();
    col_order.sort_by(|&a, &b| col_sum[b].cmp(&col_sum[a]));
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for &j in &col_order {
        match classes.last_mut() {
            Some(last) if col_sum[last[0]] == col_sum[j] => last.push(j),
            _ => classes.push(vec![j]),
        }
    }

    let all_rows = if rows == 64 { u64::MAX } else { (1u64 << rows) - 1 };
    let mut frontier = vec![SearchState { remaining: all_rows, classes }];
    let mut out = Vec::with_capacity(rows * cols);

    for &target in &sorted_row_sums {
        let mut best: Option<Vec<u32>> = None;
        let mut next: Vec<SearchState> = Vec::new();
        for state in &frontier {
            let mut tried: HashSet<&[u32]> = HashSet::new();
            for r in 0..rows {
                if state.remaining & (1 << r) == 0 || row_sum[r] != target {
                    continue;
                }
                if !tried.insert(&entries[r * cols..(r + 1) * cols]) {
                    continue;
                }
                let mut candidate = Vec::with_capacity(cols);
                let mut refined = Vec::with_capacity(state.classes.len());
                for class in &state.classes {
                    let mut members = class.clone();
                    members.sort_by(|&a, &b| at(r, b).cmp(&at(r, a)).then(a.cmp(&b)));
                    let mut start = 0;
                    while start < members.len() {
                        let v = at(r, members[start]);
                        let mut end = start;
                        while end < members.len() && at(r, members[end]) == v {
                            candidate.push(v);
                            end += 1;
                        }
                        refined.push(members[start..end].to_vec());
                        start = end;
                    }
                }
                let successor = SearchState { remaining: state.remaining & !(1 << r), classes: refined };
                match best.as_ref().map(|b| candidate.cmp(b)) {
                    None | Some(std::cmp::Ordering::Greater) => {
                        best = Some(candidate);
                        next.clear();
                        next.push(successor);
                    }
                    Some(std::cmp::Ordering::Equal) => next.push(successor),
                    Some(std::cmp::Ordering::Less) => {}
                }
            }
        }
        for s in &mut next {
            for c in &mut s.classes {
                c.sort_unstable();
            }
        }
        next.sort();
        next.dedup();
        frontier = next;
        out.extend(best.expect("a row with the target sum exists"));
    }
    out
}

/// Integer partitions of `n` into exactly `parts` positive parts, non-increasing.
pub(crate) fn integer_partitions(n: usize, parts: usize) -> Vec<Vec<usize>> {
    fn go(n: usize, parts: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if parts == 0 {
            if n == 0 {
                out.push(cur.clone());
            }
            return;
        }
        if n < parts {
            return;
        }
        for first in (1..=max.min(n - (parts - 1))).rev() {
            if first * parts < n {
                break;
            }
            cur.push(first);
            go(n - first, parts - 1, first, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, parts, n, &mut Vec::new(), &mut out);
    out
}

/// All integer partitions of `n` with at least two parts.
pub(crate) fn margins(n: usize) -> Vec<Vec<usize>> {
    (2..=n).flat_map(|k| integer_partitions(n, k)).collect()
}

/// Calls `visit` with every non-negative matrix (row-major) having the given
/// row and column sums, where consecutive rows of equal sum are lexicographically
/// non-increasing.
pub(crate) fn for_each_table(row_sums: &[usize], col_sums: &[usize], visit: &mut dyn FnMut(&[u32])) {
    let cols = col_sums.len();
    let mut table = vec![0u32; row_sums.len() * cols];
    let mut caps: Vec<u32> = col_sums.iter().map(|&c| c as u32).collect();
    fill_row(row_sums, 0, 0, row_sums[0] as u32, &mut caps, &mut table, cols, visit);
}

#[allow(clippy::too_many_arguments)]
fn fill_row(
    row_sums: &[usize],
    row: usize,
    col: usize,
    left: u32,
    caps: &mut [u32],
    table: &mut [u32],
    cols: usize,
    visit: &mut dyn FnMut(&[u32]),
) {
    if col == cols {
        if left != 0 {
            return;
        }
        if row > 0 && row_sums[row] == row_sums[row - 1] {
            let (prev, cur) = table[(row - 1) * cols..(row + 1) * cols].split_at(cols);
            if cur > prev {
                return;
            }
        }
        if row + 1 == row_sums.len() {
            if caps.iter().all(|&c| c == 0) {
                visit(table);
            }
            return;
        }
        let next = row_sums[row + 1] as u32;
        fill_row(row_sums, row + 1, 0, next, caps, table, cols, visit);
        return;
    }
    let room: u32 = caps[col + 1..].iter().sum();
    let lo = left.saturating_sub(room);
    let hi = left.min(caps[col]);
    for v in (lo..=hi).rev() {
        table[row * cols + col] = v;
        caps[col] -= v;
        fill_row(row_sums, row, col + 1, left - v, caps, table, cols, visit);
        caps[col] += v;
    }
    table[row * cols + col] = 0;
}

/// Every canonical intersection profile realizable by a pair of proper
/// partitions of `{1,…,g}`: total `g`, at least two rows and two columns, no
/// zero row or column. Returned in ascending canonical order.
pub fn enumerate_matrix_types(g: usize) -> Result<Vec<IntersectionMatrix>, PartitionError> {
    if g < 2 {
        return Err(PartitionError::GroundTooSmall(g));
    }
    let all = margins(g);
    let pairs: Vec<(&Vec<usize>, &Vec<usize>)> =
        all.iter().flat_map(|r| all.iter().map(move |c| (r, c))).collect();
    let found: BTreeSet<IntersectionMatrix> = pairs
        .par_iter()
        .map(|(r, c)| {
            let mut local = BTreeSet::new();
            for_each_table(r, c, &mut |t| {
                let m = IntersectionMatrix::from_flat(r.len(), c.len(), t.to_vec())
                    .expect("margins are positive");
                local.insert(m);
            });
            local
        })
        .reduce(BTreeSet::new, |mut a, b| {
            a.extend(b);
            a
        });
    Ok(found.into_iter().collect())
}

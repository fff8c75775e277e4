//! Morse-stratification indices for the diagonal `U(n)` action on a product
//! of Grassmannians `Gr_{l_1}(C^n) x ... x Gr_{l_r}(C^n)`.
//!
//! An index is a list of blocks `(k_i, m_i)` with strictly decreasing slopes
//! `k_i / m_i` and `sum m_i = n`, `sum k_i = sum l_j`, together with an
//! `s x r` matrix whose row `i` sums to `k_i`, whose column `j` sums to `l_j`
//! and whose entries satisfy `0 <= l_ij <= m_i`. Row `i` of the matrix is the
//! weight list of the rank-`m_i` subsystem attached to block `i`.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    Complex,
    Real,
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Flavor::Complex => f.write_str("complex"),
            Flavor::Real => f.write_str("real"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StrataError {
    #[error("invalid system: {0}")]
    InvalidSpec(String),
    #[error("index {index} has negative codimension {codim}")]
    NegativeCodimension { index: StratumIndex, codim: i64 },
    #[error("index {index} has odd codimension {codim}")]
    OddCodimension { index: StratumIndex, codim: i64 },
}

/// Product-of-Grassmannians system: rank, weights `l_1..l_r`, flavor.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SystemSpec {
    rank: usize,
    weights: Vec<usize>,
    flavor: Flavor,
}

impl SystemSpec {
    pub fn new(rank: usize, weights: Vec<usize>, flavor: Flavor) -> Result<Self, StrataError> {
        if rank == 0 {
            return Err(StrataError::InvalidSpec("rank must be positive".into()));
        }
        if weights.is_empty() {
            return Err(StrataError::InvalidSpec("need at least one weight".into()));
        }
        if let Some(&l) = weights.iter().find(|&&l| l > rank) {
            return Err(StrataError::InvalidSpec(format!("weight {l} exceeds rank {rank}")));
        }
        Ok(SystemSpec { rank, weights, flavor })
    }

    pub fn complex(rank: usize, weights: Vec<usize>) -> Result<Self, StrataError> {
        Self::new(rank, weights, Flavor::Complex)
    }

    pub fn real(rank: usize, weights: Vec<usize>) -> Result<Self, StrataError> {
        Self::new(rank, weights, Flavor::Real)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn weights(&self) -> &[usize] {
        &self.weights
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn with_flavor(&self, flavor: Flavor) -> Self {
        SystemSpec { flavor, ..self.clone() }
    }

    pub fn total_weight(&self) -> usize {
        self.weights.iter().sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Block {
    pub k: usize,
    pub m: usize,
}

/// One index `(beta, l)` of the stratification.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StratumIndex {
    pub blocks: Vec<Block>,
    pub matrix: Vec<Vec<usize>>,
}

impl StratumIndex {
    /// Number of blocks `s`.
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn is_minimal(&self) -> bool {
        self.blocks.len() == 1
    }

    /// Checks every structural constraint against the given system.
    pub fn validate(&self, rank: usize, weights: &[usize]) -> Result<(), String> {
        let s = self.blocks.len();
        if s == 0 {
            return Err("no blocks".into());
        }
        if self.matrix.len() != s || self.matrix.iter().any(|row| row.len() != weights.len()) {
            return Err("matrix shape does not match blocks x weights".into());
        }
        if self.blocks.iter().any(|b| b.m == 0) {
            return Err("block of size zero".into());
        }
        if self.blocks.iter().map(|b| b.m).sum::<usize>() != rank {
            return Err("block sizes do not sum to the rank".into());
        }
        if self.blocks.iter().map(|b| b.k).sum::<usize>() != weights.iter().sum::<usize>() {
            return Err("block weights do not sum to the total weight".into());
        }
        if !self
            .blocks
            .windows(2)
            .all(|w| slope_cmp(&w[0], &w[1]) == Ordering::Greater)
        {
            return Err("slopes are not strictly decreasing".into());
        }
        for (block, row) in self.blocks.iter().zip(&self.matrix) {
            if row.iter().sum::<usize>() != block.k {
                return Err("row sum differs from k_i".into());
            }
            if row.iter().any(|&x| x > block.m) {
                return Err("entry exceeds block size".into());
            }
        }
        for (j, &l) in weights.iter().enumerate() {
            if self.matrix.iter().map(|row| row[j]).sum::<usize>() != l {
                return Err(format!("column {j} does not sum to {l}"));
            }
        }
        Ok(())
    }

    /// Dimension of the Levi subgroup `prod U(m_i)`.
    pub fn levi_dim(&self) -> usize {
        self.blocks.iter().map(|b| b.m * b.m).sum()
    }
}

impl Ord for StratumIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.blocks
            .len()
            .cmp(&other.blocks.len())
            .then_with(|| self.blocks.cmp(&other.blocks))
            .then_with(|| self.matrix.cmp(&other.matrix))
    }
}

impl PartialOrd for StratumIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for StratumIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("blocks ")?;
        for (i, b) in self.blocks.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "({},{})", b.k, b.m)?;
        }
        f.write_str(" matrix ")?;
        for (i, row) in self.matrix.iter().enumerate() {
            if i > 0 {
                f.write_str(";")?;
            }
            let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            write!(f, "[{}]", cells.join(","))?;
        }
        Ok(())
    }
}

/// `a.k / a.m` against `b.k / b.m`, exactly.
fn slope_cmp(a: &Block, b: &Block) -> Ordering {
    (a.k * b.m).cmp(&(b.k * a.m))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StratumData {
    pub index: StratumIndex,
    pub half_index: usize,
    pub codim_complex: usize,
    pub codim_real: usize,
}

/// All indices for `spec`, sorted by block count, then blocks, then matrix.
pub fn enumerate_indices(spec: &SystemSpec) -> Vec<StratumIndex> {
    enumerate_for(spec.rank, &spec.weights)
}

pub(crate) fn enumerate_for(rank: usize, weights: &[usize]) -> Vec<StratumIndex> {
    let total: usize = weights.iter().sum();
    let mut out = Vec::new();
    let mut sizes = Vec::new();
    compositions(rank, &mut sizes, &mut |sizes| {
        let mut ks = Vec::new();
        block_weights(sizes, weights, total, &mut ks, &mut |blocks| {
            let mut matrix = vec![vec![0; weights.len()]; blocks.len()];
            let mut room: Vec<usize> = blocks.iter().map(|b| b.k).collect();
            fill_columns(blocks, weights, 0, &mut matrix, &mut room, &mut |matrix| {
                out.push(StratumIndex {
                    blocks: blocks.to_vec(),
                    matrix: matrix.to_vec(),
                });
            });
        });
    });
    out.sort();
    out
}

fn compositions(rest: usize, parts: &mut Vec<usize>, emit: &mut dyn FnMut(&[usize])) {
    if rest == 0 {
        emit(parts);
        return;
    }
    for m in 1..=rest {
        parts.push(m);
        compositions(rest - m, parts, emit);
        parts.pop();
    }
}

/// Chooses `k_i` per block, with strictly decreasing slopes and `k_i` no
/// larger than what the weights can place in a block of size `m_i`.
fn block_weights(
    sizes: &[usize],
    weights: &[usize],
    rest: usize,
    blocks: &mut Vec<Block>,
    emit: &mut dyn FnMut(&[Block]),
) {
    let i = blocks.len();
    if i == sizes.len() {
        if rest == 0 {
            emit(blocks);
        }
        return;
    }
    let m = sizes[i];
    let capacity: usize = weights.iter().map(|&l| l.min(m)).sum();
    for k in 0..=rest.min(capacity) {
        let block = Block { k, m };
        if let Some(prev) = blocks.last() {
            if slope_cmp(prev, &block) != Ordering::Greater {
                // Larger k only raises the slope further.
                break;
            }
        }
        blocks.push(block);
        block_weights(sizes, weights, rest - k, blocks, emit);
        blocks.pop();
    }
}

/// Distributes each column sum `l_j` over the rows, bounded by `m_i` and by
/// the remaining row budget.
fn fill_columns(
    blocks: &[Block],
    weights: &[usize],
    j: usize,
    matrix: &mut Vec<Vec<usize>>,
    room: &mut Vec<usize>,
    emit: &mut dyn FnMut(&[Vec<usize>]),
) {
    if j == weights.len() {
        if room.iter().all(|&r| r == 0) {
            emit(matrix);
        }
        return;
    }
    fill_cell(blocks, weights, j, 0, weights[j], matrix, room, emit);
}

#[allow(clippy::too_many_arguments)]
fn fill_cell(
    blocks: &[Block],
    weights: &[usize],
    j: usize,
    i: usize,
    left: usize,
    matrix: &mut Vec<Vec<usize>>,
    room: &mut Vec<usize>,
    emit: &mut dyn FnMut(&[Vec<usize>]),
) {
    if i == blocks.len() {
        if left == 0 {
            fill_columns(blocks, weights, j + 1, matrix, room, emit);
        }
        return;
    }
    let hi = left.min(blocks[i].m).min(room[i]);
    for x in 0..=hi {
        matrix[i][j] = x;
        room[i] -= x;
        fill_cell(blocks, weights, j, i + 1, left - x, matrix, room, emit);
        room[i] += x;
    }
    matrix[i][j] = 0;
}

/// Complex dimension of the negative-weight part of the tangent space at the
/// fixed component: `sum_j sum_{i < i'} l_ij (m_i' - l_i'j)`.
pub fn morse_half_index(index: &StratumIndex) -> usize {
    let s = index.blocks.len();
    let r = index.matrix.first().map_or(0, Vec::len);
    let mut total = 0;
    for j in 0..r {
        for i in 0..s {
            for i2 in (i + 1)..s {
                total += index.matrix[i][j] * (index.blocks[i2].m - index.matrix[i2][j]);
            }
        }
    }
    total
}

/// Signed real codimension `2m - n^2 + sum m_i^2`.
pub fn signed_codim_complex(index: &StratumIndex, rank: usize) -> i64 {
    2 * morse_half_index(index) as i64 - (rank * rank) as i64 + index.levi_dim() as i64
}

pub fn codims(index: &StratumIndex, rank: usize) -> Result<StratumData, StrataError> {
    let codim = signed_codim_complex(index, rank);
    if codim % 2 != 0 {
        return Err(StrataError::OddCodimension {
            index: index.clone(),
            codim,
        });
    }
    if codim < 0 {
        return Err(StrataError::NegativeCodimension {
            index: index.clone(),
            codim,
        });
    }
    let codim = codim as usize;
    Ok(StratumData {
        index: index.clone(),
        half_index: morse_half_index(index),
        codim_complex: codim,
        codim_real: codim / 2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn idx(blocks: &[(usize, usize)], matrix: &[&[usize]]) -> StratumIndex {
        StratumIndex {
            blocks: blocks.iter().map(|&(k, m)| Block { k, m }).collect(),
            matrix: matrix.iter().map(|r| r.to_vec()).collect(),
        }
    }

    #[test]
    fn spec_validation() {
        assert!(SystemSpec::complex(0, vec![0]).is_err());
        assert!(SystemSpec::complex(2, vec![]).is_err());
        assert!(SystemSpec::complex(2, vec![3]).is_err());
        assert!(SystemSpec::real(2, vec![2, 0, 1]).is_ok());
    }

    #[test]
    fn rank_one_has_single_index() {
        let spec = SystemSpec::complex(1, vec![1, 0]).unwrap();
        assert_eq!(enumerate_indices(&spec), vec![idx(&[(1, 1)], &[&[1, 0]])]);
    }

    #[test]
    fn single_projective_line() {
        let spec = SystemSpec::complex(2, vec![1]).unwrap();
        let got = enumerate_indices(&spec);
        assert_eq!(
            got,
            vec![idx(&[(1, 2)], &[&[1]]), idx(&[(1, 1), (0, 1)], &[&[1], &[0]])]
        );
        assert_eq!(morse_half_index(&got[0]), 0);
        assert_eq!(morse_half_index(&got[1]), 1);
        let data = codims(&got[1], 2).unwrap();
        assert_eq!((data.codim_complex, data.codim_real), (0, 0));
    }

    #[test]
    fn three_points_on_a_line() {
        let spec = SystemSpec::complex(2, vec![1, 1, 1]).unwrap();
        let got = enumerate_indices(&spec);
        assert_eq!(got.len(), 5);
        assert_eq!(got[0], idx(&[(3, 2)], &[&[1, 1, 1]]));
        let two_one: Vec<_> = got
            .iter()
            .filter(|x| x.blocks == vec![Block { k: 2, m: 1 }, Block { k: 1, m: 1 }])
            .collect();
        assert_eq!(two_one.len(), 3);
        for x in two_one {
            let d = codims(x, 2).unwrap();
            assert_eq!((d.half_index, d.codim_complex, d.codim_real), (2, 2, 1));
        }
        let collide = idx(&[(3, 1), (0, 1)], &[&[1, 1, 1], &[0, 0, 0]]);
        assert!(got.contains(&collide));
        assert_eq!(morse_half_index(&collide), 3);
        assert_eq!(codims(&collide, 2).unwrap().codim_complex, 4);
    }

    #[test]
    fn negative_codimension_is_reported() {
        // Gr_1(C^3) is one orbit; this index has an empty fixed-point subsystem.
        let x = idx(&[(1, 2), (0, 1)], &[&[1, 0], &[0, 0]]);
        assert!(x.validate(3, &[1, 0]).is_ok());
        assert!(matches!(
            codims(&x, 3),
            Err(StrataError::NegativeCodimension { codim: -2, .. })
        ));
    }

    #[test]
    fn enumerated_indices_validate() {
        for n in 1..=4 {
            for weights in [vec![1], vec![1, 2], vec![n, 0, 1], vec![1, 1, 1, 1, 1]] {
                let Ok(spec) = SystemSpec::complex(n, weights.clone()) else {
                    continue;
                };
                let all = enumerate_indices(&spec);
                assert_eq!(all.iter().filter(|x| x.is_minimal()).count(), 1);
                let mut sorted = all.clone();
                sorted.sort();
                sorted.dedup();
                assert_eq!(sorted, all);
                for x in &all {
                    x.validate(n, &weights).unwrap();
                    assert_eq!(signed_codim_complex(x, n) % 2, 0);
                }
                assert_eq!(codims(&all[0], n).unwrap().codim_complex, 0);
            }
        }
    }

    #[test]
    fn validate_catches_violations() {
        assert!(idx(&[(1, 1), (1, 1)], &[&[1], &[1]]).validate(2, &[2]).is_err());
        assert!(idx(&[(2, 1), (0, 1)], &[&[2], &[0]]).validate(2, &[2]).is_err());
        assert!(idx(&[(1, 2)], &[&[1]]).validate(3, &[1]).is_err());
    }
}

//! Fixed-particle-number basis: one combination of occupied modes per
//! species, ranked in colexicographic order.

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct SectorBlock {
    pub offset: usize,
    pub len: usize,
    pub count: usize,
    pub stride: usize,
    pub size: usize,
}

/// Sector basis over every species block of a space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sector {
    pub(crate) blocks: Vec<SectorBlock>,
    binom: Vec<Vec<usize>>,
    masks: Vec<u64>,
}

fn binomials(n: usize) -> Vec<Vec<usize>> {
    let mut c = vec![vec![0usize; n + 2]; n + 1];
    for i in 0..=n {
        c[i][0] = 1;
        for k in 1..=i {
            c[i][k] = c[i - 1][k - 1] + if k <= i - 1 { c[i - 1][k] } else { 0 };
        }
    }
    c
}

/// All `len`-bit masks with `count` ones, ascending (which is colex order).
fn combinations(len: usize, count: usize) -> Vec<u64> {
    let mut out = Vec::new();
    if count > len {
        return out;
    }
    if count == 0 {
        out.push(0);
        return out;
    }
    let mut m: u64 = (1u64 << count) - 1;
    let limit = if len == 64 { u64::MAX } else { (1u64 << len) - 1 };
    while m <= limit {
        out.push(m);
        // Gosper's hack
        let c = m & m.wrapping_neg();
        let r = m + c;
        if r == 0 {
            break;
        }
        m = (((r ^ m) >> 2) / c) | r;
    }
    out
}

impl Sector {
    /// `counts[b]` particles in the block `ranges[b] = (offset, len)`.
    pub fn new(ranges: &[(usize, usize)], counts: &[usize], max_dim: usize) -> Result<Self> {
        if counts.len() != ranges.len() {
            return Err(Error::Shape { rows: counts.len(), cols: 1, expected: ranges.len() });
        }
        let longest = ranges.iter().map(|b| b.1).max().unwrap_or(0);
        let binom = binomials(longest);
        let mut blocks = Vec::with_capacity(ranges.len());
        let mut dim = 1usize;
        for (&(offset, len), &count) in ranges.iter().zip(counts) {
            if count > len {
                return Err(Error::OccupationOutOfRange { index: count, modes: len });
            }
            let size = binom[len][count];
            dim = dim.checked_mul(size).filter(|&d| d <= max_dim).ok_or(Error::SectorTooLarge(dim.saturating_mul(size), max_dim))?;
            blocks.push(SectorBlock { offset, len, count, stride: 0, size });
        }
        let mut stride = 1;
        for blk in blocks.iter_mut().rev() {
            blk.stride = stride;
            stride *= blk.size;
        }
        let mut masks = vec![0u64];
        for blk in &blocks {
            let local = combinations(blk.len, blk.count);
            let mut next = Vec::with_capacity(masks.len() * local.len());
            for &m in &masks {
                for &l in &local {
                    next.push(m | (l << blk.offset));
                }
            }
            masks = next;
        }
        Ok(Sector { blocks, binom, masks })
    }

    pub fn dim(&self) -> usize {
        self.masks.len()
    }

    pub fn counts(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.count).collect()
    }

    #[inline]
    pub fn mask(&self, index: usize) -> u64 {
        self.masks[index]
    }

    pub fn masks(&self) -> &[u64] {
        &self.masks
    }

    /// Rank of a global occupation mask, `None` when it lies outside the sector.
    #[inline]
    pub fn index_of(&self, mask: u64) -> Option<usize> {
        let mut index = 0;
        let mut covered = 0u64;
        for blk in &self.blocks {
            let field = if blk.len == 64 { u64::MAX } else { (1u64 << blk.len) - 1 };
            covered |= field << blk.offset;
            let mut local = (mask >> blk.offset) & field;
            if local.count_ones() as usize != blk.count {
                return None;
            }
            let mut rank = 0;
            let mut k = 1;
            while local != 0 {
                let pos = local.trailing_zeros() as usize;
                rank += self.binom[pos][k];
                k += 1;
                local &= local - 1;
            }
            index += rank * blk.stride;
        }
        if mask & !covered != 0 {
            return None;
        }
        Some(index)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spmodel::{build_space, ModelSpace, ShellSpec, Species};

    fn ranges(space: &ModelSpace) -> Vec<(usize, usize)> {
        space.blocks().iter().map(|b| (b.offset, b.len)).collect()
    }

    #[test]
    fn ranks_invert_masks() {
        let space = build_space(&[
            ShellSpec { species: Species::Proton, j: 1.5 },
            ShellSpec { species: Species::Neutron, j: 0.5 },
            ShellSpec { species: Species::Neutron, j: 2.5 },
        ])
        .unwrap();
        let s = Sector::new(&ranges(&space), &[2, 3], 1 << 20).unwrap();
        assert_eq!(s.dim(), 6 * 56);
        for i in 0..s.dim() {
            assert_eq!(s.index_of(s.mask(i)), Some(i));
        }
        assert_eq!(s.index_of(0b1), None);
    }

    #[test]
    fn size_limit_is_enforced() {
        let space = ModelSpace::sd_shell(&[Species::Proton, Species::Neutron]);
        assert!(matches!(Sector::new(&ranges(&space), &[6, 6], 1000), Err(Error::SectorTooLarge(..))));
    }
}

//! O(1) range-minimum over a `u32` array in O(n) words.
//!
//! Blocks of 64 entries. Inside a block, `masks[j]` records which positions
//! of the block are suffix minima of `block[..=j]`; the minimum of
//! `[l..=r]` is the lowest such position at or after `l`. Whole blocks are
//! covered by a sparse table over the block minima.

const BLOCK: usize = 64;

#[derive(Clone, Debug, Default)]
pub struct Rmq {
    values: Vec<u32>,
    masks: Vec<u64>,
    // sparse[k][b] = min of blocks b .. b + 2^k
    sparse: Vec<Vec<u32>>,
}

impl Rmq {
    pub fn new(values: Vec<u32>) -> Self {
        let n = values.len();
        let mut masks = vec![0u64; n];
        let mut block_min = Vec::with_capacity(n.div_ceil(BLOCK));
        for start in (0..n).step_by(BLOCK) {
            let end = (start + BLOCK).min(n);
            let mut stack = 0u64;
            let mut min = u32::MAX;
            for j in start..end {
                let v = values[j];
                while stack != 0 {
                    let top = 63 - stack.leading_zeros() as usize;
                    if values[start + top] >= v {
                        stack &= !(1u64 << top);
                    } else {
                        break;
                    }
                }
                stack |= 1u64 << (j - start);
                masks[j] = stack;
                min = min.min(v);
            }
            block_min.push(min);
        }
        let mut sparse = vec![block_min];
        let mut width = 1;
        while 2 * width <= sparse[0].len() {
            let prev = sparse.last().unwrap();
            let next: Vec<u32> = (0..prev.len() - width)
                .map(|b| prev[b].min(prev[b + width]))
                .collect();
            sparse.push(next);
            width *= 2;
        }
        Self {
            values,
            masks,
            sparse,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    #[inline]
    fn in_block(&self, l: usize, r: usize) -> u32 {
        let base = r - r % BLOCK;
        let m = self.masks[r] & (u64::MAX << (l - base));
        self.values[base + m.trailing_zeros() as usize]
    }

    /// Minimum of `values[l..=r]`.
    #[inline]
    pub fn min(&self, l: usize, r: usize) -> u32 {
        assert!(l <= r && r < self.values.len(), "bad range {l}..={r}");
        let (bl, br) = (l / BLOCK, r / BLOCK);
        if bl == br {
            return self.in_block(l, r);
        }
        let mut m = self
            .in_block(l, bl * BLOCK + BLOCK - 1)
            .min(self.in_block(br * BLOCK, r));
        if bl + 1 < br {
            let (a, b) = (bl + 1, br - 1);
            let k = (usize::BITS - 1 - (b - a + 1).leading_zeros()) as usize;
            m = m.min(self.sparse[k][a]).min(self.sparse[k][b + 1 - (1 << k)]);
        }
        m
    }
}

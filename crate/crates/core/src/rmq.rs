/// Sparse-table range minimum over a `u32` array: O(n log n) build, O(1) query.
#[derive(Debug, Clone)]
pub struct SparseTable {
    levels: Vec<Vec<u32>>,
}

impl SparseTable {
    pub fn new(values: &[u32]) -> Self {
        let mut levels = vec![values.to_vec()];
        let mut width = 1;
        while 2 * width <= values.len() {
            let prev = levels.last().unwrap();
            let next: Vec<u32> = (0..prev.len() - width)
                .map(|i| prev[i].min(prev[i + width]))
                .collect();
            levels.push(next);
            width *= 2;
        }
        SparseTable { levels }
    }

    pub fn len(&self) -> usize {
        self.levels[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels[0].is_empty()
    }

    /// Minimum of `values[lo..hi]`; `lo < hi` required.
    #[inline]
    pub fn min(&self, lo: usize, hi: usize) -> u32 {
        debug_assert!(lo < hi && hi <= self.len());
        let k = (usize::BITS - 1 - (hi - lo).leading_zeros()) as usize;
        let row = &self.levels[k];
        row[lo].min(row[hi - (1 << k)])
    }
}

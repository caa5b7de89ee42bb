//! Dense bit matrices for reachability queries on face posets.

#[derive(Clone, Debug)]
pub(crate) struct BitMatrix {
    words_per_row: usize,
    bits: Vec<u64>,
}

impl BitMatrix {
    pub fn new(rows: usize, cols: usize) -> Self {
        let words_per_row = cols.div_ceil(64);
        BitMatrix {
            words_per_row,
            bits: vec![0u64; rows * words_per_row],
        }
    }

    pub fn set(&mut self, row: usize, col: usize) {
        self.bits[row * self.words_per_row + col / 64] |= 1u64 << (col % 64);
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.bits[row * self.words_per_row + col / 64] & (1u64 << (col % 64)) != 0
    }

    pub fn row(&self, row: usize) -> &[u64] {
        &self.bits[row * self.words_per_row..(row + 1) * self.words_per_row]
    }

    /// dst |= src, rowwise. src and dst must differ.
    pub fn or_row_into(&mut self, src: usize, dst: usize) {
        assert_ne!(src, dst);
        let w = self.words_per_row;
        for k in 0..w {
            let v = self.bits[src * w + k];
            self.bits[dst * w + k] |= v;
        }
    }
}

/// Set bits common to both rows, as indices.
pub(crate) fn and_ones(a: &[u64], b: &[u64]) -> Vec<usize> {
    let mut out = Vec::new();
    for (w, (x, y)) in a.iter().zip(b).enumerate() {
        let mut m = x & y;
        while m != 0 {
            let t = m.trailing_zeros() as usize;
            out.push(w * 64 + t);
            m &= m - 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn or_row_into_both_directions() {
        let mut m = BitMatrix::new(2, 130);
        m.set(0, 3);
        m.set(0, 129);
        m.set(1, 64);
        m.or_row_into(0, 1);
        assert!(m.get(1, 3) && m.get(1, 64) && m.get(1, 129));
        let mut m2 = BitMatrix::new(2, 130);
        m2.set(1, 65);
        m2.or_row_into(1, 0);
        assert!(m2.get(0, 65));
        assert_eq!(and_ones(m2.row(0), m2.row(1)), vec![65]);
    }
}

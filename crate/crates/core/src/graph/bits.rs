//! Word-level helpers for packed bit rows.

#[inline]
pub fn words_for(n: usize) -> usize {
    n.div_ceil(64)
}

#[inline]
pub fn get(row: &[u64], j: usize) -> bool {
    row[j >> 6] >> (j & 63) & 1 == 1
}

#[inline]
pub fn set(row: &mut [u64], j: usize) {
    row[j >> 6] |= 1u64 << (j & 63);
}

#[inline]
pub fn clear(row: &mut [u64], j: usize) {
    row[j >> 6] &= !(1u64 << (j & 63));
}

#[inline]
pub fn popcount(row: &[u64]) -> u32 {
    row.iter().map(|w| w.count_ones()).sum()
}

#[inline]
pub fn and_popcount(a: &[u64], b: &[u64]) -> u32 {
    a.iter().zip(b).map(|(x, y)| (x & y).count_ones()).sum()
}

#[inline]
pub fn and3_popcount(a: &[u64], b: &[u64], c: &[u64]) -> u32 {
    a.iter()
        .zip(b)
        .zip(c)
        .map(|((x, y), z)| (x & y & z).count_ones())
        .sum()
}

/// Iterates the indices of set bits in ascending order.
pub fn ones(row: &[u64]) -> impl Iterator<Item = usize> + '_ {
    row.iter().enumerate().flat_map(|(wi, &w)| {
        let mut w = w;
        std::iter::from_fn(move || {
            if w == 0 {
                None
            } else {
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + b)
            }
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_get_iterate() {
        let mut row = vec![0u64; words_for(130)];
        for j in [0, 5, 63, 64, 129] {
            set(&mut row, j);
        }
        assert!(get(&row, 63) && get(&row, 64) && !get(&row, 65));
        assert_eq!(ones(&row).collect::<Vec<_>>(), vec![0, 5, 63, 64, 129]);
        assert_eq!(popcount(&row), 5);
        clear(&mut row, 5);
        assert_eq!(popcount(&row), 4);
    }
}

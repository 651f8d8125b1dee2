//! Subset helpers.
//!
//! Two representations are used: [`FixedBitSet`] for element and point sets
//! of arbitrary size, and plain `u64` masks for the ground sets of set
//! functions, which are enumerated exhaustively and never exceed 64 points.

use fixedbitset::FixedBitSet;

/// A set of group element indices.
pub type ElementSet = FixedBitSet;
/// A set of points of the acted-upon set.
pub type PointSet = FixedBitSet;
/// A subset of a ground set of at most 64 points, bit `i` meaning point `i`.
pub type Mask = u64;

pub fn set_of(universe: usize, members: impl IntoIterator<Item = usize>) -> FixedBitSet {
    let mut s = FixedBitSet::with_capacity(universe);
    for m in members {
        s.insert(m);
    }
    s
}

pub fn full_set(universe: usize) -> FixedBitSet {
    let mut s = FixedBitSet::with_capacity(universe);
    s.insert_range(..);
    s
}

pub fn members(set: &FixedBitSet) -> Vec<usize> {
    set.ones().collect()
}

pub fn size(set: &FixedBitSet) -> usize {
    set.count_ones(..)
}

pub fn mask_members(mask: Mask) -> Vec<usize> {
    MaskIter(mask).collect()
}

pub fn mask_of(members: impl IntoIterator<Item = usize>) -> Mask {
    members.into_iter().fold(0, |m, i| m | (1u64 << i))
}

pub fn mask_len(mask: Mask) -> usize {
    mask.count_ones() as usize
}

/// The mask with the lowest `n` bits set.
pub fn ground_mask(n: usize) -> Mask {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

pub fn mask_to_set(mask: Mask, universe: usize) -> FixedBitSet {
    set_of(universe, MaskIter(mask))
}

pub fn set_to_mask(set: &FixedBitSet) -> Mask {
    mask_of(set.ones())
}

/// Iterates the set bits of a mask in ascending order.
#[derive(Clone, Copy)]
pub struct MaskIter(pub Mask);

impl Iterator for MaskIter {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(i)
    }
}

/// Iterates all submasks of `mask` in ascending numeric order, including 0.
pub fn submasks(mask: Mask) -> impl Iterator<Item = Mask> {
    // Enumerate by counting through the compressed index space.
    let positions: Vec<usize> = mask_members(mask);
    let count: u64 = 1u64 << positions.len();
    (0..count).map(move |k| {
        let mut m = 0;
        for (j, &p) in positions.iter().enumerate() {
            if k >> j & 1 == 1 {
                m |= 1u64 << p;
            }
        }
        m
    })
}

/// Lexicographic comparison of two masks as sorted member lists.
pub fn lex_cmp(a: Mask, b: Mask) -> std::cmp::Ordering {
    MaskIter(a).cmp(MaskIter(b))
}

/// Image of a mask under a map on ground points given by lookup tables over
/// bytes: `tables[k][b]` is the OR of the images of the bits of byte value `b`
/// at byte position `k`.
#[derive(Clone, Debug)]
pub struct ByteImageTable {
    tables: Vec<[Mask; 256]>,
}

impl ByteImageTable {
    /// `images[i]` is the mask associated with ground point `i`.
    pub fn new(images: &[Mask]) -> Self {
        let chunks = images.len().div_ceil(8).max(1);
        let mut tables = vec![[0u64; 256]; chunks];
        for (k, table) in tables.iter_mut().enumerate() {
            for b in 1..256usize {
                let low = b.trailing_zeros() as usize;
                let point = 8 * k + low;
                let img = images.get(point).copied().unwrap_or(0);
                table[b] = table[b & (b - 1)] | img;
            }
        }
        ByteImageTable { tables }
    }

    #[inline]
    pub fn image(&self, mask: Mask) -> Mask {
        let mut out = 0;
        let mut m = mask;
        let mut k = 0;
        while m != 0 {
            out |= self.tables[k][(m & 0xff) as usize];
            m >>= 8;
            k += 1;
        }
        out
    }
}

/// Sizes of unions `|⋃_{i ∈ mask} S_i|` for a fixed family of point sets.
///
/// When the union of the whole family has at most 64 points the sets are
/// renumbered into masks and unions go through a [`ByteImageTable`].
#[derive(Clone, Debug)]
pub enum UnionCounter {
    Small(ByteImageTable),
    Large(Vec<FixedBitSet>),
}

impl UnionCounter {
    pub fn new(sets: Vec<FixedBitSet>) -> Self {
        let mut all = FixedBitSet::new();
        for s in &sets {
            all.grow(s.len());
            all.union_with(s);
        }
        let points: Vec<usize> = all.ones().collect();
        if points.len() > 64 {
            return UnionCounter::Large(sets);
        }
        let mut slot = vec![0usize; all.len()];
        for (i, &p) in points.iter().enumerate() {
            slot[p] = i;
        }
        let masks: Vec<Mask> = sets.iter().map(|s| mask_of(s.ones().map(|p| slot[p]))).collect();
        UnionCounter::Small(ByteImageTable::new(&masks))
    }

    #[inline]
    pub fn count(&self, mask: Mask) -> usize {
        match self {
            UnionCounter::Small(t) => t.image(mask).count_ones() as usize,
            UnionCounter::Large(sets) => {
                let mut acc = FixedBitSet::new();
                for i in MaskIter(mask) {
                    acc.grow(sets[i].len());
                    acc.union_with(&sets[i]);
                }
                acc.count_ones(..)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn submasks_enumerate_all() {
        let subs: Vec<Mask> = submasks(0b1010).collect();
        assert_eq!(subs, vec![0, 0b10, 0b1000, 0b1010]);
    }

    #[test]
    fn byte_table_matches_direct_or() {
        let images: Vec<Mask> = (0..20).map(|i| (i * 2654435761u64) & 0xfffff).collect();
        let table = ByteImageTable::new(&images);
        for mask in [0u64, 1, 0b1011, 0xfffff, 0x80001, 0x5a5a5] {
            let direct = MaskIter(mask).fold(0, |acc, i| acc | images[i]);
            assert_eq!(table.image(mask), direct);
        }
    }

    #[test]
    fn union_counter_paths_agree() {
        let sets: Vec<FixedBitSet> = (0..10).map(|i| set_of(200, [i, 3 * i + 7, 19 * i % 200])).collect();
        let small = UnionCounter::new(sets.clone());
        assert!(matches!(small, UnionCounter::Small(_)));
        let large = UnionCounter::Large(sets);
        for mask in 0..1024u64 {
            assert_eq!(small.count(mask), large.count(mask));
        }
    }

    #[test]
    fn lex_order_compares_member_lists() {
        // {0, 3} < {1}
        assert_eq!(lex_cmp(0b1001, 0b10), std::cmp::Ordering::Less);
        assert_eq!(mask_members(0b1001), vec![0, 3]);
    }
}

//! Packed GF(2) vectors and row reduction.
//!
//! Bit `i` lives in word `i / 64` at position `i % 64`. Row-reduced bases keep
//! every row's pivot at its lowest set bit and clear that bit from all other
//! rows, so reducing a vector against the basis yields the lexicographically
//! least element of its coset.

use std::cmp::Ordering;
use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Bits {
    words: Vec<u64>,
    len: usize,
}

impl Bits {
    pub fn zeros(len: usize) -> Self {
        Bits { words: vec![0; len.div_ceil(64)], len }
    }

    pub fn ones(len: usize) -> Self {
        let mut b = Bits { words: vec![u64::MAX; len.div_ceil(64)], len };
        b.clear_tail();
        b
    }

    pub fn singleton(len: usize, i: usize) -> Self {
        let mut b = Bits::zeros(len);
        b.set(i, true);
        b
    }

    pub fn from_indices(len: usize, idx: impl IntoIterator<Item = usize>) -> Self {
        let mut b = Bits::zeros(len);
        for i in idx {
            b.set(i, true);
        }
        b
    }

    /// Low `len` bits of `mask` (len <= 64).
    pub fn from_mask(len: usize, mask: u64) -> Self {
        assert!(len <= 64);
        let mut b = Bits::zeros(len);
        if len > 0 {
            b.words[0] = mask;
            b.clear_tail();
        }
        b
    }

    pub fn from_words(len: usize, words: Vec<u64>) -> Self {
        assert_eq!(words.len(), len.div_ceil(64));
        let mut b = Bits { words, len };
        b.clear_tail();
        b
    }

    fn clear_tail(&mut self) {
        let r = self.len % 64;
        if r != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << r) - 1;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i >> 6] >> (i & 63)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, v: bool) {
        debug_assert!(i < self.len);
        if v {
            self.words[i >> 6] |= 1 << (i & 63);
        } else {
            self.words[i >> 6] &= !(1 << (i & 63));
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i >> 6] ^= 1 << (i & 63);
    }

    #[inline]
    pub fn xor_assign(&mut self, other: &Bits) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= *b;
        }
    }

    pub fn xor(&self, other: &Bits) -> Bits {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn first_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }

    pub fn ones_iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let t = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * 64 + t)
                }
            })
        })
    }

    /// Lexicographic order on the bit sequence (index 0 first, `0 < 1`).
    pub fn lex_cmp(&self, other: &Bits) -> Ordering {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter().zip(&other.words) {
            let diff = a ^ b;
            if diff != 0 {
                let t = diff.trailing_zeros();
                return if (a >> t) & 1 == 0 { Ordering::Less } else { Ordering::Greater };
            }
        }
        Ordering::Equal
    }

    /// Little-endian byte encoding, `ceil(len / 8)` bytes.
    pub fn to_bytes(&self) -> Vec<u8> {
        let nbytes = self.len.div_ceil(8);
        self.words.iter().flat_map(|w| w.to_le_bytes()).take(nbytes).collect()
    }

    pub fn from_bytes(len: usize, bytes: &[u8]) -> Option<Bits> {
        if bytes.len() != len.div_ceil(8) {
            return None;
        }
        let mut words = vec![0u64; len.div_ceil(64)];
        for (i, &b) in bytes.iter().enumerate() {
            words[i / 8] |= (b as u64) << ((i % 8) * 8);
        }
        let b = Bits { words, len };
        // reject stray bits beyond len
        let mut trimmed = b.clone();
        trimmed.clear_tail();
        (trimmed == b).then_some(b)
    }
}

impl fmt::Debug for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = (0..self.len).map(|i| if self.get(i) { '1' } else { '0' }).collect();
        write!(f, "Bits({s})")
    }
}

/// A subspace of GF(2)^len in reduced row-echelon form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rref {
    len: usize,
    /// Sorted by pivot.
    rows: Vec<Bits>,
    pivots: Vec<usize>,
}

impl Rref {
    pub fn new(len: usize) -> Self {
        Rref { len, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn from_vectors(len: usize, vs: impl IntoIterator<Item = Bits>) -> Self {
        let mut r = Rref::new(len);
        for v in vs {
            r.insert(v);
        }
        r
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Bits] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Reduces `v` to the lexicographically least element of `v + span`.
    pub fn reduce(&self, v: &Bits) -> Bits {
        let mut out = v.clone();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if out.get(p) {
                out.xor_assign(row);
            }
        }
        out
    }

    pub fn contains(&self, v: &Bits) -> bool {
        self.reduce(v).is_zero()
    }

    /// Returns true when `v` enlarged the span.
    pub fn insert(&mut self, v: Bits) -> bool {
        assert_eq!(v.len(), self.len);
        let v = self.reduce(&v);
        let Some(p) = v.first_one() else {
            return false;
        };
        for row in &mut self.rows {
            if row.get(p) {
                row.xor_assign(&v);
            }
        }
        let at = self.pivots.partition_point(|&q| q < p);
        self.rows.insert(at, v);
        self.pivots.insert(at, p);
        true
    }

    /// Indices that are not pivots; vectors supported on them are exactly the
    /// reduced coset representatives.
    pub fn free_positions(&self) -> Vec<usize> {
        let mut is_pivot = vec![false; self.len];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        (0..self.len).filter(|&i| !is_pivot[i]).collect()
    }
}

/// Row reduction of a linear map given by the images of unit vectors;
/// yields rank, kernel and preimages.
#[derive(Clone, Debug)]
pub struct LinearMap {
    domain: usize,
    codomain: usize,
    /// (pivot, image, combination of unit vectors producing the image)
    rows: Vec<(usize, Bits, Bits)>,
    kernel: Rref,
}

impl LinearMap {
    pub fn new(domain: usize, codomain: usize, images: &[Bits]) -> Self {
        assert_eq!(images.len(), domain);
        let mut rows: Vec<(usize, Bits, Bits)> = Vec::new();
        let mut by_pivot: std::collections::HashMap<usize, usize> = Default::default();
        let mut kernel = Rref::new(domain);
        for (i, img) in images.iter().enumerate() {
            let mut v = img.clone();
            let mut combo = Bits::singleton(domain, i);
            while let Some(p) = v.first_one() {
                match by_pivot.get(&p) {
                    Some(&r) => {
                        v.xor_assign(&rows[r].1);
                        combo.xor_assign(&rows[r].2);
                    }
                    None => break,
                }
            }
            match v.first_one() {
                Some(p) => {
                    by_pivot.insert(p, rows.len());
                    rows.push((p, v, combo));
                }
                None => {
                    kernel.insert(combo);
                }
            }
        }
        rows.sort_by_key(|r| r.0);
        LinearMap { domain, codomain, rows, kernel }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn domain(&self) -> usize {
        self.domain
    }

    pub fn codomain(&self) -> usize {
        self.codomain
    }

    pub fn kernel(&self) -> &Rref {
        &self.kernel
    }

    /// Image subspace in reduced form.
    pub fn image(&self) -> Rref {
        Rref::from_vectors(self.codomain, self.rows.iter().map(|r| r.1.clone()))
    }

    /// Some `x` with `f(x) = y`, if `y` lies in the image.
    pub fn preimage(&self, y: &Bits) -> Option<Bits> {
        let mut v = y.clone();
        let mut x = Bits::zeros(self.domain);
        // rows are in echelon form by pivot; sweep repeatedly by lowest bit
        loop {
            let Some(p) = v.first_one() else {
                return Some(x);
            };
            let idx = self.rows.binary_search_by_key(&p, |r| r.0).ok()?;
            v.xor_assign(&self.rows[idx].1);
            x.xor_assign(&self.rows[idx].2);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn basic_ops() {
        let mut b = Bits::zeros(70);
        b.set(3, true);
        b.set(65, true);
        assert_eq!(b.count_ones(), 2);
        assert_eq!(b.ones_iter().collect::<Vec<_>>(), vec![3, 65]);
        assert_eq!(b.first_one(), Some(3));
        b.flip(3);
        assert_eq!(b.first_one(), Some(65));
        assert_eq!(Bits::ones(70).count_ones(), 70);
    }

    #[test]
    fn lex_order_prefers_zero_first() {
        let a = Bits::from_indices(4, [1]);
        let b = Bits::from_indices(4, [0]);
        assert_eq!(a.lex_cmp(&b), Ordering::Less);
        assert_eq!(b.lex_cmp(&a), Ordering::Greater);
        assert_eq!(a.lex_cmp(&a), Ordering::Equal);
    }

    #[test]
    fn rref_dimension_and_membership() {
        let mut r = Rref::new(3);
        assert!(r.insert(Bits::from_indices(3, [0, 1])));
        assert!(r.insert(Bits::from_indices(3, [1, 2])));
        assert!(!r.insert(Bits::from_indices(3, [0, 2])));
        assert_eq!(r.dim(), 2);
        assert!(r.contains(&Bits::from_indices(3, [0, 2])));
        assert!(!r.contains(&Bits::from_indices(3, [0])));
        assert_eq!(r.free_positions(), vec![2]);
    }

    #[test]
    fn linear_map_kernel_and_preimage() {
        // boundary-like map from 3 edges of a triangle to 1 face
        let images = vec![Bits::ones(1), Bits::ones(1), Bits::ones(1)];
        let f = LinearMap::new(3, 1, &images);
        assert_eq!(f.rank(), 1);
        assert_eq!(f.kernel().dim(), 2);
        let x = f.preimage(&Bits::ones(1)).unwrap();
        assert_eq!(x.count_ones() % 2, 1);
    }

    fn arb_bits(len: usize) -> impl Strategy<Value = Bits> {
        proptest::collection::vec(any::<bool>(), len)
            .prop_map(move |v| Bits::from_indices(len, v.iter().enumerate().filter(|x| *x.1).map(|x| x.0)))
    }

    proptest! {
        #[test]
        fn reduce_gives_lex_least_coset_element(
            basis in proptest::collection::vec(arb_bits(9), 0..5),
            v in arb_bits(9),
        ) {
            let r = Rref::from_vectors(9, basis.clone());
            let red = r.reduce(&v);
            // brute force the coset
            let rows = r.rows();
            let mut best = v.clone();
            for mask in 0u32..(1 << rows.len()) {
                let mut w = v.clone();
                for (i, row) in rows.iter().enumerate() {
                    if mask >> i & 1 == 1 { w.xor_assign(row); }
                }
                if w.lex_cmp(&best) == Ordering::Less { best = w; }
            }
            prop_assert_eq!(red, best);
        }

        #[test]
        fn bytes_round_trip(v in arb_bits(21)) {
            let back = Bits::from_bytes(21, &v.to_bytes()).unwrap();
            prop_assert_eq!(back, v);
        }

        #[test]
        fn rank_nullity(images in proptest::collection::vec(arb_bits(5), 0..8)) {
            let f = LinearMap::new(images.len(), 5, &images);
            prop_assert_eq!(f.rank() + f.kernel().dim(), images.len());
            for k in f.kernel().rows() {
                let mut y = Bits::zeros(5);
                for i in k.ones_iter() { y.xor_assign(&images[i]); }
                prop_assert!(y.is_zero());
            }
            let img = f.image();
            for row in img.rows() {
                let x = f.preimage(row).unwrap();
                let mut y = Bits::zeros(5);
                for i in x.ones_iter() { y.xor_assign(&images[i]); }
                prop_assert_eq!(&y, row);
            }
        }
    }
}

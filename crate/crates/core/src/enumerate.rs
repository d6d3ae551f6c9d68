//! Gray-code enumeration of affine GF(2) spans with incremental norms.
//!
//! A walk visits `start + span(generators)` once per element. Any number of
//! tracks ride along: a track is a linear image of the walked vector, kept as
//! bits together with its weighted norm. Flipping generator `i` xors the
//! precomputed image delta `i` into every track, so a step costs the size of
//! the deltas rather than a full re-evaluation.
//!
//! The span is split into a fixed number of blocks by the top generators.
//! Blocks run in parallel and results are merged in block order, so the
//! outcome does not depend on the thread count.

use rayon::prelude::*;

use crate::gf2::Bits;

const BLOCK_BITS: usize = 6;

/// A linear image carried along a walk.
#[derive(Clone, Debug)]
pub(crate) struct Track<'a> {
    pub start: Bits,
    /// Image of each generator.
    pub deltas: &'a [Bits],
    pub weights: &'a [u128],
}

impl<'a> Track<'a> {
    pub fn new(start: Bits, deltas: &'a [Bits], weights: &'a [u128]) -> Self {
        Track { start, deltas, weights }
    }
}

/// Current position of a walk.
#[derive(Clone, Debug)]
pub(crate) struct WalkState {
    pub bits: Vec<Bits>,
    pub norms: Vec<u128>,
    /// Coefficients of the generators that are currently switched on.
    pub coeffs: u64,
    /// Xor of the key deltas of the switched-on generators.
    pub key: u64,
}

impl WalkState {
    fn apply(&mut self, tracks: &[Track<'_>], keys: &[u64], g: usize) {
        for (t, track) in tracks.iter().enumerate() {
            let bits = &mut self.bits[t];
            let norm = &mut self.norms[t];
            for i in track.deltas[g].ones_iter() {
                if bits.get(i) {
                    *norm -= track.weights[i];
                } else {
                    *norm += track.weights[i];
                }
            }
            bits.xor_assign(&track.deltas[g]);
        }
        self.coeffs ^= 1 << g;
        if let Some(k) = keys.get(g) {
            self.key ^= k;
        }
    }
}

fn initial_state(tracks: &[Track<'_>]) -> WalkState {
    let bits: Vec<Bits> = tracks.iter().map(|t| t.start.clone()).collect();
    let norms = tracks
        .iter()
        .zip(&bits)
        .map(|(t, b)| b.ones_iter().map(|i| t.weights[i]).sum())
        .collect();
    WalkState { bits, norms, coeffs: 0, key: 0 }
}

/// Number of generators shared by all tracks.
fn generator_count(tracks: &[Track<'_>]) -> usize {
    let m = tracks.first().map_or(0, |t| t.deltas.len());
    debug_assert!(tracks.iter().all(|t| t.deltas.len() == m));
    m
}

/// Visits every element of the span in Gray-code order on the current thread.
pub(crate) fn walk_seq<R>(
    tracks: &[Track<'_>],
    keys: &[u64],
    mut acc: R,
    mut visit: impl FnMut(&mut R, &WalkState),
) -> R {
    let m = generator_count(tracks);
    assert!(m < 64, "span too large to walk");
    let mut state = initial_state(tracks);
    visit(&mut acc, &state);
    for s in 1u64..(1u64 << m) {
        state.apply(tracks, keys, s.trailing_zeros() as usize);
        visit(&mut acc, &state);
    }
    acc
}

/// Parallel walk: one accumulator per block, merged in block order.
pub(crate) fn walk_par<R, I, V, M>(tracks: &[Track<'_>], keys: &[u64], init: I, visit: V, merge: M) -> R
where
    R: Send,
    I: Fn() -> R + Sync,
    V: Fn(&mut R, &WalkState) + Sync,
    M: Fn(R, R) -> R,
{
    let m = generator_count(tracks);
    assert!(m < 64, "span too large to walk");
    let high = m.min(BLOCK_BITS);
    let low = m - high;
    let parts: Vec<R> = (0u64..(1u64 << high))
        .into_par_iter()
        .map(|h| {
            let mut state = initial_state(tracks);
            for b in 0..high {
                if h >> b & 1 == 1 {
                    state.apply(tracks, keys, low + b);
                }
            }
            let mut acc = init();
            visit(&mut acc, &state);
            for s in 1u64..(1u64 << low) {
                state.apply(tracks, keys, s.trailing_zeros() as usize);
                visit(&mut acc, &state);
            }
            acc
        })
        .collect();
    let mut it = parts.into_iter();
    let first = it.next().expect("at least one block");
    it.fold(first, merge)
}

/// Best element seen so far under (norm, lex) order.
#[derive(Clone, Debug)]
pub(crate) struct MinNorm {
    pub norm: u128,
    pub witness: Option<Bits>,
}

impl MinNorm {
    pub fn new() -> Self {
        MinNorm { norm: u128::MAX, witness: None }
    }

    pub fn offer(&mut self, norm: u128, bits: &Bits) {
        let better = match &self.witness {
            None => true,
            Some(w) => norm < self.norm || (norm == self.norm && bits.lex_cmp(w).is_lt()),
        };
        if better {
            self.norm = norm;
            self.witness = Some(bits.clone());
        }
    }

    pub fn merge(mut self, other: MinNorm) -> MinNorm {
        if let Some(w) = &other.witness {
            self.offer(other.norm, w);
        }
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn bits(len: usize, idx: &[usize]) -> Bits {
        Bits::from_indices(len, idx.iter().copied())
    }

    #[test]
    fn visits_every_element_once_with_correct_norms() {
        let gens = vec![bits(5, &[0, 1]), bits(5, &[1, 2, 4]), bits(5, &[3]), bits(5, &[0, 4])];
        let start = bits(5, &[2]);
        let w = [1u128, 2, 4, 8, 16];
        let track = Track::new(start.clone(), &gens, &w);
        let seen = walk_seq(std::slice::from_ref(&track), &[], Vec::new(), |acc, st| {
            let direct: u128 = st.bits[0].ones_iter().map(|i| w[i]).sum();
            assert_eq!(direct, st.norms[0]);
            let mut v = start.clone();
            for (g, gen) in gens.iter().enumerate() {
                if st.coeffs >> g & 1 == 1 {
                    v.xor_assign(gen);
                }
            }
            assert_eq!(v, st.bits[0]);
            acc.push(st.norms[0]);
        });
        assert_eq!(seen.len(), 16);
        let distinct: BTreeSet<u128> = seen.into_iter().collect();
        assert_eq!(distinct.len(), 16);
    }

    #[test]
    fn parallel_matches_sequential() {
        let len = 70;
        let gens: Vec<Bits> = (0..10).map(|i| bits(len, &[i, i + 7, (3 * i) % len, 69 - i])).collect();
        let w: Vec<u128> = (0..len as u128).map(|i| i * i + 1).collect();
        let track = Track::new(bits(len, &[5, 6]), &gens, &w);
        let tracks = std::slice::from_ref(&track);
        let seq = walk_seq(tracks, &[], MinNorm::new(), |m, st| m.offer(st.norms[0], &st.bits[0]));
        let par = walk_par(tracks, &[], MinNorm::new, |m, st| m.offer(st.norms[0], &st.bits[0]), MinNorm::merge);
        assert_eq!(seq.norm, par.norm);
        assert_eq!(seq.witness, par.witness);
        let sum: u128 = walk_par(tracks, &[], || 0u128, |a, st| *a += st.norms[0], |a, b| a + b);
        let sum_seq = walk_seq(tracks, &[], 0u128, |a, st| *a += st.norms[0]);
        assert_eq!(sum, sum_seq);
    }

    #[test]
    fn empty_span_visits_start() {
        let w = [3u128, 5];
        let track = Track::new(bits(2, &[1]), &[], &w);
        let n = walk_par(std::slice::from_ref(&track), &[], || 0usize, |a, st| {
            assert_eq!(st.norms[0], 5);
            *a += 1
        }, |a, b| a + b);
        assert_eq!(n, 1);
    }
}

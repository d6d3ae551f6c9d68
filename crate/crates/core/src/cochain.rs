//! GF(2) cochains, the differential, weighted norms and localization.

use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::complex::{Link, Simplex, WeightedComplex};
use crate::error::{HdxError, Result};
use crate::gf2::{Bits, Rref};
use crate::rational::{from_u128, Rational};

/// An F₂-valued function on `X^(k)`, indexed by the canonical cell order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cochain {
    k: isize,
    bits: Bits,
    complex_id: u64,
}

impl Cochain {
    pub fn new(x: &WeightedComplex, k: isize, bits: Bits) -> Result<Self> {
        x.check_dim(k)?;
        if bits.len() != x.num_cells(k) {
            return Err(HdxError::BadArgs(format!(
                "cochain length {} does not match |X^({k})| = {}",
                bits.len(),
                x.num_cells(k)
            )));
        }
        Ok(Cochain { k, bits, complex_id: x.id() })
    }

    pub fn zero(x: &WeightedComplex, k: isize) -> Result<Self> {
        x.check_dim(k)?;
        Cochain::new(x, k, Bits::zeros(x.num_cells(k)))
    }

    /// Indicator of a set of `k`-simplices.
    pub fn indicator(x: &WeightedComplex, k: isize, simplices: &[Simplex]) -> Result<Self> {
        let mut c = Cochain::zero(x, k)?;
        for s in simplices {
            if s.dim() != k {
                return Err(HdxError::BadArgs(format!("{s} is not a {k}-simplex")));
            }
            let i = x.index_of(s).ok_or_else(|| HdxError::SimplexNotInComplex(s.clone()))?;
            c.bits.flip(i);
        }
        Ok(c)
    }

    pub fn random<R: Rng + ?Sized>(x: &WeightedComplex, k: isize, rng: &mut R) -> Result<Self> {
        x.check_dim(k)?;
        let len = x.num_cells(k);
        let words = (0..len.div_ceil(64)).map(|_| rng.random::<u64>()).collect();
        Cochain::new(x, k, Bits::from_words(len, words))
    }

    pub fn k(&self) -> isize {
        self.k
    }

    pub fn bits(&self) -> &Bits {
        &self.bits
    }

    pub fn into_bits(self) -> Bits {
        self.bits
    }

    pub fn complex_id(&self) -> u64 {
        self.complex_id
    }

    pub fn is_zero(&self) -> bool {
        self.bits.is_zero()
    }

    pub fn support(&self, x: &WeightedComplex) -> Vec<Simplex> {
        let cells = x.cells(self.k);
        self.bits.ones_iter().map(|i| cells[i].clone()).collect()
    }

    pub fn add(&self, other: &Cochain) -> Result<Cochain> {
        if self.k != other.k || self.complex_id != other.complex_id {
            return Err(HdxError::ComplexMismatch);
        }
        Ok(Cochain { k: self.k, bits: self.bits.xor(&other.bits), complex_id: self.complex_id })
    }

    pub fn hex(&self) -> String {
        hex::encode(self.bits.to_bytes())
    }

    pub(crate) fn check(&self, x: &WeightedComplex) -> Result<()> {
        if self.complex_id != x.id() || self.bits.len() != x.num_cells(self.k) {
            return Err(HdxError::ComplexMismatch);
        }
        Ok(())
    }

    pub fn to_file(&self, x: &WeightedComplex) -> CochainFile {
        CochainFile { k: self.k, len: self.bits.len(), bits: self.hex(), complex: x.hash_hex() }
    }

    pub fn from_file(x: &WeightedComplex, f: &CochainFile) -> Result<Cochain> {
        if f.complex != x.hash_hex() {
            return Err(HdxError::ComplexMismatch);
        }
        let bytes = hex::decode(&f.bits).map_err(|e| HdxError::Parse(e.to_string()))?;
        let bits = Bits::from_bytes(f.len, &bytes)
            .ok_or_else(|| HdxError::Parse("cochain bits do not fit the declared length".into()))?;
        Cochain::new(x, f.k, bits)
    }
}

/// Serialized cochain: packed little-endian hex plus the host complex hash.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CochainFile {
    pub k: isize,
    pub len: usize,
    pub bits: String,
    pub complex: String,
}

/// `dφ(σ)` is the parity of the facets of σ in the support of φ.
pub fn differential(x: &WeightedComplex, phi: &Cochain) -> Result<Cochain> {
    phi.check(x)?;
    let bits = differential_bits(x, phi.k, &phi.bits)?;
    Ok(Cochain { k: phi.k + 1, bits, complex_id: phi.complex_id })
}

pub(crate) fn differential_bits(x: &WeightedComplex, k: isize, bits: &Bits) -> Result<Bits> {
    if k >= x.dim() as isize {
        return Err(HdxError::TopDimension { k });
    }
    let mut out = Bits::zeros(x.num_cells(k + 1));
    for i in bits.ones_iter() {
        for &c in x.cofacet_indices(k, i) {
            out.flip(c);
        }
    }
    Ok(out)
}

/// `‖φ‖ = Σ_{φ(τ)=1} m(τ)`.
pub fn norm(x: &WeightedComplex, phi: &Cochain) -> Result<Rational> {
    phi.check(x)?;
    Ok(from_u128(norm_scaled(x, phi.k, &phi.bits), x.denom()))
}

/// Norm as a numerator over `x.denom()`.
pub(crate) fn norm_scaled(x: &WeightedComplex, k: isize, bits: &Bits) -> u128 {
    let w = x.scaled_weights(k);
    bits.ones_iter().map(|i| w[i]).sum()
}

/// The localization `φ_τ(σ) = φ(τ ∪ σ)` as a cochain on the link of τ.
pub fn localize(x: &WeightedComplex, phi: &Cochain, tau: &Simplex) -> Result<(Arc<Link>, Cochain)> {
    phi.check(x)?;
    let j = tau.dim();
    if phi.k - j - 1 < 0 {
        return Err(HdxError::BadDimensions { k: phi.k, j });
    }
    let link = x.link_data(tau)?;
    let bits = localized_bits(&link, phi.k, j, &phi.bits);
    let c = Cochain::new(&link.complex, phi.k - j - 1, bits)?;
    Ok((link, c))
}

/// Bits of `φ_τ` for a `k`-cochain and a `j`-simplex τ with link `link`.
pub(crate) fn localized_bits(link: &Link, k: isize, j: isize, bits: &Bits) -> Bits {
    let kk = k - j - 1;
    let lift = &link.lift[(kk + 1) as usize];
    let mut out = Bits::zeros(lift.len());
    for (i, &p) in lift.iter().enumerate() {
        if bits.get(p) {
            out.set(i, true);
        }
    }
    out
}

/// Which subspace of `C^k` a basis spans.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SubspaceKind {
    /// Coboundaries `B^k = im d_{k-1}`.
    Bk,
    /// Cocycles `Z^k = ker d_k`.
    Zk,
}

/// A reduced GF(2) basis of `B^k` or `Z^k`.
#[derive(Clone, Debug)]
pub struct SubspaceBasis {
    pub k: isize,
    pub kind: SubspaceKind,
    pub basis: Vec<Cochain>,
    pub(crate) rref: Arc<Rref>,
}

impl SubspaceBasis {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn contains(&self, phi: &Cochain) -> bool {
        phi.k == self.k && self.rref.contains(&phi.bits)
    }

    pub fn rref(&self) -> &Rref {
        &self.rref
    }
}

pub fn subspace_basis(x: &WeightedComplex, k: isize, kind: SubspaceKind) -> Result<SubspaceBasis> {
    let rref = match kind {
        SubspaceKind::Bk => x.coboundary_space(k)?,
        SubspaceKind::Zk => x.cocycle_space(k)?,
    };
    let basis = rref
        .rows()
        .iter()
        .map(|r| Cochain { k, bits: r.clone(), complex_id: x.id() })
        .collect();
    Ok(SubspaceBasis { k, kind, basis, rref })
}

/// `dim Z^k − dim B^k`, with constants counted as coboundaries.
pub fn cohomology_dim(x: &WeightedComplex, k: isize) -> Result<usize> {
    if k < 0 {
        return Err(HdxError::BadDimension { k, min: 0, max: x.dim() as isize });
    }
    Ok(x.cocycle_space(k)?.dim() - x.coboundary_space(k)?.dim())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::WeightKind;
    use crate::rational::int;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn s(v: &[u32]) -> Simplex {
        Simplex::new(v.to_vec()).unwrap()
    }

    fn build(tops: &[Vec<u32>]) -> WeightedComplex {
        WeightedComplex::build(tops, &WeightKind::Homogeneous).unwrap()
    }

    #[test]
    fn differential_of_vertex() {
        let x = build(&[vec![0, 1, 2]]);
        let phi = Cochain::indicator(&x, 0, &[s(&[0])]).unwrap();
        let d = differential(&x, &phi).unwrap();
        assert_eq!(d.support(&x), vec![s(&[0, 1]), s(&[0, 2])]);
        let dd = differential(&x, &d).unwrap();
        assert!(dd.is_zero());
        let top = Cochain::zero(&x, 2).unwrap();
        assert!(matches!(differential(&x, &top), Err(HdxError::TopDimension { k: 2 })));
    }

    #[test]
    fn norms() {
        let x = build(&[vec![0, 1, 2]]);
        let phi = Cochain::indicator(&x, 0, &[s(&[0])]).unwrap();
        assert_eq!(norm(&x, &phi).unwrap(), int(2));
        let ones = Cochain::new(&x, 1, Bits::ones(3)).unwrap();
        assert_eq!(norm(&x, &ones).unwrap(), int(3));
        assert_eq!(norm(&x, &Cochain::zero(&x, 1).unwrap()).unwrap(), int(0));
    }

    #[test]
    fn localization() {
        let x = build(&[vec![0, 1, 2]]);
        let phi = Cochain::indicator(&x, 1, &[s(&[0, 1])]).unwrap();
        let (link, local) = localize(&x, &phi, &s(&[0])).unwrap();
        assert_eq!(local.support(&link.complex), vec![s(&[1])]);
        assert_eq!(norm(&link.complex, &local).unwrap(), int(1));
        let (link, same) = localize(&x, &phi, &Simplex::empty()).unwrap();
        assert_eq!(link.complex, x);
        assert_eq!(same.bits(), phi.bits());
        assert!(matches!(
            localize(&x, &phi, &s(&[0, 1])),
            Err(HdxError::BadDimensions { k: 1, j: 1 })
        ));

        let t = build(&[vec![0, 1, 2, 3]]);
        let phi = Cochain::indicator(&t, 2, &[s(&[0, 1, 2])]).unwrap();
        let (_, local) = localize(&t, &phi, &s(&[0, 1])).unwrap();
        assert_eq!(local.k(), 0);
    }

    #[test]
    fn subspaces_and_cohomology() {
        let x = build(&[vec![0, 1, 2]]);
        let b0 = subspace_basis(&x, 0, SubspaceKind::Bk).unwrap();
        assert_eq!(b0.dim(), 1);
        assert_eq!(b0.basis[0].bits(), &Bits::ones(3));
        assert_eq!(subspace_basis(&x, -1, SubspaceKind::Bk).unwrap().dim(), 0);
        assert_eq!(subspace_basis(&x, -1, SubspaceKind::Zk).unwrap().dim(), 0);
        assert_eq!(subspace_basis(&x, 2, SubspaceKind::Zk).unwrap().dim(), 1);

        let t = build(&[vec![0, 1, 2, 3]]);
        assert_eq!(subspace_basis(&t, 1, SubspaceKind::Zk).unwrap().dim(), 3);
        assert_eq!(subspace_basis(&t, 1, SubspaceKind::Bk).unwrap().dim(), 3);
        for k in 0..=2 {
            assert_eq!(cohomology_dim(&t, k).unwrap(), 0);
        }
        let hollow = build(&[vec![0, 1], vec![1, 2], vec![0, 2]]);
        assert_eq!(cohomology_dim(&hollow, 1).unwrap(), 1);
        let two = build(&[vec![0, 1, 2], vec![3, 4, 5]]);
        assert_eq!(cohomology_dim(&two, 0).unwrap(), 1);
    }

    #[test]
    fn file_round_trip() {
        let x = build(&[vec![0, 1, 2], vec![1, 2, 3]]);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let phi = Cochain::random(&x, 1, &mut rng).unwrap();
        let f = phi.to_file(&x);
        assert_eq!(Cochain::from_file(&x, &f).unwrap(), phi);
        let y = build(&[vec![0, 1, 2]]);
        assert!(matches!(Cochain::from_file(&y, &f), Err(HdxError::ComplexMismatch)));
    }
}

use hdx_core::cochain::{differential, norm, Cochain};
use hdx_core::generators::{linial_meshulam, random_reweight};
use hdx_core::io::{complex_to_json, parse_complex_json};
use hdx_core::minimality::{eps_local_minimize, is_eps_locally_minimal};
use hdx_core::{Bits, Config, Rational, WeightedComplex};
use proptest::prelude::*;

fn rat(a: i64, b: i64) -> Rational {
    Rational::new(a.into(), b.into())
}

/// Random Linial–Meshulam complexes, optionally reweighted.
fn arb_complex() -> impl Strategy<Value = WeightedComplex> {
    (1u32..=2, 4u32..=7, prop::sample::select(vec![(1, 2), (3, 4), (1, 1)]), any::<u64>(), any::<bool>())
        .prop_filter_map("empty top level", |(n, v, (a, b), seed, rw)| {
            let x = linial_meshulam(n, v, &rat(a, b), seed).ok()?;
            if rw {
                random_reweight(&x, seed ^ 0x5eed).ok()
            } else {
                Some(x)
            }
        })
}

fn cochain_from(x: &WeightedComplex, k: isize, mask: &[bool]) -> Cochain {
    let len = x.num_cells(k);
    let bits = Bits::from_indices(len, (0..len).filter(|&i| mask[i % mask.len()] ^ (i % 3 == 0)));
    Cochain::new(x, k, bits).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn generated_complexes_satisfy_weight_law(x in arb_complex()) {
        prop_assert!(x.validate().is_ok());
        // total(k) * (k+1)! is the same on every level
        let scaled = |k: isize| x.total_weight(k).unwrap() * rat((1..=k + 1).map(|i| i as i64).product(), 1);
        for k in 0..=x.dim() as isize {
            prop_assert_eq!(scaled(k), scaled(-1));
        }
    }

    #[test]
    fn differential_contracts_and_squares_to_zero(
        x in arb_complex(),
        mask in prop::collection::vec(any::<bool>(), 1..16),
        k_pick in 0usize..3,
    ) {
        let k = (k_pick % x.dim()) as isize;
        let phi = cochain_from(&x, k, &mask);
        let d = differential(&x, &phi).unwrap();
        prop_assert!(norm(&x, &d).unwrap() <= norm(&x, &phi).unwrap());
        if k + 1 < x.dim() as isize {
            prop_assert!(differential(&x, &d).unwrap().is_zero());
        }
    }

    #[test]
    fn file_format_round_trips(x in arb_complex()) {
        let text = complex_to_json(&x);
        let y = parse_complex_json(&text).unwrap();
        prop_assert_eq!(x.hash_hex(), y.hash_hex());
        prop_assert_eq!(text, complex_to_json(&y));
    }

    #[test]
    fn minimization_contracts_by_eps_psi(
        x in arb_complex(),
        mask in prop::collection::vec(any::<bool>(), 1..16),
        k_pick in 0usize..3,
        e in prop::sample::select(vec![(1i64, 10i64), (1, 4), (1, 2)]),
    ) {
        let cfg = Config::default();
        let k = (k_pick % (x.dim() + 1)) as isize;
        let eps = rat(e.0, e.1);
        let phi = cochain_from(&x, k, &mask);
        let tr = eps_local_minimize(&x, &phi, &eps, &cfg).unwrap();
        let before = norm(&x, &phi).unwrap();
        let after = norm(&x, &tr.output).unwrap();
        let psi = norm(&x, &tr.psi).unwrap();
        prop_assert!(before >= after + &eps * psi);
        prop_assert!(is_eps_locally_minimal(&x, &tr.output, &eps, &cfg).unwrap());
        // phi - output is the coboundary of psi
        let diff = phi.add(&tr.output).unwrap();
        let dpsi = differential(&x, &tr.psi).unwrap();
        prop_assert_eq!(diff.bits(), dpsi.bits());
    }
}

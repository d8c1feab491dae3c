use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use homstab::chains::{
    e_infinity, homology_field_dims, homology_integral, mapping_cone, spectral_pages, suspension, validate_complex,
    Coefficients,
};
use homstab::exact_linalg::field::{self, Field, PrimeField, Rationals};
use homstab::exact_linalg::{cokernel_invariants, elementary_divisors, smith_normal_form, IntegerMatrix};
use homstab::ssets::random::{random_covering, random_semi_simplicial};
use homstab::ssets::{
    chain_complex_of, covering_projection, covering_transfer, half_smash_augmented, half_smash_construction,
    reduced_chain_complex_of, skeletal_filtration, Augmentation,
};
use homstab::stability::{dold_decompose, random_dold_system, verify_dold_relations, StabilityError};

fn matrix(max_dim: usize) -> impl Strategy<Value = IntegerMatrix> {
    (0..=max_dim, 0..=max_dim).prop_flat_map(|(r, c)| {
        prop::collection::vec(-9i64..=9, r * c).prop_map(move |v| {
            let entries = v.into_iter().enumerate().map(|(k, x)| (k / c.max(1), k % c.max(1), BigInt::from(x)));
            IntegerMatrix::from_triplets(r, c, entries.collect::<Vec<_>>()).unwrap()
        })
    })
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if n < k {
        return Vec::new();
    }
    let mut out = combinations(n - 1, k);
    for mut c in combinations(n - 1, k - 1) {
        c.push(n - 1);
        out.push(c);
    }
    out
}

/// gcd of all k x k minors, by cofactor expansion.
fn minor_gcd(m: &[Vec<BigInt>], k: usize, rows: usize, cols: usize) -> BigInt {
    fn det(a: &[Vec<BigInt>]) -> BigInt {
        match a.len() {
            0 => BigInt::one(),
            1 => a[0][0].clone(),
            n => (0..n)
                .map(|j| {
                    let sub: Vec<Vec<BigInt>> = a[1..]
                        .iter()
                        .map(|row| row.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, v)| v.clone()).collect())
                        .collect();
                    let term = &a[0][j] * det(&sub);
                    if j % 2 == 0 { term } else { -term }
                })
                .sum(),
        }
    }
    let mut g = BigInt::zero();
    for rs in combinations(rows, k) {
        for cs in combinations(cols, k) {
            let sub: Vec<Vec<BigInt>> = rs.iter().map(|&r| cs.iter().map(|&c| m[r][c].clone()).collect()).collect();
            g = g.gcd(&det(&sub));
        }
    }
    g
}

fn field_rank<F: Field>(f: &F, m: &IntegerMatrix) -> usize {
    let dense: Vec<Vec<F::Elem>> = m.to_dense().iter().map(|r| r.iter().map(|v| f.from_bigint(v)).collect()).collect();
    field::rank(f, &dense)
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn smith_certificate(m in matrix(6)) {
        let sf = smith_normal_form(&m);
        let (r, c) = m.shape();
        let diag = IntegerMatrix::diagonal(r, c, &sf.diagonal).unwrap();
        prop_assert_eq!(sf.left.mul(&m).unwrap().mul(&sf.right).unwrap(), diag);
        prop_assert!(sf.left.determinant().unwrap().abs().is_one());
        prop_assert!(sf.right.determinant().unwrap().abs().is_one());
        let nonzero: Vec<&BigInt> = sf.diagonal.iter().filter(|d| !d.is_zero()).collect();
        prop_assert!(sf.diagonal[..nonzero.len()].iter().all(|d| d.is_positive()));
        prop_assert!(nonzero.windows(2).all(|w| (w[1] % w[0]).is_zero()));
    }

    #[test]
    fn smith_matches_minor_gcds(m in matrix(4)) {
        let sf = smith_normal_form(&m);
        let dense = m.to_dense();
        let (r, c) = m.shape();
        let mut prefix = BigInt::one();
        for k in 1..=r.min(c) {
            prefix *= &sf.diagonal[k - 1];
            prop_assert_eq!(&prefix, &minor_gcd(&dense, k, r, c), "k = {}", k);
        }
    }

    #[test]
    fn sparse_and_dense_agree(m in matrix(7)) {
        let dense: Vec<BigInt> = smith_normal_form(&m).diagonal.into_iter().filter(|d| !d.is_zero()).collect();
        prop_assert_eq!(elementary_divisors(&m), dense.clone());
        prop_assert_eq!(field_rank(&Rationals, &m), dense.len());
        for p in [2u64, 3, 5] {
            let expected = dense.iter().filter(|d| !(*d % p).is_zero()).count();
            prop_assert_eq!(field_rank(&PrimeField::new(p), &m), expected);
        }
        let coker = cokernel_invariants(&m);
        prop_assert!(coker.is_canonical());
        prop_assert_eq!(coker.free_rank, m.nrows() - dense.len());
    }

    #[test]
    fn generated_complexes_are_complexes(seed in any::<u64>()) {
        let x = random_semi_simplicial(&mut rng(seed), 4, 6);
        prop_assert!(validate_complex(&chain_complex_of(&x).unwrap()).is_ok());
    }

    #[test]
    fn half_smash_always_valid(seed in any::<u64>()) {
        let x = random_semi_simplicial(&mut rng(seed), 3, 5);
        let hs = half_smash_construction(&x).unwrap();
        prop_assert!(hs.validate().is_ok());
        prop_assert!(validate_complex(&reduced_chain_complex_of(&hs).unwrap()).is_ok());
        let aug = half_smash_augmented(&x, &Augmentation::to_point(&x)).unwrap();
        prop_assert!(aug.validate().is_ok());
    }

    #[test]
    fn transfer_identity(seed in any::<u64>(), sheets in 1usize..=4) {
        let mut g = rng(seed);
        let base = random_semi_simplicial(&mut g, 3, 5);
        let p = random_covering(&mut g, &base, sheets);
        let trf = covering_transfer(&p).unwrap();
        let composite = trf.compose(&covering_projection(&p).unwrap()).unwrap();
        for k in composite.source().degrees() {
            let n = composite.source().rank(k);
            prop_assert_eq!(composite.block(k), IntegerMatrix::scalar(n, BigInt::from(sheets)));
        }
    }

    #[test]
    fn cone_euler_characteristic(seed in any::<u64>(), sheets in 1usize..=3) {
        let mut g = rng(seed);
        let base = random_semi_simplicial(&mut g, 3, 4);
        let p = random_covering(&mut g, &base, sheets);
        let trf = covering_transfer(&p).unwrap();
        let cone = mapping_cone(&trf).unwrap();
        prop_assert!(validate_complex(&cone).is_ok());
        prop_assert_eq!(
            cone.euler_characteristic(),
            trf.target().euler_characteristic() - trf.source().euler_characteristic()
        );
    }

    #[test]
    fn suspension_shifts_reduced_homology(seed in any::<u64>()) {
        let x = random_semi_simplicial(&mut rng(seed), 3, 5);
        let c = chain_complex_of(&x).unwrap();
        let reduced = c.augmented().unwrap();
        let s = suspension(&c).unwrap();
        for k in 0..=c.top_degree().max(0) {
            prop_assert_eq!(homology_integral(&s, k + 1).unwrap(), homology_integral(&reduced, k).unwrap());
        }
    }

    #[test]
    fn spectral_pages_shrink_and_converge(seed in any::<u64>(), p in prop::sample::select(vec![2u64, 3])) {
        let x = random_semi_simplicial(&mut rng(seed), 3, 5);
        let fc = skeletal_filtration(&x).unwrap();
        let coeffs = Coefficients::field(p).unwrap();
        let pages = spectral_pages(&fc, coeffs, fc.length() + 3).unwrap();
        for w in pages.windows(2) {
            for (&(s, t), &d) in &w[1].dims {
                prop_assert!(d <= w[0].get(s, t));
            }
        }
        let inf = e_infinity(&fc, coeffs).unwrap();
        prop_assert_eq!(&pages.last().unwrap().dims, &inf.dims);
        let dims = homology_field_dims(fc.ambient(), p).unwrap();
        for (j, d) in dims.iter().enumerate() {
            prop_assert_eq!(inf.total(j as i64), *d);
        }
    }

    #[test]
    fn dold_random_systems(seed in any::<u64>(), dims in prop::collection::vec(0usize..=3, 1..=5)) {
        let len = dims.len() - 1;
        let s = random_dold_system(seed, len, &dims).unwrap();
        prop_assert!(verify_dold_relations(&s).is_ok());
        let dec = dold_decompose(&s).unwrap();
        prop_assert_eq!(&dec.b_dims, &dims);
        prop_assert!(dec.iso && dec.composites_invertible);
    }

    #[test]
    fn dold_perturbation_caught(seed in any::<u64>(), n in 1usize..=3, r in 0usize..4, c in 0usize..8) {
        let mut s = random_dold_system(seed, 4, &[1, 1, 1, 1, 1]).unwrap();
        let (rows, cols) = s.trans(n).shape();
        let (r, c) = (r % rows, c % cols);
        let v = s.trans(n).get(r, c) + num_rational::BigRational::one();
        s.trans_mut(n).set(r, c, v);
        let err = verify_dold_relations(&s);
        prop_assert!(matches!(err, Err(StabilityError::RelationFails(k)) if k == n || k == n + 1));
    }
}

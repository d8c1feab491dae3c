//! The acceptance criteria, each producing one [`ExperimentResult`].

use std::time::Instant;

use clap::ValueEnum;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use homstab::braids::{self, abelianization, artin_presentation, h1_mod_p, spherical_presentation, FuksComplex};
use homstab::chains::{
    e_infinity, homology_field_dims, mapping_cone, validate_complex, ChainComplex, ChainMap, Coefficients, FilteredComplex,
};
use homstab::exact_linalg::{smith_normal_form, AbelianGroupInvariants, IntegerMatrix};
use homstab::injwords::{build_injective_words, certify_wedge, expected_top_rank};
use homstab::ssets::random::{random_covering, random_semi_simplicial};
use homstab::ssets::{
    chain_complex_of, covering_projection, covering_transfer, half_smash_augmented, half_smash_construction,
    reduced_chain_complex_of, validate, Augmentation,
};
use homstab::stability::{
    check_transfer_composition, dold_decompose, random_dold_system, stability_range, tau_experiment, verify_dold_relations,
    DoldSystem, StabilityError, StabilityTable, TauImage,
};

use crate::commands::{braid_columns, halfsmash_homology, CliError};
use crate::oracles;
use crate::params;
use crate::result::{ExperimentResult, Record, Status};

pub const DEFAULT_SEED: u64 = 20240601;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Scale {
    Small,
    #[default]
    Full,
}

impl Scale {
    fn pick<T>(self, small: T, full: T) -> T {
        match self {
            Scale::Small => small,
            Scale::Full => full,
        }
    }

    fn as_str(self) -> &'static str {
        self.pick("small", "full")
    }
}

type Check = fn(&mut ExperimentResult, Scale, u64) -> Result<(), CliError>;

pub struct Criterion {
    pub name: &'static str,
    pub budget_ms: u64,
    check: Check,
}

pub fn criteria() -> Vec<Criterion> {
    vec![
        Criterion { name: "injective-words", budget_ms: 60_000, check: injective_words },
        Criterion { name: "braid-stability-mod2", budget_ms: 120_000, check: braid_stability },
        Criterion { name: "spherical-braid-h1", budget_ms: 5_000, check: spherical_h1 },
        Criterion { name: "tau-dichotomy", budget_ms: 5_000, check: tau_dichotomy },
        Criterion { name: "dold-engine", budget_ms: 30_000, check: dold_engine },
        Criterion { name: "half-smash-connectivity", budget_ms: 60_000, check: half_smash },
        Criterion { name: "machinery", budget_ms: 60_000, check: machinery },
    ]
}

impl Criterion {
    /// Runs the criterion; errors become a failed check, and so does
    /// exceeding the runtime budget.
    pub fn run(&self, scale: Scale, seed: u64) -> ExperimentResult {
        let mut r = ExperimentResult::new(
            &format!("acceptance/{}", self.name),
            params! { "scale" => scale.as_str(), "seed" => seed },
        );
        let start = Instant::now();
        if let Err(e) = (self.check)(&mut r, scale, seed) {
            r.check(false, format!("error: {e}"));
        }
        r.wall_ms = start.elapsed().as_millis() as u64;
        r.check(r.wall_ms < self.budget_ms, format!("runtime {} ms < {} ms", r.wall_ms, self.budget_ms));
        r
    }
}

/// Every criterion in order; the caller chooses the worker pool.
pub fn run_all(scale: Scale, seed: u64) -> Vec<ExperimentResult> {
    criteria().iter().map(|c| c.run(scale, seed)).collect()
}

/// Verdict notes that failed, for reporting.
pub fn failures(r: &ExperimentResult) -> Vec<String> {
    r.results.iter().map(|rec| rec.value.to_string()).filter(|v| v.ends_with(": fail")).collect()
}

pub fn summary_line(r: &ExperimentResult) -> String {
    let tag = match r.status {
        Status::Pass => "PASS",
        Status::Fail => "FAIL",
    };
    format!("{tag} {} ({} ms)", r.experiment, r.wall_ms)
}

fn injective_words(r: &mut ExperimentResult, scale: Scale, _seed: u64) -> Result<(), CliError> {
    let frozen: Vec<usize> = (2..=6).map(oracles::derangements).collect();
    r.check(frozen == [1, 2, 9, 44, 265], "derangement oracle gives 1, 2, 9, 44, 265 for n = 2..6");
    for n in 1..=scale.pick(5, 7) {
        match certify_wedge(n) {
            Ok(report) => {
                r.push(Record::index(n as i64, report.top_rank));
                let d = oracles::derangements(n);
                r.check(
                    report.top_rank == d && expected_top_rank(n) == BigInt::from(d),
                    format!("F({n}): concentrated in degree {}, free of rank D_{n} = {d}", n - 1),
                );
            }
            Err(e) => r.check(false, format!("F({n}): {e}")),
        }
    }
    Ok(())
}

fn braid_stability(r: &mut ExperimentResult, scale: Scale, _seed: u64) -> Result<(), CliError> {
    let (n_max, i_max) = scale.pick((8, 4), (12, 6));
    let table = braids::table_from_columns(1, &braid_columns(n_max)?, i_max, "H^i(C_n(R^2); F_2)");
    for i in 0..=i_max {
        for n in 1..=n_max {
            r.push(Record::at(i as i64, n as i64, table.get(i, n)));
        }
    }
    for onset in stability_range(&table) {
        let i = onset.degree;
        let equal = ((2 * i).max(1)..n_max).all(|n| table.get(i, n) == table.get(i, n + 1));
        r.check(equal, format!("i={i}: dims[i][n] = dims[i][n+1] whenever 2i <= n"));
        r.check(onset.monotone, format!("i={i}: nondecreasing in n"));
        r.check(onset.within_bound, format!("i={i}: stabilisation onset at most 2i"));
    }
    let oracle = (1..=n_max).map(|n| h1_mod_p(&artin_presentation(n)?, 2)).collect::<Result<Vec<_>, _>>()?;
    r.check(table.row(1) == oracle.as_slice(), "H^1 row equals the braid abelianization mod 2");
    Ok(())
}

fn spherical_h1(r: &mut ExperimentResult, scale: Scale, _seed: u64) -> Result<(), CliError> {
    let ns: Vec<usize> = (2..=scale.pick(10, 20)).collect();
    let mut mod2 = Vec::new();
    let mut mod3 = Vec::new();
    for &n in &ns {
        let p = spherical_presentation(n)?;
        let order = 2 * n as u64 - 2;
        let group = abelianization(&p);
        r.push(Record::index(n as i64, group.to_string()));
        r.check(group == AbelianGroupInvariants::cyclic(order), format!("n={n}: H_1 = Z/{order}"));
        let (d2, d3) = (h1_mod_p(&p, 2)?, h1_mod_p(&p, 3)?);
        r.check(d2 == 1, format!("n={n}: mod-2 dimension 1"));
        r.check(d3 == oracles::cyclic_dim_mod_p(order, 3), format!("n={n}: mod-3 dimension is 1 iff 3 | {order}"));
        mod2.push(d2);
        mod3.push(d3);
    }
    let t2 = StabilityTable::new(2, vec![mod2], "H_1(C_n(S^2); F_2)")?;
    let t3 = StabilityTable::new(2, vec![mod3], "H_1(C_n(S^2); F_3)")?;
    r.check(stability_range(&t2)[0].onset == Some(2), "mod-2 row constant from n = 2");
    r.check(stability_range(&t3)[0].onset.is_none(), "mod-3 row does not stabilise");
    Ok(())
}

fn tau_dichotomy(r: &mut ExperimentResult, _scale: Scale, _seed: u64) -> Result<(), CliError> {
    for d in 2..=10 {
        let t = tau_experiment(d)?;
        r.push(Record::index(d as i64, t.image.to_string()));
        let expected = if d % 2 == 1 { TauImage::Zero } else { TauImage::Index(2.into()) };
        r.check(t.image == expected, format!("d={d}: {expected}"));
    }
    Ok(())
}

struct DoldTrial {
    label: String,
    failures: Vec<String>,
    perturbations: usize,
}

/// `t_n` enters relation `n` as `t_n i_{n-1}` and relation `n + 1` as
/// `i_{n-1} t_n`, so adding `E_{rc}` changes them by `E_{rc} i_{n-1}` (row `c`
/// of `i_{n-1}`, moved to row `r`) and `i_{n-1} E_{rc}` (column `r`, moved to
/// column `c`). Returns the entries whose perturbation goes unnoticed.
fn undetected_perturbations(s: &DoldSystem) -> (usize, Vec<(usize, usize, usize)>) {
    let mut total = 0;
    let mut missed = Vec::new();
    for n in 1..=s.len() {
        let i = s.stab(n - 1);
        let (a_prev, a_n) = (s.dims()[n - 1], s.dims()[n]);
        let row_nonzero: Vec<bool> = (0..a_n).map(|c| (0..a_prev).any(|j| !i.get(c, j).is_zero())).collect();
        let col_nonzero: Vec<bool> = (0..a_prev).map(|r| (0..a_n).any(|j| !i.get(j, r).is_zero())).collect();
        for r in 0..a_prev {
            for c in 0..a_n {
                total += 1;
                if !(row_nonzero[c] || (n < s.len() && col_nonzero[r])) {
                    missed.push((n, r, c));
                }
            }
        }
    }
    (total, missed)
}

fn dold_trial(seed: u64) -> Result<DoldTrial, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let len = rng.gen_range(1..=6);
    let dims: Vec<usize> = (0..=len).map(|_| rng.gen_range(0..=4)).collect();
    let s = random_dold_system(rng.gen(), len, &dims)?;
    let mut failures = Vec::new();
    let mut fail = |ok: bool, what: &str| {
        if !ok {
            failures.push(what.to_string());
        }
    };
    fail(verify_dold_relations(&s).is_ok(), "relations");
    fail(check_transfer_composition(&s).is_ok(), "iterated transfer composition");
    let dec = dold_decompose(&s)?;
    fail(dec.b_dims == dims, "recovered summand dimensions");
    fail(dec.iso, "Phi_n invertible");
    fail(dec.composites_invertible, "t_(n+1) i_n invertible");

    let (total, missed) = undetected_perturbations(&s);
    fail(missed.is_empty(), "every single-entry perturbation of t detected");
    let entries: Vec<(usize, usize, usize)> = (1..=len)
        .flat_map(|n| {
            let (rows, cols) = s.trans(n).shape();
            (0..rows).flat_map(move |r| (0..cols).map(move |c| (n, r, c)))
        })
        .collect();
    for _ in 0..4.min(entries.len()) {
        let (n, r, c) = entries[rng.gen_range(0..entries.len())];
        let mut bumped = s.clone();
        let v = bumped.trans(n).get(r, c) + BigRational::one();
        bumped.trans_mut(n).set(r, c, v);
        let caught = matches!(verify_dold_relations(&bumped), Err(StabilityError::RelationFails(k)) if k == n || k == n + 1);
        fail(caught, "sampled perturbation rejected by verify_dold_relations");
    }
    Ok(DoldTrial { label: format!("N={len} dims={dims:?}"), failures, perturbations: total })
}

fn dold_engine(r: &mut ExperimentResult, scale: Scale, seed: u64) -> Result<(), CliError> {
    let trials = scale.pick(20u64, 100);
    let outcomes: Vec<Result<DoldTrial, CliError>> = (0..trials).into_par_iter().map(|t| dold_trial(seed.wrapping_add(t))).collect();
    let mut perturbations = 0;
    for (t, outcome) in outcomes.into_iter().enumerate() {
        let trial = outcome?;
        perturbations += trial.perturbations;
        let ok = trial.failures.is_empty();
        r.push(Record::index(t as i64, format!("{} {}", trial.label, if ok { "ok" } else { "failed" })));
        r.check(ok, format!("trial {t}: {}", if ok { "all properties".to_string() } else { trial.failures.join(", ") }));
    }
    r.push(Record::note(format!("{perturbations} single-entry perturbations examined")));
    Ok(())
}

fn half_smash(r: &mut ExperimentResult, scale: Scale, _seed: u64) -> Result<(), CliError> {
    for n in 1..=scale.pick(4, 6) {
        let groups = halfsmash_homology(n)?;
        for (k, g) in &groups {
            r.push(Record::at(*k, n as i64, g.to_string()));
        }
        let low = groups.iter().filter(|(k, _)| *k < n as i64).all(|(_, g)| g.is_trivial());
        r.check(low, format!("n={n}: reduced homology vanishes in degrees <= {}", n - 1));
        // levelwise cofibre of F(n) -> F(n + 1), a wedge of D_{n+1} + D_n spheres
        let top = groups.iter().find(|(k, _)| *k == n as i64).map(|(_, g)| g.clone());
        let expected = oracles::derangements(n + 1) + oracles::derangements(n);
        r.check(
            top == Some(AbelianGroupInvariants::free(expected)),
            format!("n={n}: top group Z^{expected} = Z^(D_{} + D_{n})", n + 1),
        );
    }
    Ok(())
}

fn random_matrix(rng: &mut ChaCha8Rng) -> IntegerMatrix {
    let (rows, cols) = (rng.gen_range(0..=8), rng.gen_range(0..=8));
    let entries: Vec<(usize, usize, BigInt)> = (0..rows)
        .flat_map(|i| (0..cols).map(move |j| (i, j)))
        .map(|(i, j)| (i, j, BigInt::from(rng.gen_range(-9..=9))))
        .collect();
    IntegerMatrix::from_triplets(rows, cols, entries).expect("in range")
}

fn smith_certificate_holds(m: &IntegerMatrix) -> bool {
    let sf = smith_normal_form(m);
    let (rows, cols) = m.shape();
    let Ok(diag) = IntegerMatrix::diagonal(rows, cols, &sf.diagonal) else {
        return false;
    };
    let product = sf.left.mul(m).and_then(|lm| lm.mul(&sf.right));
    let unimodular = |u: &IntegerMatrix| u.determinant().is_ok_and(|d| d.abs().is_one());
    let nonzero: Vec<&BigInt> = sf.diagonal.iter().take_while(|d| !d.is_zero()).collect();
    let trailing_zero = sf.diagonal[nonzero.len()..].iter().all(Zero::is_zero);
    let chain = nonzero.windows(2).all(|w| (w[1] % w[0]).is_zero()) && nonzero.iter().all(|d| d.is_positive());
    product.is_ok_and(|p| p == diag) && unimodular(&sf.left) && unimodular(&sf.right) && trailing_zero && chain
}

fn random_filtration(rng: &mut ChaCha8Rng) -> Result<FilteredComplex, CliError> {
    let x = random_semi_simplicial(rng, 3, 5);
    let mut levels: Vec<Vec<u32>> = vec![(0..x.size(0)).map(|_| rng.gen_range(0..=3)).collect()];
    for k in 1..x.num_levels() {
        let level = (0..x.size(k))
            .map(|s| (0..=k).map(|i| levels[k - 1][x.face(k, i, s)]).max().unwrap_or(0) + rng.gen_range(0..=1))
            .collect();
        levels.push(level);
    }
    Ok(FilteredComplex::new(chain_complex_of(&x)?, levels)?)
}

fn scalar_map(c: &ChainComplex, k: usize) -> ChainMap {
    let blocks = c.degrees().map(|d| (d, IntegerMatrix::scalar(c.rank(d), BigInt::from(k)))).collect();
    ChainMap::new(c.clone(), c.clone(), blocks).expect("square blocks")
}

fn machinery(r: &mut ExperimentResult, scale: Scale, seed: u64) -> Result<(), CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut complexes = 0;
    let mut all_ok = true;
    let mut note = |ok: bool| {
        complexes += 1;
        all_ok &= ok;
    };
    for _ in 0..scale.pick(50, 200) {
        let x = random_semi_simplicial(&mut rng, 4, 6);
        note(validate(&x).is_ok() && validate_complex(&chain_complex_of(&x)?).is_ok());
        let hs = half_smash_construction(&x)?;
        note(hs.validate().is_ok() && validate_complex(&reduced_chain_complex_of(&hs)?).is_ok());
        let hs = half_smash_augmented(&x, &Augmentation::to_point(&x))?;
        note(hs.validate().is_ok() && validate_complex(&reduced_chain_complex_of(&hs)?).is_ok());
    }
    for n in 1..=5 {
        note(validate_complex(&chain_complex_of(build_injective_words(n)?.set())?).is_ok());
    }
    for n in 1..=scale.pick(10, 14) {
        note(FuksComplex::new(n)?.validate().is_ok());
    }
    r.push(Record::note(format!("{complexes} generated complexes")));
    r.check(all_ok, "boundary squares to zero on every generated complex");

    let smith_total = scale.pick(200, 1000);
    let smith_ok = (0..smith_total).filter(|_| smith_certificate_holds(&random_matrix(&mut rng))).count();
    r.check(smith_ok == smith_total, format!("Smith certificate left*m*right = diag on {smith_ok}/{smith_total} matrices"));

    let mut covers_ok = true;
    let covers = scale.pick(30, 100);
    for _ in 0..covers {
        let base = random_semi_simplicial(&mut rng, 3, 5);
        let sheets = rng.gen_range(1..=4);
        let p = random_covering(&mut rng, &base, sheets);
        let trf = covering_transfer(&p)?;
        let composite = trf.compose(&covering_projection(&p)?)?;
        covers_ok &= composite == scalar_map(trf.source(), sheets);
        covers_ok &= validate_complex(&mapping_cone(&trf)?).is_ok();
    }
    r.check(covers_ok, format!("projection after transfer is multiplication by the sheet count on {covers} coverings"));

    let filtrations = scale.pick(20, 50);
    let mut ss_ok = true;
    for _ in 0..filtrations {
        let fc = random_filtration(&mut rng)?;
        for p in [2, 3] {
            let einf = e_infinity(&fc, Coefficients::field(p)?)?;
            let dims = homology_field_dims(fc.ambient(), p)?;
            let bottom = fc.ambient().bottom_degree();
            ss_ok &= dims.iter().enumerate().all(|(j, &d)| einf.total(bottom + j as i64) == d);
        }
    }
    r.check(ss_ok, format!("E^inf totals equal homology dimensions over F_2 and F_3 on {filtrations} filtrations"));
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perturbation_bookkeeping() {
        let s = random_dold_system(5, 3, &[1, 1, 1, 1]).unwrap();
        let (total, missed) = undetected_perturbations(&s);
        assert_eq!(total, 2 + 6 + 12);
        assert!(missed.is_empty());
    }

    #[test]
    fn smith_checker_accepts_known_form() {
        let m = IntegerMatrix::from_i64(&[&[2, 4], &[6, 8]]);
        assert!(smith_certificate_holds(&m));
    }

    #[test]
    fn small_scale_passes() {
        for c in criteria() {
            let r = c.run(Scale::Small, DEFAULT_SEED);
            assert!(r.passed(), "{}: {:?}", c.name, failures(&r));
        }
    }
}

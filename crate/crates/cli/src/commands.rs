use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use serde_json::Value as Json;
use thiserror::Error;

use homstab::braids::{self, artin_presentation, fuks_mod2_dims, h1_mod_p, spherical_presentation, BraidsError};
use homstab::chains::{homology_integral_all, ChainError};
use homstab::exact_linalg::{is_prime, AbelianGroupInvariants};
use homstab::injwords::{build_injective_words, certify_wedge, InjWordsError};
use homstab::ssets::{half_smash_augmented, reduced_chain_complex_of, Augmentation, SsetError};
use homstab::stability::{dold_decompose, random_dold_system, stability_range, tau_experiment, StabilityError, TauImage};

use crate::cache::{cache_key, Cache};
use crate::oracles;
use crate::params;
use crate::result::{ExperimentResult, Record};

pub const INJWORDS_CAP: usize = 8;
pub const BRAID_CAP: usize = 12;
pub const HALFSMASH_CAP: usize = 7;
pub const TAU_CAP: usize = 512;
pub const DOLD_LEN_CAP: usize = 10;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{param} = {value} is out of range ({allowed})")]
    OutOfRange { param: &'static str, value: String, allowed: String },
    #[error(transparent)]
    Braids(#[from] BraidsError),
    #[error(transparent)]
    InjWords(#[from] InjWordsError),
    #[error(transparent)]
    Sset(#[from] SsetError),
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Stability(#[from] StabilityError),
    #[error("worker pool: {0}")]
    Pool(String),
}

fn out_of_range(param: &'static str, value: impl ToString, allowed: impl ToString) -> CliError {
    CliError::OutOfRange { param, value: value.to_string(), allowed: allowed.to_string() }
}

/// One experiment with its parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Command {
    InjWords { n: usize },
    BraidTable { n_max: usize, deg_max: usize },
    SphereH1 { n: usize, char: Option<u64> },
    Tau { d: usize },
    Dold { seed: u64, len: usize, dims: Vec<usize> },
    HalfSmash { n: usize },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::InjWords { .. } => "injwords",
            Command::BraidTable { .. } => "braid-table",
            Command::SphereH1 { .. } => "sphere-h1",
            Command::Tau { .. } => "tau",
            Command::Dold { .. } => "dold",
            Command::HalfSmash { .. } => "halfsmash",
        }
    }

    pub fn params(&self) -> BTreeMap<String, Json> {
        match self {
            Command::InjWords { n } => params! { "n" => n },
            Command::BraidTable { n_max, deg_max } => params! { "n_max" => n_max, "deg_max" => deg_max },
            Command::SphereH1 { n, char } => params! { "n" => n, "char" => char },
            Command::Tau { d } => params! { "d" => d },
            Command::Dold { seed, len, dims } => params! { "seed" => seed, "N" => len, "dims" => dims },
            Command::HalfSmash { n } => params! { "n" => n },
        }
    }

    pub fn execute(&self) -> Result<ExperimentResult, CliError> {
        let start = Instant::now();
        let mut r = match self {
            Command::InjWords { n } => cmd_injwords(*n),
            Command::BraidTable { n_max, deg_max } => cmd_braid_table(*n_max, *deg_max),
            Command::SphereH1 { n, char } => cmd_sphere_h1(*n, *char),
            Command::Tau { d } => cmd_tau(*d),
            Command::Dold { seed, len, dims } => cmd_dold(*seed, *len, dims),
            Command::HalfSmash { n } => cmd_halfsmash(*n),
        }?;
        r.params = self.params();
        r.wall_ms = start.elapsed().as_millis() as u64;
        Ok(r)
    }
}

/// Executes commands inside a fixed-size worker pool, consulting the cache.
pub struct Runner {
    cache: Option<Cache>,
    pool: rayon::ThreadPool,
}

impl Runner {
    /// `jobs = 0` uses one worker per core.
    pub fn new(cache: Option<Cache>, jobs: usize) -> Result<Self, CliError> {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build().map_err(|e| CliError::Pool(e.to_string()))?;
        Ok(Runner { cache, pool })
    }

    pub fn install<T: Send>(&self, f: impl FnOnce() -> T + Send) -> T {
        self.pool.install(f)
    }

    pub fn run(&self, cmd: &Command) -> Result<ExperimentResult, CliError> {
        let key = cache_key(cmd.name(), &cmd.params());
        if let Some(hit) = self.cache.as_ref().and_then(|c| c.get(&key)) {
            return Ok(hit);
        }
        let result = self.install(|| cmd.execute())?;
        if let Some(cache) = &self.cache {
            if let Err(e) = cache.put(&key, &result) {
                eprintln!("warning: could not write cache entry in {}: {e}", cache.dir().display());
            }
        }
        Ok(result)
    }
}

pub fn cmd_injwords(n: usize) -> Result<ExperimentResult, CliError> {
    if n > INJWORDS_CAP {
        return Err(out_of_range("n", n, format!("0..={INJWORDS_CAP}")));
    }
    let mut r = ExperimentResult::new("injwords", params! { "n" => n });
    if n == 0 {
        return Ok(r);
    }
    match certify_wedge(n) {
        Ok(report) => {
            for (i, b) in report.reduced_betti.iter().enumerate() {
                r.push(Record::at(i as i64, n as i64, *b));
            }
            r.check(true, format!("reduced homology concentrated and free in degree {}", n - 1));
            let expected = oracles::derangements(n);
            r.check(report.top_rank == expected, format!("top rank {} equals D_{n} = {expected}", report.top_rank));
        }
        Err(e @ (InjWordsError::NotConcentrated { .. } | InjWordsError::TopTorsion { .. })) => r.check(false, e),
        Err(e) => return Err(e.into()),
    }
    Ok(r)
}

/// `dim H^i(C_n(R^2); F_2)` columns for `n = 1..=n_max`, computed in parallel.
pub fn braid_columns(n_max: usize) -> Result<Vec<Vec<usize>>, CliError> {
    Ok((1..=n_max).into_par_iter().map(fuks_mod2_dims).collect::<Result<Vec<_>, _>>()?)
}

pub fn cmd_braid_table(n_max: usize, deg_max: usize) -> Result<ExperimentResult, CliError> {
    if n_max > BRAID_CAP {
        return Err(out_of_range("n_max", n_max, format!("0..={BRAID_CAP}")));
    }
    let mut r = ExperimentResult::new("braid-table", params! { "n_max" => n_max, "deg_max" => deg_max });
    let columns = braid_columns(n_max)?;
    let table = braids::table_from_columns(1, &columns, deg_max, "H^i(C_n(R^2); F_2)");
    for i in 0..=deg_max {
        for n in 1..=n_max {
            r.push(Record::at(i as i64, n as i64, table.get(i, n)));
        }
    }
    for onset in stability_range(&table) {
        let i = onset.degree;
        let label = onset.onset.map_or_else(|| "none".to_string(), |n| n.to_string());
        r.push(Record::degree(i as i64, format!("onset {label}")));
        let equal = ((2 * i).max(1)..n_max).all(|n| table.get(i, n) == table.get(i, n + 1));
        r.check(equal, format!("i={i}: dims[i][n] = dims[i][n+1] for 2i <= n"));
        r.check(onset.within_bound, format!("i={i}: onset consistent with n >= 2i"));
        r.check(onset.monotone, format!("i={i}: nondecreasing in n"));
    }
    if deg_max >= 1 {
        let oracle = (1..=n_max)
            .map(|n| h1_mod_p(&artin_presentation(n)?, 2))
            .collect::<Result<Vec<_>, _>>()?;
        r.check(table.row(1) == oracle.as_slice(), "H^1 row equals abelianization of the braid group mod 2");
    }
    Ok(r)
}

pub fn cmd_sphere_h1(n: usize, char: Option<u64>) -> Result<ExperimentResult, CliError> {
    if n < 2 {
        return Err(out_of_range("n", n, "n >= 2"));
    }
    let mut r = ExperimentResult::new("sphere-h1", params! { "n" => n, "char" => char });
    let p = spherical_presentation(n)?;
    match char {
        None => {
            let group = braids::abelianization(&p);
            let expected = AbelianGroupInvariants::cyclic(2 * n as u64 - 2);
            r.push(Record::index(n as i64, group.to_string()));
            r.check(group == expected, format!("H_1 = {expected}"));
        }
        Some(q) => {
            if !is_prime(q) {
                return Err(out_of_range("char", q, "a prime"));
            }
            let dim = h1_mod_p(&p, q)?;
            let expected = oracles::cyclic_dim_mod_p(2 * n as u64 - 2, q);
            r.push(Record::index(n as i64, dim));
            r.check(dim == expected, format!("dim H_1(-; F_{q}) = {expected}"));
        }
    }
    Ok(r)
}

pub fn cmd_tau(d: usize) -> Result<ExperimentResult, CliError> {
    if !(2..=TAU_CAP).contains(&d) {
        return Err(out_of_range("d", d, format!("2..={TAU_CAP}")));
    }
    let mut r = ExperimentResult::new("tau", params! { "d" => d });
    let t = tau_experiment(d)?;
    r.push(Record::degree(d as i64 - 1, t.target_group.to_string()));
    r.push(Record::index(d as i64, t.image.to_string()));
    let expected = if d % 2 == 1 { TauImage::Zero } else { TauImage::Index(2.into()) };
    r.check(t.image == expected, format!("image is {expected}"));
    Ok(r)
}

pub fn cmd_dold(seed: u64, len: usize, dims: &[usize]) -> Result<ExperimentResult, CliError> {
    if len > DOLD_LEN_CAP {
        return Err(out_of_range("N", len, format!("0..={DOLD_LEN_CAP}")));
    }
    if dims.len() > len + 1 {
        return Err(out_of_range("dims", format!("{dims:?}"), format!("at most N + 1 = {} entries", len + 1)));
    }
    let mut r = ExperimentResult::new("dold", params! { "seed" => seed, "N" => len, "dims" => dims });
    let system = random_dold_system(seed, len, dims)?;
    let dec = match dold_decompose(&system) {
        Ok(dec) => dec,
        Err(e @ StabilityError::RelationFails(_)) => {
            r.check(false, e);
            return Ok(r);
        }
        Err(e) => return Err(e.into()),
    };
    for (n, b) in dec.b_dims.iter().enumerate() {
        r.push(Record::index(n as i64, *b));
    }
    for (n, scalars) in dec.observed_scalars.iter().enumerate() {
        for (m, s) in scalars.iter().enumerate() {
            if let Some(s) = s {
                r.push(Record::at(m as i64, n as i64, format!("t_{} i_{n} acts by {s}", n + 1)));
            }
        }
    }
    let mut expected = dims.to_vec();
    expected.resize(len + 1, 0);
    r.check(dec.b_dims == expected, "recovered summand dimensions");
    r.check(dec.iso, "every Phi_n invertible");
    r.check(dec.composites_invertible, "every t_(n+1) i_n invertible");
    Ok(r)
}

pub fn cmd_halfsmash(n: usize) -> Result<ExperimentResult, CliError> {
    if n > HALFSMASH_CAP {
        return Err(out_of_range("n", n, format!("0..={HALFSMASH_CAP}")));
    }
    let mut r = ExperimentResult::new("halfsmash", params! { "n" => n });
    let groups = halfsmash_homology(n)?;
    for (k, g) in &groups {
        r.push(Record::degree(*k, g.to_string()));
    }
    let low = groups.iter().filter(|(k, _)| *k < n as i64).all(|(_, g)| g.is_trivial());
    r.check(low, format!("reduced homology vanishes in degrees <= {}", n as i64 - 1));
    Ok(r)
}

/// Reduced integral homology of the half-smash construction on `F(n)`,
/// augmented by the empty word.
pub fn halfsmash_homology(n: usize) -> Result<Vec<(i64, AbelianGroupInvariants)>, CliError> {
    let words = build_injective_words(n)?;
    let hs = half_smash_augmented(words.set(), &Augmentation::to_point(words.set()))?;
    Ok(homology_integral_all(&reduced_chain_complex_of(&hs)?)?)
}

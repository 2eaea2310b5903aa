//! Configuration and orchestration of a full run.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::freegroup;
use crate::group::{load_group, FiniteGroup, GroupSpec};
use crate::kcomplex::{bound_checks, build_kcomplex, KCoeffs, RegularOps};
use crate::modules::{delta_and_bounds, derive_module, lemma44, Recipe, Side};
use crate::oracle::{self, bar_homology, h1_matches, moves_mod_p, sp_orbit_oracle, stable_count_prediction};
use crate::orbits::{self, cache_load_checked, cache_store, empty_moveset_hash, OrbitTable, DEFAULT_STATE_CAP};
use crate::report::{
    CountRecord, GroupMeta, HomologyRecord, OracleSection, Report, RunParams, StageFailure,
};
use crate::ring::GradedRing;
use crate::verdict::{Check, Verdict};

pub const CACHE_ENV: &str = "STABRING_CACHE";

/// Group given by short name or by a full spec document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupInput {
    Name(String),
    Spec(GroupSpec),
}

impl GroupInput {
    pub fn resolve(&self) -> Result<GroupSpec> {
        match self {
            GroupInput::Name(s) => resolve_group_arg(s),
            GroupInput::Spec(s) => Ok(s.clone()),
        }
    }
}

/// A short group name, or a path to a JSON group spec.
pub fn resolve_group_arg(s: &str) -> Result<GroupSpec> {
    if let Some(spec) = GroupSpec::named(s) {
        return Ok(spec);
    }
    let path = Path::new(s);
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

fn default_p_max() -> usize {
    2
}
fn default_depth() -> usize {
    2
}
fn default_state_cap() -> u64 {
    DEFAULT_STATE_CAP
}
fn default_samples() -> usize {
    1000
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub group: GroupInput,
    pub n_max: usize,
    #[serde(default = "default_p_max")]
    pub p_max: usize,
    #[serde(default = "default_depth")]
    pub depth: usize,
    #[serde(default = "default_state_cap")]
    pub state_cap: u64,
    #[serde(default)]
    pub threads: Option<usize>,
    #[serde(default)]
    pub cache_dir: Option<PathBuf>,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    /// randomized representative samples per well-definedness check
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
}

impl PipelineConfig {
    pub fn new(group: &str, n_max: usize, p_max: usize) -> Self {
        PipelineConfig {
            group: GroupInput::Name(group.to_string()),
            n_max,
            p_max,
            depth: default_depth(),
            state_cap: default_state_cap(),
            threads: None,
            cache_dir: None,
            out_dir: None,
            samples: default_samples(),
            seed: 0,
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let c: PipelineConfig = serde_json::from_str(&text)?;
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_max < 1 {
            return Err(Error::Config("n_max must be at least 1".into()));
        }
        if self.p_max < 1 {
            return Err(Error::Config("p_max must be at least 1".into()));
        }
        if self.depth < 1 {
            return Err(Error::Config("depth must be positive".into()));
        }
        if self.state_cap == 0 {
            return Err(Error::Config("state_cap must be positive".into()));
        }
        if self.threads == Some(0) {
            return Err(Error::Config("threads must be positive".into()));
        }
        Ok(())
    }

    /// Cache directory: the environment variable wins over the config file.
    pub fn effective_cache_dir(&self) -> Option<PathBuf> {
        std::env::var_os(CACHE_ENV)
            .filter(|v| !v.is_empty())
            .map(PathBuf::from)
            .or_else(|| self.cache_dir.clone())
    }
}

/// Validates the config and runs every stage, inside a dedicated thread pool
/// when a thread count is given. Stage errors end up in the report.
pub fn run_pipeline(config: &PipelineConfig) -> Result<Report> {
    config.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = config.threads {
        builder = builder.num_threads(t);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    Ok(pool.install(|| run_stages(config)))
}

struct Run<'c> {
    config: &'c PipelineConfig,
    report: Report,
    clock: Instant,
}

impl Run<'_> {
    fn stage<T>(&mut self, stage: &'static str, f: impl FnOnce(&mut Report) -> Result<T>) -> Option<T> {
        let t = Instant::now();
        let out = f(&mut self.report);
        self.report.timings.push((stage.to_string(), t.elapsed().as_secs_f64()));
        match out {
            Ok(v) => Some(v),
            Err(e) => {
                self.report.failure = Some(StageFailure {
                    stage: stage.to_string(),
                    cause: e.to_string(),
                });
                None
            }
        }
    }
}

fn run_stages(config: &PipelineConfig) -> Report {
    let mut run = Run {
        config,
        report: Report::new(RunParams {
            n_max: config.n_max,
            p_max: config.p_max,
            depth: config.depth,
            samples: config.samples,
            seed: config.seed,
        }),
        clock: Instant::now(),
    };
    let _ = stages(&mut run);
    let total = run.clock.elapsed().as_secs_f64();
    run.report.timings.push(("total".into(), total));
    run.report
}

fn stages(run: &mut Run) -> Option<()> {
    let config = run.config;
    let g = run.stage("load", |r| {
        let g = load_group(&config.group.resolve()?)?;
        r.group = Some(GroupMeta {
            name: g.name().to_string(),
            order: g.order(),
            abelian: g.is_abelian(),
            hash: hex::encode(g.content_hash()),
        });
        Ok(g)
    })?;

    let movesets = run.stage("moves", |r| {
        let mut sets = vec![None];
        r.moveset_hashes.push(hex::encode(empty_moveset_hash()));
        for n in 1..=config.n_max {
            let set = freegroup::enumerate_stabilizing_automorphisms(n, config.depth)?;
            r.moveset_hashes.push(hex::encode(set.content_hash()));
            r.move_counts.push(set.moves.len());
            sets.push(Some(set));
        }
        Ok(sets)
    })?;

    let tables = run.stage("orbits", |r| {
        let cache = config.effective_cache_dir();
        let mut tables = Vec::with_capacity(config.n_max + 1);
        for (n, set) in movesets.iter().enumerate() {
            let t = orbit_table(&g, n, set.as_ref(), config.state_cap, cache.as_deref())?;
            r.counts.push(CountRecord {
                n,
                orbits: t.count(),
            });
            tables.push(t);
        }
        Ok(tables)
    })?;

    let ring = run.stage("ring", |r| {
        let ring = GradedRing::from_tables(&g, tables)?;
        let profile = ring.stability_profile();
        r.stability = Some(profile);
        Ok(ring)
    })?;
    let profile = ring.stability_profile();

    run.stage("modules", |r| {
        module_checks(&ring, &profile, r)?;
        Ok(())
    })?;

    run.stage("kcomplex", |r| kcomplex_checks(&g, &ring, &profile, config, r))?;

    run.stage("oracles", |r| oracle_checks(&g, &ring, &profile, movesets.as_slice(), r))?;

    run.stage("sampling", |r| {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let w = ring.sample_product_well_definedness(&mut rng, config.samples)?;
        r.verdicts.push(
            Check::new(
                "product_well_defined",
                "[v][w] = [vw] for any representatives",
                Verdict::from_bool(w.failures.is_empty()),
            )
            .with_detail(format!("{} samples", w.samples))
            .with_witness(w.failures.first().cloned()),
        );
        Ok(())
    })?;
    Some(())
}

fn cache_path(dir: &Path, g: &FiniteGroup, moveset_hash: &[u8; 32], n: usize) -> PathBuf {
    let gh = hex::encode(g.content_hash());
    let mh = hex::encode(moveset_hash);
    dir.join(format!("{}-{}-n{n}.orbits", &gh[..16], &mh[..16]))
}

fn orbit_table(
    g: &FiniteGroup,
    n: usize,
    set: Option<&freegroup::MoveSet>,
    cap: u64,
    cache: Option<&Path>,
) -> Result<OrbitTable> {
    let hash = set.map_or_else(empty_moveset_hash, |s| s.content_hash());
    let path = cache.map(|d| cache_path(d, g, &hash, n));
    if let Some(p) = &path {
        if p.exists() {
            return cache_load_checked(p, &g.content_hash(), &hash, n);
        }
    }
    let compiled = set.map(|s| s.compile(g)).unwrap_or_default();
    let t = orbits::enumerate_orbits(g, n, &compiled, hash, cap)?;
    if let Some(p) = &path {
        std::fs::create_dir_all(p.parent().expect("joined path")).map_err(|e| Error::io(p, e))?;
        cache_store(&t, p)?;
    }
    Ok(t)
}

fn module_checks(
    ring: &GradedRing,
    profile: &crate::ring::StabilityProfile,
    r: &mut Report,
) -> Result<()> {
    let top = ring.n_max();
    let mut recipes = vec![Recipe::Regular, Recipe::bar(), Recipe::kernel_u(), Recipe::Regular.shift(1)];
    if top >= 2 {
        recipes.push(Recipe::Regular.truncate(top - 1));
    }
    let lefts = recipes
        .iter()
        .map(|rc| derive_module(ring, rc, Side::Left))
        .collect::<Result<Vec<_>>>()?;
    for m in &lefts {
        let rep = delta_and_bounds(ring, profile, m)?;
        r.verdicts.extend(rep.checks.iter().cloned());
        r.modules.push(rep);
    }
    for rc in [Recipe::Regular, Recipe::bar()] {
        let n = derive_module(ring, &rc, Side::Right)?;
        for m in &lefts {
            r.verdicts.push(lemma44(&n, m)?);
        }
    }
    Ok(())
}

fn kcomplex_checks(
    g: &FiniteGroup,
    ring: &GradedRing,
    profile: &crate::ring::StabilityProfile,
    config: &PipelineConfig,
    r: &mut Report,
) -> Result<()> {
    let n_max = ring.n_max();
    let k = build_kcomplex(g, KCoeffs::from_ring(ring), config.p_max, n_max)?;
    let ds = k.verify_d_squared()?;
    r.verdicts.push(
        Check::new("d_squared", "d o d = 0 on K(R)", Verdict::from_bool(ds.first_bad.is_none()))
            .with_detail(format!("{} composable spots", ds.spots))
            .with_witness(ds.first_bad),
    );
    let uc = k.verify_u_commutes()?;
    r.verdicts.push(
        Check::new("u_commutes", "d U = U d on K(R)", Verdict::from_bool(uc.is_none())).with_witness(uc),
    );
    let ops = RegularOps::new(&k, ring)?;
    let h = ops.verify_homotopy();
    r.verdicts.push(
        Check::new(
            "homotopy",
            "S_(g,h) d + d S_(g,h) = right multiplication by [g,h]",
            Verdict::from_bool(h.first_bad.is_none()),
        )
        .with_detail(format!("{} spots x {} pairs", h.spots, h.pairs))
        .with_witness(h.first_bad),
    );
    let ann = ops.verify_annihilation()?;
    r.verdicts.push(
        Check::new(
            "annihilation",
            "right multiplication by [g,h] is zero on H_p(K(R))",
            Verdict::from_bool(ann.first_bad.is_none()),
        )
        .with_detail(format!("{} spots", ann.spots))
        .with_witness(ann.first_bad),
    );
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x5eed);
    let sw = ops.sample_s_well_definedness(&mut rng, config.samples)?;
    r.verdicts.push(
        Check::new(
            "homotopy_well_defined",
            "S_(g,h) independent of the representative of [w]",
            Verdict::from_bool(sw.is_empty()),
        )
        .with_detail(format!("{} samples", config.samples))
        .with_witness(sw.first().cloned()),
    );
    let table = k.homology_table()?;
    let hp = k.h_profile(&table);
    r.verdicts.extend(bound_checks(profile, &hp, n_max));
    r.h_profile = hp;
    r.homology = table
        .into_iter()
        .map(|row| HomologyRecord {
            module: "R".into(),
            p: row.p,
            n: row.n,
            free_rank: row.group.free_rank,
            torsion: row.group.torsion.iter().map(|t| t.to_string()).collect(),
            certified: row.certified,
        })
        .collect();
    Ok(())
}

/// Largest genus compared against the symplectic oracle.
pub const SP_ORACLE_MAX_N: usize = 3;
/// States explored by the symplectic oracle.
pub const SP_ORACLE_CAP: u64 = 1 << 24;

fn oracle_checks(
    g: &FiniteGroup,
    ring: &GradedRing,
    profile: &crate::ring::StabilityProfile,
    movesets: &[Option<freegroup::MoveSet>],
    r: &mut Report,
) -> Result<()> {
    let bar = bar_homology(g)?;
    let ab = g.abelianization_invariants();
    let h1_ok = h1_matches(&bar.h1, &ab);
    r.verdicts.push(
        Check::new("bar_h1", "H_1(G) = G/[G,G]", Verdict::from_bool(h1_ok))
            .with_detail(format!("bar H_1 = {}, abelianization invariants {ab:?}", bar.h1)),
    );
    let pred = stable_count_prediction(g)?;
    let top = ring.n_max();
    let observed = ring.count(top)?;
    let stable = profile.stable_within_window;
    let compare = |name: &str, anchor: &str, predicted: &num_bigint::BigInt| {
        let ok = num_bigint::BigInt::from(observed) == *predicted;
        let verdict = match (stable, ok) {
            (false, _) => Verdict::Inconclusive,
            (true, true) => Verdict::Pass,
            (true, false) => Verdict::Fail,
        };
        Check::new(name, anchor, verdict)
            .with_detail(format!(
                "|R_{top}| = {observed}, predicted {predicted}{}",
                if stable { "" } else { "; window not stable" }
            ))
            .with_witness((stable && !ok).then(|| format!("degree {top}")))
    };
    r.verdicts.push(compare("stable_count", "|R_n| = sum over H <= G of |H_2(H)|", &pred.marked));
    if !g.is_abelian() {
        r.verdicts.push(compare(
            "stable_count_bordered",
            "|R_n| = sum over H <= G of |H_2(H)| |[H,H]|",
            &pred.bordered,
        ));
    }
    let mut sp_counts = Vec::new();
    if g.is_abelian() {
        for n in 1..=top.min(SP_ORACLE_MAX_N) {
            let expected = match sp_orbit_oracle(g, n, SP_ORACLE_CAP) {
                Ok(c) => c,
                Err(Error::StateCapExceeded { .. }) => continue,
                Err(e) => return Err(e),
            };
            let got = ring.count(n)?;
            sp_counts.push(CountRecord { n, orbits: expected });
            r.verdicts.push(
                Check::new(
                    format!("symplectic_orbits[n={n}]"),
                    "orbit count = Sp(2n, Z) orbit count of G^{2n}",
                    Verdict::from_bool(got == expected),
                )
                .with_detail(format!("engine {got}, oracle {expected}"))
                .with_witness((got != expected).then(|| format!("degree {n}"))),
            );
        }
    }
    let mut mod_p = Vec::new();
    for set in movesets.iter().flatten().filter(|s| s.genus <= 2) {
        for p in [2, 3] {
            mod_p.push((set.genus, moves_mod_p(set, p, 1 << 20)));
        }
    }
    r.oracles = Some(OracleSection {
        h1: bar.h1.to_string(),
        h2: bar.h2.to_string(),
        abelianization: ab,
        stable_marked: pred.marked.to_string(),
        stable_bordered: pred.bordered.to_string(),
        subgroups: pred.terms.len(),
        sp_counts,
        moves_mod_p: mod_p
            .into_iter()
            .map(|(genus, m)| oracle::ModPRecord::new(genus, m))
            .collect(),
    });
    Ok(())
}

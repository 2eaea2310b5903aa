//! Report document and its file formats.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modules::ModuleReport;
use crate::oracle::ModPRecord;
use crate::ring::{StabilityProfile, WindowDeg};
use crate::verdict::{Check, Verdict};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupMeta {
    pub name: String,
    pub order: usize,
    pub abelian: bool,
    pub hash: String,
}

/// Parameters that determine the report content. Thread count and paths are
/// left out on purpose.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunParams {
    pub n_max: usize,
    pub p_max: usize,
    pub depth: usize,
    pub samples: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountRecord {
    pub n: usize,
    pub orbits: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyRecord {
    pub module: String,
    pub p: usize,
    pub n: usize,
    pub free_rank: usize,
    pub torsion: Vec<String>,
    pub certified: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleSection {
    pub h1: String,
    pub h2: String,
    pub abelianization: Vec<u64>,
    pub stable_marked: String,
    pub stable_bordered: String,
    pub subgroups: usize,
    pub sp_counts: Vec<CountRecord>,
    pub moves_mod_p: Vec<ModPRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageFailure {
    pub stage: String,
    pub cause: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub params: RunParams,
    pub group: Option<GroupMeta>,
    pub moveset_hashes: Vec<String>,
    pub move_counts: Vec<usize>,
    pub counts: Vec<CountRecord>,
    pub stability: Option<StabilityProfile>,
    pub h_profile: Vec<WindowDeg>,
    pub homology: Vec<HomologyRecord>,
    pub modules: Vec<ModuleReport>,
    pub oracles: Option<OracleSection>,
    pub verdicts: Vec<Check>,
    pub failure: Option<StageFailure>,
    /// wall-clock seconds per stage; kept out of the JSON so reports diff cleanly
    #[serde(skip)]
    pub timings: Vec<(String, f64)>,
}

impl Report {
    pub fn new(params: RunParams) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            params,
            group: None,
            moveset_hashes: Vec::new(),
            move_counts: Vec::new(),
            counts: Vec::new(),
            stability: None,
            h_profile: Vec::new(),
            homology: Vec::new(),
            modules: Vec::new(),
            oracles: None,
            verdicts: Vec::new(),
            failure: None,
            timings: Vec::new(),
        }
    }

    /// Worst verdict; a stage failure counts as a failed verdict.
    pub fn overall(&self) -> Verdict {
        let worst = self.verdicts.iter().map(|c| c.verdict).max().unwrap_or(Verdict::Pass);
        if self.failure.is_some() {
            Verdict::Fail
        } else {
            worst
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.overall() {
            Verdict::Pass => 0,
            Verdict::Inconclusive => 2,
            Verdict::Fail => 1,
        }
    }

    pub fn verdict(&self, name: &str) -> Option<&Check> {
        self.verdicts.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn homology_csv(&self) -> Result<String> {
        let group = self.group.as_ref().map_or("", |g| g.name.as_str());
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["group", "module", "p", "n", "free_rank", "torsion", "certified"])
            .map_err(csv_err)?;
        for h in &self.homology {
            w.write_record([
                group,
                &h.module,
                &h.p.to_string(),
                &h.n.to_string(),
                &h.free_rank.to_string(),
                &h.torsion.join(" "),
                &h.certified.to_string(),
            ])
            .map_err(csv_err)?;
        }
        finish_csv(w)
    }

    pub fn counts_csv(&self) -> Result<String> {
        let group = self.group.as_ref().map_or("", |g| g.name.as_str());
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["group", "n", "orbits", "u_injective", "u_surjective"])
            .map_err(csv_err)?;
        for c in &self.counts {
            let flag = |v: Option<&Vec<bool>>| {
                v.and_then(|f| f.get(c.n)).map_or(String::new(), |b| b.to_string())
            };
            let st = self.stability.as_ref();
            w.write_record([
                group.to_string(),
                c.n.to_string(),
                c.orbits.to_string(),
                flag(st.map(|s| &s.u_injective)),
                flag(st.map(|s| &s.u_surjective)),
            ])
            .map_err(csv_err)?;
        }
        finish_csv(w)
    }

    pub fn summary_text(&self) -> String {
        let mut s = String::new();
        match &self.group {
            Some(g) => {
                let _ = writeln!(s, "group {} (order {}{})", g.name, g.order, if g.abelian { ", abelian" } else { "" });
            }
            None => s.push_str("group not loaded\n"),
        }
        let _ = writeln!(
            s,
            "window n <= {}, p <= {}, search depth {}",
            self.params.n_max, self.params.p_max, self.params.depth
        );
        let counts: Vec<String> = self.counts.iter().map(|c| c.orbits.to_string()).collect();
        let _ = writeln!(s, "orbit counts: {}", counts.join(", "));
        if let Some(p) = &self.stability {
            let _ = writeln!(
                s,
                "A(R) = {}, A~(R) = {}, certified: {}, stable in window: {}",
                p.a_r, p.a_tilde, p.a_certified, p.stable_within_window
            );
        }
        let nonzero: Vec<String> = self
            .homology
            .iter()
            .filter(|h| h.free_rank > 0 || !h.torsion.is_empty())
            .map(|h| {
                let mut parts = Vec::new();
                if h.free_rank > 0 {
                    parts.push(if h.free_rank == 1 { "Z".to_string() } else { format!("Z^{}", h.free_rank) });
                }
                parts.extend(h.torsion.iter().map(|t| format!("Z/{t}")));
                format!("H_{}({}) = {}{}", h.p, h.n, parts.join(" + "), if h.certified { "" } else { " (ker only)" })
            })
            .collect();
        if !nonzero.is_empty() {
            let _ = writeln!(s, "nonzero homology of K(R):");
            for line in nonzero {
                let _ = writeln!(s, "  {line}");
            }
        }
        s.push('\n');
        for c in &self.verdicts {
            let _ = write!(s, "{:<13} {}", format!("[{}]", c.verdict), c.name);
            if !c.detail.is_empty() {
                let _ = write!(s, "  ({})", c.detail);
            }
            if let Some(w) = &c.witness {
                let _ = write!(s, "  witness: {w}");
            }
            s.push('\n');
        }
        if let Some(f) = &self.failure {
            let _ = writeln!(s, "\nstage `{}` failed: {}", f.stage, f.cause);
        }
        if !self.timings.is_empty() {
            s.push_str("\ntimings:\n");
            for (stage, t) in &self.timings {
                let _ = writeln!(s, "  {stage:<10} {t:.3}s");
            }
        }
        let _ = writeln!(s, "\noverall: {}", self.overall());
        s
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Shape(format!("csv: {e}"))
}

fn finish_csv(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::Shape(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Writes `report.json`, `homology.csv`, `counts.csv` and `summary.txt`.
pub fn emit_report(report: &Report, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let files = [
        ("report.json", report.to_json()?),
        ("homology.csv", report.homology_csv()?),
        ("counts.csv", report.counts_csv()?),
        ("summary.txt", report.summary_text()),
    ];
    let mut out = Vec::new();
    for (name, body) in files {
        let p = dir.join(name);
        std::fs::write(&p, body).map_err(|e| Error::io(&p, e))?;
        out.push(p);
    }
    Ok(out)
}

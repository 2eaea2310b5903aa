//! Acceptance battery. Prints one line per criterion and exits non-zero if
//! any criterion fails.
//!
//! Run with `cargo test -p stabring --test acceptance`.

mod common;

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use stabring::oracle::{bar_homology, h1_matches, sp_orbit_oracle, stable_count_prediction};
use stabring::pipeline::{run_pipeline, PipelineConfig};
use stabring::report::Report;
use stabring::verdict::Verdict;

use common::{group, BATTERY, HOPF_FIXTURES};

struct Outcome {
    ok: bool,
    detail: String,
}

impl Outcome {
    fn new(ok: bool, detail: impl Into<String>) -> Self {
        Outcome {
            ok,
            detail: detail.into(),
        }
    }
}

fn by_prefix<'a>(r: &'a Report, prefix: &'a str) -> impl Iterator<Item = &'a stabring::verdict::Check> {
    r.verdicts.iter().filter(move |c| c.name.starts_with(prefix))
}

/// Every battery report has the named verdict and it passed.
fn all_pass(reports: &BTreeMap<&str, Report>, name: &str) -> Outcome {
    let mut bad = Vec::new();
    for (g, r) in reports {
        match r.verdict(name) {
            Some(c) if c.verdict == Verdict::Pass => {}
            Some(c) => bad.push(format!("{g}: {} {:?}", c.verdict, c.witness)),
            None => bad.push(format!("{g}: missing")),
        }
    }
    if bad.is_empty() {
        Outcome::new(true, format!("{} groups", reports.len()))
    } else {
        Outcome::new(false, bad.join("; "))
    }
}

fn never_fail(reports: &BTreeMap<&str, Report>, prefixes: &[&str]) -> Outcome {
    let (mut pass, mut inconclusive) = (0, 0);
    let mut bad = Vec::new();
    for (g, r) in reports {
        for p in prefixes {
            for c in by_prefix(r, p) {
                match c.verdict {
                    Verdict::Pass => pass += 1,
                    Verdict::Inconclusive => inconclusive += 1,
                    Verdict::Fail => bad.push(format!("{g}: {} {:?}", c.name, c.witness)),
                }
            }
        }
    }
    if pass + inconclusive == 0 {
        return Outcome::new(false, "no checks ran");
    }
    Outcome::new(
        bad.is_empty(),
        if bad.is_empty() {
            format!("{pass} pass, {inconclusive} inconclusive")
        } else {
            bad.join("; ")
        },
    )
}

fn criterion_1(reports: &BTreeMap<&str, Report>, elapsed: Duration) -> Outcome {
    let o = all_pass(reports, "d_squared");
    let in_time = elapsed < Duration::from_secs(15 * 60);
    Outcome::new(o.ok && in_time, format!("{}, battery took {:.1}s", o.detail, elapsed.as_secs_f64()))
}

fn criterion_4(reports: &BTreeMap<&str, Report>) -> Outcome {
    let mut certified = 0;
    let mut bad = Vec::new();
    for (g, r) in reports {
        let prof = r.stability.as_ref().expect("ring stage ran");
        let window_certifies = prof.a_certified && prof.stable_within_window;
        for c in by_prefix(r, "degree_bound") {
            match (c.verdict, window_certifies) {
                (Verdict::Pass, true) => certified += 1,
                (Verdict::Inconclusive, false) => {}
                (v, _) => bad.push(format!("{g}: {} {v}", c.name)),
            }
        }
    }
    Outcome::new(
        bad.is_empty() && certified > 0,
        if bad.is_empty() {
            format!("{certified} certified bounds hold")
        } else {
            bad.join("; ")
        },
    )
}

fn criterion_5(reports: &BTreeMap<&str, Report>) -> Outcome {
    let listed = [("z2", 1, 2), ("z3", 1, 2), ("z4", 1, 3), ("klein", 2, 6)];
    let mut bad = Vec::new();
    let mut compared = 0;
    for (name, r) in reports {
        let g = group(name);
        if !g.is_abelian() {
            continue;
        }
        for c in r.counts.iter().filter(|c| (1..=3).contains(&c.n)) {
            let oracle = sp_orbit_oracle(&g, c.n, 1 << 24).expect("oracle runs");
            compared += 1;
            if oracle != c.orbits {
                bad.push(format!("{name} n={}: engine {} oracle {oracle}", c.n, c.orbits));
            }
        }
    }
    for (name, n, want) in listed {
        let got = reports[name].counts[n].orbits;
        if got != want {
            bad.push(format!("{name} n={n}: {got}, listed {want}"));
        }
    }
    Outcome::new(
        bad.is_empty(),
        if bad.is_empty() {
            format!("{compared} degrees agree")
        } else {
            bad.join("; ")
        },
    )
}

fn criterion_6(reports: &BTreeMap<&str, Report>) -> Outcome {
    let listed: BTreeMap<&str, u64> = [("trivial", 1), ("z2", 2), ("z3", 2), ("z4", 3), ("klein", 6)].into();
    let mut bad = Vec::new();
    let mut checked = Vec::new();
    for (name, r) in reports {
        let prof = r.stability.as_ref().expect("ring stage ran");
        if !prof.stable_within_window {
            continue;
        }
        let top = r.counts.last().expect("counts").orbits;
        let pred = stable_count_prediction(&group(name)).expect("prediction");
        if BigInt::from(top) != pred.marked {
            bad.push(format!("{name}: |R_top| = {top}, predicted {}", pred.marked));
        }
        if let Some(&want) = listed.get(name) {
            if top as u64 != want {
                bad.push(format!("{name}: {top}, listed {want}"));
            }
        }
        checked.push(format!("{name}={top}"));
    }
    Outcome::new(
        bad.is_empty() && !checked.is_empty(),
        if bad.is_empty() {
            checked.join(" ")
        } else {
            bad.join("; ")
        },
    )
}

fn criterion_7() -> Outcome {
    let battery: Vec<&str> = BATTERY.iter().map(|b| b.0).collect();
    let mut bad = Vec::new();
    for (name, presentation, schur) in HOPF_FIXTURES.iter().filter(|f| battery.contains(&f.0)) {
        let g = group(name);
        let h = bar_homology(&g).expect("bar homology");
        let want: Vec<BigInt> = schur.iter().map(|&x| BigInt::from(x)).collect();
        if h.h2.free_rank != 0 || h.h2.torsion != want {
            bad.push(format!("{name} {presentation}: H_2 = {}", h.h2));
        }
        if !h1_matches(&h.h1, &g.abelianization_invariants()) {
            bad.push(format!("{name}: H_1 = {}", h.h1));
        }
    }
    Outcome::new(
        bad.is_empty(),
        if bad.is_empty() {
            format!("{} groups", battery.len())
        } else {
            bad.join("; ")
        },
    )
}

fn criterion_9(reports: &BTreeMap<&str, Report>) -> Outcome {
    let a = all_pass(reports, "product_well_defined");
    let b = all_pass(reports, "homotopy_well_defined");
    let samples = reports.values().all(|r| r.params.samples >= 1000);
    Outcome::new(
        a.ok && b.ok && samples,
        format!("products: {}; homotopy: {}", a.detail, b.detail),
    )
}

fn criterion_11() -> Outcome {
    let mut bad = Vec::new();
    for (name, n, p) in [("klein", 4, 3), ("s3", 3, 2)] {
        let jsons: Vec<String> = [1, 3, 8]
            .into_iter()
            .map(|t| {
                let mut c = PipelineConfig::new(name, n, p);
                c.threads = Some(t);
                run_pipeline(&c).expect("runs").to_json().expect("serializes")
            })
            .collect();
        if jsons.windows(2).any(|w| w[0] != w[1]) {
            bad.push(name);
        }
    }
    Outcome::new(
        bad.is_empty(),
        if bad.is_empty() {
            "klein, s3 identical over 1, 3, 8 threads".to_string()
        } else {
            format!("differs: {bad:?}")
        },
    )
}

fn main() {
    let t = Instant::now();
    let mut reports = BTreeMap::new();
    for &(name, n, p) in BATTERY {
        let report = run_pipeline(&PipelineConfig::new(name, n, p)).expect("valid config");
        if let Some(f) = &report.failure {
            panic!("{name}: stage {} failed: {}", f.stage, f.cause);
        }
        reports.insert(name, report);
    }
    let elapsed = t.elapsed();

    let rows: Vec<(u32, &str, Outcome)> = vec![
        (1, "d o d = 0 on K(R)", criterion_1(&reports, elapsed)),
        (2, "homotopy identity", all_pass(&reports, "homotopy")),
        (3, "homology annihilated by [g,h]", all_pass(&reports, "annihilation")),
        (4, "h_p <= p + A + 1", criterion_4(&reports)),
        (5, "orbit counts vs symplectic oracle", criterion_5(&reports)),
        (6, "stable counts vs prediction", criterion_6(&reports)),
        (7, "bar homology vs Hopf fixtures", criterion_7()),
        (
            8,
            "U stabilization thresholds",
            never_fail(&reports, &["u_stabilization", "ham2_threshold", "main_theorem_q0"]),
        ),
        (9, "representative independence", criterion_9(&reports)),
        (
            10,
            "module lemmas",
            never_fail(&reports, &["lemma_c1", "lemma_3_12", "lemma_4_4", "action_consistency"]),
        ),
        (11, "determinism across threads", criterion_11()),
    ];

    let mut failed = 0;
    for (k, what, o) in &rows {
        let tag = if o.ok { "PASS" } else { "FAIL" };
        println!("criterion {k:>2} {tag}  {what}  ({})", o.detail);
        failed += usize::from(!o.ok);
    }
    println!("{} of {} criteria pass", rows.len() - failed, rows.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

mod common;

use stabring::error::Error;
use stabring::pipeline::{run_pipeline, GroupInput, PipelineConfig};
use stabring::report::{emit_report, Report};
use stabring::verdict::Verdict;

#[test]
fn trivial_group_all_pass() {
    let r = run_pipeline(&PipelineConfig::new("trivial", 3, 2)).unwrap();
    assert!(r.failure.is_none());
    assert!(r.counts.iter().all(|c| c.orbits == 1));
    for c in &r.verdicts {
        assert_eq!(c.verdict, Verdict::Pass, "{c:?}");
    }
    assert_eq!(r.exit_code(), 0);
}

#[test]
fn z2_counts_and_stability() {
    let r = run_pipeline(&PipelineConfig::new("z2", 4, 2)).unwrap();
    let counts: Vec<usize> = r.counts.iter().map(|c| c.orbits).collect();
    assert_eq!(counts, [1, 2, 2, 2, 2]);
    assert!(r.stability.as_ref().unwrap().stable_within_window);
    assert_eq!(r.overall(), Verdict::Pass);
}

#[test]
fn zero_window_is_rejected() {
    let c = PipelineConfig::new("z2", 0, 1);
    assert!(matches!(run_pipeline(&c), Err(Error::Config(_))));
    let mut c = PipelineConfig::new("z2", 2, 1);
    c.threads = Some(0);
    assert!(matches!(run_pipeline(&c), Err(Error::Config(_))));
}

#[test]
fn config_file_parsing() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("c.json");
    std::fs::write(&p, r#"{"group": "klein", "n_max": 2, "p_max": 1, "seed": 7}"#).unwrap();
    let c = PipelineConfig::load(&p).unwrap();
    assert_eq!(c.group, GroupInput::Name("klein".into()));
    assert_eq!((c.n_max, c.p_max, c.seed, c.samples), (2, 1, 7, 1000));

    std::fs::write(&p, r#"{"group": {"kind": "cyclic", "order": 3}, "n_max": 2}"#).unwrap();
    let c = PipelineConfig::load(&p).unwrap();
    let r = run_pipeline(&c).unwrap();
    assert_eq!(r.group.unwrap().order, 3);

    std::fs::write(&p, r#"{"group": "z2", "n_max": 2, "colour": 1}"#).unwrap();
    assert!(PipelineConfig::load(&p).is_err());
}

#[test]
fn stage_failure_keeps_partial_results() {
    let mut c = PipelineConfig::new("z4", 3, 1);
    c.state_cap = 300;
    let r = run_pipeline(&c).unwrap();
    let f = r.failure.as_ref().unwrap();
    assert_eq!(f.stage, "orbits");
    assert!(f.cause.contains("lower n"), "{}", f.cause);
    assert!(r.group.is_some());
    assert_eq!(r.counts.len(), 3); // n = 0, 1, 2 fit under the cap
    assert_eq!(r.exit_code(), 1);

    let mut c = PipelineConfig::new("not-a-group-file.json", 2, 1);
    c.samples = 1;
    let r = run_pipeline(&c).unwrap();
    assert_eq!(r.failure.unwrap().stage, "load");
}

#[test]
fn report_files_and_round_trip() {
    let r = run_pipeline(&PipelineConfig::new("z3", 3, 2)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let files = emit_report(&r, dir.path()).unwrap();
    assert_eq!(files.len(), 4);

    let json = std::fs::read_to_string(dir.path().join("report.json")).unwrap();
    let back: Report = serde_json::from_str(&json).unwrap();
    assert_eq!(back.to_json().unwrap(), json);
    assert_eq!(back.schema_version, 1);
    assert!(!json.contains("timings"));

    let csv = std::fs::read_to_string(dir.path().join("homology.csv")).unwrap();
    let spots: usize = (0..=2).map(|p| 3 + 1 - p).sum();
    assert_eq!(csv.lines().count(), 1 + spots);
    assert_eq!(r.homology.len(), spots);
    assert!(csv.starts_with("group,module,p,n,free_rank,torsion,certified\n"));

    let counts = std::fs::read_to_string(dir.path().join("counts.csv")).unwrap();
    assert_eq!(counts.lines().count(), 1 + 4);
    let summary = std::fs::read_to_string(dir.path().join("summary.txt")).unwrap();
    assert!(summary.contains("overall: pass"));
}

#[test]
fn every_verdict_has_an_anchor_and_failures_have_witnesses() {
    for name in ["z2", "s3"] {
        let r = run_pipeline(&PipelineConfig::new(name, 3, 2)).unwrap();
        for c in &r.verdicts {
            assert!(!c.anchor.is_empty(), "{c:?}");
            if c.verdict == Verdict::Fail {
                assert!(c.witness.is_some(), "{c:?}");
            }
        }
    }
}

#[test]
fn cache_is_reused_and_checked() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = PipelineConfig::new("klein", 3, 1);
    c.cache_dir = Some(dir.path().to_path_buf());
    c.samples = 50;
    let first = run_pipeline(&c).unwrap();
    let cached: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(cached.len(), 4);
    let second = run_pipeline(&c).unwrap();
    assert_eq!(first.to_json().unwrap(), second.to_json().unwrap());

    // a file under the right name but for another genus is refused
    let entries: Vec<std::path::PathBuf> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    let n1 = entries.iter().find(|p| p.to_string_lossy().ends_with("-n1.orbits")).unwrap();
    let n2 = entries.iter().find(|p| p.to_string_lossy().ends_with("-n2.orbits")).unwrap();
    std::fs::copy(n1, n2).unwrap();
    let r = run_pipeline(&c).unwrap();
    let f = r.failure.unwrap();
    assert_eq!(f.stage, "orbits");
}

#[test]
fn nonabelian_reports_both_predictions() {
    let r = run_pipeline(&PipelineConfig::new("s3", 3, 2)).unwrap();
    assert!(r.verdict("stable_count").is_some());
    assert!(r.verdict("stable_count_bordered").is_some());
    assert!(r.verdict("symplectic_orbits[n=1]").is_none());
    let o = r.oracles.as_ref().unwrap();
    assert_eq!(o.stable_marked, "6");
    assert_eq!(o.stable_bordered, "8");
    // the window is not stable for this group, nothing may fail
    assert_eq!(r.overall(), Verdict::Inconclusive);
    assert_eq!(r.exit_code(), 2);
}

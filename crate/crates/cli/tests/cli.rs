use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_panelrank"));
    cmd.env("PANELRANK_NO_COLOR", "1");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn core_tests() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests")
}

fn bundled_ratings() -> String {
    core_tests()
        .join("golden/bundled_ratings.csv")
        .display()
        .to_string()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.display().to_string()
}

#[test]
fn help_exits_zero() {
    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("Usage: panelrank"));
    for sub in [
        "ingest",
        "screen",
        "swara",
        "concordance",
        "sensitivity",
        "report",
        "audit",
        "pipeline",
    ] {
        assert!(stdout(&out).contains(sub), "{sub}");
    }
}

#[test]
fn screen_threshold_accepts_two() {
    let out = run(&[
        "screen",
        "--ratings",
        &bundled_ratings(),
        "--threshold",
        "4.0",
        "--format",
        "csv",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let accepted: Vec<String> = stdout(&out)
        .lines()
        .filter(|l| l.ends_with(",Accept"))
        .map(|l| l.split(',').nth(1).unwrap().to_owned())
        .collect();
    assert_eq!(accepted, ["De", "OC"]);
    assert!(stdout(&out).contains("PF,PF,3.428571,"));
}

#[test]
fn screen_warns_when_labels_disagree() {
    let out = run(&["screen", "--paper-data"]);
    assert_eq!(out.status.code(), Some(0));
    let err = stderr(&out);
    assert!(
        err.starts_with("warning: threshold rule (mean >= 4) disagrees"),
        "{err}"
    );
    assert!(!err.contains('\x1b'));

    let quiet = run(&["screen", "--paper-data", "--labels", "bundled"]);
    assert_eq!(stderr(&quiet), "");
    assert!(stdout(&quiet).contains("| 3 | QSO | System Outcome Quality | 2.142857 |"));
}

#[test]
fn swara_audit_reports_w_column() {
    let out = run(&["swara", "--variant", "flat-k", "--paper-data", "--audit"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("| k | 22 | 22 | 5e-7 |"), "{text}");
    // Components for Building sits 1.48e-3 from print, inside 1.5e-3.
    assert!(text.contains("| w | 21 | 22 | 1.5e-3 |"), "{text}");
    assert!(text.contains("| RPA | Turnover | w | 0.054000 | 0.042021 |"));
    // a tighter tolerance separates both irregular rows from the rest
    let tight = stdout(&run(&[
        "swara",
        "--paper-data",
        "--audit",
        "--tolerance",
        "1e-4",
    ]));
    assert!(tight.contains("| w | 20 | 22 | 1e-4 |"), "{tight}");
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        vec!["screen", "--bogus"],
        vec!["frobnicate"],
        vec!["screen"],
        vec![
            "screen",
            "--paper-data",
            "--threshold",
            "4",
            "--labels",
            "bundled",
        ],
        vec!["swara", "--paper-data", "--variant", "extended", "--audit"],
        vec!["swara", "--svalues", "x.csv", "--audit"],
        vec!["ingest", "--paper-data", "--ratings", "x.csv"],
        vec!["sensitivity", "--paper-data", "--mode", "sideways"],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", stderr(&out));
    }
}

#[test]
fn validation_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.csv", "code,a,b\nPF,1,9\n");
    let out = run(&["screen", "--ratings", &bad]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("outside"), "{}", stderr(&out));

    let out = run(&["screen", "--ratings", "/definitely/missing.csv"]);
    assert_eq!(out.status.code(), Some(1));

    let out = run(&["sensitivity", "--paper-data", "--labels", "bundled"]);
    assert_eq!(out.status.code(), Some(1));

    let out = run(&["screen", "--paper-data", "--threshold", "7"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn pipeline_empty_after_screening_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let ratings = write(dir.path(), "r.csv", "code,a,b\nA,5,5\nB,1,2\n");
    let svalues = write(dir.path(), "s.csv", "code,s\nB,0.2\n");
    let out = run(&["pipeline", "--ratings", &ratings, "--svalues", &svalues]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("no criteria"), "{}", stderr(&out));
}

#[test]
fn pipeline_is_deterministic_and_warns() {
    let args = [
        "pipeline",
        "--paper-data",
        "--labels",
        "bundled",
        "--variant",
        "flat-k",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    assert!(stderr(&a).contains("23 accepted criteria but 22 s values"));
    assert!(stdout(&a).contains("## Kendall's W"));
}

#[test]
fn out_writes_file_and_nothing_on_failure() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("weights.json");
    let target_str = target.display().to_string();
    let out = run(&[
        "swara",
        "--paper-data",
        "--format",
        "json",
        "--out",
        &target_str,
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&target).unwrap()).unwrap();
    assert_eq!(doc["title"], "Criterion weights");

    let failed = dir.path().join("never.md");
    let out = run(&[
        "screen",
        "--ratings",
        "/missing.csv",
        "--out",
        &failed.display().to_string(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!failed.exists());
    assert_eq!(
        std::fs::read_dir(dir.path()).unwrap().count(),
        1,
        "no temp files left behind"
    );
}

#[test]
fn report_re_renders_saved_json() {
    let dir = tempfile::tempdir().unwrap();
    let saved = dir.path().join("screen.json");
    let saved_str = saved.display().to_string();
    assert!(run(&[
        "screen",
        "--paper-data",
        "--format",
        "json",
        "--out",
        &saved_str
    ])
    .status
    .success());
    let direct = stdout(&run(&["screen", "--paper-data", "--format", "csv"]));
    let rerendered = run(&["report", "--input", &saved_str, "--format", "csv"]);
    assert_eq!(stdout(&rerendered), direct);
}

#[test]
fn report_combines_tables() {
    let out = run(&["report", "--paper-data", "--labels", "bundled"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    for heading in [
        "## Screening (recorded labels)",
        "## SWARA weights (flat-k)",
        "## Coverage",
    ] {
        assert!(text.contains(heading), "{heading}");
    }
}

#[test]
fn audit_covers_both_tables() {
    let out = run(&["audit", "--paper-data", "--labels", "bundled"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("| average | 27 | 27 | 1e-6 |"), "{text}");
    assert!(text.contains("| k | 22 | 22 | 5e-7 |"));
    let out = run(&["audit", "--ratings", &bundled_ratings()]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&[
        "audit",
        "--ratings",
        &bundled_ratings(),
        "--reference",
        "bundled",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
}

#[test]
fn ingest_round_trips_fixtures() {
    let dir = tempfile::tempdir().unwrap();
    let project = stdout(&run(&["ingest", "--paper-data"]));
    let golden = std::fs::read_to_string(core_tests().join("golden/bundled_project.json")).unwrap();
    assert_eq!(project, golden);
    let path = write(dir.path(), "p.json", &project);
    assert_eq!(stdout(&run(&["ingest", "--project", &path])), project);

    let messy = write(dir.path(), "m.csv", "code,s\nA,0.50\nB,1e-1\n");
    assert_eq!(
        stdout(&run(&["ingest", "--svalues", &messy])),
        "code,label,s\nA,A,0.5\nB,B,0.1\n"
    );
    let ranks = core_tests()
        .join("fixtures/small_ranks.csv")
        .display()
        .to_string();
    assert!(run(&["ingest", "--ranks", &ranks]).status.success());
}

#[test]
fn config_fills_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(
        dir.path(),
        "panelrank.toml",
        "threshold = 3.5\nformat = \"csv\"\niterations = 50\nseed = 9\n",
    );
    let out = run(&["--config", &config, "screen", "--paper-data"]);
    let text = stdout(&out);
    assert!(text.starts_with("# Screening (mean >= 3.5)"), "{text}");
    let flag = stdout(&run(&[
        "--config",
        &config,
        "screen",
        "--paper-data",
        "--threshold",
        "4",
        "--format",
        "md",
    ]));
    assert!(flag.contains("## Screening (mean >= 4)"), "{flag}");

    let a = stdout(&run(&["--config", &config, "sensitivity", "--paper-data"]));
    let b = stdout(&run(&[
        "sensitivity",
        "--paper-data",
        "--iterations",
        "50",
        "--seed",
        "9",
        "--threshold",
        "3.5",
        "--format",
        "csv",
    ]));
    assert_eq!(a, b);

    let bad = write(dir.path(), "bad.toml", "thresold = 3\n");
    assert_eq!(
        run(&["--config", &bad, "screen", "--paper-data"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn sensitivity_is_reproducible() {
    let args = [
        "sensitivity",
        "--paper-data",
        "--iterations",
        "300",
        "--seed",
        "17",
        "--format",
        "json",
    ];
    let a = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, run(&args).stdout);
    let perturb = run(&[
        "sensitivity",
        "--paper-data",
        "--mode",
        "perturb",
        "--epsilon",
        "0",
        "--grid",
        "3",
    ]);
    assert_eq!(perturb.status.code(), Some(0));
    assert!(!stdout(&perturb).contains("## Flip boundaries"));
}

#[test]
fn concordance_from_ranks_file() {
    let ranks = core_tests()
        .join("fixtures/small_ranks.csv")
        .display()
        .to_string();
    let out = run(&["concordance", "--ranks", &ranks, "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    // row sums 4.5, 4.5, 9 so S = 13.5; one 2-way tie gives T = 6 and a
    // denominator of 9 * 24 - 3 * 6 = 198, W = 162 / 198
    assert!(
        stdout(&out).contains("3,3,13.500000,0.818182"),
        "{}",
        stdout(&out)
    );
}

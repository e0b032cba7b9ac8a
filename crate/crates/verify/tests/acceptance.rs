//! Acceptance gate: one pass/fail line per criterion.

use std::io::Write;
use std::path::PathBuf;
use std::process::Command;

use torsion_core::cohomology::{h1_at_level, stabilized_h1, Method, OracleConfig, Stabilized};
use torsion_core::ext::{build_extension, ExtensionSpec, LocalExtension};
use torsion_core::field::is_prime;
use torsion_core::job::parse_json_lines;
use torsion_core::sen::{example_closed_form, kock_transform, sen_partition, validate_breaks};

struct Outcome {
    pass: bool,
    detail: String,
}

fn grid() -> Vec<(u64, u64, u64)> {
    let mut out = Vec::new();
    for p in [2u64, 3, 5] {
        for d in (1..=3).filter(|d| d % p != 0) {
            for m in (1..=20).filter(|m| m % p != 0) {
                out.push((p, d, m));
            }
        }
    }
    out
}

fn config(method: Method) -> OracleConfig {
    OracleConfig {
        method,
        ..OracleConfig::default()
    }
}

fn partition(s: &Stabilized) -> Vec<u64> {
    s.result.partition.iter().map(|&x| x as u64).collect()
}

/// Oracle runs recorded for the stabilization criterion.
type Runs = Vec<(String, LocalExtension, Method, Stabilized)>;

fn criterion_1(runs: &mut Runs) -> Outcome {
    let mut failures = Vec::new();
    let mut checked = 0;
    for (p, d, m) in grid() {
        checked += 1;
        let formula = sen_partition(p, 1, d, &[m]).unwrap().lengths;
        let ext = match build_extension(ExtensionSpec::new(p, d, Some(m)).unwrap()) {
            Ok(e) => e,
            Err(e) => {
                failures.push(format!("(p={p},d={d},m={m}) {}", e.code()));
                continue;
            }
        };
        match stabilized_h1(&ext, &config(Method::Cocycle)) {
            Ok(s) => {
                let oracle = partition(&s);
                if oracle != formula {
                    failures.push(format!(
                        "(p={p},d={d},m={m}) oracle {oracle:?} formula {formula:?}"
                    ));
                }
                runs.push((format!("p={p},d={d},m={m}"), ext, Method::Cocycle, s));
            }
            Err(e) => failures.push(format!("(p={p},d={d},m={m}) {}", e.code())),
        }
    }
    Outcome {
        pass: failures.is_empty(),
        detail: format!(
            "{} of {checked} instances agree; failing: {}",
            checked - failures.len(),
            if failures.is_empty() { "none".into() } else { failures.join("; ") }
        ),
    }
}

fn criterion_2(runs: &mut Runs) -> Outcome {
    let mut failures = Vec::new();
    let mut compared = 0;
    let mut skipped = Vec::new();
    for (p, d, m) in grid().into_iter().filter(|x| x.1 > 1) {
        let Ok(ext) = build_extension(ExtensionSpec::new(p, d, Some(m)).unwrap()) else {
            skipped.push(format!("(p={p},d={d},m={m})"));
            continue;
        };
        let full = stabilized_h1(&ext, &config(Method::Cocycle));
        let sub = stabilized_h1(&ext, &config(Method::Subgroup));
        match (full, sub) {
            (Ok(a), Ok(b)) => {
                compared += 1;
                if a.result.partition != b.result.partition {
                    failures.push(format!(
                        "(p={p},d={d},m={m}) {:?} vs {:?}",
                        a.result.partition, b.result.partition
                    ));
                }
                runs.push((format!("p={p},d={d},m={m} subgroup"), ext, Method::Subgroup, b));
            }
            (a, b) => failures.push(format!(
                "(p={p},d={d},m={m}) {:?} / {:?}",
                a.err().map(|e| e.code()),
                b.err().map(|e| e.code())
            )),
        }
    }
    Outcome {
        pass: failures.is_empty() && compared > 0,
        detail: format!(
            "{compared} compositum instances compared, {} differ; {} have no Galois extension: {}",
            failures.len(),
            skipped.len(),
            skipped.join(" ")
        ),
    }
}

fn criterion_3() -> Outcome {
    let mut cases = 0u64;
    let mut failures = Vec::new();
    let mut check = |p: u64, n: u32, d: u64, breaks: &[u64]| {
        cases += 1;
        let a = sen_partition(p, n, d, breaks).unwrap();
        let b = kock_transform(p, n, d, breaks).unwrap();
        if a != b {
            failures.push(format!("p={p} n={n} d={d} breaks={breaks:?}"));
        }
    };
    for p in (2..=125).filter(|&p| is_prime(p)) {
        for d in (1..=10).filter(|d| d % p != 0) {
            for b in 1..=30 {
                check(p, 1, d, &[b]);
            }
        }
    }
    // longer filtrations with p^n ≤ 125
    for (p, n) in [(2u64, 2u32), (2, 3), (2, 4), (2, 5), (2, 6), (3, 2), (3, 3), (3, 4), (5, 2), (5, 3), (7, 2), (11, 2)] {
        let mut seqs: Vec<Vec<u64>> = (1..=30).map(|b| vec![b]).collect();
        for _ in 1..n {
            seqs = seqs
                .into_iter()
                .flat_map(|s| {
                    let last = *s.last().unwrap();
                    (last + 1..=30).map(move |b| {
                        let mut t = s.clone();
                        t.push(b);
                        t
                    })
                })
                .filter(|s| validate_breaks(p, s.len() as u32, s).is_ok())
                .collect();
        }
        for s in &seqs {
            for d in (1..=10).filter(|d| d % p != 0) {
                check(p, n, d, s);
            }
        }
    }
    Outcome {
        pass: failures.is_empty(),
        detail: format!("{cases} cases, {} disagreements", failures.len()),
    }
}

fn criterion_4() -> Outcome {
    let mut failures = Vec::new();
    let mut checked = 0;
    for (p, d, m) in grid() {
        let Ok(ext) = build_extension(ExtensionSpec::new(p, d, Some(m)).unwrap()) else {
            continue;
        };
        checked += 1;
        match ext.ramification_profile_with_retry() {
            Ok(prof) => {
                let different: u64 = prof.i_table.iter().map(|i| i + 1).sum();
                if prof.breaks != vec![m] || different != (p - 1) * (m + 1) {
                    failures.push(format!("(p={p},d={d},m={m}) breaks {:?}", prof.breaks));
                }
            }
            Err(e) => failures.push(format!("(p={p},d={d},m={m}) {}", e.code())),
        }
    }
    Outcome {
        pass: failures.is_empty(),
        detail: format!("{checked} extensions, failing: {failures:?}"),
    }
}

fn criterion_5(runs: &mut Runs) -> Outcome {
    let mut failures = Vec::new();
    let mut checked = 0;
    for p in [2u64, 3, 5, 7] {
        for d in (2..=6).filter(|d| d % p != 0) {
            checked += 1;
            let ext = build_extension(ExtensionSpec::tame(p, d).unwrap()).unwrap();
            match stabilized_h1(&ext, &config(Method::Cocycle)) {
                Ok(s) => {
                    if !s.result.partition.is_empty() {
                        failures.push(format!("(p={p},d={d}) {:?}", s.result.partition));
                    }
                    runs.push((format!("p={p},d={d} tame"), ext, Method::Cocycle, s));
                }
                Err(e) => failures.push(format!("(p={p},d={d}) {}", e.code())),
            }
        }
    }
    Outcome {
        pass: failures.is_empty(),
        detail: format!("{checked} tame extensions, failing: {failures:?}"),
    }
}

fn criterion_6(runs: &Runs) -> Outcome {
    let mut failures = Vec::new();
    for (name, ext, method, s) in runs {
        let e = ext.ramification_index() as usize;
        match h1_at_level(ext, s.result.level + 3 * e, &config(*method)) {
            Ok(r) if r.partition == s.result.partition => {}
            Ok(r) => failures.push(format!("{name}: {:?} vs {:?}", s.result.partition, r.partition)),
            Err(err) => failures.push(format!("{name}: {}", err.code())),
        }
    }
    Outcome {
        pass: failures.is_empty() && !runs.is_empty(),
        detail: format!("{} oracle runs re-checked at +3e, failing: {failures:?}", runs.len()),
    }
}

fn repo_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

/// The `torsion` binary from the same target directory, built on demand.
fn torsion() -> Command {
    let exe = std::env::current_exe().unwrap();
    let bin = exe
        .parent()
        .and_then(|deps| deps.parent())
        .unwrap()
        .join(format!("torsion{}", std::env::consts::EXE_SUFFIX));
    if !bin.exists() {
        let mut build = Command::new(env!("CARGO"));
        build.args(["build", "-p", "torsion-cli", "--bin", "torsion"]);
        if !cfg!(debug_assertions) {
            build.arg("--release");
        }
        assert!(build.status().expect("run cargo").success(), "cannot build torsion");
    }
    Command::new(bin)
}

fn criterion_7() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    for (p, m, agree) in [(2u64, 1u64, false), (3, 4, true), (5, 7, false)] {
        let c = example_closed_form(p, m).unwrap();
        ok &= c.agree == agree;
        notes.push(format!("(p={p},m={m}) {}", if c.agree { "agree" } else { "disagree" }));
    }
    let shipped = std::fs::read_to_string(repo_root().join("reports/as_p2_m1.jsonl"))
        .map_err(|e| e.to_string())
        .and_then(|t| parse_json_lines(&t).map_err(|e| e.to_string()));
    match shipped.as_deref() {
        Ok([r]) => {
            let c = r.closed_form.as_ref();
            ok &= r.formula_partition.as_deref() == Some(&[1][..])
                && r.oracle_partition.as_deref() == Some(&[1][..])
                && r.agree == Some(true)
                && c.is_some_and(|c| c.displayed.is_empty() && !c.agree);
            notes.push("shipped (p=2,m=1) report: formula [1], oracle [1], displayed []".into());
        }
        other => {
            ok = false;
            notes.push(format!("shipped report unreadable: {other:?}"));
        }
    }
    let live = torsion()
        .args(["--format", "json-lines", "as", "--p", "2", "--m", "1"])
        .output()
        .expect("run torsion");
    let file = std::fs::read(repo_root().join("reports/as_p2_m1.jsonl")).unwrap_or_default();
    ok &= live.stdout == file;
    Outcome {
        pass: ok,
        detail: notes.join("; "),
    }
}

fn criterion_8() -> Outcome {
    let run = || {
        torsion()
            .args([
                "--format", "json-lines", "sweep", "--p", "2,3,5", "--m", "1-20", "--d", "1,2,3",
            ])
            .output()
            .expect("run torsion")
    };
    let (a, b) = (run(), run());
    let lines = a.stdout.iter().filter(|&&c| c == b'\n').count();
    Outcome {
        pass: a.stdout == b.stdout && a.status.code() == b.status.code() && lines > 0,
        detail: format!("{lines} records, {} bytes", a.stdout.len()),
    }
}

#[test]
fn acceptance() {
    let mut runs = Runs::new();
    let results = [
        ("formula equals oracle", criterion_1(&mut runs)),
        ("subgroup invariants equal full cocycles", criterion_2(&mut runs)),
        ("floor identity", criterion_3()),
        ("ramification profile", criterion_4()),
        ("tame vanishing", criterion_5(&mut runs)),
    ];
    let results: Vec<(&str, Outcome)> = results
        .into_iter()
        .chain([
            ("stabilization", criterion_6(&runs)),
            ("example arbitration", criterion_7()),
            ("determinism", criterion_8()),
        ])
        .collect();
    let mut failed = Vec::new();
    for (i, (name, out)) in results.iter().enumerate() {
        let tag = if out.pass { "PASS" } else { "FAIL" };
        let line = format!("criterion {} [{tag}] {name}: {}\n", i + 1, out.detail);
        // bypass the test harness capture so the gate is always visible
        std::io::stderr().write_all(line.as_bytes()).unwrap();
        if !out.pass {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}

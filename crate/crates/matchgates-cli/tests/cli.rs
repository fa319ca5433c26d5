//! End-to-end runs of the binary over the text formats.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use matchgates::decompose::{block_expand_signature, decomposition_from_text};
use matchgates::harness::{star_core, wire_gadget};
use matchgates::{BooleanSignature, Scalar};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_matchgates"))
}

fn run(args: &[&str], dir: &Path) -> Output {
    bin()
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

const LADDER: &str = "\
nodes 6
edge 1 2 1
edge 1 3 1
edge 2 4 1
edge 3 4 -1
edge 3 5 1
edge 4 6 1
edge 5 6 1
external 1 2 6 5
rot 1: 2 3
rot 2: 4 1
rot 3: 4 5 1
rot 4: 6 3 2
rot 5: 6 3
rot 6: 4 5
";

#[test]
fn perfmatch_signature_and_identities() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("ladder.gate"), LADDER).unwrap();

    let out = run(&["perfmatch", "ladder.gate", "--method", "both"], dir.path());
    assert!(out.status.success());
    assert!(stdout(&out).contains("match"));

    let out = run(&["signature", "ladder.gate"], dir.path());
    assert!(out.status.success());
    let sig_text = stdout(&out);
    // Counterclockwise corner order puts the nonzero weight-2 entries on
    // the opposite-corner pairs at positions {1,3} and {2,4}.
    assert!(sig_text.contains("1010 1"));
    assert!(sig_text.contains("0101 1"));
    fs::write(dir.path().join("ladder.sig"), &sig_text).unwrap();

    let out = run(&["mgi", "ladder.sig"], dir.path());
    assert!(out.status.success(), "{}", stdout(&out));
    let out = run(&["rank", "ladder.sig", "--block", "2"], dir.path());
    assert_eq!(stdout(&out).trim(), "4");
}

#[test]
fn violation_exits_nonzero_with_witness_line() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("eq4.sig"), "arity 4\n0000 1\n1111 1\n").unwrap();
    let out = run(&["mgi", "eq4.sig"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.contains("alpha=1000"), "{text}");
    assert!(text.contains("\"residual\":\"-1\""), "{text}");

    fs::write(dir.path().join("bad.sig"), "arity 2\n00 1\n01 1\n").unwrap();
    let out = run(&["parity", "bad.sig"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn decompose_reconstruct_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let core = star_core(3, Scalar::from_int(2));
    let gadget = wire_gadget(2, |_| Scalar::from_int(1));
    let sig = block_expand_signature(&core.signature(), &gadget.signature(), 3);
    fs::write(dir.path().join("expanded.sig"), sig.to_text()).unwrap();

    let out = run(&["decompose", "expanded.sig", "--block", "2"], dir.path());
    assert!(out.status.success(), "{}", stdout(&out));
    let text = stdout(&out);
    fs::write(dir.path().join("expanded.dec"), &text).unwrap();
    let parsed = decomposition_from_text(&text).unwrap();
    assert_eq!(parsed.block_size, 2);

    let out = run(&["reconstruct", "expanded.dec"], dir.path());
    assert!(out.status.success());
    let rebuilt = BooleanSignature::parse_text(&stdout(&out)).unwrap();
    assert_eq!(rebuilt, sig);
}

#[test]
fn demo_and_grid_evaluation() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["demo-gamma1", "--json"], dir.path());
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(report["pass"], serde_json::Value::Bool(true));
    assert_eq!(report["witness"]["rank"], 4);

    fs::write(
        dir.path().join("one2.gate"),
        "nodes 3\nedge 1 3 1\nedge 3 2 1\nexternal 1 2\nrot 1: 3\nrot 2: 3\nrot 3: 1 2\n",
    )
    .unwrap();
    fs::write(
        dir.path().join("c4.grid"),
        "q 2\nuvertex 1 one:2\nuvertex 2 one:2\nvvertex 3 one:2\nvvertex 4 one:2\n\
         edge 1 3\nedge 2 3\nedge 2 4\nedge 1 4\n\
         order 1: 1 4\norder 2: 2 3\norder 3: 1 2\norder 4: 3 4\n\
         gate 1 one2.gate\ngate 2 one2.gate\ngate 3 one2.gate\ngate 4 one2.gate\n",
    )
    .unwrap();
    let out = run(&["holant", "c4.grid", "--method", "both"], dir.path());
    assert!(out.status.success(), "{}", stdout(&out));
    let text = stdout(&out);
    assert!(text.contains("brute 2"), "{text}");
    assert!(text.contains("match"), "{text}");

    fs::write(dir.path().join("h.mat"), "rows 2\ncols 2\n1, 1\n1, -1\n").unwrap();
    let out = run(&["verify-holant", "c4.grid", "h.mat"], dir.path());
    assert!(out.status.success(), "{}", stdout(&out));
}

#[test]
fn harness_commands_run_quickly() {
    let dir = tempfile::tempdir().unwrap();
    let started = std::time::Instant::now();
    for args in [
        vec!["verify-eq-theorem", "--trials", "50"],
        vec!["verify-rank-bound", "--trials", "100"],
        vec!["verify-decomposition", "--trials", "100"],
        vec!["demo-gamma1"],
    ] {
        let out = run(&args, dir.path());
        assert!(out.status.success(), "{:?}: {}", args, stdout(&out));
    }
    // The default harness set stays far inside its one-minute budget.
    assert!(started.elapsed() < std::time::Duration::from_secs(60));
}

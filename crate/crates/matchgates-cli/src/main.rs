//! Command-line front end: gate and signature inspection, matching counts
//! by both routes, holographic transformations, decomposition, grid
//! evaluation, and the seeded verification harness.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use matchgates::decompose::{
    decompose, decomposition_from_text, decomposition_to_text, Validation,
};
use matchgates::fkt;
use matchgates::harness::{
    demo_gamma1, verify_decomposition, verify_equality_theorem, verify_rank_bound, HarnessReport,
};
use matchgates::holant::{parse_grid_text, verify_transform_invariance, DEFAULT_STATE_CAP};
use matchgates::holo::{
    equality, matrix_to_text, parse_matrix_text, right_inverse, transform, DomainSignature,
    TransformMatrix,
};
use matchgates::signature::{DetVerdict, MgiVerdict, ParityVerdict};
use matchgates::{bits, BooleanSignature, Matchgate};

#[derive(Parser)]
#[command(name = "matchgates", version, about = "Exact planar matchgate and Holant toolkit")]
struct Cli {
    /// Emit machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 0xF17)]
    seed: u64,
    /// State cap for brute-force enumerations.
    #[arg(long, global = true)]
    cap: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Brute,
    Fkt,
    Both,
}

#[derive(Args)]
struct BlockArg {
    /// Block size ℓ for the blockwise view.
    #[arg(long = "block")]
    block: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Perfect-matching sum of a gate file.
    Perfmatch {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Both)]
        method: Method,
    },
    /// Signature of a gate file (deletion sweep over the external nodes).
    Signature { file: PathBuf },
    /// Matchgate identity sweep over a signature file.
    Mgi {
        file: PathBuf,
        /// Sample this many identities instead of sweeping exhaustively.
        #[arg(long)]
        sample: Option<usize>,
    },
    /// Parity classification of a signature file.
    Parity { file: PathBuf },
    /// Matrix form of a signature under a blockwise view.
    Matform {
        file: PathBuf,
        #[command(flatten)]
        block: BlockArg,
    },
    /// Exact rank of the blockwise matrix form.
    Rank {
        file: PathBuf,
        #[command(flatten)]
        block: BlockArg,
    },
    /// The vanishing-determinant diagnostics (needs 3+ blocks).
    Detcheck {
        file: PathBuf,
        #[command(flatten)]
        block: BlockArg,
    },
    /// Minimum-weight linearly independent row pair of the matrix form.
    Minpair {
        file: PathBuf,
        #[command(flatten)]
        block: BlockArg,
        #[arg(long = "same-parity")]
        same_parity: bool,
    },
    /// Transform a domain signature by a matrix: f · M^(⊗n).
    Transform { signature: PathBuf, matrix: PathBuf },
    /// Right inverse of a full-row-rank matrix.
    Rightinv { matrix: PathBuf },
    /// The Equality signature over [q] with the given arity.
    Eq {
        #[arg(long)]
        q: usize,
        #[arg(long)]
        n: usize,
    },
    /// Decompose a blockwise symmetric gate signature.
    Decompose {
        file: PathBuf,
        #[command(flatten)]
        block: BlockArg,
        /// Validate identities exhaustively regardless of arity.
        #[arg(long)]
        exhaustive: bool,
    },
    /// Re-emit the signature encoded by a decomposition file.
    Reconstruct { file: PathBuf },
    /// Evaluate a signature grid.
    Holant {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Brute)]
        method: Method,
    },
    /// Check Holant invariance under a holographic transformation.
    VerifyHolant { grid: PathBuf, matrix: PathBuf },
    /// Reproduce the published counterexample gate and its diagnostics.
    DemoGamma1,
    /// Equality non-realizability at the given parameters.
    VerifyEqTheorem {
        #[arg(long, default_value_t = 3)]
        q: usize,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        block: usize,
        #[arg(long, default_value_t = 50)]
        trials: usize,
    },
    /// Rank bound and determinant diagnostics over generated gates.
    VerifyRankBound {
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
    /// Decomposition round trips and witness gadgets over generated gates.
    VerifyDecomposition {
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_gate(path: &Path) -> Result<Matchgate> {
    Matchgate::parse_text(&read(path)?).map_err(|e| anyhow!("{}: {e}", path.display()))
}

fn load_signature(path: &Path) -> Result<BooleanSignature> {
    BooleanSignature::parse_text(&read(path)?).map_err(|e| anyhow!("{}: {e}", path.display()))
}

fn load_matrix(path: &Path) -> Result<TransformMatrix> {
    let m = parse_matrix_text(&read(path)?).map_err(|e| anyhow!("{}: {e}", path.display()))?;
    TransformMatrix::new(m).map_err(|e| anyhow!("{}: {e}", path.display()))
}

/// Verdict-style outcome: pass/fail plus a machine-readable payload.
struct Outcome {
    pass: bool,
    payload: Value,
    text: String,
}

impl Outcome {
    fn pass(text: impl Into<String>, payload: Value) -> Self {
        Outcome {
            pass: true,
            payload,
            text: text.into(),
        }
    }

    fn verdict(pass: bool, text: impl Into<String>, payload: Value) -> Self {
        Outcome {
            pass,
            payload,
            text: text.into(),
        }
    }

    fn from_report(report: &HarnessReport) -> Self {
        Outcome {
            pass: report.pass,
            payload: json!({
                "name": report.name,
                "claim": report.claim,
                "pass": report.pass,
                "witness": report.witness,
                "seed": report.seed,
                "duration_ms": report.duration_ms,
            }),
            text: report.summary_line(),
        }
    }
}

fn grid_resolver(base: PathBuf) -> impl FnMut(&str) -> std::result::Result<String, String> {
    move |p: &str| fs::read_to_string(base.join(p)).map_err(|e| format!("{p}: {e}"))
}

fn run(cli: &Cli) -> Result<Outcome> {
    let cap = cli.cap.unwrap_or(DEFAULT_STATE_CAP);
    match &cli.command {
        Command::Perfmatch { file, method } => {
            let gate = load_gate(file)?;
            let brute = (*method != Method::Fkt).then(|| gate.perfmatch());
            let fast = match method {
                Method::Brute => None,
                _ => Some(fkt::perfmatch_fkt(&gate)?),
            };
            let agree = match (&brute, &fast) {
                (Some(a), Some(b)) => Some(a == b),
                _ => None,
            };
            let text = match (&brute, &fast, agree) {
                (Some(b), Some(f), Some(ok)) => format!(
                    "brute {b}\nfkt {f}\n{}",
                    if ok { "match" } else { "MISMATCH" }
                ),
                (Some(b), None, _) => format!("{b}"),
                (None, Some(f), _) => format!("{f}"),
                _ => unreachable!(),
            };
            Ok(Outcome::verdict(
                agree.unwrap_or(true),
                text,
                json!({
                    "brute": brute.map(|s| s.to_string()),
                    "fkt": fast.map(|s| s.to_string()),
                    "match": agree,
                }),
            ))
        }
        Command::Signature { file } => {
            let gate = load_gate(file)?;
            let sig = gate.signature();
            Ok(Outcome::pass(
                sig.to_text().trim_end().to_string(),
                json!({ "signature": sig.to_text() }),
            ))
        }
        Command::Mgi { file, sample } => {
            let sig = load_signature(file)?;
            let verdict = match sample {
                Some(samples) => sig.check_mgi_sampled(*samples, cli.seed),
                None => sig.check_mgi().map_err(|e| anyhow!("{e}"))?,
            };
            Ok(match verdict {
                MgiVerdict::Pass => Outcome::pass("pass", json!({"pass": true})),
                MgiVerdict::Fail(w) => Outcome::verdict(
                    false,
                    format!("fail: {}", w.describe()),
                    json!({
                        "pass": false,
                        "alpha": bits::to_bitstring(w.alpha, sig.arity()),
                        "positions": w.positions(),
                        "residual": w.residual.to_string(),
                    }),
                ),
            })
        }
        Command::Parity { file } => {
            let sig = load_signature(file)?;
            let (pass, text, payload) = match sig.check_parity() {
                ParityVerdict::Even => (true, "even".into(), json!({"class": "even"})),
                ParityVerdict::Odd => (true, "odd".into(), json!({"class": "odd"})),
                ParityVerdict::Zero => (true, "zero".into(), json!({"class": "zero"})),
                ParityVerdict::Violated {
                    even_witness,
                    odd_witness,
                } => (
                    false,
                    format!(
                        "violated: even {} odd {}",
                        bits::to_bitstring(even_witness, sig.arity()),
                        bits::to_bitstring(odd_witness, sig.arity())
                    ),
                    json!({
                        "class": "violated",
                        "even_witness": bits::to_bitstring(even_witness, sig.arity()),
                        "odd_witness": bits::to_bitstring(odd_witness, sig.arity()),
                    }),
                ),
            };
            Ok(Outcome::verdict(pass, text, payload))
        }
        Command::Matform { file, block } => {
            let sig = load_signature(file)?;
            let view = sig.block_view(block.block).map_err(|e| anyhow!("{e}"))?;
            let form = view.matrix_form();
            Ok(Outcome::pass(
                matrix_to_text(&form.matrix).trim_end().to_string(),
                json!({
                    "rows": form.matrix.rows(),
                    "cols": form.matrix.cols(),
                    "rank": form.matrix.rank(),
                    "matrix": matrix_to_text(&form.matrix),
                }),
            ))
        }
        Command::Rank { file, block } => {
            let sig = load_signature(file)?;
            let view = sig.block_view(block.block).map_err(|e| anyhow!("{e}"))?;
            let rank = view.matrix_form().matrix.rank();
            Ok(Outcome::pass(format!("{rank}"), json!({ "rank": rank })))
        }
        Command::Detcheck { file, block } => {
            let sig = load_signature(file)?;
            let view = sig.block_view(block.block).map_err(|e| anyhow!("{e}"))?;
            Ok(match view.check_det_identities().map_err(|e| anyhow!("{e}"))? {
                DetVerdict::Pass => Outcome::pass("pass", json!({"pass": true})),
                DetVerdict::Violated(w) => Outcome::verdict(
                    false,
                    format!(
                        "fail: base={} i={} j={} s={} t={} kind={:?} det={}",
                        bits::to_bitstring(w.base, sig.arity()),
                        w.i,
                        w.j,
                        w.s,
                        w.t,
                        w.kind,
                        w.value
                    ),
                    json!({
                        "pass": false,
                        "base": bits::to_bitstring(w.base, sig.arity()),
                        "i": w.i, "j": w.j, "s": w.s, "t": w.t,
                        "kind": format!("{:?}", w.kind),
                        "det": w.value.to_string(),
                    }),
                ),
            })
        }
        Command::Minpair {
            file,
            block,
            same_parity,
        } => {
            let sig = load_signature(file)?;
            let view = sig.block_view(block.block).map_err(|e| anyhow!("{e}"))?;
            Ok(match view.find_min_weight_pair(*same_parity) {
                Some(p) => Outcome::pass(
                    format!(
                        "sigma={} tau={} weight={}",
                        bits::to_bitstring(p.sigma, block.block),
                        bits::to_bitstring(p.tau, block.block),
                        p.weight
                    ),
                    json!({
                        "sigma": bits::to_bitstring(p.sigma, block.block),
                        "tau": bits::to_bitstring(p.tau, block.block),
                        "weight": p.weight,
                    }),
                ),
                None => Outcome::pass("none", json!({ "pair": Value::Null })),
            })
        }
        Command::Transform { signature, matrix } => {
            let f = DomainSignature::parse_text(&read(signature)?)
                .map_err(|e| anyhow!("{}: {e}", signature.display()))?;
            let m = load_matrix(matrix)?;
            let image = transform(&f, &m).map_err(|e| anyhow!("{e}"))?;
            Ok(Outcome::pass(
                image.to_text().trim_end().to_string(),
                json!({ "signature": image.to_text(), "block_size": m.block_size() }),
            ))
        }
        Command::Rightinv { matrix } => {
            let m = load_matrix(matrix)?;
            let inv = right_inverse(&m).map_err(|e| anyhow!("{e}"))?;
            Ok(Outcome::pass(
                matrix_to_text(&inv).trim_end().to_string(),
                json!({ "matrix": matrix_to_text(&inv) }),
            ))
        }
        Command::Eq { q, n } => {
            let sig = equality(*q, *n).map_err(|e| anyhow!("{e}"))?;
            Ok(Outcome::pass(
                sig.to_text().trim_end().to_string(),
                json!({ "signature": sig.to_text() }),
            ))
        }
        Command::Decompose {
            file,
            block,
            exhaustive,
        } => {
            let sig = load_signature(file)?;
            let view = sig.block_view(block.block).map_err(|e| anyhow!("{e}"))?;
            let validation = if *exhaustive {
                Validation::Exhaustive
            } else {
                Validation::Auto
            };
            let d = decompose(&view, validation).map_err(|e| anyhow!("{e}"))?;
            let text = decomposition_to_text(&d);
            Ok(Outcome::pass(
                text.trim_end().to_string(),
                json!({ "decomposition": text }),
            ))
        }
        Command::Reconstruct { file } => {
            let d = decomposition_from_text(&read(file)?).map_err(|e| anyhow!("{e}"))?;
            let sig = d.reconstruct_full().map_err(|e| anyhow!("{e}"))?;
            Ok(Outcome::pass(
                sig.to_text().trim_end().to_string(),
                json!({ "signature": sig.to_text() }),
            ))
        }
        Command::Holant { file, method } => {
            let base = file.parent().map(Path::to_path_buf).unwrap_or_default();
            let text = read(file)?;
            let mut resolver = grid_resolver(base);
            let parsed = parse_grid_text(&text, &mut resolver).map_err(|e| anyhow!("{e}"))?;
            let brute = match method {
                Method::Fkt => None,
                _ => Some(parsed.grid.holant_bruteforce(cap).map_err(|e| anyhow!("{e}"))?),
            };
            let matched = match method {
                Method::Brute => None,
                _ => {
                    let (gu, gv) = parsed.require_gates().map_err(|e| anyhow!("{e}"))?;
                    Some(
                        parsed
                            .grid
                            .holant_matchings(&gu, &gv)
                            .map_err(|e| anyhow!("{e}"))?,
                    )
                }
            };
            let agree = match (&brute, &matched) {
                (Some(a), Some(b)) => Some(a == b),
                _ => None,
            };
            let text = match (&brute, &matched, agree) {
                (Some(b), Some(f), Some(ok)) => format!(
                    "brute {b}\nfkt {f}\n{}",
                    if ok { "match" } else { "MISMATCH" }
                ),
                (Some(b), None, _) => format!("{b}"),
                (None, Some(f), _) => format!("{f}"),
                _ => unreachable!(),
            };
            Ok(Outcome::verdict(
                agree.unwrap_or(true),
                text,
                json!({
                    "brute": brute.map(|s| s.to_string()),
                    "fkt": matched.map(|s| s.to_string()),
                    "match": agree,
                }),
            ))
        }
        Command::VerifyHolant { grid, matrix } => {
            let base = grid.parent().map(Path::to_path_buf).unwrap_or_default();
            let text = read(grid)?;
            let mut resolver = grid_resolver(base);
            let parsed = parse_grid_text(&text, &mut resolver).map_err(|e| anyhow!("{e}"))?;
            let m = load_matrix(matrix)?;
            let check =
                verify_transform_invariance(&parsed.grid, &m, cap).map_err(|e| anyhow!("{e}"))?;
            Ok(Outcome::verdict(
                check.holds(),
                format!(
                    "lhs {}\nrhs {}\n{}",
                    check.lhs,
                    check.rhs,
                    if check.holds() { "equal" } else { "DIFFER" }
                ),
                json!({
                    "lhs": check.lhs.to_string(),
                    "rhs": check.rhs.to_string(),
                    "equal": check.holds(),
                }),
            ))
        }
        Command::DemoGamma1 => Ok(Outcome::from_report(&demo_gamma1())),
        Command::VerifyEqTheorem {
            q,
            n,
            block,
            trials,
        } => {
            let report = verify_equality_theorem(*q, *n, *block, *trials, cli.seed)
                .map_err(|e| anyhow!("{e}"))?;
            Ok(Outcome::from_report(&report))
        }
        Command::VerifyRankBound { trials } => {
            Ok(Outcome::from_report(&verify_rank_bound(*trials, cli.seed)))
        }
        Command::VerifyDecomposition { trials } => Ok(Outcome::from_report(
            &verify_decomposition(*trials, cli.seed),
        )),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            if cli.json {
                println!("{}", outcome.payload);
            } else {
                println!("{}", outcome.text);
                if !outcome.pass {
                    // One machine-readable witness line accompanies every
                    // violation.
                    println!("{}", outcome.payload);
                }
            }
            if outcome.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

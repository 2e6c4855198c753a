//! Command-line front end: construction commands (fold, embed, classify,
//! sample, phi1), the seeded verification suites, and fixture emission.
//! All input and output is JSON; reports are deterministic for fixed
//! arguments and seed (wall time goes to stderr, never into the data).
//!
//! Exit codes: 0 = success or clean failure report, 1 = verification
//! failures or missed trial quota, 2 = usage or I/O errors.

use std::collections::BTreeMap;
use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result, anyhow, bail};
use clap::{Parser, Subcommand};
use serde::Serialize;

use splitquiver::adhm::{GradedDims, SampleOptions, sample_point};
use splitquiver::fixtures;
use splitquiver::fold::{classify_fixed, enumerate_decompositions, psi_embed, Decomposition};
use splitquiver::io::{AdhmFile, FoldContextFile};
use splitquiver::maffei::{check_involution, phi1};
use splitquiver::partition::jordan_type_nilpotent;
use splitquiver::quiver::{AdmAut, Quiver, cartan, split_quotient, split_vertex_id};
use splitquiver::slodowy::{SliceSpec, build_form, closure_bound, in_orbit_closure, in_slice,
                           nonempty_type_a};
use splitquiver::verify;

#[derive(Parser)]
#[command(name = "splitquiver", version, about = "Exact split-quotient quivers, fixed points and two-row slices")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build the split-quotient quiver of (quiver, automorphism) and report
    /// both Cartan matrices with the transpose check.
    Fold {
        #[arg(long)]
        quiver: PathBuf,
        #[arg(long)]
        aut: PathBuf,
        /// Override the period stored in the automorphism file.
        #[arg(long)]
        period: Option<u32>,
    },
    /// Run one verification suite and print its report.
    Verify {
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, env = "SPLITQUIVER_SEED", default_value_t = 0)]
        seed: u64,
        /// Minimum completed-trial percentage.
        #[arg(long, default_value_t = 80)]
        quota: usize,
        /// Restrict the sampled suites to one slice case: "n,k" or "n,k,p,m".
        #[arg(long)]
        case: Option<String>,
        /// Custom dimension vector for --case, comma-separated.
        #[arg(long)]
        dims: Option<String>,
    },
    /// Map a type-A datum to its slice element and report membership data.
    Phi1 {
        #[arg(long)]
        adhm: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        /// Middle involution signature "p,m" (required when k = n).
        #[arg(long)]
        signature: Option<String>,
    },
    /// Embed a split-quotient datum into the big quiver.
    Embed {
        #[arg(long)]
        ctx: PathBuf,
        #[arg(long)]
        decomposition: PathBuf,
        #[arg(long)]
        adhm: PathBuf,
    },
    /// Decide theta-stability of an orbit and report its component and
    /// split-quotient preimage.
    ClassifyFixed {
        #[arg(long)]
        ctx: PathBuf,
        #[arg(long)]
        adhm: PathBuf,
    },
    /// List the components D(v) of a fold context.
    Decompose {
        #[arg(long)]
        ctx: PathBuf,
    },
    /// Sample an exact relation point on a quiver.
    Sample {
        #[arg(long)]
        quiver: PathBuf,
        /// Comma-separated dimensions in the quiver's vertex order.
        #[arg(long)]
        v: String,
        #[arg(long)]
        w: String,
        #[arg(long, env = "SPLITQUIVER_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        delta_zero: bool,
        #[arg(long)]
        no_stability: bool,
        #[arg(long, default_value_t = 3)]
        bound: i64,
        #[arg(long, default_value_t = 1)]
        field_order: u32,
    },
    /// Nonemptiness test for the type-A data of a slice.
    Nonempty {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        v: String,
    },
    /// Emit a standard fixture as JSON.
    Fixture {
        /// One of: a3-involution, a5-involution, a7-involution,
        /// affine-a3-rotation, d4-triality, e6-involution,
        /// ctx:N,K[,P,M] (slice fold context), split:N (split quiver of
        /// the A_{2N-1} involution).
        #[arg(long)]
        name: String,
    },
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let mut s = String::new();
    fs::File::open(path)
        .with_context(|| format!("cannot open {}", path.display()))?
        .read_to_string(&mut s)?;
    serde_json::from_str(&s).with_context(|| format!("cannot parse {}", path.display()))
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn parse_dims(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|_| anyhow!("bad dimension entry {t:?}")))
        .collect()
}

fn parse_signature(s: Option<&str>, k: usize, n: usize) -> Result<Option<(usize, usize)>> {
    match (s, k == n) {
        (Some(t), true) => {
            let parts: Vec<usize> = parse_dims(t)?;
            if parts.len() != 2 {
                bail!("signature must be two comma-separated integers");
            }
            Ok(Some((parts[0], parts[1])))
        }
        (None, true) => bail!("k = n requires --signature p,m"),
        (Some(_), false) => bail!("k < n does not take a signature"),
        (None, false) => Ok(None),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.cmd {
        Cmd::Fold { quiver, aut, period } => {
            let q: Quiver = read_json(&quiver)?;
            let mut a: AdmAut = read_json(&aut)?;
            if let Some(p) = period {
                a.period = p;
            }
            let sq = split_quotient(&q, &a)?;
            let big = cartan(&q, &a)?;
            let small = cartan(&sq.split, &sq.split_aut)?;
            let transpose_check = big.reps.iter().all(|i| {
                big.reps.iter().all(|j| {
                    small.entry(&split_vertex_id(i, 0), &split_vertex_id(j, 0)) == big.entry(j, i)
                })
            });
            #[derive(Serialize)]
            struct FoldOut {
                reps: Vec<String>,
                split_quiver: Quiver,
                split_aut: AdmAut,
                omega1: Vec<String>,
                f: BTreeMap<String, u32>,
                cartan: splitquiver::quiver::CartanMatrix,
                cartan_split: splitquiver::quiver::CartanMatrix,
                transpose_check: bool,
            }
            print_json(&FoldOut {
                reps: sq.reps.clone(),
                split_quiver: sq.split.clone(),
                split_aut: sq.split_aut.clone(),
                omega1: sq.omega1.clone(),
                f: sq.f_exp.clone(),
                cartan: big,
                cartan_split: small,
                transpose_check,
            })?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Verify { suite, trials, seed, quota, case, dims } => {
            let filter = match (&case, &dims) {
                (None, None) => None,
                (None, Some(_)) => bail!("--dims requires --case"),
                (Some(c), d) => {
                    let parts = parse_dims(c)?;
                    let (n, k, signature) = match parts.as_slice() {
                        [n, k] => (*n, *k, None),
                        [n, k, p, m] => (*n, *k, Some((*p, *m))),
                        _ => bail!("--case needs n,k or n,k,p,m"),
                    };
                    Some(verify::CaseFilter {
                        n,
                        k,
                        signature,
                        v: d.as_deref().map(parse_dims).transpose()?,
                    })
                }
            };
            let t0 = Instant::now();
            let report = verify::run_suite_with(&suite, trials, seed, filter)?;
            print_json(&report)?;
            eprintln!(
                "suite {} finished in {:.2?}: {} completed, {} skipped, {} failures",
                report.suite,
                t0.elapsed(),
                report.trials_completed,
                report.trials_skipped,
                report.failures.len()
            );
            if !report.passed() {
                return Ok(ExitCode::from(1));
            }
            if !report.quota_met(quota) {
                eprintln!("insufficient samples: quota of {quota}% not met");
                return Ok(ExitCode::from(1));
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Phi1 { adhm, n, k, signature } => {
            let sig = parse_signature(signature.as_deref(), k, n)?;
            let spec = SliceSpec::new(n, k, sig)?;
            let q = fixtures::type_a_quiver(n);
            let file: AdhmFile = read_json(&adhm)?;
            let x = file.into_datum(&q)?;
            let out = phi1(&spec, &q, &x)?;
            let slice_ok = in_slice(&spec, &out)?;
            let jt = jordan_type_nilpotent(&out).ok();
            let v: Vec<usize> =
                (1..=2 * n - 1).map(|i| x.dims.v_of(&fixtures::a_vertex(i))).collect();
            let rep = nonempty_type_a(n, k, &v)?;
            let closure_ok = match &jt {
                Some(_) => in_orbit_closure(&out, &closure_bound(n, rep.ell))?,
                None => false,
            };
            let ctx = fixtures::slice_fold_context(&spec, Some(&v))?;
            let theta_check = check_involution(&spec, &ctx, &q, &x)?;
            #[derive(Serialize)]
            struct Phi1Out {
                matrix: splitquiver::Mat,
                in_slice: bool,
                jordan_type: Option<Vec<usize>>,
                in_closure_of: Vec<usize>,
                in_closure: bool,
                form_type: splitquiver::slodowy::FormKind,
                theta_check: bool,
            }
            print_json(&Phi1Out {
                matrix: out,
                in_slice: slice_ok,
                jordan_type: jt.map(|p| p.parts().to_vec()),
                in_closure_of: closure_bound(n, rep.ell).parts().to_vec(),
                in_closure: closure_ok,
                form_type: build_form(&spec).kind,
                theta_check,
            })?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Embed { ctx, decomposition, adhm } => {
            let ctx = read_json::<FoldContextFile>(&ctx)?.into_context()?;
            let d: Decomposition = read_json(&decomposition)?;
            let file: AdhmFile = read_json(&adhm)?;
            let y = file.into_datum(&ctx.sq.split)?;
            let x = psi_embed(&ctx, &d, &y)?;
            print_json(&AdhmFile::from_datum(&x, "psi-image"))?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::ClassifyFixed { ctx, adhm } => {
            let ctx = read_json::<FoldContextFile>(&ctx)?.into_context()?;
            let file: AdhmFile = read_json(&adhm)?;
            let quiver_ref = file.quiver_ref.clone();
            let x = file.into_datum(&ctx.quiver)?;
            #[derive(Serialize)]
            struct ClassifyOut {
                fixed: bool,
                #[serde(skip_serializing_if = "Option::is_none")]
                vtilde: Option<Decomposition>,
                #[serde(skip_serializing_if = "Option::is_none")]
                normalized: Option<AdhmFile>,
                #[serde(skip_serializing_if = "Option::is_none")]
                preimage: Option<AdhmFile>,
            }
            let out = match classify_fixed(&ctx, &x)? {
                Some(c) => ClassifyOut {
                    fixed: true,
                    vtilde: Some(c.vtilde),
                    normalized: Some(AdhmFile::from_datum(&c.normalized, &quiver_ref)),
                    preimage: Some(AdhmFile::from_datum(&c.preimage, "split-quotient")),
                },
                None => ClassifyOut { fixed: false, vtilde: None, normalized: None, preimage: None },
            };
            print_json(&out)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Decompose { ctx } => {
            let ctx = read_json::<FoldContextFile>(&ctx)?.into_context()?;
            print_json(&enumerate_decompositions(&ctx))?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Sample { quiver, v, w, seed, delta_zero, no_stability, bound, field_order } => {
            let q: Quiver = read_json(&quiver)?;
            let v = parse_dims(&v)?;
            let w = parse_dims(&w)?;
            let dims = GradedDims::new(&q, &v, &w)?;
            let opts = SampleOptions {
                delta_zero,
                require_stable: !no_stability,
                bound,
                field_order,
                ..Default::default()
            };
            #[derive(Serialize)]
            #[serde(tag = "status", rename_all = "lowercase")]
            enum SampleOut {
                Ok { datum: AdhmFile, seed: u64 },
                Failure { attempts: usize, seed: u64 },
            }
            match sample_point(&q, &dims, seed, &opts) {
                Ok(x) => print_json(&SampleOut::Ok {
                    datum: AdhmFile::from_datum(&x, "sampled"),
                    seed,
                })?,
                Err(splitquiver::Error::SampleFailure { attempts }) => {
                    print_json(&SampleOut::Failure { attempts, seed })?
                }
                Err(e) => return Err(e.into()),
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Nonempty { n, k, v } => {
            let v = parse_dims(&v)?;
            let report = nonempty_type_a(n, k, &v)?;
            print_json(&report)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Fixture { name } => {
            emit_fixture(&name)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn emit_fixture(name: &str) -> Result<()> {
    #[derive(Serialize)]
    struct Pair {
        quiver: Quiver,
        aut: AdmAut,
    }
    let pair = |q: Quiver, a: AdmAut| Pair { quiver: q, aut: a };
    match name {
        "a3-involution" => {
            let (q, a) = fixtures::type_a_with_involution(2);
            print_json(&pair(q, a))
        }
        "a5-involution" => {
            let (q, a) = fixtures::type_a_with_involution(3);
            print_json(&pair(q, a))
        }
        "a7-involution" => {
            let (q, a) = fixtures::type_a_with_involution(4);
            print_json(&pair(q, a))
        }
        "affine-a3-rotation" => {
            let (q, a) = fixtures::affine_a3_with_rotation();
            print_json(&pair(q, a))
        }
        "d4-triality" => {
            let (q, a) = fixtures::d4_with_triality();
            print_json(&pair(q, a))
        }
        "e6-involution" => {
            let (q, a) = fixtures::e6_with_involution();
            print_json(&pair(q, a))
        }
        other => {
            if let Some(rest) = other.strip_prefix("ctx:") {
                let parts: Vec<usize> = rest
                    .split(',')
                    .map(|t| t.parse::<usize>().map_err(|_| anyhow!("bad ctx spec {rest:?}")))
                    .collect::<Result<_>>()?;
                let (n, k) = match parts.as_slice() {
                    [n, k] | [n, k, _, _] => (*n, *k),
                    _ => bail!("ctx fixture needs N,K or N,K,P,M"),
                };
                let sig = match parts.as_slice() {
                    [_, _, p, m] => Some((*p, *m)),
                    _ if k == n => Some((1, 1)),
                    _ => None,
                };
                let spec = SliceSpec::new(n, k, sig)?;
                let ctx = fixtures::slice_fold_context(&spec, None)?;
                print_json(&FoldContextFile::from_context(&ctx))
            } else if let Some(rest) = other.strip_prefix("split:") {
                let n: usize = rest.parse().map_err(|_| anyhow!("bad split spec {rest:?}"))?;
                let (q, a) = fixtures::type_a_with_involution(n);
                let sq = split_quotient(&q, &a)?;
                print_json(&pair(sq.split, sq.split_aut))
            } else {
                bail!("unknown fixture {name:?}")
            }
        }
    }
}

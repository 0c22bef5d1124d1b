//! Command-line surface for stabilizer secret-sharing analysis and
//! reconstruction.
//!
//! Exit codes are a stable contract for scripting: 0 success, 1 input error,
//! 2 verification mismatch, 3 precondition violation (non-qualified share
//! set, unnormalized secret).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use num_complex::Complex64;
use serde_json::json;

use stabshare::golden;
use stabshare::io;
use stabshare::oracle::{audit_dimensions, full_access_structure, SubsetClass};
use stabshare::qstate::{verify_codeword, CodewordFamily, QuditState};
use stabshare::reconstruct::{ReconstructError, ReconstructionPlan};
use stabshare::symplectic::{SharePartition, StabilizerCode};

const EXIT_INPUT: u8 = 1;
const EXIT_MISMATCH: u8 = 2;
const EXIT_PRECONDITION: u8 = 3;

#[derive(Parser)]
#[command(
    name = "stabshare",
    version,
    about = "Decide qualified share sets of a stabilizer secret-sharing scheme \
             and simulate unitary reconstruction of the secret"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a share set (or sweep all of them) as qualified, forbidden,
    /// or intermediate
    Analyze {
        /// Stabilizer code file
        #[arg(long, value_name = "FILE")]
        code: PathBuf,
        /// Candidate share set, e.g. 3,4,5
        #[arg(
            long = "J",
            value_name = "CSV",
            conflicts_with = "all",
            required_unless_present = "all"
        )]
        j: Option<String>,
        /// Sweep all 2^n subsets and cross-check against the oracles
        #[arg(long)]
        all: bool,
        /// Tolerance for the state-witness cross-checks
        #[arg(long, default_value_t = 1e-9, value_name = "FLOAT")]
        tol: f64,
        /// Machine-readable output
        #[arg(long)]
        json: bool,
    },
    /// Encode a secret, apply the reconstruction unitary on the share set,
    /// and report fidelity, purity, and residual entanglement
    Reconstruct {
        /// Stabilizer code file
        #[arg(long, value_name = "FILE")]
        code: PathBuf,
        /// Qualified share set, e.g. 3,4,5
        #[arg(long = "J", value_name = "CSV")]
        j: String,
        /// Secret: a state file path or an inline amplitude list such as
        /// "0.6,0.8" or "(0,0.6),(0.8,0)"
        #[arg(long, value_name = "FILE|AMPS")]
        secret: String,
        /// Optional codeword state files, one per secret basis label in
        /// ascending order; synthesized deterministically when omitted
        #[arg(long, value_name = "FILE")]
        codeword: Vec<PathBuf>,
        /// Numerical tolerance
        #[arg(long, default_value_t = 1e-10, value_name = "FLOAT")]
        tol: f64,
        /// Write the full output state to this file
        #[arg(long, value_name = "FILE")]
        emit_state: Option<PathBuf>,
        /// Machine-readable output
        #[arg(long)]
        json: bool,
    },
    /// Run the bundled [[5,1,3]] end-to-end verification corpus
    Golden {
        /// Numerical tolerance
        #[arg(long, default_value_t = 1e-9, value_name = "FLOAT")]
        tol: f64,
        /// Machine-readable output
        #[arg(long)]
        json: bool,
    },
    /// Re-derive and check the dimension identities for a share set or all
    /// of them
    Audit {
        /// Stabilizer code file
        #[arg(long, value_name = "FILE")]
        code: PathBuf,
        /// Share set, e.g. 3,4,5
        #[arg(
            long = "J",
            value_name = "CSV",
            conflicts_with = "all",
            required_unless_present = "all"
        )]
        j: Option<String>,
        /// Audit all 2^n subsets
        #[arg(long)]
        all: bool,
        /// Machine-readable output
        #[arg(long)]
        json: bool,
    },
}

/// A failure with the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Failure {
        Failure {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }

    fn mismatch(message: impl Into<String>) -> Failure {
        Failure {
            code: EXIT_MISMATCH,
            message: message.into(),
        }
    }

    fn precondition(message: impl Into<String>) -> Failure {
        Failure {
            code: EXIT_PRECONDITION,
            message: message.into(),
        }
    }
}

fn main() -> ExitCode {
    // die silently on a closed pipe instead of panicking mid-print
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_INPUT,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Analyze {
            code,
            j,
            all,
            tol,
            json,
        } => cmd_analyze(&code, j.as_deref(), all, tol, json),
        Command::Reconstruct {
            code,
            j,
            secret,
            codeword,
            tol,
            emit_state,
            json,
        } => cmd_reconstruct(
            &code,
            &j,
            &secret,
            &codeword,
            tol,
            emit_state.as_deref(),
            json,
        ),
        Command::Golden { tol, json } => cmd_golden(tol, json),
        Command::Audit { code, j, all, json } => cmd_audit(&code, j.as_deref(), all, json),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn load_code(path: &Path) -> Result<StabilizerCode, Failure> {
    io::load_code(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn parse_share_set(spec: &str, n: usize) -> Result<SharePartition, Failure> {
    let mut indices = Vec::new();
    for token in spec.split(',') {
        let token = token.trim();
        if token.is_empty() {
            continue;
        }
        let idx: usize = token
            .parse()
            .map_err(|_| Failure::input(format!("invalid share index `{token}`")))?;
        indices.push(idx);
    }
    SharePartition::new(n, &indices).map_err(|e| Failure::input(e.to_string()))
}

fn class_of(code: &StabilizerCode, partition: &SharePartition) -> SubsetClass {
    if code.is_qualified(partition) {
        SubsetClass::Qualified
    } else {
        let complement = SharePartition::new(partition.n(), partition.jbar())
            .expect("complement indices are valid");
        if code.is_qualified(&complement) {
            SubsetClass::Forbidden
        } else {
            SubsetClass::Intermediate
        }
    }
}

fn class_word(class: SubsetClass) -> &'static str {
    match class {
        SubsetClass::Qualified => "qualified",
        SubsetClass::Forbidden => "forbidden",
        SubsetClass::Intermediate => "intermediate",
    }
}

fn format_set(indices: &[usize]) -> String {
    let inner: Vec<String> = indices.iter().map(usize::to_string).collect();
    format!("{{{}}}", inner.join(","))
}

fn cmd_analyze(
    code_path: &Path,
    j: Option<&str>,
    all: bool,
    tol: f64,
    json: bool,
) -> Result<(), Failure> {
    let code = load_code(code_path)?;
    if all {
        let report =
            full_access_structure(&code, tol).map_err(|e| Failure::input(e.to_string()))?;
        if json {
            let subsets: Vec<_> = report
                .verdicts
                .iter()
                .map(|v| {
                    json!({
                        "j": v.indices,
                        "class": v.class.to_string(),
                        "brute": format!("{:?}", v.brute),
                        "state_ok": v.state_ok,
                        "consistent": v.consistent(),
                    })
                })
                .collect();
            println!(
                "{}",
                json!({
                    "n": report.n,
                    "consistent": report.consistent(),
                    "subsets": subsets,
                })
            );
        } else {
            for v in &report.verdicts {
                println!("{v}");
            }
            println!(
                "{} subsets, oracles {}",
                report.verdicts.len(),
                if report.consistent() {
                    "consistent"
                } else {
                    "INCONSISTENT"
                }
            );
        }
        if !report.consistent() {
            return Err(Failure::mismatch(
                "subspace classification disagrees with an oracle",
            ));
        }
        return Ok(());
    }

    let partition = parse_share_set(j.expect("clap enforces --J or --all"), code.n())?;
    let analysis = code.analyze(&partition);
    let class = class_of(&code, &partition);
    if json {
        println!(
            "{}",
            json!({
                "j": partition.j(),
                "jbar": partition.jbar(),
                "class": class.to_string(),
                "qualified": analysis.qualified,
                "ell": analysis.ell,
                "dim_c_j": analysis.dim_c_j,
                "dim_c_jbar": analysis.dim_c_jbar,
                "ell_saturates": analysis.ell_saturates(),
            })
        );
    } else {
        println!(
            "J={} {} ell={} dim_C_J={} dim_C_Jbar={} ell_eq_Jbar={}",
            format_set(partition.j()),
            class_word(class),
            analysis.ell,
            analysis.dim_c_j,
            analysis.dim_c_jbar,
            analysis.ell_saturates()
        );
    }
    Ok(())
}

/// Inline amplitude lists: comma-separated entries, each `re` or `(re,im)`.
fn parse_inline_amps(spec: &str) -> Option<Vec<Complex64>> {
    let mut amps = Vec::new();
    let mut rest = spec.trim();
    while !rest.is_empty() {
        if let Some(stripped) = rest.strip_prefix('(') {
            let end = stripped.find(')')?;
            let inner = &stripped[..end];
            let (re, im) = inner.split_once(',')?;
            amps.push(Complex64::new(
                re.trim().parse().ok()?,
                im.trim().parse().ok()?,
            ));
            rest = stripped[end + 1..].trim_start_matches(',').trim();
        } else {
            let end = rest.find(',').unwrap_or(rest.len());
            amps.push(Complex64::new(rest[..end].trim().parse().ok()?, 0.0));
            rest = rest[end..].trim_start_matches(',').trim();
        }
    }
    (!amps.is_empty()).then_some(amps)
}

fn load_secret(spec: &str, q: u8, k: usize) -> Result<QuditState, Failure> {
    let path = Path::new(spec);
    if path.exists() {
        return io::load_state(path).map_err(|e| Failure::input(format!("{spec}: {e}")));
    }
    let amps = parse_inline_amps(spec).ok_or_else(|| {
        Failure::input(format!("`{spec}` is neither a file nor an amplitude list"))
    })?;
    QuditState::new(q, k, amps).map_err(|e| Failure::input(e.to_string()))
}

fn cmd_reconstruct(
    code_path: &Path,
    j: &str,
    secret_spec: &str,
    codeword_paths: &[PathBuf],
    tol: f64,
    emit_state: Option<&Path>,
    json: bool,
) -> Result<(), Failure> {
    let code = load_code(code_path)?;
    let partition = parse_share_set(j, code.n())?;
    let secret = load_secret(secret_spec, code.q(), code.k())?.with_tol(tol);

    let plan = if codeword_paths.is_empty() {
        ReconstructionPlan::build(&code, &partition, tol)
    } else {
        let mut states = Vec::with_capacity(codeword_paths.len());
        for path in codeword_paths {
            let state = io::load_state(path)
                .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?
                .with_tol(tol);
            let is_codeword = verify_codeword(&code, &state)
                .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
            if !is_codeword {
                return Err(Failure::mismatch(format!(
                    "{}: state is not fixed by the stabilizer",
                    path.display()
                )));
            }
            states.push(state);
        }
        let family = CodewordFamily::from_states(&code, states).map_err(|e| match e {
            // a wrong file count is a usage problem, not a failed check
            stabshare::qstate::StateError::WrongLength { .. } => Failure::input(e.to_string()),
            _ => Failure::mismatch(e.to_string()),
        })?;
        let erased = stabshare::reconstruct::build_erased_basis(&code, &partition, tol)
            .map_err(map_reconstruct_err)?;
        ReconstructionPlan::build_with(&code, &partition, family, erased, tol)
    }
    .map_err(map_reconstruct_err)?;

    let report = plan.reconstruct(&secret).map_err(map_reconstruct_err)?;
    if let Some(path) = emit_state {
        io::save_state(path, &report.output_state)
            .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    }

    let analysis = plan.analysis();
    if json {
        println!(
            "{}",
            json!({
                "j": partition.j(),
                "ell": analysis.ell,
                "secret_register": report.secret_positions,
                "secret_fidelity": report.secret_fidelity,
                "secret_purity": report.secret_purity,
                "residual_entanglement": report.residual_entanglement,
                "emitted_state": emit_state.map(|p| p.display().to_string()),
            })
        );
    } else {
        println!(
            "J={} qualified ell={}",
            format_set(partition.j()),
            analysis.ell
        );
        println!(
            "secret register: shares {}",
            format_set(&report.secret_positions)
        );
        println!("secret fidelity: {:.15}", report.secret_fidelity);
        println!("secret purity: {:.15}", report.secret_purity);
        println!(
            "residual entanglement: {:.15}",
            report.residual_entanglement
        );
        if let Some(path) = emit_state {
            println!("output state written to {}", path.display());
        }
    }
    if report.secret_fidelity < 1.0 - tol {
        return Err(Failure::mismatch(format!(
            "secret fidelity {:.12} below 1 - tol",
            report.secret_fidelity
        )));
    }
    Ok(())
}

fn map_reconstruct_err(e: ReconstructError) -> Failure {
    match e {
        ReconstructError::NotQualified(_)
        | ReconstructError::UnnormalizedSecret(_)
        | ReconstructError::SecretShapeMismatch { .. } => Failure::precondition(e.to_string()),
        ReconstructError::State(ref inner)
            if matches!(inner, stabshare::qstate::StateError::NonPrimeDimension(_)) =>
        {
            Failure::precondition(e.to_string())
        }
        _ => Failure::mismatch(e.to_string()),
    }
}

fn cmd_golden(tol: f64, json: bool) -> Result<(), Failure> {
    let report = golden::run(tol);
    if json {
        let assertions: Vec<_> = report
            .assertions
            .iter()
            .map(|a| json!({"name": a.name, "passed": a.passed, "detail": a.detail}))
            .collect();
        println!(
            "{}",
            json!({"tol": report.tol, "all_passed": report.all_passed(), "assertions": assertions})
        );
    } else {
        for a in &report.assertions {
            let mark = if a.passed { "PASS" } else { "FAIL" };
            println!("[{mark}] {} ({})", a.name, a.detail);
        }
        println!(
            "{}/{} assertions passed",
            report.assertions.iter().filter(|a| a.passed).count(),
            report.assertions.len()
        );
    }
    if !report.all_passed() {
        return Err(Failure::mismatch("golden corpus verification failed"));
    }
    Ok(())
}

fn print_audit(audit: &stabshare::oracle::DimensionAudit, json: bool) {
    if json {
        let checks: Vec<_> = audit
            .checks
            .iter()
            .map(|c| json!({"name": c.name, "passed": c.passed, "detail": c.detail}))
            .collect();
        println!(
            "{}",
            json!({
                "j": audit.partition.j(),
                "qualified": audit.qualified,
                "ell": audit.ell,
                "dim_c_j": audit.dim_c_j,
                "dim_c_jbar": audit.dim_c_jbar,
                "all_passed": audit.all_passed(),
                "checks": checks,
            })
        );
    } else {
        println!(
            "J={} {} ell={}",
            format_set(audit.partition.j()),
            if audit.qualified {
                "qualified"
            } else {
                "not-qualified"
            },
            audit.ell
        );
        for c in &audit.checks {
            let mark = if c.passed { "ok" } else { "FAIL" };
            println!("  [{mark}] {}: {}", c.name, c.detail);
        }
    }
}

fn cmd_audit(code_path: &Path, j: Option<&str>, all: bool, json: bool) -> Result<(), Failure> {
    let code = load_code(code_path)?;
    let mut failures = 0usize;
    if all {
        for mask in 0..1u64 << code.n() {
            let partition = SharePartition::from_mask(code.n(), mask);
            let audit = audit_dimensions(&code, &partition);
            if !audit.all_passed() {
                failures += 1;
            }
            print_audit(&audit, json);
        }
    } else {
        let partition = parse_share_set(j.expect("clap enforces --J or --all"), code.n())?;
        let audit = audit_dimensions(&code, &partition);
        if !audit.all_passed() {
            failures += 1;
        }
        print_audit(&audit, json);
    }
    if failures > 0 {
        return Err(Failure::mismatch(format!(
            "{failures} partition(s) failed the dimension audit"
        )));
    }
    Ok(())
}

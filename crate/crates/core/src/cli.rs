//! Command-line surface. Every invocation prints one JSON report line.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde_json::json;

use crate::affiliation::{affiliate, proximity_check, split};
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::intertwiner::{orbit_intertwiner, projection_intertwiner, IntertwinerCertificate};
use crate::invariants::{example_pair_generator, moment_signature, projective_distances, same_orbit};
use crate::io::{MatrixFile, Meta, RunReport};
use crate::linalg::{HermitianOperator, C64};
use crate::sampling::{exp_i, padded_diagonal, Sampler};
use crate::spectral::{decompose, lagrange_projector, projector_deviation, reconstruct};
use crate::suite::{run_named, run_suite};

#[derive(Parser, Debug)]
#[command(name = "orbitkit", version, about = "Certified constructions on unitary orbits of finite-rank Hermitian operators")]
struct Cli {
    /// Report elapsed_ms as 0 so reports are byte-reproducible.
    #[arg(long, global = true)]
    no_timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Clustered spectral decomposition.
    Decompose {
        file: PathBuf,
        #[arg(long)]
        cluster_tol: Option<f64>,
    },
    /// Spectral projection of block `j` as an interpolation polynomial in ρ.
    Project {
        file: PathBuf,
        #[arg(long)]
        eig: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Split a projection pair and build affiliated bases of the remainder.
    Affiliate { e: PathBuf, f: PathBuf },
    /// Near-identity unitary u with uEu* = F.
    IntertwineProj {
        e: PathBuf,
        f: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Near-identity unitary v with vρv* = ρ′.
    Intertwine {
        rho: PathBuf,
        rho_prime: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Geodesic and trace distance of two rank-one projections.
    Distance { p: PathBuf, r: PathBuf },
    /// Moments Tr(ρ^{n+2}) for n = 0..=K and the atoms of the spectral measure.
    Moments {
        file: PathBuf,
        #[arg(short = 'K')]
        k: Option<usize>,
    },
    /// Compare two operators by moments and by spectra.
    SameOrbit {
        a: PathBuf,
        b: PathBuf,
        /// Relative tolerance on moments.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(short = 'K')]
        k: Option<usize>,
    },
    /// Generate instances.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Run the property battery.
    #[command(subcommand)]
    Verify(VerifyCommand),
}

#[derive(Subcommand, Debug)]
enum GenCommand {
    /// Pair E, F with f_j = α_j e_j + β_j e_{N+j}; writes <out>_E.json and <out>_F.json.
    Example {
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
        alpha: Vec<f64>,
        #[arg(long)]
        dim: usize,
        /// Conjugate both projections by a seeded random unitary.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "example")]
        out: String,
    },
    /// ρ = diag(spectrum) and uρu* with u = exp(iH), ‖H‖ = perturb; writes
    /// <out>_rho.json and <out>_rho_prime.json.
    OrbitPair {
        #[arg(long)]
        dim: usize,
        /// Comma-separated value:multiplicity pairs, e.g. 0.5:2,0.25:1.
        #[arg(long, allow_hyphen_values = true)]
        spectrum: String,
        #[arg(long)]
        perturb: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "orbit")]
        out: String,
    },
}

#[derive(Subcommand, Debug)]
enum VerifyCommand {
    Suite {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        count: usize,
        /// Run a single named check.
        #[arg(long)]
        check: Option<String>,
    },
}

/// Exit code and the text destined for stdout and stderr.
#[derive(Debug, Clone)]
pub struct CliOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Exit code of `verify suite` when some check fails.
pub const SUITE_FAILURE: i32 = 1;

pub fn run<I, T>(argv: I) -> CliOutput
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 4,
            };
            return CliOutput {
                code,
                stdout: if code == 0 { e.to_string() } else { String::new() },
                stderr: if code == 0 { String::new() } else { e.to_string() },
            };
        }
    };
    let start = Instant::now();
    let mut report = RunReport::new(command_name(&cli.command));
    let outcome = Tolerances::from_env().and_then(|tol| dispatch(&cli.command, &tol, &mut report));
    let code = match outcome {
        Ok(code) => code,
        Err(err) => {
            report.fail(&err);
            err.exit_code()
        }
    };
    if !cli.no_timing {
        report.elapsed_ms = start.elapsed().as_millis() as u64;
    }
    CliOutput {
        code,
        stdout: report.to_line() + "\n",
        stderr: String::new(),
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Decompose { .. } => "decompose",
        Command::Project { .. } => "project",
        Command::Affiliate { .. } => "affiliate",
        Command::IntertwineProj { .. } => "intertwine-proj",
        Command::Intertwine { .. } => "intertwine",
        Command::Distance { .. } => "distance",
        Command::Moments { .. } => "moments",
        Command::SameOrbit { .. } => "same-orbit",
        Command::Gen(GenCommand::Example { .. }) => "gen example",
        Command::Gen(GenCommand::OrbitPair { .. }) => "gen orbit-pair",
        Command::Verify(VerifyCommand::Suite { .. }) => "verify suite",
    }
}

fn load(path: &Path, tol: &Tolerances, report: &mut RunReport) -> Result<MatrixFile> {
    let text = crate::io::read_text(path)?;
    report.add_input(text.as_bytes());
    MatrixFile::from_json(&text, tol).map_err(|e| match e {
        Error::Format(m) => Error::Format(format!("{}: {m}", path.display())),
        other => other,
    })
}

fn put_certificate(report: &mut RunReport, c: &IntertwinerCertificate) -> Result<()> {
    report.put("epsilon", c.epsilon)?;
    report.put("delta_j", &c.delta_j)?;
    report.put("delta", c.delta)?;
    report.put("op_norm_dev", c.op_norm_dev)?;
    report.put("hs_norm_dev", c.hs_norm_dev)?;
    report.put("unitarity_defect", c.unitarity_defect)?;
    report.put("conjugation_residual", c.conjugation_residual)?;
    report.put("chain", c.chain)?;
    report.put("bound_ok", c.bound_ok)
}

fn save_unitary(out: &Option<PathBuf>, c: &IntertwinerCertificate, report: &mut RunReport) -> Result<()> {
    if let Some(path) = out {
        MatrixFile::unitary(&c.v, Meta::new()).save(path)?;
        report.put("written", vec![path.display().to_string()])?;
    }
    Ok(())
}

fn dispatch(cmd: &Command, tol: &Tolerances, report: &mut RunReport) -> Result<i32> {
    match cmd {
        Command::Decompose { file, cluster_tol } => {
            let mut tol = *tol;
            if let Some(c) = cluster_tol {
                tol.cluster_tol = *c;
                tol.validate()?;
            }
            let rho = load(file, &tol, report)?.as_hermitian(&tol)?;
            let d = decompose(&rho, &tol)?;
            let recon = reconstruct(&d).matrix().distance(rho.matrix());
            report.put("eigenvalues", d.eigenvalues())?;
            report.put("multiplicities", d.multiplicities())?;
            report.put("total_rank", d.total_rank())?;
            report.put("kernel_dim", d.complement().rank())?;
            report.put("reconstruction_error", recon)?;
        }
        Command::Project { file, eig, out } => {
            let rho = load(file, tol, report)?.as_hermitian(tol)?;
            let d = decompose(&rho, tol)?;
            let p = lagrange_projector(&rho, &d, *eig, tol)?;
            let dev = projector_deviation(&p, &d, *eig, tol)?;
            report.put("node", d.nodes()[*eig])?;
            report.put("rank", p.rank())?;
            report.put("deviation_from_eigenvectors", dev)?;
            report.put("within_lagrange_tol", dev <= tol.lagrange_tol)?;
            if let Some(path) = out {
                MatrixFile::projection(&p, Meta::new()).save(path)?;
                report.put("written", vec![path.display().to_string()])?;
            }
        }
        Command::Affiliate { e, f } => {
            let e = load(e, tol, report)?.as_projection(tol)?;
            let f = load(f, tol, report)?.as_projection(tol)?;
            let (hs_sq, near) = proximity_check(&e, &f)?;
            report.put("hs_sq", hs_sq)?;
            report.put("proximity_satisfied", near)?;
            let parts = split(&e, &f, tol)?;
            report.put("meet_rank", parts.meet.rank())?;
            report.put("reduced_rank", parts.reduced_rank())?;
            let a = affiliate(&parts.e_prime, &parts.f_prime, tol)?;
            report.put("efe_eigenvalues", &a.efe_eigenvalues)?;
            report.put("alpha", &a.alpha)?;
            report.put("beta", &a.beta)?;
            report.put("cross_orthogonality_defect", a.cross_orthogonality_defect())?;
            report.put("reconstruction_defect", a.reconstruction_defect())?;
        }
        Command::IntertwineProj { e, f, eps, out } => {
            let e = load(e, tol, report)?.as_projection(tol)?;
            let f = load(f, tol, report)?.as_projection(tol)?;
            let c = projection_intertwiner(&e, &f, *eps, tol)?;
            put_certificate(report, &c)?;
            save_unitary(out, &c, report)?;
        }
        Command::Intertwine { rho, rho_prime, eps, out } => {
            let a = load(rho, tol, report)?.as_hermitian(tol)?;
            let b = load(rho_prime, tol, report)?.as_hermitian(tol)?;
            let c = orbit_intertwiner(&a, &b, *eps, tol)?;
            put_certificate(report, &c)?;
            save_unitary(out, &c, report)?;
        }
        Command::Distance { p, r } => {
            let p = load(p, tol, report)?.as_projection(tol)?;
            let r = load(r, tol, report)?.as_projection(tol)?;
            let d = projective_distances(&p, &r, tol)?;
            report.put("geodesic", d.geodesic)?;
            report.put("trace_dist", d.trace_dist)?;
            report.put("overlap", d.overlap)?;
            report.put("relation_defect", d.relation_defect)?;
        }
        Command::Moments { file, k } => {
            let rho = load(file, tol, report)?.as_hermitian(tol)?;
            let s = moment_signature(&rho, *k, tol)?;
            report.put("order", s.order)?;
            report.put("moments", &s.moments)?;
            report.put("atoms", &s.atoms)?;
            report.put("duality_defect", s.duality_defect())?;
        }
        Command::SameOrbit { a, b, tol: rel, k } => {
            let a = load(a, tol, report)?.as_hermitian(tol)?;
            let b = load(b, tol, report)?.as_hermitian(tol)?;
            let c = same_orbit(&a, &b, *k, *rel, tol)?;
            report.put("same", c.same)?;
            report.put("moments_agree", c.moments_agree)?;
            report.put("spectra_agree", c.spectra_agree)?;
            report.put("anomaly", c.anomaly)?;
        }
        Command::Gen(GenCommand::Example { alpha, dim, seed, out }) => {
            let alpha: Vec<C64> = alpha.iter().map(|&a| C64::new(a, 0.0)).collect();
            let pair = example_pair_generator(*dim, &alpha, *seed)?;
            let mut meta = Meta::new();
            meta.insert("generator".into(), json!("example"));
            if let Some(s) = seed {
                meta.insert("seed".into(), json!(s));
            }
            let paths = [format!("{out}_E.json"), format!("{out}_F.json")];
            MatrixFile::projection(&pair.e, meta.clone()).save(Path::new(&paths[0]))?;
            MatrixFile::projection(&pair.f, meta).save(Path::new(&paths[1]))?;
            report.put("written", &paths)?;
            report.put("expected", &pair.expected)?;
        }
        Command::Gen(GenCommand::OrbitPair { dim, spectrum, perturb, seed, out }) => {
            let spectrum = parse_spectrum(spectrum)?;
            let rank: usize = spectrum.iter().map(|x| x.1).sum();
            if rank > *dim {
                return Err(Error::DimensionTooSmall { dim: *dim, required: rank });
            }
            if !(perturb.is_finite() && *perturb >= 0.0) {
                return Err(Error::InvalidArgument(format!("perturb must be non-negative, got {perturb}")));
            }
            let rho = HermitianOperator::from_real_diag(&padded_diagonal(*dim, &spectrum));
            let h = Sampler::new(*seed).hermitian(*dim);
            let u = exp_i(&h, *perturb, tol)?;
            let moved = rho.conjugate(&u);
            let mut meta = Meta::new();
            meta.insert("generator".into(), json!("orbit-pair"));
            meta.insert("seed".into(), json!(seed));
            meta.insert("perturb".into(), json!(perturb));
            let paths = [format!("{out}_rho.json"), format!("{out}_rho_prime.json")];
            MatrixFile::hermitian(&rho, meta.clone()).save(Path::new(&paths[0]))?;
            MatrixFile::hermitian(&moved, meta).save(Path::new(&paths[1]))?;
            report.put("written", &paths)?;
        }
        Command::Verify(VerifyCommand::Suite { seed, count, check }) => {
            let checks = match check {
                Some(name) => vec![run_named(name, *seed, *count, tol)
                    .ok_or_else(|| Error::InvalidArgument(format!("unknown check {name}")))?],
                None => run_suite(*seed, *count, tol).checks,
            };
            let ok = checks.iter().all(|c| c.ok());
            report.put("seed", seed)?;
            report.put("count", count)?;
            report.put("checks", &checks)?;
            report.put("all_passed", ok)?;
            if !ok {
                report.status = "suite_failure".into();
                return Ok(SUITE_FAILURE);
            }
        }
    }
    Ok(0)
}

/// `l1:m1,l2:m2,…`.
fn parse_spectrum(text: &str) -> Result<Vec<(f64, usize)>> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|item| {
            let (l, m) = item
                .split_once(':')
                .ok_or_else(|| Error::InvalidArgument(format!("expected value:multiplicity, got {item}")))?;
            let l: f64 = l
                .trim()
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad eigenvalue {l}")))?;
            let m: usize = m
                .trim()
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad multiplicity {m}")))?;
            if !l.is_finite() || l == 0.0 || m == 0 {
                return Err(Error::InvalidArgument(format!("invalid level {item}")));
            }
            Ok((l, m))
        })
        .collect()
}

//! `psmet`: command-line surface over the postselected-metrology toolkit.
//!
//! Data goes to standard output (or `--out`), diagnostics to standard error.
//! Exit codes: 0 success, 1 assertion/theorem violation, 2 usage or parse
//! error, 3 numerical domain error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use psmet_core::costrate::{breakeven, ps_rate, rate, CostModel};
use psmet_core::error::Error;
use psmet_core::fisher::{default_fd_step, max_qfi, qfi_pure_generator};
use psmet_core::io::{fmt_f64, load_operator, load_state};
use psmet_core::kdq::{kd_doubly_extended, negativity_conditional, qfi_from_kd, KDTensor};
use psmet_core::postselect::{
    apply_postselection, postselected_qfi, postselected_qfi_fd, Postselection,
};
use psmet_core::protocols::{self, analytic, construct, ordered_limits, Protocol, ProtocolConfig};
use psmet_core::qcore::{evolve_state, random_instance, spectral_range, Operator, OperatorKind};

#[derive(Parser)]
#[command(
    name = "psmet",
    version,
    about = "Fisher information, postselection, and Kirkwood-Dirac quasiprobabilities \
             for finite-dimensional metrology"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Quantum Fisher information of e^{-iAθ}|ψ0⟩ and the optimized maximum.
    Qfi {
        /// Hermitian generator file (JSON: `{"dim": n, "entries": [[[re,im],...],...]}`).
        #[arg(long)]
        generator: PathBuf,
        /// Input state file (JSON: `{"dim": n, "amplitudes": [[re,im],...]}`).
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Postselected quantum Fisher information at θ.
    Psqfi {
        #[arg(long)]
        generator: PathBuf,
        #[arg(long)]
        state: PathBuf,
        /// Projector file defining the postselection.
        #[arg(long)]
        projector: PathBuf,
        #[arg(long, default_value_t = 0.0)]
        theta: f64,
        /// Step for the finite-difference cross-check (default 1e-5·max(1,|θ|)).
        #[arg(long)]
        fd_step: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Doubly extended Kirkwood-Dirac distribution of the evolved state:
    /// CSV tensor export, or a negativity/information report with --negativity.
    Kdq {
        #[arg(long)]
        generator: PathBuf,
        /// Hermitian observable (typically the postselection projector).
        #[arg(long)]
        observable: PathBuf,
        #[arg(long)]
        state: PathBuf,
        #[arg(long, default_value_t = 0.0)]
        theta: f64,
        /// Comma-separated accepted f-indices; defaults to the observable's
        /// eigenvalue-one eigenvectors.
        #[arg(long)]
        ps_indices: Option<String>,
        /// Emit a JSON report instead of the CSV tensor.
        #[arg(long)]
        negativity: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Grid sweep of a divergent-information protocol, as CSV.
    Sweep {
        /// supp3 (three-level, lossy) or supp4 (doubly degenerate, lossless).
        #[arg(long)]
        protocol: String,
        /// Ascending generator eigenvalues, comma-separated (e.g. -1,1,3).
        #[arg(long, allow_hyphen_values = true)]
        eigs: String,
        /// Interior eigenvalue index for supp3.
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 0.0)]
        theta0: f64,
        /// φ grid: a single value or a:b:n (n evenly spaced points, inclusive).
        #[arg(long, default_value = "0.02:1.0:50", allow_hyphen_values = true)]
        phi: String,
        /// δθ grid, same syntax.
        #[arg(long, default_value = "-0.01:0.01:41", allow_hyphen_values = true)]
        dtheta: String,
        /// Pre-experiment variance of the θ estimate (display scaling only).
        #[arg(long, default_value_t = 1e-6)]
        var_theta0: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Randomized suites for the two structural theorems.
    TheoremCheck {
        /// 1: commuting postselection never beats (Δa)². 2: anomalous
        /// information implies conditional negativity.
        #[arg(long)]
        theorem: u8,
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Information-cost rates and the break-even condition.
    Costrate {
        /// Fisher information of the postselection-free experiment.
        #[arg(long)]
        fisher: f64,
        /// Postselected Fisher information (defaults to --fisher).
        #[arg(long)]
        fisher_ps: Option<f64>,
        #[arg(long)]
        p_ps: f64,
        #[arg(long)]
        c_prepare: f64,
        #[arg(long)]
        c_measure: f64,
        #[arg(long, default_value_t = 0.0)]
        c_postselect: f64,
        #[arg(long, default_value_t = 1)]
        trials: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Ordered-limit report (δθ → 0, then φ → 0) for a protocol.
    Limits {
        #[arg(long)]
        protocol: String,
        #[arg(long, allow_hyphen_values = true)]
        eigs: String,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 0.1)]
        phi: f64,
        #[arg(long, default_value_t = 0.0)]
        theta0: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Minimal JSON object builder that keeps insertion order and renders every
/// float with 17 significant digits, so identical runs are byte-identical.
#[derive(Default)]
struct JsonObject {
    parts: Vec<String>,
}

impl JsonObject {
    fn new() -> Self {
        JsonObject::default()
    }

    fn num(mut self, key: &str, value: f64) -> Self {
        self.parts.push(format!("\"{key}\":{}", fmt_f64(value)));
        self
    }

    fn int(mut self, key: &str, value: u64) -> Self {
        self.parts.push(format!("\"{key}\":{value}"));
        self
    }

    fn flag(mut self, key: &str, value: bool) -> Self {
        self.parts.push(format!("\"{key}\":{value}"));
        self
    }

    fn text(mut self, key: &str, value: &str) -> Self {
        self.parts.push(format!("\"{key}\":{}", json_escape(value)));
        self
    }

    fn seq(mut self, key: &str, values: &[f64]) -> Self {
        let body: Vec<String> = values.iter().map(|&v| fmt_f64(v)).collect();
        self.parts.push(format!("\"{key}\":[{}]", body.join(",")));
        self
    }

    fn build(self) -> String {
        format!("{{{}}}", self.parts.join(","))
    }
}

fn json_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::Io(_)
        | Error::Parse(_)
        | Error::InvalidConfig(_)
        | Error::InvalidDim { .. }
        | Error::InvalidProbability { .. }
        | Error::DimensionMismatch { .. }
        | Error::NotHermitian { .. }
        | Error::NotUnitary { .. }
        | Error::NotProjector { .. }
        | Error::NotDensity { .. }
        | Error::NotNormalized { .. }
        | Error::NotAProbability { .. } => 2,
        Error::LimitMismatch(_) => 1,
        _ => 3,
    }
}

fn emit(out: &Option<PathBuf>, payload: &str) -> Result<(), Error> {
    use std::io::Write;
    match out {
        Some(path) => std::fs::write(path, payload).map_err(Error::from),
        None => {
            let mut stdout = std::io::stdout().lock();
            match stdout
                .write_all(payload.as_bytes())
                .and_then(|_| stdout.flush())
            {
                Ok(()) => Ok(()),
                // A closed pipe means the consumer has all it wants.
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
                Err(e) => Err(Error::from(e)),
            }
        }
    }
}

fn parse_eigs(text: &str) -> Result<Vec<f64>, Error> {
    text.split(',')
        .map(|piece| {
            piece
                .trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad eigenvalue {piece:?}")))
        })
        .collect()
}

/// `a:b:n` for n evenly spaced points (inclusive; `0:1:2` gives {0, 1}),
/// or a single value.
fn parse_grid(text: &str) -> Result<Vec<f64>, Error> {
    let pieces: Vec<&str> = text.split(':').collect();
    match pieces.as_slice() {
        [single] => {
            let v = single
                .trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad grid value {single:?}")))?;
            Ok(vec![v])
        }
        [a, b, n] => {
            let lo: f64 = a
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad grid bound {a:?}")))?;
            let hi: f64 = b
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad grid bound {b:?}")))?;
            let count: usize = n
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad grid count {n:?}")))?;
            if count == 0 {
                return Err(Error::Parse("grid count must be at least 1".into()));
            }
            if count == 1 {
                return Ok(vec![lo]);
            }
            Ok((0..count)
                .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
                .collect())
        }
        _ => Err(Error::Parse(format!(
            "bad grid {text:?}: expected a value or a:b:n"
        ))),
    }
}

fn parse_indices(text: &str) -> Result<Vec<usize>, Error> {
    text.split(',')
        .map(|piece| {
            piece
                .trim()
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad index {piece:?}")))
        })
        .collect()
}

fn cmd_qfi(generator: &Path, state: &Path, out: &Option<PathBuf>) -> Result<(), Error> {
    let a = load_operator(generator, OperatorKind::Hermitian)?;
    let psi = load_state(state)?;
    let report = qfi_pure_generator(&psi, &a)?;
    let max = max_qfi(&a)?;
    let delta_a = spectral_range(&a)?;
    let payload = JsonObject::new()
        .num("qfi", report.value)
        .num("max_qfi", max.value)
        .num("delta_a", delta_a)
        .text("method", &report.method.to_string())
        .build();
    emit(out, &format!("{payload}\n"))
}

fn cmd_psqfi(
    generator: &Path,
    state: &Path,
    projector: &Path,
    theta: f64,
    fd_step: Option<f64>,
    out: &Option<PathBuf>,
) -> Result<(), Error> {
    let a = load_operator(generator, OperatorKind::Hermitian)?;
    let psi0 = load_state(state)?;
    let f = load_operator(projector, OperatorKind::Projector)?;
    let ps = Postselection::from_projector(&f)?;
    let report = postselected_qfi(&psi0, &a, &ps, theta)?;
    let step = fd_step.unwrap_or_else(|| default_fd_step(theta));
    let fd = postselected_qfi_fd(&psi0, &a, &ps, theta, step)?;
    let psi_theta = evolve_state(&psi0, &a, theta)?;
    let p_ps = apply_postselection(&psi_theta, &ps)?.p_ps;
    let delta_a = spectral_range(&a)?;
    let max = delta_a * delta_a;
    let payload = JsonObject::new()
        .num("qfi_ps", report.value)
        .num("qfi_ps_fd", fd.value)
        .num("p_ps", p_ps)
        .num("max_qfi", max)
        .num("delta_a", delta_a)
        .flag("anomalous", report.value > max * (1.0 + 1e-6))
        .text("method", &report.method.to_string())
        .build();
    emit(out, &format!("{payload}\n"))
}

fn accepted_indices(kd: &KDTensor, requested: &Option<String>) -> Result<Vec<usize>, Error> {
    match requested {
        Some(text) => parse_indices(text),
        None => {
            let indices = kd.projector_indices();
            if indices.is_empty() {
                return Err(Error::InvalidConfig(
                    "observable has no eigenvalue-one eigenvectors; pass --ps-indices".into(),
                ));
            }
            Ok(indices)
        }
    }
}

fn cmd_kdq(
    generator: &Path,
    observable: &Path,
    state: &Path,
    theta: f64,
    ps_indices: &Option<String>,
    negativity_report: bool,
    out: &Option<PathBuf>,
) -> Result<(), Error> {
    let a = load_operator(generator, OperatorKind::Hermitian)?;
    let f = load_operator(observable, OperatorKind::General)?;
    let psi0 = load_state(state)?;
    let psi_theta = evolve_state(&psi0, &a, theta)?;
    let rho_theta = Operator::pure_density(&psi_theta)?;
    let kd = kd_doubly_extended(&rho_theta, &a, &f)?;
    if negativity_report {
        let indices = accepted_indices(&kd, ps_indices)?;
        let report = negativity_conditional(&kd, &indices)?;
        let info = qfi_from_kd(&kd, &indices)?;
        let cond = psmet_core::kdq::conditional_kd(&kd, &indices)?;
        let delta_a = spectral_range(&a)?;
        let max = delta_a * delta_a;
        let payload = JsonObject::new()
            .num("p_ps", cond.p_ps)
            .num("qfi_from_kd", info.value)
            .num("max_qfi", max)
            .num("min_real", report.min_real)
            .num("negativity_mass", report.negativity_mass)
            .num("max_imag_abs", report.max_imag_abs)
            .flag("is_classical", report.is_classical)
            .flag("anomalous", info.value > max * (1.0 + 1e-6))
            .build();
        emit(out, &format!("{payload}\n"))
    } else {
        let mut buf = Vec::new();
        kd.write_csv(&mut buf)?;
        let text = String::from_utf8(buf)
            .map_err(|e| Error::Numerical(format!("csv encoding failure: {e}")))?;
        emit(out, &text)
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(
    protocol: &str,
    eigs: &str,
    k: usize,
    theta0: f64,
    phi: &str,
    dtheta: &str,
    var_theta0: f64,
    out: &Option<PathBuf>,
) -> Result<(), Error> {
    let protocol: Protocol = protocol.parse()?;
    let mut cfg = ProtocolConfig::new(parse_eigs(eigs)?, k);
    cfg.theta0 = theta0;
    cfg.var_theta0 = var_theta0;
    let phi_grid = parse_grid(phi)?;
    let dtheta_grid = parse_grid(dtheta)?;
    let rows = protocols::sweep(protocol, &cfg, &phi_grid, &dtheta_grid)?;
    let mut buf = Vec::new();
    protocols::write_sweep_csv(&rows, &mut buf)?;
    let text = String::from_utf8(buf)
        .map_err(|e| Error::Numerical(format!("csv encoding failure: {e}")))?;
    emit(out, &text)
}

fn cmd_theorem_check(
    theorem: u8,
    trials: u64,
    dim: usize,
    seed: u64,
    out: &Option<PathBuf>,
) -> Result<u8, Error> {
    if trials == 0 {
        return Err(Error::InvalidConfig("trials must be at least 1".into()));
    }
    match theorem {
        1 => theorem_1(trials, dim, seed, out),
        2 => theorem_2(trials, dim, seed, out),
        other => Err(Error::InvalidConfig(format!(
            "unknown theorem {other}: expected 1 or 2"
        ))),
    }
}

fn theorem_1(trials: u64, dim: usize, seed: u64, out: &Option<PathBuf>) -> Result<u8, Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_ratio = 0.0f64;
    let mut violations = 0u64;
    let mut nonclassical = 0u64;
    let mut redraws = 0u64;
    let mut done = 0u64;
    while done < trials {
        let instance_seed = rng.next_u64();
        let theta = rng.random_range(0.0..std::f64::consts::TAU);
        let inst = random_instance(dim, instance_seed, true)?;
        let ps = Postselection::from_projector(&inst.projector)?;
        let report = match postselected_qfi(&inst.input_state, &inst.generator, &ps, theta) {
            Ok(r) => r,
            Err(Error::VanishingPostselection { .. }) => {
                redraws += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        let range_sq = spectral_range(&inst.generator)?.powi(2);
        max_ratio = max_ratio.max(report.value / range_sq);
        if report.value > range_sq + 1e-8 {
            violations += 1;
        }
        let psi_theta = evolve_state(&inst.input_state, &inst.generator, theta)?;
        let rho_theta = Operator::pure_density(&psi_theta)?;
        let kd = kd_doubly_extended(&rho_theta, &inst.generator, &inst.projector)?;
        let neg = negativity_conditional(&kd, &kd.projector_indices())?;
        if !neg.is_classical {
            nonclassical += 1;
        }
        done += 1;
    }
    let payload = JsonObject::new()
        .int("theorem", 1)
        .int("trials", trials)
        .int("dim", dim as u64)
        .int("seed", seed)
        .int("violations", violations)
        .int("nonclassical", nonclassical)
        .int("redraws", redraws)
        .num("max_ratio", max_ratio)
        .build();
    emit(out, &format!("{payload}\n"))?;
    Ok(if violations + nonclassical > 0 { 1 } else { 0 })
}

type Candidate = (Operator, Operator, psmet_core::StateVector, f64);

fn theorem_2(trials: u64, dim: usize, seed: u64, out: &Option<PathBuf>) -> Result<u8, Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut anomalous = 0u64;
    let mut violations = 0u64;
    let mut random_hits = 0u64;
    let mut worst_min_real = 0.0f64;
    let mut attempts = 0u64;
    let attempt_cap = trials.saturating_mul(50).max(1000);

    while anomalous < trials && attempts < attempt_cap {
        attempts += 1;
        let pick = rng.random_range(0..3u8);
        let candidate: Option<(Candidate, bool)> = match pick {
            0 if dim >= 3 => {
                let mut family_rng = ChaCha8Rng::seed_from_u64(rng.next_u64());
                anomalous_from_construction(Protocol::Supp3, dim, &mut family_rng)
                    .map(|c| (c, false))
            }
            1 if dim == 4 => {
                let mut family_rng = ChaCha8Rng::seed_from_u64(rng.next_u64());
                anomalous_from_construction(Protocol::Supp4, dim, &mut family_rng)
                    .map(|c| (c, false))
            }
            _ => {
                let instance_seed = rng.next_u64();
                let theta = rng.random_range(0.0..std::f64::consts::TAU);
                anomalous_from_random(dim, instance_seed, theta).map(|c| (c, true))
            }
        };
        let Some(((generator, projector, input_state, theta), from_random)) = candidate else {
            continue;
        };
        let psi_theta = evolve_state(&input_state, &generator, theta)?;
        let rho_theta = Operator::pure_density(&psi_theta)?;
        let kd = kd_doubly_extended(&rho_theta, &generator, &projector)?;
        let neg = negativity_conditional(&kd, &kd.projector_indices())?;
        anomalous += 1;
        if from_random {
            random_hits += 1;
        }
        if neg.min_real >= 0.0 {
            violations += 1;
        }
        worst_min_real = worst_min_real.min(neg.min_real);
    }

    let payload = JsonObject::new()
        .int("theorem", 2)
        .int("trials", trials)
        .int("dim", dim as u64)
        .int("seed", seed)
        .int("anomalous", anomalous)
        .int("violations", violations)
        .int("random_search_hits", random_hits)
        .num("worst_min_real", worst_min_real)
        .build();
    emit(out, &format!("{payload}\n"))?;
    Ok(if violations > 0 { 1 } else { 0 })
}

fn anomalous_from_construction(
    protocol: Protocol,
    dim: usize,
    rng: &mut ChaCha8Rng,
) -> Option<Candidate> {
    let cfg = match protocol {
        Protocol::Supp3 => {
            let mut eigs: Vec<f64> = (0..dim).map(|_| rng.random_range(-2.0..2.0)).collect();
            eigs.sort_by(f64::total_cmp);
            let k = rng.random_range(1..dim - 1);
            if eigs[k] - eigs[0] < 0.2 || eigs[dim - 1] - eigs[k] < 0.2 {
                return None;
            }
            let mut cfg = ProtocolConfig::new(eigs, k);
            cfg.theta0 = rng.random_range(-1.0..1.0);
            cfg.phi = rng.random_range(0.02..0.35);
            cfg.delta_theta = rng.random_range(-0.01..0.01);
            cfg
        }
        Protocol::Supp4 => {
            let lo = rng.random_range(-2.0..0.0);
            let hi = lo + rng.random_range(0.5..3.0);
            let mut cfg = ProtocolConfig::new(vec![lo, lo, hi, hi], 1);
            cfg.theta0 = rng.random_range(-1.0..1.0);
            cfg.phi = rng.random_range(0.02..0.6);
            cfg.delta_theta = rng.random_range(-0.01..0.01);
            cfg
        }
    };
    let _ = analytic(protocol, &cfg).ok()?;
    let inst = construct(protocol, &cfg).ok()?;
    let theta = cfg.theta0 + cfg.delta_theta;
    let qfi = postselected_qfi(
        &inst.input_state,
        &inst.generator,
        &inst.postselection,
        theta,
    )
    .ok()?
    .value;
    if qfi <= cfg.spectral_range().powi(2) * (1.0 + 1e-6) {
        return None;
    }
    Some((
        inst.generator,
        inst.postselection.projector().clone(),
        inst.input_state,
        theta,
    ))
}

fn anomalous_from_random(dim: usize, seed: u64, theta: f64) -> Option<Candidate> {
    let inst = random_instance(dim, seed, false).ok()?;
    let ps = Postselection::from_projector(&inst.projector).ok()?;
    let qfi = postselected_qfi(&inst.input_state, &inst.generator, &ps, theta)
        .ok()?
        .value;
    let range_sq = spectral_range(&inst.generator).ok()?.powi(2);
    if qfi <= range_sq * (1.0 + 1e-6) {
        return None;
    }
    Some((inst.generator, inst.projector, inst.input_state, theta))
}

#[allow(clippy::too_many_arguments)]
fn cmd_costrate(
    fisher: f64,
    fisher_ps: Option<f64>,
    p_ps: f64,
    c_prepare: f64,
    c_measure: f64,
    c_postselect: f64,
    trials: u64,
    out: &Option<PathBuf>,
) -> Result<(), Error> {
    if !(fisher >= 0.0) {
        return Err(Error::InvalidConfig(format!(
            "fisher must be nonnegative, got {fisher}"
        )));
    }
    let costs = CostModel::new(c_prepare, c_measure, c_postselect, trials)?;
    let fisher_ps = fisher_ps.unwrap_or(fisher);
    if !(fisher_ps >= 0.0) {
        return Err(Error::InvalidConfig(format!(
            "fisher_ps must be nonnegative, got {fisher_ps}"
        )));
    }
    let payload = JsonObject::new()
        .num("rate", rate(fisher, &costs))
        .num("ps_rate", ps_rate(fisher_ps, p_ps, &costs)?)
        .flag("breakeven", breakeven(p_ps, &costs))
        .build();
    emit(out, &format!("{payload}\n"))
}

fn cmd_limits(
    protocol: &str,
    eigs: &str,
    k: usize,
    phi: f64,
    theta0: f64,
    out: &Option<PathBuf>,
) -> Result<(), Error> {
    let protocol: Protocol = protocol.parse()?;
    let mut cfg = ProtocolConfig::new(parse_eigs(eigs)?, k);
    cfg.phi = phi;
    cfg.theta0 = theta0;
    let report = ordered_limits(protocol, &cfg)?;
    let payload = JsonObject::new()
        .text("protocol", &report.protocol.to_string())
        .seq("dtheta_seq", &report.dtheta_seq)
        .seq("p_at_dtheta", &report.p_at_dtheta)
        .seq("qfi_at_dtheta", &report.qfi_at_dtheta)
        .num("p_limit", report.p_limit)
        .num("qfi_limit", report.qfi_limit)
        .num("product_limit", report.product_limit)
        .seq("phi_seq", &report.phi_seq)
        .seq("p_at_phi", &report.p_at_phi)
        .seq("qfi_at_phi", &report.qfi_at_phi)
        .seq("product_at_phi", &report.product_at_phi)
        .num("product_target", report.product_target)
        .flag("qfi_divergent", report.qfi_divergent)
        .build();
    emit(out, &format!("{payload}\n"))
}

fn run(cli: Cli) -> Result<u8, Error> {
    match &cli.command {
        Command::Qfi {
            generator,
            state,
            out,
        } => cmd_qfi(generator, state, out).map(|_| 0),
        Command::Psqfi {
            generator,
            state,
            projector,
            theta,
            fd_step,
            out,
        } => cmd_psqfi(generator, state, projector, *theta, *fd_step, out).map(|_| 0),
        Command::Kdq {
            generator,
            observable,
            state,
            theta,
            ps_indices,
            negativity,
            out,
        } => cmd_kdq(
            generator,
            observable,
            state,
            *theta,
            ps_indices,
            *negativity,
            out,
        )
        .map(|_| 0),
        Command::Sweep {
            protocol,
            eigs,
            k,
            theta0,
            phi,
            dtheta,
            var_theta0,
            out,
        } => cmd_sweep(protocol, eigs, *k, *theta0, phi, dtheta, *var_theta0, out).map(|_| 0),
        Command::TheoremCheck {
            theorem,
            trials,
            dim,
            seed,
            out,
        } => cmd_theorem_check(*theorem, *trials, *dim, *seed, out),
        Command::Costrate {
            fisher,
            fisher_ps,
            p_ps,
            c_prepare,
            c_measure,
            c_postselect,
            trials,
            out,
        } => cmd_costrate(
            *fisher,
            *fisher_ps,
            *p_ps,
            *c_prepare,
            *c_measure,
            *c_postselect,
            *trials,
            out,
        )
        .map(|_| 0),
        Command::Limits {
            protocol,
            eigs,
            k,
            phi,
            theta0,
            out,
        } => cmd_limits(protocol, eigs, *k, *phi, *theta0, out).map(|_| 0),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

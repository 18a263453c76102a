//! The two explicit preparation-and-postselection constructions whose
//! postselected Fisher information diverges, their closed-form values, grid
//! sweeps, and ordered-limit checks.
//!
//! `supp3` is a three-level construction (distinct extreme eigenvalues plus
//! one interior level): its Fisher information diverges as φ → 0 after
//! δθ → 0 while p_ps·I retains half the optimized-experiment value. `supp4`
//! needs doubly degenerate extreme eigenvalues and diverges without losing
//! any information: p_ps·I approaches the full (Δa)².

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::postselect::{postselected_qfi, Postselection};
use crate::qcore::{evolve_state, C64, Operator, StateVector};
use crate::tol;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Protocol {
    Supp3,
    Supp4,
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Protocol::Supp3 => "supp3",
            Protocol::Supp4 => "supp4",
        })
    }
}

impl FromStr for Protocol {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "supp3" => Ok(Protocol::Supp3),
            "supp4" => Ok(Protocol::Supp4),
            other => Err(Error::InvalidConfig(format!(
                "unknown protocol {other:?}: expected supp3 or supp4"
            ))),
        }
    }
}

/// Parameters of a protocol instance.
///
/// `eigenvalues` is the ascending spectrum of the generator; `k_index` picks
/// the interior level used by `supp3`; θ = θ0 + δθ, with `var_theta0` a pure
/// display-scaling constant for sweep output.
#[derive(Debug, Clone)]
pub struct ProtocolConfig {
    pub eigenvalues: Vec<f64>,
    pub k_index: usize,
    pub theta0: f64,
    pub phi: f64,
    pub delta_theta: f64,
    pub var_theta0: f64,
}

impl ProtocolConfig {
    pub fn new(eigenvalues: Vec<f64>, k_index: usize) -> Self {
        ProtocolConfig {
            eigenvalues,
            k_index,
            theta0: 0.0,
            phi: 0.1,
            delta_theta: 0.0,
            var_theta0: 1e-6,
        }
    }

    pub fn with_phi_dtheta(&self, phi: f64, delta_theta: f64) -> Self {
        ProtocolConfig {
            phi,
            delta_theta,
            ..self.clone()
        }
    }

    fn check_common(&self) -> Result<()> {
        let m = self.eigenvalues.len();
        if !self.eigenvalues.iter().all(|e| e.is_finite()) {
            return Err(Error::InvalidConfig("non-finite eigenvalue".into()));
        }
        if self.eigenvalues.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidConfig(
                "eigenvalues must be ascending".into(),
            ));
        }
        if self.eigenvalues[m - 1] - self.eigenvalues[0] <= tol::DEGENERATE_RANGE {
            return Err(Error::InvalidConfig(
                "eigenvalues must not all be identical".into(),
            ));
        }
        if !(self.var_theta0 > 0.0) {
            return Err(Error::InvalidConfig(
                "var_theta0 must be positive".into(),
            ));
        }
        if !self.theta0.is_finite() || !self.phi.is_finite() || !self.delta_theta.is_finite() {
            return Err(Error::InvalidConfig(
                "theta0, phi, delta_theta must be finite".into(),
            ));
        }
        Ok(())
    }

    pub fn validate(&self, protocol: Protocol) -> Result<()> {
        self.check_common()?;
        let m = self.eigenvalues.len();
        match protocol {
            Protocol::Supp3 => {
                if m < 3 {
                    return Err(Error::InvalidConfig(
                        "supp3 needs at least 3 eigenvalues".into(),
                    ));
                }
                if self.k_index == 0 || self.k_index == m - 1 {
                    return Err(Error::InvalidConfig(
                        "k_index must be strictly interior".into(),
                    ));
                }
                let ak = self.eigenvalues[self.k_index];
                if ak <= self.eigenvalues[0] || ak >= self.eigenvalues[m - 1] {
                    return Err(Error::InvalidConfig(
                        "the interior eigenvalue must lie strictly between the extremes".into(),
                    ));
                }
            }
            Protocol::Supp4 => {
                if m < 4 {
                    return Err(Error::InvalidConfig(
                        "supp4 needs at least 4 eigenvalues".into(),
                    ));
                }
                if self.eigenvalues[0] != self.eigenvalues[1]
                    || self.eigenvalues[m - 2] != self.eigenvalues[m - 1]
                {
                    return Err(Error::InvalidConfig(
                        "supp4 needs doubly degenerate extreme eigenvalues".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    fn a_min(&self) -> f64 {
        self.eigenvalues[0]
    }

    fn a_max(&self) -> f64 {
        self.eigenvalues[self.eigenvalues.len() - 1]
    }

    fn a_k(&self) -> f64 {
        self.eigenvalues[self.k_index]
    }

    pub fn spectral_range(&self) -> f64 {
        self.a_max() - self.a_min()
    }
}

/// A constructed generator, postselection, and input state.
#[derive(Debug, Clone)]
pub struct ProtocolInstance {
    pub generator: Operator,
    pub postselection: Postselection,
    pub input_state: StateVector,
}

/// Closed-form postselected Fisher information and success probability.
#[derive(Debug, Clone, Copy)]
pub struct AnalyticValues {
    pub qfi_ps: f64,
    pub p_ps: f64,
}

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn im(x: f64) -> C64 {
    C64::new(0.0, x)
}

/// 1 - cos(x), evaluated without cancellation.
fn one_minus_cos(x: f64) -> f64 {
    2.0 * (x / 2.0).sin().powi(2)
}

/// 1 - cos(a)·cos(b), evaluated without cancellation:
/// sin²((a-b)/2) + sin²((a+b)/2).
fn one_minus_cos_prod(a: f64, b: f64) -> f64 {
    ((a - b) / 2.0).sin().powi(2) + ((a + b) / 2.0).sin().powi(2)
}

/// Builds the three-level instance: A = diag(eigenvalues) in the
/// computational basis, F = |f₁⟩⟨f₁| + |f₂⟩⟨f₂| with
/// f₁ = (|a_max⟩+|a_min⟩)/√2, f₂ = (i(|a_max⟩-|a_min⟩)/√2 + |a_k⟩)/√2,
/// and ψ₀ = U†(θ₀)·(1/√2){(cosφ-sinφ)(i/√2)(|a_min⟩-|a_max⟩) + (cosφ+sinφ)|a_k⟩}.
pub fn supp3_construct(cfg: &ProtocolConfig) -> Result<ProtocolInstance> {
    cfg.validate(Protocol::Supp3)?;
    let m = cfg.eigenvalues.len();
    let generator = Operator::from_diagonal(&cfg.eigenvalues)?;
    let (lo, hi, k) = (0, m - 1, cfg.k_index);
    let sqrt2_inv = 1.0 / 2.0_f64.sqrt();

    let mut f1 = vec![C64::new(0.0, 0.0); m];
    f1[hi] = re(sqrt2_inv);
    f1[lo] = re(sqrt2_inv);
    let f1 = StateVector::normalized(f1)?;

    let mut f2 = vec![C64::new(0.0, 0.0); m];
    f2[hi] = im(sqrt2_inv) * re(sqrt2_inv);
    f2[lo] = -im(sqrt2_inv) * re(sqrt2_inv);
    f2[k] = re(sqrt2_inv);
    let f2 = StateVector::normalized(f2)?;

    let (cos, sin) = (cfg.phi.cos(), cfg.phi.sin());
    let mut psi = vec![C64::new(0.0, 0.0); m];
    psi[lo] = re(sqrt2_inv) * re(cos - sin) * im(sqrt2_inv);
    psi[hi] = -re(sqrt2_inv) * re(cos - sin) * im(sqrt2_inv);
    psi[k] = re(sqrt2_inv) * re(cos + sin);
    let psi_at_theta0 = StateVector::normalized(psi)?;
    let input_state = evolve_state(&psi_at_theta0, &generator, -cfg.theta0)?;

    Ok(ProtocolInstance {
        generator,
        postselection: Postselection::from_states(vec![f1, f2])?,
        input_state,
    })
}

/// Closed form for the three-level construction, as a function of
/// (a₁, a_k, a_M, δθ, φ).
pub fn supp3_analytic(cfg: &ProtocolConfig) -> Result<AnalyticValues> {
    cfg.validate(Protocol::Supp3)?;
    let (a1, ak, am) = (cfg.a_min(), cfg.a_k(), cfg.a_max());
    let dt = cfg.delta_theta;
    let phi2 = 2.0 * cfg.phi;
    let (c2, s2) = (phi2.cos(), phi2.sin());
    let (c4, s4) = ((4.0 * cfg.phi).cos(), (4.0 * cfg.phi).sin());
    let c_mk = ((am - ak) * dt).cos();
    let c_k1 = ((ak - a1) * dt).cos();
    let c_m1 = ((am - a1) * dt).cos();

    // 5 - 2cos(2φ)(c_mk + c_k1) + c_m1(sin(2φ) - 1) - sin(2φ), regrouped into
    // a sum of nonnegative pieces so small-φ, small-δθ values keep relative
    // precision: (1-sin2φ)(1-c_m1) + 2(1-cos2φ·c_mk) + 2(1-cos2φ·c_k1).
    let one_minus_s2 = (cfg.phi.cos() - cfg.phi.sin()).powi(2);
    let denominator = one_minus_s2 * one_minus_cos((am - a1) * dt)
        + 2.0 * one_minus_cos_prod(phi2, (am - ak) * dt)
        + 2.0 * one_minus_cos_prod(phi2, (ak - a1) * dt);
    if denominator < tol::DIVERGENCE_DENOMINATOR {
        return Err(Error::DivergentInformation { denominator });
    }
    let p_ps = denominator / 8.0;

    let numerator = 2.0 * am * am - am * ak + ak * ak + 2.0 * a1 * a1
        - (3.0 * am + ak) * a1
        + (am - ak) * (ak - a1) * c4 * (c_m1 - 1.0)
        + (am - ak) * (ak - a1) * c_m1
        + 2.0 * (am - a1) * c2 * ((a1 - ak) * c_mk + (ak - am) * c_k1)
        - 2.0 * (am - a1) * (am - a1) * s2
        + (am - a1) * ((ak - a1) * c_mk + (am - ak) * c_k1) * s4;
    let qfi_ps = 8.0 * numerator / (denominator * denominator);
    Ok(AnalyticValues { qfi_ps, p_ps })
}

/// Builds the doubly degenerate instance in its minimal dimension-4
/// embedding: A = diag(a_min, a_min, a_max, a_max) with basis assignment
/// (min₁, min₂, max₂, max₁), F spanned by f₁ = (|max₂⟩-|min₁⟩)/√2 and
/// f₂ = (|min₂⟩-|max₁⟩)/√2, and
/// ψ₀ = U†(θ₀)·(1/2){(cosφ-sinφ)(|max₂⟩+|min₂⟩) + (sinφ+cosφ)(|max₁⟩+|min₁⟩)}.
pub fn supp4_construct(cfg: &ProtocolConfig) -> Result<ProtocolInstance> {
    cfg.validate(Protocol::Supp4)?;
    let (a1, am) = (cfg.a_min(), cfg.a_max());
    let generator = Operator::from_diagonal(&[a1, a1, am, am])?;
    let (min1, min2, max2, max1) = (0usize, 1, 2, 3);
    let sqrt2_inv = 1.0 / 2.0_f64.sqrt();

    let mut f1 = vec![C64::new(0.0, 0.0); 4];
    f1[max2] = re(sqrt2_inv);
    f1[min1] = re(-sqrt2_inv);
    let f1 = StateVector::normalized(f1)?;

    let mut f2 = vec![C64::new(0.0, 0.0); 4];
    f2[min2] = re(sqrt2_inv);
    f2[max1] = re(-sqrt2_inv);
    let f2 = StateVector::normalized(f2)?;

    let (cos, sin) = (cfg.phi.cos(), cfg.phi.sin());
    let mut psi = vec![C64::new(0.0, 0.0); 4];
    psi[max2] = re(0.5 * (cos - sin));
    psi[min2] = re(0.5 * (cos - sin));
    psi[max1] = re(0.5 * (sin + cos));
    psi[min1] = re(0.5 * (sin + cos));
    let psi_at_theta0 = StateVector::normalized(psi)?;
    let input_state = evolve_state(&psi_at_theta0, &generator, -cfg.theta0)?;

    Ok(ProtocolInstance {
        generator,
        postselection: Postselection::from_states(vec![f1, f2])?,
        input_state,
    })
}

/// Closed form for the doubly degenerate construction:
/// I = sin²(2φ)(a_M-a₁)²/(1 - cos(2φ)cos[(a_M-a₁)δθ])²,
/// p = ½(1 - cos(2φ)cos[(a_M-a₁)δθ]).
pub fn supp4_analytic(cfg: &ProtocolConfig) -> Result<AnalyticValues> {
    cfg.validate(Protocol::Supp4)?;
    let range = cfg.spectral_range();
    let denominator = one_minus_cos_prod(2.0 * cfg.phi, range * cfg.delta_theta);
    if denominator < tol::DIVERGENCE_DENOMINATOR {
        return Err(Error::DivergentInformation { denominator });
    }
    let s2 = (2.0 * cfg.phi).sin();
    Ok(AnalyticValues {
        qfi_ps: s2 * s2 * range * range / (denominator * denominator),
        p_ps: denominator / 2.0,
    })
}

pub fn construct(protocol: Protocol, cfg: &ProtocolConfig) -> Result<ProtocolInstance> {
    match protocol {
        Protocol::Supp3 => supp3_construct(cfg),
        Protocol::Supp4 => supp4_construct(cfg),
    }
}

pub fn analytic(protocol: Protocol, cfg: &ProtocolConfig) -> Result<AnalyticValues> {
    match protocol {
        Protocol::Supp3 => supp3_analytic(cfg),
        Protocol::Supp4 => supp4_analytic(cfg),
    }
}

/// One sweep cell. Cells whose closed form or numerical evaluation fails keep
/// the error message instead of float values.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub phi: f64,
    pub delta_theta: f64,
    pub p_ps: f64,
    pub qfi_ps: f64,
    pub qfi_ps_numeric: f64,
    pub qfi_times_pps: f64,
    pub qfi_times_var: f64,
    pub error: Option<String>,
}

/// Evaluates the analytic and numerical postselected Fisher information over
/// a (φ, δθ) grid, φ as the outer loop. Per-cell failures are recorded in the
/// row, never fatal.
pub fn sweep(
    protocol: Protocol,
    cfg_base: &ProtocolConfig,
    phi_grid: &[f64],
    dtheta_grid: &[f64],
) -> Result<Vec<SweepRow>> {
    if phi_grid.is_empty() || dtheta_grid.is_empty() {
        return Err(Error::InvalidConfig("sweep grids must be nonempty".into()));
    }
    cfg_base.validate(protocol)?;
    let mut rows = Vec::with_capacity(phi_grid.len() * dtheta_grid.len());
    for &phi in phi_grid {
        for &dtheta in dtheta_grid {
            let cfg = cfg_base.with_phi_dtheta(phi, dtheta);
            rows.push(sweep_cell(protocol, &cfg));
        }
    }
    Ok(rows)
}

fn sweep_cell(protocol: Protocol, cfg: &ProtocolConfig) -> SweepRow {
    let nan = f64::NAN;
    let mut row = SweepRow {
        phi: cfg.phi,
        delta_theta: cfg.delta_theta,
        p_ps: nan,
        qfi_ps: nan,
        qfi_ps_numeric: nan,
        qfi_times_pps: nan,
        qfi_times_var: nan,
        error: None,
    };
    let outcome = (|| -> Result<()> {
        let values = analytic(protocol, cfg)?;
        let instance = construct(protocol, cfg)?;
        let numeric = postselected_qfi(
            &instance.input_state,
            &instance.generator,
            &instance.postselection,
            cfg.theta0 + cfg.delta_theta,
        )?;
        row.p_ps = values.p_ps;
        row.qfi_ps = values.qfi_ps;
        row.qfi_ps_numeric = numeric.value;
        row.qfi_times_pps = values.qfi_ps * values.p_ps;
        row.qfi_times_var = values.qfi_ps * cfg.var_theta0;
        Ok(())
    })();
    if let Err(e) = outcome {
        row.error = Some(e.to_string());
    }
    row
}

/// CSV header shared by the sweep writers and the CLI.
pub const SWEEP_CSV_HEADER: &str =
    "phi,delta_theta,p_ps,qfi_ps,qfi_ps_numeric,qfi_times_pps,qfi_times_var";

/// Writes sweep rows as CSV. Divergent cells render the literal word
/// `divergent` in the value columns rather than a float.
pub fn write_sweep_csv<W: std::io::Write>(rows: &[SweepRow], w: &mut W) -> Result<()> {
    writeln!(w, "{SWEEP_CSV_HEADER}")?;
    for row in rows {
        let fmt = crate::io::fmt_f64;
        if row.error.is_some() {
            writeln!(
                w,
                "{},{},divergent,divergent,divergent,divergent,divergent",
                fmt(row.phi),
                fmt(row.delta_theta),
            )?;
        } else {
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                fmt(row.phi),
                fmt(row.delta_theta),
                fmt(row.p_ps),
                fmt(row.qfi_ps),
                fmt(row.qfi_ps_numeric),
                fmt(row.qfi_times_pps),
                fmt(row.qfi_times_var),
            )?;
        }
    }
    Ok(())
}

/// Ordered-limit evaluation: δθ → 0 first (at the configured φ), then φ → 0
/// at δθ = 0. The report records each sequence; construction fails with
/// [`Error::LimitMismatch`] when a sequence misses its target.
#[derive(Debug, Clone)]
pub struct LimitsReport {
    pub protocol: Protocol,
    pub dtheta_seq: Vec<f64>,
    pub p_at_dtheta: Vec<f64>,
    pub qfi_at_dtheta: Vec<f64>,
    /// Closed-form targets of the δθ → 0 limit at the configured φ.
    pub p_limit: f64,
    pub qfi_limit: f64,
    pub product_limit: f64,
    pub phi_seq: Vec<f64>,
    pub p_at_phi: Vec<f64>,
    pub qfi_at_phi: Vec<f64>,
    pub product_at_phi: Vec<f64>,
    /// Target of p_ps·I as φ → 0: half (Δa)² for supp3, (Δa)² for supp4.
    pub product_target: f64,
    pub qfi_divergent: bool,
}

fn dtheta_limit_targets(protocol: Protocol, cfg: &ProtocolConfig) -> (f64, f64, f64) {
    let range_sq = cfg.spectral_range().powi(2);
    let phi = cfg.phi;
    let p = phi.sin().powi(2);
    let (qfi, product) = match protocol {
        Protocol::Supp3 => {
            let cot = phi.cos() / phi.sin();
            (
                (cot - 1.0).powi(2) / 2.0 * range_sq,
                0.5 * (1.0 - (2.0 * phi).sin()) * range_sq,
            )
        }
        Protocol::Supp4 => {
            let cot = phi.cos() / phi.sin();
            (cot * cot * range_sq, phi.cos().powi(2) * range_sq)
        }
    };
    (p, qfi, product)
}

pub fn ordered_limits(protocol: Protocol, cfg: &ProtocolConfig) -> Result<LimitsReport> {
    cfg.validate(protocol)?;
    if !(cfg.phi > 0.0) {
        return Err(Error::InvalidConfig(
            "ordered limits need a positive phi".into(),
        ));
    }
    let range_sq = cfg.spectral_range().powi(2);

    let dtheta_seq: Vec<f64> = (2..=8).map(|k| 10f64.powi(-k)).collect();
    let mut p_at_dtheta = Vec::new();
    let mut qfi_at_dtheta = Vec::new();
    for &dt in &dtheta_seq {
        let values = analytic(protocol, &cfg.with_phi_dtheta(cfg.phi, dt))?;
        p_at_dtheta.push(values.p_ps);
        qfi_at_dtheta.push(values.qfi_ps);
    }
    let (p_limit, qfi_limit, product_limit) = dtheta_limit_targets(protocol, cfg);
    let p_final = *p_at_dtheta.last().unwrap();
    let qfi_final = *qfi_at_dtheta.last().unwrap();
    if (p_final - p_limit).abs() > 1e-9 * p_limit.max(1.0) {
        return Err(Error::LimitMismatch(format!(
            "p_ps(δθ→0) = {p_final} does not reach {p_limit} (sequence {p_at_dtheta:?})"
        )));
    }
    if (qfi_final - qfi_limit).abs() > 1e-6 * qfi_limit.max(1.0) {
        return Err(Error::LimitMismatch(format!(
            "qfi(δθ→0) = {qfi_final} does not reach {qfi_limit} (sequence {qfi_at_dtheta:?})"
        )));
    }

    let phi_seq: Vec<f64> = (1..=6).map(|k| 10f64.powi(-k)).collect();
    let mut p_at_phi = Vec::new();
    let mut qfi_at_phi = Vec::new();
    let mut product_at_phi = Vec::new();
    for &phi in &phi_seq {
        let values = analytic(protocol, &cfg.with_phi_dtheta(phi, 0.0))?;
        p_at_phi.push(values.p_ps);
        qfi_at_phi.push(values.qfi_ps);
        product_at_phi.push(values.p_ps * values.qfi_ps);
    }
    let (product_target, product_tol) = match protocol {
        Protocol::Supp3 => (0.5 * range_sq, 1e-3),
        Protocol::Supp4 => (range_sq, 1e-6),
    };
    if p_at_phi.windows(2).any(|w| w[1] >= w[0]) || *p_at_phi.last().unwrap() > 1e-8 {
        return Err(Error::LimitMismatch(format!(
            "p_ps(φ→0) fails to vanish monotonically: {p_at_phi:?}"
        )));
    }
    let qfi_divergent = qfi_at_phi.windows(2).all(|w| w[1] > w[0])
        && *qfi_at_phi.last().unwrap() > 1e6 * (range_sq / 16.0);
    if !qfi_divergent {
        return Err(Error::LimitMismatch(format!(
            "qfi(φ→0) fails to grow without bound: {qfi_at_phi:?}"
        )));
    }
    let product_final = *product_at_phi.last().unwrap();
    if (product_final - product_target).abs() > product_tol * product_target.max(1.0) {
        return Err(Error::LimitMismatch(format!(
            "p_ps·qfi(φ→0) = {product_final} does not reach {product_target} \
             (sequence {product_at_phi:?})"
        )));
    }

    Ok(LimitsReport {
        protocol,
        dtheta_seq,
        p_at_dtheta,
        qfi_at_dtheta,
        p_limit,
        qfi_limit,
        product_limit,
        phi_seq,
        p_at_phi,
        qfi_at_phi,
        product_at_phi,
        product_target,
        qfi_divergent,
    })
}

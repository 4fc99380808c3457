//! Numeric checks on a time lattice for Gaussian systems.
//!
//! Every kernel here is `A exp(i(α x² + β x y + γ y²))`, so composing lattice
//! steps is an exact Gaussian integral. No sampling is involved.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::parse_rational;

/// Speed of light in m/s, exact by definition of the metre.
pub const SPEED_OF_LIGHT: i64 = 299_792_458;
/// Reduced Planck constant in J·s (CODATA 2018).
pub const HBAR_SI: &str = "1.054571817e-34";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum System {
    Free,
    Harmonic,
}

impl System {
    pub fn name(self) -> &'static str {
        match self {
            System::Free => "free",
            System::Harmonic => "harmonic",
        }
    }
}

impl std::str::FromStr for System {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "free" => Ok(System::Free),
            "harmonic" => Ok(System::Harmonic),
            _ => Err(Error::Input(format!(
                "unknown lattice system `{s}` (expected free or harmonic)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LatticeConfig {
    pub steps: usize,
    pub t_total: f64,
    pub m: f64,
    pub omega0: f64,
    pub hbar: f64,
    pub x_i: f64,
    pub x_f: f64,
    pub q0: f64,
    pub p0: f64,
}

impl Default for LatticeConfig {
    fn default() -> Self {
        LatticeConfig {
            steps: 64,
            t_total: 1.0,
            m: 1.0,
            omega0: 1.0,
            hbar: 1.0,
            x_i: 0.3,
            x_f: 0.7,
            q0: 1.0,
            p0: 0.0,
        }
    }
}

impl LatticeConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Lattice(m.into()));
        if self.steps < 1 {
            return bad("steps must be at least 1");
        }
        if !(self.t_total > 0.0) || !self.t_total.is_finite() {
            return bad("total time must be positive");
        }
        if !(self.m > 0.0) || !self.m.is_finite() {
            return bad("mass must be positive");
        }
        if !(self.hbar > 0.0) || !self.hbar.is_finite() {
            return bad("hbar must be positive");
        }
        if !self.omega0.is_finite() || self.omega0 < 0.0 {
            return bad("omega0 must be finite and non-negative");
        }
        Ok(())
    }

    pub fn with_steps(&self, steps: usize) -> Self {
        LatticeConfig { steps, ..self.clone() }
    }

    pub fn dt(&self) -> f64 {
        self.t_total / self.steps as f64
    }

    fn omega(&self, system: System) -> f64 {
        match system {
            System::Free => 0.0,
            System::Harmonic => self.omega0,
        }
    }
}

/// `A exp(i(α x² + β x y + γ y²))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianKernel {
    pub prefactor: Complex64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl GaussianKernel {
    /// One lattice step of `m ẋ²/2 − m ω² x²/2` with the potential split
    /// evenly between the two ends of the step.
    pub fn step(m: f64, omega: f64, hbar: f64, dt: f64) -> Self {
        let kinetic = m / (2.0 * hbar * dt);
        let potential = dt * m * omega * omega / (4.0 * hbar);
        GaussianKernel {
            prefactor: Complex64::from_polar((m / (2.0 * PI * hbar * dt)).sqrt(), -PI / 4.0),
            alpha: kinetic - potential,
            beta: -2.0 * kinetic,
            gamma: kinetic - potential,
        }
    }

    /// `∫dz self(x, z) next(z, y)`.
    pub fn compose(&self, next: &GaussianKernel) -> Option<GaussianKernel> {
        let kappa = self.gamma + next.alpha;
        // Cancellation down to rounding level is treated as an exact zero.
        let scale = self.gamma.abs() + next.alpha.abs() + self.beta.abs() + next.beta.abs();
        if kappa.abs() <= 1e-12 * scale || !kappa.is_finite() {
            return None;
        }
        // ∫dz exp(iκz² + iJz) = sqrt(π/|κ|) e^{iπ sgn(κ)/4} exp(−iJ²/(4κ))
        let gauss = Complex64::from_polar((PI / kappa.abs()).sqrt(), PI * kappa.signum() / 4.0);
        Some(GaussianKernel {
            prefactor: self.prefactor * next.prefactor * gauss,
            alpha: self.alpha - self.beta * self.beta / (4.0 * kappa),
            beta: -self.beta * next.beta / (2.0 * kappa),
            gamma: next.gamma - next.beta * next.beta / (4.0 * kappa),
        })
    }

    pub fn eval(&self, x: f64, y: f64) -> Complex64 {
        let phase = self.alpha * x * x + self.beta * x * y + self.gamma * y * y;
        self.prefactor * Complex64::from_polar(1.0, phase)
    }

    /// Apply to `ψ(x) = exp(a x² + b x + c)`; the result has the same form.
    pub fn propagate(&self, psi: &Wavepacket) -> Result<Wavepacket> {
        let i = Complex64::i();
        let s = -(psi.a + i * self.alpha);
        if !(s.re > 0.0) {
            return Err(Error::Lattice("wavepacket is not normalizable".into()));
        }
        // ∫dx exp(−s x² + t x) = sqrt(π/s) exp(t²/(4s)) with t = b + iβy.
        let b2 = i * self.beta;
        Ok(Wavepacket {
            a: i * self.gamma + b2 * b2 / (4.0 * s),
            b: 2.0 * psi.b * b2 / (4.0 * s),
            c: psi.c + psi.b * psi.b / (4.0 * s) + (self.prefactor * (Complex64::from(PI) / s).sqrt()).ln(),
        })
    }
}

/// The lattice kernel after `N` composed steps, from `x_i` to `x_f`.
pub fn lattice_kernel(cfg: &LatticeConfig, system: System) -> Result<GaussianKernel> {
    cfg.validate()?;
    let step = GaussianKernel::step(cfg.m, cfg.omega(system), cfg.hbar, cfg.dt());
    let mut k = step;
    for n in 1..cfg.steps {
        k = k.compose(&step).ok_or(Error::SingularStep { step: n })?;
    }
    Ok(k)
}

pub fn qm_lattice_kernel(cfg: &LatticeConfig, system: System) -> Result<Complex64> {
    Ok(lattice_kernel(cfg, system)?.eval(cfg.x_i, cfg.x_f))
}

/// `sqrt(m/(2πiℏT)) exp(i m (x_f − x_i)²/(2ℏT))`.
pub fn free_kernel_exact(cfg: &LatticeConfig) -> Complex64 {
    let t = cfg.t_total;
    let amp = (cfg.m / (2.0 * PI * cfg.hbar * t)).sqrt();
    let dx = cfg.x_f - cfg.x_i;
    Complex64::from_polar(amp, cfg.m * dx * dx / (2.0 * cfg.hbar * t) - PI / 4.0)
}

/// Closed-form oscillator propagator for `0 < ω T < π`.
pub fn mehler_kernel(cfg: &LatticeConfig) -> Result<Complex64> {
    let w = cfg.omega0;
    let t = cfg.t_total;
    if w == 0.0 {
        return Ok(free_kernel_exact(cfg));
    }
    let wt = w * t;
    if !(wt > 0.0 && wt < PI) {
        return Err(Error::Lattice(format!("closed form needs 0 < omega0*t < pi, got {wt}")));
    }
    let s = wt.sin();
    let amp = (cfg.m * w / (2.0 * PI * cfg.hbar * s)).sqrt();
    let (xi, xf) = (cfg.x_i, cfg.x_f);
    let phase = cfg.m * w / (2.0 * cfg.hbar * s) * ((xi * xi + xf * xf) * wt.cos() - 2.0 * xi * xf);
    Ok(Complex64::from_polar(amp, phase - PI / 4.0))
}

pub fn reference_kernel(cfg: &LatticeConfig, system: System) -> Result<Complex64> {
    match system {
        System::Free => Ok(free_kernel_exact(cfg)),
        System::Harmonic => mehler_kernel(cfg),
    }
}

/// `ψ(x) = exp(a x² + b x + c)` with `Re a < 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Wavepacket {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
}

impl Wavepacket {
    /// Normalized packet of width `sigma` centred at `x0` with momentum `k0`.
    pub fn gaussian(x0: f64, sigma: f64, k0: f64) -> Self {
        let a = -1.0 / (4.0 * sigma * sigma);
        let c = -x0 * x0 / (4.0 * sigma * sigma) - 0.25 * (2.0 * PI * sigma * sigma).ln();
        Wavepacket {
            a: a.into(),
            b: Complex64::new(x0 / (2.0 * sigma * sigma), k0),
            c: c.into(),
        }
    }

    /// `∫|ψ|² dx`.
    pub fn norm(&self) -> f64 {
        let s = -2.0 * self.a.re;
        let t = 2.0 * self.b.re;
        (PI / s).sqrt() * (t * t / (4.0 * s) + 2.0 * self.c.re).exp()
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        (self.a * x * x + self.b * x + self.c).exp()
    }
}

/// Norm after each of the `cfg.steps` lattice steps.
pub fn wavepacket_norms(cfg: &LatticeConfig, system: System, psi: Wavepacket) -> Result<Vec<f64>> {
    cfg.validate()?;
    let step = GaussianKernel::step(cfg.m, cfg.omega(system), cfg.hbar, cfg.dt());
    let mut psi = psi;
    let mut out = Vec::with_capacity(cfg.steps);
    for _ in 0..cfg.steps {
        psi = step.propagate(&psi)?;
        out.push(psi.norm());
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Integrator {
    /// `q' = q + Δt p/m`, `p' = p − Δt m ω² q`.
    ForwardEuler,
    /// Momentum first, then position with the new momentum.
    SymplecticEuler,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Trajectory {
    pub q: Vec<f64>,
    pub p: Vec<f64>,
}

/// Discrete Hamilton equations for `H = p²/2m + m ω² q²/2`.
pub fn classical_discrete_evolve(cfg: &LatticeConfig, system: System, scheme: Integrator) -> Result<Trajectory> {
    cfg.validate()?;
    let dt = cfg.dt();
    let w2 = cfg.omega(system).powi(2);
    let (mut q, mut p) = (cfg.q0, cfg.p0);
    let mut traj = Trajectory { q: vec![q], p: vec![p] };
    for _ in 0..cfg.steps {
        match scheme {
            Integrator::ForwardEuler => {
                let q_next = q + dt * p / cfg.m;
                p -= dt * cfg.m * w2 * q;
                q = q_next;
            }
            Integrator::SymplecticEuler => {
                p -= dt * cfg.m * w2 * q;
                q += dt * p / cfg.m;
            }
        }
        traj.q.push(q);
        traj.p.push(p);
    }
    Ok(traj)
}

/// Analytic `(q(t), p(t))`.
pub fn classical_exact(cfg: &LatticeConfig, system: System, t: f64) -> (f64, f64) {
    let w = cfg.omega(system);
    if w == 0.0 {
        return (cfg.q0 + t * cfg.p0 / cfg.m, cfg.p0);
    }
    let (s, c) = (w * t).sin_cos();
    (
        cfg.q0 * c + cfg.p0 / (cfg.m * w) * s,
        cfg.p0 * c - cfg.m * w * cfg.q0 * s,
    )
}

pub fn energy(cfg: &LatticeConfig, system: System, q: f64, p: f64) -> f64 {
    p * p / (2.0 * cfg.m) + 0.5 * cfg.m * cfg.omega(system).powi(2) * q * q
}

/// Relative energy error of a long symplectic run, split into the first and
/// last tenth of the run so secular growth is visible.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnergyDrift {
    pub steps: usize,
    pub dt: f64,
    pub max_rel_early: f64,
    pub max_rel_late: f64,
    pub max_rel: f64,
}

impl EnergyDrift {
    /// Bounded and oscillatory: late excursions no larger than early ones
    /// (up to a small margin), and small overall.
    pub fn is_bounded(&self) -> bool {
        self.max_rel_late <= 1.5 * self.max_rel_early + 1e-12 && self.max_rel < 0.1
    }
}

/// `steps` symplectic steps of `dt = period / 100` for the oscillator.
pub fn energy_drift(cfg: &LatticeConfig, steps: usize) -> Result<EnergyDrift> {
    cfg.validate()?;
    if cfg.omega0 <= 0.0 {
        return Err(Error::Lattice("energy drift needs omega0 > 0".into()));
    }
    let dt = 2.0 * PI / cfg.omega0 / 100.0;
    let run = LatticeConfig {
        steps,
        t_total: dt * steps as f64,
        ..cfg.clone()
    };
    let tr = classical_discrete_evolve(&run, System::Harmonic, Integrator::SymplecticEuler)?;
    let e0 = energy(&run, System::Harmonic, tr.q[0], tr.p[0]);
    if e0 == 0.0 {
        return Err(Error::Lattice("energy drift needs a nonzero initial energy".into()));
    }
    let rel: Vec<f64> =
        tr.q.iter()
            .zip(&tr.p)
            .map(|(q, p)| ((energy(&run, System::Harmonic, *q, *p) - e0) / e0).abs())
            .collect();
    let tenth = (rel.len() / 10).max(1);
    let max = |xs: &[f64]| xs.iter().cloned().fold(0.0, f64::max);
    Ok(EnergyDrift {
        steps,
        dt,
        max_rel_early: max(&rel[..tenth]),
        max_rel_late: max(&rel[rel.len() - tenth..]),
        max_rel: max(&rel),
    })
}

/// One row of a convergence study.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KernelRow {
    pub system: &'static str,
    pub n: usize,
    pub value_re: f64,
    pub value_im: f64,
    pub reference_re: f64,
    pub reference_im: f64,
    pub abs_error: f64,
}

pub fn kernel_rows(cfg: &LatticeConfig, system: System, ns: &[usize]) -> Result<Vec<KernelRow>> {
    let reference = reference_kernel(cfg, system)?;
    ns.iter()
        .map(|&n| {
            let v = qm_lattice_kernel(&cfg.with_steps(n), system)?;
            Ok(KernelRow {
                system: system.name(),
                n,
                value_re: v.re,
                value_im: v.im,
                reference_re: reference.re,
                reference_im: reference.im,
                abs_error: (v - reference).norm(),
            })
        })
        .collect()
}

/// Classical trajectory error at the final time.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrajectoryRow {
    pub system: &'static str,
    pub n: usize,
    pub q: f64,
    pub p: f64,
    pub q_exact: f64,
    pub p_exact: f64,
    pub abs_error: f64,
}

pub fn trajectory_rows(cfg: &LatticeConfig, system: System, ns: &[usize]) -> Result<Vec<TrajectoryRow>> {
    let (qe, pe) = classical_exact(cfg, system, cfg.t_total);
    ns.iter()
        .map(|&n| {
            let tr = classical_discrete_evolve(&cfg.with_steps(n), system, Integrator::ForwardEuler)?;
            let (q, p) = (*tr.q.last().unwrap(), *tr.p.last().unwrap());
            Ok(TrajectoryRow {
                system: system.name(),
                n,
                q,
                p,
                q_exact: qe,
                p_exact: pe,
                abs_error: (q - qe).hypot(p - pe),
            })
        })
        .collect()
}

/// Least-squares slope of `log err` against `log Δt`.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

pub fn rows_to_csv<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Error::Input(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Input(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Input(e.to_string()))
}

/// `B = M c² T` in J·s, kept exact.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BigAction {
    #[serde(serialize_with = "rational_string")]
    pub mass_kg: BigRational,
    #[serde(serialize_with = "rational_string")]
    pub age_s: BigRational,
    #[serde(serialize_with = "rational_string")]
    pub b: BigRational,
    #[serde(serialize_with = "rational_string")]
    pub ratio_to_hbar: BigRational,
    pub b_approx: f64,
    pub ratio_approx: f64,
    pub speed_of_light: i64,
    pub hbar: &'static str,
}

fn rational_string<S: serde::Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

pub fn hbar_si() -> BigRational {
    parse_rational(HBAR_SI).expect("constant parses")
}

pub fn compute_b(mass_kg: &BigRational, age_s: &BigRational) -> Result<BigAction> {
    if mass_kg.is_negative() || age_s.is_negative() {
        return Err(Error::Input("mass and age must be non-negative".into()));
    }
    let c = BigRational::from_integer(BigInt::from(SPEED_OF_LIGHT));
    let b = mass_kg * &c * &c * age_s;
    let ratio = &b / hbar_si();
    Ok(BigAction {
        mass_kg: mass_kg.clone(),
        age_s: age_s.clone(),
        b_approx: b.to_f64().unwrap_or(f64::NAN),
        ratio_approx: ratio.to_f64().unwrap_or(f64::NAN),
        b,
        ratio_to_hbar: ratio,
        speed_of_light: SPEED_OF_LIGHT,
        hbar: HBAR_SI,
    })
}

/// Parse decimal or scientific input such as `1.5e53`.
pub fn parse_quantity(text: &str) -> Result<BigRational> {
    parse_rational(text.trim()).ok_or_else(|| Error::Input(format!("not a number: `{text}`")))
}

impl BigAction {
    pub fn is_zero(&self) -> bool {
        self.b.is_zero()
    }
}

//! Command pipeline behind the `superspace-lab` binary.
//!
//! Each command produces human-readable lines and a list of verdicts. A
//! verdict passes when the engine's result agrees with the outcome its fixed
//! conventions predict.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{json, Value};
use superspace_core::dimensions::{superspace_measure, Dimension, DimensionAssignment, Exponent, Measure};
use superspace_core::grassmann::GrassmannElement;
use superspace_core::lattice::{
    compute_b, energy_drift, free_kernel_exact, kernel_rows, loglog_slope, qm_lattice_kernel, trajectory_rows,
    wavepacket_norms, LatticeConfig, System, Wavepacket,
};
use superspace_core::model::{Dynamics, Model};
use superspace_core::reduction::{
    compare_modulo_derivative, cpi_component_lagrangian, dimension_replays, hamiltonian_component_lagrangian, hbar,
    identity_replays, large_action_insert, large_divisor, multiplier_sector, projection_checks, quantize,
    reduce_with_multiplier, IdentityVerdict, InnerI, SuperAction, Verdict, NORMALIZATION_NOTE,
};
use superspace_core::superspace::{superfield_of_function, third_order_term, THETA, THETA_BAR};
use superspace_core::{Error, Result, ScalarExpr};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Expand,
    Reduce,
    Quantize,
    Bigaction,
    Dimcheck,
    Lattice,
    Identities,
    All,
}

impl Command {
    pub const SEQUENCE: [Command; 7] = [
        Command::Expand,
        Command::Reduce,
        Command::Quantize,
        Command::Bigaction,
        Command::Dimcheck,
        Command::Lattice,
        Command::Identities,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Expand => "expand",
            Command::Reduce => "reduce",
            Command::Quantize => "quantize",
            Command::Bigaction => "bigaction",
            Command::Dimcheck => "dimcheck",
            Command::Lattice => "lattice",
            Command::Identities => "identities",
            Command::All => "all",
        }
    }
}

impl std::str::FromStr for Command {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Command::SEQUENCE
            .into_iter()
            .chain([Command::All])
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Input(format!("unknown command `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Divisor {
    #[default]
    B,
    Hbar,
}

impl Divisor {
    fn expr(self) -> ScalarExpr {
        match self {
            Divisor::B => large_divisor().into(),
            Divisor::Hbar => hbar().into(),
        }
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Options {
    pub eps_symbolic: bool,
    pub divisor: Divisor,
}

/// Output of one command.
#[derive(Clone, Debug, Serialize)]
pub struct Section {
    pub command: &'static str,
    pub verdicts: Vec<IdentityVerdict>,
    pub data: Value,
    #[serde(skip)]
    pub lines: Vec<String>,
}

impl Section {
    fn new(command: Command) -> Self {
        Section {
            command: command.name(),
            verdicts: Vec::new(),
            data: json!({}),
            lines: Vec::new(),
        }
    }

    fn line(&mut self, s: impl Into<String>) {
        self.lines.push(s.into());
    }

    fn set(&mut self, key: &str, v: impl Serialize) {
        self.data[key] = serde_json::to_value(v).expect("report values serialize");
    }

    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(IdentityVerdict::passed)
    }
}

/// Conventions stated at the top of every report.
pub const NOTES: [&str; 3] = [
    "L is a phase-space Lagrangian in the coordinates and their velocities; L(Phi) is built from Phi and dPhi/dt",
    "only dim(theta thetabar) and dim(dtheta dthetabar) are fixed; the split between theta and thetabar is a representational choice",
    NORMALIZATION_NOTE,
];

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub model: String,
    pub command: &'static str,
    pub notes: [&'static str; 3],
    pub sections: Vec<Section>,
    pub passed: bool,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "model: {}", self.model);
        for n in NOTES {
            let _ = writeln!(out, "note: {n}");
        }
        out.push('\n');
        for s in &self.sections {
            let _ = writeln!(out, "== {} ==", s.command);
            for l in &s.lines {
                let _ = writeln!(out, "{l}");
            }
            for v in &s.verdicts {
                let tag = if v.passed() { "PASS" } else { "FAIL" };
                let _ = writeln!(out, "[{tag}] {} ({})", v.name, v.anchor);
                let _ = writeln!(out, "    claim:  {}", v.claim);
                let _ = writeln!(out, "    engine: {}", v.engine);
                let _ = writeln!(out, "    verdict: {} (expected {})", v.verdict, v.expected);
                if let Some(n) = &v.note {
                    let _ = writeln!(out, "    note: {n}");
                }
            }
            out.push('\n');
        }
        let _ = writeln!(out, "overall: {}", if self.passed { "pass" } else { "fail" });
        out
    }
}

/// Run `command` on a parsed model.
pub fn run(command: Command, model: &Model, model_name: &str, opts: Options) -> Result<Report> {
    let commands: Vec<Command> = match command {
        Command::All => Command::SEQUENCE.to_vec(),
        c => vec![c],
    };
    let sa = model.super_action()?;
    let sections = commands
        .into_iter()
        .map(|c| run_one(c, model, &sa, opts))
        .collect::<Result<Vec<_>>>()?;
    let passed = sections.iter().all(Section::passed);
    Ok(Report {
        model: model_name.to_string(),
        command: command.name(),
        notes: NOTES,
        sections,
        passed,
    })
}

fn run_one(c: Command, model: &Model, sa: &SuperAction, opts: Options) -> Result<Section> {
    let mut s = Section::new(c);
    match c {
        Command::Expand => expand(&mut s, sa)?,
        Command::Reduce => reduce(&mut s, model, sa)?,
        Command::Quantize => quantize_cmd(&mut s, sa)?,
        Command::Bigaction => bigaction(&mut s, model, sa, opts)?,
        Command::Dimcheck => dimcheck(&mut s, model, sa)?,
        Command::Lattice => lattice(&mut s, model)?,
        Command::Identities => {
            let replays = identity_replays(sa)?;
            let dims = model.dims.clone().with_superspace(sa.phase_space())?;
            s.verdicts.extend(replays);
            s.verdicts.extend(dimension_replays(&dims)?);
        }
        Command::All => unreachable!("expanded by run"),
    }
    Ok(s)
}

fn verdict(name: &str, anchor: &str, claim: String, computation: &str, engine: String, v: Verdict) -> IdentityVerdict {
    IdentityVerdict {
        name: name.into(),
        anchor: anchor.into(),
        claim,
        computation: computation.into(),
        engine,
        verdict: v,
        expected: Verdict::Match,
        note: None,
    }
}

fn expand(s: &mut Section, sa: &SuperAction) -> Result<()> {
    let mut fields = Vec::new();
    for f in sa.fields() {
        s.line(format!("Phi^{} = {}", f.coord(), f.element()));
        fields.push(json!({ "coordinate": f.coord().to_string(), "superfield": f.element().to_string() }));
    }
    s.line(format!("L(phi) = {}", sa.lagrangian()));
    s.line(format!("L(Phi) = {}", sa.integrand()));
    s.set("superfields", fields);
    s.set("integrand", sa.integrand().to_string());

    let recomputed = superfield_of_function(sa.lagrangian(), sa.fields())?;
    s.verdicts.push(verdict(
        "body of the superspace Lagrangian",
        "superfield expansion",
        format!("body(L(Phi)) = {}", sa.lagrangian()),
        "superfield_of_function, then body",
        recomputed.body().to_string(),
        Verdict::compare_scalar(sa.lagrangian(), &recomputed.body()),
    ));
    let third = third_order_term(sa.lagrangian(), sa.fields())?;
    s.verdicts.push(verdict(
        "Taylor series terminates",
        "superfield expansion",
        "third-order term vanishes".into(),
        "third_order_term",
        third.to_string(),
        Verdict::from_bool(third.is_zero()),
    ));
    Ok(())
}

fn reduce(s: &mut Section, model: &Model, sa: &SuperAction) -> Result<()> {
    let cpi = cpi_component_lagrangian(sa)?;
    s.line(format!("component Lagrangian: {cpi}"));
    s.set("component_lagrangian", cpi.to_string());
    let gens = sa.phase_space().generators();
    let body = GrassmannElement::scalar(gens, cpi.body());
    let claim = multiplier_sector(sa);
    s.verdicts.push(verdict(
        "multiplier sector",
        "classical generating functional",
        format!("λ-sector = {claim} up to a total time derivative"),
        "body of i∫dθ dθ̄ L(Phi), compared through the Euler operator",
        cpi.body().to_string(),
        compare_modulo_derivative(&GrassmannElement::scalar(gens, claim.clone()), &body, sa.phase_space())?,
    ));
    if let (Dynamics::Hamiltonian, Some(h)) = (model.dynamics, model.hamiltonian()) {
        let full = hamiltonian_component_lagrangian(sa.phase_space(), h)?;
        s.verdicts.push(verdict(
            "component Lagrangian with ghosts",
            "classical generating functional",
            format!("L̃ = {full} up to a total time derivative"),
            "i∫dθ dθ̄ L(Phi), compared through the Euler operator",
            cpi.to_string(),
            compare_modulo_derivative(&full, &cpi, sa.phase_space())?,
        ));
    }
    Ok(())
}

fn quantize_cmd(s: &mut Section, sa: &SuperAction) -> Result<()> {
    let q = quantize(sa)?;
    s.line(format!("exponent: (i/hbar) ∫dt ({})", sa.lagrangian()));
    s.line(format!("exponent density: {}", q.density));
    s.line(format!(
        "pairing: {}",
        q.pairing
            .map(|p| p.to_string())
            .unwrap_or_else(|| "none reproduces the target".into())
    ));
    s.line(format!("ghost-free: {}", if q.ghost_free { "yes" } else { "no" }));
    s.set("quantized", &q);

    s.verdicts.push(verdict(
        "quantized exponent",
        "quantum generating functional",
        format!("density = {}", q.target),
        "weight L(Phi) by the multiplier over hbar and integrate",
        q.density.to_string(),
        Verdict::compare_scalar(&q.target, &q.density),
    ));
    s.verdicts.push(verdict(
        "ghost cancellation",
        "quantum generating functional",
        "no ghost or multiplier survives".into(),
        "symbol scan of the exponent",
        if q.ghost_free { "ghost-free" } else { "ghosts remain" }.into(),
        Verdict::from_bool(q.ghost_free),
    ));

    // Multiplying by θθ̄ against inserting δ(θ̄)δ(θ) = θ̄θ.
    let gens = sa.phase_space().generators();
    let h: ScalarExpr = hbar().into();
    let tt = GrassmannElement::monomial(gens, &[THETA, THETA_BAR])?;
    let dd = GrassmannElement::monomial(gens, &[THETA_BAR, THETA])?;
    let a = reduce_with_multiplier(sa, &tt, InnerI::Replaced, &h)?;
    let b = reduce_with_multiplier(sa, &dd, InnerI::Replaced, &h)?;
    let mut v = verdict(
        "multiplier against delta pair",
        "small-action projection",
        format!("weighting by θθ̄ agrees with inserting δ(θ̄)δ(θ): {}", a.exponent),
        "reduce with theta thetabar and with delta(thetabar) delta(theta)",
        b.exponent.clone(),
        Verdict::compare(a.exponent_element(), b.exponent_element()),
    );
    if sa.lagrangian().is_zero() {
        v.note = Some("degenerate: both reductions vanish".into());
    } else {
        v.expected = Verdict::SignFlip;
        v.note = Some("the two formulations differ by the global sign −1".into());
    }
    s.verdicts.push(v);
    Ok(())
}

fn bigaction(s: &mut Section, model: &Model, sa: &SuperAction, opts: Options) -> Result<()> {
    let dims = model.dims.clone().with_superspace(sa.phase_space())?;
    let divisor = opts.divisor.expr();
    let la = large_action_insert(sa, &divisor, &dims)?;
    s.line(format!("insertion: {}", la.insertion));
    s.line(format!(
        "support: theta thetabar = {} -> {}",
        la.support.root,
        la.support
            .limit
            .as_ref()
            .map(|l| l.to_string())
            .unwrap_or_else(|| "no limit".into())
    ));
    if opts.eps_symbolic {
        s.line(format!("formal exponent (eps kept): {}", la.formal_exponent));
        s.set("formal_exponent", &la.formal_exponent);
    }
    s.line(format!("exponent density (eps -> 0): {}", la.density));
    s.set("insertion", &la.insertion);
    s.set("support", &la.support);
    s.set("density", la.density.to_string());
    s.set("divisor", opts.divisor);

    let report = projection_checks("model", sa, &divisor, &dims)?;
    s.verdicts.extend(report.verdicts);

    if let Some(ba) = &model.bigaction {
        let b = compute_b(&ba.mass_kg, &ba.age_s)?;
        s.line(format!("B = M c^2 T = {} J s (≈ {:e})", b.b, b.b_approx));
        s.line(format!("B/hbar ≈ {:e}", b.ratio_approx));
        s.set("big_action", &b);
    }
    Ok(())
}

fn dim_verdict(
    name: &str,
    claim: &str,
    computation: &str,
    result: Result<Dimension>,
    want: Dimension,
) -> Result<IdentityVerdict> {
    let (engine, v) = match result {
        Ok(d) => (d.to_string(), Verdict::from_bool(d == want)),
        Err(e @ Error::Inhomogeneous { .. }) => (e.to_string(), Verdict::Mismatch),
        Err(e) => return Err(e),
    };
    Ok(verdict(
        name,
        "dimensional analysis",
        claim.into(),
        computation,
        engine,
        v,
    ))
}

fn dimension_checks(dims: &DimensionAssignment, sa: &SuperAction) -> Result<Vec<IdentityVerdict>> {
    let one = Dimension::dimensionless();
    let mut out = dimension_replays(dims)?;
    let l = dims.infer(sa.lagrangian());
    out.push(dim_verdict(
        "Lagrangian",
        "L has the dimension of an energy",
        "infer_dims(L)",
        l.clone(),
        Dimension::energy(),
    )?);
    let lphi = dims.infer_grassmann(sa.integrand());
    out.push(dim_verdict(
        "superspace Lagrangian",
        "L(Phi) is homogeneous with the dimension of L",
        "infer_dims(L(Phi))",
        lphi.clone(),
        l.clone().unwrap_or_default(),
    )?);
    out.push(dim_verdict(
        "generating functional exponent",
        "∫dt dθ dθ̄ L(Phi) is dimensionless",
        "infer_dims over dt dtheta dthetabar",
        lphi.and_then(|d| dims.integral(&superspace_measure(), d)),
        one,
    )?);
    let cpi = cpi_component_lagrangian(sa)?;
    out.push(dim_verdict(
        "component action",
        "∫dt L̃ is dimensionless",
        "infer_dims(component Lagrangian) over dt",
        dims.infer_grassmann(&cpi)
            .and_then(|d| dims.integral(&[Measure::Time], d)),
        one,
    )?);
    let q = quantize(sa)?;
    out.push(dim_verdict(
        "quantized exponent",
        "(i/hbar) ∫dt L is dimensionless",
        "infer_dims(quantized density) over dt",
        dims.infer(&q.density).and_then(|d| dims.integral(&[Measure::Time], d)),
        one,
    )?);
    let la = large_action_insert(sa, &large_divisor().into(), dims)?;
    out.push(dim_verdict(
        "large-action exponent",
        "(i/B) ∫dt L is dimensionless",
        "infer_dims(large-action density) over dt",
        dims.infer(&la.density).and_then(|d| dims.integral(&[Measure::Time], d)),
        one,
    )?);
    Ok(out)
}

fn dimcheck(s: &mut Section, model: &Model, sa: &SuperAction) -> Result<()> {
    let base = model.dims.clone();
    let dims = base.clone().with_superspace(sa.phase_space())?;
    let mut table = Vec::new();
    for (k, d) in dims.entries() {
        table.push(json!({ "symbol": k, "dimension": d.to_string() }));
    }
    s.set("assignment", table);
    let checks = dimension_checks(&dims, sa)?;

    let mut split_verdicts = Vec::new();
    for (num, den) in [(1, 3), (1, 1), (0, 1)] {
        let alpha = Exponent::new(num, den);
        let alt = base.clone().with_theta_split(alpha).with_superspace(sa.phase_space())?;
        let other = dimension_checks(&alt, sa)?;
        let same = other
            .iter()
            .zip(&checks)
            .all(|(a, b)| a.verdict == b.verdict && a.engine == b.engine);
        split_verdicts.push(verdict(
            "split invariance",
            "dimensional analysis",
            format!("verdicts unchanged with dim(theta) = action^{alpha}"),
            "rerun every dimension check under the alternative split",
            if same { "unchanged" } else { "changed" }.into(),
            Verdict::from_bool(same),
        ));
    }
    s.verdicts.extend(checks);
    s.verdicts.extend(split_verdicts);
    Ok(())
}

const FREE_NS: [usize; 3] = [2, 4, 8];
const CONVERGENCE_NS: [usize; 6] = [8, 16, 32, 64, 128, 256];
const CLASSICAL_NS: [usize; 5] = [100, 200, 400, 800, 1600];

fn lattice(s: &mut Section, model: &Model) -> Result<()> {
    let (cfg, system) = match &model.lattice {
        Some(l) => (l.config.clone(), l.system),
        None => {
            s.line("no [lattice] section; using the default configuration");
            (LatticeConfig::default(), System::Harmonic)
        }
    };
    s.set("config", &cfg);
    s.set("system", system);

    let reference = free_kernel_exact(&cfg);
    let mut worst = 0.0f64;
    for n in FREE_NS {
        let k = qm_lattice_kernel(&cfg.with_steps(n), System::Free)?;
        worst = worst.max((k - reference).norm() / reference.norm());
    }
    s.line(format!(
        "free kernel: max relative error over N = {FREE_NS:?}: {worst:.3e}"
    ));
    s.set("free_rows", kernel_rows(&cfg, System::Free, &FREE_NS)?);
    s.verdicts.push(verdict(
        "free kernel",
        "quantum propagator",
        "finite-N kernel equals the closed form to 1e-12 relative".into(),
        "Gaussian recursion for N = 2, 4, 8",
        format!("{worst:.3e}"),
        Verdict::from_bool(worst < 1e-12),
    ));

    let norms = wavepacket_norms(&cfg, system, Wavepacket::gaussian(0.5, 0.7, 1.0))?;
    let drift = norms.iter().map(|n| (n - 1.0).abs()).fold(0.0, f64::max);
    s.verdicts.push(verdict(
        "unitarity",
        "quantum propagator",
        "every lattice step preserves the wavepacket norm".into(),
        "propagate a normalized Gaussian packet step by step",
        format!("{drift:.3e}"),
        Verdict::from_bool(drift < 1e-10),
    ));

    if system == System::Harmonic {
        let rows = kernel_rows(&cfg, System::Harmonic, &CONVERGENCE_NS)?;
        let pts: Vec<_> = rows.iter().map(|r| (cfg.t_total / r.n as f64, r.abs_error)).collect();
        let slope = loglog_slope(&pts).unwrap_or(f64::NAN);
        s.line(format!("oscillator kernel convergence slope: {slope:.3}"));
        s.set("harmonic_rows", &rows);
        s.verdicts.push(verdict(
            "oscillator convergence",
            "quantum propagator",
            "log-log slope of the kernel error is 2.0 ± 0.2".into(),
            "Gaussian recursion for N = 8..256 against the closed form",
            format!("{slope:.3}"),
            Verdict::from_bool((slope - 2.0).abs() <= 0.2),
        ));

        let rows = trajectory_rows(&cfg, System::Harmonic, &CLASSICAL_NS)?;
        let pts: Vec<_> = rows.iter().map(|r| (cfg.t_total / r.n as f64, r.abs_error)).collect();
        let slope = loglog_slope(&pts).unwrap_or(f64::NAN);
        s.line(format!("classical trajectory convergence slope: {slope:.3}"));
        s.set("classical_rows", &rows);
        s.verdicts.push(verdict(
            "classical trajectory",
            "classical generating functional",
            "forward-difference Hamilton equations converge at first order (slope 1.0 ± 0.2)".into(),
            "discrete trajectory against the cos/sin solution",
            format!("{slope:.3}"),
            Verdict::from_bool((slope - 1.0).abs() <= 0.2),
        ));

        let d = energy_drift(&cfg, 10_000)?;
        s.line(format!(
            "symplectic energy error: early {:.3e}, late {:.3e}",
            d.max_rel_early, d.max_rel_late
        ));
        s.set("energy_drift", &d);
        s.verdicts.push(verdict(
            "energy conservation",
            "classical generating functional",
            "symplectic update keeps the energy error bounded over 1e4 steps".into(),
            "compare early and late energy excursions",
            format!("{:.3e}", d.max_rel),
            Verdict::from_bool(d.is_bounded()),
        ));
    }
    Ok(())
}

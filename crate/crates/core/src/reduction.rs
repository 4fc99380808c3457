//! Reductions of the superspace action.
//!
//! The generating functional is `∫DΦ exp[i ∫dt dθ dθ̄ i L(Φ)]`. The engine
//! reads the inner `i` as part of the superspace density and the outer `i`
//! as the phase. Three reductions are provided:
//!
//! * the component Lagrangian `L̃ = i ∫dθ dθ̄ L(Φ)`, carrying multipliers and
//!   ghosts;
//! * the quantization map, which weights `L(Φ)` by a nilpotent multiplier
//!   divided by `ℏ` before the Berezin integral;
//! * the large-action insertion of `δ[(1/ε)(1 − θθ̄/ε)]`, whose support
//!   collapses onto `θθ̄ = 0` as `ε → 0`.
//!
//! The overall normalization of the functional is not tracked; every
//! reduction holds modulo a normalization constant.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;
use serde::Serialize;

use crate::dimensions::{Dimension, DimensionAssignment};
use crate::error::{Error, Result};
use crate::expr::{Bindings, ScalarExpr, Symbol, SymbolKind};
use crate::grassmann::{FormalFunction, GrassmannElement};
use crate::superspace::{
    antighost_name, ghost_name, multiplier_symbol, superfield_of_function, PhaseSpace, Superfield, MEASURE, THETA,
    THETA_BAR,
};

pub const NORMALIZATION_NOTE: &str = "all exponents hold modulo an overall normalization constant";

pub fn hbar() -> Symbol {
    Symbol::constant("hbar")
}

pub fn large_divisor() -> Symbol {
    Symbol::constant("B")
}

pub fn epsilon() -> Symbol {
    Symbol::constant("eps")
}

/// Superspace action built from a phase-space Lagrangian.
#[derive(Clone, Debug)]
pub struct SuperAction {
    phase_space: PhaseSpace,
    fields: Vec<Superfield>,
    lagrangian: ScalarExpr,
    integrand: GrassmannElement,
}

impl SuperAction {
    pub fn new(phase_space: PhaseSpace, lagrangian: ScalarExpr) -> Result<Self> {
        let fields = phase_space.superfields()?;
        let integrand = superfield_of_function(&lagrangian, &fields)?;
        debug_assert_eq!(integrand.body(), lagrangian);
        Ok(SuperAction {
            phase_space,
            fields,
            lagrangian,
            integrand,
        })
    }

    /// Action for the first-order Lagrangian `½ φᵃ ω_{ab} φ̇ᵇ − H`.
    pub fn from_hamiltonian(phase_space: PhaseSpace, hamiltonian: &ScalarExpr) -> Result<Self> {
        let l = phase_space.symplectic_lagrangian(hamiltonian);
        Self::new(phase_space, l)
    }

    pub fn phase_space(&self) -> &PhaseSpace {
        &self.phase_space
    }

    pub fn fields(&self) -> &[Superfield] {
        &self.fields
    }

    pub fn lagrangian(&self) -> &ScalarExpr {
        &self.lagrangian
    }

    /// `L(Φ)`.
    pub fn integrand(&self) -> &GrassmannElement {
        &self.integrand
    }

    fn element(&self, names: &[&str]) -> Result<GrassmannElement> {
        GrassmannElement::monomial(self.phase_space.generators(), names)
    }
}

/// `L̃ = i ∫dθ dθ̄ L(Φ)`, with multipliers and ghosts left in place.
pub fn cpi_component_lagrangian(sa: &SuperAction) -> Result<GrassmannElement> {
    Ok(sa.integrand.berezin_integrate(&MEASURE)?.scale(&ScalarExpr::imag()))
}

/// Order of the two Grassmann coordinates in the quantization multiplier.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MultiplierOrder {
    ThetaThetaBar,
    ThetaBarTheta,
}

impl MultiplierOrder {
    fn names(self) -> [&'static str; 2] {
        match self {
            MultiplierOrder::ThetaThetaBar => [THETA, THETA_BAR],
            MultiplierOrder::ThetaBarTheta => [THETA_BAR, THETA],
        }
    }
}

/// What happens to the inner `i` of the density when the multiplier is
/// applied.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InnerI {
    /// `i L(Φ)` becomes `i (m/ℏ) L(Φ)`.
    Kept,
    /// `i L(Φ)` becomes `(m/ℏ) L(Φ)`.
    Replaced,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Pairing {
    pub multiplier: MultiplierOrder,
    pub inner_i: InnerI,
}

impl Pairing {
    /// Candidates in the order they are tried. The first one uses the
    /// multiplier that is equivalent to `δ(θ̄)δ(θ)`.
    pub const CANDIDATES: [Pairing; 4] = [
        Pairing {
            multiplier: MultiplierOrder::ThetaBarTheta,
            inner_i: InnerI::Replaced,
        },
        Pairing {
            multiplier: MultiplierOrder::ThetaThetaBar,
            inner_i: InnerI::Replaced,
        },
        Pairing {
            multiplier: MultiplierOrder::ThetaBarTheta,
            inner_i: InnerI::Kept,
        },
        Pairing {
            multiplier: MultiplierOrder::ThetaThetaBar,
            inner_i: InnerI::Kept,
        },
    ];
}

impl fmt::Display for Pairing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = match self.multiplier {
            MultiplierOrder::ThetaThetaBar => "theta thetabar",
            MultiplierOrder::ThetaBarTheta => "thetabar theta",
        };
        match self.inner_i {
            InnerI::Kept => write!(f, "i*({m})/divisor, inner i kept"),
            InnerI::Replaced => write!(f, "({m})/divisor replaces inner i"),
        }
    }
}

/// Intermediate products of one multiplier reduction, kept so that two
/// reductions can be compared step by step.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReductionSteps {
    pub multiplier: String,
    pub weighted_integrand: String,
    pub berezin: String,
    pub exponent: String,
    #[serde(skip)]
    elements: Vec<GrassmannElement>,
}

impl ReductionSteps {
    pub fn exponent_element(&self) -> &GrassmannElement {
        self.elements.last().expect("steps are never empty")
    }

    fn substitute(&self, b: &Bindings) -> Result<Vec<GrassmannElement>> {
        self.elements
            .iter()
            .map(|e| e.try_map_coefficients(|c| c.substitute(b)))
            .collect()
    }
}

/// Apply `multiplier / divisor` to the density `L(Φ)` (with the inner `i`
/// treated per `inner_i`) and integrate: the exponent density per unit time.
pub fn reduce_with_multiplier(
    sa: &SuperAction,
    multiplier: &GrassmannElement,
    inner_i: InnerI,
    divisor: &ScalarExpr,
) -> Result<ReductionSteps> {
    let inv = divisor.recip()?;
    let mut weight = multiplier.scale(&inv);
    if inner_i == InnerI::Kept {
        weight = weight.scale(&ScalarExpr::imag());
    }
    let weighted = weight.gmul(&sa.integrand)?;
    let integrated = weighted.berezin_integrate(&MEASURE)?;
    let exponent = integrated.scale(&ScalarExpr::imag());
    Ok(ReductionSteps {
        multiplier: multiplier.to_string(),
        weighted_integrand: weighted.to_string(),
        berezin: integrated.to_string(),
        exponent: exponent.to_string(),
        elements: vec![multiplier.clone(), weighted, integrated, exponent],
    })
}

fn reduce_pairing(sa: &SuperAction, p: Pairing, divisor: &ScalarExpr) -> Result<ReductionSteps> {
    let m = sa.element(&p.multiplier.names())?;
    reduce_with_multiplier(sa, &m, p.inner_i, divisor)
}

/// Outcome of the quantization map.
#[derive(Clone, Debug, Serialize)]
pub struct Quantized {
    /// Exponent density: the functional is `exp(∫dt density)`.
    #[serde(serialize_with = "as_string")]
    pub density: ScalarExpr,
    #[serde(serialize_with = "as_string")]
    pub target: ScalarExpr,
    pub pairing: Option<Pairing>,
    pub matching: Vec<Pairing>,
    pub ghost_free: bool,
    pub steps: ReductionSteps,
}

fn as_string<T: fmt::Display, S: serde::Serializer>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// True when no ghost generator or multiplier survives.
pub fn is_ghost_free(e: &GrassmannElement) -> bool {
    e.is_scalar()
        && !e
            .body()
            .mentions(|s| s.kind() == SymbolKind::Auxiliary && s.name().starts_with("lambda_"))
}

/// Multiply `L(Φ)` by the nilpotent multiplier over `divisor`, integrate,
/// and select the pairing that lands on `(i/divisor) L(φ)`.
pub fn quantize_with(sa: &SuperAction, divisor: &ScalarExpr) -> Result<Quantized> {
    let target = ScalarExpr::imag().mul(&sa.lagrangian).div(divisor)?;
    let mut matching = Vec::new();
    let mut chosen: Option<(Pairing, ReductionSteps)> = None;
    for p in Pairing::CANDIDATES {
        let steps = reduce_pairing(sa, p, divisor)?;
        let e = steps.exponent_element();
        if e.is_scalar() && e.body() == target {
            matching.push(p);
            if chosen.is_none() {
                chosen = Some((p, steps));
            }
        }
    }
    let (pairing, steps) = match chosen {
        Some((p, s)) => (Some(p), s),
        None => (None, reduce_pairing(sa, Pairing::CANDIDATES[0], divisor)?),
    };
    let e = steps.exponent_element();
    Ok(Quantized {
        density: e.body(),
        target,
        pairing,
        matching,
        ghost_free: is_ghost_free(e),
        steps,
    })
}

pub fn quantize(sa: &SuperAction) -> Result<Quantized> {
    quantize_with(sa, &hbar().into())
}

/// Body-level root of a function of `s = θθ̄`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Support {
    #[serde(serialize_with = "as_string")]
    pub root: ScalarExpr,
    /// Root after `ε → 0`; `None` when the limit does not exist.
    #[serde(serialize_with = "opt_string")]
    pub limit: Option<ScalarExpr>,
}

fn opt_string<S: serde::Serializer>(v: &Option<ScalarExpr>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(e) => s.serialize_str(&e.to_string()),
        None => s.serialize_none(),
    }
}

/// Support of `δ(arg)` for an argument `α + β θθ̄`: the root `s* = −α/β`.
pub fn support_analysis(arg: &GrassmannElement) -> Result<Support> {
    if !arg.is_even() {
        return Err(Error::NotEven);
    }
    let pair = [THETA, THETA_BAR];
    let s = GrassmannElement::monomial(arg.generators(), &pair)?;
    let beta = arg.coefficient(&pair)?;
    let alpha = arg.body();
    let rest = arg
        .sub(&GrassmannElement::scalar(arg.generators(), alpha.clone()))?
        .sub(&s.scale(&beta))?;
    if !rest.is_zero() {
        return Err(Error::NoRoot(format!(
            "argument is not affine in theta thetabar: {arg}"
        )));
    }
    if beta.is_zero() {
        return Err(Error::NoRoot(format!(
            "argument does not depend on theta thetabar: {arg}"
        )));
    }
    let root = alpha.neg().div(&beta)?;
    let mut b = Bindings::new();
    b.insert(epsilon(), ScalarExpr::zero());
    let limit = root.substitute(&b).ok();
    Ok(Support { root, limit })
}

/// `(1/ε)(1 − θθ̄/ε)`, the inverse of the regularized pair `ε + θθ̄`.
pub fn regularized_inverse(sa: &SuperAction) -> Result<GrassmannElement> {
    let gens = sa.phase_space.generators();
    let shifted = GrassmannElement::scalar(gens, epsilon().into()).add(&sa.element(&[THETA, THETA_BAR])?)?;
    shifted.invert_even()
}

/// Result of the large-action insertion.
#[derive(Clone, Debug, Serialize)]
pub struct LargeAction {
    /// Formal expansion of `δ[(1/ε)(1 − θθ̄/ε)]`.
    pub insertion: String,
    pub support: Support,
    /// Exponent with the formal insertion in place of the multiplier, before
    /// the limit. It still carries `δ⁽ᵏ⁾(1/ε)` and ghost terms.
    pub formal_exponent: String,
    /// Exponent density after `ε → 0`.
    #[serde(serialize_with = "as_string")]
    pub density: ScalarExpr,
    pub ghost_free: bool,
    pub steps: ReductionSteps,
    /// The small-action reduction, step by step, maps onto this one under
    /// `ℏ → divisor`.
    pub steps_match_quantize: bool,
    #[serde(skip)]
    pub insertion_element: GrassmannElement,
}

/// Insert `δ[(1/ε)(1 − θθ̄/ε)] / divisor` in place of the quantization
/// multiplier. Once `ε → 0` the insertion is supported at `θθ̄ = 0`, the same
/// support as `δ(θ̄)δ(θ)`, so the limit reduces with that projector.
pub fn large_action_insert(sa: &SuperAction, divisor: &ScalarExpr, dims: &DimensionAssignment) -> Result<LargeAction> {
    let d = dims.infer(divisor)?;
    if d != Dimension::action() {
        return Err(Error::DivisorDimension(d.to_string()));
    }
    if divisor.is_zero() {
        return Err(Error::ZeroBody);
    }
    let arg = regularized_inverse(sa)?;
    let insertion = arg.expand_even_function(&FormalFunction::Delta)?;
    let support = support_analysis(&arg)?;

    let small = quantize(sa)?;
    let pairing = small.pairing.unwrap_or(Pairing::CANDIDATES[0]);
    let formal = reduce_with_multiplier(sa, &insertion, pairing.inner_i, divisor)?;

    let localized = support.limit.as_ref().map(|l| l.is_zero()).unwrap_or(false);
    if !localized {
        return Err(Error::NoRoot(format!(
            "insertion support does not collapse to zero: {}",
            support.root
        )));
    }
    let steps = reduce_pairing(sa, pairing, divisor)?;

    let mut swap = Bindings::new();
    swap.insert(hbar(), divisor.clone());
    let steps_match_quantize = small.steps.substitute(&swap)? == steps.elements;

    let e = steps.exponent_element();
    Ok(LargeAction {
        insertion: insertion.to_string(),
        support,
        formal_exponent: formal.exponent,
        density: e.body(),
        ghost_free: is_ghost_free(e),
        steps_match_quantize,
        steps,
        insertion_element: insertion,
    })
}

/// Euler operator residues of a density in all commuting fields and ghosts.
/// A density is a total time derivative exactly when every residue vanishes.
pub fn euler_residues(density: &GrassmannElement, ps: &PhaseSpace) -> Result<BTreeMap<String, GrassmannElement>> {
    let mut orders: BTreeMap<Symbol, u32> = BTreeMap::new();
    for (_, c) in density.terms() {
        for s in c.symbols() {
            if s.kind().is_time_dependent() {
                let slot = orders.entry(s.base()).or_insert(0);
                *slot = (*slot).max(s.dots());
            }
        }
    }
    let mut out = BTreeMap::new();
    for (base, top) in orders {
        let mut acc = GrassmannElement::zero(density.generators());
        for k in 0..=top {
            let v = base.with_dots(k);
            let mut t = density.map_coefficients(|c| c.differentiate(&v));
            for _ in 0..k {
                t = t.time_derivative()?;
            }
            acc = if k % 2 == 0 { acc.add(&t)? } else { acc.sub(&t)? };
        }
        out.insert(base.to_string(), acc);
    }
    for coord in ps.coords() {
        for chain in [
            (0..=2).map(|d| ghost_name(coord.name(), d)).collect::<Vec<_>>(),
            (0..=2).map(|d| antighost_name(coord.name(), d)).collect::<Vec<_>>(),
        ] {
            let mut acc = GrassmannElement::zero(density.generators());
            for (k, g) in chain.iter().enumerate() {
                let mut t = density.left_derivative(g)?;
                if t.is_zero() {
                    continue;
                }
                for _ in 0..k {
                    t = t.time_derivative()?;
                }
                acc = if k % 2 == 0 { acc.add(&t)? } else { acc.sub(&t)? };
            }
            out.insert(chain[0].clone(), acc);
        }
    }
    Ok(out)
}

pub fn is_total_time_derivative(density: &GrassmannElement, ps: &PhaseSpace) -> Result<bool> {
    Ok(euler_residues(density, ps)?.values().all(|r| r.is_zero()))
}

/// Euler-Lagrange expression `∂L/∂φ − d/dt ∂L/∂φ̇ + …` for one coordinate.
pub fn euler_lagrange(l: &ScalarExpr, coord: &Symbol) -> ScalarExpr {
    let top = l
        .symbols()
        .into_iter()
        .filter(|s| s.base() == *coord)
        .map(|s| s.dots())
        .max()
        .unwrap_or(0);
    let mut out = ScalarExpr::zero();
    for k in 0..=top {
        let mut t = l.differentiate(&coord.with_dots(k));
        for _ in 0..k {
            t = t.time_derivative();
        }
        out = if k % 2 == 0 { out.add(&t) } else { out.sub(&t) };
    }
    out
}

/// Multiplier sector implied by any Lagrangian: `−ω^{ab} λ_b E_a(L)`, equal
/// to the body of the component Lagrangian up to a total time derivative.
pub fn multiplier_sector(sa: &SuperAction) -> ScalarExpr {
    let ps = &sa.phase_space;
    let mut out = ScalarExpr::zero();
    for (a, ca) in ps.coords().iter().enumerate() {
        let e = euler_lagrange(&sa.lagrangian, ca);
        for (b, cb) in ps.coords().iter().enumerate() {
            let w = ps.omega(a, b);
            if w.is_zero() {
                continue;
            }
            let lam: ScalarExpr = multiplier_symbol(cb.name()).into();
            out = out.sub(&lam.mul(&e).scale(w));
        }
    }
    out
}

/// `λ_a(φ̇ᵃ − ω^{ab}∂_b H) + i c̄_a(ċᵃ − ω^{ac}∂_c∂_b H cᵇ)`.
pub fn hamiltonian_component_lagrangian(ps: &PhaseSpace, h: &ScalarExpr) -> Result<GrassmannElement> {
    let gens = ps.generators();
    let coords = ps.coords();
    let mut scalar = ScalarExpr::zero();
    let mut ghosts = GrassmannElement::zero(gens);
    for (a, ca) in coords.iter().enumerate() {
        let mut flow = ScalarExpr::symbol(ca.dot().expect("phase-space symbols depend on time"));
        for (b, cb) in coords.iter().enumerate() {
            flow = flow.sub(&h.differentiate(cb).scale(ps.omega(a, b)));
        }
        scalar = scalar.add(&ScalarExpr::symbol(multiplier_symbol(ca.name())).mul(&flow));

        let cbar = antighost_name(ca.name(), 0);
        let mut g = GrassmannElement::monomial(gens, &[&cbar, &ghost_name(ca.name(), 1)])?;
        for cb in coords {
            for (c, cc) in coords.iter().enumerate() {
                let w = ps.omega(a, c);
                if w.is_zero() {
                    continue;
                }
                let hess = h.differentiate(cc).differentiate(cb).scale(w);
                if hess.is_zero() {
                    continue;
                }
                let pair = GrassmannElement::monomial(gens, &[&cbar, &ghost_name(cb.name(), 0)])?;
                g = g.sub(&pair.scale(&hess))?;
            }
        }
        ghosts = ghosts.add(&g)?;
    }
    GrassmannElement::scalar(gens, scalar).add(&ghosts.scale(&ScalarExpr::imag()))
}

/// Compare two densities modulo total time derivatives.
pub fn compare_modulo_derivative(
    claim: &GrassmannElement,
    engine: &GrassmannElement,
    ps: &PhaseSpace,
) -> Result<Verdict> {
    if is_total_time_derivative(&engine.sub(claim)?, ps)? {
        Ok(Verdict::Match)
    } else if is_total_time_derivative(&engine.add(claim)?, ps)? {
        Ok(Verdict::SignFlip)
    } else {
        Ok(Verdict::Mismatch)
    }
}

/// Structural comparison between a claimed and a computed value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Match,
    SignFlip,
    Mismatch,
}

impl Verdict {
    pub fn compare(claim: &GrassmannElement, engine: &GrassmannElement) -> Verdict {
        if claim == engine {
            Verdict::Match
        } else if *claim == engine.neg() {
            Verdict::SignFlip
        } else {
            Verdict::Mismatch
        }
    }

    pub fn compare_scalar(claim: &ScalarExpr, engine: &ScalarExpr) -> Verdict {
        if claim == engine {
            Verdict::Match
        } else if *claim == engine.neg() {
            Verdict::SignFlip
        } else {
            Verdict::Mismatch
        }
    }

    pub fn from_bool(ok: bool) -> Verdict {
        if ok {
            Verdict::Match
        } else {
            Verdict::Mismatch
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Match => "match",
            Verdict::SignFlip => "sign-flip",
            Verdict::Mismatch => "mismatch",
        })
    }
}

/// One replayed identity. `expected` is the verdict the engine's fixed
/// conventions predict; an identity passes when the two agree.
#[derive(Clone, Debug, Serialize)]
pub struct IdentityVerdict {
    pub name: String,
    pub anchor: String,
    pub claim: String,
    pub computation: String,
    pub engine: String,
    pub verdict: Verdict,
    pub expected: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl IdentityVerdict {
    pub fn passed(&self) -> bool {
        self.verdict == self.expected
    }
}

struct VerdictBuilder<'a> {
    name: &'a str,
    anchor: &'a str,
    claim: String,
    computation: &'a str,
}

impl VerdictBuilder<'_> {
    fn grassmann(self, claim: &GrassmannElement, engine: &GrassmannElement, expected: Verdict) -> IdentityVerdict {
        self.finish(engine.to_string(), Verdict::compare(claim, engine), expected)
    }

    fn finish(self, engine: String, verdict: Verdict, expected: Verdict) -> IdentityVerdict {
        IdentityVerdict {
            name: self.name.into(),
            anchor: self.anchor.into(),
            claim: self.claim,
            computation: self.computation.into(),
            engine,
            verdict,
            expected,
            note: None,
        }
    }
}

fn with_note(mut v: IdentityVerdict, note: &str) -> IdentityVerdict {
    v.note = Some(note.into());
    v
}

/// Replay of the algebraic identities behind the two projections, on the
/// generator set of `sa`.
pub fn identity_replays(sa: &SuperAction) -> Result<Vec<IdentityVerdict>> {
    let gens = sa.phase_space.generators();
    let one = GrassmannElement::one(gens);
    let tt = sa.element(&[THETA, THETA_BAR])?;
    let delta_bar_delta = sa.element(&[THETA_BAR, THETA])?;
    let delta_delta_bar = tt.clone();
    let theta = sa.element(&[THETA])?;
    let theta_bar = sa.element(&[THETA_BAR])?;
    let mut out = Vec::new();

    out.push(
        VerdictBuilder {
            name: "delta pair normalization",
            anchor: "small-action projection",
            claim: "∫dθ dθ̄ δ(θ̄)δ(θ) = 1".into(),
            computation: "berezin_integrate(thetabar theta, [theta, thetabar])",
        }
        .grassmann(&one, &delta_bar_delta.berezin_integrate(&MEASURE)?, Verdict::Match),
    );
    out.push(with_note(
        VerdictBuilder {
            name: "multiplier equals delta pair",
            anchor: "small-action projection",
            claim: "θθ̄ = δ(θ̄)δ(θ)".into(),
            computation: "gmul(delta(thetabar), delta(theta))",
        }
        .grassmann(&tt, &delta_bar_delta, Verdict::SignFlip),
        "with δ(g) = g the two sides differ by the global sign −1",
    ));
    out.push(
        VerdictBuilder {
            name: "multiplier equals reversed delta pair",
            anchor: "large-action projection",
            claim: "θθ̄ = δ(θ)δ(θ̄)".into(),
            computation: "gmul(delta(theta), delta(thetabar))",
        }
        .grassmann(&tt, &delta_delta_bar, Verdict::Match),
    );
    out.push(
        VerdictBuilder {
            name: "delta orderings",
            anchor: "small- and large-action projections",
            claim: "δ(θ̄)δ(θ) = δ(θ)δ(θ̄)".into(),
            computation: "compare gmul(thetabar, theta) with gmul(theta, thetabar)",
        }
        .grassmann(&delta_bar_delta, &delta_delta_bar, Verdict::SignFlip),
    );
    out.push(
        VerdictBuilder {
            name: "delta product sifting step",
            anchor: "delta of the pair",
            claim: "δ(θ) ∂/∂θ δ(θθ̄) = δ(θ)θ̄, reading δ(θθ̄) as θθ̄".into(),
            computation: "gmul(theta, left_derivative(theta thetabar, theta))",
        }
        .grassmann(
            &theta.gmul(&theta_bar)?,
            &theta.gmul(&tt.left_derivative(THETA)?)?,
            Verdict::Match,
        ),
    );
    out.push(
        VerdictBuilder {
            name: "delta product chain",
            anchor: "delta of the pair",
            claim: "δ(θ)θ̄ = θθ̄".into(),
            computation: "gmul(theta, thetabar)",
        }
        .grassmann(&tt, &theta.gmul(&theta_bar)?, Verdict::Match),
    );
    let formal = tt.expand_even_function(&FormalFunction::Delta)?;
    out.push(with_note(
        VerdictBuilder {
            name: "formal delta of the pair",
            anchor: "delta of the pair",
            claim: "δ(θθ̄) = θθ̄".into(),
            computation: "expand_even_function(delta, theta thetabar)",
        }
        .grassmann(&tt, &formal, Verdict::Mismatch),
        "as an even function of a nilpotent argument δ(θθ̄) = δ(0) + δ⁽¹⁾(0)θθ̄; the chain holds only when δ(θθ̄) is read as a Grassmann delta",
    ));

    let inv = regularized_inverse(sa)?;
    let eps: ScalarExpr = epsilon().into();
    let inv_eps = eps.recip()?;
    let claim_inv = one.sub(&tt.scale(&inv_eps))?.scale(&inv_eps);
    out.push(
        VerdictBuilder {
            name: "regularized inverse",
            anchor: "large-action insertion",
            claim: "(ε + θθ̄)⁻¹ = (1/ε)(1 − θθ̄/ε)".into(),
            computation: "invert_even(eps + theta thetabar)",
        }
        .grassmann(&claim_inv, &inv, Verdict::Match),
    );
    let shifted = GrassmannElement::scalar(gens, eps.clone()).add(&tt)?;
    out.push(
        VerdictBuilder {
            name: "regularized inverse round trip",
            anchor: "large-action insertion",
            claim: "(ε + θθ̄)(ε + θθ̄)⁻¹ = 1".into(),
            computation: "gmul(eps + theta thetabar, invert_even(eps + theta thetabar))",
        }
        .grassmann(&one, &shifted.gmul(&inv)?, Verdict::Match),
    );
    let d0 = ScalarExpr::delta(0, inv_eps.clone())?;
    let d1 = ScalarExpr::delta(1, inv_eps.clone())?;
    let claim_ins = GrassmannElement::scalar(gens, d0).sub(&tt.scale(&d1.div(&eps.pow(2)?)?))?;
    out.push(
        VerdictBuilder {
            name: "inserted delta expansion",
            anchor: "large-action insertion",
            claim: "δ[(1/ε)(1 − θθ̄/ε)] = δ(1/ε) − δ⁽¹⁾(1/ε)θθ̄/ε²".into(),
            computation: "expand_even_function(delta, invert_even(eps + theta thetabar))",
        }
        .grassmann(
            &claim_ins,
            &inv.expand_even_function(&FormalFunction::Delta)?,
            Verdict::Match,
        ),
    );
    let support = support_analysis(&inv)?;
    let root_ok = support.root == eps;
    let limit_ok = support.limit.as_ref().map(|l| l.is_zero()).unwrap_or(false);
    out.push(
        VerdictBuilder {
            name: "insertion support",
            anchor: "large-action support",
            claim: "zero at θθ̄ = ε, and θθ̄ = 0 as ε → 0".into(),
            computation: "support_analysis(invert_even(eps + theta thetabar))",
        }
        .finish(
            format!(
                "root {}, limit {}",
                support.root,
                support
                    .limit
                    .as_ref()
                    .map(|l| l.to_string())
                    .unwrap_or_else(|| "none".into())
            ),
            Verdict::from_bool(root_ok && limit_ok),
            Verdict::Match,
        ),
    );
    Ok(out)
}

/// Dimension identities of the Grassmann coordinates and measure.
pub fn dimension_replays(dims: &DimensionAssignment) -> Result<Vec<IdentityVerdict>> {
    use crate::dimensions::Measure;
    let measure = dims.integral(
        &[Measure::Generator(THETA.into()), Measure::Generator(THETA_BAR.into())],
        Dimension::dimensionless(),
    )?;
    let pair = dims.theta_product()?;
    let check = |name: &str, claim: &str, computation: &str, d: Dimension, want: Dimension| IdentityVerdict {
        name: name.into(),
        anchor: "dimension of the Grassmann pair".into(),
        claim: claim.into(),
        computation: computation.into(),
        engine: d.to_string(),
        verdict: Verdict::from_bool(d == want),
        expected: Verdict::Match,
        note: None,
    };
    Ok(vec![
        check(
            "measure dimension",
            "dim(dθ dθ̄) = action⁻¹",
            "integral([dtheta, dthetabar], 1)",
            measure,
            Dimension::action().inverse(),
        ),
        check(
            "pair dimension",
            "dim(θ̄θ) = action",
            "dim(thetabar) + dim(theta)",
            pair,
            Dimension::action(),
        ),
    ])
}

/// Full comparison of the reductions of one Lagrangian.
#[derive(Clone, Debug, Serialize)]
pub struct ReductionReport {
    pub system: String,
    #[serde(serialize_with = "as_string")]
    pub lagrangian: ScalarExpr,
    pub component_lagrangian: String,
    #[serde(serialize_with = "as_string")]
    pub quantized_exponent: ScalarExpr,
    #[serde(serialize_with = "as_string")]
    pub large_action_exponent: ScalarExpr,
    pub pairing: Option<Pairing>,
    pub verdicts: Vec<IdentityVerdict>,
    pub normalization: &'static str,
}

impl ReductionReport {
    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(IdentityVerdict::passed)
    }
}

/// Run both projections on one Lagrangian and compare them with each other
/// and with the component Lagrangian, followed by the identity replays.
pub fn equivalence_check(
    system: &str,
    sa: &SuperAction,
    divisor: &ScalarExpr,
    dims: &DimensionAssignment,
) -> Result<ReductionReport> {
    let mut report = projection_checks(system, sa, divisor, dims)?;
    report.verdicts.extend(identity_replays(sa)?);
    report.verdicts.extend(dimension_replays(dims)?);
    Ok(report)
}

/// The projection verdicts of [`equivalence_check`] without the replays.
pub fn projection_checks(
    system: &str,
    sa: &SuperAction,
    divisor: &ScalarExpr,
    dims: &DimensionAssignment,
) -> Result<ReductionReport> {
    let cpi = cpi_component_lagrangian(sa)?;
    let small = quantize(sa)?;
    let large = large_action_insert(sa, divisor, dims)?;
    let degenerate = sa.lagrangian.is_zero();
    let mut verdicts = Vec::new();

    verdicts.push(IdentityVerdict {
        name: "quantized exponent".into(),
        anchor: "quantum generating functional".into(),
        claim: format!("exponent = (i/hbar) ∫dt ({})", sa.lagrangian),
        computation: "quantize: weight L(Φ) by the multiplier over hbar, integrate over theta and thetabar".into(),
        engine: small.density.to_string(),
        verdict: Verdict::compare_scalar(&small.target, &small.density),
        expected: Verdict::Match,
        note: small.pairing.map(|p| format!("pairing: {p}")),
    });
    verdicts.push(IdentityVerdict {
        name: "ghost cancellation".into(),
        anchor: "quantum generating functional".into(),
        claim: "no ghost or multiplier survives the quantization map".into(),
        computation: "symbol scan of the quantized exponent".into(),
        engine: if small.ghost_free {
            "ghost-free"
        } else {
            "ghosts remain"
        }
        .into(),
        verdict: Verdict::from_bool(small.ghost_free),
        expected: Verdict::Match,
        note: None,
    });

    let mut swap = Bindings::new();
    swap.insert(hbar(), divisor.clone());
    let swapped = small.density.substitute(&swap)?;
    verdicts.push(IdentityVerdict {
        name: "large-action exponent".into(),
        anchor: "large-action projection".into(),
        claim: "same exponent as for small action with hbar replaced by the divisor".into(),
        computation: "large_action_insert, then compare with quantize under hbar -> divisor".into(),
        engine: large.density.to_string(),
        verdict: Verdict::compare_scalar(&swapped, &large.density),
        expected: Verdict::Match,
        note: None,
    });
    verdicts.push(IdentityVerdict {
        name: "step-for-step replay".into(),
        anchor: "large-action projection".into(),
        claim: "every intermediate of the small-action reduction maps onto the large-action one".into(),
        computation: "compare multiplier, weighted integrand, Berezin integral and exponent after hbar -> divisor"
            .into(),
        engine: if large.steps_match_quantize {
            "identical"
        } else {
            "differs"
        }
        .into(),
        verdict: Verdict::from_bool(large.steps_match_quantize),
        expected: Verdict::Match,
        note: None,
    });
    let support_zero = large.support.limit.as_ref().map(|l| l.is_zero()).unwrap_or(false);
    verdicts.push(IdentityVerdict {
        name: "common support".into(),
        anchor: "large-action support".into(),
        claim: "both insertions are supported at θθ̄ = 0".into(),
        computation: "support_analysis of theta thetabar and of the regularized insertion".into(),
        engine: format!(
            "small-action root {}, large-action limit {}",
            support_analysis(&sa.element(&[THETA, THETA_BAR])?)?.root,
            large
                .support
                .limit
                .as_ref()
                .map(|l| l.to_string())
                .unwrap_or_else(|| "none".into())
        ),
        verdict: Verdict::from_bool(support_zero),
        expected: Verdict::Match,
        note: None,
    });
    let differs = !cpi.is_scalar() || (cpi.body() != small.density && cpi.body() != swapped);
    let mut classical = IdentityVerdict {
        name: "distinct from classical".into(),
        anchor: "classical generating functional".into(),
        claim: "the component Lagrangian differs from both reduced exponents".into(),
        computation: "structural comparison of cpi_component_lagrangian with the two exponents".into(),
        engine: cpi.to_string(),
        verdict: Verdict::from_bool(differs),
        expected: if degenerate { Verdict::Mismatch } else { Verdict::Match },
        note: None,
    };
    if degenerate {
        classical.note = Some("degenerate: all three exponents vanish for L = 0".into());
    }
    verdicts.push(classical);

    Ok(ReductionReport {
        system: system.into(),
        lagrangian: sa.lagrangian.clone(),
        component_lagrangian: cpi.to_string(),
        quantized_exponent: small.density,
        large_action_exponent: large.density,
        pairing: small.pairing,
        verdicts,
        normalization: NORMALIZATION_NOTE,
    })
}

/// One-dimensional test systems with `q`, `p`, `m` and `omega0`.
pub mod systems {
    use super::*;
    use crate::expr::{parse, SymbolTable};

    pub fn table() -> SymbolTable {
        let mut t = SymbolTable::new();
        for c in ["m", "omega0", "hbar", "B", "eps"] {
            t.declare(c, SymbolKind::Constant).expect("fresh table");
        }
        t.declare("q", SymbolKind::PhaseSpace).expect("fresh table");
        t.declare("p", SymbolKind::PhaseSpace).expect("fresh table");
        t
    }

    pub fn phase_space() -> PhaseSpace {
        PhaseSpace::canonical(vec![Symbol::phase("q"), Symbol::phase("p")]).expect("canonical plane")
    }

    pub fn free_particle() -> SuperAction {
        let l = parse("p*qdot - p^2/(2*m)", &table()).expect("valid");
        SuperAction::new(phase_space(), l).expect("valid")
    }

    pub fn harmonic_oscillator() -> SuperAction {
        let l = parse("p*qdot - p^2/(2*m) - m*omega0^2*q^2/2", &table()).expect("valid");
        SuperAction::new(phase_space(), l).expect("valid")
    }

    pub fn standard() -> Vec<(&'static str, SuperAction)> {
        vec![
            ("free particle", free_particle()),
            ("harmonic oscillator", harmonic_oscillator()),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::systems::*;
    use super::*;
    use crate::expr::parse;

    fn scalar(sa: &SuperAction, text: &str) -> GrassmannElement {
        GrassmannElement::scalar(sa.phase_space().generators(), parse(text, &lam_table()).unwrap())
    }

    fn lam_table() -> crate::SymbolTable {
        let mut t = table();
        t.declare("lambda_q", SymbolKind::Auxiliary).unwrap();
        t.declare("lambda_p", SymbolKind::Auxiliary).unwrap();
        t
    }

    #[test]
    fn harmonic_multiplier_sector() {
        let sa = harmonic_oscillator();
        let cpi = cpi_component_lagrangian(&sa).unwrap();
        let want = scalar(&sa, "lambda_q*(qdot - p/m) + lambda_p*(pdot + m*omega0^2*q)");
        let scalar_part = GrassmannElement::scalar(cpi.generators(), cpi.body());
        let diff = scalar_part.sub(&want).unwrap();
        assert!(is_total_time_derivative(&diff, sa.phase_space()).unwrap(), "{diff}");
        assert!(!diff.is_zero());
    }

    #[test]
    fn hamiltonian_claim_matches_engine() {
        let t = table();
        let h = parse("p^2/(2*m) + m*omega0^2*q^2/2", &t).unwrap();
        let sa = SuperAction::from_hamiltonian(phase_space(), &h).unwrap();
        let cpi = cpi_component_lagrangian(&sa).unwrap();
        let claim = hamiltonian_component_lagrangian(sa.phase_space(), &h).unwrap();
        assert_eq!(
            compare_modulo_derivative(&claim, &cpi, sa.phase_space()).unwrap(),
            Verdict::Match
        );
    }

    #[test]
    fn multiplier_sector_from_euler_lagrange() {
        for (_, sa) in standard() {
            let cpi = cpi_component_lagrangian(&sa).unwrap();
            let gens = sa.phase_space().generators();
            let body = GrassmannElement::scalar(gens, cpi.body());
            let claim = GrassmannElement::scalar(gens, multiplier_sector(&sa));
            assert_eq!(
                compare_modulo_derivative(&claim, &body, sa.phase_space()).unwrap(),
                Verdict::Match
            );
        }
    }

    #[test]
    fn free_symplectic_flow() {
        let sa = SuperAction::from_hamiltonian(phase_space(), &ScalarExpr::zero()).unwrap();
        let cpi = cpi_component_lagrangian(&sa).unwrap();
        let gens = sa.phase_space().generators();
        let mut want = scalar(&sa, "lambda_q*qdot + lambda_p*pdot");
        for c in ["q", "p"] {
            let g = GrassmannElement::monomial(gens, &[&antighost_name(c, 0), &ghost_name(c, 1)]).unwrap();
            want = want.add(&g.scale(&ScalarExpr::imag())).unwrap();
        }
        let diff = cpi.sub(&want).unwrap();
        assert!(is_total_time_derivative(&diff, sa.phase_space()).unwrap(), "{diff}");
    }

    #[test]
    fn euler_operator_detects_non_derivatives() {
        let sa = free_particle();
        let ps = sa.phase_space();
        let gens = ps.generators();
        let cc = GrassmannElement::monomial(gens, &["cbar_q", "c^q"]).unwrap();
        assert!(is_total_time_derivative(&cc.time_derivative().unwrap(), ps).unwrap());
        assert!(!is_total_time_derivative(&cc, ps).unwrap());
        let x = scalar(&sa, "p*lambda_q");
        assert!(is_total_time_derivative(&x.time_derivative().unwrap(), ps).unwrap());
        assert!(!is_total_time_derivative(&x, ps).unwrap());
    }

    #[test]
    fn constant_lagrangian_has_no_component() {
        let sa = SuperAction::new(phase_space(), ScalarExpr::integer(7)).unwrap();
        assert!(cpi_component_lagrangian(&sa).unwrap().is_zero());
        let q = quantize(&sa).unwrap();
        assert_eq!(
            q.density,
            ScalarExpr::imag()
                .scale(&crate::expr::int(7))
                .div(&hbar().into())
                .unwrap()
        );
    }

    #[test]
    fn quantize_selects_replacing_pairing() {
        let q = quantize(&free_particle()).unwrap();
        assert_eq!(q.pairing, Some(Pairing::CANDIDATES[0]));
        assert_eq!(q.matching.len(), 1);
        assert!(q.ghost_free);
        assert_eq!(q.density.to_string(), "i*p*qdot/hbar - i*p^2/(2*hbar*m)");
    }

    #[test]
    fn insertion_and_support() {
        let sa = harmonic_oscillator();
        let la = large_action_insert(&sa, &large_divisor().into(), &DimensionAssignment::standard()).unwrap();
        assert_eq!(la.insertion, "δ(1/eps) - δ⁽¹⁾(1/eps)/eps^2 * theta thetabar");
        assert_eq!(la.support.root, epsilon().into());
        assert_eq!(la.support.limit, Some(ScalarExpr::zero()));
        assert!(la.steps_match_quantize);
        assert!(la.formal_exponent.contains("δ⁽¹⁾(1/eps)"));
    }

    #[test]
    fn divisor_must_be_an_action() {
        let sa = free_particle();
        let err = large_action_insert(&sa, &Symbol::constant("m").into(), &DimensionAssignment::standard());
        assert!(matches!(err, Err(Error::DivisorDimension(_))));
    }

    #[test]
    fn trivial_supports() {
        let sa = free_particle();
        let gens = sa.phase_space().generators();
        let s = GrassmannElement::monomial(gens, &[THETA, THETA_BAR]).unwrap();
        assert!(support_analysis(&s).unwrap().root.is_zero());
        let a: ScalarExpr = Symbol::constant("a").into();
        let shifted = s.sub(&GrassmannElement::scalar(gens, a.clone())).unwrap();
        assert_eq!(support_analysis(&shifted).unwrap().root, a);
        let flat = GrassmannElement::scalar(gens, a);
        assert!(matches!(support_analysis(&flat), Err(Error::NoRoot(_))));
    }

    #[test]
    fn reports_pass_for_standard_systems() {
        let dims = DimensionAssignment::standard();
        for (name, sa) in standard() {
            let r = equivalence_check(name, &sa, &large_divisor().into(), &dims).unwrap();
            for v in &r.verdicts {
                assert!(v.passed(), "{name}: {v:?}");
            }
        }
        let zero = SuperAction::new(phase_space(), ScalarExpr::zero()).unwrap();
        let r = equivalence_check("zero", &zero, &large_divisor().into(), &dims).unwrap();
        assert!(r.passed());
        assert!(r.quantized_exponent.is_zero() && r.large_action_exponent.is_zero());
    }
}

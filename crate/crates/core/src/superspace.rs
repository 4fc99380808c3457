//! Superfields over a phase space.
//!
//! For phase-space coordinates `φᵃ` the superfield is
//! `Φᵃ = φᵃ + θ cᵃ + θ̄ ω^{ab} c̄_b + i θ̄θ ω^{ab} λ_b`, with `cᵃ`, `c̄ₐ`
//! anticommuting ghosts and `λₐ` commuting multipliers. Every piece of
//! `Φᵃ − φᵃ` carries a `θ` or a `θ̄`, so any product of three such pieces
//! vanishes and the Taylor series of a function of superfields stops at
//! second order.

use std::collections::BTreeSet;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::expr::{int, ScalarExpr, Symbol, SymbolKind};
use crate::grassmann::{GeneratorSet, GrassmannElement};

pub const THETA: &str = "theta";
pub const THETA_BAR: &str = "thetabar";

/// Berezin measure `∫dθ dθ̄`, written outermost first.
pub const MEASURE: [&str; 2] = [THETA, THETA_BAR];

/// Number of time derivatives of each ghost carried by the generator set.
const GHOST_DERIVATIVES: usize = 2;

fn dotted(prefix: &str, dots: usize, sep: &str, name: &str) -> String {
    format!(
        "{prefix}{}{sep}{name}",
        "d".repeat(dots.saturating_sub(1)) + if dots > 0 { "dot" } else { "" }
    )
}

/// Generator name of the ghost `cᵃ` differentiated `dots` times.
pub fn ghost_name(coord: &str, dots: usize) -> String {
    dotted("c", dots, "^", coord)
}

/// Generator name of the anti-ghost `c̄ₐ` differentiated `dots` times.
pub fn antighost_name(coord: &str, dots: usize) -> String {
    dotted("cbar", dots, "_", coord)
}

pub fn multiplier_symbol(coord: &str) -> Symbol {
    Symbol::aux(&format!("lambda_{coord}"))
}

type Matrix = Vec<Vec<BigRational>>;

fn invert(m: &Matrix) -> Option<Matrix> {
    let n = m.len();
    let mut a: Vec<Vec<BigRational>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| {
                if i == j {
                    BigRational::one()
                } else {
                    BigRational::zero()
                }
            }));
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        let inv = a[col][col].recip();
        for x in a[col].iter_mut() {
            *x *= &inv;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let k = a[r][col].clone();
                for c in 0..2 * n {
                    let v = &a[col][c] * &k;
                    a[r][c] -= v;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Phase space with its symplectic structure and the superspace algebra.
#[derive(Clone, Debug)]
pub struct PhaseSpace {
    coords: Vec<Symbol>,
    omega: Matrix,
    omega_inv: Matrix,
    gens: Arc<GeneratorSet>,
}

impl PhaseSpace {
    /// Canonical phase space: the first half of `coords` are positions, the
    /// second half their conjugate momenta, with `ω^{q p} = +1`.
    pub fn canonical(coords: Vec<Symbol>) -> Result<Self> {
        let dim = coords.len();
        if dim == 0 || dim % 2 != 0 {
            return Err(Error::Symplectic(format!(
                "phase space dimension must be even and positive, got {dim}"
            )));
        }
        let n = dim / 2;
        let mut omega = vec![vec![0i64; dim]; dim];
        for i in 0..n {
            omega[i][i + n] = 1;
            omega[i + n][i] = -1;
        }
        Self::with_omega(coords, &omega)
    }

    pub fn with_omega(coords: Vec<Symbol>, omega: &[Vec<i64>]) -> Result<Self> {
        let dim = coords.len();
        if omega.len() != dim || omega.iter().any(|r| r.len() != dim) {
            return Err(Error::Symplectic(format!("matrix must be {dim}x{dim}")));
        }
        for a in 0..dim {
            for b in 0..dim {
                if omega[a][b] != -omega[b][a] {
                    return Err(Error::Symplectic("matrix is not antisymmetric".into()));
                }
            }
        }
        let mut seen = BTreeSet::new();
        for c in &coords {
            if c.kind() != SymbolKind::PhaseSpace || c.dots() != 0 {
                return Err(Error::Symplectic(format!(
                    "`{c}` is not an undifferentiated phase-space symbol"
                )));
            }
            if !seen.insert(c.name().to_string()) {
                return Err(Error::Duplicate(c.name().to_string()));
            }
        }
        let omega: Matrix = omega.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect();
        let omega_inv = invert(&omega).ok_or_else(|| Error::Symplectic("matrix is singular".into()))?;

        let names: Vec<&str> = coords.iter().map(|c| c.name()).collect();
        let mut order = vec![THETA.to_string(), THETA_BAR.to_string()];
        for dots in 0..=GHOST_DERIVATIVES {
            order.extend(names.iter().map(|n| ghost_name(n, dots)));
            order.extend(names.iter().map(|n| antighost_name(n, dots)));
        }
        let chains: Vec<Vec<String>> = names
            .iter()
            .flat_map(|n| {
                [
                    (0..=GHOST_DERIVATIVES).map(|d| ghost_name(n, d)).collect(),
                    (0..=GHOST_DERIVATIVES).map(|d| antighost_name(n, d)).collect(),
                ]
            })
            .collect();
        let gens = GeneratorSet::with_time_chains(&[THETA.into(), THETA_BAR.into()], &chains, &order)?;
        Ok(PhaseSpace {
            coords,
            omega,
            omega_inv,
            gens,
        })
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Symbol] {
        &self.coords
    }

    pub fn generators(&self) -> &Arc<GeneratorSet> {
        &self.gens
    }

    /// `ω^{ab}`.
    pub fn omega(&self, a: usize, b: usize) -> &BigRational {
        &self.omega[a][b]
    }

    /// `ω_{ab}`, the inverse matrix.
    pub fn omega_lower(&self, a: usize, b: usize) -> &BigRational {
        &self.omega_inv[a][b]
    }

    pub fn multipliers(&self) -> Vec<Symbol> {
        self.coords.iter().map(|c| multiplier_symbol(c.name())).collect()
    }

    /// Names of every ghost and anti-ghost generator, all derivative orders.
    pub fn ghost_generators(&self) -> Vec<String> {
        self.gens
            .names()
            .filter(|n| *n != THETA && *n != THETA_BAR)
            .map(str::to_string)
            .collect()
    }

    pub fn superfield(&self, a: usize) -> Result<Superfield> {
        build_superfield(self, a)
    }

    pub fn superfields(&self) -> Result<Vec<Superfield>> {
        (0..self.dim()).map(|a| self.superfield(a)).collect()
    }

    /// First-order Lagrangian `½ φᵃ ω_{ab} φ̇ᵇ − H`.
    pub fn symplectic_lagrangian(&self, hamiltonian: &ScalarExpr) -> ScalarExpr {
        let half = BigRational::new(1.into(), 2.into());
        let mut kinetic = ScalarExpr::zero();
        for (a, fa) in self.coords.iter().enumerate() {
            for (b, fb) in self.coords.iter().enumerate() {
                let w = &self.omega_inv[a][b];
                if w.is_zero() {
                    continue;
                }
                let vel = fb.dot().expect("phase-space symbols depend on time");
                let t = ScalarExpr::symbol(fa.clone()).mul(&ScalarExpr::symbol(vel));
                kinetic = kinetic.add(&t.scale(&(w * &half)));
            }
        }
        kinetic.sub(hamiltonian)
    }
}

/// Superfield `Φᵃ` together with its components.
#[derive(Clone, Debug)]
pub struct Superfield {
    index: usize,
    coord: Symbol,
    element: GrassmannElement,
}

impl Superfield {
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn coord(&self) -> &Symbol {
        &self.coord
    }

    pub fn element(&self) -> &GrassmannElement {
        &self.element
    }

    /// `Nᵃ = Φᵃ − φᵃ`.
    pub fn soul(&self) -> GrassmannElement {
        self.element.soul()
    }

    pub fn time_derivative(&self) -> Result<GrassmannElement> {
        self.element.time_derivative()
    }
}

/// Assemble `Φᵃ` for the zero-based coordinate index `a`.
pub fn build_superfield(ps: &PhaseSpace, a: usize) -> Result<Superfield> {
    let dim = ps.dim();
    if a >= dim {
        return Err(Error::IndexOutOfRange { index: a, dim });
    }
    let gens = ps.generators();
    let coord = ps.coords[a].clone();
    let theta = GrassmannElement::generator(gens, THETA)?;
    let theta_bar = GrassmannElement::generator(gens, THETA_BAR)?;

    let mut phi = GrassmannElement::scalar(gens, coord.clone().into());
    phi = phi.add(&theta.gmul(&GrassmannElement::generator(gens, &ghost_name(coord.name(), 0))?)?)?;

    let mut cbar_mix = GrassmannElement::zero(gens);
    let mut lambda_mix = ScalarExpr::zero();
    for b in 0..dim {
        let w = ps.omega(a, b);
        if w.is_zero() {
            continue;
        }
        let name_b = ps.coords[b].name();
        let cbar = GrassmannElement::generator(gens, &antighost_name(name_b, 0))?;
        cbar_mix = cbar_mix.add(&cbar.scale(&ScalarExpr::rational(w.clone())))?;
        lambda_mix = lambda_mix.add(&ScalarExpr::symbol(multiplier_symbol(name_b)).scale(w));
    }
    phi = phi.add(&theta_bar.gmul(&cbar_mix)?)?;
    let top = theta_bar.gmul(&theta)?.scale(&ScalarExpr::imag().mul(&lambda_mix));
    phi = phi.add(&top)?;
    Ok(Superfield {
        index: a,
        coord,
        element: phi,
    })
}

/// Expansion variables of a function of superfields: each coordinate and its
/// velocity, paired with the nilpotent shift it receives.
fn expansion_variables(fields: &[Superfield]) -> Result<Vec<(Symbol, GrassmannElement)>> {
    let mut vars = Vec::with_capacity(2 * fields.len());
    for f in fields {
        vars.push((f.coord.clone(), f.soul()));
        let vel = f.coord.dot().expect("phase-space symbols depend on time");
        vars.push((vel, f.time_derivative()?.soul()));
    }
    Ok(vars)
}

fn check_field_symbols(f: &ScalarExpr, vars: &[(Symbol, GrassmannElement)]) -> Result<()> {
    for s in f.symbols() {
        let ok = matches!(s.kind(), SymbolKind::Constant | SymbolKind::Time) || vars.iter().any(|(v, _)| *v == s);
        if !ok {
            return Err(Error::UnknownFieldSymbol(s.to_string()));
        }
    }
    Ok(())
}

/// `F(Φ, Φ̇) = F + ∂ᵥF Nᵛ + ½ ∂ᵥ∂ᵤF Nᵛ Nᵘ`, summed over coordinates and
/// velocities.
pub fn superfield_of_function(f: &ScalarExpr, fields: &[Superfield]) -> Result<GrassmannElement> {
    let gens = fields
        .first()
        .map(|s| s.element.generators().clone())
        .ok_or_else(|| Error::Input("no superfields supplied".into()))?;
    let vars = expansion_variables(fields)?;
    check_field_symbols(f, &vars)?;

    let half = BigRational::new(1.into(), 2.into());
    let mut out = GrassmannElement::scalar(&gens, f.clone());
    for (i, (v, nv)) in vars.iter().enumerate() {
        let dv = f.differentiate(v);
        if dv.is_zero() {
            continue;
        }
        out = out.add(&nv.scale(&dv))?;
        for (u, nu) in &vars[i..] {
            let duv = dv.differentiate(u);
            if duv.is_zero() {
                continue;
            }
            // Off-diagonal pairs appear twice in the symmetric sum.
            let weight = if u == v { half.clone() } else { BigRational::one() };
            out = out.add(&nv.gmul(nu)?.scale(&duv.scale(&weight)))?;
        }
    }
    Ok(out)
}

/// Third-order Taylor term `⅙ ∂ᵥ∂ᵤ∂ₓF NᵛNᵘNˣ`; identically zero.
pub fn third_order_term(f: &ScalarExpr, fields: &[Superfield]) -> Result<GrassmannElement> {
    let gens = fields
        .first()
        .map(|s| s.element.generators().clone())
        .ok_or_else(|| Error::Input("no superfields supplied".into()))?;
    let vars = expansion_variables(fields)?;
    check_field_symbols(f, &vars)?;
    let sixth = BigRational::new(1.into(), 6.into());
    let mut out = GrassmannElement::zero(&gens);
    for (v, nv) in &vars {
        let dv = f.differentiate(v);
        for (u, nu) in &vars {
            let duv = dv.differentiate(u);
            let pair = nv.gmul(nu)?;
            for (x, nx) in &vars {
                let d3 = duv.differentiate(x);
                if d3.is_zero() {
                    continue;
                }
                out = out.add(&pair.gmul(nx)?.scale(&d3.scale(&sixth)))?;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ps() -> PhaseSpace {
        PhaseSpace::canonical(vec![Symbol::phase("q"), Symbol::phase("p")]).unwrap()
    }

    #[test]
    fn symplectic_structure() {
        let ps = ps();
        assert_eq!(ps.omega(0, 1), &int(1));
        assert_eq!(ps.omega(1, 0), &int(-1));
        assert_eq!(ps.omega_lower(0, 1), &int(-1));
        assert!(PhaseSpace::with_omega(ps.coords().to_vec(), &[vec![0, 1], vec![1, 0]]).is_err());
        assert!(PhaseSpace::with_omega(ps.coords().to_vec(), &[vec![0, 0], vec![0, 0]]).is_err());
    }

    #[test]
    fn position_superfield() {
        let phi = ps().superfield(0).unwrap();
        let e = phi.element();
        assert_eq!(e.body(), Symbol::phase("q").into());
        assert!(e.coefficient(&[THETA, "c^q"]).unwrap().is_one());
        assert!(e.coefficient(&[THETA_BAR, "cbar_p"]).unwrap().is_one());
        let lam: ScalarExpr = multiplier_symbol("p").into();
        assert_eq!(
            e.coefficient(&[THETA_BAR, THETA]).unwrap(),
            ScalarExpr::imag().mul(&lam)
        );
        assert_eq!(
            e.to_string(),
            "q - i*lambda_p * theta thetabar + 1 * theta c^q + 1 * thetabar cbar_p"
        );
    }

    #[test]
    fn momentum_superfield() {
        let phi = ps().superfield(1).unwrap();
        let e = phi.element();
        assert!(e.coefficient(&[THETA, "c^p"]).unwrap().is_one());
        assert_eq!(e.coefficient(&[THETA_BAR, "cbar_q"]).unwrap(), ScalarExpr::integer(-1));
        let lam: ScalarExpr = multiplier_symbol("q").into();
        assert_eq!(
            e.coefficient(&[THETA_BAR, THETA]).unwrap(),
            ScalarExpr::imag().mul(&lam).neg()
        );
    }

    #[test]
    fn index_out_of_range() {
        assert_eq!(
            ps().superfield(2).unwrap_err(),
            Error::IndexOutOfRange { index: 2, dim: 2 }
        );
    }

    #[test]
    fn time_derivative_of_position_superfield() {
        let d = ps().superfield(0).unwrap().time_derivative().unwrap();
        assert_eq!(
            d.to_string(),
            "qdot - i*lambda_pdot * theta thetabar + 1 * theta cdot^q + 1 * thetabar cbardot_p"
        );
    }

    #[test]
    fn linear_function_is_the_superfield() {
        let ps = ps();
        let fields = ps.superfields().unwrap();
        let f: ScalarExpr = Symbol::phase("q").into();
        assert_eq!(&superfield_of_function(&f, &fields).unwrap(), fields[0].element());
    }

    #[test]
    fn unknown_symbol_rejected() {
        let ps = ps();
        let fields = ps.superfields().unwrap();
        let f: ScalarExpr = Symbol::phase("x").into();
        assert!(matches!(
            superfield_of_function(&f, &fields),
            Err(Error::UnknownFieldSymbol(_))
        ));
    }
}

//! Dimensional analysis over mass (M), length (L) and time (T).
//!
//! Only the product `θθ̄` (an action) and the measure `dθ dθ̄` (an inverse
//! action) are physically constrained. The split of the action between `θ`
//! and `θ̄` is a representational choice; ghost and multiplier dimensions
//! are derived from it so that every superfield is homogeneous.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{Atom, ScalarExpr};
use crate::grassmann::GrassmannElement;
use crate::superspace::{antighost_name, ghost_name, multiplier_symbol, PhaseSpace, THETA, THETA_BAR};

/// Rational exponent of a base dimension.
pub type Exponent = Rational64;

/// Rational exponents of M, L and T.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Dimension {
    pub mass: Rational64,
    pub length: Rational64,
    pub time: Rational64,
}

impl Dimension {
    pub const fn new(mass: i64, length: i64, time: i64) -> Self {
        Dimension {
            mass: Rational64::new_raw(mass, 1),
            length: Rational64::new_raw(length, 1),
            time: Rational64::new_raw(time, 1),
        }
    }

    pub fn dimensionless() -> Self {
        Self::default()
    }

    pub fn action() -> Self {
        Self::new(1, 2, -1)
    }

    pub fn energy() -> Self {
        Self::new(1, 2, -2)
    }

    pub fn time() -> Self {
        Self::new(0, 0, 1)
    }

    pub fn is_dimensionless(&self) -> bool {
        self.mass.is_zero() && self.length.is_zero() && self.time.is_zero()
    }

    pub fn scale(&self, k: Rational64) -> Self {
        Dimension {
            mass: self.mass * k,
            length: self.length * k,
            time: self.time * k,
        }
    }

    pub fn inverse(&self) -> Self {
        self.scale(-Rational64::one())
    }
}

impl std::ops::Add for Dimension {
    type Output = Dimension;
    fn add(self, o: Dimension) -> Dimension {
        Dimension {
            mass: self.mass + o.mass,
            length: self.length + o.length,
            time: self.time + o.time,
        }
    }
}

impl std::ops::Sub for Dimension {
    type Output = Dimension;
    fn sub(self, o: Dimension) -> Dimension {
        self + o.inverse()
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_dimensionless() {
            return f.write_str("1");
        }
        let mut parts = Vec::new();
        for (base, e) in [("M", self.mass), ("L", self.length), ("T", self.time)] {
            if e.is_zero() {
                continue;
            }
            if e.is_one() {
                parts.push(base.to_string());
            } else {
                parts.push(format!("{base}^{e}"));
            }
        }
        f.write_str(&parts.join(" "))
    }
}

impl Serialize for Dimension {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl FromStr for Dimension {
    type Err = Error;

    /// Parses `M^a L^b T^c` with rational exponents; any factor may be
    /// omitted and `1` denotes a dimensionless quantity.
    fn from_str(s: &str) -> Result<Self> {
        let mut d = Dimension::dimensionless();
        for tok in s.split_whitespace() {
            if tok == "1" {
                continue;
            }
            let (base, exp) = match tok.split_once('^') {
                Some((b, e)) => (b, e),
                None => (tok, "1"),
            };
            let exp = crate::expr::parse_rational(exp)
                .and_then(|r| {
                    let n = i64::try_from(r.numer()).ok()?;
                    let dn = i64::try_from(r.denom()).ok()?;
                    Some(Rational64::new(n, dn))
                })
                .ok_or_else(|| Error::Input(format!("bad exponent in `{tok}`")))?;
            match base {
                "M" => d.mass += exp,
                "L" => d.length += exp,
                "T" => d.time += exp,
                _ => return Err(Error::Input(format!("unknown base dimension `{base}`"))),
            }
        }
        Ok(d)
    }
}

/// One factor of an integration measure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Measure {
    Time,
    /// Berezin differential `d g` of the named generator.
    Generator(String),
}

/// Dimensions of symbols, functions and generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DimensionAssignment {
    entries: BTreeMap<String, Dimension>,
}

impl Default for DimensionAssignment {
    fn default() -> Self {
        Self::standard()
    }
}

impl DimensionAssignment {
    pub fn empty() -> Self {
        DimensionAssignment {
            entries: BTreeMap::new(),
        }
    }

    /// Common names for one-dimensional mechanics, with `θ` and `θ̄` each
    /// carrying half an action.
    pub fn standard() -> Self {
        let mut a = Self::empty();
        let half = Rational64::new(1, 2);
        for (name, d) in [
            ("t", Dimension::time()),
            ("q", Dimension::new(0, 1, 0)),
            ("x", Dimension::new(0, 1, 0)),
            ("p", Dimension::new(1, 1, -1)),
            ("m", Dimension::new(1, 0, 0)),
            ("omega0", Dimension::new(0, 0, -1)),
            ("hbar", Dimension::action()),
            ("B", Dimension::action()),
            ("eps", Dimension::action()),
            ("H", Dimension::energy()),
            (THETA, Dimension::action().scale(half)),
            (THETA_BAR, Dimension::action().scale(half)),
        ] {
            a.set(name, d);
        }
        a
    }

    /// Give `θ` the dimension `action^alpha` and `θ̄` the remainder.
    pub fn with_theta_split(mut self, alpha: Rational64) -> Self {
        self.set(THETA, Dimension::action().scale(alpha));
        self.set(THETA_BAR, Dimension::action().scale(Rational64::one() - alpha));
        self
    }

    pub fn set(&mut self, name: &str, d: Dimension) {
        self.entries.insert(name.to_string(), d);
    }

    pub fn get(&self, name: &str) -> Result<Dimension> {
        self.entries
            .get(name)
            .copied()
            .ok_or_else(|| Error::Unassigned(name.to_string()))
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, &Dimension)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// Parse lines of the form `dim <name> M^a L^b T^c`.
    pub fn parse_lines(&mut self, text: &str) -> Result<()> {
        for (k, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            self.parse_line(line).map_err(|e| e.at(format!("line {}", k + 1)))?;
        }
        Ok(())
    }

    pub fn parse_line(&mut self, line: &str) -> Result<()> {
        let rest = line
            .strip_prefix("dim")
            .filter(|r| r.starts_with(char::is_whitespace))
            .ok_or_else(|| Error::Input(format!("expected `dim <symbol> M^a L^b T^c`, got `{line}`")))?;
        let rest = rest.trim_start();
        let (name, dims) = rest.split_once(char::is_whitespace).unwrap_or((rest, ""));
        if name.is_empty() {
            return Err(Error::Input("missing symbol name".into()));
        }
        self.set(name, dims.parse()?);
        Ok(())
    }

    /// `dim(θ) + dim(θ̄)`, the only combination the physics constrains.
    pub fn theta_product(&self) -> Result<Dimension> {
        Ok(self.get(THETA)? + self.get(THETA_BAR)?)
    }

    pub fn measure(&self, m: &Measure) -> Result<Dimension> {
        match m {
            Measure::Time => Ok(Dimension::time()),
            Measure::Generator(g) => Ok(self.get(g)?.inverse()),
        }
    }

    /// Extend with ghost, anti-ghost and multiplier dimensions implied by
    /// homogeneity of every superfield of `ps`.
    pub fn with_superspace(mut self, ps: &PhaseSpace) -> Result<Self> {
        let theta = self.get(THETA)?;
        let theta_bar = self.get(THETA_BAR)?;
        for (a, coord) in ps.coords().iter().enumerate() {
            let phi = self.get(coord.name())?;
            for dots in 0..=2 {
                let shift = Dimension::time().scale(Rational64::from_integer(dots as i64));
                self.set(&ghost_name(coord.name(), dots), phi - theta - shift);
            }
            for (b, partner) in ps.coords().iter().enumerate() {
                if ps.omega(a, b).is_zero() {
                    continue;
                }
                for dots in 0..=2 {
                    let shift = Dimension::time().scale(Rational64::from_integer(dots as i64));
                    self.set(&antighost_name(partner.name(), dots), phi - theta_bar - shift);
                }
                self.set(multiplier_symbol(partner.name()).name(), phi - theta - theta_bar);
            }
        }
        Ok(self)
    }

    fn atom(&self, a: &Atom) -> Result<Dimension> {
        match a {
            Atom::Sym(s) => {
                let base = self.get(s.name())?;
                Ok(base - Dimension::time().scale(Rational64::from_integer(s.dots() as i64)))
            }
            Atom::Imag => Ok(Dimension::dimensionless()),
            Atom::Func(app) if &*app.name == "exp" => {
                let d = self.infer(&app.args[0])?;
                if !d.is_dimensionless() {
                    return Err(Error::Input(format!("exp argument has dimension {d}")));
                }
                Ok(d)
            }
            Atom::Func(app) => {
                let mut d = self.get(&app.name)?;
                for k in &app.partials {
                    d = d - self.infer(&app.args[k - 1])?;
                }
                Ok(d)
            }
            Atom::Delta { order, arg } => {
                let d = self.infer(arg)?;
                Ok(d.scale(-Rational64::from_integer(*order as i64 + 1)))
            }
        }
    }

    fn poly(&self, e: &ScalarExpr, numerator: bool) -> Result<Option<Dimension>> {
        let p = if numerator { e.numerator() } else { e.denominator() };
        let mut seen: Option<(Dimension, String)> = None;
        for (m, _) in p.terms() {
            let mut d = Dimension::dimensionless();
            for (a, k) in &m.0 {
                d = d + self.atom(a)?.scale(Rational64::from_integer(*k as i64));
            }
            let label = ScalarExpr::from_monomial(m).to_string();
            match &seen {
                None => seen = Some((d, label)),
                Some((d0, l0)) if *d0 != d => {
                    return Err(Error::Inhomogeneous {
                        left: l0.clone(),
                        left_dim: d0.to_string(),
                        right: label,
                        right_dim: d.to_string(),
                    })
                }
                _ => {}
            }
        }
        Ok(seen.map(|(d, _)| d))
    }

    /// Dimension of a commuting expression. Zero is treated as dimensionless.
    pub fn infer(&self, e: &ScalarExpr) -> Result<Dimension> {
        let num = match self.poly(e, true)? {
            Some(d) => d,
            None => return Ok(Dimension::dimensionless()),
        };
        let den = self.poly(e, false)?.unwrap_or_default();
        Ok(num - den)
    }

    /// Dimension of a Grassmann element; every term must agree.
    pub fn infer_grassmann(&self, e: &GrassmannElement) -> Result<Dimension> {
        let gens = e.generators();
        let mut seen: Option<(Dimension, String)> = None;
        for (s, c) in e.terms() {
            let mut d = self.infer(c)?;
            let mut label = c.to_string();
            for k in 0..gens.len() {
                if s >> k & 1 == 1 {
                    d = d + self.get(gens.name(k))?;
                    label.push(' ');
                    label.push_str(gens.name(k));
                }
            }
            match &seen {
                None => seen = Some((d, label)),
                Some((d0, l0)) if *d0 != d => {
                    return Err(Error::Inhomogeneous {
                        left: l0.clone(),
                        left_dim: d0.to_string(),
                        right: label,
                        right_dim: d.to_string(),
                    })
                }
                _ => {}
            }
        }
        Ok(seen.map(|(d, _)| d).unwrap_or_default())
    }

    pub fn integral(&self, measure: &[Measure], integrand: Dimension) -> Result<Dimension> {
        measure.iter().try_fold(integrand, |acc, m| Ok(acc + self.measure(m)?))
    }
}

/// Outcome of a dimensionless check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DimensionVerdict {
    pub label: String,
    pub dimension: Dimension,
    pub dimensionless: bool,
}

/// Check that `prefactor · ∫ measure · integrand` is a pure number.
pub fn check_dimensionless(
    label: &str,
    prefactor: &ScalarExpr,
    measure: &[Measure],
    integrand: Dimension,
    dims: &DimensionAssignment,
) -> Result<DimensionVerdict> {
    let d = dims.integral(measure, integrand + dims.infer(prefactor)?)?;
    Ok(DimensionVerdict {
        label: label.to_string(),
        dimension: d,
        dimensionless: d.is_dimensionless(),
    })
}

/// Measure `dt dθ dθ̄`.
pub fn superspace_measure() -> Vec<Measure> {
    vec![
        Measure::Time,
        Measure::Generator(THETA.into()),
        Measure::Generator(THETA_BAR.into()),
    ]
}

//! Model files.
//!
//! ```text
//! # harmonic oscillator
//! const m
//! const omega0
//! var q
//! var p
//! hamiltonian: p^2/(2*m) + m*omega0^2*q^2/2
//! dim omega0 T^-1
//!
//! [lattice]
//! system = harmonic
//! steps = 64
//! t_total = 1
//!
//! [bigaction]
//! mass_kg = 1
//! age_s = 1
//! ```
//!
//! `var` declares phase-space coordinates: the first half are positions and
//! the second half their momenta. The dynamics is given either by
//! `lagrangian: <expr>` (a phase-space Lagrangian in the coordinates and
//! their velocities) or by `hamiltonian: <expr>`, which is turned into the
//! first-order Lagrangian `½ φᵃ ω_{ab} φ̇ᵇ − H`. A bare expression line is
//! read as a Lagrangian.

use std::path::Path;

use num_rational::BigRational;

use crate::dimensions::DimensionAssignment;
use crate::error::{Error, Result};
use crate::expr::{parse, ScalarExpr, SymbolKind, SymbolTable};
use crate::lattice::{parse_quantity, LatticeConfig, System};
use crate::reduction::SuperAction;
use crate::superspace::PhaseSpace;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dynamics {
    Lagrangian,
    Hamiltonian,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LatticeSection {
    pub config: LatticeConfig,
    pub system: System,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BigActionSection {
    pub mass_kg: BigRational,
    pub age_s: BigRational,
}

#[derive(Clone, Debug)]
pub struct Model {
    pub table: SymbolTable,
    pub dynamics: Dynamics,
    /// The expression as written: a Lagrangian or a Hamiltonian.
    pub expression: ScalarExpr,
    pub phase_space: PhaseSpace,
    pub dims: DimensionAssignment,
    pub lattice: Option<LatticeSection>,
    pub bigaction: Option<BigActionSection>,
}

#[derive(PartialEq)]
enum Section {
    Model,
    Lattice,
    BigAction,
}

fn located(line: usize) -> impl Fn(Error) -> Error {
    move |e| e.at(format!("line {line}"))
}

fn parse_float(value: &str, key: &str) -> Result<f64> {
    value
        .parse::<f64>()
        .map_err(|_| Error::Input(format!("`{key}` expects a number, got `{value}`")))
}

impl Model {
    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| e.at(path.display().to_string()))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut table = SymbolTable::new();
        let mut dims = DimensionAssignment::standard();
        let mut dynamics: Option<(Dynamics, ScalarExpr, usize)> = None;
        let mut section = Section::Model;
        let mut lattice: Option<(LatticeConfig, System)> = None;
        let mut mass: Option<BigRational> = None;
        let mut age: Option<BigRational> = None;
        let mut bigaction_seen = false;

        for (k, raw) in text.lines().enumerate() {
            let n = k + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if line.starts_with('[') {
                section = match line {
                    "[lattice]" => {
                        lattice.get_or_insert((LatticeConfig::default(), System::Harmonic));
                        Section::Lattice
                    }
                    "[bigaction]" => {
                        bigaction_seen = true;
                        Section::BigAction
                    }
                    _ => return Err(Error::Input(format!("unknown section `{line}`")).at(format!("line {n}"))),
                };
                continue;
            }
            match section {
                Section::Model => {
                    Self::model_line(line, n, &mut table, &mut dims, &mut dynamics)?;
                }
                Section::Lattice => {
                    let (key, value) = key_value(line).map_err(located(n))?;
                    let (cfg, system) = lattice.as_mut().expect("section opened");
                    let f = || parse_float(value, key).map_err(located(n));
                    match key {
                        "steps" => {
                            cfg.steps = value
                                .parse()
                                .map_err(|_| Error::Input(format!("`steps` expects a positive integer, got `{value}`")))
                                .map_err(located(n))?
                        }
                        "t_total" => cfg.t_total = f()?,
                        "m" => cfg.m = f()?,
                        "omega0" => cfg.omega0 = f()?,
                        "hbar" => cfg.hbar = f()?,
                        "x_i" => cfg.x_i = f()?,
                        "x_f" => cfg.x_f = f()?,
                        "q0" => cfg.q0 = f()?,
                        "p0" => cfg.p0 = f()?,
                        "system" => *system = value.parse().map_err(located(n))?,
                        _ => return Err(Error::Input(format!("unknown lattice key `{key}`")).at(format!("line {n}"))),
                    }
                }
                Section::BigAction => {
                    let (key, value) = key_value(line).map_err(located(n))?;
                    let v = parse_quantity(value).map_err(located(n))?;
                    match key {
                        "mass_kg" => mass = Some(v),
                        "age_s" => age = Some(v),
                        _ => return Err(Error::Input(format!("unknown bigaction key `{key}`")).at(format!("line {n}"))),
                    }
                }
            }
        }

        let (dynamics, expression, _) =
            dynamics.ok_or_else(|| Error::Input("model has no lagrangian or hamiltonian line".into()))?;
        let coords = table.symbols_of(SymbolKind::PhaseSpace);
        let phase_space = PhaseSpace::canonical(coords)?;
        if let Some((cfg, _)) = &lattice {
            cfg.validate().map_err(|e| e.at("[lattice]"))?;
        }
        let bigaction = match (bigaction_seen, mass, age) {
            (false, _, _) => None,
            (true, Some(mass_kg), Some(age_s)) => Some(BigActionSection { mass_kg, age_s }),
            _ => return Err(Error::Input("[bigaction] needs both mass_kg and age_s".into())),
        };
        Ok(Model {
            table,
            dynamics,
            expression,
            phase_space,
            dims,
            lattice: lattice.map(|(config, system)| LatticeSection { config, system }),
            bigaction,
        })
    }

    fn model_line(
        line: &str,
        n: usize,
        table: &mut SymbolTable,
        dims: &mut DimensionAssignment,
        dynamics: &mut Option<(Dynamics, ScalarExpr, usize)>,
    ) -> Result<()> {
        let mut words = line.split_whitespace();
        let head = words.next().unwrap_or("");
        let declare = |table: &mut SymbolTable, kind: SymbolKind, rest: Vec<&str>| -> Result<()> {
            if rest.is_empty() {
                return Err(Error::Input(format!("`{head}` needs at least one name")));
            }
            for name in rest {
                table.declare(name, kind)?;
            }
            Ok(())
        };
        let rest: Vec<&str> = words.collect();
        let result = match head {
            "const" => declare(table, SymbolKind::Constant, rest),
            "var" => declare(table, SymbolKind::PhaseSpace, rest),
            "aux" => declare(table, SymbolKind::Auxiliary, rest),
            "time" => declare(table, SymbolKind::Time, rest),
            "func" => match rest.as_slice() {
                [name, arity] => arity
                    .parse::<usize>()
                    .map_err(|_| Error::Input(format!("bad arity `{arity}`")))
                    .and_then(|a| table.declare_func(name, a)),
                _ => Err(Error::Input("expected `func <name> <arity>`".into())),
            },
            "dim" => dims.parse_line(line),
            _ => {
                let (kind, body) = if let Some(b) = line.strip_prefix("lagrangian:") {
                    (Dynamics::Lagrangian, b)
                } else if let Some(b) = line.strip_prefix("hamiltonian:") {
                    (Dynamics::Hamiltonian, b)
                } else {
                    (Dynamics::Lagrangian, line)
                };
                if let Some((_, _, first)) = dynamics {
                    return Err(
                        Error::Input(format!("second dynamics line; the first is on line {first}"))
                            .at(format!("line {n}")),
                    );
                }
                let e = parse(body.trim(), table).map_err(|e| shift_columns(e, line.len() - body.len(), n))?;
                *dynamics = Some((kind, e, n));
                Ok(())
            }
        };
        result.map_err(located(n))
    }

    pub fn super_action(&self) -> Result<SuperAction> {
        match self.dynamics {
            Dynamics::Lagrangian => SuperAction::new(self.phase_space.clone(), self.expression.clone()),
            Dynamics::Hamiltonian => SuperAction::from_hamiltonian(self.phase_space.clone(), &self.expression),
        }
    }

    pub fn hamiltonian(&self) -> Option<&ScalarExpr> {
        (self.dynamics == Dynamics::Hamiltonian).then_some(&self.expression)
    }
}

/// Re-anchor a single-line parse error to the model line.
fn shift_columns(e: Error, offset: usize, line: usize) -> Error {
    match e {
        Error::Syntax { column, message, .. } => Error::Syntax {
            line,
            column: column + offset + (offset > 0) as usize,
            message,
        },
        Error::Undeclared { name, column, .. } => Error::Undeclared {
            name,
            line,
            column: column + offset + (offset > 0) as usize,
        },
        other => other,
    }
}

fn key_value(line: &str) -> Result<(&str, &str)> {
    line.split_once('=')
        .map(|(k, v)| (k.trim(), v.trim()))
        .filter(|(k, v)| !k.is_empty() && !v.is_empty())
        .ok_or_else(|| Error::Input(format!("expected `key = value`, got `{line}`")))
}

#[cfg(test)]
mod tests {
    use super::*;

    const HARMONIC: &str = "\
# oscillator
const m
const omega0
var q
var p
hamiltonian: p^2/(2*m) + m*omega0^2*q^2/2

[lattice]
steps = 32
system = harmonic

[bigaction]
mass_kg = 1
age_s = 1
";

    #[test]
    fn parses_a_full_model() {
        let m = Model::parse(HARMONIC).unwrap();
        assert_eq!(m.dynamics, Dynamics::Hamiltonian);
        assert_eq!(m.phase_space.dim(), 2);
        let lat = m.lattice.unwrap();
        assert_eq!(lat.config.steps, 32);
        assert_eq!(lat.system, System::Harmonic);
        assert!(m.bigaction.is_some());
    }

    #[test]
    fn empty_model_is_an_input_error() {
        assert!(matches!(Model::parse(""), Err(Error::Input(_))));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = Model::parse("var q\nvar p\nlagrangian: p*qdot - z\n").unwrap_err();
        assert!(
            matches!(
                err,
                Error::Undeclared {
                    line: 3,
                    column: 22,
                    ..
                }
            ),
            "{err:?}"
        );
        let err = Model::parse("var q\nvar p\np*qdot\n[lattice]\nsteps = x\n").unwrap_err();
        assert!(err.to_string().starts_with("line 5"), "{err}");
    }

    #[test]
    fn odd_phase_space_rejected() {
        assert!(matches!(Model::parse("var q\nq\n"), Err(Error::Symplectic(_))));
    }

    #[test]
    fn bigaction_needs_both_inputs() {
        let err = Model::parse("var q\nvar p\np*qdot\n[bigaction]\nmass_kg = 2\n").unwrap_err();
        assert!(matches!(err, Error::Input(_)));
    }
}

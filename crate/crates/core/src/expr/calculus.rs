use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use num_traits::Zero;

use super::poly::Poly;
use super::{int, Atom, FuncApp, ScalarExpr, Symbol, SymbolKind};
use crate::error::{Error, Result};

/// Simultaneous substitution map.
pub type Bindings = BTreeMap<Symbol, ScalarExpr>;

impl ScalarExpr {
    /// Apply a derivation given its action on single atoms.
    fn derive(&self, rule: &impl Fn(&Atom) -> ScalarExpr) -> ScalarExpr {
        let d_num = derive_poly(&self.num, rule);
        if self.den.is_one() {
            return d_num;
        }
        let d_den = derive_poly(&self.den, rule);
        if d_den.is_zero() {
            let den = ScalarExpr::from_parts(self.den.clone(), Poly::one()).expect("nonzero");
            return d_num.div(&den).expect("nonzero denominator");
        }
        let num = ScalarExpr::from_parts(self.num.clone(), Poly::one()).expect("poly");
        let den = ScalarExpr::from_parts(self.den.clone(), Poly::one()).expect("poly");
        let top = &(&d_num * &den) - &(&num * &d_den);
        top.div(&(&den * &den)).expect("nonzero denominator")
    }

    /// Partial derivative with respect to `s` (which may carry time dots).
    pub fn differentiate(&self, s: &Symbol) -> ScalarExpr {
        self.derive(&|a: &Atom| match a {
            Atom::Sym(t) if t == s => ScalarExpr::one(),
            Atom::Sym(_) | Atom::Imag => ScalarExpr::zero(),
            Atom::Func(app) => chain_rule(app, |arg| arg.differentiate(s)),
            Atom::Delta { order, arg } => {
                let inner = arg.differentiate(s);
                if inner.is_zero() {
                    ScalarExpr::zero()
                } else {
                    &ScalarExpr::delta(order + 1, (**arg).clone()).expect("flat argument") * &inner
                }
            }
        })
    }

    /// Total derivative d/dt; time-dependent symbols gain a dot, constants
    /// are annihilated and the time symbol differentiates to one.
    pub fn time_derivative(&self) -> ScalarExpr {
        self.derive(&|a: &Atom| match a {
            Atom::Sym(t) => match (t.kind(), t.dot()) {
                (SymbolKind::Time, _) => ScalarExpr::one(),
                (_, Some(d)) => ScalarExpr::symbol(d),
                (_, None) => ScalarExpr::zero(),
            },
            Atom::Imag => ScalarExpr::zero(),
            Atom::Func(app) => chain_rule(app, |arg| arg.time_derivative()),
            Atom::Delta { order, arg } => {
                let inner = arg.time_derivative();
                if inner.is_zero() {
                    ScalarExpr::zero()
                } else {
                    &ScalarExpr::delta(order + 1, (**arg).clone()).expect("flat argument") * &inner
                }
            }
        })
    }

    /// Simultaneous substitution followed by canonicalization.
    pub fn substitute(&self, bindings: &Bindings) -> Result<ScalarExpr> {
        // `x -> x` is an identity, not a cycle.
        let effective: Bindings = bindings
            .iter()
            .filter(|(s, v)| **v != ScalarExpr::symbol((*s).clone()))
            .map(|(s, v)| (s.clone(), v.clone()))
            .collect();
        check_acyclic(&effective)?;
        self.substitute_unchecked(&effective)
    }

    fn substitute_unchecked(&self, bindings: &Bindings) -> Result<ScalarExpr> {
        let image = |a: &Atom| -> Result<ScalarExpr> {
            Ok(match a {
                Atom::Sym(s) => bindings
                    .get(s)
                    .cloned()
                    .unwrap_or_else(|| ScalarExpr::symbol(s.clone())),
                Atom::Imag => ScalarExpr::imag(),
                Atom::Func(app) => {
                    let args = app
                        .args
                        .iter()
                        .map(|x| x.substitute_unchecked(bindings))
                        .collect::<Result<Vec<_>>>()?;
                    ScalarExpr::func(&app.name, app.partials.clone(), args)
                }
                Atom::Delta { order, arg } => ScalarExpr::delta(*order, arg.substitute_unchecked(bindings)?)?,
            })
        };
        let num = eval_poly(&self.num, &image)?;
        let den = eval_poly(&self.den, &image)?;
        num.div(&den)
    }

    /// Exact evaluation at a rational point.
    pub fn eval_rational(&self, point: &BTreeMap<Symbol, BigRational>) -> Result<BigRational> {
        let value = |a: &Atom| -> Result<BigRational> {
            match a {
                Atom::Sym(s) => point.get(s).cloned().ok_or_else(|| Error::Unbound(s.to_string())),
                other => Err(Error::NotRational(ScalarExpr::atom(other.clone()).to_string())),
            }
        };
        let n = self.num.eval_with(value)?;
        let d = self.den.eval_with(value)?;
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(n / d)
    }
}

fn chain_rule(app: &FuncApp, inner: impl Fn(&ScalarExpr) -> ScalarExpr) -> ScalarExpr {
    let mut total = ScalarExpr::zero();
    for (j, arg) in app.args.iter().enumerate() {
        let d = inner(arg);
        if d.is_zero() {
            continue;
        }
        let mut partials = app.partials.clone();
        partials.push(j + 1);
        let node = ScalarExpr::func(&app.name, partials, app.args.clone());
        total = total.add(&node.mul(&d));
    }
    total
}

fn derive_poly(p: &Poly<Atom>, rule: &impl Fn(&Atom) -> ScalarExpr) -> ScalarExpr {
    let mut total = ScalarExpr::zero();
    for (m, c) in p.terms() {
        for (idx, (a, e)) in m.0.iter().enumerate() {
            let da = rule(a);
            if da.is_zero() {
                continue;
            }
            let mut rest = m.0.clone();
            if *e == 1 {
                rest.remove(idx);
            } else {
                rest[idx].1 -= 1;
            }
            let rest = ScalarExpr::from_monomial(&super::Monomial(rest));
            let k = c * int(*e as i64);
            total = total.add(&rest.mul(&da).scale(&k));
        }
    }
    total
}

fn eval_poly(p: &Poly<Atom>, image: &impl Fn(&Atom) -> Result<ScalarExpr>) -> Result<ScalarExpr> {
    let mut total = ScalarExpr::zero();
    for (m, c) in p.terms() {
        let mut t = ScalarExpr::rational(c.clone());
        for (a, e) in &m.0 {
            t = t.mul(&image(a)?.pow(*e as i32)?);
        }
        total = total.add(&t);
    }
    Ok(total)
}

fn check_acyclic(bindings: &Bindings) -> Result<()> {
    // Depth-first search over "bound symbol -> bound symbols in its image".
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Active,
        Done,
    }
    fn visit(s: &Symbol, bindings: &Bindings, marks: &mut BTreeMap<Symbol, Mark>) -> Result<()> {
        match marks.get(s) {
            Some(Mark::Done) => return Ok(()),
            Some(Mark::Active) => return Err(Error::CyclicBinding(s.to_string())),
            None => {}
        }
        marks.insert(s.clone(), Mark::Active);
        if let Some(img) = bindings.get(s) {
            let deps: BTreeSet<Symbol> = img.symbols();
            for d in deps.iter().filter(|d| bindings.contains_key(*d)) {
                visit(d, bindings, marks)?;
            }
        }
        marks.insert(s.clone(), Mark::Done);
        Ok(())
    }
    let mut marks = BTreeMap::new();
    for s in bindings.keys() {
        visit(s, bindings, &mut marks)?;
    }
    Ok(())
}

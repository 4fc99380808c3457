//! Commuting symbolic expressions.
//!
//! Every [`ScalarExpr`] is stored in canonical form: a reduced quotient of two
//! expanded polynomials over [`Atom`]s with exact rational coefficients. The
//! denominator is monic in lexicographic order, free of the imaginary unit,
//! and coprime to the numerator, so two expressions that agree as rational
//! functions are structurally identical.

mod calculus;
mod display;
mod parse;
pub mod poly;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use poly::{Monomial, Poly, Var};

pub use calculus::Bindings;
pub use parse::{parse, parse_rational, SymbolTable};

/// Role of a named symbol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymbolKind {
    Constant,
    PhaseSpace,
    Auxiliary,
    Time,
}

impl SymbolKind {
    pub fn is_time_dependent(self) -> bool {
        matches!(self, SymbolKind::PhaseSpace | SymbolKind::Auxiliary)
    }
}

/// A named symbol, optionally differentiated in time `dots` times.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol {
    name: Arc<str>,
    dots: u32,
    kind: SymbolKind,
}

impl Symbol {
    pub fn new(name: &str, kind: SymbolKind) -> Self {
        Symbol {
            name: Arc::from(name),
            dots: 0,
            kind,
        }
    }

    pub fn constant(name: &str) -> Self {
        Self::new(name, SymbolKind::Constant)
    }

    pub fn phase(name: &str) -> Self {
        Self::new(name, SymbolKind::PhaseSpace)
    }

    pub fn aux(name: &str) -> Self {
        Self::new(name, SymbolKind::Auxiliary)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dots(&self) -> u32 {
        self.dots
    }

    pub fn kind(&self) -> SymbolKind {
        self.kind
    }

    /// The symbol with its time-derivative order reset to zero.
    pub fn base(&self) -> Symbol {
        Symbol {
            dots: 0,
            ..self.clone()
        }
    }

    /// Time derivative, or `None` for symbols that do not depend on time.
    pub fn dot(&self) -> Option<Symbol> {
        self.kind.is_time_dependent().then(|| Symbol {
            dots: self.dots + 1,
            ..self.clone()
        })
    }

    pub fn with_dots(&self, dots: u32) -> Symbol {
        Symbol { dots, ..self.clone() }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        for _ in 0..self.dots {
            f.write_str("dot")?;
        }
        Ok(())
    }
}

/// Application of a formal function, possibly differentiated in its slots.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FuncApp {
    pub name: Arc<str>,
    /// One-based slot indices, sorted ascending.
    pub partials: Vec<usize>,
    pub args: Vec<ScalarExpr>,
}

/// Indivisible factor of a canonical monomial.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    Sym(Symbol),
    /// The imaginary unit, with `i^2 = -1` applied during multiplication.
    Imag,
    Func(FuncApp),
    /// `order`-th derivative of the formal Dirac distribution.
    Delta {
        order: u32,
        arg: Box<ScalarExpr>,
    },
}

impl Var for Atom {
    fn is_imaginary_unit(&self) -> bool {
        matches!(self, Atom::Imag)
    }
}

/// Canonical commuting expression.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ScalarExpr {
    num: Poly<Atom>,
    den: Poly<Atom>,
}

pub(crate) fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl ScalarExpr {
    pub fn zero() -> Self {
        ScalarExpr {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> Self {
        Self::rational(BigRational::one())
    }

    pub fn integer(n: i64) -> Self {
        Self::rational(int(n))
    }

    /// `n / d`; panics if `d == 0`.
    pub fn fraction(n: i64, d: i64) -> Self {
        assert!(d != 0, "zero denominator");
        Self::rational(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn rational(r: BigRational) -> Self {
        ScalarExpr {
            num: Poly::constant(r),
            den: Poly::one(),
        }
    }

    pub fn symbol(s: Symbol) -> Self {
        Self::atom(Atom::Sym(s))
    }

    pub fn imag() -> Self {
        Self::atom(Atom::Imag)
    }

    fn atom(a: Atom) -> Self {
        ScalarExpr {
            num: Poly::var(a),
            den: Poly::one(),
        }
    }

    /// Formal function application. `exp` is treated as self-derivative with
    /// `exp(0) = 1`.
    pub fn func(name: &str, partials: Vec<usize>, args: Vec<ScalarExpr>) -> Self {
        let mut partials = partials;
        if name == "exp" && args.len() == 1 {
            partials.clear();
            if args[0].is_zero() {
                return Self::one();
            }
        }
        partials.sort_unstable();
        Self::atom(Atom::Func(FuncApp {
            name: Arc::from(name),
            partials,
            args,
        }))
    }

    /// Formal `δ^(order)(arg)`; the argument may not contain a distribution.
    pub fn delta(order: u32, arg: ScalarExpr) -> Result<Self> {
        if arg.contains_delta() {
            return Err(Error::NestedDistribution(arg.to_string()));
        }
        Ok(Self::atom(Atom::Delta {
            order,
            arg: Box::new(arg),
        }))
    }

    pub(crate) fn from_parts(num: Poly<Atom>, den: Poly<Atom>) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::normalize(num, den))
    }

    fn normalize(mut num: Poly<Atom>, mut den: Poly<Atom>) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        if den.has_imaginary() {
            let conj = den.conjugate();
            num = num.mul(&conj);
            den = den.mul(&conj);
            if num.is_zero() {
                return Self::zero();
            }
        }
        if let Some(c) = den.as_constant() {
            return ScalarExpr {
                num: num.scale(&c.recip()),
                den: Poly::one(),
            };
        }
        if let Some((dm, dc)) = den.as_monomial() {
            let g = num.monomial_content().gcd(dm);
            let k = dc.recip();
            let den = Poly::term(dm.div(&g).expect("gcd divides"), BigRational::one());
            let num = num.div_monomial(&g).scale(&k);
            return ScalarExpr { num, den };
        }
        let (re, im) = num.split_imaginary();
        let g = re.gcd(&im).gcd(&den);
        if !g.is_one() {
            num = num.div_exact(&g).expect("gcd divides numerator");
            den = den.div_exact(&g).expect("gcd divides denominator");
        }
        let lc = den.leading().map(|(_, c)| c.clone()).expect("nonzero denominator");
        let k = lc.recip();
        ScalarExpr {
            num: num.scale(&k),
            den: den.scale(&k),
        }
    }

    pub fn numerator(&self) -> &Poly<Atom> {
        &self.num
    }

    pub fn denominator(&self) -> &Poly<Atom> {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num.is_one()
    }

    /// The value when the expression has no atoms at all.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.den.is_one() {
            self.num.as_constant()
        } else {
            None
        }
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.den == other.den {
            return Self::normalize(self.num.add(&other.num), self.den.clone());
        }
        if let (Some((a, ac)), Some((b, bc))) = (self.den.as_monomial(), other.den.as_monomial()) {
            if ac.is_one() && bc.is_one() {
                let l = a.lcm(b);
                let fa = l.div(a).expect("lcm");
                let fb = l.div(b).expect("lcm");
                let num = self
                    .num
                    .mul_term(&fa, &BigRational::one())
                    .add(&other.num.mul_term(&fb, &BigRational::one()));
                return Self::normalize(num, Poly::term(l, BigRational::one()));
            }
        }
        Self::normalize(
            self.num.mul(&other.den).add(&other.num.mul(&self.den)),
            self.den.mul(&other.den),
        )
    }

    pub fn neg(&self) -> Self {
        ScalarExpr {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        if self.den.is_one() && other.den.is_one() {
            return ScalarExpr {
                num: self.num.mul(&other.num),
                den: Poly::one(),
            };
        }
        Self::normalize(self.num.mul(&other.num), self.den.mul(&other.den))
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        ScalarExpr {
            num: self.num.scale(k),
            den: self.den.clone(),
        }
        .renormalized()
    }

    fn renormalized(self) -> Self {
        if self.num.is_zero() {
            Self::zero()
        } else {
            self
        }
    }

    pub fn recip(&self) -> Result<Self> {
        Self::from_parts(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.recip()?))
    }

    pub fn pow(&self, e: i32) -> Result<Self> {
        let base = if e < 0 { self.recip()? } else { self.clone() };
        let k = e.unsigned_abs();
        Ok(Self::normalize(base.num.pow(k), base.den.pow(k)))
    }

    pub fn sum<'a>(items: impl IntoIterator<Item = &'a ScalarExpr>) -> Self {
        items.into_iter().fold(Self::zero(), |acc, x| acc.add(x))
    }

    /// Visit every atom, including those nested in function and distribution
    /// arguments.
    pub fn visit_atoms(&self, f: &mut impl FnMut(&Atom)) {
        for p in [&self.num, &self.den] {
            for (m, _) in p.terms() {
                for (a, _) in &m.0 {
                    f(a);
                    match a {
                        Atom::Func(app) => app.args.iter().for_each(|x| x.visit_atoms(f)),
                        Atom::Delta { arg, .. } => arg.visit_atoms(f),
                        _ => {}
                    }
                }
            }
        }
    }

    pub fn symbols(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        self.visit_atoms(&mut |a| {
            if let Atom::Sym(s) = a {
                out.insert(s.clone());
            }
        });
        out
    }

    pub fn mentions(&self, pred: impl Fn(&Symbol) -> bool) -> bool {
        self.symbols().iter().any(pred)
    }

    pub fn contains_delta(&self) -> bool {
        let mut found = false;
        self.visit_atoms(&mut |a| found |= matches!(a, Atom::Delta { .. }));
        found
    }

    pub fn contains_imag(&self) -> bool {
        let mut found = false;
        self.visit_atoms(&mut |a| found |= matches!(a, Atom::Imag));
        found
    }

    /// Split a monomial-denominator expression into `(coefficient, expr)` per
    /// numerator term, each term already divided by the denominator.
    pub fn terms(&self) -> Vec<ScalarExpr> {
        self.num
            .terms()
            .map(|(m, c)| ScalarExpr::normalize(Poly::term(m.clone(), c.clone()), self.den.clone()))
            .collect()
    }

    pub(crate) fn from_monomial(m: &Monomial<Atom>) -> Self {
        ScalarExpr {
            num: Poly::term(m.clone(), BigRational::one()),
            den: Poly::one(),
        }
    }
}

impl From<Symbol> for ScalarExpr {
    fn from(s: Symbol) -> Self {
        ScalarExpr::symbol(s)
    }
}

impl From<i64> for ScalarExpr {
    fn from(n: i64) -> Self {
        ScalarExpr::integer(n)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $inner:ident) => {
        impl std::ops::$tr<&ScalarExpr> for &ScalarExpr {
            type Output = ScalarExpr;
            fn $method(self, rhs: &ScalarExpr) -> ScalarExpr {
                ScalarExpr::$inner(self, rhs)
            }
        }
        impl std::ops::$tr<ScalarExpr> for ScalarExpr {
            type Output = ScalarExpr;
            fn $method(self, rhs: ScalarExpr) -> ScalarExpr {
                ScalarExpr::$inner(&self, &rhs)
            }
        }
    };
}

forward_binop!(Add, add, add);
forward_binop!(Sub, sub, sub);
forward_binop!(Mul, mul, mul);

impl std::ops::Neg for ScalarExpr {
    type Output = ScalarExpr;
    fn neg(self) -> ScalarExpr {
        ScalarExpr::neg(&self)
    }
}

impl std::ops::Neg for &ScalarExpr {
    type Output = ScalarExpr;
    fn neg(self) -> ScalarExpr {
        ScalarExpr::neg(self)
    }
}

impl Zero for ScalarExpr {
    fn zero() -> Self {
        ScalarExpr::zero()
    }
    fn is_zero(&self) -> bool {
        ScalarExpr::is_zero(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> ScalarExpr {
        Symbol::phase("q").into()
    }
    fn p() -> ScalarExpr {
        Symbol::phase("p").into()
    }

    #[test]
    fn imaginary_unit_squares_to_minus_one() {
        let i = ScalarExpr::imag();
        assert_eq!(&i * &i, ScalarExpr::integer(-1));
        assert_eq!(i.recip().unwrap(), -ScalarExpr::imag());
    }

    #[test]
    fn rational_functions_reduce() {
        // (q^2 - p^2) / (q - p) = q + p
        let num = &q() * &q() - &p() * &p();
        let den = &q() - &p();
        assert_eq!(num.div(&den).unwrap(), &q() + &p());
        // q / (2 q) = 1/2
        assert_eq!(
            q().div(&(&ScalarExpr::integer(2) * &q())).unwrap(),
            ScalarExpr::fraction(1, 2)
        );
    }

    #[test]
    fn complex_denominator_is_rationalized() {
        // 1/(q + i) = (q - i)/(q^2 + 1)
        let lhs = ScalarExpr::one().div(&(&q() + &ScalarExpr::imag())).unwrap();
        let rhs = (&q() - &ScalarExpr::imag())
            .div(&(&q() * &q() + ScalarExpr::one()))
            .unwrap();
        assert_eq!(lhs, rhs);
        assert!(!lhs.denominator().has_imaginary());
    }

    #[test]
    fn division_by_zero_is_an_error() {
        assert_eq!(ScalarExpr::one().div(&(&q() - &q())), Err(Error::DivisionByZero));
    }

    #[test]
    fn nested_delta_rejected() {
        let inner = ScalarExpr::delta(0, q()).unwrap();
        assert!(matches!(ScalarExpr::delta(1, inner), Err(Error::NestedDistribution(_))));
    }

    #[test]
    fn exp_of_zero_is_one() {
        assert!(ScalarExpr::func("exp", vec![], vec![ScalarExpr::zero()]).is_one());
    }
}

//! Finite exterior algebra over named anticommuting generators.
//!
//! Elements are sums of ordered generator monomials with [`ScalarExpr`]
//! coefficients. Monomials are stored as bit masks over the generator set;
//! a set bit `k` means generator `k` is present, and the product is always
//! read in ascending generator order. Signs from reordering are absorbed
//! into the coefficients.
//!
//! Derivatives and Berezin integrals act from the left. The measure
//! `∫dθ dθ̄` is applied innermost first, i.e. `∂/∂θ̄` then `∂/∂θ`, which
//! gives `∫dθ dθ̄ θ̄θ = 1`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::expr::ScalarExpr;

/// Upper bound on the number of generators in one algebra.
pub const MAX_GENERATORS: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
struct GeneratorInfo {
    name: String,
    time_dependent: bool,
    derivative: Option<usize>,
}

/// Ordered, immutable list of anticommuting generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorSet {
    gens: Vec<GeneratorInfo>,
    index: BTreeMap<String, usize>,
}

impl GeneratorSet {
    /// Time-independent generators in the given canonical order.
    pub fn new(names: &[&str]) -> Result<Arc<Self>> {
        Self::build(names.iter().map(|n| (n.to_string(), false, None)).collect())
    }

    /// Generators with time dependence; `chains` lists each time-dependent
    /// generator followed by its successive time derivatives.
    pub fn with_time_chains(constant: &[String], chains: &[Vec<String>], order: &[String]) -> Result<Arc<Self>> {
        let mut roles: BTreeMap<&str, (bool, Option<String>)> = BTreeMap::new();
        for n in constant {
            roles.insert(n, (false, None));
        }
        for chain in chains {
            for (k, n) in chain.iter().enumerate() {
                roles.insert(n, (true, chain.get(k + 1).cloned()));
            }
        }
        let entries = order
            .iter()
            .map(|n| {
                let (td, d) = roles
                    .get(n.as_str())
                    .cloned()
                    .ok_or_else(|| Error::UnknownGenerator(n.clone()))?;
                Ok((n.clone(), td, d))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::build_named(entries)
    }

    fn build(entries: Vec<(String, bool, Option<usize>)>) -> Result<Arc<Self>> {
        if entries.len() > MAX_GENERATORS {
            return Err(Error::Input(format!("at most {MAX_GENERATORS} generators supported")));
        }
        let mut index = BTreeMap::new();
        let mut gens = Vec::with_capacity(entries.len());
        for (k, (name, time_dependent, derivative)) in entries.into_iter().enumerate() {
            if index.insert(name.clone(), k).is_some() {
                return Err(Error::Duplicate(name));
            }
            gens.push(GeneratorInfo {
                name,
                time_dependent,
                derivative,
            });
        }
        Ok(Arc::new(GeneratorSet { gens, index }))
    }

    fn build_named(entries: Vec<(String, bool, Option<String>)>) -> Result<Arc<Self>> {
        let positions: BTreeMap<String, usize> = entries.iter().enumerate().map(|(k, e)| (e.0.clone(), k)).collect();
        let resolved = entries
            .into_iter()
            .map(|(n, td, d)| {
                let d = match d {
                    Some(d) => Some(*positions.get(&d).ok_or(Error::UnknownGenerator(d))?),
                    None => None,
                };
                Ok((n, td, d))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::build(resolved)
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn name(&self, k: usize) -> &str {
        &self.gens[k].name
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.gens.iter().map(|g| g.name.as_str())
    }

    pub fn position(&self, name: &str) -> Result<usize> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownGenerator(name.to_string()))
    }
}

/// Bit mask over a [`GeneratorSet`].
pub type Subset = u64;

fn subset_indices(s: Subset) -> impl Iterator<Item = usize> {
    (0..MAX_GENERATORS).filter(move |k| s >> k & 1 == 1)
}

/// Sign of `a * b` for disjoint ascending monomials `a`, `b`.
fn reorder_negates(a: Subset, b: Subset) -> bool {
    let mut swaps = 0u32;
    for k in subset_indices(b) {
        swaps += (a >> k >> 1).count_ones();
    }
    swaps % 2 == 1
}

fn subset_order(a: &Subset, b: &Subset) -> std::cmp::Ordering {
    a.count_ones()
        .cmp(&b.count_ones())
        .then_with(|| subset_indices(*a).cmp(subset_indices(*b)))
}

/// Element of the exterior algebra with commuting scalar coefficients.
#[derive(Clone, PartialEq, Eq)]
pub struct GrassmannElement {
    gens: Arc<GeneratorSet>,
    terms: BTreeMap<Subset, ScalarExpr>,
}

impl GrassmannElement {
    pub fn zero(gens: &Arc<GeneratorSet>) -> Self {
        GrassmannElement {
            gens: gens.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn scalar(gens: &Arc<GeneratorSet>, c: ScalarExpr) -> Self {
        Self::term(gens, 0, c)
    }

    pub fn one(gens: &Arc<GeneratorSet>) -> Self {
        Self::scalar(gens, ScalarExpr::one())
    }

    pub fn term(gens: &Arc<GeneratorSet>, subset: Subset, c: ScalarExpr) -> Self {
        let mut e = Self::zero(gens);
        e.add_term(subset, c);
        e
    }

    pub fn generator(gens: &Arc<GeneratorSet>, name: &str) -> Result<Self> {
        let k = gens.position(name)?;
        Ok(Self::term(gens, 1 << k, ScalarExpr::one()))
    }

    /// Product of the named generators in the order written.
    pub fn monomial(gens: &Arc<GeneratorSet>, names: &[&str]) -> Result<Self> {
        names
            .iter()
            .try_fold(Self::one(gens), |acc, n| acc.gmul(&Self::generator(gens, n)?))
    }

    pub fn generators(&self) -> &Arc<GeneratorSet> {
        &self.gens
    }

    fn add_term(&mut self, s: Subset, c: ScalarExpr) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(s) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get().add(&c);
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    /// Stored `(subset, coefficient)` pairs in canonical display order.
    pub fn terms(&self) -> Vec<(Subset, &ScalarExpr)> {
        let mut v: Vec<_> = self.terms.iter().map(|(s, c)| (*s, c)).collect();
        v.sort_by(|a, b| subset_order(&a.0, &b.0));
        v
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn body(&self) -> ScalarExpr {
        self.terms.get(&0).cloned().unwrap_or_else(ScalarExpr::zero)
    }

    pub fn soul(&self) -> Self {
        let mut s = self.clone();
        s.terms.remove(&0);
        s
    }

    /// Whether no generators appear, i.e. the element is a pure scalar.
    pub fn is_scalar(&self) -> bool {
        self.terms.keys().all(|s| *s == 0)
    }

    /// Coefficient of the product of `names` taken in the order written.
    pub fn coefficient(&self, names: &[&str]) -> Result<ScalarExpr> {
        let basis = Self::monomial(&self.gens, names)?;
        let (s, sign) = match basis.terms.iter().next() {
            Some((s, c)) => (*s, c.clone()),
            None => return Ok(ScalarExpr::zero()),
        };
        Ok(self
            .terms
            .get(&s)
            .map(|c| c.mul(&sign))
            .unwrap_or_else(ScalarExpr::zero))
    }

    pub fn parity(&self) -> Option<u32> {
        let mut it = self.terms.keys().map(|s| s.count_ones() % 2);
        let first = it.next()?;
        it.all(|p| p == first).then_some(first)
    }

    pub fn is_even(&self) -> bool {
        self.terms.keys().all(|s| s.count_ones() % 2 == 0)
    }

    pub fn is_odd(&self) -> bool {
        self.terms.keys().all(|s| s.count_ones() % 2 == 1)
    }

    pub fn contains_generator(&self, name: &str) -> bool {
        match self.gens.position(name) {
            Ok(k) => self.terms.keys().any(|s| s >> k & 1 == 1),
            Err(_) => false,
        }
    }

    fn same_algebra(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.gens, &other.gens) || self.gens == other.gens {
            Ok(())
        } else {
            Err(Error::GeneratorMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_algebra(other)?;
        let mut out = self.clone();
        for (s, c) in &other.terms {
            out.add_term(*s, c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.map_coefficients(|c| c.neg())
    }

    pub fn scale(&self, k: &ScalarExpr) -> Self {
        self.map_coefficients(|c| c.mul(k))
    }

    pub fn map_coefficients(&self, mut f: impl FnMut(&ScalarExpr) -> ScalarExpr) -> Self {
        let mut out = Self::zero(&self.gens);
        for (s, c) in &self.terms {
            out.add_term(*s, f(c));
        }
        out
    }

    pub fn try_map_coefficients(&self, mut f: impl FnMut(&ScalarExpr) -> Result<ScalarExpr>) -> Result<Self> {
        let mut out = Self::zero(&self.gens);
        for (s, c) in &self.terms {
            out.add_term(*s, f(c)?);
        }
        Ok(out)
    }

    /// Exterior product.
    pub fn gmul(&self, other: &Self) -> Result<Self> {
        self.same_algebra(other)?;
        let mut out = Self::zero(&self.gens);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                if a & b != 0 {
                    continue;
                }
                let c = ca.mul(cb);
                out.add_term(a | b, if reorder_negates(*a, *b) { c.neg() } else { c });
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> Result<Self> {
        (0..k).try_fold(Self::one(&self.gens), |acc, _| acc.gmul(self))
    }

    /// Left derivative with respect to one generator.
    pub fn left_derivative(&self, name: &str) -> Result<Self> {
        let k = self.gens.position(name)?;
        let mut out = Self::zero(&self.gens);
        for (s, c) in &self.terms {
            if s >> k & 1 == 0 {
                continue;
            }
            let before = (s & ((1u64 << k) - 1)).count_ones();
            let rest = s & !(1u64 << k);
            out.add_term(rest, if before % 2 == 1 { c.neg() } else { c.clone() });
        }
        Ok(out)
    }

    /// Iterated Berezin integral over the measure `∫d v₁ d v₂ … d vₖ`,
    /// applied innermost (rightmost) first.
    pub fn berezin_integrate(&self, measure: &[&str]) -> Result<Self> {
        for (k, v) in measure.iter().enumerate() {
            self.gens.position(v)?;
            if measure[..k].contains(v) {
                return Err(Error::RepeatedMeasure(v.to_string()));
            }
        }
        measure
            .iter()
            .rev()
            .try_fold(self.clone(), |acc, v| acc.left_derivative(v))
    }

    /// Time derivative: coefficients via [`ScalarExpr::time_derivative`] and
    /// each time-dependent generator replaced in place by its derivative.
    pub fn time_derivative(&self) -> Result<Self> {
        let mut out = self.map_coefficients(|c| c.time_derivative());
        for (s, c) in &self.terms {
            for k in subset_indices(*s) {
                let info = &self.gens.gens[k];
                if !info.time_dependent {
                    continue;
                }
                let d = info
                    .derivative
                    .ok_or_else(|| Error::NoTimeDerivative(info.name.clone()))?;
                if s >> d & 1 == 1 {
                    continue;
                }
                // Replace generator k by d at the same slot, then reorder.
                let rest = s & !(1u64 << k);
                let below_k = (rest & ((1u64 << k) - 1)).count_ones();
                let below_d = (rest & ((1u64 << d) - 1)).count_ones();
                let flip = (below_k + below_d) % 2 == 1;
                out.add_term(rest | (1u64 << d), if flip { c.neg() } else { c.clone() });
            }
        }
        Ok(out)
    }

    /// Inverse of an even element with nonzero body, by the terminating
    /// geometric series in the nilpotent part.
    pub fn invert_even(&self) -> Result<Self> {
        if !self.is_even() {
            return Err(Error::NotEven);
        }
        let body = self.body();
        if body.is_zero() {
            return Err(Error::ZeroBody);
        }
        let inv_body = body.recip()?;
        let ratio = self.soul().scale(&inv_body.neg());
        let mut power = Self::one(&self.gens);
        let mut sum = Self::zero(&self.gens);
        while !power.is_zero() {
            sum = sum.add(&power)?;
            power = power.gmul(&ratio)?;
        }
        Ok(sum.scale(&inv_body))
    }

    /// `f(body + soul) = Σₖ f⁽ᵏ⁾(body) soulᵏ / k!`, which terminates because
    /// the soul is nilpotent.
    pub fn expand_even_function(&self, f: &FormalFunction) -> Result<Self> {
        if !self.is_even() {
            return Err(Error::NotEven);
        }
        let body = self.body();
        let soul = self.soul();
        let mut power = Self::one(&self.gens);
        let mut factorial = BigInt::from(1);
        let mut out = Self::zero(&self.gens);
        let mut k: u32 = 0;
        while !power.is_zero() {
            let deriv = f.derivative_at(k, &body)?;
            let coeff = deriv.scale(&BigRational::new(1.into(), factorial.clone()));
            out = out.add(&power.scale(&coeff))?;
            k += 1;
            factorial *= k;
            power = power.gmul(&soul)?;
        }
        Ok(out)
    }
}

/// Standard Grassmann delta: `δ(g) = g`.
pub fn grassmann_delta(gens: &Arc<GeneratorSet>, g: &str) -> Result<GrassmannElement> {
    GrassmannElement::generator(gens, g)
}

/// Functions of one commuting argument that can be lifted to even elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FormalFunction {
    Identity,
    Constant(ScalarExpr),
    Exp,
    /// The formal Dirac distribution; derivatives become `δ⁽ᵏ⁾` nodes.
    Delta,
    /// An undeclared formal function of one slot.
    Named(String),
}

impl FormalFunction {
    pub fn derivative_at(&self, k: u32, at: &ScalarExpr) -> Result<ScalarExpr> {
        Ok(match self {
            FormalFunction::Identity => match k {
                0 => at.clone(),
                1 => ScalarExpr::one(),
                _ => ScalarExpr::zero(),
            },
            FormalFunction::Constant(c) => {
                if k == 0 {
                    c.clone()
                } else {
                    ScalarExpr::zero()
                }
            }
            FormalFunction::Exp => ScalarExpr::func("exp", Vec::new(), vec![at.clone()]),
            FormalFunction::Delta => ScalarExpr::delta(k, at.clone())?,
            FormalFunction::Named(n) => ScalarExpr::func(n, vec![1; k as usize], vec![at.clone()]),
        })
    }
}

impl fmt::Display for GrassmannElement {
    /// Canonical text form: `coeff * g1 g2 + …`, sorted by subset size and
    /// then generator order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.terms();
        if terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (s, c)) in terms.into_iter().enumerate() {
            let coeff = c.to_string();
            let coeff = match (k, coeff.strip_prefix('-')) {
                (0, _) => coeff.clone(),
                (_, Some(rest)) if !rest.contains(' ') => {
                    f.write_str(" - ")?;
                    rest.to_string()
                }
                _ => {
                    f.write_str(" + ")?;
                    coeff.clone()
                }
            };
            if coeff.contains(' ') {
                write!(f, "({coeff})")?;
            } else {
                f.write_str(&coeff)?;
            }
            if s != 0 {
                f.write_str(" *")?;
                for g in subset_indices(s) {
                    write!(f, " {}", self.gens.name(g))?;
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for GrassmannElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GrassmannElement({self})")
    }
}

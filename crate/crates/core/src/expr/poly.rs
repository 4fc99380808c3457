//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! A [`Poly`] is generic over its variable type. Variables are kept in a
//! total order; the smallest variable is the most significant one for the
//! lexicographic monomial order used by division and gcd. A variable may
//! declare itself the imaginary unit, in which case monomial products reduce
//! `i^2 = -1` on the fly.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Variables usable in a [`Poly`].
pub trait Var: Clone + Ord + std::fmt::Debug {
    fn is_imaginary_unit(&self) -> bool {
        false
    }
}

/// Power product, sorted by variable, with no zero exponents.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial<V>(pub Vec<(V, u32)>);

impl<V: Var> Monomial<V> {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: V, exp: u32) -> Self {
        if exp == 0 {
            Monomial::one()
        } else {
            Monomial(vec![(v, exp)])
        }
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| *e).sum()
    }

    pub fn exponent_of(&self, v: &V) -> u32 {
        self.0
            .binary_search_by(|(w, _)| w.cmp(v))
            .map(|i| self.0[i].1)
            .unwrap_or(0)
    }

    /// Product of two monomials together with the sign produced by `i^2 = -1`.
    pub fn mul(&self, other: &Self) -> (Self, bool) {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() || j < other.0.len() {
            let take = match (self.0.get(i), other.0.get(j)) {
                (Some(a), Some(b)) => a.0.cmp(&b.0),
                (Some(_), None) => Ordering::Less,
                (None, Some(_)) => Ordering::Greater,
                (None, None) => unreachable!(),
            };
            match take {
                Ordering::Less => {
                    out.push(self.0[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(other.0[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((self.0[i].0.clone(), self.0[i].1 + other.0[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        let mut negate = false;
        out.retain_mut(|(v, e)| {
            if v.is_imaginary_unit() && *e >= 2 {
                negate ^= (*e / 2) % 2 == 1;
                *e %= 2;
            }
            *e != 0
        });
        (Monomial(out), negate)
    }

    /// `self / other` if every exponent of `other` is covered.
    pub fn div(&self, other: &Self) -> Option<Self> {
        let mut out = Vec::with_capacity(self.0.len());
        let mut j = 0;
        for (v, e) in &self.0 {
            if let Some((w, f)) = other.0.get(j) {
                match w.cmp(v) {
                    Ordering::Less => return None,
                    Ordering::Equal => {
                        if f > e {
                            return None;
                        }
                        if e > f {
                            out.push((v.clone(), e - f));
                        }
                        j += 1;
                        continue;
                    }
                    Ordering::Greater => {}
                }
            }
            out.push((v.clone(), *e));
        }
        if j < other.0.len() {
            return None;
        }
        Some(Monomial(out))
    }

    /// Componentwise minimum of exponents.
    pub fn gcd(&self, other: &Self) -> Self {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].0.cmp(&other.0[j].0) {
                Ordering::Less => i += 1,
                Ordering::Greater => j += 1,
                Ordering::Equal => {
                    out.push((self.0[i].0.clone(), self.0[i].1.min(other.0[j].1)));
                    i += 1;
                    j += 1;
                }
            }
        }
        Monomial(out)
    }

    /// Componentwise maximum of exponents.
    pub fn lcm(&self, other: &Self) -> Self {
        let g = self.gcd(other);
        let (prod, _) = Monomial(self.0.clone()).mul_plain(other);
        prod.div(&g).expect("gcd divides product")
    }

    fn mul_plain(&self, other: &Self) -> (Self, bool) {
        let mut merged: BTreeMap<V, u32> = BTreeMap::new();
        for (v, e) in self.0.iter().chain(other.0.iter()) {
            *merged.entry(v.clone()).or_insert(0) += e;
        }
        (Monomial(merged.into_iter().collect()), false)
    }

    /// Lexicographic comparison, smallest variable most significant.
    pub fn cmp_lex(&self, other: &Self) -> Ordering {
        let (mut i, mut j) = (0, 0);
        loop {
            match (self.0.get(i), other.0.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some(a), Some(b)) => match a.0.cmp(&b.0) {
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                    Ordering::Equal => match a.1.cmp(&b.1) {
                        Ordering::Equal => {
                            i += 1;
                            j += 1;
                        }
                        o => return o,
                    },
                },
            }
        }
    }

    fn without(&self, v: &V) -> (Self, u32) {
        let mut e = 0;
        let rest = self
            .0
            .iter()
            .filter(|(w, f)| {
                if w == v {
                    e = *f;
                    false
                } else {
                    true
                }
            })
            .cloned()
            .collect();
        (Monomial(rest), e)
    }
}

/// Sparse polynomial: monomial to nonzero rational coefficient.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Poly<V: Ord> {
    terms: BTreeMap<Monomial<V>, BigRational>,
}

impl<V: Var> Default for Poly<V> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<V: Var> Poly<V> {
    pub fn zero() -> Self {
        Poly { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        let mut p = Self::zero();
        p.add_term(Monomial::one(), c);
        p
    }

    pub fn var(v: V) -> Self {
        Self::term(Monomial::var(v, 1), BigRational::one())
    }

    pub fn term(m: Monomial<V>, c: BigRational) -> Self {
        let mut p = Self::zero();
        p.add_term(m, c);
        p
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial<V>, &BigRational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    pub fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn as_monomial(&self) -> Option<(&Monomial<V>, &BigRational)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    pub fn add_term(&mut self, m: Monomial<V>, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect(),
        }
    }

    pub fn mul_term(&self, m: &Monomial<V>, k: &BigRational) -> Self {
        let mut out = Self::zero();
        for (n, c) in &self.terms {
            let (prod, neg) = n.mul(m);
            let coeff = c * k;
            out.add_term(prod, if neg { -coeff } else { coeff });
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (m, k) in &other.terms {
            for (n, c) in &self.terms {
                let (prod, neg) = n.mul(m);
                let coeff = c * k;
                out.add_term(prod, if neg { -coeff } else { coeff });
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = Self::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                out = out.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        out
    }

    pub fn variables(&self) -> Vec<V> {
        let mut vs: Vec<V> = self
            .terms
            .keys()
            .flat_map(|m| m.0.iter().map(|(v, _)| v.clone()))
            .collect();
        vs.sort();
        vs.dedup();
        vs
    }

    pub fn degree_in(&self, v: &V) -> u32 {
        self.terms.keys().map(|m| m.exponent_of(v)).max().unwrap_or(0)
    }

    pub fn leading(&self) -> Option<(&Monomial<V>, &BigRational)> {
        self.terms.iter().max_by(|a, b| a.0.cmp_lex(b.0))
    }

    /// Scale so the lexicographically leading coefficient is one.
    pub fn monic(&self) -> Self {
        match self.leading() {
            Some((_, c)) => {
                let inv = c.recip();
                self.scale(&inv)
            }
            None => Self::zero(),
        }
    }

    /// Substitute `i -> -i` for the imaginary-unit variable.
    pub fn conjugate(&self) -> Self {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let odd = m.0.iter().any(|(v, e)| v.is_imaginary_unit() && e % 2 == 1);
                    (m.clone(), if odd { -c } else { c.clone() })
                })
                .collect(),
        }
    }

    pub fn has_imaginary(&self) -> bool {
        self.terms
            .keys()
            .any(|m| m.0.iter().any(|(v, _)| v.is_imaginary_unit()))
    }

    /// Split into `(real, imag)` parts, `self = real + i*imag`.
    pub fn split_imaginary(&self) -> (Self, Self) {
        let mut re = Self::zero();
        let mut im = Self::zero();
        for (m, c) in &self.terms {
            let stripped: Vec<_> = m.0.iter().filter(|(v, _)| !v.is_imaginary_unit()).cloned().collect();
            if stripped.len() == m.0.len() {
                re.add_term(m.clone(), c.clone());
            } else {
                im.add_term(Monomial(stripped), c.clone());
            }
        }
        (re, im)
    }

    /// Greatest common monomial factor of all terms.
    pub fn monomial_content(&self) -> Monomial<V> {
        let mut it = self.terms.keys();
        match it.next() {
            None => Monomial::one(),
            Some(first) => it.fold(first.clone(), |g, m| g.gcd(m)),
        }
    }

    pub fn div_monomial(&self, m: &Monomial<V>) -> Self {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(n, c)| (n.div(m).expect("monomial divides every term"), c.clone()))
                .collect(),
        }
    }

    /// Coefficients of `self` viewed as a polynomial in `v`, lowest power first.
    pub fn coefficients_in(&self, v: &V) -> Vec<Self> {
        let deg = self.degree_in(v) as usize;
        let mut out = vec![Self::zero(); deg + 1];
        for (m, c) in &self.terms {
            let (rest, e) = m.without(v);
            out[e as usize].add_term(rest, c.clone());
        }
        out
    }

    /// Exact multivariate division; `None` when `other` does not divide `self`.
    pub fn div_exact(&self, other: &Self) -> Option<Self> {
        let (lm, lc) = other.leading()?;
        let (lm, lc) = (lm.clone(), lc.clone());
        let mut rem = self.clone();
        let mut quot = Self::zero();
        while let Some((rm, rc)) = rem.leading() {
            let m = rm.div(&lm)?;
            let k = rc / &lc;
            rem = rem.sub(&other.mul_term(&m, &k));
            quot.add_term(m, k);
        }
        Some(quot)
    }

    /// Monic greatest common divisor over the rationals.
    pub fn gcd(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.monic();
        }
        if other.is_zero() {
            return self.monic();
        }
        if self.as_constant().is_some() || other.as_constant().is_some() {
            return Self::one();
        }
        if let (Some((a, _)), Some((b, _))) = (self.as_monomial(), other.as_monomial()) {
            return Self::term(a.gcd(b), BigRational::one());
        }
        let mut vars = self.variables();
        vars.extend(other.variables());
        let v = vars.into_iter().max().expect("non-constant polynomial has a variable");
        let da = self.degree_in(&v);
        let db = other.degree_in(&v);
        if da == 0 {
            return self.gcd(&other.content_in(&v));
        }
        if db == 0 {
            return other.gcd(&self.content_in(&v));
        }
        let ca = self.content_in(&v);
        let cb = other.content_in(&v);
        let pa = self.div_exact(&ca).expect("content divides");
        let pb = other.div_exact(&cb).expect("content divides");
        let c = ca.gcd(&cb);
        let g = Self::primitive_prs(pa, pb, &v);
        c.mul(&g).monic()
    }

    fn content_in(&self, v: &V) -> Self {
        self.coefficients_in(v)
            .into_iter()
            .filter(|c| !c.is_zero())
            .fold(Self::zero(), |g, c| if g.is_one() { g } else { g.gcd(&c) })
    }

    fn primitive_part_in(&self, v: &V) -> Self {
        let c = self.content_in(v);
        self.div_exact(&c).expect("content divides")
    }

    fn pseudo_rem(p: &Self, q: &Self, v: &V) -> Self {
        let dq = q.degree_in(v);
        let lcq = q.coefficients_in(v).pop().expect("nonzero");
        let mut r = p.clone();
        while !r.is_zero() && r.degree_in(v) >= dq {
            let dr = r.degree_in(v);
            let lcr = r.coefficients_in(v).pop().expect("nonzero");
            let shift = Self::term(Monomial::var(v.clone(), dr - dq), BigRational::one());
            r = r.mul(&lcq).sub(&lcr.mul(&shift).mul(q));
        }
        r
    }

    fn primitive_prs(a: Self, b: Self, v: &V) -> Self {
        let (mut p, mut q) = if a.degree_in(v) >= b.degree_in(v) {
            (a, b)
        } else {
            (b, a)
        };
        loop {
            if q.is_zero() {
                return p.primitive_part_in(v);
            }
            if q.degree_in(v) == 0 {
                return Self::one();
            }
            let r = Self::pseudo_rem(&p, &q, v);
            p = q;
            q = if r.is_zero() { r } else { r.primitive_part_in(v) };
        }
    }

    /// Evaluate with a fallible assignment of every variable.
    pub fn eval_with<E>(&self, mut value: impl FnMut(&V) -> Result<BigRational, E>) -> Result<BigRational, E> {
        let mut total = BigRational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, e) in &m.0 {
                let x = value(v)?;
                t *= num_traits::pow(x, *e as usize);
            }
            total += t;
        }
        Ok(total)
    }

    /// Map every variable to a polynomial and recombine.
    pub fn compose<W: Var, E>(&self, mut image: impl FnMut(&V) -> Result<Poly<W>, E>) -> Result<Poly<W>, E> {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut t = Poly::constant(c.clone());
            for (v, e) in &m.0 {
                t = t.mul(&image(v)?.pow(*e));
            }
            out = out.add(&t);
        }
        Ok(out)
    }

    pub fn max_abs_coefficient(&self) -> BigRational {
        self.terms
            .values()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(BigRational::zero)
    }
}

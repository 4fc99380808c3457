use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed};

use super::poly::{Monomial, Poly};
use super::{Atom, ScalarExpr};

const SUPERSCRIPTS: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];

fn superscript(n: u32) -> String {
    n.to_string()
        .chars()
        .map(|c| SUPERSCRIPTS[c.to_digit(10).unwrap() as usize])
        .collect()
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Sym(s) => write!(f, "{s}"),
            Atom::Imag => f.write_str("i"),
            Atom::Func(app) => {
                for k in &app.partials {
                    write!(f, "∂{k}")?;
                }
                write!(f, "{}(", app.name)?;
                for (j, a) in app.args.iter().enumerate() {
                    if j > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
            Atom::Delta { order, arg } => {
                if *order == 0 {
                    write!(f, "δ({arg})")
                } else {
                    write!(f, "δ⁽{}⁾({arg})", superscript(*order))
                }
            }
        }
    }
}

fn write_factors(out: &mut Vec<String>, factors: &[(Atom, i64)]) {
    for (a, e) in factors {
        if *e == 1 {
            out.push(a.to_string());
        } else {
            out.push(format!("{a}^{e}"));
        }
    }
}

/// Render `c * pos / neg` without a leading sign.
fn render_term(c: &BigRational, pos: &[(Atom, i64)], neg: &[(Atom, i64)]) -> String {
    let c = c.abs();
    let mut top = Vec::new();
    if !c.numer().is_one() || pos.is_empty() {
        top.push(c.numer().to_string());
    }
    write_factors(&mut top, pos);
    let mut bottom = Vec::new();
    if !c.denom().is_one() {
        bottom.push(c.denom().to_string());
    }
    write_factors(&mut bottom, neg);
    let top = top.join("*");
    match bottom.len() {
        0 => top,
        1 => format!("{top}/{}", bottom[0]),
        _ => format!("{top}/({})", bottom.join("*")),
    }
}

fn write_sum(f: &mut fmt::Formatter<'_>, parts: Vec<(bool, String)>) -> fmt::Result {
    if parts.is_empty() {
        return f.write_str("0");
    }
    for (k, (negative, body)) in parts.into_iter().enumerate() {
        match (k, negative) {
            (0, true) => write!(f, "-{body}")?,
            (0, false) => f.write_str(&body)?,
            (_, true) => write!(f, " - {body}")?,
            (_, false) => write!(f, " + {body}")?,
        }
    }
    Ok(())
}

fn poly_parts(p: &Poly<Atom>, den: Option<&Monomial<Atom>>) -> Vec<(bool, String)> {
    p.terms()
        .map(|(m, c)| {
            let mut signed: Vec<(Atom, i64)> = m.0.iter().map(|(a, e)| (a.clone(), *e as i64)).collect();
            if let Some(d) = den {
                for (a, e) in &d.0 {
                    match signed.iter_mut().find(|(b, _)| b == a) {
                        Some(slot) => slot.1 -= *e as i64,
                        None => signed.push((a.clone(), -(*e as i64))),
                    }
                }
                signed.sort_by(|x, y| x.0.cmp(&y.0));
            }
            // The imaginary unit leads its monomial.
            signed.sort_by_key(|(a, _)| !matches!(a, Atom::Imag));
            let pos: Vec<_> = signed.iter().filter(|(_, e)| *e > 0).cloned().collect();
            let neg: Vec<_> = signed
                .iter()
                .filter(|(_, e)| *e < 0)
                .map(|(a, e)| (a.clone(), -e))
                .collect();
            (c.is_negative(), render_term(c, &pos, &neg))
        })
        .collect()
}

impl fmt::Display for ScalarExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write_sum(f, poly_parts(&self.num, None));
        }
        if let Some((m, c)) = self.den.as_monomial() {
            debug_assert!(c.is_one());
            return write_sum(f, poly_parts(&self.num, Some(m)));
        }
        f.write_str("(")?;
        write_sum(f, poly_parts(&self.num, None))?;
        f.write_str(")/(")?;
        write_sum(f, poly_parts(&self.den, None))?;
        f.write_str(")")
    }
}

impl fmt::Debug for ScalarExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ScalarExpr({self})")
    }
}

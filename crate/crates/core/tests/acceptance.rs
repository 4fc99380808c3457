//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails or exceeds its time budget.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use superspace_core::dimensions::{superspace_measure, Dimension, DimensionAssignment, Measure};
use superspace_core::grassmann::{grassmann_delta, GeneratorSet, GrassmannElement};
use superspace_core::lattice::{
    classical_discrete_evolve, compute_b, qm_lattice_kernel, Integrator, LatticeConfig, System,
};
use superspace_core::reduction::{
    equivalence_check, hbar, large_action_insert, large_divisor, quantize, regularized_inverse, support_analysis,
    systems, Verdict,
};
use superspace_core::superspace::{superfield_of_function, third_order_term, PhaseSpace, Superfield, MEASURE};
use superspace_core::{ScalarExpr, Symbol};

type Outcome = Result<String, String>;

fn check(ok: bool, what: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what.into())
    }
}

fn e<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|err| err.to_string())
}

fn eps() -> ScalarExpr {
    Symbol::constant("eps").into()
}

fn theta_pair() -> Arc<GeneratorSet> {
    GeneratorSet::new(&MEASURE).expect("two generators")
}

fn normalization() -> Outcome {
    let gens = theta_pair();
    let d = e(grassmann_delta(&gens, "thetabar"))?.gmul(&e(grassmann_delta(&gens, "theta"))?);
    let v = e(e(d)?.berezin_integrate(&MEASURE))?;
    check(v == GrassmannElement::one(&gens), format!("∫dθdθ̄ δ(θ̄)δ(θ) = {v}"))?;
    Ok(format!("∫dθdθ̄ δ(θ̄)δ(θ) = {v}"))
}

fn reduction() -> Outcome {
    let allowed = ["q", "p", "qdot", "pdot", "m", "omega0", "hbar"];
    for (name, sa) in systems::standard() {
        let q = e(quantize(&sa))?;
        let target = ScalarExpr::imag()
            .mul(sa.lagrangian())
            .div(&hbar().into())
            .expect("hbar is nonzero");
        check(
            q.density == target,
            format!("{name}: exponent {} differs from i L/hbar", q.density),
        )?;
        let leftover: Vec<_> = q
            .density
            .symbols()
            .into_iter()
            .filter(|s| !allowed.contains(&s.name()))
            .map(|s| s.name().to_string())
            .collect();
        check(leftover.is_empty(), format!("{name}: symbols {leftover:?} survive"))?;
        check(q.ghost_free, format!("{name}: ghosts survive"))?;
        let exponent = q.steps.exponent_element();
        let gens: Vec<&str> = sa.phase_space().generators().names().collect();
        check(
            gens.iter().all(|g| !exponent.contains_generator(g)),
            format!("{name}: generator left in {exponent}"),
        )?;
    }
    Ok("exponent = (i/hbar) ∫dt L for free particle and oscillator, no ghost or multiplier left".into())
}

fn inversion() -> Outcome {
    let gens = theta_pair();
    let s = e(GrassmannElement::monomial(&gens, &MEASURE))?;
    let x = e(GrassmannElement::scalar(&gens, eps()).add(&s))?;
    let inv = e(x.invert_even())?;
    let one_over = eps().recip().expect("eps is nonzero");
    let expected = e(GrassmannElement::scalar(&gens, one_over.clone()).add(&s.scale(&one_over.mul(&one_over).neg())))?;
    check(inv == expected, format!("inverse {inv}, expected {expected}"))?;
    let prod = e(x.gmul(&inv))?;
    check(prod == GrassmannElement::one(&gens), format!("product {prod}"))?;
    check(
        e(inv.gmul(&x))? == GrassmannElement::one(&gens),
        "left product differs from 1",
    )?;
    Ok(format!("(eps + θθ̄)⁻¹ = {inv}"))
}

fn large_action() -> Outcome {
    let dims = DimensionAssignment::standard();
    let b: ScalarExpr = large_divisor().into();
    for (name, sa) in systems::standard() {
        let arg = e(regularized_inverse(&sa))?;
        let support = e(support_analysis(&arg))?;
        check(support.root == eps(), format!("{name}: root {}", support.root))?;
        check(
            support.limit.as_ref().map(ScalarExpr::is_zero) == Some(true),
            format!("{name}: limit {:?}", support.limit.as_ref().map(|l| l.to_string())),
        )?;
        let report = e(equivalence_check(name, &sa, &b, &dims))?;
        let v = report
            .verdicts
            .iter()
            .find(|v| v.name == "large-action exponent")
            .ok_or("no large-action verdict")?;
        check(
            v.verdict == Verdict::Match,
            format!("{name}: large-action verdict {}", v.verdict),
        )?;
        let failed: Vec<_> = report
            .verdicts
            .iter()
            .filter(|v| !v.passed())
            .map(|v| v.name.clone())
            .collect();
        check(failed.is_empty(), format!("{name}: failed verdicts {failed:?}"))?;

        // Oracle: the small-action exponent with hbar replaced by B.
        let want = ScalarExpr::imag().mul(sa.lagrangian()).div(&b).expect("B is nonzero");
        let la = e(large_action_insert(&sa, &b, &dims))?;
        check(
            la.density == want,
            format!("{name}: large-action density {}", la.density),
        )?;
    }
    Ok("root θθ̄ = eps, limit 0; large-action exponent = quantized exponent with hbar -> B".into())
}

fn dimensions() -> Outcome {
    let action = Dimension::new(1, 2, -1);
    let energy = Dimension::new(1, 2, -2);
    let one = Dimension::new(0, 0, 0);
    for (name, sa) in systems::standard() {
        let dims = e(DimensionAssignment::standard().with_superspace(sa.phase_space()))?;
        let m = e(dims.integral(
            &[
                Measure::Generator("theta".into()),
                Measure::Generator("thetabar".into()),
            ],
            one,
        ))?;
        check(m == action.inverse(), format!("dim(dθdθ̄) = {m}"))?;
        let gens = sa.phase_space().generators();
        let tbt =
            e(e(GrassmannElement::generator(gens, "thetabar"))?.gmul(&e(GrassmannElement::generator(gens, "theta"))?))?;
        let d = e(dims.infer_grassmann(&tbt))?;
        check(d == action, format!("dim(θ̄θ) = {d}"))?;

        let l = e(dims.infer(sa.lagrangian()))?;
        check(l == energy, format!("{name}: dim(L) = {l}"))?;
        let lphi = e(dims.infer_grassmann(sa.integrand()))?;
        let gen_functional = e(dims.integral(&superspace_measure(), lphi))?;
        check(
            gen_functional == one,
            format!("{name}: ∫dt dθ dθ̄ L(Φ) has {gen_functional}"),
        )?;
        let q = e(quantize(&sa))?;
        let qd = e(dims.integral(&[Measure::Time], e(dims.infer(&q.density))?))?;
        check(qd == one, format!("{name}: quantized exponent has {qd}"))?;
        let la = e(large_action_insert(&sa, &large_divisor().into(), &dims))?;
        let ld = e(dims.integral(&[Measure::Time], e(dims.infer(&la.density))?))?;
        check(ld == one, format!("{name}: large-action exponent has {ld}"))?;
    }
    Ok("dim(dθdθ̄) = action⁻¹, dim(θ̄θ) = action, three exponents dimensionless".into())
}

fn random_rational(rng: &mut StdRng) -> BigRational {
    let n: i64 = rng.gen_range(-9..=9);
    let d: i64 = rng.gen_range(1..=5);
    BigRational::new(BigInt::from(if n == 0 { 1 } else { n }), BigInt::from(d))
}

/// Random polynomial in the coordinates, as a list of (coefficient, exponents).
fn random_polynomial(rng: &mut StdRng, vars: usize) -> Vec<(BigRational, Vec<u32>)> {
    let terms = rng.gen_range(1..=6);
    (0..terms)
        .map(|_| {
            let degree = rng.gen_range(0..=4u32);
            let mut exps = vec![0u32; vars];
            for _ in 0..degree {
                exps[rng.gen_range(0..vars)] += 1;
            }
            (random_rational(rng), exps)
        })
        .collect()
}

fn poly_expr(poly: &[(BigRational, Vec<u32>)], coords: &[Symbol]) -> ScalarExpr {
    let mut out = ScalarExpr::zero();
    for (c, exps) in poly {
        let mut t = ScalarExpr::rational(c.clone());
        for (s, &k) in coords.iter().zip(exps) {
            t = t.mul(&ScalarExpr::symbol(s.clone()).pow(k as i32).expect("nonnegative power"));
        }
        out = out.add(&t);
    }
    out
}

/// F(Φ) by multiplying superfields out directly, no Taylor series.
fn direct_substitution(poly: &[(BigRational, Vec<u32>)], fields: &[Superfield]) -> Result<GrassmannElement, String> {
    let gens = fields[0].element().generators().clone();
    let mut out = GrassmannElement::zero(&gens);
    for (c, exps) in poly {
        let mut t = GrassmannElement::scalar(&gens, ScalarExpr::rational(c.clone()));
        for (f, &k) in fields.iter().zip(exps) {
            t = e(t.gmul(&e(f.element().pow(k))?))?;
        }
        out = e(out.add(&t))?;
    }
    Ok(out)
}

fn phase_space(n: usize) -> PhaseSpace {
    let mut coords: Vec<Symbol> = (1..=n).map(|k| Symbol::phase(&format!("q{k}"))).collect();
    coords.extend((1..=n).map(|k| Symbol::phase(&format!("p{k}"))));
    PhaseSpace::canonical(coords).expect("even dimension")
}

fn taylor_termination() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed_0006);
    let spaces = [phase_space(1), phase_space(2)];
    for trial in 0..200 {
        let ps = &spaces[trial % 2];
        let fields = e(ps.superfields())?;
        let poly = random_polynomial(&mut rng, ps.dim());
        let f = poly_expr(&poly, ps.coords());
        let expanded = e(superfield_of_function(&f, &fields))?;
        let direct = direct_substitution(&poly, &fields)?;
        check(
            expanded == direct,
            format!("trial {trial}: F = {f}: Taylor {expanded} vs direct {direct}"),
        )?;
        let third = e(third_order_term(&f, &fields))?;
        check(third.is_zero(), format!("trial {trial}: third-order term {third}"))?;
        check(
            expanded.body() == f,
            format!("trial {trial}: body {} vs {f}", expanded.body()),
        )?;
    }
    for ps in &spaces {
        let souls: Vec<_> = e(ps.superfields())?.iter().map(Superfield::soul).collect();
        for a in &souls {
            for b in &souls {
                for c in &souls {
                    check(e(e(a.gmul(b))?.gmul(c))?.is_zero(), "triple soul product is nonzero")?;
                }
            }
        }
    }
    Ok("200 random F: Taylor expansion = direct substitution, third order 0, body F(φ)".into())
}

const ALGEBRA: [&str; 6] = ["g1", "g2", "g3", "g4", "g5", "g6"];

fn random_coefficient(rng: &mut StdRng) -> ScalarExpr {
    let c = ScalarExpr::rational(random_rational(rng));
    match rng.gen_range(0..3) {
        0 => c,
        1 => c.mul(&Symbol::constant("x").into()),
        _ => c.add(&Symbol::constant("y").into()),
    }
}

/// Random element; `parity` restricts monomial sizes to one parity.
fn random_element(rng: &mut StdRng, gens: &Arc<GeneratorSet>, parity: Option<u32>) -> GrassmannElement {
    let mut out = GrassmannElement::zero(gens);
    for _ in 0..rng.gen_range(1..=5) {
        let mut mask: u64 = rng.gen_range(0..64);
        if let Some(p) = parity {
            if mask.count_ones() % 2 != p {
                mask ^= 1 << rng.gen_range(0..6);
            }
        }
        out = out
            .add(&GrassmannElement::term(gens, mask, random_coefficient(rng)))
            .expect("same algebra");
    }
    out
}

fn without(e: &GrassmannElement, k: usize) -> GrassmannElement {
    let gens = e.generators().clone();
    e.terms()
        .into_iter()
        .filter(|(s, _)| s >> k & 1 == 0)
        .fold(GrassmannElement::zero(&gens), |acc, (s, c)| {
            acc.add(&GrassmannElement::term(&gens, s, c.clone()))
                .expect("same algebra")
        })
}

fn algebra_suite() -> Outcome {
    let gens = GeneratorSet::new(&ALGEBRA).expect("six generators");
    let mut rng = StdRng::seed_from_u64(0x5eed_0007);

    for _ in 0..300 {
        let (pa, pb) = (rng.gen_range(0..2), rng.gen_range(0..2));
        let a = random_element(&mut rng, &gens, Some(pa));
        let b = random_element(&mut rng, &gens, Some(pb));
        let ab = e(a.gmul(&b))?;
        let ba = e(b.gmul(&a))?;
        let want = if pa * pb == 1 { ba.neg() } else { ba };
        check(ab == want, format!("anticommutativity fails for {a} and {b}"))?;
    }
    for g in ALGEBRA {
        let x = e(GrassmannElement::generator(&gens, g))?;
        check(e(x.gmul(&x))?.is_zero(), format!("{g}² ≠ 0"))?;
    }

    for k in 0..1000 {
        let a = random_element(&mut rng, &gens, None);
        let b = random_element(&mut rng, &gens, None);
        let c = random_element(&mut rng, &gens, None);
        let left = e(e(a.gmul(&b))?.gmul(&c))?;
        let right = e(a.gmul(&e(b.gmul(&c))?))?;
        check(left == right, format!("associativity fails on triple {k}"))?;
    }

    for _ in 0..200 {
        let x = random_element(&mut rng, &gens, None);
        let y = random_element(&mut rng, &gens, None);
        let (s, t) = (random_coefficient(&mut rng), random_coefficient(&mut rng));
        for (k, g) in ALGEBRA.iter().enumerate() {
            let d = e(x.berezin_integrate(&[g]))?;
            check(d == e(x.left_derivative(g))?, format!("∫d{g} differs from ∂/∂{g}"))?;
            // Oracle: x = x|_{g=0} + g·D with D free of g.
            check(!d.contains_generator(g), format!("∫d{g} still contains {g}"))?;
            let g_el = e(GrassmannElement::generator(&gens, g))?;
            let rebuilt = e(without(&x, k).add(&e(g_el.gmul(&d))?))?;
            check(rebuilt == x, format!("x ≠ x|{g}=0 + {g}·∫d{g} x"))?;
            let lin = e(e(x.scale(&s).add(&y.scale(&t)))?.berezin_integrate(&[g]))?;
            let sep = e(d.scale(&s).add(&e(y.berezin_integrate(&[g]))?.scale(&t)))?;
            check(lin == sep, format!("∫d{g} is not linear"))?;
            check(
                e(without(&x, k).berezin_integrate(&[g]))?.is_zero(),
                format!("∫d{g} of a {g}-free element"),
            )?;
        }
    }

    let one = GrassmannElement::one(&gens);
    for k in 0..200 {
        let soul = random_element(&mut rng, &gens, Some(0)).soul();
        let body = ScalarExpr::rational(random_rational(&mut rng));
        let x = e(soul.add(&GrassmannElement::scalar(&gens, body)))?;
        let inv = e(x.invert_even())?;
        check(e(x.gmul(&inv))? == one, format!("x·x⁻¹ ≠ 1 for inversion {k}"))?;
        check(e(inv.gmul(&x))? == one, format!("x⁻¹·x ≠ 1 for inversion {k}"))?;
        check(e(inv.invert_even())? == x, format!("(x⁻¹)⁻¹ ≠ x for inversion {k}"))?;
    }
    Ok("anticommutativity, 1000 associative triples, Berezin = left derivative, 200 inversions".into())
}

fn free_closed_form(cfg: &LatticeConfig) -> Complex64 {
    let i = Complex64::i();
    let t = cfg.t_total;
    let pre = (Complex64::new(cfg.m, 0.0) / (2.0 * PI * i * cfg.hbar * t)).sqrt();
    pre * (i * cfg.m * (cfg.x_f - cfg.x_i).powi(2) / (2.0 * cfg.hbar * t)).exp()
}

fn mehler_closed_form(cfg: &LatticeConfig) -> Complex64 {
    let i = Complex64::i();
    let (m, w, h, t) = (cfg.m, cfg.omega0, cfg.hbar, cfg.t_total);
    let s = (w * t).sin();
    let pre = (Complex64::new(m * w, 0.0) / (2.0 * PI * i * h * s)).sqrt();
    let phase = m * w / (2.0 * h * s) * ((cfg.x_i.powi(2) + cfg.x_f.powi(2)) * (w * t).cos() - 2.0 * cfg.x_i * cfg.x_f);
    pre * (i * phase).exp()
}

fn fit_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    num / den
}

fn lattice() -> Outcome {
    let cfg = LatticeConfig::default();

    let exact = free_closed_form(&cfg);
    let mut worst = 0.0f64;
    for n in [2, 4, 8] {
        let k = e(qm_lattice_kernel(&cfg.with_steps(n), System::Free))?;
        worst = worst.max((k - exact).norm() / exact.norm());
    }
    check(worst < 1e-12, format!("free kernel relative error {worst:.3e}"))?;

    let mehler = mehler_closed_form(&cfg);
    let mut pts = Vec::new();
    for n in [8, 16, 32, 64, 128, 256] {
        let k = e(qm_lattice_kernel(&cfg.with_steps(n), System::Harmonic))?;
        pts.push((cfg.t_total / n as f64, (k - mehler).norm()));
    }
    let kernel_slope = fit_slope(&pts);
    check(
        (kernel_slope - 2.0).abs() <= 0.2,
        format!("kernel slope {kernel_slope:.3}"),
    )?;

    let (w, m, t) = (cfg.omega0, cfg.m, cfg.t_total);
    let q_exact = cfg.q0 * (w * t).cos() + cfg.p0 / (m * w) * (w * t).sin();
    let p_exact = -m * w * cfg.q0 * (w * t).sin() + cfg.p0 * (w * t).cos();
    let mut slopes = Vec::new();
    for scheme in [Integrator::ForwardEuler, Integrator::SymplecticEuler] {
        let mut pts = Vec::new();
        for n in [100, 200, 400, 800, 1600] {
            let tr = e(classical_discrete_evolve(&cfg.with_steps(n), System::Harmonic, scheme))?;
            let (q, p) = (tr.q[n], tr.p[n]);
            pts.push((t / n as f64, (q - q_exact).hypot(p - p_exact)));
        }
        let finest = pts.last().expect("five points").1;
        check(
            finest < 1e-2,
            format!("{scheme:?}: trajectory error {finest:.3e} at N = 1600"),
        )?;
        let slope = fit_slope(&pts);
        check(
            (slope - 1.0).abs() <= 0.2,
            format!("{scheme:?}: trajectory slope {slope:.3}"),
        )?;
        slopes.push(slope);
    }
    Ok(format!(
        "free kernel error {worst:.1e}, kernel slope {kernel_slope:.3}, trajectory slopes {:.3}/{:.3}",
        slopes[0], slopes[1]
    ))
}

fn big_action() -> Outcome {
    let one = BigRational::from_integer(BigInt::from(1));
    let b = e(compute_b(&one, &one))?;
    let c = BigInt::from(299_792_458i64);
    check(b.b == BigRational::from_integer(&c * &c), format!("B = {}", b.b))?;

    // Independent arithmetic: c² / 1.054571817e-34 in plain floating point.
    let independent = 299_792_458f64 * 299_792_458f64 / 1.054571817e-34;
    let engine = {
        let (n, d) = (b.ratio_to_hbar.numer().to_string(), b.ratio_to_hbar.denom().to_string());
        let (n, d): (f64, f64) = (n.parse().expect("integer"), d.parse().expect("integer"));
        n / d
    };
    let (x, y) = (format!("{independent:.9e}"), format!("{engine:.9e}"));
    check(x == y, format!("B/hbar = {y}, independent {x}"))?;
    Ok(format!("B = c² J·s = {} exactly, B/hbar = {y}", b.b))
}

fn main() -> ExitCode {
    let criteria: [(&str, Duration, fn() -> Outcome); 9] = [
        ("1 Berezin normalization", Duration::from_secs(1), normalization),
        ("2 quantization reduction", Duration::from_secs(5), reduction),
        ("3 regularized inversion", Duration::from_secs(1), inversion),
        ("4 large-action projection", Duration::from_secs(5), large_action),
        ("5 dimensional checks", Duration::from_secs(1), dimensions),
        ("6 Taylor termination", Duration::from_secs(60), taylor_termination),
        ("7 algebra properties", Duration::from_secs(60), algebra_suite),
        ("8 numeric lattice", Duration::from_secs(30), lattice),
        ("9 big action", Duration::from_secs(1), big_action),
    ];
    let mut failures = 0;
    let mut timings = BTreeMap::new();
    for (name, budget, run) in criteria {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        timings.insert(name, elapsed);
        let over = elapsed > budget;
        match (&result, over) {
            (Ok(detail), false) => println!("PASS  {name} ({:.3}s): {detail}", elapsed.as_secs_f64()),
            (Ok(detail), true) => {
                failures += 1;
                println!(
                    "FAIL  {name} ({:.3}s, budget {}s): {detail}",
                    elapsed.as_secs_f64(),
                    budget.as_secs()
                );
            }
            (Err(why), _) => {
                failures += 1;
                println!("FAIL  {name} ({:.3}s): {why}", elapsed.as_secs_f64());
            }
        }
    }
    let total: Duration = timings.values().sum();
    println!("{} of 9 criteria passed in {:.3}s", 9 - failures, total.as_secs_f64());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

use proptest::prelude::*;
use superspace_core::dimensions::DimensionAssignment;
use superspace_core::expr::Bindings;
use superspace_core::grassmann::{grassmann_delta, GrassmannElement};
use superspace_core::reduction::{
    compare_modulo_derivative, cpi_component_lagrangian, hamiltonian_component_lagrangian, hbar, large_action_insert,
    large_divisor, quantize, SuperAction, Verdict,
};
use superspace_core::superspace::{superfield_of_function, third_order_term, PhaseSpace, MEASURE, THETA, THETA_BAR};
use superspace_core::{ScalarExpr, Symbol, SymbolKind};

type Poly = Vec<(i64, i64, [u32; 4])>;

fn phase_space() -> PhaseSpace {
    PhaseSpace::canonical(vec![Symbol::phase("q"), Symbol::phase("p")]).unwrap()
}

/// `[q, p, qdot, pdot]`
fn variables() -> [ScalarExpr; 4] {
    let (q, p) = (Symbol::phase("q"), Symbol::phase("p"));
    [
        q.clone().into(),
        p.clone().into(),
        q.dot().unwrap().into(),
        p.dot().unwrap().into(),
    ]
}

fn to_expr(poly: &Poly) -> ScalarExpr {
    let vars = variables();
    poly.iter().fold(ScalarExpr::zero(), |acc, (n, d, exps)| {
        let mono = vars.iter().zip(exps).fold(ScalarExpr::fraction(*n, *d), |m, (v, &k)| {
            m.mul(&v.pow(k as i32).unwrap())
        });
        acc.add(&mono)
    })
}

/// Random polynomial of total degree at most four; velocities only when
/// `velocities` is set, and then at most linearly.
fn poly(velocities: bool) -> impl Strategy<Value = Poly> {
    let term = (-6i64..=6, 1i64..=3, 0u32..=3, 0u32..=3, 0u32..=1, 0u32..=1).prop_map(move |(n, d, a, b, c, e)| {
        let (c, e) = if velocities { (c, e) } else { (0, 0) };
        let a = a.min(4 - b.min(4));
        (n, d, [a, b, c, e])
    });
    prop::collection::vec(term, 1..5)
}

fn constant(name: &str) -> ScalarExpr {
    Symbol::new(name, SymbolKind::Constant).into()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn expansion_is_linear(f in poly(true), g in poly(true), a in -4i64..4) {
        let fields = phase_space().superfields().unwrap();
        let (fe, ge) = (to_expr(&f), to_expr(&g));
        let k = ScalarExpr::integer(a);
        let lhs = superfield_of_function(&fe.mul(&k).add(&ge), &fields).unwrap();
        let rhs = superfield_of_function(&fe, &fields)
            .unwrap()
            .scale(&k)
            .add(&superfield_of_function(&ge, &fields).unwrap())
            .unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn expansion_satisfies_the_product_rule(f in poly(true), g in poly(true)) {
        let fields = phase_space().superfields().unwrap();
        let (fe, ge) = (to_expr(&f), to_expr(&g));
        let product = superfield_of_function(&fe.mul(&ge), &fields).unwrap();
        let separate = superfield_of_function(&fe, &fields)
            .unwrap()
            .gmul(&superfield_of_function(&ge, &fields).unwrap())
            .unwrap();
        prop_assert_eq!(product, separate);
    }

    #[test]
    fn body_and_termination(f in poly(true)) {
        let fields = phase_space().superfields().unwrap();
        let fe = to_expr(&f);
        prop_assert_eq!(superfield_of_function(&fe, &fields).unwrap().body(), fe.clone());
        prop_assert!(third_order_term(&fe, &fields).unwrap().is_zero());
    }

    #[test]
    fn expansion_commutes_with_time_derivative(f in poly(false)) {
        let fields = phase_space().superfields().unwrap();
        let fe = to_expr(&f);
        let lhs = superfield_of_function(&fe, &fields).unwrap().time_derivative().unwrap();
        let rhs = superfield_of_function(&fe.time_derivative(), &fields).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn quantization_cancels_ghosts(l in poly(true)) {
        let le = to_expr(&l);
        let sa = SuperAction::new(phase_space(), le.clone()).unwrap();
        prop_assert_eq!(sa.integrand().body(), le.clone());
        let q = quantize(&sa).unwrap();
        prop_assert!(q.ghost_free);
        let stray: Vec<_> = q.density.symbols().into_iter().filter(|s| s.kind() == SymbolKind::Auxiliary).collect();
        prop_assert!(stray.is_empty(), "{:?}", stray);
        let want = ScalarExpr::imag().mul(&le).div(&hbar().into()).unwrap();
        prop_assert_eq!(q.density, want);
    }

    #[test]
    fn divisor_covariance(l in poly(true), k in 1i64..5) {
        let sa = SuperAction::new(phase_space(), to_expr(&l)).unwrap();
        let dims = DimensionAssignment::standard();
        let small = quantize(&sa).unwrap();
        for divisor in [large_divisor().into(), constant("B").mul(&ScalarExpr::integer(k)), hbar().into()] {
            let large = large_action_insert(&sa, &divisor, &dims).unwrap();
            let mut swap = Bindings::new();
            swap.insert(hbar(), divisor.clone());
            if divisor != ScalarExpr::from(hbar()) {
                prop_assert_eq!(&large.density, &small.density.substitute(&swap).unwrap());
            } else {
                prop_assert_eq!(&large.density, &small.density);
            }
            prop_assert!(large.steps_match_quantize);
            prop_assert!(large.ghost_free);
        }
    }

    #[test]
    fn multiplier_and_delta_pair_differ_by_a_global_sign(l in poly(true)) {
        let sa = SuperAction::new(phase_space(), to_expr(&l)).unwrap();
        let gens = sa.phase_space().generators();
        let pair = GrassmannElement::monomial(gens, &[THETA, THETA_BAR]).unwrap();
        let deltas = grassmann_delta(gens, THETA_BAR)
            .unwrap()
            .gmul(&grassmann_delta(gens, THETA).unwrap())
            .unwrap();
        let x = sa.integrand();
        let with_pair = pair.gmul(x).unwrap().berezin_integrate(&MEASURE).unwrap();
        let with_deltas = deltas.gmul(x).unwrap().berezin_integrate(&MEASURE).unwrap();
        prop_assert_eq!(with_pair, with_deltas.neg());
    }

    #[test]
    fn hamiltonian_ghost_sector_matches_up_to_a_derivative(h in poly(false)) {
        let ps = phase_space();
        let he = to_expr(&h);
        let sa = SuperAction::from_hamiltonian(ps.clone(), &he).unwrap();
        let engine = cpi_component_lagrangian(&sa).unwrap();
        let claim = hamiltonian_component_lagrangian(&ps, &he).unwrap();
        prop_assert_eq!(compare_modulo_derivative(&claim, &engine, &ps).unwrap(), Verdict::Match);
    }
}

#[test]
fn constant_lagrangian_has_no_component() {
    for k in [constant("m"), ScalarExpr::integer(3), ScalarExpr::zero()] {
        let sa = SuperAction::new(phase_space(), k.clone()).unwrap();
        assert!(cpi_component_lagrangian(&sa).unwrap().is_zero());
        let q = quantize(&sa).unwrap();
        assert_eq!(q.density, ScalarExpr::imag().mul(&k).div(&hbar().into()).unwrap());
    }
}

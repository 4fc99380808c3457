use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use proptest::prelude::*;
use superspace_core::lattice::{
    classical_discrete_evolve, compute_b, energy_drift, qm_lattice_kernel, wavepacket_norms, Integrator, LatticeConfig,
    System, Wavepacket,
};

fn config() -> impl Strategy<Value = LatticeConfig> {
    (
        0.5f64..2.0,
        0.5f64..2.0,
        0.2f64..2.0,
        -1.0f64..1.0,
        -1.0f64..1.0,
        1usize..40,
    )
        .prop_map(|(m, hbar, t_total, x_i, x_f, steps)| LatticeConfig {
            m,
            hbar,
            t_total,
            x_i,
            x_f,
            steps,
            ..LatticeConfig::default()
        })
}

fn free_closed_form(cfg: &LatticeConfig) -> Complex64 {
    let i = Complex64::i();
    let t = cfg.t_total;
    let pre = (Complex64::from(cfg.m) / (2.0 * PI * i * cfg.hbar * t)).sqrt();
    pre * (i * cfg.m * (cfg.x_f - cfg.x_i).powi(2) / (2.0 * cfg.hbar * t)).exp()
}

fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn free_kernel_is_independent_of_the_lattice(cfg in config()) {
        let k = qm_lattice_kernel(&cfg, System::Free).unwrap();
        let exact = free_closed_form(&cfg);
        prop_assert!((k - exact).norm() / exact.norm() < 1e-11, "N = {}: {} vs {}", cfg.steps, k, exact);
    }

    #[test]
    fn each_step_preserves_the_norm(
        cfg in config(),
        omega0 in 0.0f64..2.0,
        x0 in -1.0f64..1.0,
        sigma in 0.3f64..2.0,
        k0 in -2.0f64..2.0,
    ) {
        let cfg = LatticeConfig { omega0, ..cfg };
        let psi = Wavepacket::gaussian(x0, sigma, k0);
        prop_assert!((psi.norm() - 1.0).abs() < 1e-12);
        for system in [System::Free, System::Harmonic] {
            for n in wavepacket_norms(&cfg, system, psi).unwrap() {
                prop_assert!((n - 1.0).abs() < 1e-10, "norm {}", n);
            }
        }
    }

    #[test]
    fn zero_frequency_reduces_to_the_free_particle(cfg in config(), q0 in -1.0f64..1.0, p0 in -1.0f64..1.0) {
        let cfg = LatticeConfig { omega0: 0.0, q0, p0, ..cfg };
        let h = qm_lattice_kernel(&cfg, System::Harmonic).unwrap();
        let f = qm_lattice_kernel(&cfg, System::Free).unwrap();
        prop_assert!((h - f).norm() <= 1e-12 * f.norm());
        for scheme in [Integrator::ForwardEuler, Integrator::SymplecticEuler] {
            let a = classical_discrete_evolve(&cfg, System::Harmonic, scheme).unwrap();
            let b = classical_discrete_evolve(&cfg, System::Free, scheme).unwrap();
            prop_assert_eq!(&a, &b);
            // q_k = q0 + k Δt p0/m, p_k = p0
            let dt = cfg.t_total / cfg.steps as f64;
            for (k, (q, p)) in b.q.iter().zip(&b.p).enumerate() {
                prop_assert!((q - (q0 + k as f64 * dt * p0 / cfg.m)).abs() < 1e-12);
                prop_assert_eq!(*p, p0);
            }
        }
    }

    #[test]
    fn symplectic_energy_error_stays_bounded(omega0 in 0.3f64..3.0, q0 in -2.0f64..2.0, p0 in -2.0f64..2.0) {
        prop_assume!(q0.abs() + p0.abs() > 0.1);
        let cfg = LatticeConfig { omega0, q0, p0, ..LatticeConfig::default() };
        let drift = energy_drift(&cfg, 10_000).unwrap();
        prop_assert!(drift.is_bounded(), "{:?}", drift);
    }

    #[test]
    fn big_action_is_linear(mn in 0i64..1000, md in 1i64..50, tn in 0i64..1000, td in 1i64..50, k in 1i64..20) {
        let (m, t, k) = (rational(mn, md), rational(tn, td), rational(k, 1));
        let b = compute_b(&m, &t).unwrap().b;
        let c = rational(299_792_458, 1);
        prop_assert_eq!(&b, &(&m * &c * &c * &t));
        prop_assert_eq!(compute_b(&(&m * &k), &t).unwrap().b, &b * &k);
        prop_assert_eq!(compute_b(&m, &(&t * &k)).unwrap().b, &b * &k);
    }
}

#[test]
fn massless_universe_has_no_big_action() {
    let b = compute_b(&rational(0, 1), &rational(1, 1)).unwrap();
    assert!(b.is_zero());
    assert_eq!(b.ratio_approx, 0.0);
}

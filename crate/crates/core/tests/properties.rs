use std::f64::consts::PI;

use fsr_core::analysis::{dft_oracle, extended_coefficients};
use fsr_core::circuits::Backend;
use fsr_core::encoding::GridFunction;
use fsr_core::readout::{fsr_fixed, rsr_postprocess_values, FsrOptions};
use fsr_core::sim::{apply_even_extension, apply_odd_extension, Controls, Gate, Parity, Register, StateVector};
use fsr_core::ExecPolicy;
use num_complex::Complex64;
use proptest::prelude::*;

fn complex_vec(len: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), len)
        .prop_filter("nonzero", |v| v.iter().any(|(a, b)| a.abs() + b.abs() > 1e-3))
        .prop_map(|v| v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect())
}

fn real_samples(max_qubits: u32) -> impl Strategy<Value = Vec<f64>> {
    (1..=max_qubits).prop_flat_map(|n| {
        prop::collection::vec(-2.0f64..2.0, 1usize << n)
            .prop_filter("nonzero", |v| v.iter().any(|x| x.abs() > 1e-3))
    })
}

fn direct_dft(a: &[Complex64]) -> Vec<Complex64> {
    let k = a.len();
    (0..k)
        .map(|j| {
            a.iter()
                .enumerate()
                .map(|(t, &v)| v * Complex64::from_polar(1.0, -2.0 * PI * ((j * t) % k) as f64 / k as f64))
                .sum::<Complex64>()
                / (k as f64).sqrt()
        })
        .collect()
}

fn gate_strategy(q: usize) -> impl Strategy<Value = (Option<usize>, Gate)> {
    let reg = (0..q).prop_flat_map(move |s| (Just(s), 1..=q - s)).prop_map(|(s, l)| Register::new(s, l));
    let gate = prop_oneof![
        (0..q).prop_map(Gate::Hadamard),
        (0..q).prop_map(Gate::PauliZ),
        (-PI..PI).prop_map(Gate::GlobalPhase),
        reg.clone().prop_map(Gate::Increment),
        reg.clone().prop_map(Gate::InverseQft),
        reg.clone().prop_map(Gate::Qft),
        (reg.clone(), 0usize..64).prop_map(|(r, s)| Gate::ModularAdd { register: r, shift: s % r.dim() }),
        (reg, -8i64..8, 0.0f64..1.0).prop_map(|(r, k0, x)| Gate::PhasePoly { register: r, k0, x, length: 1.0 }),
        (0..q, 0..q).prop_filter("distinct", |(a, b)| a != b).prop_map(|(a, b)| Gate::Swap(a, b)),
    ];
    (prop::option::of(0..q), gate)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gates_preserve_norm(amps in complex_vec(32), gates in prop::collection::vec(gate_strategy(5), 1..12)) {
        let mut s = StateVector::from_amplitudes(amps).unwrap();
        for (ctl, g) in &gates {
            let controls = match ctl {
                Some(c) if g_touches(g, *c) => Controls::none(),
                Some(c) => Controls::on(*c),
                None => Controls::none(),
            };
            s.apply_controlled(controls, g).unwrap();
            prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn qft_round_trip_and_dft(n in 1usize..=6, seed in any::<u64>()) {
        let amps: Vec<Complex64> = (0..1usize << n)
            .map(|j| {
                let t = (seed ^ (j as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)) as f64 / u64::MAX as f64;
                Complex64::new((7.0 * t).sin(), (3.0 * t).cos())
            })
            .collect();
        let s0 = StateVector::from_amplitudes(amps).unwrap();
        let mut s = s0.clone();
        let r = Register::new(0, n);
        s.inverse_qft(r).unwrap();
        let oracle = direct_dft(s0.amplitudes());
        for (a, b) in s.amplitudes().iter().zip(&oracle) {
            prop_assert!((a - b).norm() < 1e-12);
        }
        let parseval: f64 = s.amplitudes().iter().map(|a| a.norm_sqr()).sum();
        prop_assert!((parseval - 1.0).abs() < 1e-10);
        s.qft(r).unwrap();
        for (a, b) in s.amplitudes().iter().zip(s0.amplitudes()) {
            prop_assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn even_extension_is_symmetric(v in real_samples(7)) {
        let s = apply_even_extension(&v).unwrap();
        let k = s.len();
        for j in 0..k {
            prop_assert!((s.amplitudes()[j] - s.amplitudes()[(k - j) % k]).norm() < 1e-12);
        }
    }

    #[test]
    fn transformed_extensions_are_real(v in real_samples(8)) {
        // odd reflection needs a zero at the origin
        let mut odd = v.clone();
        odd[0] = 0.0;
        prop_assume!(odd.iter().any(|x| x.abs() > 1e-3));
        for (parity, v) in [(Parity::Even, &v), (Parity::Odd, &odd)] {
            let mut s = match parity {
                Parity::Even => apply_even_extension(v).unwrap(),
                Parity::Odd => apply_odd_extension(v).unwrap(),
            };
            let n = s.num_qubits();
            s.inverse_qft(Register::new(0, n)).unwrap();
            let worst = s.amplitudes().iter().fold(0.0f64, |m, a| m.max(a.im.abs()));
            prop_assert!(worst <= 1e-10, "{parity:?}: {worst}");
            let oracle = extended_coefficients(v, parity).unwrap();
            for (a, c) in s.amplitudes().iter().zip(&oracle) {
                prop_assert!((a.re - c).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn three_transform_paths_agree(v in real_samples(8)) {
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let oracle = dft_oracle(&v, norm, 1.0).unwrap();
        let amps: Vec<Complex64> = v.iter().map(|&x| Complex64::new(x / norm, 0.0)).collect();
        let mut s = StateVector::from_amplitudes(amps).unwrap();
        s.inverse_qft(Register::new(0, s.num_qubits())).unwrap();
        for (a, b) in s.amplitudes().iter().zip(&oracle.quantum) {
            prop_assert!((a - b).norm() < 1e-12);
        }
        // a full-band low-pass is the FFT round trip
        let back = rsr_postprocess_values(&v, v.len() / 2).unwrap();
        for (a, b) in back.iter().zip(&v) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }
}

fn g_touches(g: &Gate, q: usize) -> bool {
    match g {
        Gate::Hadamard(a) | Gate::PauliZ(a) => *a == q,
        Gate::GlobalPhase(_) => false,
        Gate::Increment(r) | Gate::InverseQft(r) | Gate::Qft(r) => r.mask() & (1 << q) != 0,
        Gate::ModularAdd { register, .. } | Gate::PhasePoly { register, .. } => register.mask() & (1 << q) != 0,
        Gate::Swap(a, b) => *a == q || *b == q,
        _ => true,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn exact_pipeline_properties(v in real_samples(6)) {
        let n = v.len();
        let gf = GridFunction::from_samples(v.clone(), &[n], &[1.0]).unwrap();
        let exact = extended_coefficients(&v, Parity::Even).unwrap();

        let full = fsr_fixed(&gf, n, &FsrOptions::exact()).unwrap();
        let grid = full.evaluate_grid(&gf).unwrap();
        for (a, b) in grid.iter().zip(&v) {
            prop_assert!((a - b).abs() < 1e-10);
        }
        for (k, (&s, &c)) in full.signs.iter().zip(&exact).enumerate() {
            if c.abs() > 1e-12 {
                prop_assert_eq!(s as f64, c.signum(), "k = {}", k);
            }
        }
        for ((g, e), d) in full.g.iter().zip(&full.e).zip(&full.d) {
            prop_assert_eq!(*g, 2.0 * e - d - full.shift);
        }
    }

    #[test]
    fn shot_runs_are_reproducible(v in real_samples(6), seed in any::<u64>(), alpha in 0.1f64..10.0) {
        let n = v.len();
        let gf = GridFunction::from_samples(v.clone(), &[n], &[1.0]).unwrap();
        let m = (n / 2).max(1);
        let opts = FsrOptions::shots(2000, seed);
        let a = fsr_fixed(&gf, m, &opts).unwrap();
        let b = fsr_fixed(&gf, m, &opts).unwrap();
        prop_assert_eq!(&a, &b);

        let seq = FsrOptions {
            backend: Backend { policy: ExecPolicy::Sequential, ..Backend::default() },
            ..opts
        };
        prop_assert_eq!(&fsr_fixed(&gf, m, &seq).unwrap(), &a);

        let scaled = gf.scaled(alpha).unwrap();
        prop_assert!((scaled.norm() - alpha * gf.norm()).abs() < 1e-12 * alpha * gf.norm());
        let c = fsr_fixed(&scaled, m, &opts).unwrap();
        prop_assert_eq!(&c.d, &a.d);
    }
}

//! Invariants over random couplings and points.

use proptest::prelude::*;

use susy2d::exact_solver::{
    bound_pairs, hierarchy_factors, partner_spectrum, separable_spectrum, sym_eigenvalue, sym_eigenvalue_from_energies,
};
use susy2d::field::{Field2D, GaussianBump};
use susy2d::model2d::{
    shape_identity_defect, supercharge, Branch, EnergyZero, ModelParams, PartnerPotential, Sign, SuperchargeField,
    SuperchargePart,
};
use susy2d::qes_solver::{admissible_indices, ZeroMode};
use susy2d::verify::{convergence_study, Order};

/// Depths with between two and six Morse levels at the given alpha.
fn couplings() -> impl Strategy<Value = (f64, f64)> {
    (0.6f64..1.6, 1.6f64..6.4).prop_map(|(alpha, levels)| {
        let root = alpha * (levels + 0.5);
        (root * root, alpha)
    })
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn symmetry_eigenvalue_energy_form((depth, alpha) in couplings()) {
        let p = ModelParams::new(depth, alpha, -0.5).unwrap();
        for (n, m) in bound_pairs(&p) {
            let r = sym_eigenvalue(n, m, &p).unwrap();
            let e = sym_eigenvalue_from_energies(n, m, &p).unwrap();
            prop_assert!(rel(r, e) < 1e-12, "({n},{m}): {r} vs {e}");
        }
    }

    #[test]
    fn partner_retention_follows_the_gap((depth, alpha) in couplings()) {
        let p = ModelParams::new(depth, alpha, -0.5).unwrap();
        let t = partner_spectrum(&p).unwrap();
        for l in &t.levels {
            let m = l.m.unwrap();
            prop_assert_eq!(l.retained, m - l.n > 1);
        }
        // every retained partner level is an antisymmetric separable level
        let sep = separable_spectrum(&p).unwrap();
        for l in t.retained() {
            prop_assert!(sep.levels.iter().any(|s| s.energy == l.energy && s.degeneracy == 2));
        }
    }

    #[test]
    fn hierarchy_factors_product_form((depth, alpha) in couplings(), k in 0usize..4) {
        let p = ModelParams::new(depth, alpha, -0.5).unwrap();
        for (n, m) in bound_pairs(&p) {
            let f = hierarchy_factors(n, m, k, &p).unwrap();
            prop_assert_eq!(f.len(), k + 1);
            let d = m as f64 - n as f64;
            let s = p.morse.s(n) + p.morse.s(m);
            for (j, rho) in f.iter().enumerate() {
                let t = (j + 1) as f64;
                let closed = alpha.powi(4) * (d * d - t * t) * (s * s - t * t);
                prop_assert!((rho - closed).abs() <= 1e-9 * closed.abs().max(alpha.powi(4)), "j={j}: {rho} vs {closed}");
            }
        }
    }

    #[test]
    fn shape_invariance_holds_everywhere(
        (depth, alpha) in couplings(),
        a in -3.0f64..-0.1,
        x1 in -1.0f64..6.0,
        d in 0.05f64..5.0,
    ) {
        let p = ModelParams::new(depth, alpha, a).unwrap();
        let defect = shape_identity_defect(&p, &[(x1, x1 + d), (x1 + d, x1)]).unwrap();
        prop_assert!(defect < 1e-9, "{defect}");
    }

    #[test]
    fn potentials_are_exchange_symmetric(
        a in -3.0f64..1.0,
        x1 in -1.0f64..6.0,
        x2 in -1.0f64..6.0,
        full in any::<bool>(),
    ) {
        prop_assume!((x1 - x2).abs() > 1e-3);
        let p = ModelParams::new(30.25, 1.0, a).unwrap();
        let zero = if full { EnergyZero::Full } else { EnergyZero::Reduced };
        for branch in [Branch::Zero, Branch::One] {
            let v = PartnerPotential::new(branch, p, zero);
            let (u, w) = (v.value(x1, x2).unwrap(), v.value(x2, x1).unwrap());
            prop_assert!(rel(u, w) < 1e-13);
        }
    }

    #[test]
    fn potential_difference_is_the_derivative_of_c_minus(
        a in -3.0f64..1.0,
        x1 in -1.0f64..6.0,
        d in 0.05f64..5.0,
    ) {
        let p = ModelParams::new(30.25, 1.0, a).unwrap();
        let x2 = x1 + d;
        let v0 = PartnerPotential::new(Branch::Zero, p, EnergyZero::Full).value(x1, x2).unwrap();
        let v1 = PartnerPotential::new(Branch::One, p, EnergyZero::Full).value(x1, x2).unwrap();
        // (d1 - d2) C- / 2 from the jet of C-
        let c = SuperchargeField::new(SuperchargePart::CMinus, p).jet(x1, x2).unwrap();
        prop_assert!(rel(v0 - v1, 0.5 * (c.d1 - c.d2)) < 1e-10);
    }

    #[test]
    fn zero_modes_are_annihilated(
        (depth, alpha) in couplings(),
        a in -2.5f64..-0.45,
        x1 in -0.5f64..3.0,
        d in 0.2f64..3.0,
    ) {
        let p = ModelParams::new(depth, alpha, a).unwrap();
        let q = supercharge(Sign::Plus, &p);
        for n in admissible_indices(&p) {
            let mode = ZeroMode::new(n, &p).unwrap();
            let j = mode.jet(x1, x1 + d).unwrap();
            let image = q.apply_analytic(&mode, x1, x1 + d).unwrap();
            let scale = j.value.abs() + j.d11.abs() + j.d22.abs() + j.d1.abs() + j.d2.abs();
            prop_assume!(scale > 1e-200);
            prop_assert!(image.abs() <= 1e-8 * scale, "n={n}: {image} vs {scale}");
        }
    }

    #[test]
    fn adjoint_pairs_are_symmetric_in_l2(c1 in (0.0f64..1.5, 4.5f64..6.0)) {
        // <Q- f, g> = <f, Q+ g> for bumps away from the diagonal, by quadrature
        let p = ModelParams::new(30.25, 1.0, -1.0).unwrap();
        let f = GaussianBump { center: c1, width: 0.35, amplitude: 1.0 };
        let g = GaussianBump { center: (c1.0 + 0.3, c1.1 - 0.2), width: 0.3, amplitude: 1.0 };
        let (qm, qp) = (supercharge(Sign::Minus, &p), supercharge(Sign::Plus, &p));
        let (lo1, lo2) = (c1.0 - 2.0, c1.1 - 2.0);
        let n = 160;
        let h = 4.0 / n as f64;
        let (mut left, mut right, mut scale) = (0.0, 0.0, 0.0);
        for i in 0..=n {
            for k in 0..=n {
                let (x1, x2) = (lo1 + i as f64 * h, lo2 + k as f64 * h);
                if x2 - x1 < 0.05 {
                    continue;
                }
                let (a, b) = (qm.apply_analytic(&f, x1, x2).unwrap(), g.value(x1, x2).unwrap());
                let (u, v) = (f.value(x1, x2).unwrap(), qp.apply_analytic(&g, x1, x2).unwrap());
                left += a * b;
                right += u * v;
                scale += (a * b).abs();
            }
        }
        prop_assert!((left - right).abs() <= 1e-6 * scale, "{left} vs {right}");
    }

    #[test]
    fn energy_zero_round_trip(a in -3.0f64..-0.6) {
        let p = ModelParams::new(30.25, 1.0, a).unwrap();
        if let Ok(t) = susy2d::qes_solver::qes_spectrum(&p) {
            let back = t.clone().with_energy_zero(EnergyZero::Reduced).with_energy_zero(EnergyZero::Full);
            for (x, y) in t.levels.iter().zip(&back.levels) {
                prop_assert!((x.energy - y.energy).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn convergence_study_recovers_the_order(p in 0.5f64..4.0, c in 1e-3f64..1e3, h0 in 0.01f64..0.5) {
        let levels: Vec<(f64, f64)> = (0..3).map(|i| {
            let h = h0 / 2f64.powi(i);
            (h, c * h.powf(p))
        }).collect();
        prop_assume!(levels.iter().any(|l| l.1 > 1e-12));
        match convergence_study(&levels).unwrap() {
            Order::Measured(q) => prop_assert!((q - p).abs() < 1e-9),
            Order::Exact => prop_assert!(false, "not round-off"),
        }
    }
}

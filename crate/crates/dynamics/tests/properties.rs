use ce_dynamics::*;
use proptest::prelude::*;

fn disk_point() -> impl Strategy<Value = Complex64> {
    (0.0..2.0f64, 0.0..std::f64::consts::TAU).prop_map(|(r, t)| Complex64::from_polar(r, t))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn chain_identity_holds(c in disk_point(), d in 2u32..=4) {
        let p = FamilyParams::new(d, c).unwrap();
        let o = critical_orbit(&p, 200).unwrap();
        for n in 1..o.length() {
            prop_assert!(chain_identity_residual(&o, n) < 1e-9, "n={n}");
        }
    }

    #[test]
    fn escape_certificate_is_sound(c in disk_point(), d in 2u32..=4) {
        let p = FamilyParams::new(d, c).unwrap();
        let o = critical_orbit(&p, 200).unwrap();
        if let Some(k) = o.escape_index {
            let mut z = o.point(k);
            for _ in 0..5 {
                let next = step(z, &p);
                if !next.norm().is_finite() {
                    break;
                }
                prop_assert!(next.norm() > z.norm());
                z = next;
            }
        }
    }

    #[test]
    fn log_accumulation_is_definitional(c in disk_point(), d in 2u32..=4) {
        let p = FamilyParams::new(d, c).unwrap();
        let o = critical_orbit(&p, 100).unwrap();
        let dm1 = f64::from(d - 1);
        for k in 1..=o.length() {
            let inc = p.log_d() + dm1 * o.point(k).norm().ln();
            prop_assert_eq!(o.log_deriv[k].to_bits(), (o.log_deriv[k - 1] + inc).to_bits());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn transversality_telescopes(c in disk_point(), d in 2u32..=3, n in 1usize..12) {
        let p = FamilyParams::new(d, c).unwrap();
        let o = critical_orbit(&p, n + 1).unwrap();
        prop_assume!(o.length() >= n && !o.is_degenerate());
        let df: Complex64 = (1..=n)
            .map(|j| f64::from(d) * o.point(j).powu(d - 1))
            .product();
        prop_assume!(df.norm() > 1e-6 && df.norm() < 1e6);
        let a = transversality_ratio(&p, n, 0.0).unwrap().estimate;
        let b = transversality_ratio(&p, n + 1, 0.0).unwrap().estimate;
        let want = df.inv();
        prop_assert!(((b - a) - want).norm() <= 1e-12 * want.norm().max(a.norm()));
    }
}

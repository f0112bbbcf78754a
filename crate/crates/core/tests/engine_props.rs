use std::f64::consts::PI;

use fuzzy_nav::engine::{aggregate, defuzz_centroid, fire_rules};
use fuzzy_nav::{builtin, Fis, GridSize};
use proptest::prelude::*;

fn size() -> impl Strategy<Value = GridSize> {
    prop_oneof![
        Just(GridSize::Three),
        Just(GridSize::Five),
        Just(GridSize::Seven)
    ]
}

proptest! {
    #[test]
    fn firing_strength_is_min_of_antecedents(
        size in size(), e_theta in -PI..PI, e_d in 0.0f64..13.0,
    ) {
        let rb = builtin(size);
        let firing = fire_rules(&rb, e_theta, e_d);
        let mut expected = Vec::new();
        for r in &rb.rules {
            let a = rb.angle.degree(&r.angle, e_theta).unwrap();
            let d = rb.distance.degree(&r.distance, e_d).unwrap();
            let s = if a < d { a } else { d };
            if s > 0.0 {
                expected.push((r.right.clone(), s));
            }
        }
        let got: Vec<_> = firing.right.iter().map(|f| (f.label.clone(), f.strength)).collect();
        prop_assert_eq!(got, expected);
    }

    #[test]
    fn aggregate_never_exceeds_strongest_rule(
        size in size(), e_theta in -PI..PI, e_d in 0.0f64..13.0, t in 0.0f64..=1.0,
    ) {
        let rb = builtin(size);
        let firing = fire_rules(&rb, e_theta, e_d);
        let strongest = firing.right.iter().map(|f| f.strength).fold(0.0, f64::max);
        let agg = aggregate(&rb.right, &firing.right).unwrap();
        let x = agg.universe.lo + t * (agg.universe.hi - agg.universe.lo);
        prop_assert!(agg.membership(x) <= strongest + 1e-15);
    }

    #[test]
    fn centroid_stays_in_universe(
        size in size(), e_theta in -10.0f64..10.0, e_d in -5.0f64..50.0,
    ) {
        let rb = builtin(size);
        let firing = fire_rules(&rb, e_theta, e_d);
        for (var, fired) in [(&rb.right, &firing.right), (&rb.left, &firing.left)] {
            let c = defuzz_centroid(&aggregate(var, fired).unwrap());
            prop_assert!(var.universe.contains(c.value));
        }
    }

    #[test]
    fn inference_is_continuous(size in size(), e_theta in -3.0f64..3.0, e_d in 0.0f64..12.0) {
        // Lipschitz-type smoke check on a piecewise-smooth map.
        let fis = Fis::new(builtin(size)).unwrap();
        let h = 1e-7;
        let a = fis.infer(e_theta, e_d);
        let b = fis.infer(e_theta + h, e_d + h);
        prop_assert!((a.v_r() - b.v_r()).abs() < 1e-4);
        prop_assert!((a.v_l() - b.v_l()).abs() < 1e-4);
    }
}

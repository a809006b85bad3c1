use std::sync::OnceLock;

use cellseq::{builtin, LevelCell, Tower};
use proptest::prelude::*;

fn torus() -> &'static Tower {
    static T: OnceLock<Tower> = OnceLock::new();
    T.get_or_init(|| Tower::from_example(&builtin::torus_doubling(2).unwrap()))
}

fn pillow() -> &'static Tower {
    static T: OnceLock<Tower> = OnceLock::new();
    T.get_or_init(|| Tower::from_example(&builtin::pillowcase()))
}

fn cell(t: &Tower, m: u32, pick: u32) -> LevelCell {
    let n = t.level(m).unwrap().len() as u32;
    LevelCell::new(m, pick % n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn itinerary_round_trips(m in 1u32..=5, pick in any::<u32>(), which in 0usize..2) {
        let t = [torus(), pillow()][which];
        let c = cell(t, m, pick);
        let word = t.itinerary(c).unwrap();
        prop_assert_eq!(t.from_itinerary(&word).unwrap(), Some(c));
    }

    #[test]
    fn image_maps_closure_onto_closure(m in 1u32..=4, pick in any::<u32>(), which in 0usize..2) {
        let t = [torus(), pillow()][which];
        let c = cell(t, m, pick);
        let mut img: Vec<LevelCell> = t.closure(c).unwrap().iter().map(|&f| t.image(f).unwrap()).collect();
        let n = img.len();
        img.sort();
        img.dedup();
        prop_assert_eq!(img.len(), n);
        prop_assert_eq!(img, t.closure(t.image(c).unwrap()).unwrap());
    }

    #[test]
    fn image_box_is_the_forward_image(m in 1u32..=4, pick in any::<u32>(), which in 0usize..2) {
        let t = [torus(), pillow()][which];
        let c = cell(t, m, pick);
        let model = &t.realization().unwrap().model;
        let b = t.geom_of(c).unwrap();
        let fx = t.forward_point(&b.barycenter()).unwrap();
        let want = t.geom_of(t.image(c).unwrap()).unwrap().barycenter();
        prop_assert!(model.dist(&fx, &want) < 1e-9);
    }

    #[test]
    fn located_points_lie_in_their_carrier(x in 0.0f64..2.0, y in 0.0f64..1.0, depth in 0u32..=5, which in 0usize..2) {
        let t = [torus(), pillow()][which];
        let model = &t.realization().unwrap().model;
        let a = t.locate(&[x, y], depth).unwrap();
        prop_assert!(model.in_relative_interior(&[x, y], &t.geom_of(a.carrier).unwrap()));
    }

    #[test]
    fn separation_is_symmetric_and_q_in_unit_interval(i in any::<u32>(), j in any::<u32>()) {
        let t = torus();
        let pts = t.vertex_sample(2, 4).unwrap();
        let (x, y) = (&pts[i as usize % pts.len()], &pts[j as usize % pts.len()]);
        let a = t.separation_level(x, y).unwrap();
        prop_assert_eq!(a, t.separation_level(y, x).unwrap());
        if x != y {
            let q = t.quasi_distance(x, y, 2.0).unwrap();
            prop_assert!(q > 0.0 && q <= 1.0);
        }
    }

    #[test]
    fn separation_never_exceeds_meeting_levels(i in any::<u32>(), j in any::<u32>()) {
        // Chambers containing x and y meet at every level up to m(x, y).
        let t = pillow();
        let pts = t.vertex_sample(2, 4).unwrap();
        let (x, y) = (&pts[i as usize % pts.len()], &pts[j as usize % pts.len()]);
        if let Some(m) = t.separation_level(x, y).unwrap().exact() {
            for l in 0..=m {
                let cx = t.star_chambers(t.ancestor(x.carrier, l).unwrap()).unwrap();
                let cy = t.star_chambers(t.ancestor(y.carrier, l).unwrap()).unwrap();
                let meet = cx.iter().any(|&a| cy.iter().any(|&b| t.intersects_at_level(a, b).unwrap()));
                prop_assert!(meet);
            }
        }
    }

    #[test]
    fn distances_are_symmetric_and_bounded(x in proptest::collection::vec(-3.0f64..3.0, 2), y in proptest::collection::vec(-3.0f64..3.0, 2)) {
        let model = &pillow().realization().unwrap().model;
        let d = model.dist(&x, &y);
        prop_assert!((d - model.dist(&y, &x)).abs() < 1e-12);
        prop_assert!(d <= 2f64.sqrt() + 1e-12);
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        prop_assert!((model.dist(&neg, &y) - d).abs() < 1e-12);
    }
}

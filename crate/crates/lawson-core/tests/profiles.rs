use lawson_core::profiles::{competitor, competitor_area, Branch, Lattice2D};
use proptest::prelude::*;
use std::f64::consts::PI;

fn lattice() -> impl Strategy<Value = Lattice2D> {
    prop::sample::select(vec![Lattice2D::hexagonal(), Lattice2D::square()])
}

proptest! {
    #[test]
    fn competitor_is_continuous(lat in lattice(), v in 1e-4..3.0f64) {
        let h = 1e-10;
        let (a, b) = (competitor_area(&lat, v), competitor_area(&lat, v + h));
        prop_assert!((a - b).abs() < 1e-4);
        prop_assert!(b >= a - 1e-12, "competitor profile decreased");
    }

    #[test]
    fn competitor_never_exceeds_planes(lat in lattice(), v in 0.0..5.0f64) {
        prop_assert!(competitor_area(&lat, v) <= 2.0 * lat.cell_area);
    }
}

#[test]
fn branches_agree_at_transitions() {
    for lat in [Lattice2D::hexagonal(), Lattice2D::square()] {
        let [vs, vc] = lat.transitions();
        let sphere = (36.0 * PI * vs * vs).cbrt();
        let cyl = |v: f64| 2.0 * (PI * v).sqrt();
        assert!((sphere - cyl(vs)).abs() < 1e-14);
        assert!((cyl(vc) - 2.0 * lat.cell_area).abs() < 1e-14);
    }
    assert!((competitor_area(&Lattice2D::hexagonal(), 3.0 / (4.0 * PI)) - 3f64.sqrt()).abs() < 1e-14);
    assert!((competitor_area(&Lattice2D::square(), 1.0 / PI) - 2.0).abs() < 1e-14);
    assert_eq!(competitor(&Lattice2D::square(), 0.2).1, Branch::Cylinder);
}

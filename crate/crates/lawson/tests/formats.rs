use lawson::config::RunConfig;
use lawson::formats::{parse_profile_csv, profile_csv, read_obj, write_obj};
use lawson_core::profiles::ProfilePoint;
use proptest::prelude::*;

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![any::<f64>().prop_filter("finite", |x| x.is_finite()), -10.0..10.0f64]
}

proptest! {
    #[test]
    fn obj_roundtrip(
        verts in prop::collection::vec([finite(), finite(), finite()], 3..40),
        tris in prop::collection::vec([0usize..1000, 0usize..1000, 0usize..1000], 0..60),
    ) {
        let n = verts.len();
        let tris: Vec<[usize; 3]> = tris.iter().map(|t| t.map(|i| i % n)).collect();
        let text = write_obj(&verts, &tris, &["header".to_string()]);
        let back = read_obj(&text).unwrap();
        prop_assert_eq!(back.vertices, verts);
        prop_assert_eq!(back.triangles, tris);
    }

    #[test]
    fn csv_roundtrip(rows in prop::collection::vec((finite(), finite(), finite(), finite(), any::<bool>()), 0..30)) {
        let pts: Vec<ProfilePoint> = rows
            .iter()
            .map(|&(phi, v, a, ac, converged)| {
                if converged {
                    ProfilePoint { phi, v_norm: v, a_norm: a, a_competitor: ac, margin: ac - a, converged }
                } else {
                    let nan = f64::NAN;
                    ProfilePoint { phi, v_norm: nan, a_norm: nan, a_competitor: nan, margin: nan, converged }
                }
            })
            .collect();
        let text = profile_csv(&pts, &RunConfig::default().provenance());
        let back = parse_profile_csv(&text).unwrap();
        prop_assert_eq!(back.len(), pts.len());
        for (x, y) in back.iter().zip(&pts) {
            prop_assert_eq!(x.converged, y.converged);
            let pairs = [(x.phi, y.phi), (x.v_norm, y.v_norm), (x.a_norm, y.a_norm), (x.a_competitor, y.a_competitor), (x.margin, y.margin)];
            for (u, v) in pairs {
                prop_assert!(u.to_bits() == v.to_bits() || (u.is_nan() && v.is_nan()));
            }
        }
    }
}

use nalgebra::{Rotation3, Vector3};
use proptest::prelude::*;
use rigidity_lab::document::{parse_obj, to_obj, PolyhedronDocument};
use rigidity_lab::generators;
use rigidity_lab::geom::{convex_hull, Point3, PolyhedralSurface};
use rigidity_lab::pipeline::{analyze, AnalysisOptions};

fn point() -> impl Strategy<Value = [f64; 3]> {
    prop::array::uniform3(-1.0f64..1.0)
}

fn hull() -> impl Strategy<Value = PolyhedralSurface> {
    prop::collection::vec(point(), 6..10).prop_filter_map("degenerate hull", |ps| {
        convex_hull(&ps.iter().map(|p| Point3::from(*p)).collect::<Vec<_>>()).ok()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn verdicts_ignore_similarities(s in hull(), axis in point(), angle in 0.0f64..6.0, shift in point(), scale in 0.5f64..3.0) {
        let axis = Vector3::from(axis);
        prop_assume!(axis.norm() > 0.1);
        let rot = Rotation3::from_axis_angle(&nalgebra::Unit::new_normalize(axis), angle);
        let moved = s.map_vertices(|p| rot * p * scale + Vector3::from(shift)).unwrap();
        let opts = AnalysisOptions::default();
        let a = analyze(&s, None, &opts).unwrap();
        let b = analyze(&moved, None, &opts).unwrap();
        prop_assert_eq!(&a.verdict, &b.verdict);
        prop_assert_eq!(a.census, b.census);
        let (da, db) = (a.deformation.unwrap(), b.deformation.unwrap());
        prop_assert_eq!(da.nullity, db.nullity);
    }

    #[test]
    fn documents_round_trip(s in hull()) {
        let doc = PolyhedronDocument::from_surface(&s);
        let back = PolyhedronDocument::from_json(&doc.to_json()).unwrap();
        prop_assert_eq!(&back.vertices, &doc.vertices);
        prop_assert_eq!(&back.faces, &doc.faces);
        let (v, f) = parse_obj(&to_obj(&doc.vertices, &doc.faces)).unwrap();
        prop_assert_eq!(v, doc.vertices);
        prop_assert_eq!(f, doc.faces);
    }

    #[test]
    fn schonhardt_twist_keeps_side_lengths(theta in 0.01f64..1.0) {
        let s = generators::schonhardt(&generators::SchonhardtParams::new(theta, 1.0, 2.0).unwrap()).unwrap();
        let v = s.vertices();
        // the segments from each top vertex to the bottom vertex below it are congruent
        let l: Vec<f64> = (0..3).map(|i| (v[i] - v[i + 3]).norm()).collect();
        prop_assert!((l[0] - l[1]).abs() < 1e-12 && (l[1] - l[2]).abs() < 1e-12);
        prop_assert!(s.ensure_valid().is_ok());
    }
}

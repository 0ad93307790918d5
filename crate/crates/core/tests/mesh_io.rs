use capillary::surface::io::{parse_obj, parse_off, write_obj, write_off};
use capillary::surface::shapes::icosphere;
use capillary::surface::{generate_cap, load_mesh, save_mesh, CapillarySurface};
use capillary::wedge::{ContactAngles, Wedge};
use nalgebra::Vector3;

#[test]
fn off_and_obj_round_trip_exactly() {
    let m = icosphere(2, Vector3::new(0.1, 0.2, 0.3), 1.7).unwrap();
    for text in [write_off(&m), write_obj(&m)] {
        let back = if text.starts_with("OFF") { parse_off(&text) } else { parse_obj(&text) }.unwrap();
        assert_eq!(back.vertices(), m.vertices());
        assert_eq!(back.faces(), m.faces());
    }
}

#[test]
fn saved_cap_reloads_as_capillary_surface() {
    let dir = tempfile::tempdir().unwrap();
    let w = Wedge::classical(std::f64::consts::FRAC_PI_2).unwrap();
    let a = ContactAngles::new(vec![1.2, 1.4]).unwrap();
    let cap = generate_cap(&w, &a, 1.0, 3).unwrap().to_mesh().unwrap();
    for name in ["cap.off", "cap.obj"] {
        let path = dir.path().join(name);
        save_mesh(cap.as_mesh().unwrap().mesh(), &path).unwrap();
        let mesh = load_mesh(&path).unwrap();
        let s = CapillarySurface::from_mesh(mesh, w.clone(), a.clone()).unwrap();
        assert_eq!(s.as_mesh().unwrap().tags(), cap.as_mesh().unwrap().tags());
    }
}

#[test]
fn unknown_extension_is_rejected() {
    let m = icosphere(0, Vector3::zeros(), 1.0).unwrap();
    assert!(save_mesh(&m, std::path::Path::new("/tmp/mesh.stl")).is_err());
}

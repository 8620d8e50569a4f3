mod common;

use common::{repo_file, spec};
use hetlat::spec::{emit_spec, load_spec, SpecError};
use hetlat::stl::StlFormat;
use hetlat_core::field::CellTopology;
use hetlat_core::{BeamTopology, FieldMode, ParamKey, TpmsKind};
use proptest::prelude::*;
use serde_json::json;

#[test]
fn minimal_spec_gets_defaults() {
    let s = spec(r#"{"topology": "cubic", "u": 10, "N": [1, 1, 1], "beam_diameter": "1"}"#);
    assert_eq!(s.topology, CellTopology::Beam(BeamTopology::Cubic));
    assert_eq!(s.mode, FieldMode::PerCell);
    assert_eq!(s.resolution, 48);
    assert_eq!(s.format, StlFormat::Binary);
    assert_eq!(s.params.get(ParamKey::NodeScale).unwrap().as_constant(), Some(1.1));
    assert_eq!(s.inner_radius, None);
}

#[test]
fn thickness_on_a_beam_is_rejected() {
    let e = load_spec(r#"{"topology": "cubic", "u": 10, "N": [1, 1, 1], "beam_diameter": "1", "thickness": "1"}"#)
        .unwrap_err();
    assert!(e.to_string().contains("thickness"), "{e}");
    let e = load_spec(r#"{"topology": "gyroid", "kind": "beam", "u": 10, "N": [1, 1, 1], "thickness": "1"}"#)
        .unwrap_err();
    assert!(matches!(&e, SpecError::Schema { path, .. } if path == "kind"), "{e}");
}

#[test]
fn graded_schwarz_p_is_valid() {
    let s = spec(&std::fs::read_to_string(repo_file("specs/schwarz_p_graded.json")).unwrap());
    assert_eq!(s.topology, CellTopology::Tpms(TpmsKind::SchwarzP));
    assert_eq!(s.counts, [10, 10, 10]);
    assert_eq!(s.resolution, 64);
    let field = hetlat::compose_spec(&s).unwrap();
    let first = field.cell_parameters([1, 1, 1]).unwrap().thickness.unwrap();
    let last = field.cell_parameters([1, 1, 10]).unwrap().thickness.unwrap();
    assert_eq!((first, last), (0.1, 6.9 * 1.0 + 0.1));
}

#[test]
fn bundled_specs_load() {
    for name in ["cubic", "bcc_parabola", "tire", "schwarz_p_graded"] {
        let path = repo_file(&format!("specs/{name}.json"));
        let s = hetlat::read_spec(&path).unwrap_or_else(|e| panic!("{name}: {e}"));
        hetlat::compose_spec(&s).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}

#[test]
fn schema_errors_name_the_field() {
    let cases = [
        (r#"{"topology": "cubic", "u": 10, "N": [1, 0, 1], "beam_diameter": "1"}"#, "N[1]"),
        (r#"{"topology": "cubic", "u": -1, "N": [1, 1, 1], "beam_diameter": "1"}"#, "u"),
        (r#"{"topology": "cubic", "u": 10, "N": [1, 1, 1], "beam_diameter": "1", "resolution": 4}"#, "resolution"),
        (r#"{"topology": "cubic", "u": 10, "N": [1, 1, 1], "beam_diameter": "1", "profile": "hex"}"#, "profile"),
        (r#"{"topology": "cubic", "u": 10, "N": [1, 1, 1], "beam_diameter": "1", "format": "obj"}"#, "format"),
        (r#"{"topology": "cubic", "u": 10, "N": [1, 1, 1], "beam_diameter": "1", "mode": "smooth"}"#, "mode"),
        (
            r#"{"topology": "cubic", "u": 10, "N": [1, 2, 1], "beam_diameter": "1", "transform": {"cylindrical": {"inner_radius": 5}}}"#,
            "N[1]",
        ),
    ];
    for (text, want) in cases {
        match load_spec(text) {
            Err(SpecError::Schema { path, .. }) => assert_eq!(path, want, "{text}"),
            other => panic!("{text}: {other:?}"),
        }
    }
    let e = load_spec(r#"{"topology": "cubic", "u": 10, "N": [1, 1, 1], "beam_diameter": "1", "colour": 1}"#)
        .unwrap_err();
    assert!(e.to_string().contains("colour"), "{e}");
}

#[test]
fn profile_keys_follow_the_profile() {
    let base = json!({"topology": "bcc", "u": 10, "N": [1, 1, 1], "beam_diameter": "1", "profile": "rounded_square"});
    assert!(load_spec(&base.to_string()).is_err());
    let mut ok = base.clone();
    ok["fillet_ratio"] = json!("0.5");
    spec(&ok.to_string());
    let mut square = base;
    square["profile"] = json!("square");
    square["fillet_ratio"] = json!(0.5);
    assert!(load_spec(&square.to_string()).is_err());
}

const EXPRS: [&str; 6] = ["1", "0.5 + x", "1 + 2*rho", "-4*6*(x-0.5)^2 + 6 + 1", "2 - y^2", "0.25*(1 + sin(pi*z))"];

prop_compose! {
    fn any_spec()(
        topo in 0usize..16,
        u in 1.0f64..50.0,
        n in prop::array::uniform3(1i64..6),
        profile in 0usize..3,
        e in prop::array::uniform4(0usize..EXPRS.len()),
        number in prop::option::of(0.1f64..3.0),
        continuous in any::<bool>(),
        resolution in prop::option::of(8i64..200),
        ascii in any::<bool>(),
        ring in prop::option::of(1.0f64..100.0),
    ) -> serde_json::Value {
        let ids: Vec<&str> = BeamTopology::ALL.iter().map(|b| b.id()).chain(TpmsKind::ALL.iter().map(|t| t.id())).collect();
        let beam = topo < 13;
        let mut v = json!({"topology": ids[topo], "u": u, "N": n});
        let expr = |i: usize| if beam { EXPRS[e[i]].replace("rho", "x") } else { EXPRS[e[i]].replace("rho", "z") };
        if beam {
            v["beam_diameter"] = match number { Some(x) => json!(x), None => json!(expr(0)) };
            v["node_scale"] = json!(expr(1));
            let shape = ["circle", "square", "rounded_square"][profile];
            v["profile"] = json!(shape);
            if shape == "rounded_square" {
                v["fillet_ratio"] = json!(expr(2));
            }
            if BeamTopology::ALL[topo].takes_truncation() {
                v["trunc"] = json!(expr(3));
            }
            if let Some(r) = ring {
                v["N"][1] = json!(n[1].max(3));
                v["transform"] = json!({"cylindrical": {"inner_radius": r}});
                v["beam_diameter"] = json!("1 + 2*rho");
            }
        } else {
            v["thickness"] = json!(expr(0));
        }
        if continuous {
            v["mode"] = json!("continuous");
        }
        if let Some(r) = resolution {
            v["resolution"] = json!(r);
        }
        if ascii {
            v["format"] = json!("ascii");
        }
        v
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn emit_then_load_is_identity(doc in any_spec()) {
        let s = spec(&doc.to_string());
        let again = load_spec(&emit_spec(&s)).unwrap();
        prop_assert_eq!(&again, &s);
        prop_assert_eq!(emit_spec(&again), emit_spec(&s));
    }
}

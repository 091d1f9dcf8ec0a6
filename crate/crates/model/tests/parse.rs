//! Model-file parsing: happy paths and every rejection case.

use approx::assert_relative_eq;
use model::{parse_model, ModelError};
use spatial::{spatial_inertia, Mat3, Vec3};

fn pendulum_json() -> String {
    r#"{
        "name": "pendulum",
        "gravity": [0.0, -9.81, 0.0],
        "joints": [
            { "id": 1, "parent": 0, "type": "revolute", "axis": [0, 0, 1],
              "placement": { "xyz": [0, 0, 0], "rpy": [0, 0, 0] },
              "inertia": { "mass": 1.0, "com": [1, 0, 0], "I": [0, 0, 0, 0, 0, 0] } }
        ]
    }"#
    .to_string()
}

fn chain2_json() -> String {
    r#"{
        "name": "chain2",
        "joints": [
            { "id": 1, "parent": 0, "type": "revolute", "axis": [0, 0, 1],
              "placement": { "xyz": [0, 0, 0], "rpy": [0, 0, 0] },
              "inertia": { "mass": 1.0, "com": [0.5, 0, 0], "I": [0.1, 0.1, 0.1, 0, 0, 0] } },
            { "id": 2, "parent": 1, "type": "revolute", "axis": [0, 0, 1],
              "placement": { "xyz": [1, 0, 0], "rpy": [0, 0, 0] },
              "inertia": { "mass": 1.0, "com": [0.5, 0, 0], "I": [0.1, 0.1, 0.1, 0, 0, 0] } }
        ]
    }"#
    .to_string()
}

#[test]
fn minimal_pendulum_parses() {
    let tree = parse_model(&pendulum_json()).unwrap();
    assert_eq!(tree.n_bodies(), 1);
    assert_eq!(tree.nv(), 1);
    assert_eq!(tree.nq(), 1);
    assert_eq!(tree.parent(0), None);
    assert_relative_eq!(tree.gravity, Vec3::new(0.0, -9.81, 0.0), epsilon = 1e-15);
    let expect = spatial_inertia(1.0, &Vec3::new(1.0, 0.0, 0.0), &Mat3::zeros());
    assert_relative_eq!(*tree.inertia(0), expect, epsilon = 1e-15);
}

#[test]
fn gravity_defaults_to_minus_z() {
    let text = r#"{ "name": "g", "joints": [
        { "id": 1, "parent": 0, "type": "spherical",
          "placement": { "xyz": [0, 0, 0], "rpy": [0, 0, 0] },
          "inertia": { "mass": 1.0, "com": [0, 0, 0], "I": [1, 1, 1, 0, 0, 0] } } ] }"#;
    let tree = parse_model(text).unwrap();
    assert_relative_eq!(tree.gravity, Vec3::new(0.0, 0.0, -9.81), epsilon = 1e-15);
}

#[test]
fn chain_topology_sets() {
    let tree = parse_model(&chain2_json()).unwrap();
    assert_eq!(tree.ancestors(1), &[0, 1]);
    assert_eq!(tree.subtree(0), &[0, 1]);
    assert!(tree.leq(0, 1));
    assert!(tree.leq(1, 1));
    assert!(!tree.leq(1, 0));
    assert_eq!(tree.depth(), 2);
}

#[test]
fn forward_parent_rejected() {
    let text = chain2_json().replace(r#""id": 2, "parent": 1"#, r#""id": 2, "parent": 5"#);
    match parse_model(&text) {
        Err(ModelError::BadParent { id: 2, parent: 5 }) => {}
        other => panic!("expected forward-parent error, got {other:?}"),
    }
}

#[test]
fn out_of_order_ids_rejected() {
    let text = chain2_json().replace(r#""id": 2"#, r#""id": 3"#);
    match parse_model(&text) {
        Err(ModelError::BadId { expected: 2, found: 3 }) => {}
        other => panic!("expected id error, got {other:?}"),
    }
}

#[test]
fn syntax_error_carries_line_number() {
    let text = "{\n  \"name\": \"x\",\n  \"joints\": [,]\n}";
    match parse_model(text) {
        Err(ModelError::Syntax { line, .. }) => assert_eq!(line, 3),
        other => panic!("expected syntax error, got {other:?}"),
    }
}

#[test]
fn non_unit_axis_rejected_but_near_unit_normalized() {
    let bad = pendulum_json().replace("[0, 0, 1]", "[0, 0, 2]");
    match parse_model(&bad) {
        Err(ModelError::NonUnitAxis { id: 1, norm }) => assert_relative_eq!(norm, 2.0),
        other => panic!("expected axis error, got {other:?}"),
    }
    let near = pendulum_json().replace("[0, 0, 1]", "[0.0, 0.0, 1.0000005]");
    let tree = parse_model(&near).unwrap();
    match tree.joint(0) {
        model::JointModel::Revolute { axis } => {
            assert_relative_eq!(axis.norm(), 1.0, epsilon = 1e-14);
        }
        other => panic!("unexpected joint {other:?}"),
    }
}

#[test]
fn missing_axis_rejected() {
    let text = pendulum_json().replace(r#""axis": [0, 0, 1],"#, "");
    match parse_model(&text) {
        Err(ModelError::MissingAxis { id: 1, .. }) => {}
        other => panic!("expected missing-axis error, got {other:?}"),
    }
}

#[test]
fn unknown_joint_type_rejected() {
    let text = pendulum_json().replace(r#""type": "revolute""#, r#""type": "helical""#);
    match parse_model(&text) {
        Err(ModelError::UnknownKind { id: 1, found }) => assert_eq!(found, "helical"),
        other => panic!("expected unknown-kind error, got {other:?}"),
    }
}

#[test]
fn non_psd_inertia_rejected() {
    let neg_mass = pendulum_json().replace(r#""mass": 1.0"#, r#""mass": -1.0"#);
    assert!(matches!(parse_model(&neg_mass), Err(ModelError::NonPsdInertia { id: 1, .. })));

    let neg_eig = pendulum_json().replace("[0, 0, 0, 0, 0, 0]", "[-1, 1, 1, 0, 0, 0]");
    assert!(matches!(parse_model(&neg_eig), Err(ModelError::NonPsdInertia { id: 1, .. })));
}

#[test]
fn contacts_parse_and_validate() {
    let text = chain2_json().replace(
        r#""joints""#,
        r#""contacts": [ { "body": 2, "point": [1.0, 0.0, 0.0] } ],
        "joints""#,
    );
    let tree = parse_model(&text).unwrap();
    assert_eq!(tree.contacts().len(), 1);
    assert_eq!(tree.contacts()[0].body, 1);
    assert_relative_eq!(tree.contacts()[0].point, Vec3::new(1.0, 0.0, 0.0));

    let bad = text.replace(r#""body": 2"#, r#""body": 5"#);
    assert!(matches!(
        parse_model(&bad),
        Err(ModelError::BadContactBody { body: 5, .. })
    ));
}

#[test]
fn generated_files_round_trip() {
    let file = model::random_model_file(6, 3, 0.4);
    let text = file.to_json();
    let tree = parse_model(&text).unwrap();
    let direct = file.into_tree().unwrap();
    assert_eq!(tree.n_bodies(), direct.n_bodies());
    assert_eq!(tree.nv(), direct.nv());
    assert_eq!(tree.nq(), direct.nq());
    for i in 0..tree.n_bodies() {
        assert_eq!(tree.parent(i), direct.parent(i));
        assert_eq!(tree.joint(i), direct.joint(i));
        assert_relative_eq!(*tree.inertia(i), *direct.inertia(i), epsilon = 1e-15);
        assert_relative_eq!(tree.placement(i).rot, direct.placement(i).rot, epsilon = 1e-15);
        assert_relative_eq!(tree.placement(i).pos, direct.placement(i).pos, epsilon = 1e-15);
    }
}

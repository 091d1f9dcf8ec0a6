//! Unit tests for the spatial vector operators and coordinate transforms.

use approx::assert_relative_eq;
use nalgebra::Vector6;
use spatial::suite::{identity_suite, rand_vec3, rand_vec6, rng};
use spatial::*;

fn assert_suite_check(name: &str) {
    let results = identity_suite(64, 0xC0FFEE);
    let r = results
        .iter()
        .find(|c| c.name == name)
        .unwrap_or_else(|| panic!("no suite check named {name}"));
    assert!(
        r.pass(),
        "{}: max residual {:.3e} exceeds tol {:.3e}",
        r.name,
        r.max_residual,
        r.tol
    );
}

#[test]
fn p1_cross_motion_antisymmetry() {
    assert_suite_check("p1_cross_motion_antisymmetry");
}

#[test]
fn p2_crm_commutator() {
    assert_suite_check("p2_crm_commutator");
}

#[test]
fn p3_crf_commutator() {
    assert_suite_check("p3_crf_commutator");
}

#[test]
fn p4_crf_bar_commutator() {
    assert_suite_check("p4_crf_bar_commutator");
}

#[test]
fn p5_motion_force_pairing() {
    assert_suite_check("p5_motion_force_pairing");
}

#[test]
fn p6_force_motion_pairing() {
    assert_suite_check("p6_force_motion_pairing");
}

#[test]
fn p7_crf_triple_product() {
    assert_suite_check("p7_crf_triple_product");
}

#[test]
fn p8_cross_motion_transpose() {
    assert_suite_check("p8_cross_motion_transpose");
}

#[test]
fn p9_cross_force_transpose() {
    assert_suite_check("p9_cross_force_transpose");
}

#[test]
fn p10_right_association() {
    assert_suite_check("p10_right_association");
}

#[test]
fn crf_is_negative_transpose_of_crm() {
    let mut r = rng(7);
    for _ in 0..32 {
        let v = rand_vec6(&mut r);
        // Exact structural identity, not just numerically close.
        assert_eq!(crf(&v), -crm(&v).transpose());
    }
}

#[test]
fn skew_matches_cross_product() {
    let mut r = rng(11);
    for _ in 0..32 {
        let a = rand_vec3(&mut r);
        let b = rand_vec3(&mut r);
        assert_relative_eq!(skew(&a) * b, a.cross(&b), epsilon = 1e-15);
    }
    let ex = Vec3::x();
    let ey = Vec3::y();
    assert_eq!(skew(&ex) * ey, Vec3::z());
}

#[test]
fn crm_blocks_on_unit_angular_axis() {
    // v = (e_z; 0): top-left and bottom-right blocks are skew(e_z), rest zero.
    let v = motion_vec(Vec3::z(), Vec3::zeros());
    let m = crm(&v);
    let sz = skew(&Vec3::z());
    for i in 0..3 {
        for j in 0..3 {
            assert_eq!(m[(i, j)], sz[(i, j)]);
            assert_eq!(m[(i + 3, j + 3)], sz[(i, j)]);
            assert_eq!(m[(i, j + 3)], 0.0);
        }
    }
    assert_eq!(crm(&Vector6::zeros()), Mat6::zeros());
}

#[test]
fn cross_ops_match_operator_matrices() {
    let mut r = rng(13);
    for _ in 0..32 {
        let v = rand_vec6(&mut r);
        let u = rand_vec6(&mut r);
        let f = rand_vec6(&mut r);
        assert_relative_eq!(cross_motion(&v, &u), crm(&v) * u, epsilon = 1e-14);
        assert_relative_eq!(cross_force(&v, &f), crf(&v) * f, epsilon = 1e-14);
        assert_relative_eq!(crf_bar(&f) * v, crf(&v) * f, epsilon = 1e-13);
    }
}

fn rand_transform(r: &mut rand_chacha::ChaCha8Rng) -> SpatialTransform {
    let axis = rand_vec3(r);
    let angle = rand_vec3(r).x;
    let rot = nalgebra::Rotation3::new(axis.normalize() * angle);
    SpatialTransform::new(*rot.matrix(), rand_vec3(r))
}

#[test]
fn transform_roundtrip() {
    let mut r = rng(17);
    for _ in 0..32 {
        let x = rand_transform(&mut r);
        let v = rand_vec6(&mut r);
        let f = rand_vec6(&mut r);
        let p = rand_vec3(&mut r);
        assert_relative_eq!(x.inv_apply_motion(&x.apply_motion(&v)), v, epsilon = 1e-12);
        assert_relative_eq!(x.inv_apply_force(&x.apply_force(&f)), f, epsilon = 1e-12);
        assert_relative_eq!(x.inverse().transform_point(&x.transform_point(&p)), p, epsilon = 1e-12);

        let id = x.compose(&x.inverse());
        assert_relative_eq!(id.rot, Mat3::identity(), epsilon = 1e-12);
        assert_relative_eq!(id.pos, Vec3::zeros(), epsilon = 1e-12);
    }
}

#[test]
fn compose_matches_sequential_application() {
    let mut r = rng(19);
    for _ in 0..32 {
        let a = rand_transform(&mut r);
        let b = rand_transform(&mut r);
        let v = rand_vec6(&mut r);
        let ab = a.compose(&b);
        assert_relative_eq!(ab.apply_motion(&v), a.apply_motion(&b.apply_motion(&v)), epsilon = 1e-12);
        assert_relative_eq!(
            ab.motion_matrix(),
            a.motion_matrix() * b.motion_matrix(),
            epsilon = 1e-12
        );
    }
}

#[test]
fn pure_translation_motion_action() {
    // A pure translation by p maps (w; v) to (w; v - p x w).
    let p = Vec3::new(0.3, -1.2, 0.7);
    let x = SpatialTransform::new(Mat3::identity(), p);
    let w = Vec3::new(0.5, 0.25, -1.0);
    let v = motion_vec(w, Vec3::zeros());
    let out = x.apply_motion(&v);
    assert_relative_eq!(ang_part(&out), w, epsilon = 1e-15);
    assert_relative_eq!(lin_part(&out), -p.cross(&w), epsilon = 1e-15);
}

#[test]
fn motion_and_force_matrices_agree_with_apply() {
    let mut r = rng(23);
    for _ in 0..32 {
        let x = rand_transform(&mut r);
        let v = rand_vec6(&mut r);
        let f = rand_vec6(&mut r);
        assert_relative_eq!(x.apply_motion(&v), x.motion_matrix() * v, epsilon = 1e-13);
        assert_relative_eq!(x.apply_force(&f), x.force_matrix() * f, epsilon = 1e-13);
        // Force map is the inverse transpose of the motion map, so power is invariant.
        let power = x.apply_motion(&v).dot(&x.apply_force(&f));
        assert_relative_eq!(power, v.dot(&f), epsilon = 1e-12);
    }
}

#[test]
fn from_pose_maps_parent_points_into_child_frame() {
    // Child frame axes rotated 90 deg about z, origin at (1, 2, 0) in parent.
    let e = nalgebra::Rotation3::from_axis_angle(&Vec3::z_axis(), std::f64::consts::FRAC_PI_2);
    let origin = Vec3::new(1.0, 2.0, 0.0);
    let x = SpatialTransform::from_pose(e.matrix(), &origin);
    // The child origin maps to zero; a point one unit along the child x axis
    // (which is the parent y axis) maps to (1, 0, 0).
    assert_relative_eq!(x.transform_point(&origin), Vec3::zeros(), epsilon = 1e-15);
    assert_relative_eq!(
        x.transform_point(&(origin + Vec3::y())),
        Vec3::x(),
        epsilon = 1e-15
    );
}

#[test]
fn spatial_inertia_structure() {
    let mass = 2.0;
    let com = Vec3::new(1.0, 0.0, 0.0);
    let icom = Mat3::zeros();
    let i = spatial_inertia(mass, &com, &icom);
    assert_relative_eq!(i, i.transpose(), epsilon = 1e-15);
    // Lower-right block is mass times identity; lower-left recovers m * skew(com)^T.
    for r in 0..3 {
        for c in 0..3 {
            let expect = if r == c { mass } else { 0.0 };
            assert_eq!(i[(r + 3, c + 3)], expect);
            assert_eq!(i[(r + 3, c)], mass * skew(&com).transpose()[(r, c)]);
        }
    }
}

#[test]
fn body_wrench_of_offset_mass_under_gravity() {
    // Mass 2 at com (1,0,0), accelerating straight down at g: the wrench is the
    // force m*a through the com, i.e. a moment about z of m*a_y*1.
    let i = spatial_inertia(2.0, &Vec3::new(1.0, 0.0, 0.0), &Mat3::zeros());
    let a = motion_vec(Vec3::zeros(), Vec3::new(0.0, -9.81, 0.0));
    let f = body_wrench(&i, &Vector6::zeros(), &a);
    assert_relative_eq!(ang_part(&f), Vec3::new(0.0, 0.0, -19.62), epsilon = 1e-12);
    assert_relative_eq!(lin_part(&f), Vec3::new(0.0, -19.62, 0.0), epsilon = 1e-12);
}

#[test]
fn body_wrench_matches_momentum_bias_form() {
    let mut r = rng(29);
    for _ in 0..16 {
        let i = spatial::suite::rand_psd6(&mut r);
        let v = rand_vec6(&mut r);
        let a = rand_vec6(&mut r);
        assert_relative_eq!(body_wrench(&i, &v, &a), i * a + crf(&v) * (i * v), epsilon = 1e-12);
    }
}

#[test]
fn inertia_transform_is_congruence() {
    let mut r = rng(31);
    for _ in 0..32 {
        let x = rand_transform(&mut r);
        let com = rand_vec3(&mut r);
        let l = rand_mat3(&mut r);
        let i = spatial_inertia(1.5, &com, &(l * l.transpose()));
        let it = xform_inertia(&x, &i);
        assert_relative_eq!(it, it.transpose(), epsilon = 1e-12);
        let eigs = it.symmetric_eigenvalues();
        assert!(eigs.min() >= -1e-10, "transformed inertia lost PSD: {eigs}");
        // Kinetic energy is frame invariant.
        let v = rand_vec6(&mut r);
        let vd = x.apply_motion(&v);
        assert_relative_eq!(vd.dot(&(it * vd)), v.dot(&(i * v)), epsilon = 1e-10);
    }
}

fn rand_mat3(r: &mut rand_chacha::ChaCha8Rng) -> Mat3 {
    let v1 = rand_vec3(r);
    let v2 = rand_vec3(r);
    let v3 = rand_vec3(r);
    Mat3::from_columns(&[v1, v2, v3])
}

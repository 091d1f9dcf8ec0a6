//! Reusable randomized identity checks for the spatial algebra and tensor
//! operators. Each check reports its worst residual over a number of random
//! unit-scale instances; the CLI validation command and the test suites all
//! run the same list.

use nalgebra::DMatrix;
use rand::RngExt;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::*;
use crate::tensor::*;

#[derive(Clone, Debug)]
pub struct CheckResult {
    pub name: String,
    pub max_residual: f64,
    pub tol: f64,
}

impl CheckResult {
    pub fn pass(&self) -> bool {
        self.max_residual <= self.tol
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rand_unit(r: &mut ChaCha8Rng) -> f64 {
    r.random_range(-1.0..1.0)
}

pub fn rand_vec3(r: &mut ChaCha8Rng) -> Vec3 {
    Vec3::new(rand_unit(r), rand_unit(r), rand_unit(r))
}

pub fn rand_vec6(r: &mut ChaCha8Rng) -> nalgebra::Vector6<f64> {
    nalgebra::Vector6::from_fn(|_, _| rand_unit(r))
}

pub fn rand_mat(r: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rand_unit(r))
}

pub fn rand_motion_mat(r: &mut ChaCha8Rng, n: usize) -> MotionMatrix {
    MotionMatrix::from_fn(n, |_, _| rand_unit(r))
}

/// Random symmetric PSD 6×6 built as LLᵀ.
pub fn rand_psd6(r: &mut ChaCha8Rng) -> Mat6 {
    let l = Mat6::from_fn(|_, _| rand_unit(r));
    l * l.transpose()
}

fn mixed_dim(r: &mut ChaCha8Rng) -> usize {
    [1usize, 2, 3, 6][r.random_range(0..4)]
}


fn rmm(r: &mut ChaCha8Rng) -> MotionMatrix {
    let n = mixed_dim(r);
    rand_motion_mat(r, n)
}

fn mdiff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    assert_eq!(a.shape(), b.shape());
    (a - b).abs().max()
}

fn tdiff(a: &Tensor3, b: &Tensor3) -> f64 {
    (a - b).max_abs()
}

struct Suite {
    seed: u64,
    instances: usize,
    results: Vec<CheckResult>,
}

impl Suite {
    fn run(&mut self, name: &str, tol: f64, mut f: impl FnMut(&mut ChaCha8Rng) -> f64) {
        let mut r = rng(self.seed.wrapping_add(self.results.len() as u64 * 0x9e37_79b9));
        let mut worst = 0.0f64;
        for _ in 0..self.instances {
            worst = worst.max(f(&mut r));
        }
        self.results.push(CheckResult { name: name.to_string(), max_residual: worst, tol });
    }
}

/// Runs the full vector (p1..p10) and matrix/tensor (m1..m27) identity
/// families, `instances` random draws each.
pub fn identity_suite(instances: usize, seed: u64) -> Vec<CheckResult> {
    let mut s = Suite { seed, instances, results: Vec::new() };
    let pt = 1e-12;
    let mt = 1e-11;

    s.run("p1_cross_motion_antisymmetry", pt, |r| {
        let (v, u) = (rand_vec6(r), rand_vec6(r));
        (cross_motion(&v, &u) + cross_motion(&u, &v)).abs().max()
    });
    s.run("p2_crm_commutator", pt, |r| {
        let (v, m) = (rand_vec6(r), rand_vec6(r));
        (crm(&cross_motion(&v, &m)) - (crm(&v) * crm(&m) - crm(&m) * crm(&v))).abs().max()
    });
    s.run("p3_crf_commutator", pt, |r| {
        let (v, m) = (rand_vec6(r), rand_vec6(r));
        (crf(&cross_motion(&v, &m)) - (crf(&v) * crf(&m) - crf(&m) * crf(&v))).abs().max()
    });
    s.run("p4_crf_bar_commutator", pt, |r| {
        let (v, f) = (rand_vec6(r), rand_vec6(r));
        (crf_bar(&cross_force(&v, &f)) - (crf(&v) * crf_bar(&f) - crf_bar(&f) * crm(&v)))
            .abs()
            .max()
    });
    s.run("p5_motion_force_pairing", pt, |r| {
        let (u, v, f) = (rand_vec6(r), rand_vec6(r), rand_vec6(r));
        (cross_motion(&u, &v).dot(&f) + v.dot(&cross_force(&u, &f))).abs()
    });
    s.run("p6_force_motion_pairing", pt, |r| {
        let (u, v, f) = (rand_vec6(r), rand_vec6(r), rand_vec6(r));
        (cross_force(&u, &f).dot(&v) + f.dot(&cross_motion(&u, &v))).abs()
    });
    s.run("p7_crf_triple_product", pt, |r| {
        let (u, v, f) = (rand_vec6(r), rand_vec6(r), rand_vec6(r));
        (u.dot(&(crf(&v) * f)) - f.dot(&cross_motion(&u, &v))).abs()
    });
    s.run("p8_cross_motion_transpose", pt, |r| {
        let (u, v) = (rand_vec6(r), rand_vec6(r));
        (cross_motion(&u, &v) + crf(&u).transpose() * v).abs().max()
    });
    s.run("p9_cross_force_transpose", pt, |r| {
        let (u, f) = (rand_vec6(r), rand_vec6(r));
        (cross_force(&u, &f) + crm(&u).transpose() * f).abs().max()
    });
    s.run("p10_right_association", pt, |r| {
        let (u, v, m) = (rand_vec6(r), rand_vec6(r), rand_vec6(r));
        (crm(&u) * crm(&v) * m - cross_motion(&u, &cross_motion(&v, &m))).abs().max()
    });

    s.run("m1_crossf_is_neg_rot12_crossm", mt, |r| {
        let u = rmm(r);
        tdiff(&crossf_op(&u), &-&crossm_op(&u).rot12())
    });
    s.run("m2_left_contraction_transpose", mt, |r| {
        let (u, v) = (rmm(r), rmm(r));
        let lhs = mtprod(&(-v.transpose()), &crossf_op(&u));
        let rhs = tmprod(&crossm_op(&u), &v).rot12();
        tdiff(&lhs, &rhs)
    });
    s.run("m3_left_contraction_with_force", mt, |r| {
        let (u, v) = (rmm(r), rmm(r));
        let f = rmm(r);
        let lhs = tmprod(&mtprod(&(-v.transpose()), &crossf_op(&u)), &f);
        let rhs = tmprod(&tmprod(&crossm_op(&u), &v).rot12(), &f);
        tdiff(&lhs, &rhs)
    });
    s.run("m4_single_vector_rot23", mt, |r| {
        let u = rmm(r);
        let v = rand_vec6(r);
        let lhs = tmprod(&crossm_op(&u), &v).rot23().squeeze3();
        let rhs = -crm(&v) * &u;
        mdiff(&lhs, &DMatrix::from_column_slice(6, u.ncols(), rhs.as_slice()))
    });
    s.run("m5_crossf_vs_crossfbar", mt, |r| {
        let (u, f) = (rmm(r), rmm(r));
        tdiff(&tmprod(&crossf_op(&u), &f), &tmprod(&crossfbar_op(&f), &u).rot23())
    });
    s.run("m6_crossfbar_vs_crossf", mt, |r| {
        let (u, f) = (rmm(r), rmm(r));
        tdiff(&tmprod(&crossfbar_op(&f), &u), &tmprod(&crossf_op(&u), &f).rot23())
    });
    s.run("m7_scalar_homogeneity", mt, |r| {
        let u = rmm(r);
        let lam = rand_unit(r);
        tdiff(&crossm_op(&(&u * lam)), &crossm_op(&u).scale(lam))
    });
    s.run("m8_swap_rot23_antisymmetry", mt, |r| {
        let (u, v) = (rmm(r), rmm(r));
        tdiff(&tmprod(&crossm_op(&u), &v), &-&tmprod(&crossm_op(&v), &u).rot23())
    });
    s.run("m9_crossm_commutator", mt, |r| {
        let u = rmm(r);
        let v = rand_vec6(r);
        let lhs = crossm_op(&(crm(&v) * &u));
        let rhs = &mtprod(&crm(&v), &crossm_op(&u)) - &tmprod(&crossm_op(&u), &crm(&v));
        tdiff(&lhs, &rhs)
    });
    s.run("m10_crossf_commutator", mt, |r| {
        let u = rmm(r);
        let v = rand_vec6(r);
        let lhs = crossf_op(&(crm(&v) * &u));
        let rhs = &mtprod(&crf(&v), &crossf_op(&u)) - &tmprod(&crossf_op(&u), &crf(&v));
        tdiff(&lhs, &rhs)
    });
    s.run("m11_crossfbar_of_uxf", mt, |r| {
        let u = rmm(r);
        let f = rand_vec6(r);
        let uxf = tmprod(&crossf_op(&u), &f).rot23().squeeze3();
        let lhs = crossfbar_op(&ForceMatrix::from_column_slice(uxf.as_slice()));
        let rhs = &tmprod(&crossf_op(&u), &crf_bar(&f)) - &mtprod(&crf_bar(&f), &crossm_op(&u));
        tdiff(&lhs, &rhs)
    });
    s.run("m12_rot12_of_crossf_product", mt, |r| {
        let (u, f) = (rmm(r), rmm(r));
        let lhs = tmprod(&crossf_op(&u), &f).rot12();
        let rhs = mtprod(&(-f.transpose()), &crossm_op(&u));
        tdiff(&lhs, &rhs)
    });
    s.run("m13_double_contraction", mt, |r| {
        let (u, v) = (rmm(r), rmm(r));
        let f = rmm(r);
        let lhs = mtprod(&v.transpose(), &tmprod(&crossf_op(&u), &f));
        let mid = tmprod(&tmprod(&crossm_op(&v), &u).rot231(), &f);
        let rhs = mtprod(&f.transpose(), &tmprod(&crossm_op(&v), &u).rot23()).rot12();
        tdiff(&lhs, &mid).max(tdiff(&lhs, &rhs))
    });
    s.run("m14_single_motion_crossfbar", mt, |r| {
        let f = rmm(r);
        let v = rand_vec6(r);
        let lhs = crf(&v) * &f;
        let rhs = tmprod(&crossfbar_op(&f), &v).rot23().squeeze3();
        mdiff(&DMatrix::from_column_slice(6, f.ncols(), lhs.as_slice()), &rhs)
    });
    s.run("m15_crf_bar_times_matrix", mt, |r| {
        let u = rmm(r);
        let f = rand_vec6(r);
        let lhs = crf_bar(&f) * &u;
        let rhs = tmprod(&crossf_op(&u), &f).rot23().squeeze3();
        mdiff(&DMatrix::from_column_slice(6, u.ncols(), lhs.as_slice()), &rhs)
    });
    s.run("m16_rotated_double_contraction", mt, |r| {
        let (u, v) = (rmm(r), rmm(r));
        let f = rmm(r);
        let lhs = mtprod(&v.transpose(), &tmprod(&crossf_op(&u), &f).rot23());
        let rhs = tmprod(&tmprod(&crossm_op(&v), &u).rot231(), &f).rot23();
        tdiff(&lhs, &rhs)
    });
    s.run("m17_swap_antisymmetry_rotated", mt, |r| {
        let (u, v) = (rmm(r), rmm(r));
        let f = rmm(r);
        let lhs = mtprod(&v.transpose(), &tmprod(&crossf_op(&u), &f).rot23());
        let rhs = -&mtprod(&u.transpose(), &tmprod(&crossf_op(&v), &f).rot23()).rot12();
        tdiff(&lhs, &rhs)
    });
    s.run("m18_mtprod_commutes_rot23_force", mt, |r| {
        let (u, f) = (rmm(r), rmm(r));
        let i = rand_psd6(r);
        let lhs = mtprod(&i, &tmprod(&crossf_op(&u), &f).rot23());
        let rhs = mtprod(&i, &tmprod(&crossf_op(&u), &f)).rot23();
        tdiff(&lhs, &rhs)
    });
    s.run("m19_mtprod_commutes_rot23_motion", mt, |r| {
        let (u, v) = (rmm(r), rmm(r));
        let i = rand_psd6(r);
        let lhs = mtprod(&i, &tmprod(&crossm_op(&u), &v).rot23());
        let rhs = mtprod(&i, &tmprod(&crossm_op(&u), &v)).rot23();
        tdiff(&lhs, &rhs)
    });
    s.run("m20_matrix_tensor_transpose", mt, |r| {
        let (n1, n2, n3, n4) = (mixed_dim(r), mixed_dim(r), mixed_dim(r), mixed_dim(r));
        let a = rand_mat(r, n1, n2);
        let y = Tensor3::from_fn(n2, n3, n4, |_, _, _| rand_unit(r));
        tdiff(&mtprod(&a, &y).rot12(), &tmprod(&y.rot12(), &a.transpose()))
    });
    s.run("m21_force_motion_double_contraction", mt, |r| {
        let (u, v) = (rmm(r), rmm(r));
        let f = rmm(r);
        let lhs = mtprod(&f.transpose(), &tmprod(&crossm_op(&u), &v));
        let rhs = -&mtprod(&v.transpose(), &tmprod(&crossfbar_op(&f), &u).rot23()).rot12();
        tdiff(&lhs, &rhs)
    });
    s.run("m22_coriolis_transpose_swap", mt, |r| {
        let i = rand_psd6(r);
        let (v, w) = (rand_vec6(r), rand_vec6(r));
        (coriolis_matrix(&i, &v).transpose() * w + coriolis_matrix(&i, &w).transpose() * v)
            .abs()
            .max()
    });
    s.run("m23_coriolis_swap_with_cross", mt, |r| {
        let i = rand_psd6(r);
        let (v, w) = (rand_vec6(r), rand_vec6(r));
        (coriolis_matrix(&i, &v) * w
            - (coriolis_matrix(&i, &w) * v - i * cross_motion(&v, &w)))
        .abs()
        .max()
    });
    s.run("m24_coriolis_triple_swap", mt, |r| {
        let i = rand_psd6(r);
        let (u, v, w) = (rand_vec6(r), rand_vec6(r), rand_vec6(r));
        (u.dot(&(coriolis_matrix(&i, &v) * w)) + v.dot(&(coriolis_matrix(&i, &u) * w))).abs()
    });
    s.run("m25_coriolis_tensor_transpose_swap", mt, |r| {
        let i = rand_psd6(r);
        let (v, w) = (rmm(r), rmm(r));
        let lhs = tmprod(&coriolis_tensor(&i, &v).rot12(), &w);
        let rhs = -&tmprod(&coriolis_tensor(&i, &w).rot12(), &v).rot23();
        tdiff(&lhs, &rhs)
    });
    s.run("m26_coriolis_tensor_swap", mt, |r| {
        let i = rand_psd6(r);
        let (v, w) = (rmm(r), rmm(r));
        let lhs = tmprod(&coriolis_tensor(&i, &v), &w);
        let rhs = &tmprod(&coriolis_tensor(&i, &w), &v).rot23()
            - &tmprod(&mtprod(&i, &crossm_op(&v)), &w);
        tdiff(&lhs, &rhs)
    });
    s.run("m27_coriolis_double_contraction", mt, |r| {
        let i = rand_psd6(r);
        let (u, v, w) = (
            rmm(r),
            rmm(r),
            rmm(r),
        );
        let lhs = mtprod(&u.transpose(), &tmprod(&coriolis_tensor(&i, &v), &w).rot23());
        let rhs = -&mtprod(&v.transpose(), &tmprod(&coriolis_tensor(&i, &u), &w).rot23()).rot12();
        tdiff(&lhs, &rhs)
    });
    s.run("tensor_storage_rot23_permutation", 0.0, |r| {
        let (d1, d2, d3) = (mixed_dim(r), mixed_dim(r), mixed_dim(r));
        let t = Tensor3::from_fn(d1, d2, d3, |_, _, _| rand_unit(r));
        let mut a: Vec<f64> = t.data().to_vec();
        let mut b: Vec<f64> = t.rot23().data().to_vec();
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        if a == b {
            0.0
        } else {
            1.0
        }
    });

    s.results
}

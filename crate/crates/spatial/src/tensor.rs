use nalgebra::{DMatrix, Dim, Matrix, Matrix6xX, RawStorage};
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use crate::algebra::{crf, crf_bar, crm, Mat6, SpatialMotionVec};

/// 6×n matrix whose columns are spatial motion vectors.
pub type MotionMatrix = Matrix6xX<f64>;
/// 6×m matrix whose columns are spatial force vectors.
pub type ForceMatrix = Matrix6xX<f64>;

/// Dense order-3 tensor, axis 1 fastest, axis 3 (pages) slowest; page k is a
/// d1×d2 column-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor3 {
    d1: usize,
    d2: usize,
    d3: usize,
    data: Vec<f64>,
}

impl Tensor3 {
    pub fn zeros(d1: usize, d2: usize, d3: usize) -> Self {
        Self { d1, d2, d3, data: vec![0.0; d1 * d2 * d3] }
    }

    pub fn from_fn(d1: usize, d2: usize, d3: usize, mut f: impl FnMut(usize, usize, usize) -> f64) -> Self {
        let mut t = Self::zeros(d1, d2, d3);
        for k in 0..d3 {
            for j in 0..d2 {
                for i in 0..d1 {
                    t[(i, j, k)] = f(i, j, k);
                }
            }
        }
        t
    }

    pub fn from_pages(pages: &[DMatrix<f64>]) -> Self {
        assert!(!pages.is_empty(), "from_pages: need at least one page");
        let (d1, d2) = pages[0].shape();
        let mut t = Self::zeros(d1, d2, pages.len());
        for (k, p) in pages.iter().enumerate() {
            assert_eq!(p.shape(), (d1, d2), "from_pages: page {k} shape mismatch");
            t.page_mut_slice(k).copy_from_slice(p.as_slice());
        }
        t
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.d1, self.d2, self.d3)
    }

    #[inline]
    fn idx(&self, i: usize, j: usize, k: usize) -> usize {
        debug_assert!(i < self.d1 && j < self.d2 && k < self.d3);
        i + self.d1 * (j + self.d2 * k)
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    fn page_mut_slice(&mut self, k: usize) -> &mut [f64] {
        let n = self.d1 * self.d2;
        &mut self.data[n * k..n * (k + 1)]
    }

    pub fn page(&self, k: usize) -> DMatrix<f64> {
        let n = self.d1 * self.d2;
        DMatrix::from_column_slice(self.d1, self.d2, &self.data[n * k..n * (k + 1)])
    }

    pub fn set_page(&mut self, k: usize, m: &DMatrix<f64>) {
        assert_eq!(m.shape(), (self.d1, self.d2), "set_page: shape mismatch");
        self.page_mut_slice(k).copy_from_slice(m.as_slice());
    }

    /// Per-page transpose: out[j,i,k] = in[i,j,k].
    pub fn rot12(&self) -> Tensor3 {
        let mut t = Tensor3::zeros(self.d2, self.d1, self.d3);
        for k in 0..self.d3 {
            for j in 0..self.d2 {
                for i in 0..self.d1 {
                    t[(j, i, k)] = self[(i, j, k)];
                }
            }
        }
        t
    }

    /// Column/page swap: out[i,k,j] = in[i,j,k].
    pub fn rot23(&self) -> Tensor3 {
        let mut t = Tensor3::zeros(self.d1, self.d3, self.d2);
        for k in 0..self.d3 {
            for j in 0..self.d2 {
                for i in 0..self.d1 {
                    t[(i, k, j)] = self[(i, j, k)];
                }
            }
        }
        t
    }

    /// Cyclic rotation, rot23 followed by rot12: out[j,k,i] = in[i,j,k].
    pub fn rot231(&self) -> Tensor3 {
        self.rot23().rot12()
    }

    /// Drop a unit axis 2: (d1, 1, d3) → d1×d3 matrix.
    pub fn squeeze2(&self) -> DMatrix<f64> {
        assert_eq!(self.d2, 1, "squeeze2: axis 2 has extent {}", self.d2);
        DMatrix::from_fn(self.d1, self.d3, |i, k| self[(i, 0, k)])
    }

    /// Drop a unit axis 3: (d1, d2, 1) → the single page.
    pub fn squeeze3(&self) -> DMatrix<f64> {
        assert_eq!(self.d3, 1, "squeeze3: axis 3 has extent {}", self.d3);
        self.page(0)
    }

    /// Contraction over axis 2 with a vector: out[i,k] = Σ_l self[i,l,k]·v[l].
    pub fn contract_axis2(&self, v: &nalgebra::DVector<f64>) -> DMatrix<f64> {
        assert_eq!(v.len(), self.d2, "contract_axis2: length mismatch");
        let mut m = DMatrix::zeros(self.d1, self.d3);
        for k in 0..self.d3 {
            for l in 0..self.d2 {
                let vl = v[l];
                if vl != 0.0 {
                    for i in 0..self.d1 {
                        m[(i, k)] += self[(i, l, k)] * vl;
                    }
                }
            }
        }
        m
    }

    /// ½(T + rot23(T)).
    pub fn symmetrize23(&self) -> Tensor3 {
        let r = self.rot23();
        assert_eq!(self.dims(), r.dims(), "symmetrize23: axes 2 and 3 must match");
        let mut t = self.clone();
        for (a, b) in t.data.iter_mut().zip(r.data.iter()) {
            *a = 0.5 * (*a + *b);
        }
        t
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn scale(&self, s: f64) -> Tensor3 {
        let mut t = self.clone();
        for x in t.data.iter_mut() {
            *x *= s;
        }
        t
    }
}

impl Index<(usize, usize, usize)> for Tensor3 {
    type Output = f64;
    fn index(&self, (i, j, k): (usize, usize, usize)) -> &f64 {
        &self.data[self.idx(i, j, k)]
    }
}

impl IndexMut<(usize, usize, usize)> for Tensor3 {
    fn index_mut(&mut self, (i, j, k): (usize, usize, usize)) -> &mut f64 {
        let n = self.idx(i, j, k);
        &mut self.data[n]
    }
}

impl Add for &Tensor3 {
    type Output = Tensor3;
    fn add(self, rhs: &Tensor3) -> Tensor3 {
        assert_eq!(self.dims(), rhs.dims(), "tensor add: dims mismatch");
        let mut t = self.clone();
        for (a, b) in t.data.iter_mut().zip(rhs.data.iter()) {
            *a += b;
        }
        t
    }
}

impl Sub for &Tensor3 {
    type Output = Tensor3;
    fn sub(self, rhs: &Tensor3) -> Tensor3 {
        assert_eq!(self.dims(), rhs.dims(), "tensor sub: dims mismatch");
        let mut t = self.clone();
        for (a, b) in t.data.iter_mut().zip(rhs.data.iter()) {
            *a -= b;
        }
        t
    }
}

impl Add<&Tensor3> for Tensor3 {
    type Output = Tensor3;
    fn add(self, rhs: &Tensor3) -> Tensor3 {
        &self + rhs
    }
}

impl Sub<&Tensor3> for Tensor3 {
    type Output = Tensor3;
    fn sub(self, rhs: &Tensor3) -> Tensor3 {
        &self - rhs
    }
}

impl Neg for &Tensor3 {
    type Output = Tensor3;
    fn neg(self) -> Tensor3 {
        self.scale(-1.0)
    }
}

impl Mul<f64> for &Tensor3 {
    type Output = Tensor3;
    fn mul(self, s: f64) -> Tensor3 {
        self.scale(s)
    }
}

/// Tensor-matrix product: Z[i,j,k] = Σ_l A[i,l,k]·B[l,j].
pub fn tmprod<R: Dim, C: Dim, S: RawStorage<f64, R, C>>(
    a: &Tensor3,
    b: &Matrix<f64, R, C, S>,
) -> Tensor3 {
    assert_eq!(a.d2, b.nrows(), "tmprod: tensor axis 2 ({}) != matrix rows ({})", a.d2, b.nrows());
    let mut z = Tensor3::zeros(a.d1, b.ncols(), a.d3);
    for k in 0..a.d3 {
        for j in 0..b.ncols() {
            for l in 0..a.d2 {
                let blj = b[(l, j)];
                if blj != 0.0 {
                    for i in 0..a.d1 {
                        z[(i, j, k)] += a[(i, l, k)] * blj;
                    }
                }
            }
        }
    }
    z
}

/// Matrix-tensor product: Y[i,j,k] = Σ_l B[i,l]·A[l,j,k].
pub fn mtprod<R: Dim, C: Dim, S: RawStorage<f64, R, C>>(
    b: &Matrix<f64, R, C, S>,
    a: &Tensor3,
) -> Tensor3 {
    assert_eq!(b.ncols(), a.d1, "mtprod: matrix cols ({}) != tensor axis 1 ({})", b.ncols(), a.d1);
    let mut y = Tensor3::zeros(b.nrows(), a.d2, a.d3);
    for k in 0..a.d3 {
        for j in 0..a.d2 {
            for l in 0..a.d1 {
                let alk = a[(l, j, k)];
                if alk != 0.0 {
                    for i in 0..b.nrows() {
                        y[(i, j, k)] += b[(i, l)] * alk;
                    }
                }
            }
        }
    }
    y
}

fn op_pages(u: &Matrix6xX<f64>, op: impl Fn(&SpatialMotionVec) -> Mat6) -> Tensor3 {
    let mut t = Tensor3::zeros(6, 6, u.ncols());
    for k in 0..u.ncols() {
        let m = op(&u.column(k).into_owned());
        t.page_mut_slice(k).copy_from_slice(m.as_slice());
    }
    t
}

/// Motion cross operator applied per column: page k = crm(u_k).
pub fn crossm_op(u: &MotionMatrix) -> Tensor3 {
    op_pages(u, |v| crm(v))
}

/// Force cross operator applied per column: page k = crf(u_k).
pub fn crossf_op(u: &MotionMatrix) -> Tensor3 {
    op_pages(u, |v| crf(v))
}

/// Swapped force operator applied per column: page k = crf_bar(f_k).
pub fn crossfbar_op(f: &ForceMatrix) -> Tensor3 {
    let mut t = Tensor3::zeros(6, 6, f.ncols());
    for k in 0..f.ncols() {
        let m = crf_bar(&f.column(k).into_owned());
        t.page_mut_slice(k).copy_from_slice(m.as_slice());
    }
    t
}

/// Body-level Coriolis matrix B[I, m] = ½(crf(m)·I − I·crm(m) + crf_bar(I·m)).
pub fn coriolis_matrix(i: &Mat6, m: &SpatialMotionVec) -> Mat6 {
    0.5 * (crf(m) * i - i * crm(m) + crf_bar(&(i * m)))
}

/// Coriolis tensor B̃[I, V]: page k = coriolis_matrix(I, v_k).
pub fn coriolis_tensor(i: &Mat6, v: &MotionMatrix) -> Tensor3 {
    let mut t = Tensor3::zeros(6, 6, v.ncols());
    for k in 0..v.ncols() {
        let m = coriolis_matrix(i, &v.column(k).into_owned());
        t.page_mut_slice(k).copy_from_slice(m.as_slice());
    }
    t
}

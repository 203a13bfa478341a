//! Dense complex linear algebra with an explicit singularity threshold.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Pivots below this fraction of the largest pivot count as zero.
pub const PIVOT_THRESHOLD: f64 = 1e-14;

/// LU factorisation with partial pivoting.
pub struct Lu {
    lu: CMatrix,
    perm: Vec<usize>,
    sign: f64,
    singular: bool,
}

impl Lu {
    pub fn new(mut a: CMatrix) -> Self {
        let n = a.nrows();
        assert_eq!(n, a.ncols(), "LU needs a square matrix");
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        let mut max_pivot: f64 = 0.0;
        let mut min_pivot = f64::INFINITY;
        for col in 0..n {
            let (mut p, mut best) = (col, a[(col, col)].norm());
            for r in col + 1..n {
                let v = a[(r, col)].norm();
                if v > best {
                    p = r;
                    best = v;
                }
            }
            if p != col {
                a.swap_rows(p, col);
                perm.swap(p, col);
                sign = -sign;
            }
            max_pivot = max_pivot.max(best);
            min_pivot = min_pivot.min(best);
            if best == 0.0 {
                continue;
            }
            let piv = a[(col, col)];
            for r in col + 1..n {
                let f = a[(r, col)] / piv;
                a[(r, col)] = f;
                for c in col + 1..n {
                    let t = a[(col, c)];
                    a[(r, c)] -= f * t;
                }
            }
        }
        let singular = n > 0 && (max_pivot == 0.0 || min_pivot <= PIVOT_THRESHOLD * max_pivot);
        Lu { lu: a, perm, sign, singular }
    }

    pub fn is_singular(&self) -> bool {
        self.singular
    }

    pub fn determinant(&self) -> Complex64 {
        let mut d = Complex64::new(self.sign, 0.0);
        for i in 0..self.lu.nrows() {
            d *= self.lu[(i, i)];
        }
        d
    }

    /// Solves A X = B; `None` when A is numerically singular.
    pub fn solve(&self, b: &CMatrix) -> Option<CMatrix> {
        if self.singular {
            return None;
        }
        let n = self.lu.nrows();
        let mut x = CMatrix::zeros(n, b.ncols());
        for (i, &p) in self.perm.iter().enumerate() {
            x.set_row(i, &b.row(p));
        }
        for c in 0..x.ncols() {
            for i in 0..n {
                let mut s = x[(i, c)];
                for j in 0..i {
                    s -= self.lu[(i, j)] * x[(j, c)];
                }
                x[(i, c)] = s;
            }
            for i in (0..n).rev() {
                let mut s = x[(i, c)];
                for j in i + 1..n {
                    s -= self.lu[(i, j)] * x[(j, c)];
                }
                x[(i, c)] = s / self.lu[(i, i)];
            }
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<CMatrix> {
        let n = self.lu.nrows();
        self.solve(&CMatrix::identity(n, n))
    }
}

pub fn det(a: &CMatrix) -> Complex64 {
    Lu::new(a.clone()).determinant()
}

/// Largest entry of |A* A - I|.
pub fn unitarity_deviation(a: &CMatrix) -> f64 {
    let n = a.ncols();
    let g = a.adjoint() * a - CMatrix::identity(n, n);
    g.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Induced 1-norm.
pub fn norm_one(a: &CMatrix) -> f64 {
    (0..a.ncols())
        .map(|c| a.column(c).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Largest entry modulus.
pub fn max_abs(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

use super::DiscretizeError;

/// Symmetric-by-construction tridiagonal matrix in double precision.
///
/// `sub[i]` is entry `(i+1, i)`, `sup[i]` is entry `(i, i+1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiag {
    pub sub: Vec<f64>,
    pub diag: Vec<f64>,
    pub sup: Vec<f64>,
}

impl Tridiag {
    pub fn new(sub: Vec<f64>, diag: Vec<f64>, sup: Vec<f64>) -> Self {
        assert!(!diag.is_empty(), "empty matrix");
        assert_eq!(sub.len() + 1, diag.len());
        assert_eq!(sup.len() + 1, diag.len());
        Tridiag { sub, diag, sup }
    }

    pub fn symmetric(diag: Vec<f64>, off: Vec<f64>) -> Self {
        Tridiag::new(off.clone(), diag, off)
    }

    pub fn identity(n: usize) -> Self {
        Tridiag::symmetric(vec![1.0; n], vec![0.0; n - 1])
    }

    pub fn n(&self) -> usize {
        self.diag.len()
    }

    pub fn is_symmetric(&self) -> bool {
        self.sub == self.sup
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        match j as isize - i as isize {
            0 => self.diag[i],
            1 => self.sup[i],
            -1 => self.sub[j],
            _ => 0.0,
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n();
        assert_eq!(x.len(), n);
        (0..n)
            .map(|i| {
                let mut v = self.diag[i] * x[i];
                if i > 0 {
                    v += self.sub[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    v += self.sup[i] * x[i + 1];
                }
                v
            })
            .collect()
    }

    /// `self * s + other * t`.
    pub fn combine(&self, s: f64, other: &Tridiag, t: f64) -> Tridiag {
        let mix = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| s * x + t * y).collect();
        Tridiag::new(mix(&self.sub, &other.sub), mix(&self.diag, &other.diag), mix(&self.sup, &other.sup))
    }

    pub fn scaled(&self, s: f64) -> Tridiag {
        let m = |v: &[f64]| v.iter().map(|x| x * s).collect();
        Tridiag::new(m(&self.sub), m(&self.diag), m(&self.sup))
    }

    /// Adds `shift` to the diagonal.
    pub fn shifted(&self, shift: f64) -> Tridiag {
        let mut out = self.clone();
        out.diag.iter_mut().for_each(|d| *d += shift);
        out
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.n();
        (0..n).map(|i| (0..n).map(|j| self.get(i, j)).collect()).collect()
    }

    /// Gershgorin upper bound on the spectrum.
    pub fn gershgorin_upper(&self) -> f64 {
        (0..self.n())
            .map(|i| {
                let mut r = self.diag[i];
                if i > 0 {
                    r += self.sub[i - 1].abs();
                }
                if i + 1 < self.n() {
                    r += self.sup[i].abs();
                }
                r
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Solves `self * x = b` for a symmetric positive definite matrix via
    /// `L D L^T`; fails on the first nonpositive pivot.
    pub fn solve_spd(&self, b: &[f64]) -> Result<Vec<f64>, DiscretizeError> {
        let n = self.n();
        assert_eq!(b.len(), n);
        let mut d = vec![0.0; n];
        let mut l = vec![0.0; n.saturating_sub(1)];
        d[0] = self.diag[0];
        for i in 0..n {
            if i > 0 {
                l[i - 1] = self.sub[i - 1] / d[i - 1];
                d[i] = self.diag[i] - l[i - 1] * self.sup[i - 1];
            }
            if !(d[i] > 0.0) {
                return Err(DiscretizeError::NotSpd { pivot: i });
            }
        }
        let mut y = b.to_vec();
        for i in 1..n {
            y[i] -= l[i - 1] * y[i - 1];
        }
        for i in 0..n {
            y[i] /= d[i];
        }
        for i in (0..n - 1).rev() {
            y[i] -= l[i] * y[i + 1];
        }
        Ok(y)
    }

    /// Number of eigenvalues of the pencil `(self, m)` below `sigma`
    /// (Sylvester inertia of `self - sigma m`); `m = None` means identity.
    pub fn count_below(&self, m: Option<&Tridiag>, sigma: f64) -> usize {
        let n = self.n();
        let entry = |i: usize| match m {
            Some(m) => self.diag[i] - sigma * m.diag[i],
            None => self.diag[i] - sigma,
        };
        let off = |i: usize| match m {
            Some(m) => self.sub[i] - sigma * m.sub[i],
            None => self.sub[i],
        };
        let tiny = f64::MIN_POSITIVE.sqrt();
        let mut count = 0;
        let mut q = entry(0);
        for i in 0..n {
            if i > 0 {
                q = entry(i) - off(i - 1) * off(i - 1) / q;
            }
            if q == 0.0 {
                q = -tiny;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// The `j`-th smallest eigenvalue (zero-based) of the pencil `(self, m)`
    /// by Sturm bisection, for symmetric positive definite input.
    pub fn eigenvalue_bisect(&self, m: Option<&Tridiag>, j: usize) -> f64 {
        let mut hi = 1.0;
        while self.count_below(m, hi) <= j {
            hi *= 2.0;
        }
        let mut lo = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(m, mid) > j {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spd_solve_and_failure() {
        let t = Tridiag::symmetric(vec![2.0, 2.0, 2.0], vec![-1.0, -1.0]);
        let x = t.solve_spd(&[1.0, 0.0, 1.0]).unwrap();
        let back = t.matvec(&x);
        for (a, b) in back.iter().zip([1.0, 0.0, 1.0]) {
            assert!((a - b).abs() < 1e-14);
        }
        let bad = t.shifted(-3.0);
        assert!(matches!(bad.solve_spd(&[1.0, 1.0, 1.0]), Err(DiscretizeError::NotSpd { pivot: 0 })));
    }

    #[test]
    fn sturm_counts() {
        let t = Tridiag::symmetric(vec![2.0, 2.0, 2.0], vec![-1.0, -1.0]);
        // Eigenvalues 2 - sqrt 2, 2, 2 + sqrt 2.
        assert_eq!(t.count_below(None, 0.5), 0);
        assert_eq!(t.count_below(None, 1.0), 1);
        assert_eq!(t.count_below(None, 3.0), 2);
        assert_eq!(t.count_below(None, 4.0), 3);
        assert!((t.eigenvalue_bisect(None, 0) - (2.0 - 2f64.sqrt())).abs() < 1e-14);
        assert!((t.eigenvalue_bisect(None, 2) - (2.0 + 2f64.sqrt())).abs() < 1e-14);
    }
}

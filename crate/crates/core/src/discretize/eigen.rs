use nalgebra::{DMatrix, SymmetricEigen};

use super::{DiscretizeError, Tridiag};

/// Mass matrix of a generalized problem `A psi = lambda M psi`.
#[derive(Debug, Clone, PartialEq)]
pub enum Mass {
    Consistent(Tridiag),
    Lumped(Vec<f64>),
}

impl Mass {
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        match self {
            Mass::Consistent(m) => m.matvec(x),
            Mass::Lumped(d) => d.iter().zip(x).map(|(a, b)| a * b).collect(),
        }
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>, DiscretizeError> {
        match self {
            Mass::Consistent(m) => m.solve_spd(b),
            Mass::Lumped(d) => Ok(d.iter().zip(b).map(|(a, v)| v / a).collect()),
        }
    }

    pub fn as_tridiag(&self) -> Tridiag {
        match self {
            Mass::Consistent(m) => m.clone(),
            Mass::Lumped(d) => Tridiag::symmetric(d.clone(), vec![0.0; d.len() - 1]),
        }
    }
}

/// Eigenpairs in ascending order. Eigenvectors are orthonormal in the
/// Euclidean inner product, or in the `M` inner product for a generalized
/// problem.
#[derive(Debug, Clone)]
pub struct SpectralDecomp {
    pub eigenvalues: Vec<f64>,
    /// `eigenvectors[j]` belongs to `eigenvalues[j]`.
    pub eigenvectors: Vec<Vec<f64>>,
    pub mass: Option<Mass>,
}

impl SpectralDecomp {
    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Inner product matching the orthonormality of the eigenvectors.
    pub fn inner(&self, x: &[f64], y: &[f64]) -> f64 {
        match &self.mass {
            None => x.iter().zip(y).map(|(a, b)| a * b).sum(),
            Some(m) => m.matvec(x).iter().zip(y).map(|(a, b)| a * b).sum(),
        }
    }

    pub fn norm(&self, x: &[f64]) -> f64 {
        self.inner(x, x).sqrt()
    }
}

/// Implicit-shift QL iteration on a symmetric tridiagonal matrix given by
/// its diagonal `d` and off-diagonal `e`. Returns eigenvalues and the rows of
/// the accumulated rotation, i.e. the eigenvectors, unsorted.
fn tql(mut d: Vec<f64>, off: &[f64]) -> Result<(Vec<f64>, Vec<Vec<f64>>), DiscretizeError> {
    let n = d.len();
    let mut e = off.to_vec();
    e.push(0.0);
    let mut z: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|k| if i == k { 1.0 } else { 0.0 }).collect()).collect();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(DiscretizeError::EigenNoConvergence { index: l });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let (lo, hi) = z.split_at_mut(i + 1);
                let (zi, zi1) = (&mut lo[i], &mut hi[0]);
                for k in 0..n {
                    let f = zi1[k];
                    zi1[k] = s * zi[k] + c * f;
                    zi[k] = c * zi[k] - s * f;
                }
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok((d, z))
}

fn sorted(vals: Vec<f64>, vecs: Vec<Vec<f64>>, mass: Option<Mass>) -> SpectralDecomp {
    let mut idx: Vec<usize> = (0..vals.len()).collect();
    idx.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
    SpectralDecomp {
        eigenvalues: idx.iter().map(|&i| vals[i]).collect(),
        eigenvectors: idx.iter().map(|&i| vecs[i].clone()).collect(),
        mass,
    }
}

/// Full eigendecomposition of `A` (standard) or of the pencil `(A, M)`.
///
/// The standard and lumped-mass problems stay tridiagonal (the lumped case is
/// symmetrised by `D^{-1/2}`) and use implicit QL. A consistent mass matrix is
/// handled by the dense Cholesky reduction `L^{-1} A L^{-T}`.
pub fn eig_tridiag(a: &Tridiag, m: Option<&Mass>) -> Result<SpectralDecomp, DiscretizeError> {
    if !a.is_symmetric() {
        return Err(DiscretizeError::NotSymmetric);
    }
    let n = a.n();
    match m {
        None => {
            let (vals, vecs) = tql(a.diag.clone(), &a.sub)?;
            let out = sorted(vals, vecs, None);
            if out.eigenvalues[0] <= 0.0 {
                return Err(DiscretizeError::NotSpd { pivot: 0 });
            }
            Ok(out)
        }
        Some(Mass::Lumped(w)) => {
            if w.iter().any(|x| *x <= 0.0) {
                return Err(DiscretizeError::NotSpd { pivot: 0 });
            }
            let s: Vec<f64> = w.iter().map(|x| 1.0 / x.sqrt()).collect();
            let diag: Vec<f64> = (0..n).map(|i| a.diag[i] * s[i] * s[i]).collect();
            let off: Vec<f64> = (0..n - 1).map(|i| a.sub[i] * s[i] * s[i + 1]).collect();
            let (vals, vecs) = tql(diag, &off)?;
            let vecs = vecs.into_iter().map(|y| y.iter().zip(&s).map(|(a, b)| a * b).collect()).collect();
            let out = sorted(vals, vecs, m.cloned());
            if out.eigenvalues[0] <= 0.0 {
                return Err(DiscretizeError::NotSpd { pivot: 0 });
            }
            Ok(out)
        }
        Some(Mass::Consistent(mt)) => {
            let dm = DMatrix::from_fn(n, n, |i, j| mt.get(i, j));
            let chol = dm.cholesky().ok_or(DiscretizeError::NotSpd { pivot: 0 })?;
            let l = chol.l();
            let da = DMatrix::from_fn(n, n, |i, j| a.get(i, j));
            // C = L^{-1} A L^{-T}
            let x = l.solve_lower_triangular(&da).ok_or(DiscretizeError::NotSpd { pivot: 0 })?;
            let c = l.solve_lower_triangular(&x.transpose()).ok_or(DiscretizeError::NotSpd { pivot: 0 })?;
            let c = (&c + c.transpose()) * 0.5;
            let eig = SymmetricEigen::new(c);
            let lt = l.transpose();
            let mut vals = Vec::with_capacity(n);
            let mut vecs = Vec::with_capacity(n);
            for j in 0..n {
                let y = eig.eigenvectors.column(j).into_owned();
                let psi = lt.solve_upper_triangular(&y).ok_or(DiscretizeError::NotSpd { pivot: j })?;
                vals.push(eig.eigenvalues[j]);
                vecs.push(psi.iter().cloned().collect());
            }
            let out = sorted(vals, vecs, m.cloned());
            if out.eigenvalues[0] <= 0.0 {
                return Err(DiscretizeError::NotSpd { pivot: 0 });
            }
            Ok(out)
        }
    }
}

/// `sum_j (lambda_j^alpha + shift_b)^{-1} (f, psi_j) psi_j`.
pub fn spectral_apply_fractional(dec: &SpectralDecomp, alpha: f64, shift_b: f64, f: &[f64]) -> Vec<f64> {
    let n = dec.n();
    let mut u = vec![0.0; n];
    let mf = match &dec.mass {
        None => f.to_vec(),
        Some(m) => m.matvec(f),
    };
    for (lam, psi) in dec.eigenvalues.iter().zip(&dec.eigenvectors) {
        let coef: f64 = psi.iter().zip(&mf).map(|(a, b)| a * b).sum::<f64>() / (lam.powf(alpha) + shift_b);
        for (ui, pi) in u.iter_mut().zip(psi) {
            *ui += coef * pi;
        }
    }
    u
}

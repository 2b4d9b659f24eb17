//! One-dimensional discretisations of `-(a u')' + b u` on `(0, 1)` with
//! homogeneous Dirichlet data, in double precision.
//!
//! Both schemes use the uniform mesh `x_i = i h`, `h = 1/(n+1)`, with the `n`
//! interior nodes as unknowns.

mod eigen;
mod tridiag;

pub use eigen::{eig_tridiag, spectral_apply_fractional, Mass, SpectralDecomp};
pub use tridiag::Tridiag;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiscretizeError {
    #[error("coefficient is not positive at x = {x}")]
    NonPositiveCoefficient { x: f64 },
    #[error("reaction coefficient is negative at x = {x}")]
    NegativeReaction { x: f64 },
    #[error("matrix is not symmetric positive definite (pivot {pivot})")]
    NotSpd { pivot: usize },
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("QL iteration did not converge for eigenvalue {index}")]
    EigenNoConvergence { index: usize },
    #[error("need at least one interior node")]
    Empty,
}

/// Finite-element matrices for piecewise linear elements.
#[derive(Debug, Clone, PartialEq)]
pub struct Fem1D {
    pub h: f64,
    /// `S_ij = int a phi_i' phi_j' + b phi_i phi_j`.
    pub stiffness: Tridiag,
    /// Consistent mass `M_ij = int phi_i phi_j`.
    pub mass: Tridiag,
    /// Vertex-quadrature (lumped) mass, the diagonal of `M_h`.
    pub lumped_mass: Vec<f64>,
}

pub fn mesh_width(n: usize) -> f64 {
    1.0 / (n as f64 + 1.0)
}

/// Interior nodes `x_1 .. x_n`.
pub fn mesh_nodes(n: usize) -> Vec<f64> {
    let h = mesh_width(n);
    (1..=n).map(|i| i as f64 * h).collect()
}

/// Three-point finite-difference matrix with row `i` equal to
/// `(-a_{i-1/2}, a_{i-1/2} + a_{i+1/2}, -a_{i+1/2}) / h^2`, where
/// `a_{i-1/2} = a(x_i - h/2)`.
pub fn assemble_fd_1d(a: &dyn Fn(f64) -> f64, n: usize) -> Result<Tridiag, DiscretizeError> {
    if n == 0 {
        return Err(DiscretizeError::Empty);
    }
    let h = mesh_width(n);
    let h2 = h * h;
    // a at the n + 1 cell midpoints (i + 1/2) h.
    let mid: Vec<f64> = (0..=n)
        .map(|i| {
            let x = (i as f64 + 0.5) * h;
            let v = a(x);
            if v > 0.0 {
                Ok(v)
            } else {
                Err(DiscretizeError::NonPositiveCoefficient { x })
            }
        })
        .collect::<Result<_, _>>()?;
    let diag = (0..n).map(|i| (mid[i] + mid[i + 1]) / h2).collect();
    let off = (1..n).map(|i| -mid[i] / h2).collect();
    Ok(Tridiag::symmetric(diag, off))
}

/// Linear finite elements: stiffness by two-point Gauss quadrature per
/// element, exact consistent mass and vertex-quadrature lumped mass.
pub fn assemble_fem_1d(a: &dyn Fn(f64) -> f64, b: &dyn Fn(f64) -> f64, n: usize) -> Result<Fem1D, DiscretizeError> {
    if n == 0 {
        return Err(DiscretizeError::Empty);
    }
    let h = mesh_width(n);
    let g = 0.5 / 3f64.sqrt();
    let gauss = [0.5 - g, 0.5 + g];
    // Global nodes 0..=n+1; unknowns are 1..=n.
    let mut diag = vec![0.0; n + 2];
    let mut off = vec![0.0; n + 1];
    for e in 0..=n {
        let x0 = e as f64 * h;
        let mut k = [[0.0; 2]; 2];
        for &xi in &gauss {
            let x = x0 + xi * h;
            let av = a(x);
            if !(av > 0.0) {
                return Err(DiscretizeError::NonPositiveCoefficient { x });
            }
            let bv = b(x);
            if bv < 0.0 {
                return Err(DiscretizeError::NegativeReaction { x });
            }
            let shape = [1.0 - xi, xi];
            let w = 0.5 * h;
            for r in 0..2 {
                for c in 0..2 {
                    let grad = (if r == c { 1.0 } else { -1.0 }) / (h * h);
                    k[r][c] += w * (av * grad + bv * shape[r] * shape[c]);
                }
            }
        }
        diag[e] += k[0][0];
        diag[e + 1] += k[1][1];
        off[e] += k[0][1];
    }
    let stiffness = Tridiag::symmetric(diag[1..=n].to_vec(), off[1..n].to_vec());
    let mass = Tridiag::symmetric(vec![4.0 * h / 6.0; n], vec![h / 6.0; n - 1]);
    Ok(Fem1D { h, stiffness, mass, lumped_mass: vec![h; n] })
}

/// Smallest and largest eigenvalue of `A` (or of the pencil `(A, M)`) by
/// Sturm bisection, without a full decomposition.
pub fn extreme_eigenvalues(a: &Tridiag, m: Option<&Mass>) -> (f64, f64) {
    let mt = m.map(Mass::as_tridiag);
    let n = a.n();
    (a.eigenvalue_bisect(mt.as_ref(), 0), a.eigenvalue_bisect(mt.as_ref(), n - 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_coefficient_fd() {
        let t = assemble_fd_1d(&|_| 1.0, 3).unwrap();
        assert!(t.diag.iter().all(|&d| (d - 32.0).abs() < 1e-12));
        assert!(t.sub.iter().all(|&o| (o + 16.0).abs() < 1e-12));
    }

    #[test]
    fn variable_coefficient_fd_entry() {
        let t = assemble_fd_1d(&|x| 1.0 + x, 3).unwrap();
        assert!((t.diag[0] - 40.0).abs() < 1e-12);
    }

    #[test]
    fn coefficient_must_be_positive() {
        assert!(matches!(assemble_fd_1d(&|x| x - 0.5, 3), Err(DiscretizeError::NonPositiveCoefficient { .. })));
    }

    #[test]
    fn textbook_elements() {
        let n = 5;
        let fem = assemble_fem_1d(&|_| 1.0, &|_| 0.0, n).unwrap();
        let h = fem.h;
        assert!(fem.stiffness.diag.iter().all(|&d| (d - 2.0 / h).abs() < 1e-9));
        assert!(fem.stiffness.sub.iter().all(|&o| (o + 1.0 / h).abs() < 1e-9));
        assert!(fem.mass.diag.iter().all(|&d| (d - 4.0 * h / 6.0).abs() < 1e-15));
        assert!(fem.lumped_mass.iter().all(|&d| (d - h).abs() < 1e-15));
    }

    #[test]
    fn sturm_extremes_match_closed_form() {
        let n = 20;
        let h = mesh_width(n);
        let t = assemble_fd_1d(&|_| 1.0, n).unwrap();
        let (l1, ln) = extreme_eigenvalues(&t, None);
        let lam = |j: f64| 4.0 / (h * h) * (j * std::f64::consts::PI * h / 2.0).sin().powi(2);
        assert!((l1 - lam(1.0)).abs() < 1e-10 * lam(1.0));
        assert!((ln - lam(n as f64)).abs() < 1e-10 * lam(n as f64));
    }
}

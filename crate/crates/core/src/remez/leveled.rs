//! The inner step of the exchange: on `2k+2` trial nodes find `P, Q` of
//! degree `k` and a level `h` with `P(t_i) = (f(t_i) + (-1)^i h) Q(t_i)`.
//!
//! `P` and `Q` are expanded in Chebyshev polynomials of the affine map of the
//! node hull onto `[-1, 1]` and only converted to monomials on output. `Q` is
//! normalised by `Q(t_last) = 1` while solving.

use crate::xnum::{ExtReal, Poly, Precision};

use super::{evaluate_target, RationalApproximant, RemezError, TargetParams};

const FIXED_POINT_SWEEPS: usize = 8;
const NEWTON_STEPS: usize = 40;

/// Gaussian elimination with partial pivoting. `None` when a pivot is
/// negligible against the largest matrix entry.
pub(crate) fn solve_dense(mut a: Vec<Vec<ExtReal>>, mut b: Vec<ExtReal>) -> Option<Vec<ExtReal>> {
    let n = b.len();
    let prec = b[0].precision();
    let scale = a.iter().flat_map(|row| row.iter().map(ExtReal::abs)).reduce(ExtReal::max)?;
    let tiny = scale * ExtReal::exp10(-(prec.decimal_digits() as i32) + 4, prec);
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() <= tiny {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        let inv = a[col][col].recip();
        for row in col + 1..n {
            if a[row][col].is_zero() {
                continue;
            }
            let m = &a[row][col] * &inv;
            #[allow(clippy::needless_range_loop)]
            for c in col..n {
                let delta = &m * &a[col][c];
                a[row][c] -= delta;
            }
            let delta = &m * &b[col];
            b[row] -= delta;
        }
    }
    let mut x = vec![ExtReal::zero(prec); n];
    for row in (0..n).rev() {
        let mut acc = b[row].clone();
        for c in row + 1..n {
            acc -= &a[row][c] * &x[c];
        }
        x[row] = acc / &a[row][row];
    }
    Some(x)
}

/// Chebyshev basis on the affine image of `[lo, hi]`.
pub(crate) struct ChebBasis {
    lo: ExtReal,
    hi: ExtReal,
    k: usize,
}

impl ChebBasis {
    pub(crate) fn new(lo: ExtReal, hi: ExtReal, k: usize) -> Self {
        ChebBasis { lo, hi, k }
    }

    fn map(&self, t: &ExtReal) -> ExtReal {
        (t * 2.0 - &self.lo - &self.hi) / (&self.hi - &self.lo)
    }

    /// `T_0 .. T_k` at `t`.
    pub(crate) fn row(&self, t: &ExtReal) -> Vec<ExtReal> {
        let x = self.map(t);
        let mut out = Vec::with_capacity(self.k + 1);
        out.push(ExtReal::one(x.precision()));
        if self.k >= 1 {
            out.push(x.clone());
        }
        for j in 2..=self.k {
            let next = &x * &out[j - 1] * 2.0 - &out[j - 2];
            out.push(next);
        }
        out
    }

    /// Monomial coefficients in `t` of `sum c_j T_j(x(t))`.
    pub(crate) fn to_monomial(&self, c: &[ExtReal]) -> Poly {
        let prec = self.lo.precision();
        let width = &self.hi - &self.lo;
        let slope = width.recip() * 2.0;
        let shift = -(&self.lo + &self.hi) / &width;
        let x = Poly::new(vec![shift, slope]);
        let two_x = x.scale(&ExtReal::from_f64(2.0, prec));
        let mut t_prev = Poly::constant(ExtReal::one(prec));
        let mut acc = t_prev.scale(&c[0]);
        if c.len() == 1 {
            return acc;
        }
        let mut t_cur = x.clone();
        acc = acc.add(&t_cur.scale(&c[1]));
        for cj in &c[2..] {
            let t_next = two_x.mul(&t_cur).add(&t_prev.scale(&ExtReal::from_f64(-1.0, prec)));
            acc = acc.add(&t_next.scale(cj));
            t_prev = t_cur;
            t_cur = t_next;
        }
        acc
    }
}

fn sign(i: usize) -> f64 {
    if i.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

fn dot(a: &[ExtReal], b: &[ExtReal]) -> ExtReal {
    let mut acc = ExtReal::zero(a[0].precision());
    for (x, y) in a.iter().zip(b) {
        acc += x * y;
    }
    acc
}

fn max_rel_change(new: &[ExtReal], old: &[ExtReal]) -> ExtReal {
    new.iter()
        .zip(old)
        .map(|(n, o)| (n - o).abs() / n.abs().max(ExtReal::exp10(-300, n.precision())))
        .reduce(ExtReal::max)
        .expect("nonempty")
}

/// Leveled solve against arbitrary target values `f_i` at the nodes.
///
/// `warm_q` optionally supplies the previous denominator's values at the
/// nodes (any positive scaling) to start the iteration on `h`.
pub(crate) fn solve_leveled_values(
    nodes: &[ExtReal],
    values: &[ExtReal],
    k: usize,
    warm_q: Option<&[ExtReal]>,
) -> Result<(RationalApproximant, ExtReal), RemezError> {
    let n = nodes.len();
    assert_eq!(n, 2 * k + 2, "leveled system needs 2k+2 nodes");
    assert_eq!(values.len(), n);
    for w in nodes.windows(2) {
        if w[1] <= w[0] {
            return Err(RemezError::SingularSystem("nodes are not strictly increasing".into()));
        }
    }
    let prec: Precision = nodes[n - 1].precision();
    let basis = ChebBasis::new(nodes[0].clone(), nodes[n - 1].clone(), k);
    let rows: Vec<Vec<ExtReal>> = nodes.iter().map(|t| basis.row(t)).collect();
    let m = 2 * k + 3;
    let zero = ExtReal::zero(prec);

    let mut q_old: Vec<ExtReal> = match warm_q {
        Some(w) => {
            let last = w[n - 1].clone();
            w.iter().map(|v| v / &last).collect()
        }
        None => vec![ExtReal::one(prec); n],
    };

    // Linearised sweeps: h multiplies the previous denominator values.
    let mut z: Vec<ExtReal> = Vec::new();
    let mut last_h: Option<ExtReal> = None;
    let mut last_dh: Option<ExtReal> = None;
    for _ in 0..FIXED_POINT_SWEEPS {
        let mut a = Vec::with_capacity(m);
        let mut rhs = Vec::with_capacity(m);
        for i in 0..n {
            let mut row = Vec::with_capacity(m);
            row.extend(rows[i].iter().cloned());
            row.extend(rows[i].iter().map(|tj| -(tj * &values[i])));
            row.push(&q_old[i] * (-sign(i)));
            a.push(row);
            rhs.push(zero.clone());
        }
        let mut norm = vec![zero.clone(); m];
        for item in norm.iter_mut().skip(k + 1).take(k + 1) {
            *item = ExtReal::one(prec);
        }
        a.push(norm);
        rhs.push(ExtReal::one(prec));
        z = solve_dense(a, rhs).ok_or_else(|| RemezError::SingularSystem("linearised node system".into()))?;
        let q_new: Vec<ExtReal> = rows.iter().map(|r| dot(r, &z[k + 1..2 * k + 2])).collect();
        let h = z[m - 1].clone();
        let change = max_rel_change(&q_new, &q_old);
        let dh = last_h.as_ref().map(|lh| &h - lh);
        // Damp when successive level updates flip sign without shrinking.
        let oscillating = match (&dh, &last_dh) {
            (Some(d), Some(ld)) => d.signum_i() * ld.signum_i() < 0 && d.abs() >= ld.abs() * 0.5,
            _ => false,
        };
        q_old = if oscillating { q_new.iter().zip(&q_old).map(|(a, b)| (a + b) * 0.5).collect() } else { q_new };
        last_dh = dh;
        last_h = Some(h);
        if change < ExtReal::exp10(-3, prec) {
            break;
        }
    }

    // Newton on the exact system F(a, b, h) = 0.
    let residual = |z: &[ExtReal]| -> Vec<ExtReal> {
        let h = &z[m - 1];
        let mut f = Vec::with_capacity(m);
        for i in 0..n {
            let p = dot(&rows[i], &z[..k + 1]);
            let q = dot(&rows[i], &z[k + 1..2 * k + 2]);
            f.push(p - (&values[i] + h * sign(i)) * q);
        }
        let mut s = ExtReal::from_f64(-1.0, prec);
        for b in &z[k + 1..2 * k + 2] {
            s += b;
        }
        f.push(s);
        f
    };
    let norm_inf = |v: &[ExtReal]| v.iter().map(ExtReal::abs).reduce(ExtReal::max).expect("nonempty");
    let stop = ExtReal::exp10(-(prec.decimal_digits() as i32) + 12, prec);
    let mut f = residual(&z);
    let mut converged = false;
    for _ in 0..NEWTON_STEPS {
        let h = z[m - 1].clone();
        let mut jac = Vec::with_capacity(m);
        for i in 0..n {
            let level = &values[i] + &h * sign(i);
            let q = dot(&rows[i], &z[k + 1..2 * k + 2]);
            let mut row = Vec::with_capacity(m);
            row.extend(rows[i].iter().cloned());
            row.extend(rows[i].iter().map(|tj| -(tj * &level)));
            row.push(q * (-sign(i)));
            jac.push(row);
        }
        let mut norm = vec![zero.clone(); m];
        for item in norm.iter_mut().skip(k + 1).take(k + 1) {
            *item = ExtReal::one(prec);
        }
        jac.push(norm);
        let neg_f: Vec<ExtReal> = f.iter().map(|v| -v).collect();
        let step = solve_dense(jac, neg_f).ok_or_else(|| RemezError::SingularSystem("Newton Jacobian".into()))?;
        let f_norm = norm_inf(&f);
        let mut lambda = ExtReal::one(prec);
        let mut accepted = false;
        for _ in 0..30 {
            let cand: Vec<ExtReal> = z.iter().zip(&step).map(|(a, d)| a + &(d * &lambda)).collect();
            let f_cand = residual(&cand);
            if norm_inf(&f_cand) < f_norm || f_norm.is_zero() {
                z = cand;
                f = f_cand;
                accepted = true;
                break;
            }
            lambda = lambda * 0.5;
        }
        let step_size = norm_inf(&step) / norm_inf(&z).max(ExtReal::one(prec));
        if step_size <= stop || (!accepted && norm_inf(&f) <= stop) {
            converged = true;
            break;
        }
        if !accepted {
            break;
        }
    }
    if !converged {
        return Err(RemezError::NoLeveling(format!(
            "leveled system residual {} did not reach working precision",
            norm_inf(&f).to_f64()
        )));
    }

    let p = basis.to_monomial(&z[..k + 1]);
    let q = basis.to_monomial(&z[k + 1..2 * k + 2]);
    if q.degree() < k || q.is_zero() {
        return Err(RemezError::SingularSystem("denominator lost full degree".into()));
    }
    Ok((RationalApproximant::new(p, q), z[m - 1].clone()))
}

/// Solves the leveled node system for `g(q, delta, alpha; .)`.
///
/// Returns the approximant and the signed level `h`, so that
/// `r(t_i) - g(t_i) = (-1)^i h` at every node.
pub fn solve_leveled_system(
    nodes: &[ExtReal],
    params: &TargetParams,
) -> Result<(RationalApproximant, ExtReal), RemezError> {
    if nodes.len() != params.alternation_count() {
        return Err(RemezError::SingularSystem(format!(
            "expected {} nodes, got {}",
            params.alternation_count(),
            nodes.len()
        )));
    }
    let values: Vec<ExtReal> = nodes.iter().map(|t| evaluate_target(params, t)).collect();
    solve_leveled_values(nodes, &values, params.k, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Precision {
        Precision::default()
    }

    #[test]
    fn dense_solve_small_system() {
        let a = vec![
            vec![ExtReal::from_f64(2.0, p()), ExtReal::from_f64(1.0, p())],
            vec![ExtReal::from_f64(1.0, p()), ExtReal::from_f64(3.0, p())],
        ];
        let b = vec![ExtReal::from_f64(3.0, p()), ExtReal::from_f64(5.0, p())];
        let x = solve_dense(a, b).unwrap();
        assert!((&x[0] - ExtReal::from_ratio(4, 5, p())).abs() < p().half_eps());
        assert!((&x[1] - ExtReal::from_ratio(7, 5, p())).abs() < p().half_eps());
        let sing = vec![vec![ExtReal::one(p()), ExtReal::one(p())]; 2];
        assert!(solve_dense(sing, vec![ExtReal::one(p()); 2]).is_none());
    }

    #[test]
    fn chebyshev_to_monomial() {
        let basis = ChebBasis::new(ExtReal::from_f64(0.5, p()), ExtReal::one(p()), 3);
        let c: Vec<ExtReal> = [0.3, -1.2, 0.7, 2.5].iter().map(|&v| ExtReal::from_f64(v, p())).collect();
        let mono = basis.to_monomial(&c);
        for &t in &[0.5, 0.61, 0.83, 1.0] {
            let t = ExtReal::from_f64(t, p());
            let direct = dot(&basis.row(&t), &c);
            assert!((mono.eval(&t) - direct).abs() < p().half_eps());
        }
    }

    #[test]
    fn exactly_representable_target_levels_to_zero() {
        // f(t) = (t + 1) / (t + 2) is in R_1, so the level must vanish.
        let nodes: Vec<ExtReal> = [0.0, 0.2, 0.7, 1.0].iter().map(|&v| ExtReal::from_f64(v, p())).collect();
        let values: Vec<ExtReal> = nodes.iter().map(|t| (t + 1.0) / (t + 2.0)).collect();
        let (r, h) = solve_leveled_values(&nodes, &values, 1, None).unwrap();
        assert!(h.abs() < p().half_eps());
        for (t, v) in nodes.iter().zip(&values) {
            assert!((r.eval(t) - v).abs() < p().half_eps());
        }
        assert!((r.denominator().coeffs()[0].clone() - 2.0).abs() < p().half_eps());
    }

    #[test]
    fn level_equioscillates_on_nodes() {
        let params = TargetParams::new(0.0, 0.0, 0.5, 2, p()).unwrap();
        let nodes: Vec<ExtReal> = [0.0, 0.01, 0.08, 0.3, 0.7, 1.0].iter().map(|&v| ExtReal::from_f64(v, p())).collect();
        let (r, h) = solve_leveled_system(&nodes, &params).unwrap();
        for (i, t) in nodes.iter().enumerate() {
            let e = r.eval(t) - evaluate_target(&params, t);
            let want = if i % 2 == 0 { h.clone() } else { -h.clone() };
            assert!((e - want).abs() < p().half_eps());
        }
    }
}

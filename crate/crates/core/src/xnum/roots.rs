use std::f64::consts::PI;

use super::{ExtReal, Poly, Precision, XnumError};

const MAX_SWEEPS: usize = 2000;

/// A complex root `re + i*im` of a real polynomial.
#[derive(Debug, Clone, PartialEq)]
pub struct Root {
    pub re: ExtReal,
    pub im: ExtReal,
}

impl Root {
    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }
}

#[derive(Clone, Debug)]
struct Cx {
    re: ExtReal,
    im: ExtReal,
}

impl Cx {
    fn new(re: ExtReal, im: ExtReal) -> Self {
        Cx { re, im }
    }

    fn add(&self, o: &Cx) -> Cx {
        Cx::new(&self.re + &o.re, &self.im + &o.im)
    }

    fn sub(&self, o: &Cx) -> Cx {
        Cx::new(&self.re - &o.re, &self.im - &o.im)
    }

    fn mul(&self, o: &Cx) -> Cx {
        Cx::new(&self.re * &o.re - &self.im * &o.im, &self.re * &o.im + &self.im * &o.re)
    }

    fn div(&self, o: &Cx) -> Cx {
        let den = o.norm_sqr();
        Cx::new((&self.re * &o.re + &self.im * &o.im) / &den, (&self.im * &o.re - &self.re * &o.im) / &den)
    }

    fn norm_sqr(&self) -> ExtReal {
        self.re.square() + self.im.square()
    }

    fn abs(&self) -> ExtReal {
        self.norm_sqr().sqrt()
    }
}

fn eval_cx(coeffs: &[ExtReal], z: &Cx) -> (Cx, Cx) {
    let prec = coeffs[0].precision();
    let zero = ExtReal::zero(prec);
    let mut p = Cx::new(coeffs.last().unwrap().clone(), zero.clone());
    let mut dp = Cx::new(zero.clone(), zero);
    for c in coeffs.iter().rev().skip(1) {
        dp = dp.mul(z).add(&p);
        p = p.mul(z);
        p.re += c;
    }
    (p, dp)
}

/// Starting points from the upper convex hull of `(j, log|a_j|)`: each hull
/// edge of width `w` contributes `w` points on a circle whose radius matches
/// the root moduli the edge predicts. Handles root sets spread over many
/// orders of magnitude.
fn newton_polygon_start(coeffs: &[ExtReal], prec: Precision) -> Vec<Cx> {
    let n = coeffs.len() - 1;
    let logs: Vec<Option<f64>> =
        coeffs.iter().map(|c| if c.is_zero() { None } else { Some(c.abs().ln().to_f64()) }).collect();
    let pts: Vec<(usize, f64)> = logs.iter().enumerate().filter_map(|(j, l)| l.map(|l| (j, l))).collect();
    let mut hull: Vec<(usize, f64)> = Vec::new();
    for &pt in &pts {
        while hull.len() >= 2 {
            let (x1, y1) = hull[hull.len() - 2];
            let (x2, y2) = hull[hull.len() - 1];
            let cross = (x2 as f64 - x1 as f64) * (pt.1 - y1) - (y2 - y1) * (pt.0 as f64 - x1 as f64);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    let mut out = Vec::with_capacity(n);
    for w in hull.windows(2) {
        let (i, li) = w[0];
        let (j, lj) = w[1];
        let width = j - i;
        let log_r = ExtReal::from_f64((li - lj) / width as f64, prec);
        let radius = log_r.exp();
        for m in 0..width {
            let theta = 2.0 * PI * m as f64 / width as f64 + 2.0 * PI * i as f64 / n as f64 + 0.7;
            let c = ExtReal::from_f64(theta.cos(), prec);
            let s = ExtReal::from_f64(theta.sin(), prec);
            out.push(Cx::new(&radius * &c, &radius * &s));
        }
    }
    out
}

/// All roots of `p`, with multiplicity, by Aberth-Ehrlich iteration at the
/// polynomial's working precision followed by Newton polishing.
///
/// Every returned root satisfies `|p(root)| <= tol * max|coeff|`. Imaginary
/// parts below `10^(-digits/2) * (1 + |re|)` are set to zero. Roots are sorted
/// by ascending real part, then imaginary part.
pub fn poly_roots(p: &Poly, tol: &ExtReal) -> Result<Vec<Root>, XnumError> {
    if p.degree() == 0 {
        return Err(XnumError::ConstantPolynomial);
    }
    let prec = p.precision();
    let zero = ExtReal::zero(prec);

    // Exact roots at the origin.
    let lead_zeros = p.coeffs().iter().take_while(|c| c.is_zero()).count();
    let mut roots: Vec<Root> = (0..lead_zeros).map(|_| Root { re: zero.clone(), im: zero.clone() }).collect();
    let reduced = Poly::new(p.coeffs()[lead_zeros..].to_vec()).monic();
    let coeffs = reduced.coeffs();
    let n = reduced.degree();

    if n >= 1 {
        let mut z = newton_polygon_start(coeffs, prec);
        let stop = ExtReal::exp10(-(prec.decimal_digits() as i32 - 6), prec);
        let mut done = vec![false; n];
        let mut sweeps = 0;
        while done.iter().any(|d| !d) {
            sweeps += 1;
            if sweeps > MAX_SWEEPS {
                let worst = z.iter().map(|zi| eval_cx(coeffs, zi).0.abs().to_f64()).fold(0.0, f64::max);
                return Err(XnumError::NoConvergence { iterations: MAX_SWEEPS, residual: worst });
            }
            for i in 0..n {
                if done[i] {
                    continue;
                }
                let (pv, dpv) = eval_cx(coeffs, &z[i]);
                if pv.re.is_zero() && pv.im.is_zero() {
                    done[i] = true;
                    continue;
                }
                let ratio = pv.div(&dpv);
                let mut sum = Cx::new(zero.clone(), zero.clone());
                for (j, zj) in z.iter().enumerate() {
                    if j != i {
                        let one = Cx::new(ExtReal::one(prec), zero.clone());
                        sum = sum.add(&one.div(&z[i].sub(zj)));
                    }
                }
                let one = Cx::new(ExtReal::one(prec), zero.clone());
                let w = ratio.div(&one.sub(&ratio.mul(&sum)));
                z[i] = z[i].sub(&w);
                if w.abs() <= &stop * &z[i].abs() {
                    done[i] = true;
                }
            }
        }

        // Newton polishing; keep a step only if it lowers the residual.
        for zi in z.iter_mut() {
            for _ in 0..3 {
                let (pv, dpv) = eval_cx(coeffs, zi);
                if dpv.norm_sqr().is_zero() {
                    break;
                }
                let cand = zi.sub(&pv.div(&dpv));
                if eval_cx(coeffs, &cand).0.norm_sqr() < pv.norm_sqr() {
                    *zi = cand;
                } else {
                    break;
                }
            }
        }

        let im_floor = prec.half_eps();
        for zi in z {
            let mut im = zi.im.clone();
            if im.abs() <= &im_floor * (zi.re.abs() + 1.0) {
                im = zero.clone();
            }
            roots.push(Root { re: zi.re, im });
        }
    }

    let bound = tol * &p.max_abs_coeff();
    for r in &roots {
        let (v, _) = eval_cx(p.coeffs(), &Cx::new(r.re.clone(), r.im.clone()));
        let res = v.abs();
        if res > bound {
            return Err(XnumError::NoConvergence { iterations: MAX_SWEEPS, residual: res.to_f64() });
        }
    }

    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(roots)
}

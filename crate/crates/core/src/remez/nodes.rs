//! Starting nodes and the exchange rules that turn extrema into the next
//! node set.

use crate::xnum::ExtReal;

use super::extrema::Extremum;
use super::TargetParams;

/// `2k + 2` starting nodes in `[delta, 1]`, both endpoints included.
///
/// For `delta > 0` the nodes are Chebyshev points in `ln t` over
/// `[ln delta, 0]`. For `delta = 0` the first node is `0` and the others are
/// Chebyshev points in `ln t` over `[floor, 1]` with `floor = 10^(-3(k+1))`.
pub fn init_nodes(params: &TargetParams) -> Vec<ExtReal> {
    let prec = params.precision();
    let k = params.k;
    let n = 2 * k + 1;
    let pi = ExtReal::pi(prec);
    let cheb = |lo: &ExtReal, j: usize, m: usize| -> ExtReal {
        // j = 0 maps to lo, j = m maps to 0 in log space.
        let theta = &pi * ExtReal::from_ratio(j as i64, m as i64, prec);
        let s = lo * ((theta.cos() + 1.0) * 0.5);
        s.exp()
    };
    let mut nodes = Vec::with_capacity(n + 1);
    if params.delta.is_zero() {
        let floor = ExtReal::exp10(-3 * (k as i32 + 1), prec).ln();
        nodes.push(ExtReal::zero(prec));
        for j in 0..n {
            nodes.push(cheb(&floor, j, n - 1));
        }
    } else {
        let lo = params.delta.ln();
        nodes.push(params.delta.clone());
        for j in 1..n {
            nodes.push(cheb(&lo, j, n));
        }
        nodes.push(ExtReal::one(prec));
    }
    nodes
}

/// Reduces candidate extrema to exactly `n` points with alternating error
/// signs, keeping the largest errors. `None` when fewer than `n` sign
/// alternations exist.
pub(crate) fn select_alternating(cands: &[Extremum], n: usize) -> Option<Vec<Extremum>> {
    let mut pts: Vec<Extremum> = Vec::with_capacity(cands.len());
    for c in cands {
        if c.e.is_zero() {
            continue;
        }
        match pts.last_mut() {
            Some(last) if last.e.signum_i() == c.e.signum_i() => {
                if c.e.abs() > last.e.abs() {
                    *last = c.clone();
                }
            }
            _ => pts.push(c.clone()),
        }
    }
    while pts.len() > n {
        if pts.len() == n + 1 {
            if pts[0].e.abs() < pts[n].e.abs() {
                pts.remove(0);
            } else {
                pts.pop();
            }
            continue;
        }
        let (i, _) = pts.iter().enumerate().min_by(|a, b| a.1.e.abs().total_cmp(&b.1.e.abs())).expect("nonempty");
        if i == 0 || i == pts.len() - 1 {
            pts.remove(i);
            continue;
        }
        // Dropping an interior point leaves two same-sign neighbours; keep
        // the larger of them.
        pts.remove(i);
        if pts[i - 1].e.abs() >= pts[i].e.abs() {
            pts.remove(i);
        } else {
            pts.remove(i - 1);
        }
    }
    (pts.len() == n).then_some(pts)
}

/// Classic one-point exchange: swap the global error maximum into the node
/// set so that signs keep alternating. `errs` holds the error at each node.
pub(crate) fn single_point_exchange(nodes: &[ExtReal], errs: &[ExtReal], worst: &Extremum) -> Vec<ExtReal> {
    let mut out = nodes.to_vec();
    let n = nodes.len();
    let same = |i: usize| errs[i].signum_i() == worst.e.signum_i();
    if nodes.contains(&worst.t) {
        return out;
    }
    let pos = nodes.iter().position(|t| *t > worst.t);
    match pos {
        Some(0) => {
            if same(0) {
                out[0] = worst.t.clone();
            } else {
                out.pop();
                out.insert(0, worst.t.clone());
            }
        }
        None => {
            if same(n - 1) {
                out[n - 1] = worst.t.clone();
            } else {
                out.remove(0);
                out.push(worst.t.clone());
            }
        }
        Some(j) => {
            if same(j - 1) {
                out[j - 1] = worst.t.clone();
            } else {
                out[j] = worst.t.clone();
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::xnum::Precision;

    fn ext(t: f64, e: f64) -> Extremum {
        let p = Precision::default();
        Extremum { t: ExtReal::from_f64(t, p), e: ExtReal::from_f64(e, p) }
    }

    #[test]
    fn init_nodes_contract() {
        let p = Precision::default();
        for (delta, k) in [(0.5, 1), (1e-6, 3), (0.0, 3), (1e-8, 8), (0.0, 8)] {
            let params = TargetParams::new(0.0, delta, 0.25, k, p).unwrap();
            let nodes = init_nodes(&params);
            assert_eq!(nodes.len(), 2 * k + 2);
            assert_eq!(nodes[0], params.delta);
            assert_eq!(nodes[2 * k + 1], 1.0);
            assert!(nodes.windows(2).all(|w| w[0] < w[1]));
        }
        let params = TargetParams::new(0.0, 0.0, 0.25, 3, p).unwrap();
        let nodes = init_nodes(&params);
        assert!(nodes[1] <= 1e-9);
        assert!((nodes[1].log10().to_f64() + 12.0).abs() < 1e-12);
    }

    #[test]
    fn selection_merges_and_trims() {
        let c = vec![
            ext(0.0, 1.0),
            ext(0.1, 2.0),
            ext(0.2, -1.0),
            ext(0.3, 0.1),
            ext(0.4, -0.2),
            ext(0.5, 1.5),
            ext(1.0, -1.0),
        ];
        let s = select_alternating(&c, 4).unwrap();
        let ts: Vec<f64> = s.iter().map(|x| x.t.to_f64()).collect();
        assert_eq!(ts, vec![0.1, 0.2, 0.5, 1.0]);
        assert!(select_alternating(&c[..2], 2).is_none());
    }

    #[test]
    fn single_exchange_preserves_alternation() {
        let p = Precision::default();
        let nodes: Vec<ExtReal> = [0.0, 0.3, 0.6, 1.0].iter().map(|&v| ExtReal::from_f64(v, p)).collect();
        let errs: Vec<ExtReal> = [1.0, -1.0, 1.0, -1.0].iter().map(|&v| ExtReal::from_f64(v, p)).collect();
        let out = single_point_exchange(&nodes, &errs, &ext(0.4, -3.0));
        let ts: Vec<f64> = out.iter().map(ExtReal::to_f64).collect();
        assert_eq!(ts, vec![0.0, 0.4, 0.6, 1.0]);
        let out = single_point_exchange(&nodes, &errs, &ext(0.4, 3.0));
        let ts: Vec<f64> = out.iter().map(ExtReal::to_f64).collect();
        assert_eq!(ts, vec![0.0, 0.3, 0.4, 1.0]);
    }
}

//! Rule-by-rule re-verification of gene-set output, plus a from-scratch
//! rebuild to compare against.

use scoresphere::model_choice::GeneSet;
use scoresphere::Matrix;

const THRESHOLD: f64 = std::f64::consts::FRAC_1_SQRT_2;

fn col_dot(m: &Matrix, i: usize, j: usize) -> f64 {
    m.col(i).iter().zip(m.col(j)).map(|(a, b)| a * b).sum()
}

/// Checks every emitted set against the inclusion rules, the 20-cap in the
/// measure, member completeness and pairwise top-list disjointness.
pub fn replay(m: &Matrix, sets: &[GeneSet]) -> Result<(), String> {
    let p = m.ncols();
    let ss: Vec<f64> = (0..p).map(|i| col_dot(m, i, i)).collect();
    let r = |i: usize, j: usize| col_dot(m, i, j) / (ss[i] * ss[j]).sqrt();
    for s in sets {
        let c = s.center;
        if s.members.first() != Some(&c) || s.correlations[0] != 1.0 {
            return Err(format!("set {}: center not first", c));
        }
        for (k, &i) in s.members.iter().enumerate().skip(1) {
            if ss[i] > ss[c] {
                return Err(format!("set {}: member {} breaks the diagonal condition", c, i));
            }
            let rij = r(c, i);
            if rij < THRESHOLD - 1e-12 || (rij - s.correlations[k]).abs() > 1e-12 {
                return Err(format!("set {}: member {} has r = {}", c, i, rij));
            }
            if s.correlations[k] > s.correlations[k - 1] && k > 1 {
                return Err(format!("set {}: members not sorted by r", c));
            }
        }
        for i in 0..p {
            let qualifies = i != c && ss[i] > 0.0 && ss[i] <= ss[c] && r(c, i) >= THRESHOLD + 1e-12;
            if qualifies && !s.members.contains(&i) {
                return Err(format!("set {}: qualifying variable {} missing", c, i));
            }
        }
        if s.top.len() > 20 || s.top[..] != s.members[..s.top.len()] || s.top.len() != s.members.len().min(20) {
            return Err(format!("set {}: bad top list", c));
        }
        let capped: f64 = s.correlations.iter().take(20).sum();
        if (s.measure - ss[c] * capped).abs() > 1e-10 * s.measure.abs().max(1.0) {
            return Err(format!("set {}: measure {} vs {}", c, s.measure, ss[c] * capped));
        }
    }
    for (a, sa) in sets.iter().enumerate() {
        if a > 0 && sa.measure > sets[a - 1].measure {
            return Err("sets not in decreasing measure".into());
        }
        for sb in &sets[a + 1..] {
            if sa.top.iter().any(|i| sb.top.contains(i)) {
                return Err(format!("sets {} and {} share a top gene", sa.center, sb.center));
            }
        }
    }
    Ok(())
}

/// (center, members) of the retained sets, rebuilt without the crate.
pub fn rebuild(m: &Matrix) -> Vec<(usize, Vec<usize>)> {
    let p = m.ncols();
    let ss: Vec<f64> = (0..p).map(|i| col_dot(m, i, i)).collect();
    let mut cands: Vec<(f64, usize, Vec<usize>)> = Vec::new();
    for c in 0..p {
        if ss[c] <= 0.0 {
            continue;
        }
        let mut partners: Vec<(usize, f64)> = (0..p)
            .filter(|&j| j != c && ss[j] > 0.0 && ss[j] <= ss[c])
            .map(|j| (j, col_dot(m, c, j) / (ss[c] * ss[j]).sqrt()))
            .filter(|&(_, r)| r >= THRESHOLD)
            .collect();
        partners.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
        let mut members = vec![c];
        let mut rs = vec![1.0];
        for (j, r) in partners {
            members.push(j);
            rs.push(r);
        }
        let o = ss[c] * rs.iter().take(20).sum::<f64>();
        cands.push((o, c, members));
    }
    cands.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
    let mut kept: Vec<(usize, Vec<usize>)> = Vec::new();
    for (_, c, members) in cands {
        let top = &members[..members.len().min(20)];
        let clash = kept.iter().any(|(_, k)| k[..k.len().min(20)].iter().any(|i| top.contains(i)));
        if !clash {
            kept.push((c, members));
        }
    }
    kept
}

/// n×p data with a few latent factors so that sets are non-trivial.
pub fn factor_data(seed: u64, n: usize, p: usize, factors: usize) -> Matrix {
    let mut rng = super::Lcg(seed);
    let f: Vec<Vec<f64>> = (0..factors).map(|_| (0..n).map(|_| rng.normal()).collect()).collect();
    let mut cols = Vec::with_capacity(p);
    for j in 0..p {
        let k = j % (factors + 1);
        let scale = 0.5 + 2.0 * rng.uniform();
        let col: Vec<f64> = (0..n)
            .map(|i| {
                let load = if k < factors { 1.5 * f[k][i] } else { 0.0 };
                scale * (load + rng.normal())
            })
            .collect();
        cols.push(col);
    }
    Matrix::from_columns(n, &cols).unwrap()
}

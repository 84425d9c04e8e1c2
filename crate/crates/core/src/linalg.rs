//! Small dense-vector helpers. Points and subgradients are plain `Vec<f64>`.

use nalgebra::{DMatrix, DVector};

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// `x - t * g`
pub fn axpy_neg(x: &[f64], t: f64, g: &[f64]) -> Vec<f64> {
    x.iter().zip(g).map(|(xi, gi)| xi - t * gi).collect()
}

pub fn scale(a: &[f64], t: f64) -> Vec<f64> {
    a.iter().map(|x| x * t).collect()
}

pub fn is_zero(a: &[f64]) -> bool {
    a.iter().all(|&x| x == 0.0)
}

/// Minimum-norm point of the convex hull of `vectors`.
///
/// The minimizer lies in the relative interior of the hull of some affinely
/// independent subset of at most `n + 1` generators, so every such subset is
/// tried: the affine-hull projection of the origin is solved from the KKT
/// system and kept when its barycentric weights are nonnegative.
pub fn min_norm_in_hull(vectors: &[Vec<f64>]) -> Vec<f64> {
    assert!(!vectors.is_empty(), "hull of an empty set");
    let n = vectors[0].len();

    let mut uniq: Vec<&Vec<f64>> = Vec::new();
    for v in vectors {
        if !uniq.contains(&v) {
            uniq.push(v);
        }
    }
    if uniq.len() == 1 {
        return uniq[0].clone();
    }
    if n == 1 {
        let lo = uniq.iter().map(|v| v[0]).fold(f64::INFINITY, f64::min);
        let hi = uniq.iter().map(|v| v[0]).fold(f64::NEG_INFINITY, f64::max);
        return vec![0.0_f64.clamp(lo, hi)];
    }

    let m = uniq.len();
    let max_size = (n + 1).min(m);
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut subset = Vec::with_capacity(max_size);
    for size in 1..=max_size {
        for_each_subset(m, size, 0, &mut subset, &mut |idx| {
            if let Some(point) = affine_projection(&uniq, idx) {
                let nrm = norm(&point);
                if best.as_ref().is_none_or(|(b, _)| nrm < *b) {
                    best = Some((nrm, point));
                }
            }
        });
    }
    best.map(|(_, p)| p).expect("singletons always yield a candidate")
}

fn for_each_subset(
    m: usize,
    size: usize,
    start: usize,
    current: &mut Vec<usize>,
    visit: &mut dyn FnMut(&[usize]),
) {
    if current.len() == size {
        visit(current);
        return;
    }
    for i in start..m {
        if m - i < size - current.len() {
            break;
        }
        current.push(i);
        for_each_subset(m, size, i + 1, current, visit);
        current.pop();
    }
}

/// Projection of the origin onto the affine hull of the chosen generators,
/// or `None` if the generators are affinely dependent or a weight is negative.
fn affine_projection(vectors: &[&Vec<f64>], idx: &[usize]) -> Option<Vec<f64>> {
    let k = idx.len();
    if k == 1 {
        return Some(vectors[idx[0]].clone());
    }
    let mut kkt = DMatrix::<f64>::zeros(k + 1, k + 1);
    for (r, &i) in idx.iter().enumerate() {
        for (c, &j) in idx.iter().enumerate() {
            kkt[(r, c)] = dot(vectors[i], vectors[j]);
        }
        kkt[(r, k)] = 1.0;
        kkt[(k, r)] = 1.0;
    }
    let mut rhs = DVector::<f64>::zeros(k + 1);
    rhs[k] = 1.0;
    let sol = kkt.lu().solve(&rhs)?;
    if sol.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let weights: Vec<f64> = (0..k).map(|r| sol[r]).collect();
    if weights.iter().any(|&w| w < -1e-12) {
        return None;
    }
    let n = vectors[idx[0]].len();
    let mut point = vec![0.0; n];
    for (w, &i) in weights.iter().zip(idx) {
        let w = w.max(0.0);
        for (p, v) in point.iter_mut().zip(vectors[i].iter()) {
            *p += w * v;
        }
    }
    Some(point)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn min_norm_one_dimensional_interval() {
        assert_eq!(min_norm_in_hull(&[vec![-1.0], vec![1.0]]), vec![0.0]);
        assert_eq!(min_norm_in_hull(&[vec![2.0], vec![0.5]]), vec![0.5]);
        assert_eq!(min_norm_in_hull(&[vec![-3.0], vec![-2.0]]), vec![-2.0]);
    }

    #[test]
    fn min_norm_segment_in_plane() {
        // segment from (1,1) to (1,-1): closest point (1,0)
        let p = min_norm_in_hull(&[vec![1.0, 1.0], vec![1.0, -1.0]]);
        assert!((p[0] - 1.0).abs() < 1e-14 && p[1].abs() < 1e-14);
    }

    #[test]
    fn min_norm_origin_inside_triangle() {
        let p = min_norm_in_hull(&[vec![1.0, 0.0], vec![-1.0, 1.0], vec![-1.0, -1.0]]);
        assert!(norm(&p) < 1e-14);
    }

    #[test]
    fn min_norm_vertex_is_closest() {
        let p = min_norm_in_hull(&[vec![1.0, 0.0], vec![3.0, 1.0], vec![3.0, -1.0]]);
        assert!((p[0] - 1.0).abs() < 1e-14 && p[1].abs() < 1e-14);
    }
}

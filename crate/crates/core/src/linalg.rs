//! Small dense-vector helpers used in the hot loops.

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Normalizes in place and returns the original norm.
pub fn normalize(a: &mut [f64]) -> f64 {
    let n = norm(a);
    if n > 0.0 {
        a.iter_mut().for_each(|x| *x /= n);
    }
    n
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Orthonormal basis of the orthogonal complement of the unit vector `axis`.
pub fn complement_basis(axis: &[f64]) -> Vec<Vec<f64>> {
    let d = axis.len();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(d - 1);
    // Gram-Schmidt over the standard basis, skipping the most aligned vector.
    let skip = (0..d)
        .max_by(|&i, &j| axis[i].abs().total_cmp(&axis[j].abs()))
        .unwrap_or(0);
    for i in (0..d).filter(|&i| i != skip) {
        let mut v = vec![0.0; d];
        v[i] = 1.0;
        for _ in 0..2 {
            let c = dot(&v, axis);
            v.iter_mut().zip(axis).for_each(|(x, a)| *x -= c * a);
            for b in &basis {
                let c = dot(&v, b);
                v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
        }
        normalize(&mut v);
        basis.push(v);
    }
    basis
}

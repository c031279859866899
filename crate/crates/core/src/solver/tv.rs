//! Anisotropic total variation and its proximal operator.
//!
//! The semi-norm sums absolute forward differences along rows and columns
//! with symmetric boundaries (the difference across the border is zero).
//! The prox splits TV into up to four groups of disjoint pixel pairs
//! (horizontal/vertical, even/odd offset). Each group's prox is a closed-form
//! pairwise shrinkage, and the groups are combined by a parallel Dykstra-type
//! iteration, so all pair updates within a sweep are independent.

/// Anisotropic TV of a `width x height` plane.
pub fn tv_norm(plane: &[f64], width: usize, height: usize) -> f64 {
    debug_assert_eq!(plane.len(), width * height);
    let mut total = 0.0;
    for r in 0..height {
        let row = &plane[r * width..(r + 1) * width];
        for c in 0..width.saturating_sub(1) {
            total += (row[c + 1] - row[c]).abs();
        }
        if r + 1 < height {
            let next = &plane[(r + 1) * width..(r + 2) * width];
            for c in 0..width {
                total += (next[c] - row[c]).abs();
            }
        }
    }
    total
}

/// `0.5 * ||u - y||^2 + weight * TV(u)`.
pub fn tv_denoise_objective(u: &[f64], y: &[f64], width: usize, height: usize, weight: f64) -> f64 {
    let fidelity: f64 = u.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
    0.5 * fidelity + weight * tv_norm(u, width, height)
}

#[derive(Debug, Clone, Copy)]
struct PairGroup {
    vertical: bool,
    offset: usize,
}

fn groups(width: usize, height: usize) -> Vec<PairGroup> {
    let mut out = Vec::with_capacity(4);
    for offset in 0..2 {
        if width >= offset + 2 {
            out.push(PairGroup { vertical: false, offset });
        }
        if height >= offset + 2 {
            out.push(PairGroup { vertical: true, offset });
        }
    }
    out
}

#[inline]
fn soft(v: f64, threshold: f64) -> f64 {
    if v > threshold {
        v - threshold
    } else if v < -threshold {
        v + threshold
    } else {
        0.0
    }
}

/// Prox of `weight * sum |u_b - u_a|` over the group's disjoint pairs:
/// each pair keeps its mean and its difference is soft-thresholded by
/// `2 * weight`.
fn shrink_pairs(group: PairGroup, input: &[f64], out: &mut [f64], width: usize, height: usize, weight: f64) {
    out.copy_from_slice(input);
    let threshold = 2.0 * weight;
    let mut pair = |a: usize, b: usize| {
        let mean = 0.5 * (input[a] + input[b]);
        let half = 0.5 * soft(input[b] - input[a], threshold);
        out[a] = mean - half;
        out[b] = mean + half;
    };
    if group.vertical {
        let mut r = group.offset;
        while r + 1 < height {
            for c in 0..width {
                pair(r * width + c, (r + 1) * width + c);
            }
            r += 2;
        }
    } else {
        for r in 0..height {
            let mut c = group.offset;
            while c + 1 < width {
                pair(r * width + c, r * width + c + 1);
                c += 2;
            }
        }
    }
}

/// Approximate `argmin_u 0.5 * ||u - y||^2 + weight * TV(u)`.
///
/// Runs `inner_iters` parallel sweeps and returns the iterate (or `y` itself)
/// with the lowest denoising objective, so the result never has larger TV
/// than the input.
pub fn tv_prox(y: &[f64], width: usize, height: usize, weight: f64, inner_iters: usize) -> Vec<f64> {
    assert_eq!(y.len(), width * height, "plane size mismatch");
    assert!(weight >= 0.0 && weight.is_finite(), "TV weight must be nonnegative");
    let groups = groups(width, height);
    if weight == 0.0 || groups.is_empty() || inner_iters == 0 {
        return y.to_vec();
    }
    let m = groups.len();
    let inv_m = 1.0 / m as f64;
    let n = y.len();

    let mut best = y.to_vec();
    let mut best_obj = weight * tv_norm(y, width, height);

    let mut z: Vec<Vec<f64>> = vec![y.to_vec(); m];
    let mut p: Vec<Vec<f64>> = vec![vec![0.0; n]; m];
    let mut x = vec![0.0; n];
    for _ in 0..inner_iters {
        for ((group, zi), pi) in groups.iter().zip(&z).zip(p.iter_mut()) {
            shrink_pairs(*group, zi, pi, width, height, m as f64 * weight);
        }
        x.iter_mut().for_each(|v| *v = 0.0);
        for pi in &p {
            for (xv, pv) in x.iter_mut().zip(pi) {
                *xv += pv;
            }
        }
        x.iter_mut().for_each(|v| *v *= inv_m);
        for (zi, pi) in z.iter_mut().zip(&p) {
            for ((zv, pv), xv) in zi.iter_mut().zip(pi).zip(&x) {
                *zv += xv - pv;
            }
        }
        let obj = tv_denoise_objective(&x, y, width, height, weight);
        if obj < best_obj {
            best_obj = obj;
            best.copy_from_slice(&x);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norm_of_small_planes() {
        assert_eq!(tv_norm(&[0.0, 0.0, 1.0, 1.0], 4, 1), 1.0);
        assert_eq!(tv_norm(&[1.0, 2.0, 3.0, 5.0], 2, 2), 1.0 + 2.0 + 2.0 + 3.0);
        assert_eq!(tv_norm(&[7.0; 9], 3, 3), 0.0);
    }

    #[test]
    fn constant_plane_is_fixed() {
        let y = vec![2.5; 12];
        assert_eq!(tv_prox(&y, 4, 3, 10.0, 10), y);
    }

    #[test]
    fn zero_weight_is_identity() {
        let y: Vec<f64> = (0..20).map(|i| (i * 7 % 5) as f64).collect();
        assert_eq!(tv_prox(&y, 5, 4, 0.0, 10), y);
    }

    #[test]
    fn step_edge_shrinks_by_twice_the_weight() {
        // exact prox of [0,0,1,1] for w < 1/4 is [w/2, w/2, 1-w/2, 1-w/2]
        let w = 0.1;
        let u = tv_prox(&[0.0, 0.0, 1.0, 1.0], 4, 1, w, 200);
        let edge = u[2] - u[1];
        assert!((edge - (1.0 - w)).abs() < 1e-3, "edge {edge}");
        assert!((u[0] - w / 2.0).abs() < 1e-3);
    }

    #[test]
    fn single_pair_is_exact_in_one_sweep() {
        let u = tv_prox(&[0.0, 1.0], 2, 1, 0.2, 1);
        assert!((u[0] - 0.2).abs() < 1e-15 && (u[1] - 0.8).abs() < 1e-15);
    }
}

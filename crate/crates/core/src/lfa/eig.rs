//! Closed-form eigenvalues of 3×3 complex matrices.

use nalgebra::Matrix3;
use num_complex::Complex64;

/// Roots closer than these multiples of `‖M - tr(M)/3‖_F` are reported as
/// their common mean. A computed k-fold root scatters like `ε^(1/k)`, while
/// the mean of the cluster is accurate to `ε`.
const TRIPLE_CLUSTER: f64 = 1e-4;
const DOUBLE_CLUSTER: f64 = 1e-6;

/// Eigenvalues of `m`, sorted lexicographically by (real, imaginary) part.
///
/// The characteristic polynomial of the trace-free shift `m - (tr m / 3) I`
/// is solved by Cardano's formula, each root is polished by Newton steps,
/// and clusters below the resolution above are replaced by their mean.
pub fn eig3(m: &Matrix3<Complex64>) -> [Complex64; 3] {
    let shift = m.trace() / 3.0;
    let mut a = *m;
    for k in 0..3 {
        a[(k, k)] -= shift;
    }
    let scale = a.norm();
    if scale == 0.0 || !scale.is_finite() {
        return [shift; 3];
    }

    // t³ + p t + q with p = sum of principal 2×2 minors, q = -det
    let minor = |i: usize, j: usize| a[(i, i)] * a[(j, j)] - a[(i, j)] * a[(j, i)];
    let p = minor(0, 1) + minor(0, 2) + minor(1, 2);
    let q = -a.determinant();

    let mut t = cardano(p, q);
    for root in t.iter_mut() {
        *root = polish(*root, p, q);
    }
    merge_clusters(&mut t, scale);

    let mut out = t.map(|x| x + shift);
    out.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
    out
}

/// Largest eigenvalue modulus.
pub fn spectral_radius(m: &Matrix3<Complex64>) -> f64 {
    eig3(m).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn cardano(p: Complex64, q: Complex64) -> [Complex64; 3] {
    let zero = Complex64::new(0.0, 0.0);
    let disc = (q * 0.5) * (q * 0.5) + (p / 3.0) * (p / 3.0) * (p / 3.0);
    let s = disc.sqrt();
    let w1 = -q * 0.5 + s;
    let w2 = -q * 0.5 - s;
    let w = if w1.norm() >= w2.norm() { w1 } else { w2 };
    if w.norm() == 0.0 {
        // p = q = 0
        return [zero; 3];
    }
    let u = w.powf(1.0 / 3.0);
    let v = -p / (3.0 * u);
    let zeta = Complex64::new(-0.5, 3f64.sqrt() / 2.0);
    let zeta2 = zeta.conj();
    [u + v, u * zeta + v * zeta2, u * zeta2 + v * zeta]
}

fn polish(mut t: Complex64, p: Complex64, q: Complex64) -> Complex64 {
    let f = |x: Complex64| (x * x + p) * x + q;
    let mut ft = f(t).norm();
    for _ in 0..3 {
        let df = 3.0 * t * t + p;
        if df.norm() == 0.0 {
            break;
        }
        let cand = t - f(t) / df;
        let fc = f(cand).norm();
        if !(fc < ft) {
            break;
        }
        t = cand;
        ft = fc;
    }
    t
}

/// The roots of a trace-free cubic sum to zero, so a cluster's mean can be
/// read off the remaining roots.
fn merge_clusters(t: &mut [Complex64; 3], scale: f64) {
    let d01 = (t[0] - t[1]).norm();
    let d02 = (t[0] - t[2]).norm();
    let d12 = (t[1] - t[2]).norm();
    if d01.max(d02).max(d12) < TRIPLE_CLUSTER * scale {
        *t = [Complex64::new(0.0, 0.0); 3];
        return;
    }
    let pairs = [(d01, 0, 1, 2), (d02, 0, 2, 1), (d12, 1, 2, 0)];
    let (d, i, j, other) = pairs
        .into_iter()
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .expect("three pairs");
    if d < DOUBLE_CLUSTER * scale {
        let mean = -t[other] * 0.5;
        t[i] = mean;
        t[j] = mean;
    }
}

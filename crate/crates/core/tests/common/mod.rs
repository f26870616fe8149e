//! Reference implementations written directly from the model equations,
//! shared by the integration tests. Nothing here calls into the library.
#![allow(dead_code)]

use num_complex::Complex64;
use rand::Rng;

/// `[b, alpha, beta1, beta2, k1, k2]`
pub type Raw = [f64; 6];

pub const ENDEMIC: Raw = [0.2, 0.3, 0.7, 0.6, 1.0, 0.3];

/// Interior force for [`ENDEMIC`], solved independently in
/// extended precision.
pub const ENDEMIC_FORCE: f64 = 0.176_630_255_520_889_7;
pub const ENDEMIC_LAMBDA17: [f64; 4] =
    [0.617_968_333_639_208_7, 0.152_812_666_544_316_55, 0.149_827_036_561_231_03, 0.079_391_963_255_243_77];

pub fn step(p: &Raw, s: &[f64; 4]) -> [f64; 4] {
    let [b, al, b1, b2, k1, k2] = *p;
    let [x, u, y, v] = *s;
    let a = k1 * u + k2 * v;
    [
        x + b - b * x - b1 * a * x,
        u - b * u - al * u + b1 * a * x,
        y - b * y + al * u - b2 * a * y,
        v - b * v + b2 * a * y,
    ]
}

pub fn conditions_hold(p: &Raw) -> bool {
    let [b, al, b1, b2, k1, k2] = *p;
    al + b <= 1.0
        && b1 * k2 <= 2.0
        && b2 * k1 <= 2.0
        && b + b2 * k2 <= 1.0
        && (b - b1 * k1).abs() <= 1.0
        && (b - b2 * k2).abs() <= 1.0
        && (b - b1 * k2).abs() <= 1.0
        && (al + b - b1 * k1).abs() <= 1.0
        && (al - b - b2 * k1).abs() <= 1.0
}

pub fn f(p: &Raw, a: f64) -> f64 {
    p[0] + p[2] * a
}

pub fn g(p: &Raw, a: f64) -> f64 {
    let [b, al, b1, b2, k1, k2] = *p;
    b * b1 * k1 / (b + al) + al * b1 * b2 * k2 * a / ((b + b2 * a) * (b + al))
}

/// Root of `f − g` on `(lo, hi]`, assuming a single sign change.
pub fn bisect(p: &Raw, mut lo: f64, mut hi: f64) -> Option<f64> {
    let h = |a: f64| f(p, a) - g(p, a);
    let (flo, fhi) = (h(lo), h(hi));
    if flo.signum() == fhi.signum() {
        return None;
    }
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if h(mid).signum() == flo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Interior fixed point from its force.
pub fn lambda17(p: &Raw, a: f64) -> [f64; 4] {
    let [b, al, b1, b2, _, _] = *p;
    let x = b / (b + b1 * a);
    let u = b1 * a * x / (b + al);
    let y = al * u / (b + b2 * a);
    let v = b2 * a * y / b;
    [x, u, y, v]
}

pub fn lambda16(p: &Raw) -> [f64; 4] {
    let [b, al, b1, _, k1, _] = *p;
    let gap = b1 * k1 - b - al;
    [(b + al) / (b1 * k1), b * gap / (b1 * k1 * (b + al)), al * gap / (b1 * k1 * (b + al)), 0.0]
}

/// Eigenvalues at λ16 from the characteristic polynomial of the
/// `(x, u, y)` block, which is block triangular with the `(u, y)` pair.
pub fn lambda16_eigs(p: &Raw) -> [Complex64; 4] {
    let [b, al, b1, _, k1, _] = *p;
    let ba1 = b * (b1 * k1 - b - al) / (b + al);
    let tr = 2.0 - b - ba1;
    let det = (1.0 - b) * (1.0 - ba1) + al * ba1;
    let disc = Complex64::new(tr * tr - 4.0 * det, 0.0).sqrt();
    [Complex64::new(1.0 - b, 0.0), Complex64::new(1.0 - b, 0.0), (tr - disc) / 2.0, (tr + disc) / 2.0]
}

/// Central-difference Jacobian of [`step`].
pub fn fd_jacobian(p: &Raw, s: &[f64; 4], h: f64) -> [[f64; 4]; 4] {
    let mut j = [[0.0; 4]; 4];
    for col in 0..4 {
        let mut up = *s;
        let mut dn = *s;
        up[col] += h;
        dn[col] -= h;
        let (fu, fd) = (step(p, &up), step(p, &dn));
        for row in 0..4 {
            j[row][col] = (fu[row] - fd[row]) / (2.0 * h);
        }
    }
    j
}

/// Uniform point on the simplex spanned by the coordinates in `free`.
pub fn simplex_point<R: Rng>(rng: &mut R, free: &[usize]) -> [f64; 4] {
    let mut s = [0.0; 4];
    let mut total = 0.0;
    for &i in free {
        let e = -(1.0 - rng.gen::<f64>()).ln();
        s[i] = e;
        total += e;
    }
    for v in &mut s {
        *v /= total;
    }
    s
}

/// Rejection-sampled admissible parameters with `b, alpha ≥ floor` and
/// every other entry uniform on `[0, 2)`, filtered by `keep`.
pub fn valid_params<R: Rng>(rng: &mut R, floor: f64, keep: impl Fn(&Raw) -> bool) -> Raw {
    loop {
        let p = [
            rng.gen_range(floor..1.0),
            rng.gen_range(floor..1.0),
            rng.gen_range(0.0..2.0),
            rng.gen_range(0.0..2.0),
            rng.gen_range(0.0..2.0),
            rng.gen_range(0.0..2.0),
        ];
        if conditions_hold(&p) && keep(&p) {
            return p;
        }
    }
}

pub fn gap(p: &Raw) -> f64 {
    p[2] * p[4] - p[0] - p[1]
}

pub fn sup(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Roots of `f − g` located by a uniform scan of `(0, hi]` with `n` points
/// and refined by bisection.
pub fn scan_roots(p: &Raw, hi: f64, n: usize) -> Vec<f64> {
    let h = |a: f64| f(p, a) - g(p, a);
    let mut roots = Vec::new();
    let mut prev = (1e-15, h(1e-15));
    for i in 1..=n {
        let a = hi * i as f64 / n as f64;
        let v = h(a);
        if v.signum() != prev.1.signum() {
            roots.push(bisect(p, prev.0, a).unwrap());
        }
        prev = (a, v);
    }
    roots
}

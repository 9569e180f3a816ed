//! Bracketing root search: sign changes on a probe grid, refined by bisection.

/// Bisects `[a, b]` (with `f(a)` and `f(b)` of opposite sign) down to a width
/// below `tol`.
pub(crate) fn bisect(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let mut fa = f(a);
    for _ in 0..200 {
        if b - a <= tol {
            break;
        }
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

/// All roots of `f` on `[a, b]` detected as sign changes between consecutive
/// points of a `probe_n`-cell grid (endpoints included). Probe points where
/// `f` is exactly zero are reported as roots. Roots sharing a cell with
/// another root cancel out and are missed; callers check the spacing of what
/// comes back.
pub(crate) fn bracket_roots(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    probe_n: usize,
    tol: f64,
) -> Vec<f64> {
    let h = (b - a) / probe_n as f64;
    let x = |i: usize| if i == probe_n { b } else { a + i as f64 * h };
    let mut roots = Vec::new();
    let mut prev = f(x(0));
    if prev == 0.0 {
        roots.push(x(0));
    }
    for i in 1..=probe_n {
        let xi = x(i);
        let cur = f(xi);
        if cur == 0.0 {
            roots.push(xi);
        } else if prev != 0.0 && (prev < 0.0) != (cur < 0.0) {
            roots.push(bisect(&f, x(i - 1), xi, tol));
        }
        prev = cur;
    }
    roots
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_cubic_roots() {
        let f = |x: f64| (x + 0.5) * (x - 0.1) * (x - 0.7);
        let r = bracket_roots(f, -1.0, 1.0, 64, 1e-14);
        assert_eq!(r.len(), 3);
        for (got, want) in r.iter().zip([-0.5, 0.1, 0.7]) {
            assert!((got - want).abs() < 1e-13, "{got} vs {want}");
        }
    }

    #[test]
    fn exact_zero_on_probe_point() {
        let r = bracket_roots(|x| x, -1.0, 1.0, 4, 1e-14);
        assert_eq!(r, vec![0.0]);
    }

    #[test]
    fn same_cell_pair_is_missed() {
        let f = |x: f64| (x - 0.3055) * (x - 0.3155);
        assert!(bracket_roots(f, 0.0, 1.0, 10, 1e-14).is_empty());
        assert_eq!(bracket_roots(f, 0.0, 1.0, 1000, 1e-14).len(), 2);
    }
}

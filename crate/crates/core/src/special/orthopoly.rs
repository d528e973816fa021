/// Physicists' Hermite polynomial H_n(x) by three-term recurrence.
pub fn hermite(n: usize, x: f64) -> f64 {
    let mut h0 = 1.0;
    if n == 0 {
        return h0;
    }
    let mut h1 = 2.0 * x;
    for k in 1..n {
        let h2 = 2.0 * x * h1 - 2.0 * k as f64 * h0;
        h0 = h1;
        h1 = h2;
    }
    h1
}

/// Generalised Laguerre polynomial L_n^{(b)}(x).
pub fn assoc_laguerre(n: usize, b: f64, x: f64) -> f64 {
    let mut l0 = 1.0;
    if n == 0 {
        return l0;
    }
    let mut l1 = 1.0 + b - x;
    for k in 1..n {
        let kf = k as f64;
        let l2 = ((2.0 * kf + 1.0 + b - x) * l1 - (kf + b) * l0) / (kf + 1.0);
        l0 = l1;
        l1 = l2;
    }
    l1
}

/// Ordinary Laguerre polynomial L_n(x).
pub fn laguerre(n: usize, x: f64) -> f64 {
    assoc_laguerre(n, 0.0, x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::pochhammer;

    #[test]
    fn hermite_low_orders() {
        let x = 0.7;
        assert_eq!(hermite(0, x), 1.0);
        assert!((hermite(1, x) - 2.0 * x).abs() < 1e-15);
        assert!((hermite(2, x) - (4.0 * x * x - 2.0)).abs() < 1e-14);
        assert!((hermite(3, x) - (8.0 * x.powi(3) - 12.0 * x)).abs() < 1e-13);
        assert_eq!(hermite(4, 0.0), 12.0);
    }

    #[test]
    fn laguerre_matches_explicit_sum() {
        // L_n^{(b)}(x) = Σ_k (−1)^k C(n+b, n−k) x^k / k!
        for n in 0..8usize {
            for &b in &[0.0, 0.5, 1.5, 3.2] {
                for &x in &[0.0f64, 0.3, 2.0, 5.5] {
                    let mut s = 0.0;
                    let mut fact = 1.0;
                    for k in 0..=n {
                        if k > 0 {
                            fact *= k as f64;
                        }
                        // C(n+b, n−k) = (b+k+1)_{n−k} / (n−k)!
                        let mut nf = 1.0;
                        for j in 1..=(n - k) {
                            nf *= j as f64;
                        }
                        let c = pochhammer(b + k as f64 + 1.0, n - k) / nf;
                        s += (-1f64).powi(k as i32) * c * x.powi(k as i32) / fact;
                    }
                    let v = assoc_laguerre(n, b, x);
                    assert!((v - s).abs() < 1e-10 * s.abs().max(1.0), "n={n} b={b} x={x}");
                }
            }
        }
    }

    #[test]
    fn laguerre_hermite_relation() {
        // H_{2n}(x) = (−4)^n n! L_n^{(−1/2)}(x²)
        for n in 0..6usize {
            let x = 0.9;
            let mut nf = 1.0;
            for j in 1..=n {
                nf *= j as f64;
            }
            let rhs = (-4f64).powi(n as i32) * nf * assoc_laguerre(n, -0.5, x * x);
            assert!((hermite(2 * n, x) - rhs).abs() < 1e-9 * rhs.abs().max(1.0));
        }
    }
}

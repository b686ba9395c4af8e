//! Complex polynomial utilities. Coefficients are stored lowest degree first.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{DispersionError, Result};

/// Horner evaluation returning `(p(x), p'(x))`.
pub fn eval_with_derivative(coeffs: &[Complex64], x: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * x + p;
        p = p * x + c;
    }
    (p, dp)
}

pub fn eval(coeffs: &[Complex64], x: Complex64) -> Complex64 {
    eval_with_derivative(coeffs, x).0
}

/// All roots of the polynomial via companion-matrix eigenvalues, each
/// refined by a few Newton steps. Leading zero coefficients are an error;
/// exactly vanishing low-order coefficients give exact zero roots.
pub fn roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let zeros = coeffs.iter().take_while(|c| c.norm() == 0.0).count();
    if zeros > 0 && zeros < coeffs.len() {
        let mut out = roots(&coeffs[zeros..])?;
        out.extend(std::iter::repeat_n(Complex64::new(0.0, 0.0), zeros));
        return Ok(out);
    }
    let n = coeffs.len().saturating_sub(1);
    let lead = *coeffs.last().ok_or_else(|| DispersionError::RootSolveFailed("empty polynomial".into()))?;
    if lead.norm() == 0.0 {
        return Err(DispersionError::RootSolveFailed("vanishing leading coefficient".into()));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    if n == 1 {
        return Ok(vec![-coeffs[0] / coeffs[1]]);
    }
    let mut comp = DMatrix::<Complex64>::zeros(n, n);
    for i in 1..n {
        comp[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..n {
        comp[(i, n - 1)] = -coeffs[i] / lead;
    }
    let mut out = eigenvalues(&comp).ok_or_else(|| DispersionError::RootSolveFailed("companion eigensolve did not converge".into()))?;
    for r in out.iter_mut() {
        *r = polish(coeffs, *r, 8);
    }
    Ok(out)
}

/// Eigenvalues of a general complex matrix: Hessenberg reduction followed
/// by single-shift QR with Wilkinson shifts and deflation. Returns `None`
/// only if some eigenvalue fails to converge.
pub fn eigenvalues(m: &DMatrix<Complex64>) -> Option<Vec<Complex64>> {
    let n = m.nrows();
    if n == 0 {
        return Some(Vec::new());
    }
    let mut h = m.clone().hessenberg().h();
    let mut out = Vec::with_capacity(n);
    let mut hi = n - 1;
    let mut iter = 0usize;
    let scale = h.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    loop {
        if hi == 0 {
            out.push(h[(0, 0)]);
            break;
        }
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let mut diag = h[(lo, lo)].norm() + h[(lo - 1, lo - 1)].norm();
            if diag == 0.0 {
                diag = scale;
            }
            if sub <= f64::EPSILON * diag {
                h[(lo, lo - 1)] = Complex64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            out.push(h[(hi, hi)]);
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        if iter > 300 {
            return None;
        }
        let shift = if iter % 11 == 10 {
            h[(hi, hi)] + h[(hi, hi - 1)].norm() * Complex64::new(0.75, 0.5)
        } else {
            let (a, b, c, d) = (h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)]);
            let half = (a - d) * 0.5;
            let disc = (half * half + b * c).sqrt();
            let (m1, m2) = ((a + d) * 0.5 + disc, (a + d) * 0.5 - disc);
            if (m1 - d).norm() < (m2 - d).norm() {
                m1
            } else {
                m2
            }
        };
        for k in lo..=hi {
            h[(k, k)] -= shift;
        }
        let mut rots = Vec::with_capacity(hi - lo);
        for k in lo..hi {
            let (x, y) = (h[(k, k)], h[(k + 1, k)]);
            let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
            let (c, s) = if r == 0.0 { (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)) } else { (x / r, y / r) };
            for j in k..=hi {
                let (u, v) = (h[(k, j)], h[(k + 1, j)]);
                h[(k, j)] = c.conj() * u + s.conj() * v;
                h[(k + 1, j)] = -s * u + c * v;
            }
            rots.push((c, s));
        }
        for (k, &(c, s)) in (lo..hi).zip(&rots) {
            for i in lo..=(k + 1).min(hi) {
                let (u, v) = (h[(i, k)], h[(i, k + 1)]);
                h[(i, k)] = u * c + v * s;
                h[(i, k + 1)] = -u * s.conj() + v * c.conj();
            }
        }
        for k in lo..=hi {
            h[(k, k)] += shift;
        }
    }
    Some(out)
}

/// Newton refinement that keeps the best iterate seen.
pub fn polish(coeffs: &[Complex64], x0: Complex64, iters: usize) -> Complex64 {
    let mut x = x0;
    let mut best = x0;
    let mut best_res = eval(coeffs, x0).norm();
    for _ in 0..iters {
        let (p, dp) = eval_with_derivative(coeffs, x);
        if dp.norm() == 0.0 || p.norm() == 0.0 {
            break;
        }
        x -= p / dp;
        let res = eval(coeffs, x).norm();
        if res < best_res {
            best_res = res;
            best = x;
        } else {
            break;
        }
    }
    best
}

/// Scale used for relative residuals: `Σ |c_i| |x|^i`.
pub fn magnitude_at(coeffs: &[Complex64], x: Complex64) -> f64 {
    let r = x.norm();
    coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn from_roots(rs: &[Complex64]) -> Vec<Complex64> {
        let mut p = vec![c(1.0, 0.0)];
        for &r in rs {
            let mut next = vec![c(0.0, 0.0); p.len() + 1];
            for (i, &a) in p.iter().enumerate() {
                next[i + 1] += a;
                next[i] -= a * r;
            }
            p = next;
        }
        p
    }

    #[test]
    fn recovers_manufactured_roots() {
        let want = [c(1.0, 2.0), c(-0.5, 0.1), c(3.0, -1.0), c(0.0, 0.25), c(-2.0, -2.0)];
        let mut got = roots(&from_roots(&want)).unwrap();
        for w in want {
            let (i, d) = got
                .iter()
                .enumerate()
                .map(|(i, g)| (i, (g - w).norm()))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap();
            assert!(d < 1e-12, "{w} missing, closest at {d}");
            got.remove(i);
        }
    }

    #[test]
    fn near_identity_eigenvalues() {
        let mut m = DMatrix::<Complex64>::identity(4, 4);
        m[(1, 2)] = c(-1e-17, 0.0);
        m[(3, 0)] = c(-2e-17, 0.0);
        let ev = eigenvalues(&m).unwrap();
        assert!(ev.iter().all(|e| (e - 1.0).norm() < 1e-14));
    }

    #[test]
    fn eigenvalues_of_random_matrices() {
        let mut state = 12345u64;
        let mut rnd = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        for n in [1, 2, 3, 5, 8, 16] {
            let m = DMatrix::from_fn(n, n, |_, _| c(rnd(), rnd()));
            let ev = eigenvalues(&m).unwrap();
            assert_eq!(ev.len(), n);
            let tr: Complex64 = ev.iter().sum();
            assert!((tr - m.trace()).norm() < 1e-12);
            let det: Complex64 = ev.iter().product();
            assert!((det - m.clone().determinant()).norm() < 1e-12 * det.norm().max(1.0));
            for &e in &ev {
                let shifted = &m - DMatrix::<Complex64>::identity(n, n) * e;
                assert!(shifted.svd(false, false).singular_values.min() < 1e-12);
            }
        }
    }

    #[test]
    fn linear_and_errors() {
        assert_eq!(roots(&[c(2.0, 0.0), c(-4.0, 0.0)]).unwrap(), vec![c(0.5, 0.0)]);
        assert!(roots(&[c(1.0, 0.0), c(0.0, 0.0)]).is_err());
        let (p, dp) = eval_with_derivative(&[c(1.0, 0.0), c(0.0, 0.0), c(3.0, 0.0)], c(2.0, 0.0));
        assert_eq!((p, dp), (c(13.0, 0.0), c(12.0, 0.0)));
    }
}

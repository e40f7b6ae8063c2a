//! Eigenvalues of a general real matrix: balancing, reduction to upper
//! Hessenberg form by stabilized elementary transforms, then Francis
//! double-shift QR. Eigenvalues only; the routines that need eigenvectors
//! (Perron pairs) recover them by inverse iteration instead.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;

use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;

/// Returns eigenvalues of `a` as `(real_parts, imaginary_parts)`, unordered.
pub fn general_eigenvalues(a: &SquareMatrix) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = a.n();
    if n == 0 {
        return Ok((Vec::new(), Vec::new()));
    }
    if n == 1 {
        return Ok((vec![a.get(0, 0)], vec![0.0]));
    }
    let mut h = a.clone();
    balance(&mut h);
    elmhes(&mut h);
    hqr(&mut h)
}

/// Iterative exact-arithmetic balancing (powers of two) to equalize row and
/// column norms; a similarity transform, so eigenvalues are untouched.
fn balance(a: &mut SquareMatrix) {
    let n = a.n();
    let radix: f64 = 2.0;
    let sqrdx = radix * radix;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 0..n {
                if j != i {
                    c += a.get(j, i).abs();
                    r += a.get(i, j).abs();
                }
            }
            if c != 0.0 && r != 0.0 {
                let mut g = r / radix;
                let mut f = 1.0;
                let s = c + r;
                while c < g {
                    f *= radix;
                    c *= sqrdx;
                }
                g = r * radix;
                while c > g {
                    f /= radix;
                    c /= sqrdx;
                }
                if (c + r) / f < 0.95 * s {
                    done = false;
                    let ginv = 1.0 / f;
                    for j in 0..n {
                        let v = a.get(i, j) * ginv;
                        a.set(i, j, v);
                    }
                    for j in 0..n {
                        let v = a.get(j, i) * f;
                        a.set(j, i, v);
                    }
                }
            }
        }
    }
}

/// Reduction to upper Hessenberg form by Gaussian similarity transforms with
/// pivoting. The sub-sub-diagonal garbage left behind is ignored by `hqr`.
fn elmhes(a: &mut SquareMatrix) {
    let n = a.n();
    for m in 1..(n - 1) {
        let mut x = 0.0;
        let mut i = m;
        for j in m..n {
            if a.get(j, m - 1).abs() > x.abs() {
                x = a.get(j, m - 1);
                i = j;
            }
        }
        if i != m {
            for j in (m - 1)..n {
                let tmp = a.get(i, j);
                a.set(i, j, a.get(m, j));
                a.set(m, j, tmp);
            }
            for j in 0..n {
                let tmp = a.get(j, i);
                a.set(j, i, a.get(j, m));
                a.set(j, m, tmp);
            }
        }
        if x != 0.0 {
            for i in (m + 1)..n {
                let mut y = a.get(i, m - 1);
                if y != 0.0 {
                    y /= x;
                    a.set(i, m - 1, y);
                    for j in m..n {
                        let v = a.get(i, j) - y * a.get(m, j);
                        a.set(i, j, v);
                    }
                    for j in 0..n {
                        let v = a.get(j, m) + y * a.get(j, i);
                        a.set(j, m, v);
                    }
                }
            }
        }
    }
}

/// Fortran-style transfer of sign: `|a| * sign(b)` with `sign(0) = +`.
#[inline]
fn sign_of(a: f64, b: f64) -> f64 {
    if b >= 0.0 {
        a.abs()
    } else {
        -a.abs()
    }
}

/// Francis double-shift QR on an upper Hessenberg matrix.
#[allow(clippy::many_single_char_names)]
fn hqr(a: &mut SquareMatrix) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = a.n();
    let mut wr = vec![0.0; n];
    let mut wi = vec![0.0; n];
    let eps = f64::EPSILON;

    let mut anorm = 0.0;
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm += a.get(i, j).abs();
        }
    }
    if anorm == 0.0 {
        return Ok((wr, wi));
    }

    let mut nn = n - 1;
    let mut t = 0.0;
    let mut its = 0;
    loop {
        // Find a negligible subdiagonal entry; the active block is l..=nn.
        let mut l = nn;
        while l >= 1 {
            let mut s = a.get(l - 1, l - 1).abs() + a.get(l, l).abs();
            if s == 0.0 {
                s = anorm;
            }
            if a.get(l, l - 1).abs() <= eps * s {
                a.set(l, l - 1, 0.0);
                break;
            }
            l -= 1;
        }

        let mut x = a.get(nn, nn);
        if l == nn {
            // One real eigenvalue deflates.
            wr[nn] = x + t;
            wi[nn] = 0.0;
            if nn == 0 {
                break;
            }
            nn -= 1;
            its = 0;
            continue;
        }

        let mut y = a.get(nn - 1, nn - 1);
        let mut w = a.get(nn, nn - 1) * a.get(nn - 1, nn);
        if l == nn - 1 {
            // A trailing 2x2 block: real pair or complex conjugates.
            let p = 0.5 * (y - x);
            let q = p * p + w;
            let z = q.abs().sqrt();
            x += t;
            if q >= 0.0 {
                let z = p + sign_of(z, p);
                wr[nn - 1] = x + z;
                wr[nn] = wr[nn - 1];
                if z != 0.0 {
                    wr[nn] = x - w / z;
                }
                wi[nn - 1] = 0.0;
                wi[nn] = 0.0;
            } else {
                wr[nn - 1] = x + p;
                wr[nn] = wr[nn - 1];
                wi[nn - 1] = -z;
                wi[nn] = z;
            }
            if nn <= 1 {
                break;
            }
            nn -= 2;
            its = 0;
            continue;
        }

        // No deflation: run one double-shift QR sweep over the block.
        if its == 60 {
            return Err(Error::Numeric(alloc::format!(
                "QR eigenvalue iteration failed to converge (block ending at {nn})"
            )));
        }
        if its > 0 && its % 10 == 0 {
            // Exceptional shift to break cycling.
            t += x;
            for i in 0..=nn {
                let v = a.get(i, i) - x;
                a.set(i, i, v);
            }
            let s = a.get(nn, nn - 1).abs() + a.get(nn - 1, nn - 2).abs();
            x = 0.75 * s;
            y = x;
            w = -0.4375 * s * s;
        }
        its += 1;

        // Look for two consecutive small subdiagonals starting the bulge.
        let mut m = nn - 2;
        let mut p;
        let mut q;
        let mut r;
        loop {
            let z = a.get(m, m);
            let rr = x - z;
            let ss = y - z;
            p = (rr * ss - w) / a.get(m + 1, m) + a.get(m, m + 1);
            q = a.get(m + 1, m + 1) - z - rr - ss;
            r = a.get(m + 2, m + 1);
            let s = p.abs() + q.abs() + r.abs();
            p /= s;
            q /= s;
            r /= s;
            if m == l {
                break;
            }
            let u = a.get(m, m - 1).abs() * (q.abs() + r.abs());
            let v = p.abs() * (a.get(m - 1, m - 1).abs() + z.abs() + a.get(m + 1, m + 1).abs());
            if u <= eps * v {
                break;
            }
            m -= 1;
        }
        for i in (m + 2)..=nn {
            a.set(i, i - 2, 0.0);
            if i > m + 2 {
                a.set(i, i - 3, 0.0);
            }
        }

        // Chase the bulge.
        for k in m..nn {
            let mut col_scale = 0.0;
            if k != m {
                p = a.get(k, k - 1);
                q = a.get(k + 1, k - 1);
                r = if k + 1 != nn { a.get(k + 2, k - 1) } else { 0.0 };
                col_scale = p.abs() + q.abs() + r.abs();
                if col_scale != 0.0 {
                    p /= col_scale;
                    q /= col_scale;
                    r /= col_scale;
                }
            }
            let s = sign_of((p * p + q * q + r * r).sqrt(), p);
            if s == 0.0 {
                continue;
            }
            if k == m {
                if l != m {
                    let v = -a.get(k, k - 1);
                    a.set(k, k - 1, v);
                }
            } else {
                a.set(k, k - 1, -s * col_scale);
            }
            p += s;
            let hx = p / s;
            let hy = q / s;
            let hz = r / s;
            q /= p;
            r /= p;
            for j in k..=nn {
                let mut pj = a.get(k, j) + q * a.get(k + 1, j);
                if k + 1 != nn {
                    pj += r * a.get(k + 2, j);
                    let v = a.get(k + 2, j) - pj * hz;
                    a.set(k + 2, j, v);
                }
                let v1 = a.get(k + 1, j) - pj * hy;
                a.set(k + 1, j, v1);
                let v0 = a.get(k, j) - pj * hx;
                a.set(k, j, v0);
            }
            let mmin = if nn < k + 3 { nn } else { k + 3 };
            for i in l..=mmin {
                let mut pi = hx * a.get(i, k) + hy * a.get(i, k + 1);
                if k + 1 != nn {
                    pi += hz * a.get(i, k + 2);
                    let v = a.get(i, k + 2) - pi * r;
                    a.set(i, k + 2, v);
                }
                let v1 = a.get(i, k + 1) - pi * q;
                a.set(i, k + 1, v1);
                let v0 = a.get(i, k) - pi;
                a.set(i, k, v0);
            }
        }
    }

    Ok((wr, wi))
}

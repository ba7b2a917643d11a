//! Matrix exponential by scaling and squaring around the degree-13 diagonal
//! Padé approximant, with a partial-pivoting LU solve.

use crate::error::{Error, Result};
use crate::C64;
use ndarray::{s, Array2, Axis, Zip};

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// Scaling threshold for the degree-13 approximant.
const THETA13: f64 = 5.371920351148152;

fn one_norm(a: &Array2<C64>) -> f64 {
    a.axis_iter(Axis(1))
        .map(|col| col.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn combo(terms: &[(f64, &Array2<C64>)], identity: f64) -> Array2<C64> {
    let n = terms[0].1.nrows();
    let mut out = Array2::<C64>::zeros((n, n));
    for (c, m) in terms {
        Zip::from(&mut out).and(*m).for_each(|o, &x| *o += x * *c);
    }
    for i in 0..n {
        out[[i, i]] += identity;
    }
    out
}

/// `exp(A)` for a square complex matrix.
pub fn expm(a: &Array2<C64>) -> Result<Array2<C64>> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::SizeMismatch {
            expected: n,
            got: a.ncols(),
        });
    }
    let norm = one_norm(a);
    if !norm.is_finite() {
        return Err(Error::InvalidParameter("matrix exponential of a non-finite matrix".into()));
    }
    let s = if norm > THETA13 {
        (norm / THETA13).log2().ceil() as i32
    } else {
        0
    };
    let scale = 2f64.powi(-s);
    let a = a.mapv(|z| z * scale);
    let b = &PADE13;
    let a2 = a.dot(&a);
    let a4 = a2.dot(&a2);
    let a6 = a4.dot(&a2);
    let inner_u = combo(&[(b[13], &a6), (b[11], &a4), (b[9], &a2)], 0.0);
    let u = a.dot(&(a6.dot(&inner_u) + combo(&[(b[7], &a6), (b[5], &a4), (b[3], &a2)], b[1])));
    let inner_v = combo(&[(b[12], &a6), (b[10], &a4), (b[8], &a2)], 0.0);
    let v = a6.dot(&inner_v) + combo(&[(b[6], &a6), (b[4], &a4), (b[2], &a2)], b[0]);
    let mut r = lu_solve(&(&v - &u), &(&v + &u))?;
    for _ in 0..s {
        r = r.dot(&r);
    }
    Ok(r)
}

/// Solve `A X = B` by Gaussian elimination with partial pivoting.
pub fn lu_solve(a: &Array2<C64>, b: &Array2<C64>) -> Result<Array2<C64>> {
    let n = a.nrows();
    if a.ncols() != n || b.nrows() != n {
        return Err(Error::SizeMismatch {
            expected: n,
            got: b.nrows(),
        });
    }
    let m = b.ncols();
    let mut aug = Array2::<C64>::zeros((n, n + m));
    aug.slice_mut(s![.., ..n]).assign(a);
    aug.slice_mut(s![.., n..]).assign(b);
    let width = n + m;
    let data = aug.as_slice_mut().expect("standard layout");
    for k in 0..n {
        let (p, best) = (k..n)
            .map(|i| (i, data[i * width + k].norm()))
            .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best == 0.0 {
            return Err(Error::InvalidParameter("singular matrix in LU solve".into()));
        }
        if p != k {
            for j in 0..width {
                data.swap(k * width + j, p * width + j);
            }
        }
        let (head, tail) = data.split_at_mut((k + 1) * width);
        let pivot_row = &head[k * width..];
        let inv = C64::new(1.0, 0.0) / pivot_row[k];
        for row in tail.chunks_mut(width) {
            let f = row[k] * inv;
            if f.re == 0.0 && f.im == 0.0 {
                continue;
            }
            for j in k..width {
                row[j] -= f * pivot_row[j];
            }
        }
    }
    let mut x = Array2::<C64>::zeros((n, m));
    for i in (0..n).rev() {
        let row = &data[i * width..(i + 1) * width];
        let inv = C64::new(1.0, 0.0) / row[i];
        for c in 0..m {
            let mut acc = row[n + c];
            for j in i + 1..n {
                acc -= row[j] * x[[j, c]];
            }
            x[[i, c]] = acc * inv;
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_and_nilpotent() {
        let mut a = Array2::<C64>::zeros((3, 3));
        a[[0, 0]] = C64::new(0.0, 30.0);
        a[[1, 1]] = C64::new(-2.0, 1.0);
        a[[0, 2]] = C64::new(5.0, 0.0);
        let e = expm(&a).unwrap();
        let z0 = a[[0, 0]];
        assert!((e[[0, 0]] - z0.exp()).norm() < 1e-12);
        assert!((e[[1, 1]] - a[[1, 1]].exp()).norm() < 1e-14);
        // exp([[z, c], [0, 0]]) has corner c (e^z − 1)/z.
        let corner = C64::new(5.0, 0.0) * (z0.exp() - 1.0) / z0;
        assert!((e[[0, 2]] - corner).norm() < 1e-11);
        assert!((e[[2, 2]] - 1.0).norm() < 1e-14);
    }

    #[test]
    fn rotation_generator() {
        let t = 7.3;
        let mut a = Array2::<C64>::zeros((2, 2));
        a[[0, 1]] = C64::new(-t, 0.0);
        a[[1, 0]] = C64::new(t, 0.0);
        let e = expm(&a).unwrap();
        assert!((e[[0, 0]].re - t.cos()).abs() < 1e-13);
        assert!((e[[1, 0]].re - t.sin()).abs() < 1e-13);
    }

    #[test]
    fn lu_recovers_solution() {
        let n = 6;
        let a = Array2::from_shape_fn((n, n), |(i, j)| C64::new(((i * 7 + j * 3) % 5) as f64 - 2.0, (i as f64 - j as f64) * 0.3) + if i == j { 4.0 } else { 0.0 });
        let x = Array2::from_shape_fn((n, 2), |(i, j)| C64::new(i as f64, j as f64 + 1.0));
        let b = a.dot(&x);
        let got = lu_solve(&a, &b).unwrap();
        assert!((&got - &x).iter().all(|z| z.norm() < 1e-12));
    }
}

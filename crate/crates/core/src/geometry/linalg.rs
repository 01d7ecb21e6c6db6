//! Small dense matrix routines, generic over [`Scalar`] so they carry
//! derivatives when fed jets. Pivot decisions look only at values.

use crate::autodiff::Scalar;

pub type Matrix<S> = Vec<Vec<S>>;

/// Lower-triangular Cholesky factor of a symmetric matrix, or `None` when
/// the matrix is not numerically positive definite.
pub fn cholesky<S: Scalar>(m: &[Vec<S>]) -> Option<Matrix<S>> {
    let n = m.len();
    let scale = (0..n).map(|i| m[i][i].value().abs()).fold(0.0, f64::max);
    let floor = 1e-14 * scale.max(f64::MIN_POSITIVE);
    let mut l = vec![vec![S::zero(); n]; n];
    for j in 0..n {
        let mut d = m[j][j];
        for k in 0..j {
            d = d - l[j][k] * l[j][k];
        }
        let dv = d.value();
        if !(dv > floor) {
            return None;
        }
        let ljj = d.sqrt();
        l[j][j] = ljj;
        for i in j + 1..n {
            let mut s = m[i][j];
            for k in 0..j {
                s = s - l[i][k] * l[j][k];
            }
            l[i][j] = s / ljj;
        }
    }
    Some(l)
}

/// Inverse of a symmetric positive definite matrix through its Cholesky factor.
pub fn spd_inverse<S: Scalar>(m: &[Vec<S>]) -> Option<Matrix<S>> {
    let n = m.len();
    let l = cholesky(m)?;
    // L^{-1} by forward substitution
    let mut linv = vec![vec![S::zero(); n]; n];
    for col in 0..n {
        for i in col..n {
            let mut s = if i == col { S::constant(1.0) } else { S::zero() };
            for k in col..i {
                s = s - l[i][k] * linv[k][col];
            }
            linv[i][col] = s / l[i][i];
        }
    }
    // m^{-1} = L^{-T} L^{-1}
    let mut inv = vec![vec![S::zero(); n]; n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = S::zero();
            for k in i..n {
                s = s + linv[k][i] * linv[k][j];
            }
            inv[i][j] = s;
            inv[j][i] = s;
        }
    }
    Some(inv)
}

/// Inverse of a general square matrix by Gauss–Jordan elimination with
/// partial pivoting.
pub fn inverse<S: Scalar>(m: &[Vec<S>]) -> Option<Matrix<S>> {
    let n = m.len();
    let mut a: Matrix<S> = m.to_vec();
    let mut inv: Matrix<S> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| S::constant(if i == j { 1.0 } else { 0.0 }))
                .collect()
        })
        .collect();
    let scale = m
        .iter()
        .flatten()
        .map(|x| x.value().abs())
        .fold(0.0, f64::max);
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| {
            a[i][col]
                .value()
                .abs()
                .total_cmp(&a[j][col].value().abs())
        })?;
        if !(a[pivot][col].value().abs() > 1e-14 * scale) {
            return None;
        }
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col];
        for j in 0..n {
            a[col][j] = a[col][j] / p;
            inv[col][j] = inv[col][j] / p;
        }
        for i in 0..n {
            if i == col {
                continue;
            }
            let f = a[i][col];
            for j in 0..n {
                a[i][j] = a[i][j] - f * a[col][j];
                inv[i][j] = inv[i][j] - f * inv[col][j];
            }
        }
    }
    Some(inv)
}

pub fn mat_vec(m: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::autodiff::Jet3;

    #[test]
    fn spd_inverse_matches_identity() {
        let m = vec![
            vec![4.0, 1.0, 0.5],
            vec![1.0, 3.0, 0.2],
            vec![0.5, 0.2, 2.0],
        ];
        let inv = spd_inverse(&m).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let s: f64 = (0..3).map(|k| m[i][k] * inv[k][j]).sum();
                assert!((s - if i == j { 1.0 } else { 0.0 }).abs() < 1e-14);
            }
        }
        assert!(cholesky(&[vec![1.0, 2.0], vec![2.0, 1.0]]).is_none());
        assert!(cholesky(&[vec![0.0]]).is_none());
    }

    #[test]
    fn general_inverse_with_jets() {
        let x = Jet3::seed(&[0.7]).unwrap()[0];
        let m = vec![
            vec![Jet3::constant(0.0), x],
            vec![Jet3::constant(1.0), x * x],
        ];
        let inv = inverse(&m).unwrap();
        // inverse = [[-x, 1], [1/x, 0]]
        assert!((inv[0][0].value() + 0.7).abs() < 1e-14);
        assert!((inv[0][0].d(0) + 1.0).abs() < 1e-14);
        assert!((inv[1][0].dd(0, 0) - 2.0 / 0.7f64.powi(3)).abs() < 1e-12);
        assert!(inverse(&[vec![1.0, 2.0], vec![2.0, 4.0]]).is_none());
    }
}

//! Matrix exponential by scaling and squaring with diagonal Padé approximants.
//!
//! Degree selection and the backward-error thresholds `theta_m` follow
//! Higham, "The scaling and squaring method for the matrix exponential
//! revisited" (SIAM J. Matrix Anal. Appl. 26, 2005). The method needs no
//! eigendecomposition, so it stays accurate for defective matrices.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::C64;

const THETA_3: f64 = 1.495_585_217_958_292e-2;
const THETA_5: f64 = 2.539_398_330_063_23e-1;
const THETA_7: f64 = 9.504_178_996_162_932e-1;
const THETA_9: f64 = 2.097_847_961_257_068;
const THETA_13: f64 = 5.371_920_351_148_152;

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [
    17_297_280.0,
    8_648_640.0,
    1_995_840.0,
    277_200.0,
    25_200.0,
    1_512.0,
    56.0,
    1.0,
];
const B9: [f64; 10] = [
    17_643_225_600.0,
    8_821_612_800.0,
    2_075_673_600.0,
    302_702_400.0,
    30_270_240.0,
    2_162_160.0,
    110_880.0,
    3_960.0,
    90.0,
    1.0,
];
const B13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

/// Induced 1-norm (maximum absolute column sum).
pub fn norm1(a: &DMatrix<C64>) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `exp(a)` for a square complex matrix.
pub fn expm(a: &DMatrix<C64>) -> Result<DMatrix<C64>> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            found: a.ncols(),
        });
    }
    if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite("matrix exponential argument"));
    }
    let n = a.nrows();
    let ident = DMatrix::<C64>::identity(n, n);
    if n == 0 {
        return Ok(ident);
    }
    let norm = norm1(a);

    let a2 = a * a;
    for (theta, coeffs) in [
        (THETA_3, &B3[..]),
        (THETA_5, &B5[..]),
        (THETA_7, &B7[..]),
        (THETA_9, &B9[..]),
    ] {
        if norm <= theta {
            let (u, v) = pade_low(a, &a2, &ident, coeffs);
            return solve_pade(&u, &v);
        }
    }

    let squarings = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil().max(0.0) as u32
    } else {
        0
    };
    let scale = C64::new(0.5f64.powi(squarings as i32), 0.0);
    let a = a * scale;
    let a2 = &a2 * (scale * scale);
    let (u, v) = pade13(&a, &a2, &ident);
    let mut r = solve_pade(&u, &v)?;
    for _ in 0..squarings {
        r = &r * &r;
    }
    Ok(r)
}

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Odd part `u` and even part `v` of the degree-m approximant, m in {3,5,7,9}.
fn pade_low(
    a: &DMatrix<C64>,
    a2: &DMatrix<C64>,
    ident: &DMatrix<C64>,
    b: &[f64],
) -> (DMatrix<C64>, DMatrix<C64>) {
    let mut odd = ident * real(b[1]);
    let mut even = ident * real(b[0]);
    let mut power = ident.clone();
    let mut k = 2;
    while k < b.len() {
        power = &power * a2;
        odd += &power * real(b[k + 1]);
        even += &power * real(b[k]);
        k += 2;
    }
    (a * odd, even)
}

fn pade13(
    a: &DMatrix<C64>,
    a2: &DMatrix<C64>,
    ident: &DMatrix<C64>,
) -> (DMatrix<C64>, DMatrix<C64>) {
    let b = &B13;
    let a4 = a2 * a2;
    let a6 = &a4 * a2;
    let inner_u = &a6 * real(b[13]) + &a4 * real(b[11]) + a2 * real(b[9]);
    let u = a
        * (&a6 * inner_u
            + &a6 * real(b[7])
            + &a4 * real(b[5])
            + a2 * real(b[3])
            + ident * real(b[1]));
    let inner_v = &a6 * real(b[12]) + &a4 * real(b[10]) + a2 * real(b[8]);
    let v = &a6 * inner_v
        + &a6 * real(b[6])
        + &a4 * real(b[4])
        + a2 * real(b[2])
        + ident * real(b[0]);
    (u, v)
}

/// Solves `(v - u) r = (v + u)`.
fn solve_pade(u: &DMatrix<C64>, v: &DMatrix<C64>) -> Result<DMatrix<C64>> {
    let denom = v - u;
    let numer = v + u;
    denom
        .lu()
        .solve(&numer)
        .ok_or_else(|| Error::EigenSolver("singular Pade denominator".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn max_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
        (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn zero_matrix_gives_identity() {
        let z = DMatrix::<C64>::zeros(4, 4);
        assert_eq!(expm(&z).unwrap(), DMatrix::identity(4, 4));
    }

    #[test]
    fn diagonal_matrix_all_branches() {
        // scale spans every Pade degree and the squaring branch
        for s in [1e-3, 0.1, 0.5, 1.5, 4.0, 40.0] {
            let d = [c(-s, 0.3 * s), c(0.2 * s, -s), c(0.0, s)];
            let a = DMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(&d));
            let e = expm(&a).unwrap();
            for (k, z) in d.iter().enumerate() {
                let want = z.exp();
                assert!((e[(k, k)] - want).norm() <= 1e-13 * want.norm().max(1.0), "s={s}");
            }
        }
    }

    #[test]
    fn jordan_block_is_exact() {
        // exp([[l, 1], [0, l]]) = e^l [[1, 1], [0, 1]], defective on purpose
        for l in [c(0.0, -1.5), c(-3.0, 2.0)] {
            let a = DMatrix::from_row_slice(2, 2, &[l, c(1.0, 0.0), c(0.0, 0.0), l]);
            let e = expm(&a).unwrap();
            let el = l.exp();
            let want = DMatrix::from_row_slice(2, 2, &[el, el, c(0.0, 0.0), el]);
            assert!(max_diff(&e, &want) < 1e-13);
        }
    }

    #[test]
    fn rotation_generator() {
        // exp(-i theta X) = cos(theta) I - i sin(theta) X
        for theta in [0.01, 1.0, 7.5, 31.0] {
            let a = DMatrix::from_row_slice(
                2,
                2,
                &[c(0.0, 0.0), c(0.0, -theta), c(0.0, -theta), c(0.0, 0.0)],
            );
            let e = expm(&a).unwrap();
            let (s, co) = theta.sin_cos();
            let want =
                DMatrix::from_row_slice(2, 2, &[c(co, 0.0), c(0.0, -s), c(0.0, -s), c(co, 0.0)]);
            assert!(max_diff(&e, &want) < 1e-12, "theta={theta}");
        }
    }

    #[test]
    fn rejects_non_finite() {
        let a = DMatrix::from_element(2, 2, c(f64::NAN, 0.0));
        assert!(matches!(expm(&a), Err(Error::NonFinite(_))));
    }
}

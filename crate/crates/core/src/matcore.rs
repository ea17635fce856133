//! Dense real/complex matrix kernel: principal minors, characteristic
//! coefficients by two independent methods, positive-semidefiniteness tests,
//! congruence transforms, and Williamson symplectic diagonalization.
//!
//! Characteristic coefficients follow the principal-minor convention:
//! `det(M - λI) = Σ_r C_r(M) (-λ)^{n-r}`, so `C_0 = 1`, `C_1 = tr M`,
//! `C_n = det M`, and `C_r` is the sum of all order-`r` principal minors.

use itertools::Itertools;
use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

/// Relative threshold for Hermitian/symmetric shape checks. Inputs are
/// constructed, not measured, so this is tight.
pub const HERMITICITY_TOL: f64 = 1e-12;

/// Principal-minor sums cost O(2^n); the use cases here have n ≤ 4.
pub const MAX_MINOR_DIM: usize = 12;

/// The n+1 characteristic coefficients `C_0..C_n` of an n×n matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CharCoeffs {
    coeffs: Vec<f64>,
}

impl CharCoeffs {
    fn new(coeffs: Vec<f64>) -> Self {
        debug_assert!(!coeffs.is_empty() && coeffs[0] == 1.0);
        CharCoeffs { coeffs }
    }

    /// Matrix order n (the coefficient list has n+1 entries).
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `C_r`. Panics if `r > n`.
    pub fn get(&self, r: usize) -> f64 {
        self.coeffs[r]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.coeffs
    }
}

fn check_square<T: nalgebra::Scalar>(m: &DMatrix<T>) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(m.nrows())
}

fn check_finite(m: &DMatrix<f64>) -> Result<()> {
    if m.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFiniteEntries)
    }
}

pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

pub fn max_abs_c(m: &DMatrix<C64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.norm()))
}

/// Largest entry of `M - M†`, the Hermiticity defect.
pub fn hermitian_defect(m: &DMatrix<C64>) -> f64 {
    let n = m.nrows();
    let mut defect = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            defect = defect.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    defect
}

/// Errors unless `M = M†` within `HERMITICITY_TOL`, relative to the entry scale.
pub fn require_hermitian(m: &DMatrix<C64>) -> Result<()> {
    check_square(m)?;
    let defect = hermitian_defect(m);
    if defect > HERMITICITY_TOL * f64::max(1.0, max_abs_c(m)) {
        return Err(Error::NotHermitian { defect });
    }
    Ok(())
}

pub fn require_symmetric(m: &DMatrix<f64>) -> Result<()> {
    check_square(m)?;
    let defect = max_abs(&(m - m.transpose()));
    if defect > HERMITICITY_TOL * f64::max(1.0, max_abs(m)) {
        return Err(Error::NotSymmetric { defect });
    }
    Ok(())
}

/// Determinant by pivoted LU with a scale-aware snap to zero: results with
/// `|det| ≤ 1e-12 · (max entry)^n` are returned as exactly 0. This makes the
/// identically-zero determinants of odd antisymmetric matrices come out exact.
pub fn det_snapped(m: &DMatrix<f64>) -> Result<f64> {
    let n = check_square(m)?;
    check_finite(m)?;
    if n == 0 {
        return Ok(1.0);
    }
    let scale = max_abs(m);
    if scale == 0.0 {
        return Ok(0.0);
    }
    let det = m.clone().lu().determinant();
    if det.abs() <= 1e-12 * scale.powi(n as i32) {
        Ok(0.0)
    } else {
        Ok(det)
    }
}

/// Determinant of the principal submatrix `M[idx, idx]`.
///
/// `idx` uses 0-based indices and must be nonempty and strictly increasing.
pub fn principal_minor(m: &DMatrix<f64>, idx: &[usize]) -> Result<f64> {
    let n = check_square(m)?;
    if idx.is_empty() || idx.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::BadIndexSubset);
    }
    if let Some(&bad) = idx.iter().find(|&&i| i >= n) {
        return Err(Error::IndexOutOfRange { index: bad, dim: n });
    }
    let sub = m.select_rows(idx.iter()).select_columns(idx.iter());
    det_snapped(&sub)
}

/// Characteristic coefficients as sums of principal minors of each order.
///
/// Exponential in n; capped at [`MAX_MINOR_DIM`]. The trace-recursion path
/// [`char_coeffs_faddeev`] covers larger matrices.
pub fn char_coeffs_minors(m: &DMatrix<f64>) -> Result<CharCoeffs> {
    let n = check_square(m)?;
    check_finite(m)?;
    if n > MAX_MINOR_DIM {
        return Err(Error::OrderTooLarge {
            n,
            max: MAX_MINOR_DIM,
        });
    }
    let mut coeffs = Vec::with_capacity(n + 1);
    coeffs.push(1.0);
    for r in 1..=n {
        let mut sum = 0.0;
        for idx in (0..n).combinations(r) {
            sum += principal_minor(m, &idx)?;
        }
        coeffs.push(sum);
    }
    Ok(CharCoeffs::new(coeffs))
}

/// Characteristic coefficients by the trace recursion (Newton's identities on
/// power sums `tr M^k`), an independent cross-check of the minor-sum route.
pub fn char_coeffs_faddeev(m: &DMatrix<f64>) -> Result<CharCoeffs> {
    let n = check_square(m)?;
    check_finite(m)?;
    let mut power_sums = Vec::with_capacity(n + 1);
    power_sums.push(n as f64); // tr I
    let mut mk = DMatrix::<f64>::identity(n, n);
    for _ in 1..=n {
        mk = &mk * m;
        power_sums.push(mk.trace());
    }
    let mut coeffs = vec![1.0];
    for r in 1..=n {
        let mut acc = 0.0;
        for i in 1..=r {
            let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
            acc += sign * coeffs[r - i] * power_sums[i];
        }
        coeffs.push(acc / r as f64);
    }
    Ok(CharCoeffs::new(coeffs))
}

/// True iff the Hermitian matrix `H` has min eigenvalue ≥ −tol.
/// Rejects non-Hermitian input.
pub fn is_psd(h: &DMatrix<C64>, tol: f64) -> Result<bool> {
    require_hermitian(h)?;
    let sym = (h + h.adjoint()).scale(0.5);
    let eig = sym.symmetric_eigen();
    let min_eig = eig
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    Ok(min_eig >= -tol)
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(h: &DMatrix<C64>) -> Result<f64> {
    require_hermitian(h)?;
    let sym = (h + h.adjoint()).scale(0.5);
    let eig = sym.symmetric_eigen();
    Ok(eig
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min))
}

/// `Λ M Λᵀ` for real nonsingular `Λ`. Singular `Λ` is rejected with a
/// distinct error.
pub fn congruence(lambda: &DMatrix<f64>, m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let nl = check_square(lambda)?;
    let nm = check_square(m)?;
    if nl != nm {
        return Err(Error::DimensionMismatch {
            left: nl,
            right: nm,
        });
    }
    check_finite(lambda)?;
    check_finite(m)?;
    let det = det_snapped(lambda)?;
    if det == 0.0 {
        return Err(Error::SingularTransform { det });
    }
    Ok(lambda * m * lambda.transpose())
}

/// The standard symplectic form on N modes in (q₁..q_N, p₁..p_N) ordering:
/// the 2N×2N block matrix `J = [[0, -I], [I, 0]]`, with `J² = -I`, `Jᵀ = -J`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SymplecticForm {
    modes: usize,
}

impl SymplecticForm {
    pub fn new(modes: usize) -> Result<Self> {
        if modes == 0 {
            return Err(Error::InvalidParameter(
                "mode count must be positive".into(),
            ));
        }
        Ok(SymplecticForm { modes })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn dim(&self) -> usize {
        2 * self.modes
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        let n = self.modes;
        DMatrix::from_fn(2 * n, 2 * n, |i, j| {
            if i < n && j == i + n {
                -1.0
            } else if i >= n && j == i - n {
                1.0
            } else {
                0.0
            }
        })
    }
}

/// Output of [`williamson`]: a symplectic `Λ` with `ΛJΛᵀ = J` and
/// `ΛσΛᵀ = diag(ν₁..ν_N, ν₁..ν_N)`, with the symplectic eigenvalues `ν`
/// sorted descending.
#[derive(Debug, Clone)]
pub struct WilliamsonResult {
    pub lambda: DMatrix<f64>,
    pub nus: Vec<f64>,
}

impl WilliamsonResult {
    /// `diag(ν₁..ν_N, ν₁..ν_N)` as a matrix.
    pub fn diagonal(&self) -> DMatrix<f64> {
        let n = self.nus.len();
        DMatrix::from_fn(
            2 * n,
            2 * n,
            |i, j| {
                if i == j {
                    self.nus[i % n]
                } else {
                    0.0
                }
            },
        )
    }
}

/// Symmetric square root (and inverse root) of a positive definite matrix.
fn sym_sqrt_pair(sigma: &DMatrix<f64>) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let eig = sigma.clone().symmetric_eigen();
    let min_eig = eig
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    if min_eig <= 0.0 {
        return Err(Error::NotPositiveDefinite { min_eig });
    }
    let u = &eig.eigenvectors;
    let sqrt_d = DMatrix::from_diagonal(&eig.eigenvalues.map(f64::sqrt));
    let inv_sqrt_d = DMatrix::from_diagonal(&eig.eigenvalues.map(|x| 1.0 / x.sqrt()));
    Ok((u * sqrt_d * u.transpose(), u * inv_sqrt_d * u.transpose()))
}

/// Williamson symplectic diagonalization of a positive definite 2N×2N
/// matrix, via the eigendecomposition of the antisymmetric similarity
/// `σ^{1/2} J σ^{1/2}`.
pub fn williamson(sigma: &DMatrix<f64>) -> Result<WilliamsonResult> {
    let dim = check_square(sigma)?;
    require_symmetric(sigma)?;
    if dim == 0 || dim % 2 != 0 {
        return Err(Error::InvalidParameter(format!(
            "Williamson requires an even dimension, got {dim}"
        )));
    }
    let n = dim / 2;
    let j = SymplecticForm::new(n)?.matrix();
    let (sqrt_s, inv_sqrt_s) = sym_sqrt_pair(sigma)?;

    // a = σ^{1/2} J σ^{1/2} is antisymmetric; i·a is Hermitian with
    // eigenvalues ±ν and conjugate-paired eigenvectors.
    let a = &sqrt_s * &j * &sqrt_s;
    let ia = DMatrix::from_fn(dim, dim, |r, c| C64::new(0.0, a[(r, c)]));
    let eig = ia.symmetric_eigen();

    // Collect the positive half of the spectrum, sorted descending.
    let mut pos: Vec<(f64, usize)> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, &v)| v > 0.0)
        .map(|(i, &v)| (v, i))
        .collect();
    if pos.len() != n {
        return Err(Error::NotPositiveDefinite {
            min_eig: eig
                .eigenvalues
                .iter()
                .cloned()
                .fold(f64::INFINITY, f64::min),
        });
    }
    pos.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());

    // For (i·a)w = νw write w = (x + iy)/√2; then a·x = νy and a·y = -νx,
    // and (x, y) are orthonormal across the whole positive half. Fixing the
    // phase of w keeps the output deterministic.
    let mut o = DMatrix::<f64>::zeros(dim, dim);
    let mut nus = Vec::with_capacity(n);
    for (slot, &(nu, col)) in pos.iter().enumerate() {
        let mut w: Vec<C64> = (0..dim).map(|r| eig.eigenvectors[(r, col)]).collect();
        let lead = w
            .iter()
            .cloned()
            .max_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap())
            .unwrap();
        let phase = lead / lead.norm();
        for entry in w.iter_mut() {
            *entry /= phase;
        }
        let scale = std::f64::consts::SQRT_2;
        for r in 0..dim {
            o[(r, slot)] = scale * w[r].re;
            o[(r, n + slot)] = scale * w[r].im;
        }
        nus.push(nu);
    }

    let sqrt_dt = DMatrix::from_fn(
        dim,
        dim,
        |i, j2| {
            if i == j2 {
                nus[i % n].sqrt()
            } else {
                0.0
            }
        },
    );
    let lambda = sqrt_dt * o.transpose() * inv_sqrt_s;
    Ok(WilliamsonResult { lambda, nus })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn dm(rows: usize, cols: usize, data: &[f64]) -> DMatrix<f64> {
        DMatrix::from_row_slice(rows, cols, data)
    }

    #[test]
    fn principal_minor_identity_and_diagonal() {
        let id = DMatrix::<f64>::identity(3, 3);
        assert_eq!(principal_minor(&id, &[0, 1]).unwrap(), 1.0);
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![2.0, 3.0, 4.0]));
        assert_eq!(principal_minor(&d, &[0, 2]).unwrap(), 8.0);
    }

    #[test]
    fn principal_minor_antisymmetric_2x2() {
        let m = dm(2, 2, &[0.0, 0.25, -0.25, 0.0]);
        // direct 2x2 determinant: 0*0 - 0.25*(-0.25)
        assert_relative_eq!(
            principal_minor(&m, &[0, 1]).unwrap(),
            1.0 / 16.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn principal_minor_rejects_bad_indices() {
        let id = DMatrix::<f64>::identity(3, 3);
        assert!(matches!(
            principal_minor(&id, &[]),
            Err(Error::BadIndexSubset)
        ));
        assert!(matches!(
            principal_minor(&id, &[1, 1]),
            Err(Error::BadIndexSubset)
        ));
        assert!(matches!(
            principal_minor(&id, &[2, 1]),
            Err(Error::BadIndexSubset)
        ));
        assert!(matches!(
            principal_minor(&id, &[0, 3]),
            Err(Error::IndexOutOfRange { index: 3, dim: 3 })
        ));
    }

    #[test]
    fn char_coeffs_identity() {
        let id = DMatrix::<f64>::identity(3, 3);
        assert_eq!(
            char_coeffs_minors(&id).unwrap().as_slice(),
            &[1.0, 3.0, 3.0, 1.0]
        );
        assert_eq!(
            char_coeffs_faddeev(&id).unwrap().as_slice(),
            &[1.0, 3.0, 3.0, 1.0]
        );
    }

    #[test]
    fn char_coeffs_diagonal() {
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![2.0, 3.0, 4.0]));
        let c = char_coeffs_minors(&d).unwrap();
        assert_eq!(c.as_slice(), &[1.0, 9.0, 26.0, 24.0]);
        let f = char_coeffs_faddeev(&d).unwrap();
        for r in 0..=3 {
            assert_relative_eq!(f.get(r), c.get(r), max_relative = 1e-12);
        }
    }

    #[test]
    fn char_coeffs_antisymmetric_3x3() {
        // symbolic cofactor expansion gives [1, 0, a²+b²+c², 0]
        let (a, b, c) = (0.7, -1.3, 2.1);
        let m = dm(3, 3, &[0.0, c, -b, -c, 0.0, a, b, -a, 0.0]);
        let coeffs = char_coeffs_minors(&m).unwrap();
        assert_eq!(coeffs.get(0), 1.0);
        assert_eq!(coeffs.get(1), 0.0);
        assert_relative_eq!(coeffs.get(2), a * a + b * b + c * c, max_relative = 1e-12);
        assert_eq!(coeffs.get(3), 0.0);
    }

    #[test]
    fn char_coeffs_cap() {
        let m = DMatrix::<f64>::identity(13, 13);
        assert!(matches!(
            char_coeffs_minors(&m),
            Err(Error::OrderTooLarge { n: 13, max: 12 })
        ));
        // Faddeev path has no cap.
        assert!(char_coeffs_faddeev(&m).is_ok());
    }

    #[test]
    fn is_psd_basics() {
        let id = DMatrix::<C64>::identity(2, 2);
        assert!(is_psd(&id, 1e-12).unwrap());
        let neg = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            C64::new(1.0, 0.0),
            C64::new(-1.0, 0.0),
        ]));
        assert!(!is_psd(&neg, 1e-12).unwrap());
        let nonherm = DMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(1.0, 0.0),
                C64::new(1.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(1.0, 0.0),
            ],
        );
        assert!(is_psd(&nonherm, 1e-12).is_err());
    }

    #[test]
    fn congruence_identity_and_determinant_scaling() {
        let m = dm(2, 2, &[1.0, 0.5, 0.5, 2.0]);
        let id = DMatrix::<f64>::identity(2, 2);
        assert_eq!(congruence(&id, &m).unwrap(), m);

        let lam = dm(2, 2, &[2.0, 1.0, 0.0, 1.0]);
        let t = congruence(&lam, &m).unwrap();
        let dl = det_snapped(&lam).unwrap();
        assert_relative_eq!(
            det_snapped(&t).unwrap(),
            dl * dl * det_snapped(&m).unwrap(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn congruence_rejects_singular() {
        let m = DMatrix::<f64>::identity(2, 2);
        let lam = dm(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        assert!(matches!(
            congruence(&lam, &m),
            Err(Error::SingularTransform { .. })
        ));
    }

    #[test]
    fn congruence_orthogonal_preserves_char_coeffs() {
        let theta: f64 = 0.37;
        let lam = dm(2, 2, &[theta.cos(), -theta.sin(), theta.sin(), theta.cos()]);
        let m = dm(2, 2, &[1.5, 0.25, 0.25, 0.75]);
        let t = congruence(&lam, &m).unwrap();
        let c0 = char_coeffs_minors(&m).unwrap();
        let c1 = char_coeffs_minors(&t).unwrap();
        for r in 0..=2 {
            assert_relative_eq!(c0.get(r), c1.get(r), epsilon = 1e-12);
        }
    }

    #[test]
    fn symplectic_form_invariants() {
        for modes in 1..=3 {
            let j = SymplecticForm::new(modes).unwrap().matrix();
            let d = 2 * modes;
            assert_relative_eq!(
                max_abs(&(&j * &j + DMatrix::<f64>::identity(d, d))),
                0.0,
                epsilon = 0.0
            );
            assert_relative_eq!(max_abs(&(j.transpose() + &j)), 0.0, epsilon = 0.0);
        }
    }

    fn check_williamson(sigma: &DMatrix<f64>, w: &WilliamsonResult) {
        let n = w.nus.len();
        let j = SymplecticForm::new(n).unwrap().matrix();
        let sym_defect = max_abs(&(&w.lambda * &j * w.lambda.transpose() - &j));
        assert!(sym_defect < 1e-9, "symplectic defect {sym_defect}");
        let diag_defect = max_abs(&(&w.lambda * sigma * w.lambda.transpose() - w.diagonal()));
        assert!(diag_defect < 1e-9, "diagonalization defect {diag_defect}");
    }

    #[test]
    fn williamson_identity() {
        let sigma = DMatrix::<f64>::identity(2, 2);
        let w = williamson(&sigma).unwrap();
        assert_relative_eq!(w.nus[0], 1.0, epsilon = 1e-12);
        check_williamson(&sigma, &w);
    }

    #[test]
    fn williamson_squeezed_diag() {
        let sigma = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![2.0, 0.5]));
        let w = williamson(&sigma).unwrap();
        assert_relative_eq!(w.nus[0], 1.0, epsilon = 1e-12);
        check_williamson(&sigma, &w);
    }

    #[test]
    fn williamson_vacuum() {
        let sigma = DMatrix::<f64>::identity(2, 2).scale(0.5);
        let w = williamson(&sigma).unwrap();
        assert_relative_eq!(w.nus[0], 0.5, epsilon = 1e-12);
        check_williamson(&sigma, &w);
    }

    #[test]
    fn williamson_rejects_indefinite() {
        let sigma = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, -0.5]));
        assert!(matches!(
            williamson(&sigma),
            Err(Error::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn williamson_two_modes() {
        // Direct sum of a squeezed mode and a thermal mode.
        let mut sigma = DMatrix::<f64>::zeros(4, 4);
        sigma[(0, 0)] = 2.0;
        sigma[(2, 2)] = 0.5;
        sigma[(1, 1)] = 1.5;
        sigma[(3, 3)] = 1.5;
        let w = williamson(&sigma).unwrap();
        assert_relative_eq!(w.nus[0], 1.5, epsilon = 1e-9);
        assert_relative_eq!(w.nus[1], 1.0, epsilon = 1e-9);
        check_williamson(&sigma, &w);
    }
}

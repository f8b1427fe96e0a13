//! Fixed-size 4×4 complex matrices.
//!
//! Every operator in the crate lives on the four-dimensional spin-3/2 space with
//! the basis ordered as (|3/2⟩, |−3/2⟩, |1/2⟩, |−1/2⟩). Row and column indices
//! 0..4 refer to those states in that order; the 2×2 blocks (0, 1) and (2, 3)
//! are the |m| = 3/2 and |m| = 1/2 subspaces.
//!
//! The Hermitian eigensolver is a cyclic complex Jacobi iteration. At this size
//! it converges in a handful of sweeps and keeps eigenvectors orthonormal to
//! machine precision, which is what the unitary exponentials need.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Complex = Complex64;

pub const DIM: usize = 4;

const ZERO: Complex = Complex::new(0.0, 0.0);
/// Numerical tolerances shared by every module.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Hermiticity / unitarity threshold applied to inputs.
    pub input: f64,
    /// Threshold that produced unitaries and decompositions must meet.
    pub output: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        input: 1e-10,
        output: 1e-12,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}

#[derive(Clone, Copy, PartialEq)]
pub struct ComplexMat4(pub [[Complex; DIM]; DIM]);

impl ComplexMat4 {
    pub fn zeros() -> Self {
        ComplexMat4([[ZERO; DIM]; DIM])
    }

    pub fn identity() -> Self {
        Self::from_diag_real([1.0; DIM])
    }

    pub fn from_diag_real(d: [f64; DIM]) -> Self {
        let mut m = Self::zeros();
        for (i, v) in d.into_iter().enumerate() {
            m.0[i][i] = Complex::new(v, 0.0);
        }
        m
    }

    pub fn from_diag(d: [Complex; DIM]) -> Self {
        let mut m = Self::zeros();
        for (i, v) in d.into_iter().enumerate() {
            m.0[i][i] = v;
        }
        m
    }

    pub fn from_real(rows: [[f64; DIM]; DIM]) -> Self {
        Self(rows.map(|r| r.map(|x| Complex::new(x, 0.0))))
    }

    pub fn diag(&self) -> [Complex; DIM] {
        std::array::from_fn(|i| self.0[i][i])
    }

    pub fn column(&self, j: usize) -> [Complex; DIM] {
        std::array::from_fn(|i| self.0[i][j])
    }

    pub fn scale(&self, s: Complex) -> Self {
        let mut out = *self;
        out.0.iter_mut().flatten().for_each(|z| *z *= s);
        out
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(Complex::new(s, 0.0))
    }

    pub fn trace(&self) -> Complex {
        self.diag().iter().sum()
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros();
        for i in 0..DIM {
            for j in 0..DIM {
                out.0[j][i] = self.0[i][j].conj();
            }
        }
        out
    }

    pub fn mat_mul(&self, rhs: &Self) -> Self {
        let mut out = Self::zeros();
        for i in 0..DIM {
            for k in 0..DIM {
                let a = self.0[i][k];
                if a == ZERO {
                    continue;
                }
                for j in 0..DIM {
                    out.0[i][j] += a * rhs.0[k][j];
                }
            }
        }
        out
    }

    pub fn mat_vec(&self, v: &[Complex; DIM]) -> [Complex; DIM] {
        std::array::from_fn(|i| (0..DIM).map(|k| self.0[i][k] * v[k]).sum())
    }

    /// `[self, rhs] = self·rhs − rhs·self`.
    pub fn commutator(&self, rhs: &Self) -> Self {
        self.mat_mul(rhs) - rhs.mat_mul(self)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Frobenius norm of the strictly off-diagonal part.
    pub fn off_diagonal_norm(&self) -> f64 {
        let mut acc = 0.0;
        for i in 0..DIM {
            for j in 0..DIM {
                if i != j {
                    acc += self.0[i][j].norm_sqr();
                }
            }
        }
        acc.sqrt()
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn hermiticity_residual(&self) -> f64 {
        (*self - self.adjoint()).frobenius_norm()
    }

    pub fn unitarity_residual(&self) -> f64 {
        (self.adjoint().mat_mul(self) - Self::identity()).frobenius_norm()
    }

    /// Hermitian within `tol` relative to `max(1, ‖a‖_F)`.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_residual() <= tol * self.frobenius_norm().max(1.0)
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_residual() <= tol
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        self.off_diagonal_norm() <= tol * self.frobenius_norm().max(1.0)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// 2×2 sub-block with top-left corner at `(row, col)`.
    pub fn block(&self, row: usize, col: usize) -> Mat2 {
        [
            [self.0[row][col], self.0[row][col + 1]],
            [self.0[row + 1][col], self.0[row + 1][col + 1]],
        ]
    }

    /// Frobenius norm of the two off-diagonal 2×2 blocks coupling the
    /// |m| = 3/2 pair to the |m| = 1/2 pair.
    pub fn transfer_norm(&self) -> f64 {
        let mut acc = 0.0;
        for i in 0..2 {
            for j in 2..4 {
                acc += self.0[i][j].norm_sqr() + self.0[j][i].norm_sqr();
            }
        }
        acc.sqrt()
    }

    pub fn from_blocks(tl: Mat2, tr: Mat2, bl: Mat2, br: Mat2) -> Self {
        let mut m = Self::zeros();
        for i in 0..2 {
            for j in 0..2 {
                m.0[i][j] = tl[i][j];
                m.0[i][j + 2] = tr[i][j];
                m.0[i + 2][j] = bl[i][j];
                m.0[i + 2][j + 2] = br[i][j];
            }
        }
        m
    }
}

impl Default for ComplexMat4 {
    fn default() -> Self {
        Self::zeros()
    }
}

impl Index<(usize, usize)> for ComplexMat4 {
    type Output = Complex;
    fn index(&self, (i, j): (usize, usize)) -> &Complex {
        &self.0[i][j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMat4 {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex {
        &mut self.0[i][j]
    }
}

impl Add for ComplexMat4 {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for i in 0..DIM {
            for j in 0..DIM {
                self.0[i][j] += rhs.0[i][j];
            }
        }
        self
    }
}

impl Sub for ComplexMat4 {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        for i in 0..DIM {
            for j in 0..DIM {
                self.0[i][j] -= rhs.0[i][j];
            }
        }
        self
    }
}

impl Neg for ComplexMat4 {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale_real(-1.0)
    }
}

impl Mul for ComplexMat4 {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.mat_mul(&rhs)
    }
}

impl Mul for &ComplexMat4 {
    type Output = ComplexMat4;
    fn mul(self, rhs: Self) -> ComplexMat4 {
        self.mat_mul(rhs)
    }
}

impl fmt::Debug for ComplexMat4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMat4[")?;
        for row in &self.0 {
            write!(f, "  ")?;
            for z in row {
                write!(f, "{:>+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// 2×2 complex block, row-major.
pub type Mat2 = [[Complex; 2]; 2];

pub fn standard_product(a: &ComplexMat4, b: &ComplexMat4) -> ComplexMat4 {
    a.mat_mul(b)
}

pub fn adjoint(a: &ComplexMat4) -> ComplexMat4 {
    a.adjoint()
}

pub fn frobenius_norm(a: &ComplexMat4) -> f64 {
    a.frobenius_norm()
}

/// Trace fidelity `|tr(a†·b)| / 4`; equals 1 iff the unitaries agree up to a
/// global phase.
pub fn trace_fidelity(a: &ComplexMat4, b: &ComplexMat4) -> f64 {
    a.adjoint().mat_mul(b).trace().norm() / DIM as f64
}

#[derive(Debug, Clone, Copy)]
pub struct HermitianEigen {
    /// Ascending.
    pub values: [f64; DIM],
    /// Orthonormal eigenvectors as columns, in the order of `values`.
    pub vectors: ComplexMat4,
}

impl HermitianEigen {
    pub fn reconstruct(&self) -> ComplexMat4 {
        let d = ComplexMat4::from_diag_real(self.values);
        self.vectors.mat_mul(&d).mat_mul(&self.vectors.adjoint())
    }
}

const MAX_SWEEPS: usize = 64;

/// Eigendecomposition of a Hermitian matrix, `a = V·diag(λ)·V†`.
///
/// Eigenvalues come back ascending. Exact ties are ordered by comparing the
/// eigenvector component magnitudes lexicographically, largest first, so the
/// output is deterministic. Each eigenvector is phased so that its
/// largest-modulus component is real and positive.
pub fn hermitian_eig(a: &ComplexMat4) -> Result<HermitianEigen> {
    hermitian_eig_with(a, Tolerances::DEFAULT)
}

pub fn hermitian_eig_with(a: &ComplexMat4, tol: Tolerances) -> Result<HermitianEigen> {
    let scale = a.frobenius_norm();
    if !a.is_finite() {
        return Err(Error::NotHermitian {
            residual: f64::NAN,
            tolerance: tol.input,
        });
    }
    let residual = a.hermiticity_residual();
    if residual > tol.input * scale.max(1.0) {
        return Err(Error::NotHermitian {
            residual,
            tolerance: tol.input,
        });
    }

    let mut m = (*a + a.adjoint()).scale_real(0.5);
    let mut v = ComplexMat4::identity();
    let target = f64::EPSILON * 1e-2 * scale;

    for _ in 0..MAX_SWEEPS {
        if m.off_diagonal_norm() <= target {
            break;
        }
        for p in 0..DIM - 1 {
            for q in p + 1..DIM {
                let b = m.0[p][q];
                let b_abs = b.norm();
                if b_abs == 0.0 {
                    continue;
                }
                let app = m.0[p][p].re;
                let aqq = m.0[q][q].re;
                // Once the pivot is below rounding of its diagonal it carries
                // no information; zero it rather than rotating.
                if b_abs <= f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
                    m.0[p][q] = ZERO;
                    m.0[q][p] = ZERO;
                    continue;
                }
                let phase = b / b_abs;
                let tau = (aqq - app) / (2.0 * b_abs);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                let mut g = ComplexMat4::identity();
                g.0[p][p] = Complex::new(c, 0.0);
                g.0[p][q] = Complex::new(s, 0.0);
                g.0[q][p] = -phase.conj() * s;
                g.0[q][q] = phase.conj() * c;

                m = g.adjoint().mat_mul(&m).mat_mul(&g);
                m.0[p][q] = ZERO;
                m.0[q][p] = ZERO;
                v = v.mat_mul(&g);
            }
        }
    }

    let raw_values: [f64; DIM] = std::array::from_fn(|i| m.0[i][i].re);
    for j in 0..DIM {
        normalize_phase(&mut v, j);
    }

    let tie = 1e-12 * scale.max(1.0);
    let mut order: [usize; DIM] = [0, 1, 2, 3];
    order.sort_by(|&x, &y| {
        let (lx, ly) = (raw_values[x], raw_values[y]);
        if (lx - ly).abs() > tie {
            return lx.total_cmp(&ly);
        }
        for i in 0..DIM {
            let (mx, my) = (v.0[i][x].norm(), v.0[i][y].norm());
            if (mx - my).abs() > 1e-12 {
                return my.total_cmp(&mx);
            }
        }
        x.cmp(&y)
    });

    let values = order.map(|k| raw_values[k]);
    let mut vectors = ComplexMat4::zeros();
    for (dst, &src) in order.iter().enumerate() {
        for i in 0..DIM {
            vectors.0[i][dst] = v.0[i][src];
        }
    }
    Ok(HermitianEigen { values, vectors })
}

fn normalize_phase(v: &mut ComplexMat4, col: usize) {
    let max = (0..DIM).map(|i| v.0[i][col].norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return;
    }
    let pivot = (0..DIM)
        .find(|&i| v.0[i][col].norm() >= max * (1.0 - 1e-12))
        .unwrap_or(0);
    let z = v.0[pivot][col];
    let rot = z.conj() / z.norm();
    for i in 0..DIM {
        v.0[i][col] *= rot;
    }
    v.0[pivot][col] = Complex::new(v.0[pivot][col].re, 0.0);
}

/// `exp(−i·h·t)` for Hermitian `h`, evaluated through the eigenbasis so the
/// result is unitary to rounding. `t = 0` returns the identity exactly.
pub fn expm_i_hermitian(h: &ComplexMat4, t: f64) -> Result<ComplexMat4> {
    let eig = hermitian_eig(h)?;
    if t == 0.0 {
        return Ok(ComplexMat4::identity());
    }
    Ok(unitary_from_eigen(&eig, t))
}

/// `V·diag(exp(−i·λ·t))·V†` for a precomputed decomposition.
pub fn unitary_from_eigen(eig: &HermitianEigen, t: f64) -> ComplexMat4 {
    let phases = eig.values.map(|l| Complex::from_polar(1.0, -l * t));
    eig.vectors
        .mat_mul(&ComplexMat4::from_diag(phases))
        .mat_mul(&eig.vectors.adjoint())
}

/// `exp(−i·diag(d)·t)`.
pub fn expm_i_diagonal(d: [f64; DIM], t: f64) -> ComplexMat4 {
    ComplexMat4::from_diag(d.map(|l| Complex::from_polar(1.0, -l * t)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    const ONE: Complex = Complex::new(1.0, 0.0);

    fn j3() -> ComplexMat4 {
        ComplexMat4::from_diag_real([1.5, -1.5, 0.5, -0.5])
    }

    #[test]
    fn identity_is_neutral() {
        let m = ComplexMat4::from_real([
            [1.0, 2.0, 3.0, 4.0],
            [0.5, -1.0, 0.0, 2.0],
            [0.0, 0.0, 7.0, 1.0],
            [3.0, 1.0, 1.0, 1.0],
        ]);
        assert_eq!(ComplexMat4::identity().mat_mul(&m), m);
        assert_eq!(m.mat_mul(&ComplexMat4::identity()), m);
    }

    #[test]
    fn j3_squared() {
        let sq = j3().mat_mul(&j3());
        assert_eq!(sq, ComplexMat4::from_diag_real([2.25, 2.25, 0.25, 0.25]));
    }

    #[test]
    fn adjoint_cases() {
        assert_eq!(ComplexMat4::identity().adjoint(), ComplexMat4::identity());
        let i = Complex::new(0.0, 1.0);
        let ii = ComplexMat4::identity().scale(i);
        assert_eq!(ii.adjoint(), ComplexMat4::identity().scale(-i));
        let mut m = ii;
        m[(0, 3)] = Complex::new(2.0, -5.0);
        assert_eq!(m.adjoint().adjoint(), m);
        assert_eq!(m.adjoint()[(3, 0)], Complex::new(2.0, 5.0));
    }

    #[test]
    fn frobenius_cases() {
        assert_eq!(ComplexMat4::zeros().frobenius_norm(), 0.0);
        assert_eq!(ComplexMat4::identity().frobenius_norm(), 2.0);
        assert!((j3().frobenius_norm() - 5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn eig_of_diagonal_input() {
        let e = hermitian_eig(&j3()).unwrap();
        assert_eq!(e.values, [-1.5, -0.5, 0.5, 1.5]);
        // |−3/2⟩ is basis slot 1, |−1/2⟩ slot 3, ...
        assert_eq!(e.vectors[(1, 0)], ONE);
        assert_eq!(e.vectors[(3, 1)], ONE);
        assert_eq!(e.vectors[(2, 2)], ONE);
        assert_eq!(e.vectors[(0, 3)], ONE);
    }

    #[test]
    fn eig_quadrupole_spectrum_and_tie_order() {
        let h0 = ComplexMat4::from_diag_real([1.0, 1.0, -1.0, -1.0]);
        let e = hermitian_eig(&h0).unwrap();
        assert_eq!(e.values, [-1.0, -1.0, 1.0, 1.0]);
        // Ties: the vector with the larger leading component comes first.
        assert_eq!(e.vectors[(2, 0)], ONE);
        assert_eq!(e.vectors[(3, 1)], ONE);
        assert_eq!(e.vectors[(0, 2)], ONE);
        assert_eq!(e.vectors[(1, 3)], ONE);
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let mut m = ComplexMat4::identity();
        m[(0, 1)] = Complex::new(1.0, 0.0);
        assert!(matches!(
            hermitian_eig(&m),
            Err(Error::NotHermitian { .. })
        ));
        assert!(expm_i_hermitian(&m, 1.0).is_err());
    }

    #[test]
    fn eig_complex_hermitian() {
        let mut m = ComplexMat4::from_diag_real([0.3, -1.2, 2.0, 0.7]);
        let entries = [
            (0, 1, Complex::new(0.4, -0.9)),
            (0, 3, Complex::new(-1.1, 0.2)),
            (1, 2, Complex::new(0.0, 1.3)),
            (2, 3, Complex::new(0.25, 0.5)),
        ];
        for (i, j, z) in entries {
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
        let e = hermitian_eig(&m).unwrap();
        assert!(e.vectors.unitarity_residual() < 1e-13);
        assert!((e.reconstruct() - m).frobenius_norm() < 1e-13 * m.frobenius_norm());
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn expm_cases() {
        let u0 = expm_i_hermitian(&j3(), 0.0).unwrap();
        assert!((u0 - ComplexMat4::identity()).max_abs() < 1e-15);

        // Half-integer spin: a full turn is −I.
        let u = expm_i_hermitian(&j3(), 2.0 * PI).unwrap();
        assert!((u + ComplexMat4::identity()).max_abs() < 1e-14);
        assert!(u.unitarity_residual() < 1e-12);
    }

    #[test]
    fn trace_fidelity_ignores_global_phase() {
        let u = expm_i_hermitian(&j3(), 0.7).unwrap();
        let v = u.scale(Complex::from_polar(1.0, 1.9));
        assert!((trace_fidelity(&u, &v) - 1.0).abs() < 1e-15);
        assert!(trace_fidelity(&ComplexMat4::identity(), &j3()) < 1e-15);
    }

    #[test]
    fn predicates() {
        assert!(j3().is_hermitian(1e-14));
        assert!(j3().is_diagonal(1e-14));
        assert!(!j3().is_unitary(1e-3));
        assert!(ComplexMat4::identity().is_unitary(0.0));
    }
}

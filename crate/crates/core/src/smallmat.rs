//! Fixed-size complex matrices (2×2 and 3×3).
//!
//! Everything here is a plain `Copy` value, so all operations are pure and
//! can be called from any thread.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Characteristic discriminants below this (relative to the matrix scale)
/// are treated as a coalesced pair of eigenvalues.
pub const DEGENERACY_THRESHOLD: f64 = 1e-14;

/// Largest exponent for which [`matpow`] multiplies the matrix out directly.
pub const DIRECT_POWER_LIMIT: u64 = 64;

/// Eigenvector bases with `|det V|` below this are considered too
/// ill-conditioned for the spectral power path.
const MIN_BASIS_DETERMINANT: f64 = 1e-3;

/// Minimal square-matrix interface shared by [`Mat2`] and [`Mat3`].
pub trait SquareMatrix:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self>
{
    const DIM: usize;

    fn identity() -> Self;
    fn zero() -> Self;
    fn scale(self, factor: C64) -> Self;
    /// Maximum absolute column sum.
    fn norm1(&self) -> f64;
    fn max_abs_diff(&self, other: &Self) -> f64;
    fn is_finite(&self) -> bool;
}

macro_rules! square_matrix {
    ($name:ident, $n:expr) => {
        #[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
        pub struct $name(pub [[C64; $n]; $n]);

        impl $name {
            pub fn new(entries: [[C64; $n]; $n]) -> Self {
                Self(entries)
            }

            pub fn from_real(entries: [[f64; $n]; $n]) -> Self {
                let mut out = Self::zero();
                for i in 0..$n {
                    for j in 0..$n {
                        out.0[i][j] = C64::new(entries[i][j], 0.0);
                    }
                }
                out
            }

            #[inline]
            pub fn get(&self, row: usize, col: usize) -> C64 {
                self.0[row][col]
            }

            pub fn trace(&self) -> C64 {
                (0..$n).map(|i| self.0[i][i]).sum()
            }

            pub fn mul_vec(&self, v: &[C64; $n]) -> [C64; $n] {
                let mut out = [ZERO; $n];
                for i in 0..$n {
                    out[i] = (0..$n).map(|j| self.0[i][j] * v[j]).sum();
                }
                out
            }

            pub fn adjoint(&self) -> Self {
                let mut out = Self::zero();
                for i in 0..$n {
                    for j in 0..$n {
                        out.0[i][j] = self.0[j][i].conj();
                    }
                }
                out
            }
        }

        impl SquareMatrix for $name {
            const DIM: usize = $n;

            fn identity() -> Self {
                let mut out = Self::zero();
                for i in 0..$n {
                    out.0[i][i] = ONE;
                }
                out
            }

            fn zero() -> Self {
                Self([[ZERO; $n]; $n])
            }

            fn scale(mut self, factor: C64) -> Self {
                for row in self.0.iter_mut() {
                    for x in row.iter_mut() {
                        *x *= factor;
                    }
                }
                self
            }

            fn norm1(&self) -> f64 {
                (0..$n)
                    .map(|j| (0..$n).map(|i| self.0[i][j].norm()).sum::<f64>())
                    .fold(0.0, f64::max)
            }

            fn max_abs_diff(&self, other: &Self) -> f64 {
                let mut worst = 0.0f64;
                for i in 0..$n {
                    for j in 0..$n {
                        worst = worst.max((self.0[i][j] - other.0[i][j]).norm());
                    }
                }
                worst
            }

            fn is_finite(&self) -> bool {
                self.0
                    .iter()
                    .flatten()
                    .all(|z| z.re.is_finite() && z.im.is_finite())
            }
        }

        impl Add for $name {
            type Output = Self;
            fn add(mut self, rhs: Self) -> Self {
                for i in 0..$n {
                    for j in 0..$n {
                        self.0[i][j] += rhs.0[i][j];
                    }
                }
                self
            }
        }

        impl Sub for $name {
            type Output = Self;
            fn sub(mut self, rhs: Self) -> Self {
                for i in 0..$n {
                    for j in 0..$n {
                        self.0[i][j] -= rhs.0[i][j];
                    }
                }
                self
            }
        }

        impl Neg for $name {
            type Output = Self;
            fn neg(self) -> Self {
                self.scale(-ONE)
            }
        }

        impl Mul for $name {
            type Output = Self;
            fn mul(self, rhs: Self) -> Self {
                let mut out = Self::zero();
                for i in 0..$n {
                    for j in 0..$n {
                        out.0[i][j] = (0..$n).map(|k| self.0[i][k] * rhs.0[k][j]).sum();
                    }
                }
                out
            }
        }
    };
}

square_matrix!(Mat2, 2);
square_matrix!(Mat3, 3);

impl Mat2 {
    pub fn det(&self) -> C64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    /// `tr² − 4·det`; zero exactly when the eigenvalues coincide.
    pub fn discriminant(&self) -> C64 {
        let tr = self.trace();
        tr * tr - 4.0 * self.det()
    }

    pub fn inverse(&self) -> Option<Self> {
        let det = self.det();
        if det.norm() == 0.0 {
            return None;
        }
        let [[a, b], [c, d]] = self.0;
        Some(Self([[d, -b], [-c, a]]).scale(det.inv()))
    }

    pub fn pauli_x() -> Self {
        Self::from_real([[0.0, 1.0], [1.0, 0.0]])
    }

    pub fn pauli_z() -> Self {
        Self::from_real([[1.0, 0.0], [0.0, -1.0]])
    }
}

/// One eigenvalue with its unit-norm eigenvector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenPair {
    pub value: C64,
    pub vector: [C64; 2],
}

/// Result of [`eig2`]. `pairs[0]` is the dominant eigenvalue.
///
/// When `degenerate` is set both values coincide. For a defective matrix
/// the two vectors are the same (only one eigendirection exists); for a
/// multiple of the identity they are the canonical basis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Eigen2 {
    pub pairs: [EigenPair; 2],
    pub degenerate: bool,
}

impl Eigen2 {
    pub fn values(&self) -> [C64; 2] {
        [self.pairs[0].value, self.pairs[1].value]
    }
}

fn approx_eq(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs())
}

/// Dominant-first ordering: modulus, then real part, then imaginary part,
/// all descending. Moduli and real parts that agree to 1e-12 count as ties.
fn dominates(a: C64, b: C64) -> bool {
    let scale = a.norm().max(b.norm());
    if !approx_eq(a.norm(), b.norm(), 1e-12) {
        return a.norm() > b.norm();
    }
    if (a.re - b.re).abs() > 1e-12 * scale {
        return a.re > b.re;
    }
    a.im >= b.im
}

fn normalize(v: [C64; 2]) -> [C64; 2] {
    let norm = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    // fix the global phase: largest component real and positive
    let pivot = if v[0].norm() >= v[1].norm() {
        v[0]
    } else {
        v[1]
    };
    let phase = pivot.conj() / pivot.norm();
    [v[0] * phase / norm, v[1] * phase / norm]
}

fn eigenvector(m: &Mat2, lambda: C64) -> Option<[C64; 2]> {
    let [[a, b], [c, d]] = m.0;
    let first = [b, lambda - a];
    let second = [lambda - d, c];
    let n1 = first[0].norm_sqr() + first[1].norm_sqr();
    let n2 = second[0].norm_sqr() + second[1].norm_sqr();
    let scale = m.norm1().max(f64::MIN_POSITIVE);
    let (v, n) = if n1 >= n2 { (first, n1) } else { (second, n2) };
    if n.sqrt() <= 1e-14 * scale {
        None
    } else {
        Some(normalize(v))
    }
}

/// Eigendecomposition of a 2×2 complex matrix.
///
/// The eigenvalues are the roots of `λ² − tr·λ + det`. The larger root is
/// taken from the quadratic formula with the sign that avoids cancellation
/// and the smaller one from `det / λ₁`.
pub fn eig2(m: &Mat2) -> Eigen2 {
    let tr = m.trace();
    let det = m.det();
    let disc = tr * tr - 4.0 * det;
    let scale = (tr.norm_sqr()).max(4.0 * det.norm());

    if disc.norm() <= DEGENERACY_THRESHOLD * scale {
        let value = tr / 2.0;
        let pairs = match eigenvector(m, value) {
            Some(v) => [EigenPair { value, vector: v }; 2],
            // m is (numerically) a multiple of the identity
            None => [
                EigenPair {
                    value,
                    vector: [ONE, ZERO],
                },
                EigenPair {
                    value,
                    vector: [ZERO, ONE],
                },
            ],
        };
        return Eigen2 {
            pairs,
            degenerate: true,
        };
    }

    let root = disc.sqrt();
    let big = if (tr + root).norm() >= (tr - root).norm() {
        (tr + root) / 2.0
    } else {
        (tr - root) / 2.0
    };
    let small = if big.norm() > 0.0 {
        det / big
    } else {
        tr - big
    };
    let (first, second) = if dominates(big, small) {
        (big, small)
    } else {
        (small, big)
    };
    let v1 = eigenvector(m, first).unwrap_or([ONE, ZERO]);
    let v2 = eigenvector(m, second).unwrap_or([ZERO, ONE]);
    Eigen2 {
        pairs: [
            EigenPair {
                value: first,
                vector: v1,
            },
            EigenPair {
                value: second,
                vector: v2,
            },
        ],
        degenerate: false,
    }
}

/// `exp(−i·h·t)` by scaling and squaring with a truncated Taylor series.
pub fn expm<M: SquareMatrix>(h: &M, t: f64) -> M {
    let a = h.scale(C64::new(0.0, -t));
    let norm = a.norm1();
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let b = a.scale(C64::new(0.5f64.powi(squarings), 0.0));

    let mut term = M::identity();
    let mut sum = M::identity();
    for k in 1..=40 {
        term = (term * b).scale(C64::new(1.0 / k as f64, 0.0));
        sum = sum + term;
        if term.norm1() <= 1e-18 * sum.norm1() {
            break;
        }
    }
    for _ in 0..squarings {
        sum = sum * sum;
    }
    sum
}

fn sinhc(q: C64) -> C64 {
    if q.norm() < 1e-4 {
        let q2 = q * q;
        ONE + q2 / 6.0 + q2 * q2 / 120.0
    } else {
        q.sinh() / q
    }
}

/// Closed-form `exp(−i·h·t)` for a 2×2 matrix.
///
/// With `A = −i·h·t = μ·I + B`, `B` traceless, `B² = q²·I` and
/// `exp(A) = e^μ (cosh q · I + sinh(q)/q · B)`. Valid for defective
/// matrices too (`q = 0`).
pub fn expm2_closed(h: &Mat2, t: f64) -> Mat2 {
    let a = h.scale(C64::new(0.0, -t));
    let mu = a.trace() / 2.0;
    let b = a - Mat2::identity().scale(mu);
    let q = (-b.det()).sqrt();
    let e = mu.exp();
    (Mat2::identity().scale(q.cosh()) + b.scale(sinhc(q))).scale(e)
}

/// `mⁿ` by binary exponentiation.
pub fn matpow_binary<M: SquareMatrix>(m: &M, mut n: u64) -> M {
    let mut result = M::identity();
    let mut base = *m;
    while n > 0 {
        if n & 1 == 1 {
            result = result * base;
        }
        n >>= 1;
        if n > 0 {
            base = base * base;
        }
    }
    result
}

/// `mⁿ` through the eigendecomposition, `V·diag(λⁿ)·V⁻¹`.
///
/// Returns `None` when the matrix is degenerate or its eigenbasis is too
/// ill-conditioned for the result to be trusted.
pub fn matpow_eigen(m: &Mat2, n: u64) -> Option<Mat2> {
    let eig = eig2(m);
    if eig.degenerate {
        return None;
    }
    let [p, q] = eig.pairs;
    let basis = Mat2([[p.vector[0], q.vector[0]], [p.vector[1], q.vector[1]]]);
    if basis.det().norm() < MIN_BASIS_DETERMINANT {
        return None;
    }
    let inv = basis.inverse()?;
    let pow = |z: C64| match u32::try_from(n) {
        Ok(k) => z.powu(k),
        Err(_) => z.powf(n as f64),
    };
    let diag = Mat2([[pow(p.value), ZERO], [ZERO, pow(q.value)]]);
    Some(basis * diag * inv)
}

/// `mⁿ`. Small exponents are multiplied out; large ones use the spectral
/// path when it is well conditioned and binary exponentiation otherwise.
pub fn matpow(m: &Mat2, n: u64) -> Mat2 {
    if n <= DIRECT_POWER_LIMIT {
        let mut out = Mat2::identity();
        for _ in 0..n {
            out = *m * out;
        }
        return out;
    }
    matpow_eigen(m, n).unwrap_or_else(|| matpow_binary(m, n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn residual(m: &Mat2, pair: &EigenPair) -> f64 {
        let av = m.mul_vec(&pair.vector);
        ((av[0] - pair.value * pair.vector[0]).norm_sqr()
            + (av[1] - pair.value * pair.vector[1]).norm_sqr())
        .sqrt()
    }

    /// exp(−iHt) summed term by term with no scaling, until the terms stop
    /// contributing.
    fn plain_series(h: &Mat2, t: f64) -> Mat2 {
        let a = h.scale(c(0.0, -t));
        let mut term = Mat2::identity();
        let mut sum = Mat2::identity();
        for k in 1..200 {
            term = (term * a).scale(c(1.0 / k as f64, 0.0));
            sum = sum + term;
        }
        sum
    }

    #[test]
    fn identity_is_degenerate() {
        let e = eig2(&Mat2::identity());
        assert!(e.degenerate);
        assert_eq!(e.values(), [ONE, ONE]);
    }

    #[test]
    fn diagonal_eigenpairs() {
        let m = Mat2::from_real([[2.0, 0.0], [0.0, -1.0]]);
        let e = eig2(&m);
        assert!(!e.degenerate);
        assert!((e.pairs[0].value - c(2.0, 0.0)).norm() < 1e-15);
        assert!((e.pairs[1].value - c(-1.0, 0.0)).norm() < 1e-15);
        assert!((e.pairs[0].vector[0] - ONE).norm() < 1e-15);
        assert!((e.pairs[1].vector[1] - ONE).norm() < 1e-15);
    }

    #[test]
    fn defective_jordan_block() {
        let m = Mat2::from_real([[1.0, 1.0], [0.0, 1.0]]);
        let e = eig2(&m);
        assert!(e.degenerate);
        assert_eq!(e.pairs[0].vector, e.pairs[1].vector);
        assert!(residual(&m, &e.pairs[0]) < 1e-14);
    }

    #[test]
    fn conjugate_pair_ordering() {
        // rotation: eigenvalues e^{±i}; equal moduli and real parts
        let m = Mat2::from_real([[1f64.cos(), -1f64.sin()], [1f64.sin(), 1f64.cos()]]);
        let e = eig2(&m);
        assert!(e.pairs[0].value.im > 0.0);
        for p in &e.pairs {
            assert!(residual(&m, p) < 1e-14);
        }
    }

    #[test]
    fn expm_zero_time_is_identity() {
        let h = Mat2([[c(0.3, -1.0), c(2.0, 0.5)], [c(-0.4, 0.0), c(0.0, 7.0)]]);
        assert_eq!(expm(&h, 0.0), Mat2::identity());
        assert!(expm2_closed(&h, 0.0).max_abs_diff(&Mat2::identity()) < 1e-15);
    }

    #[test]
    fn expm_pi_pulse() {
        let h = Mat2::pauli_x().scale(c(0.5, 0.0));
        let u = expm(&h, PI);
        let expect = Mat2([[ZERO, c(0.0, -1.0)], [c(0.0, -1.0), ZERO]]);
        assert!(u.max_abs_diff(&expect) < 1e-14);
    }

    #[test]
    fn expm_quarter_rotation_matches_plain_series() {
        let h = Mat2::pauli_x().scale(c(0.5, 0.0));
        let t = PI / 2.0;
        let s = (PI / 4.0).sin();
        let expect = Mat2([[c(s, 0.0), c(0.0, -s)], [c(0.0, -s), c(s, 0.0)]]);
        assert!(expm(&h, t).max_abs_diff(&expect) < 1e-14);
        assert!(plain_series(&h, t).max_abs_diff(&expect) < 1e-14);
    }

    #[test]
    fn closed_form_agrees_with_series() {
        let h = Mat2([[c(0.0, 0.0), c(0.5, 0.0)], [c(0.5, 0.0), c(0.0, -0.7)]]);
        for &t in &[0.01, 0.3, 1.0, 4.0, 12.0] {
            let a = expm(&h, t);
            let b = expm2_closed(&h, t);
            let reference = plain_series(&h, t);
            assert!(a.max_abs_diff(&b) < 1e-10, "t = {t}");
            assert!(a.max_abs_diff(&reference) < 1e-12, "t = {t}");
        }
    }

    #[test]
    fn expm3_diagonal() {
        let h = Mat3::from_real([[1.0, 0.0, 0.0], [0.0, 2.0, 0.0], [0.0, 0.0, -3.0]]);
        let u = expm(&h, 0.7);
        for (k, e) in [1.0, 2.0, -3.0].iter().enumerate() {
            assert!((u.get(k, k) - c(0.0, -e * 0.7).exp()).norm() < 1e-14);
        }
    }

    #[test]
    fn matpow_small_exponents() {
        let m = Mat2([[c(0.9, 0.1), c(0.0, -0.2)], [c(0.3, 0.0), c(0.5, 0.5)]]);
        assert_eq!(matpow(&m, 0), Mat2::identity());
        assert_eq!(matpow(&m, 1), m);
        assert!(matpow_binary(&m, 37).max_abs_diff(&matpow(&m, 37)) < 1e-14);
    }

    #[test]
    fn matpow_defective_falls_back() {
        let m = Mat2::from_real([[0.5, 1.0], [0.0, 0.5]]);
        assert!(matpow_eigen(&m, 100).is_none());
        // [[a, b], [0, a]]^n = [[aⁿ, n·aⁿ⁻¹·b], [0, aⁿ]]
        let p = matpow(&m, 100);
        let expect = 100.0 * 0.5f64.powi(99);
        assert!((p.get(0, 1).re - expect).abs() < 1e-12 * expect);
    }
}

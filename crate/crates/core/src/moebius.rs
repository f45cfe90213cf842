//! SL(2,R) matrices acting on the upper half-plane, automorphy factors and
//! point-pair invariants.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::ops::Mul;

use crate::error::{Error, Result};

/// A real 2x2 matrix `[[a, b], [c, d]]`, normally of determinant one.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mat2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2 { a: 1.0, b: 0.0, c: 0.0, d: 1.0 };

    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Mat2 { a, b, c, d }
    }

    /// Rotation about `i` by angle `phi`, as an element of SL(2,R).
    pub fn rotation(phi: f64) -> Self {
        let (s, c) = (0.5 * phi).sin_cos();
        Mat2::new(c, s, -s, c)
    }

    /// Hyperbolic translation along the imaginary axis, `z -> e^l z`.
    pub fn dilation(l: f64) -> Self {
        let e = (0.5 * l).exp();
        Mat2::new(e, 0.0, 0.0, 1.0 / e)
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> f64 {
        self.a + self.d
    }

    /// Inverse of a determinant-one matrix.
    pub fn inv(&self) -> Self {
        Mat2::new(self.d, -self.b, -self.c, self.a)
    }

    pub fn neg(&self) -> Self {
        Mat2::new(-self.a, -self.b, -self.c, -self.d)
    }

    /// Representative of `{M, -M}` with non-negative trace (ties broken on the
    /// first non-zero entry).
    pub fn sign_normalized(&self) -> Self {
        let t = self.trace();
        let flip = if t.abs() > 1e-300 {
            t < 0.0
        } else {
            let first = [self.a, self.b, self.c, self.d]
                .into_iter()
                .find(|v| *v != 0.0)
                .unwrap_or(0.0);
            first < 0.0
        };
        if flip {
            self.neg()
        } else {
            *self
        }
    }

    pub fn max_abs_diff(&self, other: &Mat2) -> f64 {
        (self.a - other.a)
            .abs()
            .max((self.b - other.b).abs())
            .max((self.c - other.c).abs())
            .max((self.d - other.d).abs())
    }

    /// `cosh` of the hyperbolic distance between `i` and `M i`.
    pub fn cosh_displacement(&self) -> f64 {
        0.5 * (self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d)
    }

    /// Hyperbolic distance between `i` and `M i`.
    pub fn displacement(&self) -> f64 {
        self.cosh_displacement().max(1.0).acosh()
    }

    pub fn is_hyperbolic(&self, tol: f64) -> bool {
        self.trace().abs() > 2.0 + tol
    }

    /// Translation length `2 arccosh(|tr|/2)` of a hyperbolic element.
    pub fn translation_length(&self) -> f64 {
        2.0 * (0.5 * self.trace().abs()).max(1.0).acosh()
    }

    /// Fixed points on the boundary `R u {inf}`; `None` stands for infinity.
    /// The first entry is the repelling point, the second the attracting one.
    pub fn fixed_points(&self) -> Option<(Option<f64>, Option<f64>)> {
        let t = self.trace();
        let disc = t * t - 4.0;
        if disc <= 0.0 {
            return None;
        }
        let s = disc.sqrt();
        if self.c.abs() < 1e-300 {
            // z -> (a z + b) / d: infinity and b / (d - a)
            let finite = if (self.d - self.a).abs() > 0.0 {
                Some(self.b / (self.d - self.a))
            } else {
                None
            };
            return if self.a.abs() > self.d.abs() {
                Some((finite, None))
            } else {
                Some((None, finite))
            };
        }
        // roots of c z^2 + (d - a) z - b = 0
        let p = (self.a - self.d + s) / (2.0 * self.c);
        let q = (self.a - self.d - s) / (2.0 * self.c);
        // derivative at a fixed point is (c z + d)^-2, so the attracting one has |c z + d| > 1
        let dp = (self.c * p + self.d).abs();
        let dq = (self.c * q + self.d).abs();
        if dp > dq {
            Some((Some(q), Some(p)))
        } else {
            Some((Some(p), Some(q)))
        }
    }

    /// Real `n`-th root with the same axis, for a hyperbolic element.
    pub fn hyperbolic_root(&self, n: u32) -> Option<Mat2> {
        let m = self.sign_normalized();
        let t = m.trace();
        if t <= 2.0 {
            return None;
        }
        let l = 2.0 * (0.5 * t).acosh();
        let lr = l / n as f64;
        // M = cosh(l/2) I + sinh(l/2) X with X^2 = I, tr X = 0
        let sh = (0.5 * l).sinh();
        let ch = (0.5 * l).cosh();
        let x = Mat2::new((m.a - ch) / sh, m.b / sh, m.c / sh, (m.d - ch) / sh);
        let (s1, c1) = ((0.5 * lr).sinh(), (0.5 * lr).cosh());
        Some(Mat2::new(c1 + s1 * x.a, s1 * x.b, s1 * x.c, c1 + s1 * x.d))
    }

    pub fn pow(&self, n: u32) -> Mat2 {
        let mut r = Mat2::IDENTITY;
        for _ in 0..n {
            r = r * *self;
        }
        r
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }
}

/// Checks that `z` lies in the upper half-plane.
pub fn check_point(z: Complex64) -> Result<()> {
    if !(z.im > 0.0) || !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::Domain(format!("point {z} is not in the upper half-plane")));
    }
    Ok(())
}

/// Moebius action `z -> (a z + b) / (c z + d)`.
pub fn apply(m: &Mat2, z: Complex64) -> Complex64 {
    (z * m.a + m.b) / (z * m.c + m.d)
}

/// Moebius action with a determinant and domain check.
pub fn apply_checked(m: &Mat2, z: Complex64) -> Result<Complex64> {
    check_point(z)?;
    if (m.det() - 1.0).abs() > 1e-9 * (1.0 + m.cosh_displacement()) {
        return Err(Error::Domain(format!("matrix has determinant {} != 1", m.det())));
    }
    Ok(apply(m, z))
}

/// Automorphy factor `j_M(z, k) = exp(i k arg(c z + d))`.
pub fn factor_j(m: &Mat2, z: Complex64, k: i32) -> Complex64 {
    let w = z * m.c + m.d;
    Complex64::from_polar(1.0, k as f64 * w.arg())
}

/// The spinor factor `diag(j_M(z, k), j_M(z, k - 2))`.
pub fn spin_factor(m: &Mat2, z: Complex64, k: i32) -> [Complex64; 2] {
    [factor_j(m, z, k), factor_j(m, z, k - 2)]
}

/// Point-pair invariant `sigma(z, w) = |z - conj w|^2 / (4 Im z Im w)`, which
/// equals `cosh^2(d/2)` for the hyperbolic distance `d`.
pub fn sigma(z: Complex64, w: Complex64) -> f64 {
    (z - w.conj()).norm_sqr() / (4.0 * z.im * w.im)
}

/// `sigma(z, w) - 1 = |z - w|^2 / (4 Im z Im w)`, without cancellation.
pub fn sigma_minus_one(z: Complex64, w: Complex64) -> f64 {
    (z - w).norm_sqr() / (4.0 * z.im * w.im)
}

/// Hyperbolic distance.
pub fn distance(z: Complex64, w: Complex64) -> f64 {
    2.0 * sigma_minus_one(z, w).sqrt().asinh()
}

/// Entry products `[A11 B11, A11 B22, A22 B11, A22 B22]` of the diagonal
/// prefactor matrices `A(z1, z2)`, `B(z1, z2)`.
///
/// The diagonal products are principal square roots of ratios of points in
/// the upper half-plane, hence continuous. The off-diagonal ratio
/// `-conj(w)/w`, `w = z1 - z2`, winds around the origin, so its root is taken
/// as the continuous branch `i conj(w)/|w|`.
pub fn pair_products(z1: Complex64, z2: Complex64) -> Result<[Complex64; 4]> {
    if z1 == z2 {
        return Err(Error::Domain("pair matrices are singular at coincident points".into()));
    }
    let (c1, c2) = (z1.conj(), z2.conj());
    let w = z1 - z2;
    let u = w / w.norm();
    let i = Complex64::i();
    Ok([
        ((z2 - c1) / (z1 - c2)).sqrt(),
        i * u.conj(),
        -i * u,
        ((z1 - c2) / (z2 - c1)).sqrt(),
    ])
}

/// Cayley map from the upper half-plane to the Poincare disc, `i -> 0`.
pub fn to_disc(z: Complex64) -> Complex64 {
    let i = Complex64::i();
    (z - i) / (z + i)
}

pub fn from_disc(w: Complex64) -> Complex64 {
    let i = Complex64::i();
    i * (Complex64::new(1.0, 0.0) + w) / (Complex64::new(1.0, 0.0) - w)
}

/// Poincare disc to Klein disc.
pub fn disc_to_klein(w: Complex64) -> Complex64 {
    w * (2.0 / (1.0 + w.norm_sqr()))
}

/// Boundary point of the upper half-plane (`None` = infinity) to the unit circle.
pub fn boundary_to_disc(x: Option<f64>) -> Complex64 {
    match x {
        None => Complex64::new(1.0, 0.0),
        Some(x) => {
            let i = Complex64::i();
            (Complex64::new(x, 0.0) - i) / (Complex64::new(x, 0.0) + i)
        }
    }
}

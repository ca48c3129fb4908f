//! Forward-mode second-order derivatives, enough to get exact Wirtinger
//! derivatives of the Whitney extension without finite differences.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Value and partial derivatives up to order two in `(x, y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Taylor2 {
    pub v: Complex64,
    pub x: Complex64,
    pub y: Complex64,
    pub xx: Complex64,
    pub xy: Complex64,
    pub yy: Complex64,
}

impl Taylor2 {
    pub fn constant(v: Complex64) -> Self {
        Self { v, x: ZERO, y: ZERO, xx: ZERO, xy: ZERO, yy: ZERO }
    }

    /// The coordinate `z = x + iy` at `z0`.
    #[cfg(test)]
    pub fn z(z0: Complex64) -> Self {
        Self { v: z0, x: Complex64::new(1.0, 0.0), y: I, xx: ZERO, xy: ZERO, yy: ZERO }
    }

    /// `a + b·(z - z0) + c·conj(z - z0)` evaluated at `z`.
    pub fn affine(a: Complex64, b: Complex64, c: Complex64, z: Complex64, z0: Complex64) -> Self {
        let w = z - z0;
        Self { v: a + b * w + c * w.conj(), x: b + c, y: I * (b - c), xx: ZERO, xy: ZERO, yy: ZERO }
    }

    /// Separable product `u(x)·v(y)` of two one-dimensional real jets.
    pub fn tensor(u: Dual2, v: Dual2) -> Self {
        let r = |t: f64| Complex64::new(t, 0.0);
        Self {
            v: r(u.v * v.v),
            x: r(u.d * v.v),
            y: r(u.v * v.d),
            xx: r(u.dd * v.v),
            xy: r(u.d * v.d),
            yy: r(u.v * v.dd),
        }
    }

    #[cfg(test)]
    pub fn conj(self) -> Self {
        Self {
            v: self.v.conj(),
            x: self.x.conj(),
            y: self.y.conj(),
            xx: self.xx.conj(),
            xy: self.xy.conj(),
            yy: self.yy.conj(),
        }
    }

    /// `g ∘ self` for a holomorphic (or real, on real jets) `g` with `g(v), g'(v), g''(v)` given.
    pub fn chain(self, g: Complex64, g1: Complex64, g2: Complex64) -> Self {
        Self {
            v: g,
            x: g1 * self.x,
            y: g1 * self.y,
            xx: g2 * self.x * self.x + g1 * self.xx,
            xy: g2 * self.x * self.y + g1 * self.xy,
            yy: g2 * self.y * self.y + g1 * self.yy,
        }
    }

    pub fn recip(self) -> Self {
        let r = 1.0 / self.v;
        self.chain(r, -r * r, 2.0 * r * r * r)
    }

    pub fn scale(self, s: Complex64) -> Self {
        Self { v: s * self.v, x: s * self.x, y: s * self.y, xx: s * self.xx, xy: s * self.xy, yy: s * self.yy }
    }

    pub fn dz(&self) -> Complex64 {
        (self.x - I * self.y) / 2.0
    }
    pub fn dzbar(&self) -> Complex64 {
        (self.x + I * self.y) / 2.0
    }
    pub fn dz_dz(&self) -> Complex64 {
        (self.xx - 2.0 * I * self.xy - self.yy) / 4.0
    }
    pub fn dz_dzbar(&self) -> Complex64 {
        (self.xx + self.yy) / 4.0
    }
    pub fn dzbar_dzbar(&self) -> Complex64 {
        (self.xx + 2.0 * I * self.xy - self.yy) / 4.0
    }
}

impl Add for Taylor2 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self {
            v: self.v + o.v,
            x: self.x + o.x,
            y: self.y + o.y,
            xx: self.xx + o.xx,
            xy: self.xy + o.xy,
            yy: self.yy + o.yy,
        }
    }
}

impl Sub for Taylor2 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl Neg for Taylor2 {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul for Taylor2 {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self {
            v: self.v * o.v,
            x: self.x * o.v + self.v * o.x,
            y: self.y * o.v + self.v * o.y,
            xx: self.xx * o.v + 2.0 * self.x * o.x + self.v * o.xx,
            xy: self.xy * o.v + self.x * o.y + self.y * o.x + self.v * o.xy,
            yy: self.yy * o.v + 2.0 * self.y * o.y + self.v * o.yy,
        }
    }
}

impl Div for Taylor2 {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Self) -> Self {
        self * o.recip()
    }
}

/// Real value with first and second derivative in one variable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Dual2 {
    pub v: f64,
    pub d: f64,
    pub dd: f64,
}

impl Dual2 {
    pub fn constant(v: f64) -> Self {
        Self { v, d: 0.0, dd: 0.0 }
    }

    #[cfg(test)]
    pub fn var(v: f64) -> Self {
        Self { v, d: 1.0, dd: 0.0 }
    }

    pub fn chain(self, g: f64, g1: f64, g2: f64) -> Self {
        Self { v: g, d: g1 * self.d, dd: g2 * self.d * self.d + g1 * self.dd }
    }

    pub fn scale(self, s: f64) -> Self {
        Self { v: s * self.v, d: s * self.d, dd: s * self.dd }
    }

    pub fn shift(self, s: f64) -> Self {
        Self { v: self.v + s, ..self }
    }

    pub fn mul(self, o: Self) -> Self {
        Self { v: self.v * o.v, d: self.d * o.v + self.v * o.d, dd: self.dd * o.v + 2.0 * self.d * o.d + self.v * o.dd }
    }

    pub fn recip(self) -> Self {
        let r = 1.0 / self.v;
        self.chain(r, -r * r, 2.0 * r * r * r)
    }

    pub fn exp(self) -> Self {
        let e = self.v.exp();
        self.chain(e, e, e)
    }
}

/// `e^{-1/t}` for `t > 0`, zero otherwise; flat to all orders at the origin.
fn flat(t: Dual2) -> Dual2 {
    if t.v <= 0.0 {
        Dual2::constant(0.0)
    } else {
        t.recip().scale(-1.0).exp()
    }
}

/// C^∞ step: 0 for `t ≤ 0`, 1 for `t ≥ 1`.
pub(crate) fn smooth_step(t: Dual2) -> Dual2 {
    if t.v <= 0.0 {
        return Dual2::constant(0.0);
    }
    if t.v >= 1.0 {
        return Dual2::constant(1.0);
    }
    let a = flat(t);
    let b = flat(t.scale(-1.0).shift(1.0));
    let s = Dual2 { v: a.v + b.v, d: a.d + b.d, dd: a.dd + b.dd };
    a.mul(s.recip())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wirtinger_of_polynomials() {
        let z0 = Complex64::new(0.3, -0.7);
        let z = Taylor2::z(z0);
        let f = z * z * z.conj();
        assert!((f.dz() - 2.0 * z0 * z0.conj()).norm() < 1e-14);
        assert!((f.dzbar() - z0 * z0).norm() < 1e-14);
        assert!((f.dz_dz() - 2.0 * z0.conj()).norm() < 1e-14);
        assert!((f.dz_dzbar() - 2.0 * z0).norm() < 1e-14);
        assert!(f.dzbar_dzbar().norm() < 1e-14);
    }

    #[test]
    fn reciprocal_is_holomorphic() {
        let z0 = Complex64::new(0.4, 0.2);
        let f = Taylor2::z(z0).recip();
        assert!(f.dzbar().norm() < 1e-14);
        assert!((f.dz() + 1.0 / (z0 * z0)).norm() < 1e-13);
        assert!((f.dz_dz() - 2.0 / (z0 * z0 * z0)).norm() < 1e-12);
    }

    #[test]
    fn step_is_monotone_and_smooth() {
        let mut last = 0.0;
        for k in 0..=100 {
            let t = k as f64 / 100.0;
            let s = smooth_step(Dual2::var(t));
            assert!(s.v >= last);
            last = s.v;
            // finite-difference check of the derivative
            let h = 1e-6;
            if k > 0 && k < 100 {
                let fd = (smooth_step(Dual2::var(t + h)).v - smooth_step(Dual2::var(t - h)).v) / (2.0 * h);
                assert!((fd - s.d).abs() < 1e-6);
                let fd2 = (smooth_step(Dual2::var(t + h)).d - smooth_step(Dual2::var(t - h)).d) / (2.0 * h);
                assert!((fd2 - s.dd).abs() < 1e-5);
            }
        }
        assert_eq!(smooth_step(Dual2::var(0.5)).v, 0.5);
    }
}

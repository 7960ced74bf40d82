//! Minimal extended-precision complex arithmetic (principal branches).

use rug::Float;

#[derive(Debug, Clone, PartialEq)]
pub struct Complex {
    pub re: Float,
    pub im: Float,
}

impl Complex {
    pub fn new(re: Float, im: Float) -> Self {
        Self { re, im }
    }

    pub fn real(re: Float) -> Self {
        let im = Float::new(re.prec());
        Self { re, im }
    }

    pub fn from_f64(bits: u32, re: f64, im: f64) -> Self {
        Self::new(Float::with_val(bits, re), Float::with_val(bits, im))
    }

    pub fn prec(&self) -> u32 {
        self.re.prec().max(self.im.prec())
    }

    pub fn abs(&self) -> Float {
        Float::with_val(self.prec(), self.re.hypot_ref(&self.im))
    }

    pub fn arg(&self) -> Float {
        Float::with_val(self.prec(), self.im.atan2_ref(&self.re))
    }

    pub fn add(&self, o: &Complex) -> Complex {
        let p = self.prec();
        Complex::new(Float::with_val(p, &self.re + &o.re), Float::with_val(p, &self.im + &o.im))
    }

    pub fn sub(&self, o: &Complex) -> Complex {
        let p = self.prec();
        Complex::new(Float::with_val(p, &self.re - &o.re), Float::with_val(p, &self.im - &o.im))
    }

    pub fn mul(&self, o: &Complex) -> Complex {
        let p = self.prec();
        let re = Float::with_val(p, &self.re * &o.re) - Float::with_val(p, &self.im * &o.im);
        let im = Float::with_val(p, &self.re * &o.im) + Float::with_val(p, &self.im * &o.re);
        Complex::new(re, im)
    }

    pub fn scale(&self, s: &Float) -> Complex {
        let p = self.prec();
        Complex::new(Float::with_val(p, &self.re * s), Float::with_val(p, &self.im * s))
    }

    pub fn div(&self, o: &Complex) -> Complex {
        let p = self.prec();
        let d = Float::with_val(p, o.re.square_ref()) + Float::with_val(p, o.im.square_ref());
        let re = Float::with_val(p, &self.re * &o.re) + Float::with_val(p, &self.im * &o.im);
        let im = Float::with_val(p, &self.im * &o.re) - Float::with_val(p, &self.re * &o.im);
        Complex::new(re / &d, im / d)
    }

    /// Principal logarithm.
    pub fn ln(&self) -> Complex {
        Complex::new(self.abs().ln(), self.arg())
    }

    pub fn exp(&self) -> Complex {
        let p = self.prec();
        let r = Float::with_val(p, self.re.exp_ref());
        let (s, c) = self.im.clone().sin_cos(Float::new(p));
        Complex::new(Float::with_val(p, &r * &c), r * s)
    }

    /// Principal power `self^e` for real `e`.
    pub fn powf(&self, e: &Float) -> Complex {
        if self.re.is_zero() && self.im.is_zero() {
            return self.clone();
        }
        self.ln().scale(e).exp()
    }

    /// Principal square root.
    pub fn sqrt(&self) -> Complex {
        let p = self.prec();
        let r = self.abs();
        let mut re = (Float::with_val(p, &r + &self.re) / 2u32).sqrt();
        let mut im = (Float::with_val(p, &r - &self.re) / 2u32).sqrt();
        if self.im.is_sign_negative() {
            im = -im;
        }
        if re.is_nan() {
            re = Float::new(p);
        }
        Complex::new(re, im)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn near(a: &Complex, re: f64, im: f64) -> bool {
        (a.re.to_f64() - re).abs() < 1e-14 && (a.im.to_f64() - im).abs() < 1e-14
    }

    #[test]
    fn field_operations() {
        let a = Complex::from_f64(128, 1.0, 2.0);
        let b = Complex::from_f64(128, -0.5, 0.25);
        assert!(near(&a.mul(&b), -1.0, -0.75));
        assert!(near(&a.mul(&b).div(&b), 1.0, 2.0));
        assert!(near(&a.sub(&b).add(&b), 1.0, 2.0));
    }

    #[test]
    fn branches() {
        let m1 = Complex::from_f64(128, -1.0, 0.0);
        assert!(near(&m1.sqrt(), 0.0, 1.0));
        assert!(near(&m1.ln(), 0.0, std::f64::consts::PI));
        let below = Complex::from_f64(128, -4.0, -0.0);
        assert!(near(&below.sqrt(), 0.0, -2.0));
        let z = Complex::from_f64(128, 0.3, -1.7);
        assert!(near(&z.ln().exp(), 0.3, -1.7));
        let half = Float::with_val(128, 0.5);
        let s = z.powf(&half);
        let q = z.sqrt();
        assert!(near(&s, q.re.to_f64(), q.im.to_f64()));
    }
}

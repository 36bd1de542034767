//! Roots of monic complex cubics.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// `z³ + c2 z² + c1 z + c0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MonicCubic {
    pub c2: C64,
    pub c1: C64,
    pub c0: C64,
}

impl MonicCubic {
    pub fn eval(&self, z: C64) -> C64 {
        ((z + self.c2) * z + self.c1) * z + self.c0
    }

    fn eval_deriv(&self, z: C64) -> C64 {
        (z * 3.0 + self.c2 * 2.0) * z + self.c1
    }

    /// Largest coefficient magnitude, counting the leading 1.
    pub fn scale(&self) -> f64 {
        1.0f64.max(self.c2.norm()).max(self.c1.norm()).max(self.c0.norm())
    }

    /// Cardano's formula followed by Newton polishing of each root.
    pub fn roots(&self) -> Result<[C64; 3]> {
        if !(self.c2.norm().is_finite() && self.c1.norm().is_finite() && self.c0.norm().is_finite())
        {
            return Err(Error::DegenerateCubic("non-finite coefficient"));
        }
        let a = self.c2;
        let shift = a / 3.0;
        let p = self.c1 - a * a / 3.0;
        let q = a * a * a * (2.0 / 27.0) - a * self.c1 / 3.0 + self.c0;

        let disc = (q * q / 4.0 + p * p * p / 27.0).sqrt();
        let u3_plus = -q / 2.0 + disc;
        let u3_minus = -q / 2.0 - disc;
        let u3 = if u3_plus.norm() >= u3_minus.norm() {
            u3_plus
        } else {
            u3_minus
        };

        let mut roots = if u3.norm() == 0.0 {
            [-shift; 3]
        } else {
            let u = u3.powf(1.0 / 3.0);
            let omega = C64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
            let mut out = [C64::new(0.0, 0.0); 3];
            let mut uk = u;
            for r in out.iter_mut() {
                *r = uk - p / (uk * 3.0) - shift;
                uk *= omega;
            }
            out
        };
        for r in roots.iter_mut() {
            *r = self.polish(*r);
        }
        Ok(roots)
    }

    fn polish(&self, mut z: C64) -> C64 {
        let mut best = self.eval(z).norm();
        for _ in 0..4 {
            let d = self.eval_deriv(z);
            if d.norm() == 0.0 || best == 0.0 {
                break;
            }
            let cand = z - self.eval(z) / d;
            let val = self.eval(cand).norm();
            if val < best {
                z = cand;
                best = val;
            } else {
                break;
            }
        }
        z
    }
}

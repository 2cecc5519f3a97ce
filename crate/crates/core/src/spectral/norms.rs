use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{fourier, Field};

/// Norms making up the weighted space `H^1 ∩ F(H^1)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SigmaNorms {
    pub l2: f64,
    pub grad_l2: f64,
    pub xf_l2: f64,
    /// `||f||_{L^p}` for each requested exponent, keyed by `p` formatted as a string.
    pub lp: BTreeMap<String, f64>,
}

impl SigmaNorms {
    /// `sqrt(||f||^2 + ||grad f||^2 + ||x f||^2)`.
    pub fn sigma(&self) -> f64 {
        (self.l2 * self.l2 + self.grad_l2 * self.grad_l2 + self.xf_l2 * self.xf_l2).sqrt()
    }
}

/// `||grad f||_{L^2}` through the multiplier `|xi|`.
pub fn grad_l2(f: &Field) -> f64 {
    fourier::gradient(f).iter().map(Field::l2_squared).sum::<f64>().sqrt()
}

/// `|| |x| f ||_{L^2}`.
pub fn xf_l2(f: &Field) -> f64 {
    let r2 = f.grid().radius_squared();
    let s: f64 = f.values().iter().zip(&r2).map(|(z, r)| z.norm_sqr() * r).sum();
    (s * f.grid().cell_volume()).sqrt()
}

/// L^2, gradient, weighted and the requested L^p norms of `f`.
pub fn norms(f: &Field, exponents: &[f64]) -> SigmaNorms {
    SigmaNorms {
        l2: f.l2(),
        grad_l2: grad_l2(f),
        xf_l2: xf_l2(f),
        lp: exponents.iter().map(|&p| (format!("{p}"), f.lp(p))).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid;
    use std::f64::consts::PI;

    #[test]
    fn gaussian_norms() {
        let f = Field::gaussian(Grid::line(12.0, 512), 1.0);
        let n = norms(&f, &[6.0]);
        // int exp(-x^2) = sqrt(pi)
        assert!((n.l2 - PI.powf(0.25)).abs() < 1e-13);
        // Self-duality: ||f'|| = ||x f|| = sqrt(sqrt(pi)/2)
        assert!((n.grad_l2 - n.xf_l2).abs() < 1e-12);
        assert!((n.xf_l2 - (PI.sqrt() / 2.0).sqrt()).abs() < 1e-12);
        // int exp(-3x^2) = sqrt(pi/3)
        assert!((n.lp["6"] - (PI / 3.0).sqrt().powf(1.0 / 6.0)).abs() < 1e-13);
        assert!(n.sigma() >= n.l2);
    }

    #[test]
    fn zero_norms() {
        let n = norms(&Field::zeros(Grid::line(3.0, 16)), &[4.0]);
        assert_eq!((n.l2, n.grad_l2, n.xf_l2, n.lp["4"]), (0.0, 0.0, 0.0, 0.0));
    }
}

//! The full functional-equation descriptor.

use crate::error::{Error, Result};
use crate::gamma::GammaSignature;
use crate::numeric::{Cplx, Real};
use crate::series::{ArithmeticSeriesPair, PhiExpr, ZeroProgression};

/// A declared pole of the series factor phi.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiPole {
    pub location: Cplx,
    pub order: usize,
}

/// Everything the identities need: delta, Q, omega, the Gamma signature,
/// the coefficient pair, declared poles and zeros of phi, and the abscissae
/// of absolute convergence (upper estimates).
#[derive(Debug, Clone)]
pub struct FunctionalEquationData {
    pub delta: Real,
    pub big_q: Real,
    pub omega: Cplx,
    pub sig: GammaSignature,
    pub series: ArithmeticSeriesPair,
    pub phi: PhiExpr,
    pub declared_poles: Vec<PhiPole>,
    pub zero_ladders: Vec<ZeroProgression>,
    pub sigma_a: Real,
    pub sigma_b: Real,
}

impl FunctionalEquationData {
    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0) {
            return Err(Error::InvalidData(format!("delta must be positive, got {}", self.delta)));
        }
        if !(self.big_q > 0.0) {
            return Err(Error::InvalidData(format!("Q must be positive, got {}", self.big_q)));
        }
        if (self.omega.norm() - 1.0).abs() >= 1e-12 {
            return Err(Error::InvalidData(format!(
                "|omega| must be 1 to within 1e-12, got {}",
                self.omega.norm()
            )));
        }
        if !self.sigma_a.is_finite() || !self.sigma_b.is_finite() {
            return Err(Error::InvalidData("abscissae must be finite".into()));
        }
        Ok(())
    }

    /// The bar-side signature (same alphas, conjugated betas).
    pub fn sig_conj(&self) -> GammaSignature {
        self.sig.conjugate()
    }

    /// d' = sum of alphas.
    pub fn dprime(&self) -> Real {
        self.sig.dprime()
    }

    /// The dual descriptor with the two series sides swapped and omega
    /// conjugated: Q^s G(s) = conj(omega) Q^(delta-s) conj(F(delta - conj s)).
    /// Valid for the shipped self-dual data where psi shares phi's
    /// continuation.
    pub fn dual(&self) -> Self {
        let mut d = self.clone();
        std::mem::swap(&mut d.series.a_side, &mut d.series.b_side);
        d.omega = self.omega.conj();
        let (sa, sb) = (self.sigma_a, self.sigma_b);
        d.sigma_a = sb;
        d.sigma_b = sa;
        d
    }

    /// Total zero order declared for phi at a real axis location.
    pub fn zero_order_at(&self, re: Real) -> usize {
        self.zero_ladders.iter().map(|z| z.order_at(re)).sum()
    }

    /// phi(s) by the declared continuation.
    pub fn phi_value(&self, s: Cplx) -> Result<Cplx> {
        self.phi.eval(s)
    }
}

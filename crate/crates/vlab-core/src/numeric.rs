//! Scalar aliases and compensated summation.
//!
//! `Real`/`Cplx` are the single substitution point for the arithmetic
//! backend; everything downstream works through them. binary64 with
//! compensated reductions meets the target tolerances (1e-8..1e-10).

use num_complex::Complex64;

pub type Real = f64;
pub type Cplx = Complex64;

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Neumaier compensated accumulator for `f64`.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Compensated accumulator for complex values (componentwise Neumaier).
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanComplex {
    re: KahanSum,
    im: KahanSum,
}

impl KahanComplex {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, v: Cplx) {
        self.re.add(v.re);
        self.im.add(v.im);
    }

    pub fn value(&self) -> Cplx {
        Cplx::new(self.re.value(), self.im.value())
    }
}

/// Sum an iterator of complex terms with compensation, in iteration order.
pub fn csum<I: IntoIterator<Item = Cplx>>(it: I) -> Cplx {
    let mut acc = KahanComplex::new();
    for v in it {
        acc.add(v);
    }
    acc.value()
}

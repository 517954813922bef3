//! Points of the solenoid as pairs `(a, z)` modulo `(a + k, z - 2πk)`.

use alloc::vec::Vec;
use num_traits::Float;

use crate::{Chain, Complex64, Error, ProfiniteInt, Result, TAU};

/// `exp(a, z)` in canonical form: `Re z ∈ [0, 2π)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SolenoidPoint {
    a: ProfiniteInt,
    z: Complex64,
}

/// Reduces `x` into `[0, 2π)` and returns the number of whole turns removed.
fn reduce_turns(x: f64) -> (f64, i64) {
    let k = Float::floor(x / TAU);
    let mut r = x - k * TAU;
    let mut k = k as i64;
    if r >= TAU {
        r -= TAU;
        k += 1;
    }
    if r < 0.0 {
        r += TAU;
        k -= 1;
        if r >= TAU {
            r = 0.0;
            k += 1;
        }
    }
    (r, k)
}

impl SolenoidPoint {
    /// `exp(a, z)`, canonicalized by carrying whole turns of `Re z` into `a`.
    pub fn exp(a: ProfiniteInt, z: Complex64) -> Self {
        let (re, k) = reduce_turns(z.re);
        Self { a: a.add_integer(k), z: Complex64::new(re, z.im) }
    }

    /// Like [`SolenoidPoint::exp`] but checks that `a` lives on `chain`.
    pub fn exp_on(chain: &Chain, a: ProfiniteInt, z: Complex64) -> Result<Self> {
        if a.chain() != chain {
            return Err(Error::DepthMismatch { expected: chain.depth(), found: a.chain().depth() });
        }
        Ok(Self::exp(a, z))
    }

    /// `exp(0, z)`: the baseleaf point with coordinate `z`.
    pub fn on_baseleaf(chain: &Chain, z: Complex64) -> Self {
        Self::exp(ProfiniteInt::zero(chain), z)
    }

    pub fn identity(chain: &Chain) -> Self {
        Self::on_baseleaf(chain, Complex64::new(0.0, 0.0))
    }

    pub fn a(&self) -> &ProfiniteInt {
        &self.a
    }

    pub fn z(&self) -> Complex64 {
        self.z
    }

    pub fn chain(&self) -> &Chain {
        self.a.chain()
    }

    pub fn canonicalize(&self) -> Self {
        Self::exp(self.a.clone(), self.z)
    }

    /// `π_n(exp(a, z)) = e^{2πi (a mod n)/n} e^{iz/n}`.
    pub fn project(&self, n: u64) -> Result<Complex64> {
        let j = self.chain().index_of(n)?;
        let r = self.a.residues()[j];
        let phase = Complex64::from_polar(1.0, TAU * r as f64 / n as f64);
        Ok(phase * (Complex64::i() * self.z / n as f64).exp())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        let a = self.a.add(&other.a)?;
        Ok(Self::exp(a, self.z + other.z))
    }

    pub fn inverse(&self) -> Self {
        Self::exp(self.a.neg(), -self.z)
    }
}

/// The `n_J / n` points over `x` of the level-`n` projection at the chain's depth.
///
/// Leaf coordinates before canonicalization are `z_0 + 2πnk` with
/// `z_0 = -i n log x` (principal branch).
pub fn fiber_samples(x: Complex64, n: u64, chain: &Chain) -> Result<Vec<SolenoidPoint>> {
    if !x.is_finite() || x.norm() == 0.0 {
        return Err(Error::Cusp);
    }
    chain.index_of(n)?;
    let z0 = -Complex64::i() * n as f64 * x.ln();
    let count = chain.top() / n;
    Ok((0..count)
        .map(|k| SolenoidPoint::on_baseleaf(chain, z0 + TAU * (n * k) as f64))
        .collect())
}

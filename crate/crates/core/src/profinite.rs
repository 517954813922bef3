//! Truncated profinite integers: compatible residues along a chain.

use alloc::vec::Vec;

use crate::{Chain, Error, Result};

/// An element of the profinite completion known modulo every level of a chain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProfiniteInt {
    residues: Vec<u64>,
    chain: Chain,
}

impl ProfiniteInt {
    pub fn zero(chain: &Chain) -> Self {
        Self { residues: alloc::vec![0; chain.depth()], chain: chain.clone() }
    }

    /// The image of an ordinary integer.
    pub fn from_integer(a: i64, chain: &Chain) -> Self {
        let residues = chain
            .levels()
            .iter()
            .map(|&n| (a as i128).rem_euclid(n as i128) as u64)
            .collect();
        Self { residues, chain: chain.clone() }
    }

    /// Builds from explicit residues, checking range and compatibility.
    pub fn from_residues(residues: Vec<u64>, chain: &Chain) -> Result<Self> {
        if residues.len() != chain.depth() {
            return Err(Error::DepthMismatch { expected: chain.depth(), found: residues.len() });
        }
        let levels = chain.levels();
        for (j, &r) in residues.iter().enumerate() {
            if r >= levels[j] {
                return Err(Error::InvalidInput(alloc::format!(
                    "residue {r} not in [0, {})",
                    levels[j]
                )));
            }
            if j + 1 < residues.len() && residues[j + 1] % levels[j] != r {
                return Err(Error::InvalidInput(alloc::format!(
                    "residues {} and {} are not compatible",
                    r,
                    residues[j + 1]
                )));
            }
        }
        Ok(Self { residues, chain: chain.clone() })
    }

    pub fn residues(&self) -> &[u64] {
        &self.residues
    }

    pub fn chain(&self) -> &Chain {
        &self.chain
    }

    /// Residue modulo `n_J`; it determines every other residue.
    pub fn top_residue(&self) -> u64 {
        *self.residues.last().expect("nonempty")
    }

    /// `a mod d` for any divisor `d` of `n_J`.
    pub fn residue_mod(&self, d: u64) -> Result<u64> {
        let top = self.chain.top();
        if d == 0 || top % d != 0 {
            return Err(Error::DenominatorOutsideChain { den: d, top });
        }
        Ok(self.top_residue() % d)
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.chain != other.chain {
            return Err(Error::DepthMismatch { expected: self.chain.depth(), found: other.chain.depth() });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let residues = self
            .residues
            .iter()
            .zip(&other.residues)
            .zip(self.chain.levels())
            .map(|((&a, &b), &n)| ((a as u128 + b as u128) % n as u128) as u64)
            .collect();
        Ok(Self { residues, chain: self.chain.clone() })
    }

    pub fn add_integer(&self, k: i64) -> Self {
        let residues = self
            .residues
            .iter()
            .zip(self.chain.levels())
            .map(|(&a, &n)| (a as i128 + k as i128).rem_euclid(n as i128) as u64)
            .collect();
        Self { residues, chain: self.chain.clone() }
    }

    pub fn neg(&self) -> Self {
        let residues = self
            .residues
            .iter()
            .zip(self.chain.levels())
            .map(|(&a, &n)| (n - a) % n)
            .collect();
        Self { residues, chain: self.chain.clone() }
    }

    /// Largest `j` (1-based count of levels) such that `n_j` divides `a`;
    /// equals the depth when `a ≡ 0 mod n_J`.
    pub fn divisibility_depth(&self) -> usize {
        self.residues.iter().take_while(|&&r| r == 0).count()
    }
}

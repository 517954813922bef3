//! Divisibility chains `n_1 | n_2 | ... | n_J`.

use alloc::format;
use alloc::vec::Vec;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainKind {
    /// Levels `p^0, p^1, ...`.
    PAdic(u64),
    /// Levels `1!, 2!, ...`.
    Factorial,
    Custom,
}

/// A finite truncation of a divisibility chain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chain {
    kind: ChainKind,
    levels: Vec<u64>,
}

impl Chain {
    pub fn p_adic(p: u64, depth: usize) -> Result<Self> {
        if p < 2 {
            return Err(Error::InvalidChain(format!("base {p} < 2")));
        }
        if depth == 0 {
            return Err(Error::InvalidChain("depth 0".into()));
        }
        let mut levels = Vec::with_capacity(depth);
        let mut n: u64 = 1;
        for j in 0..depth {
            if j > 0 {
                n = n
                    .checked_mul(p)
                    .ok_or_else(|| Error::InvalidChain(format!("{p}^{j} overflows")))?;
            }
            levels.push(n);
        }
        Ok(Self { kind: ChainKind::PAdic(p), levels })
    }

    pub fn factorial(depth: usize) -> Result<Self> {
        if depth == 0 {
            return Err(Error::InvalidChain("depth 0".into()));
        }
        let mut levels = Vec::with_capacity(depth);
        let mut n: u64 = 1;
        for j in 1..=depth as u64 {
            n = n
                .checked_mul(j)
                .ok_or_else(|| Error::InvalidChain(format!("{j}! overflows")))?;
            levels.push(n);
        }
        Ok(Self { kind: ChainKind::Factorial, levels })
    }

    pub fn custom(levels: Vec<u64>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::InvalidChain("no levels".into()));
        }
        if levels[0] == 0 {
            return Err(Error::InvalidChain("levels must be positive".into()));
        }
        for w in levels.windows(2) {
            if w[1] <= w[0] || w[1] % w[0] != 0 {
                return Err(Error::InvalidChain(format!("{} does not properly divide {}", w[0], w[1])));
            }
        }
        Ok(Self { kind: ChainKind::Custom, levels })
    }

    /// Rebuilds a chain from its JSON-level description, checking that the
    /// levels match the kind.
    pub fn from_parts(kind: ChainKind, levels: Vec<u64>) -> Result<Self> {
        let expected = match kind {
            ChainKind::PAdic(p) => Some(Self::p_adic(p, levels.len())?),
            ChainKind::Factorial => Some(Self::factorial(levels.len())?),
            ChainKind::Custom => None,
        };
        match expected {
            Some(c) if c.levels != levels => {
                Err(Error::InvalidChain(format!("levels do not match kind {kind:?}")))
            }
            Some(c) => Ok(c),
            None => Self::custom(levels),
        }
    }

    pub fn kind(&self) -> ChainKind {
        self.kind
    }

    pub fn levels(&self) -> &[u64] {
        &self.levels
    }

    /// Truncation depth `J`.
    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// `n_J`.
    pub fn top(&self) -> u64 {
        *self.levels.last().expect("chains are nonempty")
    }

    /// Zero-based position of `n` among the levels.
    pub fn index_of(&self, n: u64) -> Result<usize> {
        self.levels.binary_search(&n).map_err(|_| Error::NotAChainLevel(n))
    }

    pub fn contains(&self, n: u64) -> bool {
        self.levels.binary_search(&n).is_ok()
    }

    pub fn truncate(&self, depth: usize) -> Result<Self> {
        if depth == 0 || depth > self.depth() {
            return Err(Error::DepthMismatch { expected: self.depth(), found: depth });
        }
        Ok(Self { kind: self.kind, levels: self.levels[..depth].to_vec() })
    }

    /// The same chain continued to `depth` levels. Custom chains cannot grow.
    pub fn extend_to(&self, depth: usize) -> Result<Self> {
        if depth <= self.depth() {
            return Ok(self.clone());
        }
        match self.kind {
            ChainKind::PAdic(p) => Self::p_adic(p, depth),
            ChainKind::Factorial => Self::factorial(depth),
            ChainKind::Custom => Err(Error::InvalidChain("custom chains cannot be extended".into())),
        }
    }

    /// Smallest extension (up to `max_depth`) whose top level is divisible by `d`.
    pub fn extend_to_cover(&self, d: u64, max_depth: usize) -> Result<Self> {
        let mut c = self.clone();
        while c.top() % d != 0 {
            if c.depth() >= max_depth {
                return Err(Error::DenominatorOutsideChain { den: d, top: c.top() });
            }
            c = c.extend_to(c.depth() + 1)?;
        }
        Ok(c)
    }
}

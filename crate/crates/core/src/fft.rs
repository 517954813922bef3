//! Radix-2 complex FFT in one and two dimensions.

use alloc::vec::Vec;
use num_traits::Float;

use crate::{Complex64, Error, Result, TAU};

/// Precomputed twiddles and bit reversal for one power-of-two length.
#[derive(Debug, Clone)]
pub struct Fft {
    len: usize,
    twiddles: Vec<Complex64>,
    rev: Vec<usize>,
}

impl Fft {
    pub fn new(len: usize) -> Result<Self> {
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::InvalidInput(alloc::format!("FFT length {len} is not a power of two")));
        }
        let bits = len.trailing_zeros();
        let rev = (0..len)
            .map(|i| if bits == 0 { 0 } else { i.reverse_bits() >> (usize::BITS - bits) })
            .collect();
        let twiddles = (0..len / 2)
            .map(|k| {
                let (s, c) = Float::sin_cos(-TAU * k as f64 / len as f64);
                Complex64::new(c, s)
            })
            .collect();
        Ok(Fft { len, twiddles, rev })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Forward transform `X_k = Σ x_j e^{-2πijk/L}` (unnormalized).
    pub fn forward(&self, data: &mut [Complex64]) {
        self.run(data, false);
    }

    /// Inverse transform, normalized by `1/L`.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.run(data, true);
        let s = 1.0 / self.len as f64;
        data.iter_mut().for_each(|v| *v *= s);
    }

    fn run(&self, data: &mut [Complex64], inverse: bool) {
        assert_eq!(data.len(), self.len);
        for i in 0..self.len {
            let j = self.rev[i];
            if i < j {
                data.swap(i, j);
            }
        }
        let mut size = 2;
        while size <= self.len {
            let half = size / 2;
            let stride = self.len / size;
            for start in (0..self.len).step_by(size) {
                for k in 0..half {
                    let mut w = self.twiddles[k * stride];
                    if inverse {
                        w = w.conj();
                    }
                    let a = data[start + k];
                    let b = data[start + k + half] * w;
                    data[start + k] = a + b;
                    data[start + k + half] = a - b;
                }
            }
            size *= 2;
        }
    }
}

/// Square 2D transform on row-major `n × n` data.
#[derive(Debug, Clone)]
pub struct Fft2 {
    plan: Fft,
}

impl Fft2 {
    pub fn new(n: usize) -> Result<Self> {
        Ok(Fft2 { plan: Fft::new(n)? })
    }

    pub fn size(&self) -> usize {
        self.plan.len()
    }

    pub fn forward(&self, data: &mut [Complex64]) {
        self.apply(data, false);
    }

    pub fn inverse(&self, data: &mut [Complex64]) {
        self.apply(data, true);
    }

    fn apply(&self, data: &mut [Complex64], inverse: bool) {
        let n = self.plan.len();
        assert_eq!(data.len(), n * n);
        let pass = |row: &mut [Complex64]| {
            if inverse {
                self.plan.inverse(row)
            } else {
                self.plan.forward(row)
            }
        };
        data.chunks_mut(n).for_each(pass);
        let mut col = alloc::vec![Complex64::new(0.0, 0.0); n];
        for x in 0..n {
            for y in 0..n {
                col[y] = data[y * n + x];
            }
            pass(&mut col);
            for y in 0..n {
                data[y * n + x] = col[y];
            }
        }
    }
}

/// Signed wavenumber of DFT index `k` for length `n`.
pub fn signed_index(k: usize, n: usize) -> f64 {
    if k < n / 2 {
        k as f64
    } else {
        k as f64 - n as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive(x: &[Complex64]) -> Vec<Complex64> {
        let n = x.len();
        (0..n)
            .map(|k| {
                x.iter().enumerate().fold(Complex64::new(0.0, 0.0), |acc, (j, v)| {
                    acc + v * Complex64::from_polar(1.0, -TAU * (j * k) as f64 / n as f64)
                })
            })
            .collect()
    }

    #[test]
    fn matches_naive_dft() {
        for n in [1usize, 2, 8, 64] {
            let x: Vec<Complex64> = (0..n).map(|j| Complex64::new((j as f64).sin(), (j as f64 * 0.3).cos())).collect();
            let mut y = x.clone();
            let plan = Fft::new(n).unwrap();
            plan.forward(&mut y);
            for (a, b) in y.iter().zip(naive(&x)) {
                assert!((a - b).norm() < 1e-10);
            }
            plan.inverse(&mut y);
            for (a, b) in y.iter().zip(&x) {
                assert!((a - b).norm() < 1e-12);
            }
        }
        assert!(Fft::new(12).is_err());
    }

    #[test]
    fn two_dimensional_mode() {
        let n = 16;
        let (kx, ky) = (3usize, 5usize);
        let mut d: Vec<Complex64> = (0..n * n)
            .map(|i| {
                let (x, y) = (i % n, i / n);
                Complex64::from_polar(1.0, TAU * (kx * x + ky * y) as f64 / n as f64)
            })
            .collect();
        Fft2::new(n).unwrap().forward(&mut d);
        for (i, v) in d.iter().enumerate() {
            let expect = if i == ky * n + kx { (n * n) as f64 } else { 0.0 };
            assert!((v - expect).norm() < 1e-9);
        }
    }
}

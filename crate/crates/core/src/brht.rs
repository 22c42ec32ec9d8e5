//! Blockwise randomized Hadamard transform `R = H_d D`.
//!
//! `D` is diagonal with `b = d / L` constant blocks of length `L`; block `i`
//! carries sign `delta_i`, and the signs are 4-wise independent. `R` is
//! orthogonal, and for every `mu` the first `t L` coordinates of `R mu` keep
//! about a `t L / d` share of `||mu||^2` with constant probability.

use rand::RngCore;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::hadamard::{check_power_of_two, fwht_in_place};
use crate::randomness::{fourwise_rademacher, PublicSeed, RademacherBlockSigns};

/// The dense oracle refuses to build `R` beyond this dimension.
pub const DENSE_MAX_DIM: usize = 64;

/// Compression probe constant: the kept share must exceed `1/100` of its mean.
pub const COMPRESSION_FRACTION: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BrhtSpec {
    d: usize,
    block_len: usize,
    signs: RademacherBlockSigns,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompressionProbeResult {
    /// Squared norm of the first `t L` coordinates of `R mu`.
    pub z: f64,
    /// `t L ||mu||^2 / (100 d)`.
    pub threshold: f64,
}

impl CompressionProbeResult {
    pub fn exceeds(&self) -> bool {
        self.z > self.threshold
    }
}

fn check_shape(d: usize, block_len: usize) -> Result<()> {
    check_power_of_two(d, "BRHT dimension")?;
    check_power_of_two(block_len, "BRHT block length")?;
    if block_len > d || !d.is_multiple_of(block_len) {
        return Err(Error::Dimension(format!(
            "block length {block_len} does not divide dimension {d}"
        )));
    }
    Ok(())
}

/// Samples a `(d, L)` transform; consumes exactly `4 log2(d / L)` shared bits.
pub fn sample_brht(seed: &mut PublicSeed, d: usize, block_len: usize) -> Result<BrhtSpec> {
    check_shape(d, block_len)?;
    let signs = fourwise_rademacher(seed, d / block_len)?;
    Ok(BrhtSpec {
        d,
        block_len,
        signs,
    })
}

impl BrhtSpec {
    /// Builds a transform from explicit block signs.
    pub fn with_signs(d: usize, block_len: usize, signs: RademacherBlockSigns) -> Result<Self> {
        check_shape(d, block_len)?;
        if signs.len() != d / block_len {
            return Err(Error::Dimension(format!(
                "{} signs for {} blocks",
                signs.len(),
                d / block_len
            )));
        }
        Ok(Self {
            d,
            block_len,
            signs,
        })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn block_len(&self) -> usize {
        self.block_len
    }

    pub fn num_blocks(&self) -> usize {
        self.d / self.block_len
    }

    pub fn signs(&self) -> &RademacherBlockSigns {
        &self.signs
    }

    pub fn bits_consumed(&self) -> usize {
        self.signs.bits_consumed()
    }

    /// `buf <- R buf` over all `d` coordinates.
    pub fn apply_in_place(&self, buf: &mut [f64]) -> Result<()> {
        if buf.len() != self.d {
            return Err(Error::Dimension(format!(
                "vector of length {} for a transform of dimension {}",
                buf.len(),
                self.d
            )));
        }
        for (block, &sign) in buf.chunks_exact_mut(self.block_len).zip(self.signs.signs()) {
            if sign < 0 {
                block.iter_mut().for_each(|x| *x = -*x);
            }
        }
        fwht_in_place(buf)
    }

    /// First `keep` coordinates of `R x`.
    pub fn apply(&self, x: &[f64], keep: usize) -> Result<Vec<f64>> {
        if keep == 0 || keep > self.d {
            return Err(Error::Dimension(format!(
                "keep = {keep} outside 1..={}",
                self.d
            )));
        }
        let mut buf = x.to_vec();
        self.apply_in_place(&mut buf)?;
        buf.truncate(keep);
        Ok(buf)
    }

    /// `Z = ||(R mu)[..t L]||^2` together with the `1/100` threshold.
    pub fn compression_probe(&self, mu: &[f64], t: usize) -> Result<CompressionProbeResult> {
        if t == 0 || t > self.num_blocks() {
            return Err(Error::Dimension(format!(
                "t = {t} outside 1..={}",
                self.num_blocks()
            )));
        }
        let kept = self.apply(mu, t * self.block_len)?;
        let z = kept.iter().map(|v| v * v).sum();
        let norm_sq: f64 = mu.iter().map(|v| v * v).sum();
        Ok(CompressionProbeResult {
            z,
            threshold: COMPRESSION_FRACTION * (t * self.block_len) as f64 / self.d as f64 * norm_sq,
        })
    }

    /// Dense `R`, for checking small cases only.
    pub fn dense_matrix(&self) -> Result<Vec<Vec<f64>>> {
        if self.d > DENSE_MAX_DIM {
            return Err(Error::Dimension(format!(
                "dense BRHT limited to d <= {DENSE_MAX_DIM}"
            )));
        }
        let h = crate::hadamard::hadamard_matrix(self.d)?;
        let signs = self.signs.signs();
        Ok(h.into_iter()
            .map(|row| {
                row.into_iter()
                    .enumerate()
                    .map(|(j, v)| v * f64::from(signs[j / self.block_len]))
                    .collect()
            })
            .collect())
    }
}

/// Zero-pads a mean vector up to `padded_dim`.
pub fn pad_with_zeros(x: &[f64], padded_dim: usize) -> Vec<f64> {
    let mut out = x.to_vec();
    out.resize(padded_dim.max(x.len()), 0.0);
    out
}

/// Pads a sample up to `padded_dim` with fresh standard normal coordinates, so
/// a `G(mu, I_d)` sample becomes a `G((mu, 0), I_{d'})` sample.
pub fn pad_with_noise<R: RngCore + ?Sized>(x: &[f64], padded_dim: usize, rng: &mut R) -> Vec<f64> {
    let mut out = Vec::with_capacity(padded_dim.max(x.len()));
    out.extend_from_slice(x);
    while out.len() < padded_dim {
        out.push(StandardNormal.sample(rng));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn norm(v: &[f64]) -> f64 {
        v.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    #[test]
    fn single_block_consumes_nothing() {
        let mut seed = PublicSeed::from_bits(vec![]);
        let spec = sample_brht(&mut seed, 8, 8).unwrap();
        assert_eq!(spec.num_blocks(), 1);
        assert_eq!(spec.bits_consumed(), 0);
        let x: Vec<f64> = (0..8).map(|i| i as f64).collect();
        let h = crate::hadamard::fwht(&x).unwrap();
        let r = spec.apply(&x, 8).unwrap();
        let sign = f64::from(spec.signs().signs()[0]);
        for (a, b) in r.iter().zip(&h) {
            assert!((a - sign * b).abs() < 1e-12);
        }
    }

    #[test]
    fn four_blocks_consume_eight_bits() {
        let mut seed = PublicSeed::from_u64(0xC3, 8);
        let spec = sample_brht(&mut seed, 8, 2).unwrap();
        assert_eq!(spec.num_blocks(), 4);
        assert_eq!(spec.bits_consumed(), 8);
        assert_eq!(seed.consumed(), 8);
    }

    #[test]
    fn bad_shapes() {
        let mut seed = PublicSeed::from_u64(0, 32);
        assert!(matches!(sample_brht(&mut seed, 8, 3), Err(Error::Dimension(_))));
        assert!(matches!(sample_brht(&mut seed, 8, 16), Err(Error::Dimension(_))));
        assert!(matches!(sample_brht(&mut seed, 12, 4), Err(Error::Dimension(_))));
    }

    #[test]
    fn zero_maps_to_zero() {
        let mut seed = PublicSeed::from_u64(0x1234, 16);
        let spec = sample_brht(&mut seed, 16, 4).unwrap();
        assert!(spec.apply(&[0.0; 16], 16).unwrap().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn length_mismatch() {
        let spec = BrhtSpec::with_signs(4, 4, RademacherBlockSigns::from_signs(vec![1]).unwrap())
            .unwrap();
        assert!(matches!(spec.apply(&[1.0; 3], 2), Err(Error::Dimension(_))));
        assert!(matches!(spec.apply(&[1.0; 4], 0), Err(Error::Dimension(_))));
        assert!(matches!(spec.apply(&[1.0; 4], 5), Err(Error::Dimension(_))));
    }

    #[test]
    fn matches_explicit_h4_times_signs() {
        let signs = RademacherBlockSigns::from_signs(vec![1, -1]).unwrap();
        let spec = BrhtSpec::with_signs(4, 2, signs).unwrap();
        let x = [0.3, -1.1, 2.0, 0.7];
        let h = crate::hadamard::hadamard_matrix(4).unwrap();
        let dx = [x[0], x[1], -x[2], -x[3]];
        let want: Vec<f64> = h
            .iter()
            .map(|row| row.iter().zip(&dx).map(|(a, b)| a * b).sum())
            .collect();
        let got = spec.apply(&x, 4).unwrap();
        for (a, b) in got.iter().zip(&want) {
            assert!((a - b).abs() < 1e-12);
        }
        let dense = spec.dense_matrix().unwrap();
        for (row, w) in dense.iter().zip(&want) {
            let v: f64 = row.iter().zip(&x).map(|(a, b)| a * b).sum();
            assert!((v - w).abs() < 1e-12);
        }
    }

    #[test]
    fn isometry_on_sampled_specs() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let k = rng.random_range(0..=10u32);
            let d = 1usize << k;
            let block_len = 1usize << rng.random_range(0..=k);
            let mut seed = PublicSeed::from_rng(&mut rng, 64);
            let spec = sample_brht(&mut seed, d, block_len).unwrap();
            let x: Vec<f64> = (0..d).map(|_| rng.random_range(-2.0..2.0)).collect();
            let y = spec.apply(&x, d).unwrap();
            assert!((norm(&y) / norm(&x) - 1.0).abs() <= 1e-9);
        }
    }

    #[test]
    fn probe_full_vector_and_zero() {
        let mut seed = PublicSeed::from_u64(0xBEEF, 16);
        let spec = sample_brht(&mut seed, 16, 4).unwrap();
        let mu: Vec<f64> = (0..16).map(|i| (i as f64).sin()).collect();
        let full = spec.compression_probe(&mu, 4).unwrap();
        let n2: f64 = mu.iter().map(|v| v * v).sum();
        assert!((full.z - n2).abs() <= 1e-9 * n2);
        assert!((full.threshold - n2 / 100.0).abs() < 1e-12);
        let zero = spec.compression_probe(&[0.0; 16], 1).unwrap();
        assert_eq!(zero.z, 0.0);
        assert!(matches!(spec.compression_probe(&mu, 0), Err(Error::Dimension(_))));
        assert!(matches!(spec.compression_probe(&mu, 5), Err(Error::Dimension(_))));
    }

    /// E[Z] = t ||mu||^2 / b and E[Z^2] <= 3 t^2 ||mu||^4 / b^2, exactly over all seeds.
    #[test]
    fn exhaustive_probe_moments_small() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (d, block_len) in [(8usize, 2usize), (8, 4), (16, 2), (8, 1)] {
            let b = d / block_len;
            let bits = crate::randomness::fourwise_bits(b);
            let mu: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
            let n2: f64 = mu.iter().map(|v| v * v).sum();
            for t in 1..=b {
                let (mut s1, mut s2) = (0.0, 0.0);
                let count = 1u64 << bits;
                for v in 0..count {
                    let mut seed = PublicSeed::from_u64(v, bits);
                    let spec = sample_brht(&mut seed, d, block_len).unwrap();
                    let z = spec.compression_probe(&mu, t).unwrap().z;
                    s1 += z;
                    s2 += z * z;
                }
                let (m1, m2) = (s1 / count as f64, s2 / count as f64);
                let want = t as f64 * n2 / b as f64;
                assert!((m1 - want).abs() <= 1e-9 * want, "d={d} L={block_len} t={t}");
                assert!(m2 <= 3.0 * want * want * (1.0 + 1e-9));
            }
        }
    }

    #[test]
    fn d8_l2_t1_mean_is_quarter_norm() {
        let mu = [0.9, -0.2, 0.4, 1.3, -0.7, 0.05, 0.6, -1.1];
        let n2: f64 = mu.iter().map(|v| v * v).sum();
        let mut total = 0.0;
        for v in 0..256u64 {
            let mut seed = PublicSeed::from_u64(v, 8);
            let spec = sample_brht(&mut seed, 8, 2).unwrap();
            total += spec.compression_probe(&mu, 1).unwrap().z;
        }
        let avg = total / 256.0;
        assert!((avg - n2 / 4.0).abs() <= 1e-9 * n2);
    }

    #[test]
    fn padding() {
        assert_eq!(pad_with_zeros(&[1.0, 2.0, 3.0], 4), vec![1.0, 2.0, 3.0, 0.0]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let p = pad_with_noise(&[1.0, 2.0, 3.0], 8, &mut rng);
        assert_eq!(p.len(), 8);
        assert_eq!(&p[..3], &[1.0, 2.0, 3.0]);
        assert!(p[3..].iter().all(|v| v.is_finite() && *v != 0.0));
    }
}

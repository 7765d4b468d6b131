//! Fock-space state vectors and their serialization.

use std::sync::Arc;

use ndarray::Array1;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::fock::basis::FockBasis;
use crate::linalg;

/// Order tag written into serialized vectors; bumped if the basis
/// enumeration ever changes.
pub const ORDER_TAG: u32 = 1;

#[derive(Debug, Clone)]
pub struct FockVector {
    pub basis: Arc<FockBasis>,
    pub amps: Array1<C64>,
}

impl FockVector {
    pub fn new(basis: Arc<FockBasis>, amps: Array1<C64>) -> Result<Self> {
        if amps.len() != basis.len() {
            return Err(Error::ShapeMismatch(format!(
                "amplitude vector has {} entries, basis has {}",
                amps.len(),
                basis.len()
            )));
        }
        Ok(FockVector { basis, amps })
    }

    pub fn vacuum(basis: Arc<FockBasis>) -> Self {
        let mut amps = Array1::zeros(basis.len());
        amps[basis.vacuum_index()] = C64::new(1.0, 0.0);
        FockVector { basis, amps }
    }

    pub fn norm(&self) -> f64 {
        linalg::norm(&self.amps)
    }

    pub fn normalized(mut self) -> Self {
        let n = self.norm();
        if n > 0.0 {
            self.amps.mapv_inplace(|z| z / n);
        }
        self
    }

    pub fn inner(&self, other: &FockVector) -> C64 {
        linalg::inner(&self.amps, &other.amps)
    }

    /// Probability weight in the shell with total particle number n.
    pub fn shell_weight(&self, n: usize) -> f64 {
        self.basis
            .shell_range(n)
            .map(|i| self.amps[i].norm_sqr())
            .sum()
    }

    /// <N> for the number operator.
    pub fn mean_particle_number(&self) -> f64 {
        (0..self.basis.len())
            .map(|i| self.basis.total(i) as f64 * self.amps[i].norm_sqr())
            .sum()
    }

    /// Header (M, nmax, order tag) followed by the amplitude array.
    pub fn write_binary(&self, path: &std::path::Path) -> Result<()> {
        let mut buf: Vec<u8> = Vec::new();
        buf.extend_from_slice(b"BGFV\x00\x01");
        buf.extend_from_slice(&(self.basis.n_modes() as u32).to_le_bytes());
        buf.extend_from_slice(&(self.basis.nmax() as u32).to_le_bytes());
        buf.extend_from_slice(&ORDER_TAG.to_le_bytes());
        buf.extend_from_slice(&(self.amps.len() as u64).to_le_bytes());
        for z in self.amps.iter() {
            buf.extend_from_slice(&z.re.to_le_bytes());
            buf.extend_from_slice(&z.im.to_le_bytes());
        }
        std::fs::write(path, buf).map_err(|e| Error::io(path.display().to_string(), e))
    }

    pub fn read_binary(path: &std::path::Path) -> Result<Self> {
        let data =
            std::fs::read(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        if data.len() < 26 || &data[0..6] != b"BGFV\x00\x01" {
            return Err(Error::Config("bad magic in Fock vector file".into()));
        }
        let u32_at = |o: usize| u32::from_le_bytes(data[o..o + 4].try_into().unwrap());
        let m = u32_at(6) as usize;
        let nmax = u32_at(10) as usize;
        let tag = u32_at(14);
        if tag != ORDER_TAG {
            return Err(Error::Config(format!("unsupported basis order tag {tag}")));
        }
        let len = u64::from_le_bytes(data[18..26].try_into().unwrap()) as usize;
        let basis = Arc::new(FockBasis::new(m, nmax)?);
        if basis.len() != len || data.len() != 26 + 16 * len {
            return Err(Error::Config("inconsistent Fock vector file".into()));
        }
        let mut amps = Array1::zeros(len);
        for i in 0..len {
            let o = 26 + 16 * i;
            let re = f64::from_le_bytes(data[o..o + 8].try_into().unwrap());
            let im = f64::from_le_bytes(data[o + 8..o + 16].try_into().unwrap());
            amps[i] = C64::new(re, im);
        }
        Ok(FockVector { basis, amps })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn serialization_round_trip() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(21);
        let basis = Arc::new(FockBasis::new(2, 3).unwrap());
        let amps = Array1::from_iter(
            (0..basis.len()).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))),
        );
        let v = FockVector::new(basis, amps).unwrap();
        let dir = std::env::temp_dir().join("bosegas_fock_io_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("state.bgfv");
        v.write_binary(&path).unwrap();
        let back = FockVector::read_binary(&path).unwrap();
        assert_eq!(v.amps, back.amps);
        assert_eq!(v.basis.n_modes(), back.basis.n_modes());
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn shell_weights_sum_to_norm() {
        let basis = Arc::new(FockBasis::new(2, 3).unwrap());
        let v = FockVector::vacuum(basis.clone());
        assert_eq!(v.shell_weight(0), 1.0);
        assert_eq!(v.mean_particle_number(), 0.0);
    }
}

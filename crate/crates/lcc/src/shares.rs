//! Per-worker share files.
//!
//! Layout, all little-endian `u64`: modulus `p`, entry count `M`, worker
//! index `j`, the worker's point `alpha_j`, then `M` residues in `[0, p)`.

use std::io::{self, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use lcc_core::field::{Fp, PrimeField};
use lcc_core::functions::Block;

use crate::CliError;

const HEADER_WORDS: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShareFile {
    pub modulus: u64,
    pub worker: u64,
    pub alpha: u64,
    pub values: Vec<u64>,
}

impl ShareFile {
    pub fn new(field: &PrimeField, worker: usize, alpha: Fp, share: &Block<Fp>) -> Self {
        Self {
            modulus: field.modulus(),
            worker: worker as u64,
            alpha: alpha.value(),
            values: share.iter().map(|v| v.value()).collect(),
        }
    }

    pub fn to_block(&self, field: &PrimeField) -> Result<Block<Fp>, CliError> {
        if field.modulus() != self.modulus {
            return Err(CliError::Format(format!("share is over F_{}, expected F_{}", self.modulus, field.modulus())));
        }
        Ok(self.values.iter().map(|&v| field.elem(v)).collect())
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> io::Result<()> {
        for word in [self.modulus, self.values.len() as u64, self.worker, self.alpha] {
            w.write_all(&word.to_le_bytes())?;
        }
        for v in &self.values {
            w.write_all(&v.to_le_bytes())?;
        }
        w.flush()
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self, CliError> {
        let mut word = [0u8; 8];
        let mut next = |r: &mut R| -> Result<u64, CliError> {
            r.read_exact(&mut word).map_err(|e| CliError::Format(format!("truncated share file: {e}")))?;
            Ok(u64::from_le_bytes(word))
        };
        let mut header = [0u64; HEADER_WORDS];
        for h in header.iter_mut() {
            *h = next(&mut r)?;
        }
        let [modulus, m, worker, alpha] = header;
        if modulus < 2 {
            return Err(CliError::Format(format!("bad modulus {modulus}")));
        }
        let values = (0..m).map(|_| next(&mut r)).collect::<Result<Vec<_>, _>>()?;
        if let Some(v) = values.iter().chain([&alpha]).find(|&&v| v >= modulus) {
            return Err(CliError::Format(format!("residue {v} is not below {modulus}")));
        }
        let mut rest = Vec::new();
        r.read_to_end(&mut rest).map_err(|e| CliError::Format(e.to_string()))?;
        if !rest.is_empty() {
            return Err(CliError::Format(format!("{} trailing bytes", rest.len())));
        }
        Ok(Self { modulus, worker, alpha, values })
    }

    pub fn save(&self, path: &Path) -> Result<(), CliError> {
        let file = std::fs::File::create(path).map_err(|e| CliError::Io(path.to_path_buf(), e))?;
        self.write_to(io::BufWriter::new(file)).map_err(|e| CliError::Io(path.to_path_buf(), e))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let file = std::fs::File::open(path).map_err(|e| CliError::Io(path.to_path_buf(), e))?;
        Self::read_from(io::BufReader::new(file))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use lcc_core::field::Field;

    #[test]
    fn byte_layout() {
        let s = ShareFile { modulus: 11, worker: 2, alpha: 6, values: vec![3, 10] };
        let mut buf = Vec::new();
        s.write_to(&mut buf).unwrap();
        assert_eq!(buf.len(), 8 * 6);
        assert_eq!(&buf[..8], &11u64.to_le_bytes());
        assert_eq!(&buf[8..16], &2u64.to_le_bytes());
        assert_eq!(&buf[16..24], &2u64.to_le_bytes());
        assert_eq!(&buf[24..32], &6u64.to_le_bytes());
        assert_eq!(&buf[40..], &10u64.to_le_bytes());
        assert_eq!(ShareFile::read_from(&buf[..]).unwrap(), s);
    }

    #[test]
    fn rejects_damage() {
        let s = ShareFile { modulus: 11, worker: 0, alpha: 1, values: vec![3] };
        let mut buf = Vec::new();
        s.write_to(&mut buf).unwrap();
        assert!(ShareFile::read_from(&buf[..buf.len() - 1]).is_err());
        let mut long = buf.clone();
        long.push(0);
        assert!(ShareFile::read_from(&long[..]).is_err());
        let mut big = buf.clone();
        big[32] = 11;
        assert!(ShareFile::read_from(&big[..]).is_err());
    }

    #[test]
    fn block_round_trip() {
        let f = PrimeField::new(127).unwrap();
        let share: Block<Fp> = [5u64, 126, 0].iter().map(|&v| f.from_u64(v)).collect();
        let file = ShareFile::new(&f, 4, f.from_u64(9), &share);
        assert_eq!(file.to_block(&f).unwrap(), share);
        assert!(file.to_block(&PrimeField::new(131).unwrap()).is_err());
    }
}

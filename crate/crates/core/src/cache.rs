//! Line-oriented cache of constructed generating vectors.
//!
//! Rank-1 records read `kind N d alpha gamma_spec z1 ... zd`; polynomial
//! records read `poly b m p_coeffs alpha gamma_spec q1 ... qd` with
//! comma-separated coefficient lists, lowest degree first.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::field_poly::FieldPoly;
use crate::lattice::Rank1Lattice;
use crate::poly_lattice::PolyLattice;
use crate::weights::ProductWeights;

/// Key for a rank-1 construction: criterion kind (`R`, `S`) plus parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorKey {
    pub kind: String,
    pub n: u64,
    pub d: usize,
    pub weights: ProductWeights,
}

impl VectorKey {
    fn prefix(&self) -> String {
        format!("{} {} {} {} {}", self.kind, self.n, self.d, self.weights.alpha(), self.weights.rule())
    }
}

/// Key for a polynomial construction; `modulus` is `None` for the default.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyKey {
    pub b: u32,
    pub m: u32,
    pub modulus: FieldPoly,
    pub d: usize,
    pub weights: ProductWeights,
}

impl PolyKey {
    fn prefix(&self) -> String {
        format!(
            "poly {} {} {} {} {}",
            self.b,
            self.m,
            self.modulus,
            self.weights.alpha(),
            self.weights.rule()
        )
    }
}

pub struct VectorCache {
    path: PathBuf,
}

impl VectorCache {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        VectorCache { path: path.into() }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    fn lines(&self) -> Result<Vec<String>> {
        match fs::read_to_string(&self.path) {
            Ok(text) => Ok(text.lines().map(str::to_string).collect()),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(Vec::new()),
            Err(e) => Err(Error::Parse(format!("cannot read cache {}: {e}", self.path.display()))),
        }
    }

    fn append(&self, line: &str) -> Result<()> {
        let mut file = fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(&self.path)
            .map_err(|e| Error::Parse(format!("cannot write cache {}: {e}", self.path.display())))?;
        writeln!(file, "{line}").map_err(|e| Error::Parse(format!("cache write failed: {e}")))
    }

    /// Record whose prefix matches and which carries exactly `d` entries.
    fn find(&self, prefix: &str, d: usize) -> Result<Option<Vec<String>>> {
        let want = prefix.split_whitespace().count();
        for line in self.lines()? {
            let tokens: Vec<&str> = line.split_whitespace().collect();
            if tokens.len() == want + d && tokens[..want].join(" ") == prefix {
                return Ok(Some(tokens[want..].iter().map(|s| s.to_string()).collect()));
            }
        }
        Ok(None)
    }

    pub fn lookup(&self, key: &VectorKey) -> Result<Option<Rank1Lattice>> {
        match self.find(&key.prefix(), key.d)? {
            None => Ok(None),
            Some(entries) => {
                let z = entries
                    .iter()
                    .map(|t| t.parse::<u64>().map_err(|_| Error::Parse(format!("bad cache entry `{t}`"))))
                    .collect::<Result<Vec<_>>>()?;
                Rank1Lattice::new(key.n, z).map(Some)
            }
        }
    }

    pub fn store(&self, key: &VectorKey, lattice: &Rank1Lattice) -> Result<()> {
        if self.find(&key.prefix(), key.d)?.is_some() {
            return Ok(());
        }
        let zs: Vec<String> = lattice.z().iter().map(|z| z.to_string()).collect();
        self.append(&format!("{} {}", key.prefix(), zs.join(" ")))
    }

    pub fn lookup_poly(&self, key: &PolyKey) -> Result<Option<PolyLattice>> {
        match self.find(&key.prefix(), key.d)? {
            None => Ok(None),
            Some(entries) => {
                let q = entries.iter().map(|t| FieldPoly::parse(t, key.b)).collect::<Result<Vec<_>>>()?;
                PolyLattice::new(key.modulus.clone(), q).map(Some)
            }
        }
    }

    pub fn store_poly(&self, key: &PolyKey, lattice: &PolyLattice) -> Result<()> {
        if self.find(&key.prefix(), key.d)?.is_some() {
            return Ok(());
        }
        let qs: Vec<String> = lattice.generators().iter().map(|q| q.to_string()).collect();
        self.append(&format!("{} {}", key.prefix(), qs.join(" ")))
    }
}

/// The record line a rank-1 construction is cached under.
pub fn vector_record(key: &VectorKey, lattice: &Rank1Lattice) -> String {
    let zs: Vec<String> = lattice.z().iter().map(|z| z.to_string()).collect();
    format!("{} {}", key.prefix(), zs.join(" "))
}

pub fn poly_record(key: &PolyKey, lattice: &PolyLattice) -> String {
    let qs: Vec<String> = lattice.generators().iter().map(|q| q.to_string()).collect();
    format!("{} {}", key.prefix(), qs.join(" "))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::GammaRule;

    fn temp_path(name: &str) -> PathBuf {
        let dir = std::env::temp_dir().join(format!("qmc-cache-test-{}-{name}", std::process::id()));
        let _ = fs::remove_file(&dir);
        dir
    }

    #[test]
    fn rank1_round_trip() {
        let path = temp_path("rank1");
        let cache = VectorCache::new(&path);
        let w = ProductWeights::new(2.0, GammaRule::Power { scale: 1.0, exponent: 2.0 }).unwrap();
        let key = VectorKey { kind: "R".into(), n: 127, d: 3, weights: w.clone() };
        assert_eq!(cache.lookup(&key).unwrap(), None);
        let l = Rank1Lattice::new(127, vec![1, 47, 83]).unwrap();
        cache.store(&key, &l).unwrap();
        cache.store(&key, &l).unwrap();
        assert_eq!(cache.lookup(&key).unwrap(), Some(l.clone()));
        assert_eq!(fs::read_to_string(&path).unwrap(), "R 127 3 2 pow:1:2 1 47 83\n");
        let other = VectorKey { kind: "S".into(), n: 127, d: 3, weights: w };
        assert_eq!(cache.lookup(&other).unwrap(), None);
        let _ = fs::remove_file(&path);
    }

    #[test]
    fn poly_round_trip() {
        let path = temp_path("poly");
        let cache = VectorCache::new(&path);
        let w = ProductWeights::new(1.0, GammaRule::Constant(1.0)).unwrap();
        let p = FieldPoly::from_int(11, 2);
        let key = PolyKey { b: 2, m: 3, modulus: p.clone(), d: 2, weights: w };
        let l = PolyLattice::new(p, vec![FieldPoly::one(2), FieldPoly::from_int(5, 2)]).unwrap();
        cache.store_poly(&key, &l).unwrap();
        assert_eq!(cache.lookup_poly(&key).unwrap(), Some(l));
        assert_eq!(fs::read_to_string(&path).unwrap(), "poly 2 3 1,1,0,1 1 const:1 1 1,0,1\n");
        let _ = fs::remove_file(&path);
    }
}

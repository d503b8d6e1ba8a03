use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::generators;
use crate::io;
use crate::matrix::SymMatrix;
use crate::rng::rng_from_seed;
use crate::store::SparseSymStore;

/// A matrix named by generator and parameters, or a file on disk.
///
/// Text form: `name:key=value,...` (for example `block:n=2000,k=1000`,
/// `er:n=1000,p=0.1,seed=3`) or `file:path`. Files ending in `.mtx` are read
/// as Matrix Market, anything else as an edge list.
#[derive(Debug, Clone, PartialEq)]
pub enum MatrixSpec {
    Block { n: usize, k: usize },
    Identity { n: usize },
    ErdosRenyi { n: usize, p: f64, seed: u64 },
    PowerLaw { n: usize, exponent: f64, min_degree: usize, seed: u64 },
    Tanh { n: usize, seed: u64 },
    ThinPlate { n: usize, seed: u64 },
    Tridiagonal { n: usize },
    Tensor { inv_eps_sq: usize, block: usize, seed: u64 },
    File(PathBuf),
}

/// Both representations of a materialized matrix.
#[derive(Debug, Clone)]
pub struct TestMatrix {
    pub dense: SymMatrix,
    pub store: SparseSymStore,
}

impl TestMatrix {
    pub fn from_dense(dense: SymMatrix) -> Self {
        let store = SparseSymStore::from_dense(&dense);
        TestMatrix { dense, store }
    }

    pub fn from_store(store: SparseSymStore) -> Self {
        let dense = store.to_dense();
        TestMatrix { dense, store }
    }

    pub fn n(&self) -> usize {
        self.dense.n()
    }
}

struct Params<'a> {
    name: &'a str,
    map: BTreeMap<&'a str, &'a str>,
}

impl<'a> Params<'a> {
    fn parse(name: &'a str, body: &'a str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for kv in body.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::config("matrix", format!("expected key=value, got `{kv}`")))?;
            if map.insert(k.trim(), v.trim()).is_some() {
                return Err(Error::config("matrix", format!("parameter `{k}` given twice")));
            }
        }
        Ok(Params { name, map })
    }

    fn take<T: std::str::FromStr>(&mut self, key: &str, default: Option<T>) -> Result<T> {
        match self.map.remove(key) {
            Some(raw) => raw.parse().map_err(|_| {
                Error::config("matrix", format!("{}: invalid value `{raw}` for `{key}`", self.name))
            }),
            None => default.ok_or_else(|| {
                Error::config("matrix", format!("{}: missing parameter `{key}`", self.name))
            }),
        }
    }

    fn finish(self) -> Result<()> {
        match self.map.keys().next() {
            Some(k) => Err(Error::config(
                "matrix",
                format!("{}: unknown parameter `{k}`", self.name),
            )),
            None => Ok(()),
        }
    }
}

impl MatrixSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        let (name, body) = text.split_once(':').unwrap_or((text, ""));
        if name == "file" {
            if body.is_empty() {
                return Err(Error::config("matrix", "file: needs a path"));
            }
            return Ok(MatrixSpec::File(PathBuf::from(body)));
        }
        let mut p = Params::parse(name, body)?;
        let spec = match name {
            "block" => MatrixSpec::Block {
                n: p.take("n", None)?,
                k: p.take("k", None)?,
            },
            "identity" => MatrixSpec::Identity { n: p.take("n", None)? },
            "er" | "erdos_renyi" => MatrixSpec::ErdosRenyi {
                n: p.take("n", None)?,
                p: p.take("p", None)?,
                seed: p.take("seed", Some(0))?,
            },
            "powerlaw" => MatrixSpec::PowerLaw {
                n: p.take("n", None)?,
                exponent: p.take("exponent", Some(2.5))?,
                min_degree: p.take("dmin", Some(2))?,
                seed: p.take("seed", Some(0))?,
            },
            "tanh" => MatrixSpec::Tanh {
                n: p.take("n", None)?,
                seed: p.take("seed", Some(0))?,
            },
            "tps" | "thin_plate" => MatrixSpec::ThinPlate {
                n: p.take("n", None)?,
                seed: p.take("seed", Some(0))?,
            },
            "tridiag" => MatrixSpec::Tridiagonal { n: p.take("n", None)? },
            "tensor" => MatrixSpec::Tensor {
                inv_eps_sq: p.take("m", None)?,
                block: p.take("block", None)?,
                seed: p.take("seed", Some(0))?,
            },
            other => {
                return Err(Error::config("matrix", format!("unknown matrix family `{other}`")))
            }
        };
        p.finish()?;
        Ok(spec)
    }

    pub fn materialize(&self) -> Result<TestMatrix> {
        Ok(match self {
            MatrixSpec::Block { n, k } => TestMatrix::from_dense(generators::block_matrix(*n, *k)?),
            MatrixSpec::Identity { n } => TestMatrix::from_dense(SymMatrix::identity(*n)),
            MatrixSpec::ErdosRenyi { n, p, seed } => {
                TestMatrix::from_store(generators::erdos_renyi(*n, *p, &mut rng_from_seed(*seed))?)
            }
            MatrixSpec::PowerLaw {
                n,
                exponent,
                min_degree,
                seed,
            } => TestMatrix::from_store(generators::power_law_graph(
                *n,
                *exponent,
                *min_degree,
                &mut rng_from_seed(*seed),
            )?),
            MatrixSpec::Tanh { n, seed } => {
                let pc = generators::synthetic_point_cloud(*n, &mut rng_from_seed(*seed))?;
                TestMatrix::from_dense(generators::tanh_similarity(&pc)?)
            }
            MatrixSpec::ThinPlate { n, seed } => {
                let pc = generators::synthetic_point_cloud(*n, &mut rng_from_seed(*seed))?;
                TestMatrix::from_dense(generators::thin_plate_spline(&pc)?)
            }
            MatrixSpec::Tridiagonal { n } => TestMatrix::from_store(generators::tridiagonal_ones(*n)?),
            MatrixSpec::Tensor {
                inv_eps_sq,
                block,
                seed,
            } => TestMatrix::from_dense(generators::tensor_hard_instance(
                *inv_eps_sq,
                *block,
                &mut rng_from_seed(*seed),
            )?),
            MatrixSpec::File(path) => {
                let store = if path.extension().is_some_and(|e| e == "mtx") {
                    io::load_matrix_market(path)?
                } else {
                    io::load_edge_list(path)?
                };
                TestMatrix::from_store(store)
            }
        })
    }
}

impl fmt::Display for MatrixSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatrixSpec::Block { n, k } => write!(f, "block:n={n},k={k}"),
            MatrixSpec::Identity { n } => write!(f, "identity:n={n}"),
            MatrixSpec::ErdosRenyi { n, p, seed } => write!(f, "er:n={n},p={p},seed={seed}"),
            MatrixSpec::PowerLaw {
                n,
                exponent,
                min_degree,
                seed,
            } => write!(f, "powerlaw:n={n},exponent={exponent},dmin={min_degree},seed={seed}"),
            MatrixSpec::Tanh { n, seed } => write!(f, "tanh:n={n},seed={seed}"),
            MatrixSpec::ThinPlate { n, seed } => write!(f, "tps:n={n},seed={seed}"),
            MatrixSpec::Tridiagonal { n } => write!(f, "tridiag:n={n}"),
            MatrixSpec::Tensor {
                inv_eps_sq,
                block,
                seed,
            } => write!(f, "tensor:m={inv_eps_sq},block={block},seed={seed}"),
            MatrixSpec::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_displays() {
        for text in [
            "block:n=4,k=2",
            "identity:n=3",
            "er:n=10,p=0.1,seed=4",
            "powerlaw:n=50,exponent=2.5,dmin=2,seed=1",
            "tanh:n=5,seed=0",
            "tps:n=5,seed=0",
            "tridiag:n=6",
            "tensor:m=2,block=3,seed=0",
            "file:/tmp/x.mtx",
        ] {
            let spec = MatrixSpec::parse(text).unwrap();
            assert_eq!(spec.to_string(), text);
            assert_eq!(MatrixSpec::parse(&spec.to_string()).unwrap(), spec);
        }
    }

    #[test]
    fn rejects_bad_specs() {
        for text in ["block:n=4", "nope:n=1", "block:n=4,k=2,z=1", "block:n=x,k=2", "file:"] {
            assert!(matches!(MatrixSpec::parse(text), Err(Error::Config { .. })), "{text}");
        }
    }

    #[test]
    fn materializes_consistent_representations() {
        let m = MatrixSpec::parse("er:n=40,p=0.2,seed=1").unwrap().materialize().unwrap();
        assert_eq!(m.dense, m.store.to_dense());
        let b = MatrixSpec::parse("block:n=6,k=3").unwrap().materialize().unwrap();
        assert_eq!(b.store.total_nnz(), 9);
    }
}

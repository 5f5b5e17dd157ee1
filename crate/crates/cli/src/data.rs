//! Boundary data and mesh selectors given on the command line.

use std::collections::HashMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use cmclab_core::hyperbolic::{cayley, Chart};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// `const:c`, `fourier:k,eps` (eps cos k theta), `file:path` (values of a
/// mesh-field file), `profile` (the invariant entire graph of the model) or
/// `marker:m=v,...` (a constant per boundary marker).
#[derive(Debug, Clone, PartialEq)]
pub enum DataSpec {
    Const(f64),
    Fourier { k: u32, eps: f64 },
    File(PathBuf),
    Profile,
    Markers(Vec<(u32, f64)>),
}

impl FromStr for DataSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<DataSpec, String> {
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| format!("`{t}` is not a number"))
        };
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        match kind {
            "const" => Ok(DataSpec::Const(num(rest)?)),
            "fourier" => {
                let (k, eps) = rest.split_once(',').ok_or("expected fourier:k,eps")?;
                let k = k.trim().parse().map_err(|_| format!("`{k}` is not a nonnegative integer"))?;
                Ok(DataSpec::Fourier { k, eps: num(eps)? })
            }
            "file" if !rest.is_empty() => Ok(DataSpec::File(PathBuf::from(rest))),
            "profile" if rest.is_empty() => Ok(DataSpec::Profile),
            "marker" => {
                let pairs = rest
                    .split(',')
                    .map(|p| {
                        let (m, v) = p.split_once('=').ok_or_else(|| format!("expected marker=value, got `{p}`"))?;
                        let m = m.trim().parse::<u32>().map_err(|_| format!("`{m}` is not a marker"))?;
                        Ok((m, num(v)?))
                    })
                    .collect::<Result<Vec<_>, String>>()?;
                Ok(DataSpec::Markers(pairs))
            }
            _ => Err(format!("unknown data `{s}`; expected const:c, fourier:k,eps, file:path, profile or marker:m=v,...")),
        }
    }
}

impl fmt::Display for DataSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DataSpec::Const(c) => write!(f, "const:{c}"),
            DataSpec::Fourier { k, eps } => write!(f, "fourier:{k},{eps}"),
            DataSpec::File(p) => write!(f, "file:{}", p.display()),
            DataSpec::Profile => write!(f, "profile"),
            DataSpec::Markers(pairs) => {
                let body: Vec<String> = pairs.iter().map(|(m, v)| format!("{m}={v}")).collect();
                write!(f, "marker:{}", body.join(","))
            }
        }
    }
}

impl Serialize for DataSpec {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for DataSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

/// Polar angle of a chart point seen in the disk chart.
pub fn disk_angle(chart: Chart, x: f64, y: f64) -> f64 {
    let w = match chart {
        Chart::Disk => C64::new(x, y),
        Chart::HalfPlane => cayley(C64::new(x, y)),
    };
    w.im.atan2(w.re)
}

/// Values attached to exact node positions.
pub struct NodeTable(HashMap<(u64, u64), f64>);

impl NodeTable {
    pub fn new(entries: impl IntoIterator<Item = ([f64; 2], f64)>) -> NodeTable {
        NodeTable(
            entries
                .into_iter()
                .map(|(p, v)| ((p[0].to_bits(), p[1].to_bits()), v))
                .collect(),
        )
    }

    pub fn get(&self, x: f64, y: f64) -> f64 {
        self.0
            .get(&(x.to_bits(), y.to_bits()))
            .copied()
            .unwrap_or(f64::NAN)
    }
}

//! Field specifications and their text form.
//!
//! Grammar: `kind[:key=value[,key=value]*]`. Positions and lengths are in
//! units of the box length `L`; wavenumbers are integers per axis.
//!
//! | kind      | keys (defaults)                                        |
//! |-----------|--------------------------------------------------------|
//! | `bump`    | `cx cy cz` (0.5), `w` (0.025), `a` (1)                 |
//! | `mode`    | `kx ky kz` (1 0 0), `a` (1), `phase` (0)               |
//! | `ball`    | `cx cy cz` (0.5), `r` (0.0625), `h` (1)                |
//! | `tg`      | `a` (1)                                                |
//! | `tg2`     | `a` (1)                                                |
//! | `random`  | `seed` (1), `decay` (2)                                |
//! | `divfree` | `seed` (1), `decay` (2)                                |
//! | `vortex`  | `cx cy cz` (0.5), `w` (0.025), `a` (1)                 |

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum FieldSpec {
    /// `a·exp(-|x-c|²/(2w²))`.
    GaussianBump { center: [f64; 3], width: f64, amplitude: f64 },
    /// `a·cos(2π k·x/L + phase)`.
    SingleMode { k: [i64; 3], amplitude: f64, phase: f64 },
    /// `h·1_{|x-c|<r}` on nodes.
    IndicatorBall { center: [f64; 3], radius: f64, height: f64 },
    /// Taylor–Green vortex `a(sin x cos y [cos z], -cos x sin y [cos z], 0)`
    /// with `x = 2πx₁/L` etc.
    TaylorGreen { amplitude: f64 },
    /// Taylor–Green at wavenumbers 1 and 2, `a(TG₁ + TG₂/2)`; unlike a single
    /// Taylor–Green cell its nonlinearity is not a pure gradient.
    TaylorGreen2 { amplitude: f64 },
    /// Mean-zero band-limited random scalar field, RMS one.
    RandomSmooth { seed: u64, decay: f64 },
    /// Leray projection of a random vector field.
    RandomDivFree { seed: u64, decay: f64 },
    /// Velocity of a Gaussian stream function, Leray-projected.
    VortexBump { center: [f64; 3], width: f64, amplitude: f64 },
}

impl FieldSpec {
    pub fn is_vector(&self) -> bool {
        matches!(
            self,
            FieldSpec::TaylorGreen { .. }
                | FieldSpec::TaylorGreen2 { .. }
                | FieldSpec::RandomDivFree { .. }
                | FieldSpec::VortexBump { .. }
        )
    }

    pub fn with_amplitude(&self, a: f64) -> FieldSpec {
        let mut s = self.clone();
        match &mut s {
            FieldSpec::GaussianBump { amplitude, .. }
            | FieldSpec::SingleMode { amplitude, .. }
            | FieldSpec::TaylorGreen { amplitude }
            | FieldSpec::TaylorGreen2 { amplitude }
            | FieldSpec::VortexBump { amplitude, .. } => *amplitude = a,
            FieldSpec::IndicatorBall { height, .. } => *height = a,
            FieldSpec::RandomSmooth { .. } | FieldSpec::RandomDivFree { .. } => {}
        }
        s
    }
}

struct Keys {
    map: BTreeMap<String, String>,
    kind: String,
}

impl Keys {
    fn parse(s: &str) -> Result<Self> {
        let (kind, rest) = match s.split_once(':') {
            Some((k, r)) => (k.trim(), r),
            None => (s.trim(), ""),
        };
        let mut map = BTreeMap::new();
        for part in rest.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got {part:?}")))?;
            if map.insert(k.trim().to_string(), v.trim().to_string()).is_some() {
                return Err(Error::Parse(format!("duplicate key {k:?}")));
            }
        }
        Ok(Self { map, kind: kind.to_string() })
    }

    fn take<T: FromStr>(&mut self, key: &str, default: T) -> Result<T> {
        match self.map.remove(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| Error::Parse(format!("bad value {v:?} for key {key:?} of {:?}", self.kind))),
        }
    }

    fn center(&mut self) -> Result<[f64; 3]> {
        Ok([self.take("cx", 0.5)?, self.take("cy", 0.5)?, self.take("cz", 0.5)?])
    }

    fn finish(self) -> Result<()> {
        match self.map.keys().next() {
            Some(k) => Err(Error::Parse(format!("unknown key {k:?} for {:?}", self.kind))),
            None => Ok(()),
        }
    }
}

impl FromStr for FieldSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut keys = Keys::parse(s)?;
        let spec = match keys.kind.as_str() {
            "bump" => FieldSpec::GaussianBump {
                center: keys.center()?,
                width: keys.take("w", 0.025)?,
                amplitude: keys.take("a", 1.0)?,
            },
            "mode" => FieldSpec::SingleMode {
                k: [keys.take("kx", 1)?, keys.take("ky", 0)?, keys.take("kz", 0)?],
                amplitude: keys.take("a", 1.0)?,
                phase: keys.take("phase", 0.0)?,
            },
            "ball" => FieldSpec::IndicatorBall {
                center: keys.center()?,
                radius: keys.take("r", 0.0625)?,
                height: keys.take("h", 1.0)?,
            },
            "tg" => FieldSpec::TaylorGreen { amplitude: keys.take("a", 1.0)? },
            "tg2" => FieldSpec::TaylorGreen2 { amplitude: keys.take("a", 1.0)? },
            "random" => FieldSpec::RandomSmooth { seed: keys.take("seed", 1)?, decay: keys.take("decay", 2.0)? },
            "divfree" => FieldSpec::RandomDivFree { seed: keys.take("seed", 1)?, decay: keys.take("decay", 2.0)? },
            "vortex" => FieldSpec::VortexBump {
                center: keys.center()?,
                width: keys.take("w", 0.025)?,
                amplitude: keys.take("a", 1.0)?,
            },
            other => return Err(Error::Parse(format!("unknown field kind {other:?}"))),
        };
        keys.finish()?;
        Ok(spec)
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::GaussianBump { center: c, width, amplitude } => {
                write!(f, "bump:cx={},cy={},cz={},w={width},a={amplitude}", c[0], c[1], c[2])
            }
            FieldSpec::SingleMode { k, amplitude, phase } => {
                write!(f, "mode:kx={},ky={},kz={},a={amplitude},phase={phase}", k[0], k[1], k[2])
            }
            FieldSpec::IndicatorBall { center: c, radius, height } => {
                write!(f, "ball:cx={},cy={},cz={},r={radius},h={height}", c[0], c[1], c[2])
            }
            FieldSpec::TaylorGreen { amplitude } => write!(f, "tg:a={amplitude}"),
            FieldSpec::TaylorGreen2 { amplitude } => write!(f, "tg2:a={amplitude}"),
            FieldSpec::RandomSmooth { seed, decay } => write!(f, "random:seed={seed},decay={decay}"),
            FieldSpec::RandomDivFree { seed, decay } => write!(f, "divfree:seed={seed},decay={decay}"),
            FieldSpec::VortexBump { center: c, width, amplitude } => {
                write!(f, "vortex:cx={},cy={},cz={},w={width},a={amplitude}", c[0], c[1], c[2])
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_defaults() {
        let s: FieldSpec = "bump:cx=0.53125,w=0.015625".parse().unwrap();
        assert_eq!(
            s,
            FieldSpec::GaussianBump { center: [0.53125, 0.5, 0.5], width: 0.015625, amplitude: 1.0 }
        );
        assert_eq!(s.to_string().parse::<FieldSpec>().unwrap(), s);
        let m: FieldSpec = "mode:kx=2,ky=1,phase=0.3".parse().unwrap();
        assert_eq!(m.to_string().parse::<FieldSpec>().unwrap(), m);
        assert_eq!("tg".parse::<FieldSpec>().unwrap(), FieldSpec::TaylorGreen { amplitude: 1.0 });
    }

    #[test]
    fn rejects_garbage() {
        assert!("blob".parse::<FieldSpec>().is_err());
        assert!("bump:q=1".parse::<FieldSpec>().is_err());
        assert!("bump:w=abc".parse::<FieldSpec>().is_err());
        assert!("bump:w=1,w=2".parse::<FieldSpec>().is_err());
        assert!("random:seed".parse::<FieldSpec>().is_err());
    }
}

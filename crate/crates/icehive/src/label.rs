//! Structured vertex labels with a reversible text form.
//!
//! | variant   | text          |
//! |-----------|---------------|
//! | `Int`     | `7`           |
//! | `Hive`    | `(1,1,3)`     |
//! | `Points`  | `{1:2,4:1}`   |
//! | `Name`    | anything else |

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    Int(i64),
    Hive([u32; 3]),
    /// Sparse barycentric coordinates keyed by marked point.
    Points(BTreeMap<u32, u32>),
    Name(String),
}

impl Label {
    pub fn hive(i: u32, j: u32, k: u32) -> Self {
        Label::Hive([i, j, k])
    }

    /// Builds a point label, dropping zero coordinates.
    pub fn points<I: IntoIterator<Item = (u32, u32)>>(it: I) -> Self {
        Label::Points(it.into_iter().filter(|&(_, c)| c > 0).collect())
    }

    pub fn as_hive(&self) -> Option<[u32; 3]> {
        match self {
            Label::Hive(c) => Some(*c),
            _ => None,
        }
    }

    pub fn as_points(&self) -> Option<&BTreeMap<u32, u32>> {
        match self {
            Label::Points(p) => Some(p),
            _ => None,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Int(n) => write!(f, "{n}"),
            Label::Hive([i, j, k]) => write!(f, "({i},{j},{k})"),
            Label::Points(p) => {
                let parts: Vec<String> = p.iter().map(|(a, c)| format!("{a}:{c}")).collect();
                write!(f, "{{{}}}", parts.join(","))
            }
            Label::Name(s) => write!(f, "{s}"),
        }
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let bad = || Error::Parse(format!("bad label {s:?}"));
        if let Ok(n) = s.parse::<i64>() {
            return Ok(Label::Int(n));
        }
        if let Some(inner) = s.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
            let v: Vec<u32> = inner.split(',').map(|x| x.trim().parse()).collect::<Result<_, _>>().map_err(|_| bad())?;
            let c: [u32; 3] = v.try_into().map_err(|_| bad())?;
            return Ok(Label::Hive(c));
        }
        if let Some(inner) = s.strip_prefix('{').and_then(|r| r.strip_suffix('}')) {
            let mut map = BTreeMap::new();
            for part in inner.split(',').filter(|p| !p.is_empty()) {
                let (a, c) = part.split_once(':').ok_or_else(bad)?;
                map.insert(a.trim().parse().map_err(|_| bad())?, c.trim().parse().map_err(|_| bad())?);
            }
            return Ok(Label::Points(map));
        }
        Ok(Label::Name(s.to_string()))
    }
}

impl Serialize for Label {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Label {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

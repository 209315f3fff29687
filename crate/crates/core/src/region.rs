use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// Prefix marking a US state in artifact-owned files (`US:New York`).
pub const US_PREFIX: &str = "US:";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RegionKind {
    Country,
    UsState,
}

/// A country or US state. Textual form is the bare name for countries and
/// `US:<name>` for states, which keeps e.g. the state of Georgia distinct
/// from the country.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RegionId {
    pub kind: RegionKind,
    pub name: String,
}

impl RegionId {
    pub fn new(name: impl Into<String>, kind: RegionKind) -> Result<Self, Error> {
        let name = name.into().trim().to_string();
        if name.is_empty() {
            return Err(Error::InvalidParameter("empty region name".into()));
        }
        Ok(RegionId { kind, name })
    }

    pub fn country(name: &str) -> Self {
        RegionId::new(name, RegionKind::Country).expect("non-empty country name")
    }

    pub fn us_state(name: &str) -> Self {
        RegionId::new(name, RegionKind::UsState).expect("non-empty state name")
    }

    /// File-name safe form, e.g. `us-new-york`.
    pub fn slug(&self) -> String {
        let mut out = String::new();
        if self.kind == RegionKind::UsState {
            out.push_str("us-");
        }
        let mut dash = false;
        for c in self.name.chars() {
            if c.is_ascii_alphanumeric() {
                out.push(c.to_ascii_lowercase());
                dash = false;
            } else if !dash && !out.is_empty() && !out.ends_with('-') {
                out.push('-');
                dash = true;
            }
        }
        out.trim_end_matches('-').to_string()
    }
}

impl fmt::Display for RegionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            RegionKind::Country => f.write_str(&self.name),
            RegionKind::UsState => write!(f, "{US_PREFIX}{}", self.name),
        }
    }
}

impl FromStr for RegionId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        match s.strip_prefix(US_PREFIX) {
            Some(rest) => RegionId::new(rest, RegionKind::UsState),
            None => RegionId::new(s, RegionKind::Country),
        }
    }
}

impl Serialize for RegionId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for RegionId {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum InterventionKind {
    GatheringRestriction,
    SocialDistancing,
    SchoolClosure,
    Lockdown,
    MaskWearing,
}

impl InterventionKind {
    pub const ALL: [InterventionKind; 5] = [
        InterventionKind::GatheringRestriction,
        InterventionKind::SocialDistancing,
        InterventionKind::SchoolClosure,
        InterventionKind::Lockdown,
        InterventionKind::MaskWearing,
    ];

    /// The four kinds used as regression features; mask wearing is excluded.
    pub const REGRESSORS: [InterventionKind; 4] = [
        InterventionKind::GatheringRestriction,
        InterventionKind::SocialDistancing,
        InterventionKind::SchoolClosure,
        InterventionKind::Lockdown,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            InterventionKind::GatheringRestriction => "gathering_restriction",
            InterventionKind::SocialDistancing => "social_distancing",
            InterventionKind::SchoolClosure => "school_closure",
            InterventionKind::Lockdown => "lockdown",
            InterventionKind::MaskWearing => "mask_wearing",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            InterventionKind::GatheringRestriction => "Gathering restriction",
            InterventionKind::SocialDistancing => "Social distancing",
            InterventionKind::SchoolClosure => "School closure",
            InterventionKind::Lockdown => "Lockdown",
            InterventionKind::MaskWearing => "Mask wearing",
        }
    }
}

impl fmt::Display for InterventionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for InterventionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.trim().to_ascii_lowercase();
        InterventionKind::ALL
            .into_iter()
            .find(|k| k.as_str() == norm)
            .ok_or_else(|| Error::UnknownKind(s.to_string()))
    }
}

impl Serialize for InterventionKind {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for InterventionKind {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

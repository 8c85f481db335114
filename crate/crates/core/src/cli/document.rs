//! JSON specification documents read by the command-line tool.
//!
//! Every document is an object with a `kind` tag plus optional `name` and
//! `description`. Any number may be written as a JSON number or as a string
//! holding a decimal (`"0.95"`, `"-1e6"`) or a fraction (`"5/3"`).
//!
//! ```json
//! {"kind": "position", "outcomes": [[2000000, 0.95], [-1000000, 0.05]]}
//! {"kind": "loss_distribution", "atoms": [[-1, 0.95]], "segments": [[0, 5, 0.01, 0.01]]}
//! {"kind": "tail_spec", "c": 0, "d": 5, "level": 0.95, "inner": [[0.99, 4]]}
//! {"kind": "tail_spec", "c": 0, "d": 10, "level": 0.95, "shape": "triangular", "apex": 0}
//! {"kind": "exposures", "exposures": [{"category": "private_sector", "amount": 100}]}
//! {"kind": "capital", "tier1": 8, "tier2": 0, "tier3": 2, "credit_risk": 100, "market_risk": 25}
//! ```

use std::fmt;
use std::io::Read;
use std::path::Path;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use crate::basel::{CapitalStructure, DiscretionWeight, Exposure, SovereignRating};
use crate::distributions::{LossDistribution, Position, Segment};
use crate::error::RiskError;
use crate::family::{triangular_tail, uniform_tail, InnerStart, TailSpec};

#[derive(Debug)]
pub enum DocumentError {
    /// Malformed JSON or a field of the wrong shape.
    Parse {
        message: String,
        line: usize,
        column: usize,
    },
    /// Well-formed input violating a domain invariant.
    Validation(String),
    Io(String),
}

impl fmt::Display for DocumentError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DocumentError::Parse {
                message,
                line,
                column,
            } => write!(f, "parse error at line {line}, column {column}: {message}"),
            DocumentError::Validation(msg) => write!(f, "validation error: {msg}"),
            DocumentError::Io(msg) => write!(f, "i/o error: {msg}"),
        }
    }
}

impl std::error::Error for DocumentError {}

impl From<serde_json::Error> for DocumentError {
    fn from(e: serde_json::Error) -> Self {
        DocumentError::Parse {
            message: e.to_string(),
            line: e.line(),
            column: e.column(),
        }
    }
}

impl From<RiskError> for DocumentError {
    fn from(e: RiskError) -> Self {
        DocumentError::Validation(e.to_string())
    }
}

/// A number accepting JSON numbers, decimal strings and `"p/q"` fractions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Num(pub f64);

impl Num {
    pub fn parse(s: &str) -> Option<f64> {
        let s = s.trim();
        match s.split_once('/') {
            Some((num, den)) => {
                let num: f64 = num.trim().parse().ok()?;
                let den: f64 = den.trim().parse().ok()?;
                (den != 0.0).then_some(num / den)
            }
            None => s.parse().ok(),
        }
        .filter(|v: &f64| v.is_finite())
    }
}

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_f64(self.0)
    }
}

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct NumVisitor;

        impl Visitor<'_> for NumVisitor {
            type Value = Num;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a number, a decimal string or a fraction such as \"5/3\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Num, E> {
                Ok(Num(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Num, E> {
                Ok(Num(v as f64))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Num, E> {
                Ok(Num(v as f64))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Num, E> {
                Num::parse(v)
                    .map(Num)
                    .ok_or_else(|| E::custom(format!("cannot read {v:?} as a number")))
            }
        }

        deserializer.deserialize_any(NumVisitor)
    }
}

fn zero() -> Num {
    Num(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailShape {
    #[default]
    Uniform,
    Triangular,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct RawExposure {
    category: String,
    amount: Num,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    discretion_weight: Option<Num>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rating: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    default_probability: Option<Num>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum RawPayload {
    Position {
        outcomes: Vec<(Num, Num)>,
    },
    LossDistribution {
        #[serde(default)]
        atoms: Vec<(Num, Num)>,
        #[serde(default)]
        segments: Vec<(Num, Num, Num, Num)>,
    },
    TailSpec {
        c: Num,
        d: Num,
        level: Num,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        inner: Vec<(Num, Num)>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        body_offset: Option<Num>,
        #[serde(default)]
        shape: TailShape,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        apex: Option<Num>,
    },
    Exposures {
        exposures: Vec<RawExposure>,
    },
    Capital {
        tier1: Num,
        #[serde(default = "zero")]
        tier2: Num,
        #[serde(default = "zero")]
        tier3: Num,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        credit_risk: Option<Num>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        market_risk: Option<Num>,
        #[serde(default = "zero")]
        operational_risk: Num,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        trading_book: Option<Vec<(Num, Num)>>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct RawDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    description: Option<String>,
    #[serde(flatten)]
    payload: RawPayload,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Metadata {
    pub name: Option<String>,
    pub description: Option<String>,
}

/// Capital, risk terms and an optional trading book for the `basel` command.
#[derive(Debug, Clone, PartialEq)]
pub struct CapitalDocument {
    pub capital: CapitalStructure,
    /// Used when no exposure list is supplied.
    pub credit_risk: Option<f64>,
    /// Mutually exclusive with `trading_book`.
    pub market_risk: Option<f64>,
    pub operational_risk: f64,
    /// Market risk is then charged as its 95% VaR.
    pub trading_book: Option<Position>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Payload {
    Position(Position),
    LossDistribution(LossDistribution),
    TailSpec {
        spec: TailSpec,
        shape: TailShape,
        apex: Option<f64>,
    },
    Exposures(Vec<Exposure>),
    Capital(CapitalDocument),
}

impl Payload {
    pub fn kind(&self) -> &'static str {
        match self {
            Payload::Position(_) => "position",
            Payload::LossDistribution(_) => "loss_distribution",
            Payload::TailSpec { .. } => "tail_spec",
            Payload::Exposures(_) => "exposures",
            Payload::Capital(_) => "capital",
        }
    }

    /// The loss distribution described by a position, loss distribution or
    /// tail spec; `None` for the Basel documents.
    pub fn loss_distribution(&self) -> Option<LossDistribution> {
        match self {
            Payload::Position(p) => Some(p.to_loss()),
            Payload::LossDistribution(l) => Some(l.clone()),
            Payload::TailSpec { spec, shape, apex } => Some(
                match shape {
                    TailShape::Uniform => uniform_tail(spec),
                    TailShape::Triangular => triangular_tail(spec, apex.unwrap_or(spec.c)),
                }
                .expect("tail specs are validated on parse"),
            ),
            Payload::Exposures(_) | Payload::Capital(_) => None,
        }
    }
}

/// A parsed and validated input file.
#[derive(Debug, Clone, PartialEq)]
pub struct SpecDocument {
    pub metadata: Metadata,
    pub payload: Payload,
}

fn pairs(raw: &[(Num, Num)]) -> Vec<(f64, f64)> {
    raw.iter().map(|(a, b)| (a.0, b.0)).collect()
}

fn raw_pairs(values: &[(f64, f64)]) -> Vec<(Num, Num)> {
    values.iter().map(|&(a, b)| (Num(a), Num(b))).collect()
}

impl SpecDocument {
    pub fn from_json_str(text: &str) -> Result<Self, DocumentError> {
        let raw: RawDocument = serde_json::from_str(text)?;
        SpecDocument::validate(raw)
    }

    pub fn from_reader<R: Read>(mut reader: R) -> Result<Self, DocumentError> {
        let mut text = String::new();
        reader
            .read_to_string(&mut text)
            .map_err(|e| DocumentError::Io(e.to_string()))?;
        SpecDocument::from_json_str(&text)
    }

    /// Reads a document from `path`; `-` means standard input.
    pub fn from_path(path: &Path) -> Result<Self, DocumentError> {
        if path.as_os_str() == "-" {
            return SpecDocument::from_reader(std::io::stdin().lock());
        }
        let text = std::fs::read_to_string(path)
            .map_err(|e| DocumentError::Io(format!("{}: {e}", path.display())))?;
        SpecDocument::from_json_str(&text)
    }

    pub fn name(&self) -> &str {
        self.metadata.name.as_deref().unwrap_or(self.payload.kind())
    }

    fn validate(raw: RawDocument) -> Result<Self, DocumentError> {
        let payload = match raw.payload {
            RawPayload::Position { outcomes } => {
                Payload::Position(Position::new(pairs(&outcomes))?)
            }
            RawPayload::LossDistribution { atoms, segments } => {
                let segments = segments
                    .iter()
                    .map(|(a, b, fa, fb)| Segment::new(a.0, b.0, fa.0, fb.0))
                    .collect();
                Payload::LossDistribution(LossDistribution::new(pairs(&atoms), segments)?)
            }
            RawPayload::TailSpec {
                c,
                d,
                level,
                inner,
                body_offset,
                shape,
                apex,
            } => {
                let spec = TailSpec {
                    c: c.0,
                    d: d.0,
                    level: level.0,
                    inner: inner
                        .iter()
                        .map(|(l, s)| InnerStart {
                            level: l.0,
                            start: s.0,
                        })
                        .collect(),
                    body_offset: body_offset.map_or(1.0, |b| b.0),
                };
                let apex = apex.map(|a| a.0);
                match shape {
                    TailShape::Uniform => {
                        if apex.is_some() {
                            return Err(DocumentError::Validation(
                                "apex only applies to triangular tails".into(),
                            ));
                        }
                        uniform_tail(&spec)?;
                    }
                    TailShape::Triangular => {
                        let apex = apex.ok_or_else(|| {
                            DocumentError::Validation("triangular tails need an apex".into())
                        })?;
                        triangular_tail(&spec, apex)?;
                    }
                }
                Payload::TailSpec { spec, shape, apex }
            }
            RawPayload::Exposures { exposures } => Payload::Exposures(
                exposures
                    .iter()
                    .map(|e| {
                        let mut exposure = Exposure::new(e.category.parse()?, e.amount.0);
                        if let Some(w) = e.discretion_weight {
                            exposure = exposure.with_discretion(DiscretionWeight::from_value(w.0)?);
                        }
                        if let Some(r) = &e.rating {
                            exposure = exposure.with_rating(r.parse::<SovereignRating>()?);
                        }
                        exposure.default_probability = e.default_probability.map(|p| p.0);
                        exposure.validate()?;
                        Ok(exposure)
                    })
                    .collect::<Result<Vec<_>, RiskError>>()?,
            ),
            RawPayload::Capital {
                tier1,
                tier2,
                tier3,
                credit_risk,
                market_risk,
                operational_risk,
                trading_book,
            } => {
                if market_risk.is_some() && trading_book.is_some() {
                    return Err(DocumentError::Validation(
                        "give either market_risk or trading_book, not both".into(),
                    ));
                }
                Payload::Capital(CapitalDocument {
                    capital: CapitalStructure::new(tier1.0, tier2.0, tier3.0)?,
                    credit_risk: credit_risk.map(|n| n.0),
                    market_risk: market_risk.map(|n| n.0),
                    operational_risk: operational_risk.0,
                    trading_book: trading_book.map(|b| Position::new(pairs(&b))).transpose()?,
                })
            }
        };
        Ok(SpecDocument {
            metadata: Metadata {
                name: raw.name,
                description: raw.description,
            },
            payload,
        })
    }

    fn to_raw(&self) -> RawDocument {
        let payload = match &self.payload {
            Payload::Position(p) => RawPayload::Position {
                outcomes: raw_pairs(p.outcomes()),
            },
            Payload::LossDistribution(l) => RawPayload::LossDistribution {
                atoms: raw_pairs(l.atoms()),
                segments: l
                    .segments()
                    .iter()
                    .map(|s| (Num(s.a), Num(s.b), Num(s.f_a), Num(s.f_b)))
                    .collect(),
            },
            Payload::TailSpec { spec, shape, apex } => RawPayload::TailSpec {
                c: Num(spec.c),
                d: Num(spec.d),
                level: Num(spec.level),
                inner: spec
                    .inner
                    .iter()
                    .map(|i| (Num(i.level), Num(i.start)))
                    .collect(),
                body_offset: Some(Num(spec.body_offset)),
                shape: *shape,
                apex: apex.map(Num),
            },
            Payload::Exposures(list) => RawPayload::Exposures {
                exposures: list
                    .iter()
                    .map(|e| RawExposure {
                        category: e.category.code().to_string(),
                        amount: Num(e.amount),
                        discretion_weight: e.discretion_weight.map(|w| Num(w.value())),
                        rating: e.rating.map(|r| r.label().to_string()),
                        default_probability: e.default_probability.map(Num),
                    })
                    .collect(),
            },
            Payload::Capital(c) => RawPayload::Capital {
                tier1: Num(c.capital.tier1),
                tier2: Num(c.capital.tier2),
                tier3: Num(c.capital.tier3),
                credit_risk: c.credit_risk.map(Num),
                market_risk: c.market_risk.map(Num),
                operational_risk: Num(c.operational_risk),
                trading_book: c.trading_book.as_ref().map(|b| raw_pairs(b.outcomes())),
            },
        };
        RawDocument {
            name: self.metadata.name.clone(),
            description: self.metadata.description.clone(),
            payload,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_raw()).expect("documents always serialize")
    }
}

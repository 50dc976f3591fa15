use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Provenance of an entry.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Tag {
    /// Numeric, not classified.
    Numeric,
    /// Eigenvectors pulled back from the previous level.
    Pullback,
    /// Eigenvectors new at the given level (fiber-mean-zero).
    New(usize),
    /// Both pullback and new eigenvectors share the value.
    Mixed,
    /// Produced by a closed-form family; the payload names the families.
    Analytic(String),
    /// The constant mode at 0, outside the closed-form listings.
    Trivial,
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tag::Numeric => write!(f, "numeric"),
            Tag::Pullback => write!(f, "pullback"),
            Tag::New(level) => write!(f, "new:{level}"),
            Tag::Mixed => write!(f, "mixed"),
            Tag::Analytic(family) => write!(f, "analytic:{family}"),
            Tag::Trivial => write!(f, "trivial"),
        }
    }
}

impl FromStr for Tag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "numeric" => Tag::Numeric,
            "pullback" => Tag::Pullback,
            "mixed" => Tag::Mixed,
            "trivial" => Tag::Trivial,
            _ => {
                if let Some(level) = s.strip_prefix("new:") {
                    Tag::New(level.parse().map_err(|_| Error::Parse(format!("bad tag `{s}`")))?)
                } else if let Some(family) = s.strip_prefix("analytic:") {
                    Tag::Analytic(family.to_string())
                } else {
                    return Err(Error::Parse(format!("bad tag `{s}`")));
                }
            }
        })
    }
}

impl Serialize for Tag {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Tag {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Origin {
    Numeric {
        level: usize,
        pitch: Option<f64>,
        #[serde(default)]
        extrapolated: bool,
    },
    Analytic {
        formula: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEntry {
    pub value: f64,
    pub multiplicity: usize,
    pub tag: Tag,
    /// Which closed-form terms (or eigenvector classes) produced the entry.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sources: Vec<String>,
}

/// Sorted, clustered eigenvalues below a truncation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumList {
    pub entries: Vec<SpectrumEntry>,
    pub origin: Origin,
    pub truncation: f64,
    /// Multiplicities are not claimed (closed forms that only give the set).
    #[serde(default)]
    pub set_only: bool,
}

fn same_cluster(a: f64, b: f64, rel_tol: f64) -> bool {
    (b - a).abs() <= rel_tol * a.abs().max(b.abs()).max(1.0)
}

/// Gap-based clustering of sorted eigenvalues into entries with multiplicities.
///
/// Consecutive values closer than `rel_tol * max(|a|, |b|, 1)` merge; the
/// cluster value is the mean of its members.
pub fn cluster(eigs: &[f64], rel_tol: f64) -> SpectrumList {
    let tags = vec![Tag::Numeric; eigs.len()];
    cluster_tagged(eigs, &tags, rel_tol)
}

/// [`cluster`] that keeps eigenvector classes: a cluster whose members share
/// one tag keeps it, otherwise it becomes [`Tag::Mixed`] with per-class counts
/// in `sources`.
pub fn cluster_tagged(eigs: &[f64], tags: &[Tag], rel_tol: f64) -> SpectrumList {
    assert_eq!(eigs.len(), tags.len());
    debug_assert!(eigs.windows(2).all(|w| w[0] <= w[1]), "cluster expects sorted input");
    let mut entries: Vec<SpectrumEntry> = Vec::new();
    let mut members: Vec<Vec<usize>> = Vec::new();
    for (i, &x) in eigs.iter().enumerate() {
        match members.last_mut() {
            Some(m) if same_cluster(eigs[*m.last().unwrap()], x, rel_tol) => m.push(i),
            _ => members.push(vec![i]),
        }
    }
    for m in members {
        let value = m.iter().map(|&i| eigs[i]).sum::<f64>() / m.len() as f64;
        let mut classes: Vec<(Tag, usize)> = Vec::new();
        for &i in &m {
            match classes.iter_mut().find(|(t, _)| *t == tags[i]) {
                Some((_, c)) => *c += 1,
                None => classes.push((tags[i].clone(), 1)),
            }
        }
        let (tag, sources) = if classes.len() == 1 {
            (classes[0].0.clone(), Vec::new())
        } else {
            (Tag::Mixed, classes.iter().map(|(t, c)| format!("{t}x{c}")).collect())
        };
        entries.push(SpectrumEntry { value, multiplicity: m.len(), tag, sources });
    }
    let truncation = eigs.last().copied().unwrap_or(0.0);
    SpectrumList {
        entries,
        origin: Origin::Numeric { level: 0, pitch: None, extrapolated: false },
        truncation,
        set_only: false,
    }
}

/// `N(lambda)`: total multiplicity of entries at or below `lambda`.
pub fn counting_function(s: &SpectrumList, lambda: f64) -> Result<usize> {
    if lambda > s.truncation * (1.0 + 1e-12) {
        return Err(Error::BeyondTruncation { lambda, truncation: s.truncation });
    }
    Ok(s.entries.iter().take_while(|e| e.value <= lambda).map(|e| e.multiplicity).sum())
}

#[derive(Debug, Serialize, Deserialize)]
struct CsvRow {
    eigenvalue: String,
    multiplicity: usize,
    tag: String,
    source: String,
}

impl SpectrumList {
    pub fn with_origin(mut self, origin: Origin) -> Self {
        self.origin = origin;
        self
    }

    pub fn with_truncation(mut self, truncation: f64) -> Self {
        self.truncation = truncation;
        self
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn values(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.value).collect()
    }

    pub fn total_multiplicity(&self) -> usize {
        self.entries.iter().map(|e| e.multiplicity).sum()
    }

    /// Raw eigenvalues with repetition.
    pub fn expanded(&self) -> Vec<f64> {
        self.entries.iter().flat_map(|e| std::iter::repeat_n(e.value, e.multiplicity)).collect()
    }

    /// Entries at or below `bound`.
    pub fn below(&self, bound: f64) -> impl Iterator<Item = &SpectrumEntry> {
        self.entries.iter().filter(move |e| e.value <= bound)
    }

    pub fn pitch(&self) -> Option<f64> {
        match self.origin {
            Origin::Numeric { pitch, .. } => pitch,
            Origin::Analytic { .. } => None,
        }
    }

    /// CSV with header `eigenvalue,multiplicity,tag,source`; values carry 17
    /// significant digits.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        for e in &self.entries {
            out.serialize(CsvRow {
                eigenvalue: format!("{:.16e}", e.value),
                multiplicity: e.multiplicity,
                tag: e.tag.to_string(),
                source: e.sources.join("|"),
            })?;
        }
        if self.entries.is_empty() {
            out.write_record(["eigenvalue", "multiplicity", "tag", "source"])?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        String::from_utf8(buf).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Reads the entries back. The CSV does not carry origin metadata, so the
    /// caller supplies it.
    pub fn read_csv<R: Read>(r: R, origin: Origin, truncation: f64) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(r);
        let headers = rdr.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["eigenvalue", "multiplicity", "tag", "source"] {
            return Err(Error::Parse(format!("unexpected header {headers:?}")));
        }
        let mut entries = Vec::new();
        for row in rdr.deserialize() {
            let row: CsvRow = row?;
            let value: f64 = row
                .eigenvalue
                .parse()
                .map_err(|_| Error::Parse(format!("bad eigenvalue `{}`", row.eigenvalue)))?;
            if !value.is_finite() || row.multiplicity == 0 {
                return Err(Error::Parse(format!("bad entry {value} x {}", row.multiplicity)));
            }
            let sources =
                if row.source.is_empty() { Vec::new() } else { row.source.split('|').map(String::from).collect() };
            entries.push(SpectrumEntry { value, multiplicity: row.multiplicity, tag: row.tag.parse()?, sources });
        }
        if entries.windows(2).any(|w| w[0].value >= w[1].value) {
            return Err(Error::Parse("eigenvalues are not strictly increasing".into()));
        }
        Ok(SpectrumList { entries, origin, truncation, set_only: false })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

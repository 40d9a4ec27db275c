use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;
use serde_json::{Map, Value};

use super::{preprocess_text, CorpusError, Dataset, Source, SourceKind, Utterance};
use crate::taxonomy::BasicEmotion;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Jsonl,
    Csv,
}

impl Format {
    /// Guesses the format from a file extension, defaulting to JSONL.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => Format::Csv,
            _ => Format::Jsonl,
        }
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "jsonl" | "json" => Ok(Format::Jsonl),
            "csv" => Ok(Format::Csv),
            other => Err(format!("unknown dataset format '{other}'")),
        }
    }
}

pub fn ingest(path: impl AsRef<Path>, format: Format) -> Result<Dataset, CorpusError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| CorpusError::Io {
        path: path.display().to_string(),
        source,
    })?;
    ingest_reader(file, format, path.display().to_string())
}

pub fn ingest_reader<R: Read>(reader: R, format: Format, provenance: impl Into<String>) -> Result<Dataset, CorpusError> {
    let instances = match format {
        Format::Jsonl => read_jsonl(reader)?,
        Format::Csv => read_csv(reader)?,
    };
    Dataset::new(instances, provenance)
}

fn malformed(line: u64, field: &str, message: impl Into<String>) -> CorpusError {
    CorpusError::Malformed {
        line,
        field: field.to_string(),
        message: message.into(),
    }
}

fn parse_labels<'a>(line: u64, labels: impl IntoIterator<Item = &'a str>) -> Result<BTreeSet<BasicEmotion>, CorpusError> {
    labels
        .into_iter()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(|l| {
            l.parse::<BasicEmotion>().map_err(|_| CorpusError::UnknownLabel {
                line,
                label: l.to_string(),
            })
        })
        .collect()
}

fn string_field(obj: &Map<String, Value>, line: u64, field: &str) -> Result<Option<String>, CorpusError> {
    match obj.get(field) {
        None | Some(Value::Null) => Ok(None),
        Some(Value::String(s)) => Ok(Some(s.clone())),
        Some(other) => Err(malformed(line, field, format!("expected string, found {other}"))),
    }
}

fn string_list(obj: &Map<String, Value>, line: u64, field: &str) -> Result<Option<Vec<String>>, CorpusError> {
    match obj.get(field) {
        None | Some(Value::Null) => Ok(None),
        Some(Value::Array(items)) => items
            .iter()
            .map(|v| match v {
                Value::String(s) => Ok(s.clone()),
                other => Err(malformed(line, field, format!("expected string element, found {other}"))),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Some),
        Some(other) => Err(malformed(line, field, format!("expected array, found {other}"))),
    }
}

fn read_jsonl<R: Read>(reader: R) -> Result<Vec<Utterance>, CorpusError> {
    let mut out = Vec::new();
    for (idx, line) in BufReader::new(reader).lines().enumerate() {
        let line_no = idx as u64 + 1;
        let line = line.map_err(|e| malformed(line_no, "<line>", e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let value: Value =
            serde_json::from_str(&line).map_err(|e| malformed(line_no, "<record>", e.to_string()))?;
        let Value::Object(obj) = value else {
            return Err(malformed(line_no, "<record>", "expected a JSON object"));
        };
        let id = string_field(&obj, line_no, "id")?.ok_or_else(|| malformed(line_no, "id", "missing"))?;
        let raw_text = string_field(&obj, line_no, "text")?.ok_or_else(|| malformed(line_no, "text", "missing"))?;
        let labels = string_list(&obj, line_no, "labels")?.ok_or_else(|| malformed(line_no, "labels", "missing"))?;
        let labels = parse_labels(line_no, labels.iter().map(String::as_str))?;
        let secondary_labels = string_list(&obj, line_no, "secondary")?;
        let masked_text = string_field(&obj, line_no, "masked_text")?.unwrap_or_else(|| preprocess_text(&raw_text));
        let source = match obj.get("source") {
            None | Some(Value::Null) => None,
            Some(v) => Some(
                serde_json::from_value::<Source>(v.clone())
                    .map_err(|e| malformed(line_no, "source", e.to_string()))?,
            ),
        };
        out.push(Utterance {
            id,
            raw_text,
            masked_text,
            labels,
            secondary_labels,
            source,
        });
    }
    Ok(out)
}

fn read_csv<R: Read>(reader: R) -> Result<Vec<Utterance>, CorpusError> {
    let mut csv = csv::ReaderBuilder::new().flexible(false).from_reader(reader);
    let headers = csv.headers().map_err(|e| malformed(1, "<header>", e.to_string()))?.clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim().eq_ignore_ascii_case(name))
            .ok_or_else(|| malformed(1, name, "missing column"))
    };
    let (id_col, text_col, labels_col) = (column("id")?, column("text")?, column("labels")?);

    let mut out = Vec::new();
    for record in csv.records() {
        let record = record.map_err(|e| {
            malformed(e.position().map(|p| p.line()).unwrap_or(0), "<record>", e.to_string())
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let get = |col: usize, name: &str| {
            record
                .get(col)
                .map(str::to_string)
                .ok_or_else(|| malformed(line, name, "missing"))
        };
        let id = get(id_col, "id")?;
        if id.trim().is_empty() {
            return Err(malformed(line, "id", "empty"));
        }
        let raw_text = get(text_col, "text")?;
        let labels = parse_labels(line, get(labels_col, "labels")?.split(';'))?;
        out.push(Utterance {
            id,
            masked_text: preprocess_text(&raw_text),
            raw_text,
            labels,
            secondary_labels: None,
            source: None,
        });
    }
    Ok(out)
}

#[derive(Serialize)]
struct RecordOut<'a> {
    id: &'a str,
    text: &'a str,
    masked_text: &'a str,
    labels: Vec<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    secondary: Option<&'a Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    source: Option<SourceOut<'a>>,
}

#[derive(Serialize)]
struct SourceOut<'a> {
    repo: &'a str,
    kind: SourceKind,
}

/// Writes one JSON object per line in dataset order.
pub fn write_jsonl<W: Write>(dataset: &Dataset, mut writer: W) -> std::io::Result<()> {
    for u in &dataset.instances {
        let record = RecordOut {
            id: &u.id,
            text: &u.raw_text,
            masked_text: &u.masked_text,
            labels: u.labels.iter().map(|l| l.name()).collect(),
            secondary: u.secondary_labels.as_ref(),
            source: u.source.as_ref().map(|s| SourceOut {
                repo: &s.repo,
                kind: s.kind,
            }),
        };
        serde_json::to_writer(&mut writer, &record)?;
        writer.write_all(b"\n")?;
    }
    writer.flush()
}

//! JSON-lines interchange format.
//!
//! One strokeset per line:
//!
//! ```json
//! {"id":"a","writer":"w1","meta":{"gender":"male","handedness":"right"},
//!  "split":"train","strokes":[[[x,y,t,1],[x,y,t,1]],[[x,y,t,0]]]}
//! ```
//!
//! `pen_down` is encoded as 0/1. The optional `split` key carries the
//! corpus split assignment so a corpus round-trips losslessly.

use std::io::{BufRead, BufReader, Read, Write};

use serde::{Deserialize, Serialize};

use super::{Corpus, InkError, Metadata, SamplePoint, Split, Stroke, StrokeSet};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LineRecord {
    id: String,
    writer: String,
    meta: Metadata,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    split: Option<Split>,
    strokes: Vec<Vec<(f64, f64, f64, u8)>>,
}

/// Parse the JSON-lines interchange format into a validated [`Corpus`].
///
/// Blank lines are ignored. Errors carry the 1-based line number.
pub fn parse_interchange<R: Read>(reader: R) -> Result<Corpus, InkError> {
    let buf = BufReader::new(reader);
    let mut corpus = Corpus::default();
    let mut seen = std::collections::BTreeSet::new();

    for (idx, line) in buf.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: LineRecord =
            serde_json::from_str(&line).map_err(|e| InkError::Malformed {
                line: line_no,
                message: e.to_string(),
            })?;
        if !seen.insert(record.id.clone()) {
            return Err(InkError::DuplicateId {
                line: line_no,
                id: record.id,
            });
        }
        let strokeset = record_to_strokeset(record, line_no, &mut corpus)?;
        corpus.strokesets.push(strokeset);
    }
    corpus.validate().map_err(|e| match e {
        InkError::InvalidCorpus(m) => InkError::InvalidCorpus(m),
        other => other,
    })?;
    Ok(corpus)
}

fn record_to_strokeset(
    record: LineRecord,
    line_no: usize,
    corpus: &mut Corpus,
) -> Result<StrokeSet, InkError> {
    if record.strokes.is_empty() {
        return Err(InkError::Malformed {
            line: line_no,
            message: format!("strokeset {:?} has no strokes", record.id),
        });
    }
    let mut strokes = Vec::with_capacity(record.strokes.len());
    for (k, raw) in record.strokes.into_iter().enumerate() {
        if raw.is_empty() {
            return Err(InkError::Malformed {
                line: line_no,
                message: format!("stroke {k} is empty"),
            });
        }
        let mut points = Vec::with_capacity(raw.len());
        let mut prev_t = f64::NEG_INFINITY;
        for (x, y, t, pd) in raw {
            if pd > 1 {
                return Err(InkError::Malformed {
                    line: line_no,
                    message: format!("stroke {k}: pen_down flag must be 0 or 1, got {pd}"),
                });
            }
            let p = SamplePoint {
                x,
                y,
                t,
                pen_down: pd == 1,
            };
            if !p.is_finite() {
                return Err(InkError::Malformed {
                    line: line_no,
                    message: format!("stroke {k}: non-finite or negative-time point"),
                });
            }
            if t < prev_t {
                return Err(InkError::NonMonotonicTimestamp {
                    line: line_no,
                    stroke: k,
                });
            }
            prev_t = t;
            points.push(p);
        }
        strokes.push(Stroke { points });
    }
    let strokeset = StrokeSet {
        id: record.id,
        writer_id: record.writer,
        strokes,
        metadata: record.meta,
    };
    strokeset.validate().map_err(|e| InkError::Malformed {
        line: line_no,
        message: e.to_string(),
    })?;
    if let Some(split) = record.split {
        corpus.splits.insert(strokeset.id.clone(), split);
    }
    Ok(strokeset)
}

/// Write a corpus as JSON lines; the exact inverse of [`parse_interchange`].
pub fn write_interchange<W: Write>(corpus: &Corpus, mut writer: W) -> Result<(), InkError> {
    for s in &corpus.strokesets {
        let record = LineRecord {
            id: s.id.clone(),
            writer: s.writer_id.clone(),
            meta: s.metadata.clone(),
            split: corpus.splits.get(&s.id).copied(),
            strokes: s
                .strokes
                .iter()
                .map(|st| {
                    st.points
                        .iter()
                        .map(|p| (p.x, p.y, p.t, u8::from(p.pen_down)))
                        .collect()
                })
                .collect(),
        };
        let line = serde_json::to_string(&record).expect("interchange record serializes");
        writer.write_all(line.as_bytes())?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_line_parses() {
        let line = r#"{"id":"a","writer":"w1","meta":{"gender":"unknown","handedness":"unknown"},"strokes":[[[0.0,0.0,0.0,1],[1.0,2.0,10.0,1]]]}"#;
        let corpus = parse_interchange(line.as_bytes()).unwrap();
        assert_eq!(corpus.strokesets.len(), 1);
        assert_eq!(corpus.strokesets[0].point_count(), 2);
    }

    #[test]
    fn non_monotonic_timestamp_is_rejected_with_line() {
        let line = r#"{"id":"a","writer":"w","meta":{"gender":"unknown","handedness":"unknown"},"strokes":[[[0,0,5,1],[1,1,3,1]]]}"#;
        let err = parse_interchange(line.as_bytes()).unwrap_err();
        match err {
            InkError::NonMonotonicTimestamp { line, stroke } => {
                assert_eq!(line, 1);
                assert_eq!(stroke, 0);
            }
            other => panic!("unexpected error {other:?}"),
        }
        assert!(err.to_string().contains("non-monotonic timestamp"));
    }

    #[test]
    fn duplicate_id_is_rejected() {
        let lines = r#"{"id":"a","writer":"w","meta":{"gender":"unknown","handedness":"unknown"},"strokes":[[[0,0,0,1]]]}
{"id":"a","writer":"w","meta":{"gender":"unknown","handedness":"unknown"},"strokes":[[[0,0,0,1]]]}"#;
        let err = parse_interchange(lines.as_bytes()).unwrap_err();
        assert!(matches!(err, InkError::DuplicateId { line: 2, .. }));
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let lines = "{\"id\":\"a\",\"writer\":\"w\",\"meta\":{\"gender\":\"unknown\",\"handedness\":\"unknown\"},\"strokes\":[[[0,0,0,1]]]}\nnot json";
        let err = parse_interchange(lines.as_bytes()).unwrap_err();
        match err {
            InkError::Malformed { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn fixture_with_splits_round_trips() {
        let lines = r#"{"id":"a","writer":"w1","meta":{"gender":"male","handedness":"right"},"split":"pretrain","strokes":[[[0,0,0,1],[1,1,5,1]]]}
{"id":"b","writer":"w1","meta":{"gender":"male","handedness":"right"},"split":"train","strokes":[[[0,0,0,1],[2,2,8,1]]]}
{"id":"c","writer":"w2","meta":{"gender":"female","handedness":"left","language":"en"},"split":"test","strokes":[[[0,0,0,1]],[[1,0,9,0]]]}"#;
        let corpus = parse_interchange(lines.as_bytes()).unwrap();
        assert_eq!(corpus.splits.len(), 3);
        assert_eq!(corpus.splits.get("a"), Some(&Split::Pretrain));
        assert_eq!(corpus.splits.get("c"), Some(&Split::Test));

        let mut bytes = Vec::new();
        write_interchange(&corpus, &mut bytes).unwrap();
        let reparsed = parse_interchange(&bytes[..]).unwrap();
        assert_eq!(reparsed, corpus);

        // Canonical output is byte-stable.
        let mut bytes2 = Vec::new();
        write_interchange(&reparsed, &mut bytes2).unwrap();
        assert_eq!(bytes, bytes2);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let line = r#"{"id":"a","writer":"w","meta":{"gender":"unknown","handedness":"unknown"},"bogus":1,"strokes":[[[0,0,0,1]]]}"#;
        assert!(parse_interchange(line.as_bytes()).is_err());
    }
}

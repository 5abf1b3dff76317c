//! IAM-style XML import.
//!
//! Accepts documents whose stroke elements contain point children with
//! `x`, `y`, and `time` attributes (element and attribute names are matched
//! case-insensitively; `t` is accepted for `time`). This format records
//! on-surface traces only, so every parsed point is pen-down.
//!
//! Times are interpreted as seconds, offset so the strokeset starts at
//! `t = 0`, and converted to milliseconds.

use quick_xml::events::Event;
use quick_xml::Reader;

use super::{InkError, Metadata, SamplePoint, Stroke, StrokeSet};

/// Parse one IAM-style XML document into a [`StrokeSet`].
///
/// Text lines are concatenated in document order. `id` and `writer_id`
/// identify the resulting strokeset (this format does not carry them).
pub fn parse_iam_xml(bytes: &[u8], id: &str, writer_id: &str) -> Result<StrokeSet, InkError> {
    let mut reader = Reader::from_reader(bytes);
    reader.config_mut().trim_text(true);

    let mut strokes: Vec<Vec<(f64, f64, f64)>> = Vec::new();
    let mut in_stroke = false;
    let mut buf = Vec::new();

    loop {
        let event = reader.read_event_into(&mut buf).map_err(|e| InkError::Xml {
            offset: reader.buffer_position() as usize,
            message: e.to_string(),
        })?;
        match event {
            Event::Start(ref e) | Event::Empty(ref e) => {
                let name = local_name(e.name().as_ref());
                if name.eq_ignore_ascii_case("stroke") {
                    strokes.push(Vec::new());
                    in_stroke = !matches!(event, Event::Empty(_));
                } else if name.eq_ignore_ascii_case("point") {
                    if !in_stroke {
                        return Err(InkError::Xml {
                            offset: reader.buffer_position() as usize,
                            message: "point element outside a stroke".into(),
                        });
                    }
                    let stroke_idx = strokes.len() - 1;
                    let point_idx = strokes[stroke_idx].len();
                    let position = format!("stroke {stroke_idx}, point {point_idx}");
                    let point = parse_point_attrs(e, &position)?;
                    strokes[stroke_idx].push(point);
                }
            }
            Event::End(ref e) => {
                if local_name(e.name().as_ref()).eq_ignore_ascii_case("stroke") {
                    in_stroke = false;
                }
            }
            Event::Eof => break,
            _ => {}
        }
        buf.clear();
    }

    strokes.retain(|s| !s.is_empty());
    if strokes.is_empty() {
        return Err(InkError::EmptyDocument);
    }

    let t0 = strokes[0][0].2;
    let built: Vec<Stroke> = strokes
        .into_iter()
        .map(|pts| Stroke {
            points: pts
                .into_iter()
                .map(|(x, y, t)| SamplePoint {
                    x,
                    y,
                    t: (t - t0) * 1000.0,
                    pen_down: true,
                })
                .collect(),
        })
        .collect();

    let strokeset = StrokeSet {
        id: id.to_string(),
        writer_id: writer_id.to_string(),
        strokes: built,
        metadata: Metadata::default(),
    };
    strokeset.validate()?;
    Ok(strokeset)
}

fn local_name(raw: &[u8]) -> &str {
    let s = std::str::from_utf8(raw).unwrap_or("");
    s.rsplit(':').next().unwrap_or(s)
}

fn parse_point_attrs(
    e: &quick_xml::events::BytesStart<'_>,
    position: &str,
) -> Result<(f64, f64, f64), InkError> {
    let mut x = None;
    let mut y = None;
    let mut t = None;
    for attr in e.attributes().flatten() {
        let key = local_name(attr.key.as_ref()).to_ascii_lowercase();
        let value = String::from_utf8_lossy(&attr.value).into_owned();
        let slot = match key.as_str() {
            "x" => &mut x,
            "y" => &mut y,
            "time" | "t" => &mut t,
            _ => continue,
        };
        let parsed = value.trim().parse::<f64>().map_err(|_| InkError::UnparseableNumber {
            position: position.to_string(),
            value: value.clone(),
        })?;
        if !parsed.is_finite() {
            return Err(InkError::UnparseableNumber {
                position: position.to_string(),
                value,
            });
        }
        *slot = Some(parsed);
    }
    let x = x.ok_or_else(|| missing(position, "x"))?;
    let y = y.ok_or_else(|| missing(position, "y"))?;
    let t = t.ok_or_else(|| missing(position, "time"))?;
    Ok((x, y, t))
}

fn missing(position: &str, name: &str) -> InkError {
    InkError::MissingAttribute {
        position: position.to_string(),
        name: name.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO_STROKES: &str = r#"<?xml version="1.0"?>
<WhiteboardCaptureSession>
  <StrokeSet>
    <Stroke colour="black">
      <Point x="100" y="200" time="5.00"/>
      <Point x="110" y="205" time="5.01"/>
      <Point x="120" y="210" time="5.02"/>
    </Stroke>
    <Stroke colour="black">
      <Point x="130" y="200" time="5.10"/>
      <Point x="140" y="195" time="5.11"/>
      <Point x="150" y="190" time="5.12"/>
    </Stroke>
  </StrokeSet>
</WhiteboardCaptureSession>"#;

    #[test]
    fn fixture_counts_match() {
        let ss = parse_iam_xml(TWO_STROKES.as_bytes(), "doc-1", "writer-1").unwrap();
        assert_eq!(ss.strokes.len(), 2);
        assert_eq!(ss.point_count(), 6);
        assert!(ss.strokes.iter().all(|s| s.pen_down()));
    }

    #[test]
    fn times_become_milliseconds_from_zero() {
        let ss = parse_iam_xml(TWO_STROKES.as_bytes(), "doc-1", "writer-1").unwrap();
        let first = ss.strokes[0].points[0];
        assert_eq!(first.t, 0.0);
        let second = ss.strokes[0].points[1];
        assert!((second.t - 10.0).abs() < 1e-9);
        let last = ss.strokes[1].points[2];
        assert!((last.t - 120.0).abs() < 1e-9);
    }

    #[test]
    fn empty_document_is_rejected() {
        let doc = r#"<?xml version="1.0"?><WhiteboardCaptureSession></WhiteboardCaptureSession>"#;
        let err = parse_iam_xml(doc.as_bytes(), "d", "w").unwrap_err();
        assert!(matches!(err, InkError::EmptyDocument));
        assert!(err.to_string().contains("empty document"));
    }

    #[test]
    fn unparseable_number_reports_position() {
        let doc = r#"<s><Stroke><Point x="abc" y="1" time="0"/></Stroke></s>"#;
        let err = parse_iam_xml(doc.as_bytes(), "d", "w").unwrap_err();
        match err {
            InkError::UnparseableNumber { position, value } => {
                assert_eq!(position, "stroke 0, point 0");
                assert_eq!(value, "abc");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn missing_coordinate_reports_attribute() {
        let doc = r#"<s><Stroke><Point y="1" time="0"/></Stroke></s>"#;
        let err = parse_iam_xml(doc.as_bytes(), "d", "w").unwrap_err();
        assert!(matches!(err, InkError::MissingAttribute { ref name, .. } if name == "x"));
    }
}

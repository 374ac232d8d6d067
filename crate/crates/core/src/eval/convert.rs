//! Conversion of raw phrase-level entailment pairs into typed dataset rows.
//!
//! Raw rows look like `arg1,phrase,arg2<TAB>arg1,phrase,arg2<TAB>label`
//! with an optional fourth `portion` column. Arguments are typed through a
//! [`TypeMap`]; a hypothesis whose arguments appear swapped relative to the
//! premise is aligned by reversing its predicate.

use std::fmt;

use crate::relation::{toggle_reversal, TypeMap};

use super::Portion;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawPairFormatError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for RawPairFormatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

struct Phrase<'a> {
    arg1: &'a str,
    pred: String,
    arg2: &'a str,
}

fn split_phrase(s: &str) -> Option<Phrase<'_>> {
    let mut parts = s.splitn(3, ',').map(str::trim);
    let (arg1, pred, arg2) = (parts.next()?, parts.next()?, parts.next()?);
    if arg1.is_empty() || pred.is_empty() || arg2.is_empty() {
        return None;
    }
    let pred = pred
        .split_whitespace()
        .collect::<Vec<_>>()
        .join("_")
        .to_lowercase();
    Some(Phrase { arg1, pred, arg2 })
}

fn convert_line(line: &str, types: &TypeMap, default_portion: Portion) -> Result<String, String> {
    let cols: Vec<&str> = line.split('\t').collect();
    let (prem, hyp, label, portion) = match cols[..] {
        [p, h, l] => (p, h, l, default_portion),
        [p, h, l, por] => (p, h, l, por.parse::<Portion>().map_err(|e| e.to_string())?),
        _ => return Err(format!("expected 3 or 4 columns, found {}", cols.len())),
    };
    let prem = split_phrase(prem).ok_or("premise is not `arg1,phrase,arg2`")?;
    let hyp = split_phrase(hyp).ok_or("hypothesis is not `arg1,phrase,arg2`")?;
    let hyp_pred = if (hyp.arg1, hyp.arg2) == (prem.arg1, prem.arg2) {
        hyp.pred
    } else if (hyp.arg1, hyp.arg2) == (prem.arg2, prem.arg1) {
        toggle_reversal(&hyp.pred)
    } else {
        return Err("hypothesis arguments do not match the premise".into());
    };
    let label = match label.trim().to_ascii_lowercase().as_str() {
        "1" | "true" | "yes" => 1,
        "0" | "false" | "no" => 0,
        other => return Err(format!("bad label `{other}`")),
    };
    Ok(format!(
        "{}\t{}\t{}\t{}\t{}\t{}",
        prem.pred,
        hyp_pred,
        types.type_of(prem.arg1),
        types.type_of(prem.arg2),
        label,
        portion
    ))
}

/// Converts raw pairs to dataset TSV. Rows that cannot be converted are
/// reported and left out; blank lines and `#` comments are skipped.
pub fn convert_raw_dataset(
    text: &str,
    types: &TypeMap,
    default_portion: Portion,
) -> (String, Vec<RawPairFormatError>) {
    let mut out = String::new();
    let mut errors = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        match convert_line(line, types, default_portion) {
            Ok(row) => {
                out.push_str(&row);
                out.push('\n');
            }
            Err(message) => errors.push(RawPairFormatError {
                line: i + 1,
                message,
            }),
        }
    }
    (out, errors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::parse_dataset;

    fn types() -> TypeMap {
        TypeMap::parse_tsv(
            "Obama\tperson\nUnited States\tlocation\nReal Madrid\torganization\nBarcelona\torganization\n",
            "thing",
        )
        .unwrap()
    }

    const RAW: &str = "\
Obama,was elected president of,United States\tObama,ran for president of,United States\t1
United States,is led by,Obama\tObama,leads,United States\ttrue
Real Madrid,beat,Barcelona\tReal Madrid,played,Barcelona\t1\tsports
Real Madrid,beat,Barcelona\tBarcelona,lost to,Real Madrid\tfalse\tsports
Mystery,visited,Paris\tMystery,saw,Paris\t0
";

    #[test]
    fn golden() {
        let (tsv, errors) = convert_raw_dataset(RAW, &types(), Portion::All);
        assert!(errors.is_empty(), "{errors:?}");
        let expected = "\
was_elected_president_of\tran_for_president_of\tperson\tlocation\t1\tall
is_led_by\tleads#rev\tlocation\tperson\t1\tall
beat\tplayed\torganization\torganization\t1\tsports
beat\tlost_to#rev\torganization\torganization\t0\tsports
visited\tsaw\tthing\tthing\t0\tall
";
        assert_eq!(tsv, expected);
    }

    #[test]
    fn output_loads() {
        let (tsv, _) = convert_raw_dataset(RAW, &types(), Portion::All);
        let all = parse_dataset(&tsv, Portion::All).unwrap();
        assert_eq!(all.len(), 3);
        // person > location, so the first row is stored reversed
        assert_eq!(all[0].premise.predicate, "was_elected_president_of#rev");
        assert_eq!(all[0].hypothesis.predicate, "ran_for_president_of#rev");
        // already location-first; the aligned hypothesis keeps its marker
        assert_eq!(all[1].hypothesis.predicate, "leads#rev");
        assert_eq!(parse_dataset(&tsv, Portion::Sports).unwrap().len(), 2);
    }

    #[test]
    fn bad_rows_are_reported() {
        let raw = "a,b\tc,d,e\t1\nx,p,y\tz,q,w\t1\nx,p,y\tx,q,y\tmaybe\nx,p,y\tx,q,y\t1\tnope\nonly one\n";
        let (tsv, errors) = convert_raw_dataset(raw, &types(), Portion::All);
        assert!(tsv.is_empty());
        assert_eq!(
            errors.iter().map(|e| e.line).collect::<Vec<_>>(),
            vec![1, 2, 3, 4, 5]
        );
    }
}

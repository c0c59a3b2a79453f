use std::fs;
use std::path::Path;

use commbound::{CBox, Certificate, Prior, PureState};
use num_complex::Complex64;
use serde_json::Value;

use crate::failure::{CliResult, Failure};

/// Zero-based byte offset of a serde_json error position.
pub fn byte_offset(text: &str, line: usize, column: usize) -> usize {
    let start: usize = text.split_inclusive('\n').take(line.saturating_sub(1)).map(str::len).sum();
    (start + column.saturating_sub(1)).min(text.len())
}

pub fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))
}

/// Reads a file and checks that it is well-formed JSON.
pub fn read_json(path: &Path) -> CliResult<(String, Value)> {
    let text = read_text(path)?;
    match serde_json::from_str(&text) {
        Ok(v) => Ok((text, v)),
        Err(e) => Err(Failure::invalid(format!(
            "{}: malformed JSON at byte {} (line {}, column {}): {e}",
            path.display(),
            byte_offset(&text, e.line(), e.column()),
            e.line(),
            e.column()
        ))),
    }
}

fn context(path: &Path) -> impl Fn(commbound::Error) -> Failure + '_ {
    move |e| {
        let mut f = Failure::from(e);
        f.message = format!("{}: {}", path.display(), f.message);
        f
    }
}

pub fn read_box(path: &Path) -> CliResult<CBox> {
    let (text, _) = read_json(path)?;
    CBox::from_json(&text).map_err(context(path))
}

pub fn read_prior(path: &Path) -> CliResult<Prior> {
    let (text, _) = read_json(path)?;
    Prior::from_json(&text).map_err(context(path))
}

pub fn read_certificate(path: &Path) -> CliResult<Certificate> {
    let (text, _) = read_json(path)?;
    Certificate::from_json(&text).map_err(context(path))
}

fn amplitude(v: &Value) -> Option<Complex64> {
    match v {
        Value::Number(n) => Some(Complex64::new(n.as_f64()?, 0.0)),
        Value::Array(pair) if pair.len() == 2 => Some(Complex64::new(pair[0].as_f64()?, pair[1].as_f64()?)),
        _ => None,
    }
}

/// States as `[[amp, …], …]` or `{"states": [[amp, …], …]}`; an amplitude
/// is a real number or a `[re, im]` pair. States are normalized on load.
pub fn read_states(path: &Path) -> CliResult<Vec<PureState>> {
    let (_, doc) = read_json(path)?;
    let list = match &doc {
        Value::Object(map) => map.get("states"),
        other => Some(other),
    };
    let Some(Value::Array(list)) = list else {
        return Err(Failure::invalid(format!("{}: expected an array of states", path.display())));
    };
    list.iter()
        .enumerate()
        .map(|(i, state)| {
            let amps = state.as_array().and_then(|a| a.iter().map(amplitude).collect::<Option<Vec<_>>>()).ok_or_else(
                || Failure::invalid(format!("{}: state {i} is not a list of amplitudes", path.display())),
            )?;
            PureState::normalized(amps).map_err(|e| Failure::invalid(format!("{}: state {i}: {e}", path.display())))
        })
        .collect()
}

pub fn write_text(path: &Path, text: &str) -> CliResult {
    fs::write(path, text).map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn offsets_count_bytes_across_lines() {
        let text = "{\n  \"a\": }\n";
        let err = serde_json::from_str::<Value>(text).unwrap_err();
        assert_eq!(&text[byte_offset(text, err.line(), err.column())..][..1], "}");
        assert_eq!(byte_offset("abc", 1, 1), 0);
        assert_eq!(byte_offset("ab", 9, 9), 2);
    }

    #[test]
    fn amplitudes_accept_reals_and_pairs() {
        assert_eq!(amplitude(&serde_json::json!(0.5)), Some(Complex64::new(0.5, 0.0)));
        assert_eq!(amplitude(&serde_json::json!([0.0, -1.0])), Some(Complex64::new(0.0, -1.0)));
        assert_eq!(amplitude(&serde_json::json!([1.0])), None);
        assert_eq!(amplitude(&serde_json::json!("x")), None);
    }
}

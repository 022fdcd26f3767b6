//! Builtin examples, input documents, and the window a job resolves to.

use serde_json::Value;

use bgg::complexes::ExtMatrix;
use bgg::scalar::Field;
use bgg::symmetric::SPresentation;
use bgg::tate::{tate_from_differential, tate_from_presentation, TateWindow};
use bgg::{zoo, BggError, Result};

pub const BUILTINS: &str = "o<v>, o<v>:<d>, point<v>, omega<v>:<p>, cubic, twopoints, hm";

pub enum Source<E> {
    Presentation(SPresentation<E>),
    /// A differential T^0 → T^1.
    Differential(ExtMatrix<E>),
    Window(TateWindow<E>),
}

fn bad(msg: String) -> BggError {
    BggError::InvalidInput(msg)
}

fn int<T: std::str::FromStr>(s: &str, what: &str) -> Result<T> {
    s.parse().map_err(|_| bad(format!("cannot parse {what} '{s}'")))
}

/// Parses "lo:hi".
pub fn parse_window(s: &str) -> Result<(i64, i64)> {
    let (lo, hi) = s.split_once(':').ok_or_else(|| bad(format!("window '{s}' is not of the form lo:hi")))?;
    let (lo, hi) = (int(lo.trim(), "window bound")?, int(hi.trim(), "window bound")?);
    if lo > hi {
        return Err(bad(format!("empty window {lo}:{hi}")));
    }
    Ok((lo, hi))
}

pub fn builtin<F: Field>(f: &F, name: &str) -> Result<Source<F::Elem>> {
    let unknown = || bad(format!("unknown builtin '{name}'; available: {BUILTINS}"));
    let src = match name {
        "cubic" => Source::Presentation(zoo::twisted_cubic(f)),
        "twopoints" => Source::Presentation(zoo::two_points(f)),
        "hm" => Source::Differential(zoo::horrocks_mumford(f).0),
        _ => {
            if let Some(rest) = name.strip_prefix("omega") {
                let (v, p) = rest.split_once(':').ok_or_else(unknown)?;
                Source::Presentation(zoo::twisted_differentials(f, int(v, "v")?, int(p, "p")?)?)
            } else if let Some(rest) = name.strip_prefix("point") {
                Source::Presentation(zoo::point_module(f, int(rest, "v")?))
            } else if let Some(rest) = name.strip_prefix('o') {
                let (v, d) = rest.split_once(':').unwrap_or((rest, "0"));
                Source::Presentation(zoo::line_bundle(int(v, "v")?, int(d, "twist")?))
            } else {
                return Err(unknown());
            }
        }
    };
    if let Source::Presentation(p) = &src {
        if p.v == 0 {
            return Err(bad("projective space needs v ≥ 1".into()));
        }
    }
    Ok(src)
}

/// A presentation (`gens`), a differential (`entries` with `v`), or a saved window (`complex`).
pub fn parse_document<F: Field>(f: &F, text: &str) -> Result<Source<F::Elem>> {
    let doc: Value = serde_json::from_str(text).map_err(|e| bad(format!("input is not JSON: {e}")))?;
    if doc.get("complex").is_some() {
        Ok(Source::Window(TateWindow::from_json(f, &doc)?))
    } else if doc.get("gens").is_some() {
        Ok(Source::Presentation(SPresentation::from_json(f, &doc)?))
    } else if doc.get("entries").is_some() {
        let v = doc.get("v").and_then(Value::as_u64).ok_or_else(|| bad("a differential needs 'v'".into()))?;
        Ok(Source::Differential(ExtMatrix::from_json(f, v as usize, &doc)?))
    } else {
        Err(bad("input must be a presentation, a differential, or a window".into()))
    }
}

pub fn default_window(builtin: Option<&str>) -> (i64, i64) {
    if builtin == Some("hm") {
        (-6, 4)
    } else {
        (-4, 4)
    }
}

/// The window over [lo, hi]. Saved windows are only ever cut down, never extended.
pub fn resolve<F: Field>(f: &F, src: &Source<F::Elem>, window: Option<(i64, i64)>, default: (i64, i64), start: Option<i64>) -> Result<TateWindow<F::Elem>> {
    match src {
        Source::Presentation(p) => {
            let (lo, hi) = window.unwrap_or(default);
            tate_from_presentation(f, p, start, lo, hi)
        }
        Source::Differential(d) => {
            let (lo, hi) = window.unwrap_or(default);
            if lo > 0 || hi < 1 {
                return Err(bad(format!("a differential T^0 → T^1 needs a window containing 0:1, got {lo}:{hi}")));
            }
            tate_from_differential(f, d, (-lo) as usize, (hi - 1) as usize)
        }
        Source::Window(w) => {
            let Some((lo, hi)) = window else { return Ok(w.clone()) };
            if lo < w.lo() || hi > w.hi() {
                return Err(BggError::WindowInsufficient(format!(
                    "saved window is [{}, {}], {lo}:{hi} was requested",
                    w.lo(),
                    w.hi()
                )));
            }
            Ok(TateWindow { field: w.field, complex: w.complex.truncate(lo, hi), provenance: w.provenance.clone() })
        }
    }
}

fn parse_scalar<F: Field>(f: &F, s: &str) -> Result<F::Elem> {
    let s = s.trim();
    match s.parse::<i64>() {
        Ok(n) => Ok(f.from_i64(n)),
        Err(_) => f.from_json(&Value::String(s.to_string())),
    }
}

/// "1,0,-2" as a coordinate vector.
pub fn parse_vector<F: Field>(f: &F, s: &str) -> Result<Vec<F::Elem>> {
    s.split(',').map(|x| parse_scalar(f, x)).collect()
}

/// "1,0,0;0,1,0" as a list of linear forms.
pub fn parse_forms<F: Field>(f: &F, s: &str) -> Result<Vec<Vec<F::Elem>>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(';').map(|row| parse_vector(f, row)).collect()
}

//! Canonical JSON forms.
//!
//! `serde_json`'s default map is ordered by key, so every object serializes with
//! sorted keys; rationals are always reduced. Equal values give byte-identical text.
//! Parse errors carry the JSON path of the first offending value.

use std::collections::BTreeMap;

use serde_json::{json, Map, Value};

use crate::bott::SplitBundleDegrees;
use crate::cech::{Cochain, SheafKind, SheafSpec};
use crate::error::{Error, Result};
use crate::exterior::{GrassmannElement, MultiIndex};
use crate::laurent::{format_rational, parse_rational, LaurentPoly, Rational};
use crate::supermap::{SuperMap, Trivialization};

fn perr(path: &str, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_string(),
        message: message.into(),
    }
}

pub fn rational_to_json(r: &Rational) -> Value {
    Value::String(format_rational(r))
}

pub fn rational_from_json(v: &Value, path: &str) -> Result<Rational> {
    match v {
        Value::String(s) => parse_rational(s).ok_or_else(|| perr(path, format!("not a rational: {s:?}"))),
        Value::Number(n) => n
            .as_i64()
            .map(|i| Rational::from_integer(i.into()))
            .ok_or_else(|| perr(path, "numbers must be integers; write fractions as \"num/den\"")),
        _ => Err(perr(path, "expected a rational string")),
    }
}

pub fn poly_to_json(p: &LaurentPoly) -> Value {
    Value::Array(
        p.terms()
            .map(|(e, c)| json!({"exps": e.as_slice(), "coef": format_rational(c)}))
            .collect(),
    )
}

fn int_list(v: &Value, path: &str) -> Result<Vec<i64>> {
    let arr = v.as_array().ok_or_else(|| perr(path, "expected an array of integers"))?;
    arr.iter()
        .enumerate()
        .map(|(i, x)| x.as_i64().ok_or_else(|| perr(&format!("{path}[{i}]"), "expected an integer")))
        .collect()
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| perr(path, format!("missing field {key:?}")))
}

fn object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| perr(path, "expected an object"))
}

pub fn poly_from_json(v: &Value, dim: usize, path: &str) -> Result<LaurentPoly> {
    let arr = v.as_array().ok_or_else(|| perr(path, "expected a list of terms"))?;
    let mut terms = Vec::with_capacity(arr.len());
    for (i, t) in arr.iter().enumerate() {
        let tp = format!("{path}[{i}]");
        let o = object(t, &tp)?;
        let exps = int_list(field(o, "exps", &tp)?, &format!("{tp}.exps"))?;
        if exps.len() != dim {
            return Err(perr(&format!("{tp}.exps"), format!("expected {dim} exponents, got {}", exps.len())));
        }
        let exps: Vec<i32> = exps
            .iter()
            .map(|&e| i32::try_from(e).map_err(|_| perr(&format!("{tp}.exps"), "exponent out of range")))
            .collect::<Result<_>>()?;
        let c = rational_from_json(field(o, "coef", &tp)?, &format!("{tp}.coef"))?;
        terms.push((exps, c));
    }
    LaurentPoly::from_terms(dim, terms)
}

pub fn grassmann_to_json(g: &GrassmannElement) -> Value {
    json!({
        "q": g.q(),
        "p": g.p(),
        "terms": g
            .terms()
            .map(|(i, c)| json!({"indices": i.indices(), "coef": poly_to_json(c)}))
            .collect::<Vec<_>>(),
    })
}

/// `q` and `p` are taken from the header when present and must then match the context.
pub fn grassmann_from_json(v: &Value, q: usize, p: usize, path: &str) -> Result<GrassmannElement> {
    let o = object(v, path)?;
    for (key, want) in [("q", q), ("p", p)] {
        if let Some(h) = o.get(key) {
            if h.as_u64() != Some(want as u64) {
                return Err(perr(&format!("{path}.{key}"), format!("expected {want}")));
            }
        }
    }
    let terms = field(o, "terms", path)?
        .as_array()
        .ok_or_else(|| perr(&format!("{path}.terms"), "expected a list"))?;
    let mut out = Vec::new();
    for (i, t) in terms.iter().enumerate() {
        let tp = format!("{path}.terms[{i}]");
        let to = object(t, &tp)?;
        let idx = int_list(field(to, "indices", &tp)?, &format!("{tp}.indices"))?;
        let idx: Vec<usize> = idx.iter().map(|&a| a.max(0) as usize).collect();
        let mi = MultiIndex::from_indices(&idx)
            .filter(|m| m.max_generator() <= q && !idx.contains(&0))
            .ok_or_else(|| perr(&format!("{tp}.indices"), format!("not a strictly increasing subset of 1..={q}")))?;
        let c = poly_from_json(field(to, "coef", &tp)?, p, &format!("{tp}.coef"))?;
        out.push((mi, c));
    }
    GrassmannElement::from_terms(q, p, out)
}

pub fn sheaf_to_json(s: &SheafSpec) -> Value {
    json!({"n": s.n, "kind": s.kind.name(), "twists": s.twists()})
}

pub fn sheaf_from_json(v: &Value, path: &str) -> Result<SheafSpec> {
    let o = object(v, path)?;
    let n = field(o, "n", path)?
        .as_u64()
        .ok_or_else(|| perr(&format!("{path}.n"), "expected an integer"))? as usize;
    let twists = int_list(field(o, "twists", path)?, &format!("{path}.twists"))?;
    let kind = match field(o, "kind", path)?.as_str() {
        Some("line") => SheafKind::LineSum(twists),
        Some("tangent") => SheafKind::TangentTwisted(twists),
        Some("one-form") => SheafKind::OneFormTwisted(twists),
        _ => return Err(perr(&format!("{path}.kind"), "expected \"line\", \"tangent\" or \"one-form\"")),
    };
    SheafSpec::new(n, kind).map_err(|e| perr(path, e.to_string()))
}

fn simplex_key(s: &[usize]) -> String {
    s.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",")
}

fn parse_key(k: &str, path: &str) -> Result<Vec<usize>> {
    k.split(',')
        .map(|x| x.trim().parse::<usize>().map_err(|_| perr(path, format!("bad simplex key {k:?}"))))
        .collect()
}

pub fn cochain_to_json(c: &Cochain) -> Value {
    let values: Map<String, Value> = c
        .values()
        .map(|(s, sec)| (simplex_key(s), Value::Array(sec.iter().map(poly_to_json).collect())))
        .collect();
    json!({"sheaf": sheaf_to_json(c.sheaf()), "degree": c.degree(), "values": values})
}

pub fn cochain_from_json(v: &Value, path: &str) -> Result<Cochain> {
    let o = object(v, path)?;
    let sheaf = sheaf_from_json(field(o, "sheaf", path)?, &format!("{path}.sheaf"))?;
    let degree = field(o, "degree", path)?
        .as_u64()
        .ok_or_else(|| perr(&format!("{path}.degree"), "expected an integer"))? as usize;
    let mut c = Cochain::zero(sheaf.clone(), degree);
    let vals = object(field(o, "values", path)?, &format!("{path}.values"))?;
    for (k, sec) in vals {
        let kp = format!("{path}.values.{k}");
        let s = parse_key(k, &kp)?;
        let arr = sec.as_array().ok_or_else(|| perr(&kp, "expected a list of components"))?;
        let sec = arr
            .iter()
            .enumerate()
            .map(|(i, p)| poly_from_json(p, sheaf.n, &format!("{kp}[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        c.set(&s, sec).map_err(|e| perr(&kp, e.to_string()))?;
    }
    Ok(c)
}

pub fn supermap_to_json(m: &SuperMap) -> Value {
    json!({
        "even": m.even().iter().map(grassmann_to_json).collect::<Vec<_>>(),
        "odd": m.odd().iter().map(grassmann_to_json).collect::<Vec<_>>(),
    })
}

/// The thickening file: all ordered pairs are written.
pub fn trivialization_to_json(t: &Trivialization) -> Value {
    let maps: Map<String, Value> = t
        .maps()
        .iter()
        .map(|(&(u, v), m)| (format!("{u},{v}"), supermap_to_json(m)))
        .collect();
    json!({
        "space": format!("P{}", t.n()),
        "order": t.order(),
        "degrees": t.degrees().degrees(),
        "maps": maps,
    })
}

pub fn trivialization_from_json(v: &Value) -> Result<Trivialization> {
    let o = object(v, "$")?;
    let n = match field(o, "space", "$")?.as_str() {
        Some("P1") => 1,
        Some("P2") => 2,
        _ => return Err(perr("$.space", "expected \"P1\" or \"P2\"")),
    };
    let order = field(o, "order", "$")?
        .as_u64()
        .ok_or_else(|| perr("$.order", "expected a nonnegative integer"))? as usize;
    let degrees = int_list(field(o, "degrees", "$")?, "$.degrees")?;
    let degrees = SplitBundleDegrees::new(degrees).map_err(|e| perr("$.degrees", e.to_string()))?;
    let q = degrees.rank();
    let mut given = BTreeMap::new();
    if let Some(maps) = o.get("maps") {
        let maps = object(maps, "$.maps")?;
        for (k, m) in maps {
            let kp = format!("$.maps.{k}");
            let pair = parse_key(k, &kp)?;
            if pair.len() != 2 || pair[0] == pair[1] || pair.iter().any(|&c| c > n) {
                return Err(perr(&kp, format!("not an ordered pair of distinct charts of CP{n}")));
            }
            let mo = object(m, &kp)?;
            let comps = |key: &str, len: usize| -> Result<Vec<GrassmannElement>> {
                let p = format!("{kp}.{key}");
                let arr = field(mo, key, &kp)?.as_array().ok_or_else(|| perr(&p, "expected a list"))?;
                if arr.len() != len {
                    return Err(perr(&p, format!("expected {len} components, got {}", arr.len())));
                }
                arr.iter()
                    .enumerate()
                    .map(|(i, g)| grassmann_from_json(g, q, n, &format!("{p}[{i}]")))
                    .collect()
            };
            let even = comps("even", n)?;
            let odd = comps("odd", q)?;
            let sm = SuperMap::new(pair[0], pair[1], order, even, odd).map_err(|e| perr(&kp, e.to_string()))?;
            given.insert((pair[0], pair[1]), sm);
        }
    }
    Trivialization::from_maps(n, &degrees, order, given).map_err(|e| match e {
        Error::Parse { .. } => e,
        other => perr("$.maps", other.to_string()),
    })
}

/// Pretty, canonical text; the trailing newline keeps files diff-friendly.
pub fn to_canonical_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

pub fn parse_file(path: &std::path::Path) -> Result<Value> {
    let text = std::fs::read_to_string(path).map_err(|e| perr("$", format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| perr("$", format!("invalid JSON: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::ratio;

    #[test]
    fn poly_round_trip() {
        let p = LaurentPoly::from_terms(2, vec![(vec![1, -2], ratio(3, 6)), (vec![0, 0], ratio(-4, 1))]).unwrap();
        let v = poly_to_json(&p);
        assert_eq!(
            serde_json::to_string(&v).unwrap(),
            r#"[{"coef":"-4","exps":[0,0]},{"coef":"1/2","exps":[1,-2]}]"#
        );
        assert_eq!(poly_from_json(&v, 2, "$").unwrap(), p);
    }

    #[test]
    fn bad_paths_are_reported() {
        let v: Value = serde_json::from_str(r#"[{"exps":[1],"coef":"x"}]"#).unwrap();
        match poly_from_json(&v, 1, "$.p") {
            Err(Error::Parse { path, .. }) => assert_eq!(path, "$.p[0].coef"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn thickening_round_trip() {
        let d = SplitBundleDegrees::new(vec![1, 0, -2]).unwrap();
        let t = Trivialization::split_model(2, &d, 2).unwrap();
        let text = to_canonical_string(&trivialization_to_json(&t));
        let back = trivialization_from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back, t);
        let bare = json!({"space": "P2", "order": 2, "degrees": [1, 0, -2]});
        assert_eq!(trivialization_from_json(&bare).unwrap(), t);
    }
}

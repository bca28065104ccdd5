use serde_json::{json, Value};

use super::ScanReport;
use crate::criteria::{ExclusionVerdict, Triple, VerdictKind};
use crate::error::Error;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

impl ExclusionVerdict {
    /// `{n, k, s, kind, prime, l, r, delta}` with nulls where a field does
    /// not apply.
    pub fn to_json(&self) -> Value {
        let (l, r, delta) = match self.kind {
            VerdictKind::ExcludedByFilaseta { l, .. } => (json!(l), Value::Null, Value::Null),
            VerdictKind::ExcludedByShiftBound { r, delta, .. } => {
                (Value::Null, json!(r), json!(delta))
            }
            _ => (Value::Null, Value::Null, Value::Null),
        };
        json!({
            "n": self.triple.n,
            "k": self.triple.k,
            "s": self.triple.s,
            "kind": self.kind.name(),
            "prime": self.kind.prime(),
            "l": l,
            "r": r,
            "delta": delta,
        })
    }
}

pub(crate) fn triple_json(t: &Triple) -> Value {
    json!({ "n": t.n, "k": t.k, "s": t.s })
}

impl ScanReport {
    pub fn to_json(&self) -> Value {
        let components: Vec<Value> = self
            .space
            .components
            .iter()
            .map(|c| {
                json!({
                    "label": c.label,
                    "pairs": c.pairs.len(),
                    "s": [c.s.lo, c.s.hi],
                    "shift_bound": c.shift_bound,
                })
            })
            .collect();
        json!({
            "range": {
                "description": self.space.description,
                "components": components,
                "triples": self.total,
            },
            "survivors": self.survivors.iter().map(triple_json).collect::<Vec<_>>(),
            "verdicts": self.verdicts.iter().map(ExclusionVerdict::to_json).collect::<Vec<_>>(),
            "counts": self.counts,
            "meta": { "version": VERSION, "seconds": self.seconds },
        })
    }

    /// One row per kept verdict: `n,k,s,kind,prime`.
    pub fn to_csv(&self) -> Result<String, Error> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
        w.write_record(["n", "k", "s", "kind", "prime"])
            .map_err(io)?;
        for v in &self.verdicts {
            let prime = v.kind.prime().map(|p| p.to_string()).unwrap_or_default();
            w.write_record([
                v.triple.n.to_string(),
                v.triple.k.to_string(),
                v.triple.s.to_string(),
                v.kind.name().to_string(),
                prime,
            ])
            .map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is ascii"))
    }
}

#[cfg(test)]
mod tests {
    use super::super::*;

    #[test]
    fn json_and_csv_shapes() {
        let r = TripleRange::inner(Interval::new(5, 5), Interval::new(4, 4)).unwrap();
        let rep = scan(&r).unwrap();
        let j = rep.to_json();
        assert_eq!(j["meta"]["seconds"], serde_json::Value::Null);
        assert_eq!(j["survivors"][0]["n"], 10);
        let csv = rep.to_csv().unwrap();
        assert!(csv.starts_with("n,k,s,kind,prime\n"));
        assert_eq!(csv.lines().count(), 1 + rep.verdicts.len());
        assert!(csv.contains("10,5,4,NotExcluded,\n"));
    }

    #[test]
    fn output_is_deterministic() {
        let r = TripleRange::inner(Interval::new(2, 8), Interval::new(1, 20)).unwrap();
        let a = scan(&r).unwrap().to_json().to_string();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let b = pool.install(|| scan(&r).unwrap().to_json().to_string());
        assert_eq!(a, b);
    }
}

//! Parameter reference for `spinbus list`.

use serde_json::{json, Map, Value};

use crate::config::ExperimentKind;

pub struct Param {
    pub name: &'static str,
    pub kind: &'static str,
    pub default: Option<Value>,
    pub help: &'static str,
}

fn p(name: &'static str, kind: &'static str, default: Option<Value>, help: &'static str) -> Param {
    Param { name, kind, default, help }
}

pub fn summary(kind: ExperimentKind) -> &'static str {
    match kind {
        ExperimentKind::Pst => "engineered XX chain: spectrum, mirror check and end-to-end fidelity",
        ExperimentKind::Wavepacket => "Gaussian packet in a parabolic field: scan or trace the mirror fidelity",
        ExperimentKind::Ladder => "effective coupling of two qubits across a Heisenberg ladder",
        ExperimentKind::Memory => "electron spin stored in a nuclear ring: rates and fidelity",
    }
}

pub fn params(kind: ExperimentKind) -> Vec<Param> {
    match kind {
        ExperimentKind::Pst => vec![
            p("n", "integer", None, "chain length, at least 2"),
            p("k", "integer", Some(json!(0)), "coupling family index; k > 0 needs even n"),
            p("source", "integer", Some(json!(1)), "1-based start site"),
            p("target", "integer", None, "1-based end site, defaults to n"),
            p("t_max", "number", None, "trace length, defaults to pi"),
            p("samples", "integer", Some(json!(401)), "trace points"),
        ],
        ExperimentKind::Wavepacket => vec![
            p("distance", "integer", None, "even transfer distance L"),
            p("delta", "number", None, "packet width parameter"),
            p("n_sites", "integer", None, "odd chain length, defaults to L + 201"),
            p("lambda_scale", "number", None, "fixed field scale; omit to scan"),
            p("lambda_min", "number", Some(json!(1e-6)), "scan lower bound"),
            p("lambda_max", "number", Some(json!(1e-1)), "scan upper bound"),
            p("grid_points", "integer", Some(json!(26)), "log-spaced scan points"),
            p("horizon_periods", "number", Some(json!(1.5)), "time window in harmonic periods"),
            p("samples", "integer", Some(json!(801)), "trace points"),
        ],
        ExperimentKind::Ladder => vec![
            p("distances", "array", None, "qubit separations L = N + 1, at most 9"),
            p("j", "number", None, "ladder exchange"),
            p("j0", "number", None, "qubit-ladder exchange"),
            p("connection", "string", None, "type_a or type_b"),
        ],
        ExperimentKind::Memory => vec![
            p("n", "integer", None, "ring size"),
            p("j", "number", None, "nuclear exchange"),
            p("lambda", "number", None, "hyperfine scale"),
            p("s", "number", Some(json!(0.5)), "nuclear spin"),
            p("sigma", "number", None, "Gaussian hyperfine width in sites; omit for uniform"),
            p("b0", "number", Some(json!(0.0)), "external field"),
            p("gn_mun", "number", Some(json!(0.0)), "nuclear Zeeman coefficient"),
            p("ge_mub", "number", Some(json!(0.0)), "electron Zeeman coefficient"),
            p("broadening", "number", None, "resonance half width, defaults to the mode spacing"),
            p("t_max", "number", None, "trace length, defaults to pi / g"),
            p("samples", "integer", Some(json!(401)), "trace points"),
        ],
    }
}

/// JSON schema of the `parameters` object.
pub fn schema(kind: ExperimentKind) -> Value {
    let mut props = Map::new();
    let mut required = Vec::new();
    for param in params(kind) {
        let mut entry = json!({"type": param.kind, "description": param.help});
        if param.kind == "array" {
            entry["items"] = json!({"type": "integer"});
        }
        if param.name == "connection" {
            entry["enum"] = json!(["type_a", "type_b"]);
        }
        match param.default {
            Some(d) => entry["default"] = d,
            None if !param.help.contains("omit") && !param.help.contains("defaults") => {
                required.push(param.name)
            }
            None => {}
        }
        props.insert(param.name.to_string(), entry);
    }
    json!({
        "title": kind.name(),
        "description": summary(kind),
        "type": "object",
        "properties": props,
        "required": required,
        "additionalProperties": false,
    })
}

pub fn table(kind: ExperimentKind) -> String {
    let mut out = format!("{}: {}\n", kind, summary(kind));
    for param in params(kind) {
        let default = param.default.map(|d| d.to_string()).unwrap_or_else(|| "-".into());
        out.push_str(&format!("  {:<16} {:<8} {:<8} {}\n", param.name, param.kind, default, param.help));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn required_fields() {
        let s = schema(ExperimentKind::Pst);
        assert_eq!(s["required"], json!(["n"]));
        let s = schema(ExperimentKind::Ladder);
        assert_eq!(s["required"].as_array().unwrap().len(), 4);
    }
}

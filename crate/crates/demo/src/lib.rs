//! Browser bindings. Every entry point takes model documents as text and
//! returns a JSON string; errors come back as `{"error": ...}`.

use serde_json::{json, Value};
use wasm_bindgen::prelude::wasm_bindgen;

use gradedwl::format::parse_model;
use gradedwl::gfp::union_fixpoint;
use gradedwl::gmml::{check, parse};
use gradedwl::kripke::{KripkeModel, NodeId, PointedModel};
use gradedwl::types::TypeTable;
use gradedwl::wl::{distinguishing_formula, refine_to_stable, Distinction};

fn model(text: &str) -> Result<KripkeModel, String> {
    parse_model(text).map_err(|e| format!("model: {e}"))
}

fn pointed(text: &str, point: u32) -> Result<PointedModel, String> {
    PointedModel::new(model(text)?, NodeId(point)).map_err(|e| e.to_string())
}

fn reply(r: Result<Value, String>) -> String {
    r.unwrap_or_else(|e| json!({ "error": e })).to_string()
}

pub fn check_json(model_text: &str, point: u32, formula: &str) -> Result<Value, String> {
    let pm = pointed(model_text, point)?;
    let f = parse(formula, pm.vocabulary()).map_err(|e| format!("formula: {e}"))?;
    let holds = check(&pm, &f).map_err(|e| e.to_string())?;
    Ok(json!({ "formula": f.to_string(), "holds": holds }))
}

pub fn refine_json(model_text: &str) -> Result<Value, String> {
    let m = model(model_text)?;
    let table = TypeTable::shared(m.vocabulary().clone());
    let r = refine_to_stable(&table, &m).map_err(|e| e.to_string())?;
    let rounds: Vec<Value> = r
        .history
        .iter()
        .map(|c| {
            let kernel = c.kernel();
            let nodes: Vec<Value> = (0..m.size()).map(|pos| json!({ "node": m.node_at(pos).0, "class": kernel[pos] })).collect();
            json!({ "round": c.round, "classes": c.classes(), "nodes": nodes })
        })
        .collect();
    let edges: Vec<Value> = m.edges().map(|(c, u, v)| json!([c, u.0, v.0])).collect();
    Ok(json!({ "stable_at": r.stable_at, "rounds": rounds, "edges": edges }))
}

pub fn distinguish_json(a: &str, pa: u32, b: &str, pb: u32) -> Result<Value, String> {
    let p1 = pointed(a, pa)?;
    let p2 = pointed(b, pb)?;
    let (d, formula) = distinguishing_formula(&p1, &p2).map_err(|e| e.to_string())?;
    let mut out = match d {
        Distinction::Equivalent { stable_at } => json!({ "verdict": "equivalent", "stable_at": stable_at }),
        Distinction::SeparatedAt { round } => json!({ "verdict": "separated", "separated_at": round }),
    };
    if let Some(f) = formula {
        out["formula"] = json!(f.to_string());
    }
    match union_fixpoint(&p1, &p2) {
        Ok((fix, x, y)) => {
            out["fixpoint_equivalent"] = json!(fix.relation().contains(x, y));
            out["fixpoint_stages"] = json!(fix.stages);
        }
        Err(e) => out["fixpoint_skipped"] = json!(e.to_string()),
    }
    Ok(out)
}

#[wasm_bindgen]
pub fn check_formula(model_text: &str, point: u32, formula: &str) -> String {
    reply(check_json(model_text, point, formula))
}

#[wasm_bindgen]
pub fn refine(model_text: &str) -> String {
    reply(refine_json(model_text))
}

#[wasm_bindgen]
pub fn distinguish(a: &str, pa: u32, b: &str, pb: u32) -> String {
    reply(distinguish_json(a, pa, b, pb))
}

#[cfg(test)]
mod tests {
    use super::*;

    const PATH3: &str = "gradedwl-model v1\nchannels 1\nnodes 1 2 3\nedge 1 1 2\nedge 1 2 1\nedge 1 2 3\nedge 1 3 2\n";

    #[test]
    fn refine_reports_classes_per_round() {
        let v = refine_json(PATH3).unwrap();
        assert_eq!(v["stable_at"], 2);
        assert_eq!(v["rounds"][1]["classes"], 2);
        assert_eq!(v["rounds"][1]["nodes"][0]["class"], v["rounds"][1]["nodes"][2]["class"]);
    }

    #[test]
    fn check_and_errors() {
        assert_eq!(check_json(PATH3, 2, "<1:2>T").unwrap()["holds"], true);
        assert!(check_json(PATH3, 7, "T").is_err());
        let e: Value = serde_json::from_str(&check_formula(PATH3, 1, "<1:")).unwrap();
        assert!(e["error"].as_str().unwrap().starts_with("formula"));
    }

    #[test]
    fn distinguish_reports_both_oracles() {
        let v = distinguish_json(PATH3, 1, PATH3, 2).unwrap();
        assert_eq!(v["verdict"], "separated");
        assert_eq!(v["separated_at"], 1);
        assert_eq!(v["fixpoint_equivalent"], false);
        assert!(v["formula"].is_string());
        let v = distinguish_json(PATH3, 1, PATH3, 3).unwrap();
        assert_eq!(v["verdict"], "equivalent");
        assert_eq!(v["fixpoint_equivalent"], true);
    }
}

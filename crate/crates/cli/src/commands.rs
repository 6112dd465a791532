use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde_json::{json, Value};

use gradedwl::automaton::{run, Automaton, RunBudget, Verdict};
use gradedwl::format::{parse_automaton, parse_model, serialize_model, serialize_type_automaton, AutomatonDocument};
use gradedwl::gfp::union_fixpoint;
use gradedwl::gmml::{check, parse, WidthVector};
use gradedwl::grid::{GridMode, GridSpec};
use gradedwl::kripke::{KripkeModel, NodeId, PointedModel, Vocabulary};
use gradedwl::stream::{diagonal, BudgetHit};
use gradedwl::translate::{automaton_to_disjunction, formula_to_type_disjunction, roundtrip_check, Budgets};
use gradedwl::types::{full_type, render_type, serialize_type, type_of_width, TypeTable};
use gradedwl::wl::{
    classic_wl, distinguishing_formula, refine_rounds, refine_to_stable, validate_classic, Coloring, Distinction,
};

use crate::error::{CliError, Status};
use crate::{BudgetArgs, Cli, Command, GridArgs, Oracle, Translate, VocabArgs};

pub struct Output {
    pub text: String,
    pub json: Value,
    pub status: Status,
    /// Printed on stderr in both modes.
    pub note: Option<String>,
}

impl Output {
    fn new(text: String, json: Value, status: Status) -> Self {
        Output { text, json, status, note: None }
    }
}

pub fn execute(cli: &Cli) -> Result<Output, CliError> {
    match &cli.command {
        Command::Check { model, point, formula } => cmd_check(model, *point, formula),
        Command::Type { model, point, depth, width, render } => cmd_type(model, *point, *depth, width.as_deref(), *render),
        Command::Refine { model, rounds, stable: _, trace, symmetric, classic } => {
            cmd_refine(model, *rounds, *trace, *symmetric, *classic)
        }
        Command::Distinguish { model_a, point_a, model_b, point_b, oracle, formula } => {
            cmd_distinguish(model_a, *point_a, model_b, *point_b, *oracle, *formula)
        }
        Command::Run { automaton, model, point, max_rounds, max_steps } => {
            cmd_run(automaton, model, *point, RunBudget { max_rounds: *max_rounds, max_steps: *max_steps })
        }
        Command::Translate(Translate::F2a { formulas, vocab, max_degree, max_items }) => {
            cmd_f2a(formulas, vocab, *max_degree, *max_items)
        }
        Command::Translate(Translate::A2f { automaton, budgets }) => cmd_a2f(automaton, budgets),
        Command::Roundtrip { formula, vocab, grid, budgets } => cmd_roundtrip(formula, vocab, grid, budgets),
        Command::Grid { vocab, grid, max_degree, out } => cmd_grid(vocab, grid, *max_degree, out.as_deref()),
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::input(&path.display().to_string(), e))
}

fn load_model(path: &Path) -> Result<KripkeModel, CliError> {
    parse_model(&read(path)?).map_err(|e| CliError::input(&path.display().to_string(), e))
}

fn pointed(model: KripkeModel, point: u32) -> Result<PointedModel, CliError> {
    Ok(PointedModel::new(model, NodeId(point))?)
}

fn vocabulary(v: &VocabArgs) -> Result<Vocabulary, CliError> {
    Vocabulary::new(0..v.props, v.channels).map_err(|e| CliError::Usage(e.to_string()))
}

fn budgets(b: &BudgetArgs) -> Budgets {
    Budgets {
        max_depth: b.max_depth,
        max_degree: b.max_degree,
        max_rounds: b.max_rounds.unwrap_or(b.max_depth),
        max_items: b.max_items,
        max_steps: b.max_steps,
    }
}

fn marker_text(m: Option<BudgetHit>) -> Option<String> {
    m.filter(BudgetHit::any).map(|m| m.to_string())
}

fn cmd_check(path: &Path, point: u32, text: &str) -> Result<Output, CliError> {
    let pm = pointed(load_model(path)?, point)?;
    let f = parse(text, pm.vocabulary())?;
    let holds = check(&pm, &f)?;
    let status = if holds { Status::Yes } else { Status::No };
    Ok(Output::new(format!("{holds}\n"), json!({ "node": point, "formula": f.to_string(), "holds": holds }), status))
}

fn parse_width(spec: &str, channels: u32) -> Result<WidthVector, CliError> {
    let levels = spec
        .split(';')
        .map(|level| {
            let l = level.split(',').map(|k| k.trim().parse::<usize>()).collect::<Result<Vec<_>, _>>();
            match l {
                Ok(l) if l.len() == channels as usize => Ok(l),
                _ => Err(CliError::Usage(format!("width level '{level}' needs {channels} comma-separated counts"))),
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(WidthVector::new(levels))
}

fn cmd_type(path: &Path, point: u32, depth: usize, width: Option<&str>, render: bool) -> Result<Output, CliError> {
    let pm = pointed(load_model(path)?, point)?;
    let table = TypeTable::new(pm.vocabulary().clone());
    let id = match width {
        Some(spec) if depth == 0 && spec.trim().is_empty() => type_of_width(&table, &pm, &WidthVector::empty())?,
        Some(spec) => {
            let w = parse_width(spec, pm.vocabulary().channels())?;
            if w.depth() != depth {
                return Err(CliError::Usage(format!("--width has {} levels but --depth is {depth}", w.depth())));
            }
            type_of_width(&table, &pm, &w)?
        }
        None => full_type(&table, &pm, depth)?,
    };
    let ser = serialize_type(&table, id)?;
    let mut text = format!("{ser}\n");
    let mut report = json!({ "node": point, "depth": depth, "full": table.is_full(id)?, "type": &*ser });
    if render {
        let f = render_type(&table, id)?;
        writeln!(text, "formula: {f}").unwrap();
        report["formula"] = json!(f.to_string());
    }
    Ok(Output::new(text, report, Status::Yes))
}

fn coloring_block(model: &KripkeModel, c: &Coloring, text: &mut String) -> Value {
    let mut nodes = Vec::new();
    for (pos, color) in c.colors.iter().enumerate() {
        writeln!(text, "node {} color {}", model.node_at(pos), color.0).unwrap();
        nodes.push(json!({ "node": model.node_at(pos), "color": color.0 }));
    }
    writeln!(text, "classes: {}", c.classes()).unwrap();
    json!({ "round": c.round, "nodes": nodes, "classes": c.classes() })
}

fn cmd_refine(path: &Path, rounds: Option<usize>, trace: bool, symmetric: bool, classic: bool) -> Result<Output, CliError> {
    let mut model = load_model(path)?;
    if symmetric {
        model = model.symmetric_closure();
    }
    if classic {
        validate_classic(&model)?;
    }
    let table = TypeTable::shared(model.vocabulary().clone());
    let (history, stable_at) = match rounds {
        Some(r) => (refine_rounds(&table, &model, r)?, None),
        None if classic => {
            let r = classic_wl(&table, &model)?;
            (r.history, Some(r.stable_at))
        }
        None => {
            let r = refine_to_stable(&table, &model)?;
            (r.history, Some(r.stable_at))
        }
    };
    let mut text = String::new();
    let shown: Vec<&Coloring> = if trace { history.iter().collect() } else { history.last().into_iter().collect() };
    let mut blocks = Vec::new();
    for c in shown {
        writeln!(text, "round {}", c.round).unwrap();
        blocks.push(coloring_block(&model, c, &mut text));
    }
    let mut report = json!({ "rounds": blocks });
    if let Some(t) = stable_at {
        writeln!(text, "stable_at: {t}").unwrap();
        report["stable_at"] = json!(t);
    }
    Ok(Output::new(text, report, Status::Yes))
}

fn cmd_distinguish(a: &Path, pa: u32, b: &Path, pb: u32, oracle: Oracle, want_formula: bool) -> Result<Output, CliError> {
    let p1 = pointed(load_model(a)?, pa)?;
    let p2 = pointed(load_model(b)?, pb)?;
    p1.vocabulary().ensure_same(p2.vocabulary())?;
    let mut text = String::new();
    let mut report = json!({});
    let mut status = Status::Yes;

    let wl = if oracle != Oracle::Gfp || want_formula { Some(distinguishing_formula(&p1, &p2)?) } else { None };
    let gfp = if oracle != Oracle::Wl {
        let (fix, x, y) = union_fixpoint(&p1, &p2)?;
        Some((fix.relation().contains(x, y), fix.stages))
    } else {
        None
    };

    let equivalent = match (&wl, gfp) {
        (Some((d, _)), _) if oracle != Oracle::Gfp => d.is_equivalent(),
        (_, Some((eq, _))) => eq,
        _ => unreachable!("one oracle always runs"),
    };
    let verdict = if equivalent { "equivalent" } else { "separated" };
    writeln!(text, "verdict: {verdict}").unwrap();
    report["verdict"] = json!(verdict);
    if oracle != Oracle::Gfp {
        match wl.as_ref().unwrap().0 {
            Distinction::SeparatedAt { round } => {
                writeln!(text, "separated_at: {round}").unwrap();
                report["separated_at"] = json!(round);
            }
            Distinction::Equivalent { stable_at } => {
                writeln!(text, "stable_at: {stable_at}").unwrap();
                report["stable_at"] = json!(stable_at);
            }
        }
    }
    if let Some((_, stages)) = gfp {
        writeln!(text, "stages: {stages}").unwrap();
        report["stages"] = json!(stages);
    }
    let source = match oracle {
        Oracle::Wl => "wl",
        Oracle::Gfp => "gfp",
        Oracle::Both => "both",
    };
    writeln!(text, "source: {source}").unwrap();
    report["source"] = json!(source);
    if oracle == Oracle::Both {
        let agree = wl.as_ref().unwrap().0.is_equivalent() == gfp.unwrap().0;
        writeln!(text, "oracles_agree: {}", if agree { "yes" } else { "no" }).unwrap();
        report["oracles_agree"] = json!(agree);
        if !agree {
            status = Status::No;
        }
    }
    if want_formula {
        match &wl.as_ref().unwrap().1 {
            Some(f) => {
                let verified = check(&p1, f)? && !check(&p2, f)?;
                writeln!(text, "formula: {f}").unwrap();
                writeln!(text, "verified: {}", if verified { "yes" } else { "no" }).unwrap();
                report["formula"] = json!(f.to_string());
                report["verified"] = json!(verified);
                if !verified {
                    status = Status::No;
                }
            }
            None => {
                writeln!(text, "formula: none").unwrap();
                report["formula"] = Value::Null;
            }
        }
    }
    Ok(Output::new(text, report, status))
}

fn run_report<A: Automaton>(
    a: &A,
    pm: &PointedModel,
    budget: RunBudget,
    name: impl Fn(&A::State) -> String,
) -> Result<Output, CliError> {
    let report = run(a, pm, budget)?;
    let trace: Vec<String> = report.trace.iter().map(name).collect();
    let (text, status) = match report.verdict {
        Verdict::Accepted { round } => (format!("accepted_at: {round}\n"), Status::Yes),
        Verdict::NotAcceptedWithinBudget { budget } => {
            let status = if budget.steps { Status::Budget } else { Status::No };
            (format!("not_accepted_within_budget\nbudget: {budget}\n"), status)
        }
    };
    let mut json = serde_json::to_value(report.verdict).expect("verdicts serialize");
    if let Verdict::NotAcceptedWithinBudget { budget } = report.verdict {
        json["budget"] = json!(budget.to_string());
    }
    json["trace"] = json!(trace);
    Ok(Output::new(text, json, status))
}

fn cmd_run(auto: &Path, model: &Path, point: u32, budget: RunBudget) -> Result<Output, CliError> {
    let doc = parse_automaton(&read(auto)?).map_err(|e| CliError::input(&auto.display().to_string(), e))?;
    let pm = pointed(load_model(model)?, point)?;
    match doc {
        AutomatonDocument::Table(a) => run_report(&a, &pm, budget, |&s| a.state_name(s).to_string()),
        AutomatonDocument::Types(d) => {
            let a = d.automaton();
            run_report(&a, &pm, budget, |&s| serialize_type(&d.table, s).map(|t| t.to_string()).unwrap_or_default())
        }
    }
}

fn cmd_f2a(texts: &[String], vocab: &VocabArgs, max_degree: usize, max_items: Option<usize>) -> Result<Output, CliError> {
    let table = TypeTable::shared(vocabulary(vocab)?);
    let streams = texts
        .iter()
        .map(|t| {
            let f = parse(t, table.vocabulary())?;
            Ok(formula_to_type_disjunction(&table, &f, max_degree)?)
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let (types, marker) = diagonal(streams.into_iter()).with_max_items(max_items).into_parts();
    let text = serialize_type_automaton(&table, &types, marker)?;
    let sers = types.iter().map(|&id| serialize_type(&table, id).map(|s| s.to_string())).collect::<Result<Vec<_>, _>>()?;
    let json = json!({
        "props": table.vocabulary().props(),
        "channels": table.vocabulary().channels(),
        "types": sers,
        "budget_reached": marker_text(marker),
    });
    Ok(Output::new(text, json, Status::Yes))
}

fn cmd_a2f(auto: &Path, b: &BudgetArgs) -> Result<Output, CliError> {
    let doc = parse_automaton(&read(auto)?).map_err(|e| CliError::input(&auto.display().to_string(), e))?;
    let budgets = budgets(b);
    let back = match &doc {
        AutomatonDocument::Table(a) => automaton_to_disjunction(a, &TypeTable::shared(a.vocabulary().clone()), &budgets)?,
        AutomatonDocument::Types(d) => automaton_to_disjunction(&d.automaton(), &d.table, &budgets)?,
    };
    let sers =
        back.types().iter().map(|&id| serialize_type(back.table(), id).map(|s| s.to_string())).collect::<Result<Vec<_>, _>>()?;
    let text: String = sers.iter().map(|s| format!("{s}\n")).collect();
    let marker = marker_text(back.marker());
    let mut out = Output::new(text, json!({ "types": sers, "budget_reached": marker }), Status::Yes);
    out.note = marker.map(|m| format!("budget-reached: {m}"));
    Ok(out)
}

fn grid_spec(vocab: &VocabArgs, g: &GridArgs, max_degree: usize) -> GridSpec {
    let mode = match g.count {
        Some(count) => GridMode::Random { count },
        None => GridMode::Exhaustive,
    };
    GridSpec { max_nodes: g.max_nodes, max_degree, channels: vocab.channels, props: vocab.props, seed: g.seed, mode }
}

fn cmd_roundtrip(text: &str, vocab: &VocabArgs, g: &GridArgs, b: &BudgetArgs) -> Result<Output, CliError> {
    let table = TypeTable::shared(vocabulary(vocab)?);
    let f = parse(text, table.vocabulary())?;
    let budgets = budgets(b);
    let models = grid_spec(vocab, g, budgets.max_degree).models()?;
    let r = roundtrip_check(&table, &f, models, &budgets)?;
    let mut out = String::new();
    writeln!(out, "formula: {}", r.formula).unwrap();
    writeln!(out, "models: {}", r.models).unwrap();
    writeln!(out, "points: {}", r.points).unwrap();
    writeln!(out, "agreements: {}", r.agreements).unwrap();
    writeln!(out, "disagreements: {}", r.disagreement_count).unwrap();
    for d in &r.disagreements {
        writeln!(
            out,
            "disagreement model {} node {} formula {} automaton {} disjunction {}",
            d.model, d.node, d.formula, d.automaton, d.disjunction
        )
        .unwrap();
    }
    writeln!(out, "disjuncts: {}", r.disjuncts).unwrap();
    if let Some(m) = marker_text(r.disjunction_marker) {
        writeln!(out, "budget_reached: {m}").unwrap();
    }
    let mut json = serde_json::to_value(&r).expect("reports serialize");
    json["disjunction_marker"] = json!(marker_text(r.disjunction_marker));
    let status = if r.all_agree() { Status::Yes } else { Status::No };
    Ok(Output::new(out, json, status))
}

fn cmd_grid(vocab: &VocabArgs, g: &GridArgs, max_degree: usize, out: Option<&Path>) -> Result<Output, CliError> {
    let spec = grid_spec(vocab, g, max_degree);
    let models = spec.models()?;
    let mut text = String::new();
    let mut docs = Vec::new();
    for (i, m) in models.enumerate() {
        let doc = serialize_model(&m);
        match out {
            Some(dir) => {
                let path = dir.join(format!("model-{i:06}.txt"));
                fs::write(&path, &doc).map_err(|e| CliError::input(&path.display().to_string(), e))?;
                docs.push(json!(path.display().to_string()));
            }
            None => {
                if i > 0 {
                    text.push('\n');
                }
                text.push_str(&doc);
                docs.push(json!(doc));
            }
        }
    }
    if let Some(dir) = out {
        writeln!(text, "wrote {} models to {}", docs.len(), dir.display()).unwrap();
    }
    Ok(Output::new(text, json!({ "count": docs.len(), "models": docs }), Status::Yes))
}
